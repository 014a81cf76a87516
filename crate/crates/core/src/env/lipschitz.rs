use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::rng::SeededRng;

/// Peak locations the switching testbed cycles through by default.
pub const DEFAULT_PEAKS: [f64; 5] = [0.05, 0.25, 0.45, 0.70, 0.95];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// `0.9 - 0.9 |x - a|`
    Triangle,
    /// `(2 / (3 pi)) sin((3 pi / 2)(x - a + 1/3))`
    Sine,
}

impl Family {
    pub fn eval(self, x: f64, peak: f64) -> f64 {
        match self {
            Family::Triangle => 0.9 - 0.9 * (x - peak).abs(),
            Family::Sine => 2.0 / (3.0 * PI) * (1.5 * PI * (x - peak + 1.0 / 3.0)).sin(),
        }
    }

    /// Maximum over `x`, attained at `x = peak`.
    pub fn max_value(self) -> f64 {
        match self {
            Family::Triangle => 0.9,
            Family::Sine => 2.0 / (3.0 * PI),
        }
    }
}

/// Piecewise-stationary 1-Lipschitz reward function on `[0,1]`.
///
/// `change_rounds[i]` is a round `c` with `f_c != f_{c+1}`: peak `i` is active
/// for rounds up to and including it, peak `i + 1` afterwards.
#[derive(Debug, Clone, PartialEq)]
pub struct SwitchingLipschitzEnv {
    family: Family,
    change_rounds: Vec<u64>,
    peaks: Vec<f64>,
    noise_sigma: f64,
    horizon: u64,
}

impl SwitchingLipschitzEnv {
    pub fn new(
        family: Family,
        change_rounds: Vec<u64>,
        peaks: Vec<f64>,
        noise_sigma: f64,
        horizon: u64,
    ) -> Result<Self> {
        if peaks.len() != change_rounds.len() + 1 {
            return Err(contract(format!(
                "{} change rounds need {} peaks, got {}",
                change_rounds.len(),
                change_rounds.len() + 1,
                peaks.len()
            )));
        }
        if change_rounds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(contract("change rounds must be strictly increasing"));
        }
        if change_rounds.iter().any(|&c| c == 0 || c >= horizon) {
            return Err(contract("change rounds must lie in [1, T-1]"));
        }
        if peaks.windows(2).any(|w| w[0] == w[1]) {
            return Err(contract("consecutive peaks must differ"));
        }
        if peaks.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return Err(contract("peaks must lie in [0,1]"));
        }
        if !(noise_sigma >= 0.0) {
            return Err(contract(format!("noise sigma must be >= 0, got {noise_sigma}")));
        }
        Ok(Self {
            family,
            change_rounds,
            peaks,
            noise_sigma,
            horizon,
        })
    }

    /// A single peak for the whole horizon.
    pub fn stationary(family: Family, peak: f64, noise_sigma: f64, horizon: u64) -> Result<Self> {
        Self::new(family, Vec::new(), vec![peak], noise_sigma, horizon)
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn change_rounds(&self) -> &[u64] {
        &self.change_rounds
    }

    pub fn peaks(&self) -> &[f64] {
        &self.peaks
    }

    pub fn noise_sigma(&self) -> f64 {
        self.noise_sigma
    }

    pub fn horizon(&self) -> u64 {
        self.horizon
    }

    /// Peak location active at round `t`.
    pub fn peak_at(&self, t: u64) -> f64 {
        let i = self.change_rounds.partition_point(|&c| c < t);
        self.peaks[i]
    }

    pub fn eval(&self, x: f64, t: u64) -> f64 {
        self.family.eval(x, self.peak_at(t))
    }

    pub fn optimal_mean(&self, _t: u64) -> f64 {
        self.family.max_value()
    }

    /// Noisy observation at `x`; one normal draw per call.
    pub fn draw_reward(&self, x: f64, t: u64, rng: &mut SeededRng) -> f64 {
        self.eval(x, t) + self.noise_sigma * rng.standard_normal()
    }
}

/// `count` distinct change rounds in `[1, T-1]` and a peak sequence with
/// consecutive entries distinct.
pub fn random_schedule(
    horizon: u64,
    count: usize,
    peaks: &[f64],
    rng: &mut SeededRng,
) -> Result<(Vec<u64>, Vec<f64>)> {
    if horizon < 2 || count as u64 > horizon - 1 {
        return Err(contract(format!("cannot place {count} change rounds in horizon {horizon}")));
    }
    if peaks.is_empty() || (count > 0 && peaks.len() < 2) {
        return Err(contract("switching schedule needs at least two peak locations"));
    }
    let mut rounds: Vec<u64> = rand::seq::index::sample(rng, (horizon - 1) as usize, count)
        .into_iter()
        .map(|i| i as u64 + 1)
        .collect();
    rounds.sort_unstable();
    let mut seq = vec![peaks[rng.below(peaks.len())]];
    for _ in 0..count {
        let prev = *seq.last().expect("non-empty");
        let others: Vec<f64> = peaks.iter().copied().filter(|p| *p != prev).collect();
        seq.push(others[rng.below(others.len())]);
    }
    Ok((rounds, seq))
}
