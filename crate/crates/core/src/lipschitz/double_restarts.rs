use crate::error::{contract, Result};
use crate::rng::SeededRng;

use super::{Exp3Meta, Point, RestartMode, ZoomingBandit, ZoomingConfig};

/// Epoch-length ladder and EXP3 learner for the double-restart scheme.
///
/// Top epoch `H0 = ceil(T^((p_u+2)/(p_u+4)))`, ladder
/// `{ceil(H0 / 2^(i-1)) : i = 1..=ceil(log2 H0) + 1}` and mixing
/// `min(1, sqrt(|J| ln|J| / ((e-1) ceil(T/H0))))`.
pub fn double_restarts_ladder(horizon: u64, p_u: f64) -> Result<Exp3Meta> {
    if horizon < 2 {
        return Err(contract("double restarts need horizon >= 2"));
    }
    if !(p_u >= 0.0) {
        return Err(contract(format!("dimension bound p_u must be >= 0, got {p_u}")));
    }
    let t = horizon as f64;
    let h0 = (t.powf((p_u + 2.0) / (p_u + 4.0)).ceil() as u64).clamp(1, horizon);
    let n = (h0 as f64).log2().ceil() as u32 + 1;
    let ladder: Vec<u64> = (0..n)
        .map(|i| (h0 as f64 / 2f64.powi(i as i32)).ceil() as u64)
        .collect();
    let gamma = exp3_gamma(ladder.len(), horizon.div_ceil(h0));
    Exp3Meta::new(ladder, gamma, h0)
}

/// `min(1, sqrt(k ln k / ((e-1) rounds)))`; zero for a single candidate.
pub fn exp3_gamma(candidates: usize, rounds: u64) -> f64 {
    let k = candidates as f64;
    (k * k.ln() / ((std::f64::consts::E - 1.0) * rounds as f64))
        .sqrt()
        .min(1.0)
}

/// Zooming TS with restarts whose epoch length is re-drawn by EXP3 at the
/// start of every top epoch of length `H0`.
#[derive(Debug, Clone)]
pub struct DoubleRestartZooming {
    meta: Exp3Meta,
    template: ZoomingConfig,
    current: Option<ZoomingBandit>,
    round: u64,
    chosen: usize,
    prob: f64,
    epoch_reward: f64,
    choices: Vec<usize>,
}

impl DoubleRestartZooming {
    /// `template` supplies dimension, horizon, `tau0` and grid resolution; its
    /// mode and epoch length are overridden per top epoch.
    pub fn new(template: ZoomingConfig, p_u: f64) -> Result<Self> {
        let meta = double_restarts_ladder(template.horizon, p_u)?;
        Self::with_meta(template, meta)
    }

    pub fn with_meta(template: ZoomingConfig, meta: Exp3Meta) -> Result<Self> {
        let mut probe = template.clone();
        probe.mode = RestartMode::ZoomingTsRestart;
        probe.epoch_len = meta.top_epoch_len();
        probe.validate()?;
        Ok(Self {
            meta,
            template: probe,
            current: None,
            round: 1,
            chosen: 0,
            prob: 1.0,
            epoch_reward: 0.0,
            choices: Vec::new(),
        })
    }

    pub fn meta(&self) -> &Exp3Meta {
        &self.meta
    }

    /// Ladder index chosen in each top epoch so far.
    pub fn choices(&self) -> &[usize] {
        &self.choices
    }

    pub fn current(&self) -> Option<&ZoomingBandit> {
        self.current.as_ref()
    }

    /// Round number of the next `select_arm` call (1-based).
    pub fn round(&self) -> u64 {
        self.round
    }

    pub fn select_arm(&mut self, rng: &mut SeededRng) -> Result<Point> {
        if self.round > self.template.horizon {
            return Err(contract(format!(
                "round {} beyond horizon {}",
                self.round, self.template.horizon
            )));
        }
        let h0 = self.meta.top_epoch_len();
        let epoch = (self.round - 1) / h0;
        if (self.round - 1).is_multiple_of(h0) && self.choices.len() as u64 == epoch {
            let (j, p) = self.meta.draw(rng);
            let mut cfg = self.template.clone();
            cfg.epoch_len = self.meta.ladder()[j];
            self.current = Some(ZoomingBandit::new(cfg)?);
            self.chosen = j;
            self.prob = p;
            self.epoch_reward = 0.0;
            self.choices.push(j);
        }
        self.current
            .as_mut()
            .expect("bottom learner initialized at round 1")
            .select_arm(rng)
    }

    pub fn update(&mut self, pulled: &Point, reward: f64) -> Result<()> {
        let z = self
            .current
            .as_mut()
            .ok_or_else(|| contract("update without a preceding select_arm"))?;
        z.update(pulled, reward)?;
        self.epoch_reward += reward;
        self.round += 1;
        let h0 = self.meta.top_epoch_len();
        if (self.round - 1).is_multiple_of(h0) || self.round > self.template.horizon {
            self.meta.update(self.chosen, self.epoch_reward, self.prob)?;
            self.epoch_reward = 0.0;
        }
        Ok(())
    }
}
