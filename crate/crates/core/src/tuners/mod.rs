//! Hyperparameter tuners that sit on top of a [`GlbAlgorithm`](crate::glb::GlbAlgorithm).
//!
//! Every tuner follows the same round protocol: [`Tuner::propose`] returns the
//! hyperparameter vector for this round, the caller runs the bottom algorithm
//! with it, and [`Tuner::feedback`] hands back the observed reward.

mod candidates;
mod cdt;
mod fixed;

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};
use crate::glb::HyperparamSpec;
use crate::rng::SeededRng;

pub use candidates::{Op, Syndicated};
pub use cdt::{Cdt, CdtConfig, CdtDiagnostics};
pub use fixed::{Fixed, Theory};

/// Default discrete tuning set for the candidate-based baselines.
pub const CANDIDATES_C1: [f64; 6] = [0.1, 1.0, 2.0, 3.0, 4.0, 5.0];

/// Finer tuning set used to stress the candidate-based baselines.
pub const CANDIDATES_C2: [f64; 13] = [
    0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0,
];

/// Hyperparameters for one round.
#[derive(Debug, Clone, PartialEq)]
pub struct Proposal {
    /// Values in native units, one per hyperparameter.
    pub values: Vec<f64>,
    /// When set, the caller pulls a uniformly random arm and ignores `values`.
    pub warm_up: bool,
}

impl Proposal {
    pub fn tuned(values: Vec<f64>) -> Self {
        Self {
            values,
            warm_up: false,
        }
    }
}

pub trait Tuner: Send {
    fn name(&self) -> &'static str;

    /// Hyperparameters for round `t` (1-based).
    fn propose(&mut self, t: u64, rng: &mut SeededRng) -> Result<Proposal>;

    /// Reward observed for the most recent proposal.
    fn feedback(&mut self, y: f64) -> Result<()>;
}

/// Axis-aligned box `[a_1,b_1] x ... x [a_p,b_p]` of hyperparameter values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperBox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl HyperBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(contract("hyperparameter box needs at least one axis"));
        }
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                actual: hi.len(),
            });
        }
        for (i, (a, b)) in lo.iter().zip(&hi).enumerate() {
            if !(a.is_finite() && b.is_finite() && a <= b) {
                return Err(contract(format!("box axis {i} has invalid bounds [{a}, {b}]")));
            }
        }
        Ok(Self { lo, hi })
    }

    /// The same interval on every axis.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; dim], vec![hi; dim])
    }

    /// Box spanned by the tuning intervals of `specs`.
    pub fn from_specs(specs: &[HyperparamSpec]) -> Result<Self> {
        Self::new(
            specs.iter().map(|s| s.interval.0).collect(),
            specs.iter().map(|s| s.interval.1).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        v.len() == self.dim()
            && v.iter().zip(self.lo.iter().zip(&self.hi)).all(|(x, (a, b))| *a <= *x && *x <= *b)
    }

    /// `a_i + u_i (b_i - a_i)` per coordinate.
    pub fn map(&self, u: &[f64]) -> Result<Vec<f64>> {
        crate::linalg::check_dim(self.dim(), u.len())?;
        u.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(&ui, (&a, &b))| {
                if !(0.0..=1.0).contains(&ui) {
                    return Err(contract(format!("unit coordinate {ui} outside [0,1]")));
                }
                Ok(if a == b { a } else { a + ui * (b - a) })
            })
            .collect()
    }

    /// Inverse of [`HyperBox::map`]. A degenerate axis maps back to 0.5.
    pub fn unmap(&self, v: &[f64]) -> Result<Vec<f64>> {
        crate::linalg::check_dim(self.dim(), v.len())?;
        v.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .enumerate()
            .map(|(coord, (&x, (&a, &b)))| {
                if !(a <= x && x <= b) {
                    return Err(Error::OutOfBox {
                        coord,
                        value: x,
                        lo: a,
                        hi: b,
                    });
                }
                Ok(if a == b { 0.5 } else { ((x - a) / (b - a)).clamp(0.0, 1.0) })
            })
            .collect()
    }
}

/// Warm-up length and restart epoch for a horizon `T` and `p` hyperparameters:
/// `T1 = floor(T^{2/(p+3)})`, `T2 = floor(3 T^{(p+2)/(p+3)})`.
pub fn schedule_defaults(horizon: u64, p: usize) -> Result<(u64, u64)> {
    if horizon < 4 {
        return Err(contract(format!("schedule needs T >= 4, got {horizon}")));
    }
    if p == 0 {
        return Err(contract("schedule needs at least one hyperparameter"));
    }
    let t = horizon as f64;
    let q = p as f64 + 3.0;
    let t1 = t.powf(2.0 / q).floor() as u64;
    let t2 = (3.0 * t.powf((p as f64 + 2.0) / q)).floor() as u64;
    Ok((t1, t2.max(1)))
}

/// Which tuner drives a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TunerKind {
    Cdt,
    /// One EXP3 per hyperparameter; identical to TL when there is one.
    Syndicated,
    Op,
    Theory,
}

impl TunerKind {
    pub fn label(self) -> &'static str {
        match self {
            TunerKind::Cdt => "cdt",
            TunerKind::Syndicated => "syndicated",
            TunerKind::Op => "op",
            TunerKind::Theory => "theory",
        }
    }
}

/// Construction inputs shared by all tuners.
#[derive(Debug, Clone)]
pub struct TunerSettings {
    pub horizon: u64,
    pub specs: Vec<HyperparamSpec>,
    /// Candidate set used by Syndicated and OP for every hyperparameter.
    pub candidates: Vec<f64>,
    /// Overrides for the CDT warm-up length and epoch.
    pub t1: Option<u64>,
    pub t2: Option<u64>,
    pub tau0: f64,
    pub grid_resolution: Option<f64>,
}

impl TunerSettings {
    pub fn new(horizon: u64, specs: Vec<HyperparamSpec>) -> Self {
        Self {
            horizon,
            specs,
            candidates: CANDIDATES_C1.to_vec(),
            t1: None,
            t2: None,
            tau0: 0.5,
            grid_resolution: None,
        }
    }
}

pub fn build(kind: TunerKind, settings: &TunerSettings) -> Result<Box<dyn Tuner>> {
    Ok(match kind {
        TunerKind::Cdt => {
            let hyper_box = HyperBox::from_specs(&settings.specs)?;
            let mut cfg = CdtConfig::new(hyper_box, settings.horizon)?;
            if let Some(t1) = settings.t1 {
                cfg.t1 = t1;
            }
            if let Some(t2) = settings.t2 {
                cfg.t2 = t2;
            }
            cfg.tau0 = settings.tau0;
            cfg.grid_resolution = settings.grid_resolution;
            Box::new(Cdt::new(cfg)?)
        }
        TunerKind::Syndicated => {
            let sets = vec![settings.candidates.clone(); settings.specs.len()];
            Box::new(Syndicated::new(sets, settings.horizon)?)
        }
        TunerKind::Op => Box::new(Op::new(settings.candidates.clone(), settings.specs.clone())?),
        TunerKind::Theory => Box::new(Theory::new(settings.specs.clone())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn map_endpoints_and_midpoint() {
        let b = HyperBox::cube(1, 0.1, 5.0).unwrap();
        assert_eq!(b.map(&[0.0]).unwrap(), vec![0.1]);
        assert_eq!(b.map(&[1.0]).unwrap(), vec![5.0]);
        assert!((b.map(&[0.5]).unwrap()[0] - 2.55).abs() < 1e-15);
    }

    #[test]
    fn unmap_rejects_outside_and_handles_degenerate() {
        let b = HyperBox::new(vec![0.1, 2.0], vec![5.0, 2.0]).unwrap();
        assert!(matches!(b.unmap(&[6.0, 2.0]), Err(Error::OutOfBox { coord: 0, .. })));
        assert_eq!(b.unmap(&[0.1, 2.0]).unwrap(), vec![0.0, 0.5]);
        assert_eq!(b.map(&[0.3, 0.9]).unwrap()[1], 2.0);
        assert!(HyperBox::new(vec![1.0], vec![0.0]).is_err());
    }

    #[test]
    fn schedule_constants() {
        assert_eq!(schedule_defaults(14_000, 1).unwrap().0, 118);
        assert_eq!(schedule_defaults(14_000, 2).unwrap().0, 45);
        let t2 = schedule_defaults(14_000, 1).unwrap().1;
        assert_eq!(t2, 3861);
        assert!(schedule_defaults(3, 1).is_err());
    }
}
