//! Contextual (generalized) linear bandits behind one interface.
//!
//! Each algorithm names its tunable hyperparameters together with a tuning
//! interval and a theoretical schedule. Hyperparameter values are passed to
//! [`GlbAlgorithm::select`] every round, so a tuner can change them on the
//! fly.

mod laplace_ts;
mod linucb;
mod lints;
mod mle;
mod sgdts;
mod ucbglm;

pub use laplace_ts::LaplaceTs;
pub use linucb::LinUcb;
pub use lints::LinTs;
pub use mle::{glm_mle_newton, glm_mle_newton_with, mle_gradient, MleOptions};
pub use sgdts::SgdTs;
pub use ucbglm::UcbGlm;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{check_dim, norm};
use crate::rng::SeededRng;

/// Slack on the unit-norm requirement for arm features.
pub const NORM_SLACK: f64 = 1e-12;

/// Mean function of the reward model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Link {
    #[default]
    Identity,
    Logistic,
}

impl Link {
    pub fn mean(self, z: f64) -> f64 {
        match self {
            Link::Identity => z,
            Link::Logistic => sigmoid(z),
        }
    }

    pub fn derivative(self, z: f64) -> f64 {
        match self {
            Link::Identity => 1.0,
            Link::Logistic => {
                let s = sigmoid(z);
                s * (1.0 - s)
            }
        }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `sigma sqrt(d ln((1 + t/lambda)/delta)) + S sqrt(lambda)`.
pub fn theoretical_alpha(t: f64, sigma: f64, d: usize, lambda: f64, delta: f64, s: f64) -> f64 {
    let log_term = ((1.0 + t / lambda) / delta).ln().max(0.0);
    sigma * (d as f64 * log_term).sqrt() + s * lambda.sqrt()
}

/// Theoretical value schedule of a hyperparameter.
#[derive(Debug, Clone, PartialEq)]
pub enum Theoretical {
    /// Confidence-ellipsoid exploration rate, see [`theoretical_alpha`].
    ExplorationRate {
        sigma: f64,
        dim: usize,
        lambda: f64,
        delta: f64,
        norm_bound: f64,
    },
    Constant(f64),
}

impl Theoretical {
    pub fn value(&self, t: u64) -> f64 {
        match *self {
            Theoretical::ExplorationRate {
                sigma,
                dim,
                lambda,
                delta,
                norm_bound,
            } => theoretical_alpha(t as f64, sigma, dim, lambda, delta, norm_bound),
            Theoretical::Constant(c) => c,
        }
    }
}

/// A tunable hyperparameter: its name, tuning interval in native units and
/// theoretical schedule. The schedule may leave the interval.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperparamSpec {
    pub name: String,
    pub interval: (f64, f64),
    pub theoretical: Theoretical,
}

impl HyperparamSpec {
    pub fn new(name: &str, interval: (f64, f64), theoretical: Theoretical) -> Self {
        Self {
            name: name.to_string(),
            interval,
            theoretical,
        }
    }
}

pub trait GlbAlgorithm: Send {
    fn name(&self) -> &'static str;

    fn dim(&self) -> usize;

    fn hyperparams(&self) -> &[HyperparamSpec];

    /// `true` while the algorithm cannot select yet and the caller should
    /// pull uniformly random arms.
    fn needs_warmup(&self) -> bool {
        false
    }

    /// Choose an arm given hyperparameter values in native units, in the
    /// order of [`GlbAlgorithm::hyperparams`].
    fn select(&self, arms: &[Vec<f64>], hyper: &[f64], rng: &mut SeededRng) -> Result<usize>;

    fn update(&mut self, x: &[f64], y: f64) -> Result<()>;

    /// Update with the hyperparameters that were used for the matching
    /// `select`. Algorithms whose update depends on a tuned step size
    /// override this; the default ignores `hyper`.
    fn update_tuned(&mut self, x: &[f64], y: f64, hyper: &[f64]) -> Result<()> {
        let _ = hyper;
        self.update(x, y)
    }

    /// Number of observations absorbed so far.
    fn count(&self) -> u64;

    /// Current point estimate of the model parameter.
    fn point_estimate(&self) -> Vec<f64>;
}

/// Check the arm set is non-empty, dimension-consistent and inside the unit
/// ball.
pub fn validate_arms(arms: &[Vec<f64>], dim: usize) -> Result<()> {
    if arms.is_empty() {
        return Err(Error::EmptyArmSet);
    }
    for (index, x) in arms.iter().enumerate() {
        check_dim(dim, x.len())?;
        let n = norm(x);
        if n > 1.0 + NORM_SLACK {
            return Err(Error::ArmNormExceeded { index, norm: n });
        }
    }
    Ok(())
}

/// Index of the first maximal score. NaN scores never win.
pub fn argmax(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, s) in scores.into_iter().enumerate() {
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

pub(crate) fn hyper_at(hyper: &[f64], idx: usize, name: &str) -> Result<f64> {
    hyper.get(idx).copied().ok_or_else(|| {
        crate::error::contract(format!("missing hyperparameter `{name}` at position {idx}"))
    })
}

/// Which algorithm to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgorithmKind {
    #[serde(rename = "linucb")]
    LinUcb,
    #[serde(rename = "lints")]
    LinTs,
    UcbGlm,
    LaplaceTs,
    SgdTs,
}

impl AlgorithmKind {
    pub fn label(self) -> &'static str {
        match self {
            AlgorithmKind::LinUcb => "linucb",
            AlgorithmKind::LinTs => "lints",
            AlgorithmKind::UcbGlm => "ucb_glm",
            AlgorithmKind::LaplaceTs => "laplace_ts",
            AlgorithmKind::SgdTs => "sgd_ts",
        }
    }
}

/// Shared construction parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgorithmSettings {
    pub dim: usize,
    pub horizon: u64,
    /// Ridge regularizer of the design matrix.
    pub lambda: f64,
    /// Noise scale assumed by the theoretical exploration rate.
    pub sigma: f64,
    /// Confidence level; `None` means `1/T`.
    pub delta: Option<f64>,
    /// Bound on the parameter norm.
    pub norm_bound: f64,
    pub link: Link,
    /// Tuning interval of every hyperparameter.
    pub interval: (f64, f64),
    /// Regularizer of the UCB-GLM design matrix; 0 means unregularized with a
    /// warm-up requirement.
    pub glm_ridge: f64,
    /// Smallest eigenvalue of the Gram matrix that ends UCB-GLM warm-up.
    pub warmup_eigen_floor: f64,
}

impl AlgorithmSettings {
    pub fn new(dim: usize, horizon: u64) -> Self {
        Self {
            dim,
            horizon,
            lambda: 1.0,
            sigma: 0.25,
            delta: None,
            norm_bound: 1.0,
            link: Link::Identity,
            interval: (0.1, 5.0),
            glm_ridge: 0.0,
            warmup_eigen_floor: 0.1,
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or(1.0 / self.horizon.max(2) as f64)
    }

    pub(crate) fn exploration_spec(&self) -> HyperparamSpec {
        HyperparamSpec::new(
            "alpha",
            self.interval,
            Theoretical::ExplorationRate {
                sigma: self.sigma,
                dim: self.dim,
                lambda: self.lambda,
                delta: self.delta(),
                norm_bound: self.norm_bound,
            },
        )
    }

    pub(crate) fn stepsize_spec(&self) -> HyperparamSpec {
        HyperparamSpec::new("stepsize", self.interval, Theoretical::Constant(1.0))
    }
}

pub fn build(kind: AlgorithmKind, settings: &AlgorithmSettings) -> Result<Box<dyn GlbAlgorithm>> {
    Ok(match kind {
        AlgorithmKind::LinUcb => Box::new(LinUcb::new(settings)?),
        AlgorithmKind::LinTs => Box::new(LinTs::new(settings)?),
        AlgorithmKind::UcbGlm => Box::new(UcbGlm::new(settings)?),
        AlgorithmKind::LaplaceTs => Box::new(LaplaceTs::new(settings)?),
        AlgorithmKind::SgdTs => Box::new(SgdTs::new(settings)?),
    })
}
