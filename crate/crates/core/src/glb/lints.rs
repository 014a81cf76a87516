use crate::error::Result;
use crate::linalg::{dot, sample_gaussian_vector, RidgeState};
use crate::rng::SeededRng;

use super::{argmax, hyper_at, validate_arms, AlgorithmSettings, GlbAlgorithm, HyperparamSpec};

/// Linear Thompson sampling: draw `theta ~ N(theta_hat, alpha^2 V^{-1})`, then
/// act greedily.
#[derive(Debug, Clone)]
pub struct LinTs {
    ridge: RidgeState,
    hyper: Vec<HyperparamSpec>,
}

impl LinTs {
    pub fn new(settings: &AlgorithmSettings) -> Result<Self> {
        Ok(Self {
            ridge: RidgeState::new(settings.dim, settings.lambda)?,
            hyper: vec![settings.exploration_spec()],
        })
    }

    pub fn ridge(&self) -> &RidgeState {
        &self.ridge
    }

    pub fn sample_theta(&self, alpha: f64, rng: &mut SeededRng) -> Result<Vec<f64>> {
        sample_gaussian_vector(rng, &self.ridge.theta(), self.ridge.v_inv(), alpha)
    }
}

impl GlbAlgorithm for LinTs {
    fn name(&self) -> &'static str {
        "lints"
    }

    fn dim(&self) -> usize {
        self.ridge.dim()
    }

    fn hyperparams(&self) -> &[HyperparamSpec] {
        &self.hyper
    }

    fn select(&self, arms: &[Vec<f64>], hyper: &[f64], rng: &mut SeededRng) -> Result<usize> {
        let alpha = hyper_at(hyper, 0, "alpha")?;
        validate_arms(arms, self.ridge.dim())?;
        let theta = self.sample_theta(alpha, rng)?;
        Ok(argmax(arms.iter().map(|x| dot(x, &theta))))
    }

    fn update(&mut self, x: &[f64], y: f64) -> Result<()> {
        self.ridge.rank_one_update(x, y)
    }

    fn count(&self) -> u64 {
        self.ridge.count()
    }

    fn point_estimate(&self) -> Vec<f64> {
        self.ridge.theta()
    }
}
