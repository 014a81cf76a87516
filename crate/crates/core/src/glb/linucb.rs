use crate::error::Result;
use crate::linalg::{dot, mahalanobis_norm, RidgeState};
use crate::rng::SeededRng;

use super::{argmax, hyper_at, validate_arms, AlgorithmSettings, GlbAlgorithm, HyperparamSpec};

/// LinUCB: `argmax x^T theta + alpha ||x||_{V^{-1}}` over ridge estimates.
#[derive(Debug, Clone)]
pub struct LinUcb {
    ridge: RidgeState,
    hyper: Vec<HyperparamSpec>,
}

impl LinUcb {
    pub fn new(settings: &AlgorithmSettings) -> Result<Self> {
        Ok(Self {
            ridge: RidgeState::new(settings.dim, settings.lambda)?,
            hyper: vec![settings.exploration_spec()],
        })
    }

    pub fn ridge(&self) -> &RidgeState {
        &self.ridge
    }

    /// UCB score of every arm.
    pub fn scores(&self, arms: &[Vec<f64>], alpha: f64) -> Result<Vec<f64>> {
        validate_arms(arms, self.ridge.dim())?;
        let theta = self.ridge.theta();
        Ok(arms
            .iter()
            .map(|x| dot(x, &theta) + alpha * mahalanobis_norm(x, self.ridge.v_inv()))
            .collect())
    }
}

impl GlbAlgorithm for LinUcb {
    fn name(&self) -> &'static str {
        "linucb"
    }

    fn dim(&self) -> usize {
        self.ridge.dim()
    }

    fn hyperparams(&self) -> &[HyperparamSpec] {
        &self.hyper
    }

    fn select(&self, arms: &[Vec<f64>], hyper: &[f64], _rng: &mut SeededRng) -> Result<usize> {
        let alpha = hyper_at(hyper, 0, "alpha")?;
        Ok(argmax(self.scores(arms, alpha)?))
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
