use crate::error::{contract, Result};
use crate::linalg::{check_dim, dot, mahalanobis_norm, RidgeState};
use crate::rng::SeededRng;

use super::{argmax, hyper_at, validate_arms, AlgorithmSettings, GlbAlgorithm, HyperparamSpec, Link};

/// Online-SGD Thompson sampling with two hyperparameters: exploration rate
/// `alpha` and SGD step size.
///
/// Scores are `x^T theta_sgd + alpha ||x||_{V^{-1}} Z_a` with a fresh standard
/// normal `Z_a` per arm per round. Each observation takes one gradient step
/// `theta += stepsize (y - mu(x^T theta)) x`.
#[derive(Debug, Clone)]
pub struct SgdTs {
    link: Link,
    theta: Vec<f64>,
    ridge: RidgeState,
    stepsize: f64,
    hyper: Vec<HyperparamSpec>,
}

impl SgdTs {
    pub fn new(settings: &AlgorithmSettings) -> Result<Self> {
        Ok(Self {
            link: settings.link,
            theta: vec![0.0; settings.dim],
            ridge: RidgeState::new(settings.dim, settings.lambda)?,
            stepsize: 1.0,
            hyper: vec![settings.exploration_spec(), settings.stepsize_spec()],
        })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn set_stepsize(&mut self, stepsize: f64) -> Result<()> {
        if !(stepsize >= 0.0) {
            return Err(contract(format!("stepsize must be >= 0, got {stepsize}")));
        }
        self.stepsize = stepsize;
        Ok(())
    }

    pub fn observe(&mut self, x: &[f64], y: f64, stepsize: f64) -> Result<()> {
        check_dim(self.theta.len(), x.len())?;
        if !(stepsize >= 0.0) {
            return Err(contract(format!("stepsize must be >= 0, got {stepsize}")));
        }
        let r = y - self.link.mean(dot(x, &self.theta));
        for (t, xi) in self.theta.iter_mut().zip(x) {
            *t += stepsize * r * xi;
        }
        self.ridge.rank_one_update(x, y)
    }
}

impl GlbAlgorithm for SgdTs {
    fn name(&self) -> &'static str {
        "sgd_ts"
    }

    fn dim(&self) -> usize {
        self.theta.len()
    }

    fn hyperparams(&self) -> &[HyperparamSpec] {
        &self.hyper
    }

    fn select(&self, arms: &[Vec<f64>], hyper: &[f64], rng: &mut SeededRng) -> Result<usize> {
        let alpha = hyper_at(hyper, 0, "alpha")?;
        if !(alpha >= 0.0) {
            return Err(contract(format!("alpha must be >= 0, got {alpha}")));
        }
        hyper_at(hyper, 1, "stepsize")?;
        validate_arms(arms, self.theta.len())?;
        let scores: Vec<f64> = arms
            .iter()
            .map(|x| {
                let z = rng.standard_normal();
                dot(x, &self.theta) + alpha * mahalanobis_norm(x, self.ridge.v_inv()) * z
            })
            .collect();
        Ok(argmax(scores))
    }

    fn update(&mut self, x: &[f64], y: f64) -> Result<()> {
        let s = self.stepsize;
        self.observe(x, y, s)
    }

    fn update_tuned(&mut self, x: &[f64], y: f64, hyper: &[f64]) -> Result<()> {
        let s = hyper_at(hyper, 1, "stepsize")?;
        self.observe(x, y, s)
    }

    fn count(&self) -> u64 {
        self.ridge.count()
    }

    fn point_estimate(&self) -> Vec<f64> {
        self.theta.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_identity_step() {
        let s = AlgorithmSettings::new(1, 10);
        let mut a = SgdTs::new(&s).unwrap();
        a.observe(&[1.0], 1.0, 0.5).unwrap();
        assert_eq!(a.theta(), &[0.5]);
    }

    #[test]
    fn zero_stepsize_freezes_iterate() {
        let s = AlgorithmSettings::new(2, 10);
        let mut a = SgdTs::new(&s).unwrap();
        for _ in 0..5 {
            a.observe(&[0.3, 0.4], 1.0, 0.0).unwrap();
        }
        assert_eq!(a.theta(), &[0.0, 0.0]);
        assert_eq!(a.count(), 5);
    }
}
