use crate::error::{contract, Result};
use crate::linalg::{check_dim, dot};
use crate::rng::SeededRng;

use super::{argmax, hyper_at, validate_arms, AlgorithmSettings, GlbAlgorithm, HyperparamSpec, Link};

/// Thompson sampling with a diagonal Laplace approximation of the posterior.
///
/// The posterior is `N(m_i, 1/q_i)` per coordinate. Each observation moves
/// the mode by one curvature-preconditioned gradient step of size `stepsize`
/// on the negative log posterior, then adds the observation's curvature to
/// the precision. The step size is the only hyperparameter; it is supplied
/// through [`LaplaceTs::observe`], [`LaplaceTs::set_stepsize`] or
/// [`GlbAlgorithm::update_tuned`].
#[derive(Debug, Clone)]
pub struct LaplaceTs {
    link: Link,
    mode: Vec<f64>,
    precision: Vec<f64>,
    stepsize: f64,
    count: u64,
    hyper: Vec<HyperparamSpec>,
}

impl LaplaceTs {
    pub fn new(settings: &AlgorithmSettings) -> Result<Self> {
        Self::from_posterior(
            settings,
            vec![0.0; settings.dim],
            vec![settings.lambda; settings.dim],
        )
    }

    /// Start from an explicit diagonal posterior.
    pub fn from_posterior(
        settings: &AlgorithmSettings,
        mode: Vec<f64>,
        precision: Vec<f64>,
    ) -> Result<Self> {
        check_dim(settings.dim, mode.len())?;
        check_dim(settings.dim, precision.len())?;
        if precision.iter().any(|q| !(*q > 0.0)) {
            return Err(contract("Laplace-TS precision entries must be positive"));
        }
        Ok(Self {
            link: settings.link,
            mode,
            precision,
            stepsize: 1.0,
            count: 0,
            hyper: vec![settings.stepsize_spec()],
        })
    }

    pub fn mode(&self) -> &[f64] {
        &self.mode
    }

    pub fn precision(&self) -> &[f64] {
        &self.precision
    }

    /// Step size applied to the next observation.
    pub fn set_stepsize(&mut self, stepsize: f64) -> Result<()> {
        if !(stepsize > 0.0) {
            return Err(contract(format!("stepsize must be positive, got {stepsize}")));
        }
        self.stepsize = stepsize;
        Ok(())
    }

    pub fn sample_theta(&self, rng: &mut SeededRng) -> Vec<f64> {
        self.mode
            .iter()
            .zip(&self.precision)
            .map(|(m, q)| m + rng.standard_normal() / q.sqrt())
            .collect()
    }

    /// Absorb one observation with an explicit step size.
    pub fn observe(&mut self, x: &[f64], y: f64, stepsize: f64) -> Result<()> {
        check_dim(self.mode.len(), x.len())?;
        if !(stepsize > 0.0) {
            return Err(contract(format!("stepsize must be positive, got {stepsize}")));
        }
        let z = dot(x, &self.mode);
        let residual = y - self.link.mean(z);
        let curvature = self.link.derivative(z);
        // gradient of the negative log posterior at the current mode is
        // -(y - mu) x, since the prior term vanishes there
        for ((m, q), xi) in self.mode.iter_mut().zip(&self.precision).zip(x) {
            *m += stepsize * residual * xi / (q + curvature * xi * xi);
        }
        let w = self.link.derivative(dot(x, &self.mode));
        for (q, xi) in self.precision.iter_mut().zip(x) {
            *q += w * xi * xi;
        }
        self.count += 1;
        Ok(())
    }
}

impl GlbAlgorithm for LaplaceTs {
    fn name(&self) -> &'static str {
        "laplace_ts"
    }

    fn dim(&self) -> usize {
        self.mode.len()
    }

    fn hyperparams(&self) -> &[HyperparamSpec] {
        &self.hyper
    }

    fn select(&self, arms: &[Vec<f64>], hyper: &[f64], rng: &mut SeededRng) -> Result<usize> {
        let stepsize = hyper_at(hyper, 0, "stepsize")?;
        if !(stepsize > 0.0) {
            return Err(contract(format!("stepsize must be positive, got {stepsize}")));
        }
        validate_arms(arms, self.mode.len())?;
        let theta = self.sample_theta(rng);
        Ok(argmax(arms.iter().map(|x| dot(x, &theta))))
    }

    fn update(&mut self, x: &[f64], y: f64) -> Result<()> {
        let s = self.stepsize;
        self.observe(x, y, s)
    }

    fn update_tuned(&mut self, x: &[f64], y: f64, hyper: &[f64]) -> Result<()> {
        let s = hyper_at(hyper, 0, "stepsize")?;
        self.observe(x, y, s)
    }

    fn count(&self) -> u64 {
        self.count
    }

    fn point_estimate(&self) -> Vec<f64> {
        self.mode.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn huge_precision_samples_the_mode() {
        let s = AlgorithmSettings::new(2, 10);
        let a = LaplaceTs::from_posterior(&s, vec![0.3, -0.2], vec![1e30, 1e30]).unwrap();
        let mut rng = SeededRng::new(4);
        let arms = vec![vec![1.0, 0.0], vec![0.0, 1.0], vec![-0.5, 0.5]];
        assert_eq!(a.select(&arms, &[1.0], &mut rng).unwrap(), 0);
    }

    #[test]
    fn identity_step_from_prior() {
        let s = AlgorithmSettings::new(1, 10);
        let mut a = LaplaceTs::new(&s).unwrap();
        a.observe(&[1.0], 1.0, 1.0).unwrap();
        // q = 1, curvature 1: mode moves by 1 * 1 / 2, precision becomes 2
        assert!((a.mode()[0] - 0.5).abs() < 1e-15);
        assert!((a.precision()[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_stepsize() {
        let s = AlgorithmSettings::new(1, 10);
        let a = LaplaceTs::new(&s).unwrap();
        let mut rng = SeededRng::new(0);
        assert!(a.select(&[vec![0.5]], &[0.0], &mut rng).is_err());
    }
}
