use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, mahalanobis_norm, min_eigenvalue, RidgeState};
use crate::rng::SeededRng;

use super::mle::MLE_JITTER;
use super::{
    argmax, glm_mle_newton_with, hyper_at, validate_arms, AlgorithmSettings, GlbAlgorithm,
    HyperparamSpec, Link, MleOptions,
};

/// UCB-GLM: `argmax x^T theta_mle + alpha ||x||_{V^{-1}}` with the MLE
/// refreshed after every observation.
///
/// With `glm_ridge = 0` the design matrix is the plain Gram matrix and the
/// learner stays in warm-up until its smallest eigenvalue reaches
/// `warmup_eigen_floor`.
#[derive(Debug, Clone)]
pub struct UcbGlm {
    link: Link,
    ridge: f64,
    eigen_floor: f64,
    gram: RidgeState,
    data: Vec<(Vec<f64>, f64)>,
    theta: Vec<f64>,
    warmed: bool,
    hyper: Vec<HyperparamSpec>,
}

impl UcbGlm {
    pub fn new(settings: &AlgorithmSettings) -> Result<Self> {
        let ridge = settings.glm_ridge.max(0.0);
        Ok(Self {
            link: settings.link,
            ridge,
            eigen_floor: settings.warmup_eigen_floor,
            gram: RidgeState::new(settings.dim, ridge.max(MLE_JITTER))?,
            data: Vec::new(),
            theta: vec![0.0; settings.dim],
            warmed: ridge > 0.0,
            hyper: vec![settings.exploration_spec()],
        })
    }

    pub fn theta_mle(&self) -> &[f64] {
        &self.theta
    }

    pub fn data(&self) -> &[(Vec<f64>, f64)] {
        &self.data
    }

    pub fn link(&self) -> Link {
        self.link
    }

    /// Penalty used by the MLE: the configured ridge, or the jitter.
    pub fn mle_ridge(&self) -> f64 {
        self.ridge.max(MLE_JITTER)
    }

    pub fn scores(&self, arms: &[Vec<f64>], alpha: f64) -> Result<Vec<f64>> {
        if !self.warmed {
            return Err(Error::NeedsWarmup);
        }
        validate_arms(arms, self.gram.dim())?;
        Ok(arms
            .iter()
            .map(|x| dot(x, &self.theta) + alpha * mahalanobis_norm(x, self.gram.v_inv()))
            .collect())
    }
}

impl GlbAlgorithm for UcbGlm {
    fn name(&self) -> &'static str {
        "ucb_glm"
    }

    fn dim(&self) -> usize {
        self.gram.dim()
    }

    fn hyperparams(&self) -> &[HyperparamSpec] {
        &self.hyper
    }

    fn needs_warmup(&self) -> bool {
        !self.warmed
    }

    fn select(&self, arms: &[Vec<f64>], hyper: &[f64], _rng: &mut SeededRng) -> Result<usize> {
        let alpha = hyper_at(hyper, 0, "alpha")?;
        Ok(argmax(self.scores(arms, alpha)?))
    }

    fn update(&mut self, x: &[f64], y: f64) -> Result<()> {
        check_dim(self.gram.dim(), x.len())?;
        self.gram.rank_one_update(x, y)?;
        self.data.push((x.to_vec(), y));
        if !self.warmed {
            let mut plain = self.gram.v().clone();
            let jitter = self.gram.lambda();
            for i in 0..plain.dim() {
                plain[(i, i)] -= jitter;
            }
            self.warmed = min_eigenvalue(&plain)? >= self.eigen_floor;
        }
        let opts = MleOptions {
            ridge: self.mle_ridge(),
            init: Some(self.theta.clone()),
            ..MleOptions::default()
        };
        self.theta = glm_mle_newton_with(&self.data, self.link, &opts)?;
        Ok(())
    }

    fn count(&self) -> u64 {
        self.data.len() as u64
    }

    fn point_estimate(&self) -> Vec<f64> {
        self.theta.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glb::{mle_gradient, LinUcb};

    #[test]
    fn warmup_until_gram_is_spanned() {
        let s = AlgorithmSettings::new(2, 100);
        let mut g = UcbGlm::new(&s).unwrap();
        let mut rng = SeededRng::new(0);
        assert!(g.needs_warmup());
        assert!(matches!(
            g.select(&[vec![0.5, 0.0]], &[1.0], &mut rng),
            Err(Error::NeedsWarmup)
        ));
        g.update(&[0.8, 0.0], 1.0).unwrap();
        assert!(g.needs_warmup());
        g.update(&[0.0, 0.8], 0.0).unwrap();
        assert!(!g.needs_warmup());
        assert!(g.select(&[vec![0.5, 0.0]], &[1.0], &mut rng).is_ok());
    }

    #[test]
    fn identity_link_with_ridge_matches_linucb() {
        let mut s = AlgorithmSettings::new(3, 200);
        s.glm_ridge = 1.0;
        let mut g = UcbGlm::new(&s).unwrap();
        let mut l = LinUcb::new(&s).unwrap();
        let mut rng = SeededRng::new(9);
        for _ in 0..40 {
            let arms: Vec<Vec<f64>> = (0..6)
                .map(|_| (0..3).map(|_| rng.uniform_in(-0.5, 0.5)).collect())
                .collect();
            let a = g.select(&arms, &[0.7], &mut rng).unwrap();
            assert_eq!(a, l.select(&arms, &[0.7], &mut rng).unwrap());
            let y = arms[a][0] - arms[a][2] + 0.1 * rng.standard_normal();
            g.update(&arms[a], y).unwrap();
            l.update(&arms[a], y).unwrap();
        }
    }

    #[test]
    fn logistic_gradient_after_refresh() {
        let mut s = AlgorithmSettings::new(2, 200);
        s.link = Link::Logistic;
        let mut g = UcbGlm::new(&s).unwrap();
        let mut rng = SeededRng::new(4);
        for _ in 0..60 {
            let x = vec![rng.uniform_in(-0.7, 0.7), rng.uniform_in(-0.7, 0.7)];
            let y = if rng.uniform() < 0.6 { 1.0 } else { 0.0 };
            g.update(&x, y).unwrap();
            let grad = mle_gradient(g.data(), Link::Logistic, g.mle_ridge(), g.theta_mle());
            assert!(crate::linalg::norm(&grad) <= 1e-6);
        }
    }

    #[test]
    fn symmetric_logistic_data_gives_pure_bonus() {
        let mut s = AlgorithmSettings::new(1, 100);
        s.link = Link::Logistic;
        s.warmup_eigen_floor = 1.0;
        let mut g = UcbGlm::new(&s).unwrap();
        for i in 0..10 {
            g.update(&[1.0], if i % 2 == 0 { 1.0 } else { 0.0 }).unwrap();
        }
        assert!(g.theta_mle()[0].abs() < 1e-8);
        let sc = g.scores(&[vec![0.5], vec![-0.5]], 2.0).unwrap();
        assert!((sc[0] - sc[1]).abs() < 1e-8);
    }
}
