use crate::error::{contract, Result};
use crate::glb::Link;
use crate::rng::SeededRng;

use super::{into_unit_ball, GlbEnvironment, RewardModel};

/// Fresh arms every round with coordinates i.i.d. `Uniform(-1/sqrt(d), 1/sqrt(d))`.
#[derive(Debug, Clone)]
pub struct SyntheticGlbEnv {
    dim: usize,
    arms: usize,
    model: RewardModel,
}

impl SyntheticGlbEnv {
    /// Draw `theta*` from the same uniform law, scaled into the unit ball.
    pub fn new(
        dim: usize,
        arms: usize,
        link: Link,
        noise_sigma: f64,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if dim == 0 || arms == 0 {
            return Err(contract("synthetic environment needs d >= 1 and K >= 1"));
        }
        let mut theta = uniform_vector(dim, rng);
        into_unit_ball(&mut theta);
        Self::with_theta(arms, theta, link, noise_sigma)
    }

    pub fn with_theta(arms: usize, theta_star: Vec<f64>, link: Link, noise_sigma: f64) -> Result<Self> {
        if !(noise_sigma >= 0.0) {
            return Err(contract(format!("noise sigma must be >= 0, got {noise_sigma}")));
        }
        if crate::linalg::norm(&theta_star) > 1.0 + 1e-12 {
            return Err(contract("theta* must lie in the unit ball"));
        }
        Ok(Self {
            dim: theta_star.len(),
            arms,
            model: RewardModel {
                theta_star,
                link,
                noise_sigma,
            },
        })
    }

    pub fn arms_per_round(&self) -> usize {
        self.arms
    }
}

fn uniform_vector(dim: usize, rng: &mut SeededRng) -> Vec<f64> {
    let h = 1.0 / (dim as f64).sqrt();
    (0..dim).map(|_| rng.uniform_in(-h, h)).collect()
}

impl GlbEnvironment for SyntheticGlbEnv {
    fn dim(&self) -> usize {
        self.dim
    }

    fn gen_arms(&mut self, _t: u64, rng: &mut SeededRng) -> Result<Vec<Vec<f64>>> {
        Ok((0..self.arms).map(|_| uniform_vector(self.dim, rng)).collect())
    }

    fn model(&self) -> &RewardModel {
        &self.model
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coordinates_bounded() {
        let mut rng = SeededRng::new(3);
        let mut env = SyntheticGlbEnv::new(25, 40, Link::Identity, 0.25, &mut rng).unwrap();
        for t in 1..=20 {
            for x in env.gen_arms(t, &mut rng).unwrap() {
                assert!(x.iter().all(|c| c.abs() < 0.2));
                assert!(crate::linalg::norm(&x) <= 1.0);
            }
        }
        assert!(crate::linalg::norm(&env.model().theta_star) <= 1.0);
    }

    #[test]
    fn optimal_mean_examples() {
        let env = SyntheticGlbEnv::with_theta(2, vec![0.3, 0.7], Link::Identity, 0.0).unwrap();
        let arms = vec![vec![1.0, 0.0], vec![0.0, 1.0]];
        assert!((env.optimal_mean(&arms) - 0.7).abs() < 1e-15);
        assert!((env.optimal_mean(&arms[..1]) - 0.3).abs() < 1e-15);
    }
}
