//! Reward-generating testbeds with optimal-mean oracles for regret accounting.

mod csv;
mod lipschitz;
mod synthetic;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::glb::Link;
use crate::linalg::dot;
use crate::rng::SeededRng;

pub use csv::{load_csv_matrix, CsvDatasetEnv};
pub use lipschitz::{random_schedule, Family, SwitchingLipschitzEnv, DEFAULT_PEAKS};
pub use synthetic::SyntheticGlbEnv;

/// A stream of arm sets with generalized-linear rewards.
pub trait GlbEnvironment: Send {
    fn dim(&self) -> usize;

    /// Arms offered at round `t`.
    fn gen_arms(&mut self, t: u64, rng: &mut SeededRng) -> Result<Vec<Vec<f64>>>;

    fn model(&self) -> &RewardModel;

    /// Expected reward of `x`.
    fn mean_reward(&self, x: &[f64]) -> f64 {
        self.model().mean(x)
    }

    /// One noisy reward for `x`. Consumes the same amount of randomness for
    /// every arm, so compared methods see paired noise.
    fn draw_reward(&self, x: &[f64], rng: &mut SeededRng) -> f64 {
        self.model().draw(x, rng)
    }

    /// Largest expected reward among `arms`.
    fn optimal_mean(&self, arms: &[Vec<f64>]) -> f64 {
        arms.iter()
            .map(|x| self.mean_reward(x))
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// `mu(x^T theta*)` plus noise: Gaussian for the identity link, Bernoulli
/// for the logistic link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RewardModel {
    pub theta_star: Vec<f64>,
    pub link: Link,
    /// Standard deviation of the Gaussian noise (identity link only).
    pub noise_sigma: f64,
}

impl RewardModel {
    pub fn mean(&self, x: &[f64]) -> f64 {
        self.link.mean(dot(x, &self.theta_star))
    }

    pub fn draw(&self, x: &[f64], rng: &mut SeededRng) -> f64 {
        let m = self.mean(x);
        match self.link {
            Link::Identity => m + self.noise_sigma * rng.standard_normal(),
            Link::Logistic => {
                if rng.uniform() < m {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Scale `v` down into the unit ball; vectors already inside are untouched.
pub(crate) fn into_unit_ball(v: &mut [f64]) {
    let n = crate::linalg::norm(v);
    if n > 1.0 {
        v.iter_mut().for_each(|x| *x /= n);
    }
}
