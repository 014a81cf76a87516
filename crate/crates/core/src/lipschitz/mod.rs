//! Continuum-armed Lipschitz bandits on `[0,1]^p` under switching rewards.
//!
//! [`ZoomingBandit`] runs the zooming Thompson-sampling learner with fixed
//! restarts, the plain UCB zooming baseline, or restarts at known change
//! points. [`DoubleRestartZooming`] picks the restart length per top epoch
//! with an EXP3 meta-learner.

mod double_restarts;
mod exp3;
mod grid;
mod zooming;

pub use double_restarts::{double_restarts_ladder, exp3_gamma, DoubleRestartZooming};
pub use exp3::{Exp3Meta, WEIGHT_RESCALE_THRESHOLD};
pub use grid::{estimate_zooming_number, Grid};
pub use zooming::{ActiveArm, RestartMode, ZoomingBandit, ZoomingConfig};

use std::cmp::Ordering;

use crate::error::{contract, Result};

/// A point of the normalized hyperparameter cube `[0,1]^p`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(contract("point needs at least one coordinate"));
        }
        if let Some(c) = coords.iter().find(|c| !(0.0..=1.0).contains(*c)) {
            return Err(contract(format!("coordinate {c} outside [0,1]")));
        }
        Ok(Self(coords))
    }

    /// Center of `[0,1]^p`.
    pub fn center(dim: usize) -> Self {
        Self(vec![0.5; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn distance(&self, other: &[f64]) -> f64 {
        euclidean(&self.0, other)
    }

    pub fn lex_cmp(&self, other: &Point) -> Ordering {
        lex_cmp(&self.0, &other.0)
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            Ordering::Equal => continue,
            o => return o,
        }
    }
    a.len().cmp(&b.len())
}

/// Confidence radius `sqrt(13 tau0^2 ln T / (2 n))`; infinite for `n = 0`.
pub fn confidence_radius(pulls: u64, tau0: f64, horizon: u64) -> f64 {
    radius_with_log(pulls, tau0, (horizon as f64).ln())
}

fn radius_with_log(pulls: u64, tau0: f64, ln_horizon: f64) -> f64 {
    if pulls == 0 {
        return f64::INFINITY;
    }
    (13.0 * tau0 * tau0 * ln_horizon / (2.0 * pulls as f64)).sqrt()
}

/// Thompson-sampling scale `s0 / sqrt(n)` with `s0 = sqrt(52 pi tau0^2 ln T)`;
/// infinite for `n = 0`.
pub fn ts_scale(pulls: u64, tau0: f64, horizon: u64) -> f64 {
    scale_with_log(pulls, tau0, (horizon as f64).ln())
}

fn scale_with_log(pulls: u64, tau0: f64, ln_horizon: f64) -> f64 {
    if pulls == 0 {
        return f64::INFINITY;
    }
    let s0 = (52.0 * std::f64::consts::PI * tau0 * tau0 * ln_horizon).sqrt();
    s0 / (pulls as f64).sqrt()
}
