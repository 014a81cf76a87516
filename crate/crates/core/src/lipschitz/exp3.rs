use crate::error::{contract, Result};
use crate::rng::SeededRng;

/// Weights above this are rescaled by the maximum weight.
pub const WEIGHT_RESCALE_THRESHOLD: f64 = 1e100;

/// EXP3 over a finite ladder of candidate epoch lengths.
#[derive(Debug, Clone, PartialEq)]
pub struct Exp3Meta {
    ladder: Vec<u64>,
    weights: Vec<f64>,
    gamma: f64,
    top_epoch_len: u64,
}

impl Exp3Meta {
    /// Uniform weights over `ladder`.
    pub fn new(ladder: Vec<u64>, gamma: f64, top_epoch_len: u64) -> Result<Self> {
        if ladder.is_empty() {
            return Err(contract("EXP3 needs at least one candidate"));
        }
        if !(0.0..=1.0).contains(&gamma) {
            return Err(contract(format!("EXP3 mixing {gamma} outside [0,1]")));
        }
        let weights = vec![1.0; ladder.len()];
        Ok(Self {
            ladder,
            weights,
            gamma,
            top_epoch_len,
        })
    }

    pub fn with_weights(mut self, weights: Vec<f64>) -> Result<Self> {
        if weights.len() != self.ladder.len() {
            return Err(crate::error::Error::DimensionMismatch {
                expected: self.ladder.len(),
                actual: weights.len(),
            });
        }
        if weights.iter().any(|w| !(w.is_finite() && *w > 0.0)) {
            return Err(contract("EXP3 weights must be finite and positive"));
        }
        self.weights = weights;
        Ok(self)
    }

    pub fn ladder(&self) -> &[u64] {
        &self.ladder
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn top_epoch_len(&self) -> u64 {
        self.top_epoch_len
    }

    /// `p_j = gamma/|J| + (1 - gamma) w_j / sum_k w_k`.
    pub fn probabilities(&self) -> Vec<f64> {
        let k = self.weights.len() as f64;
        let total: f64 = self.weights.iter().sum();
        self.weights
            .iter()
            .map(|w| self.gamma / k + (1.0 - self.gamma) * w / total)
            .collect()
    }

    /// Draw a candidate index and return it with its probability.
    pub fn draw(&self, rng: &mut SeededRng) -> (usize, f64) {
        let probs = self.probabilities();
        let j = rng.categorical(&probs);
        (j, probs[j])
    }

    /// Importance-weighted exponential update of the chosen candidate:
    /// `w_j <- w_j exp(gamma/|J| * reward_sum / prob)`.
    pub fn update(&mut self, chosen: usize, reward_sum: f64, prob: f64) -> Result<()> {
        if chosen >= self.weights.len() {
            return Err(contract(format!("EXP3 candidate {chosen} out of range")));
        }
        if !(prob > 0.0) {
            return Err(contract(format!("EXP3 update needs prob > 0, got {prob}")));
        }
        let k = self.weights.len() as f64;
        let step = self.gamma / k * reward_sum / prob;
        if step == 0.0 {
            return Ok(());
        }
        // log domain so a single large step cannot overflow before rescaling
        let mut logs: Vec<f64> = self.weights.iter().map(|w| w.ln()).collect();
        logs[chosen] += step;
        let max = logs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if max > WEIGHT_RESCALE_THRESHOLD.ln() {
            logs.iter_mut().for_each(|l| *l -= max);
        }
        self.weights = logs
            .into_iter()
            .map(|l| l.exp().max(f64::MIN_POSITIVE))
            .collect();
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &[f64], b: &[f64]) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn probability_examples() {
        let m = Exp3Meta::new(vec![2, 1], 0.5, 2).unwrap();
        close(&m.probabilities(), &[0.5, 0.5]);
        let m = Exp3Meta::new(vec![2, 1], 0.0, 2).unwrap().with_weights(vec![1.0, 3.0]).unwrap();
        close(&m.probabilities(), &[0.25, 0.75]);
        let m = Exp3Meta::new(vec![4, 2, 1], 0.3, 4)
            .unwrap()
            .with_weights(vec![1.0, 1.0, 2.0])
            .unwrap();
        close(&m.probabilities(), &[0.275, 0.275, 0.45]);
    }

    #[test]
    fn update_examples() {
        let mut m = Exp3Meta::new(vec![2, 1], 0.2, 2).unwrap();
        m.update(0, 0.0, 0.5).unwrap();
        m.update(1, 0.0, 0.5).unwrap();
        assert_eq!(m.weights(), &[1.0, 1.0]);
        m.update(0, 1.0, 0.5).unwrap();
        close(m.weights(), &[0.2f64.exp(), 1.0]);
        assert!((m.weights()[0] - 1.2214).abs() < 1e-4);
    }

    #[test]
    fn overflow_rescales_without_changing_ratios() {
        let mut m = Exp3Meta::new(vec![2, 1], 1.0, 2).unwrap();
        m.update(0, 600.0, 1.0).unwrap();
        assert!(m.weights().iter().all(|w| w.is_finite() && *w > 0.0));
        assert_eq!(m.weights()[0], 1.0);
        m.update(0, 900.0, 1.0).unwrap();
        let p = m.probabilities();
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p[1] >= 0.5 - 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut m = Exp3Meta::new(vec![2, 1], 0.2, 2).unwrap();
        assert!(m.update(0, 1.0, 0.0).is_err());
        assert!(m.update(5, 1.0, 0.5).is_err());
        assert!(Exp3Meta::new(vec![], 0.2, 1).is_err());
    }
}
