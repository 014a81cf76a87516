use crate::error::{contract, Result};
use crate::glb::HyperparamSpec;
use crate::lipschitz::{exp3_gamma, Exp3Meta};
use crate::rng::SeededRng;

use super::{Proposal, Tuner};

fn check_candidates(set: &[f64]) -> Result<()> {
    if set.is_empty() {
        return Err(contract("candidate set is empty"));
    }
    if set.iter().any(|c| !c.is_finite()) {
        return Err(contract("candidate values must be finite"));
    }
    Ok(())
}

/// One independent EXP3 per hyperparameter over its own candidate set.
///
/// Each EXP3 uses `gamma = min(1, sqrt(|C| ln|C| / ((e-1) T)))` and is fed the
/// raw observed reward.
#[derive(Debug, Clone)]
pub struct Syndicated {
    sets: Vec<Vec<f64>>,
    // candidate indices play the role of the EXP3 arms
    exp3: Vec<Exp3Meta>,
    pending: Option<Vec<(usize, f64)>>,
}

impl Syndicated {
    pub fn new(sets: Vec<Vec<f64>>, horizon: u64) -> Result<Self> {
        if sets.is_empty() {
            return Err(contract("Syndicated needs at least one hyperparameter"));
        }
        let mut exp3 = Vec::with_capacity(sets.len());
        for set in &sets {
            check_candidates(set)?;
            let gamma = exp3_gamma(set.len(), horizon.max(1));
            exp3.push(Exp3Meta::new((0..set.len() as u64).collect(), gamma, 1)?);
        }
        Ok(Self {
            sets,
            exp3,
            pending: None,
        })
    }

    /// Replace the mixing rate of every EXP3.
    pub fn with_gamma(mut self, gamma: f64) -> Result<Self> {
        self.exp3 = self
            .sets
            .iter()
            .map(|s| Exp3Meta::new((0..s.len() as u64).collect(), gamma, 1))
            .collect::<Result<_>>()?;
        Ok(self)
    }

    pub fn candidate_sets(&self) -> &[Vec<f64>] {
        &self.sets
    }

    /// Current sampling distribution of hyperparameter `i`.
    pub fn probabilities(&self, i: usize) -> Vec<f64> {
        self.exp3[i].probabilities()
    }

    pub fn weights(&self, i: usize) -> &[f64] {
        self.exp3[i].weights()
    }
}

impl Tuner for Syndicated {
    fn name(&self) -> &'static str {
        "syndicated"
    }

    fn propose(&mut self, _t: u64, rng: &mut SeededRng) -> Result<Proposal> {
        if self.pending.is_some() {
            return Err(contract("Syndicated propose called twice without feedback"));
        }
        let draws: Vec<(usize, f64)> = self.exp3.iter().map(|e| e.draw(rng)).collect();
        let values = draws.iter().zip(&self.sets).map(|((j, _), s)| s[*j]).collect();
        self.pending = Some(draws);
        Ok(Proposal::tuned(values))
    }

    fn feedback(&mut self, y: f64) -> Result<()> {
        let draws = self
            .pending
            .take()
            .ok_or_else(|| contract("Syndicated feedback without a proposal"))?;
        for (e, (j, p)) in self.exp3.iter_mut().zip(draws) {
            e.update(j, y, p)?;
        }
        Ok(())
    }
}

/// Candidate bandit over a single hyperparameter: Gaussian Thompson sampling
/// with posterior `N(mean_c, 1/(count_c + 1))` per candidate.
///
/// Only the first hyperparameter is tuned. Any further ones are held at their
/// theoretical value for the round.
#[derive(Debug, Clone)]
pub struct Op {
    candidates: Vec<f64>,
    counts: Vec<u64>,
    means: Vec<f64>,
    specs: Vec<HyperparamSpec>,
    pending: Option<usize>,
}

impl Op {
    pub fn new(candidates: Vec<f64>, specs: Vec<HyperparamSpec>) -> Result<Self> {
        check_candidates(&candidates)?;
        if specs.is_empty() {
            return Err(contract("OP needs at least one hyperparameter"));
        }
        let k = candidates.len();
        Ok(Self {
            candidates,
            counts: vec![0; k],
            means: vec![0.0; k],
            specs,
            pending: None,
        })
    }

    /// Preset per-candidate statistics.
    pub fn with_stats(mut self, counts: Vec<u64>, means: Vec<f64>) -> Result<Self> {
        if counts.len() != self.candidates.len() || means.len() != self.candidates.len() {
            return Err(contract("OP statistics must match the candidate count"));
        }
        self.counts = counts;
        self.means = means;
        Ok(self)
    }

    pub fn candidates(&self) -> &[f64] {
        &self.candidates
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    /// Index of the candidate a Thompson draw would choose.
    pub fn sample_index(&self, rng: &mut SeededRng) -> usize {
        let draws = self
            .means
            .iter()
            .zip(&self.counts)
            .map(|(m, n)| m + rng.standard_normal() / ((*n + 1) as f64).sqrt());
        crate::glb::argmax(draws)
    }
}

impl Tuner for Op {
    fn name(&self) -> &'static str {
        "op"
    }

    fn propose(&mut self, t: u64, rng: &mut SeededRng) -> Result<Proposal> {
        if self.pending.is_some() {
            return Err(contract("OP propose called twice without feedback"));
        }
        let c = self.sample_index(rng);
        let mut values = vec![self.candidates[c]];
        values.extend(self.specs[1..].iter().map(|s| s.theoretical.value(t)));
        self.pending = Some(c);
        Ok(Proposal::tuned(values))
    }

    fn feedback(&mut self, y: f64) -> Result<()> {
        let c = self
            .pending
            .take()
            .ok_or_else(|| contract("OP feedback without a proposal"))?;
        self.counts[c] += 1;
        self.means[c] += (y - self.means[c]) / self.counts[c] as f64;
        Ok(())
    }
}
