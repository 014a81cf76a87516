use crate::error::{contract, Result};
use crate::glb::HyperparamSpec;
use crate::rng::SeededRng;

use super::{Proposal, Tuner};

/// Theoretical hyperparameter values at every round.
#[derive(Debug, Clone)]
pub struct Theory {
    specs: Vec<HyperparamSpec>,
    pending: bool,
}

impl Theory {
    pub fn new(specs: Vec<HyperparamSpec>) -> Self {
        Self {
            specs,
            pending: false,
        }
    }

    pub fn values_at(&self, t: u64) -> Vec<f64> {
        self.specs.iter().map(|s| s.theoretical.value(t)).collect()
    }
}

impl Tuner for Theory {
    fn name(&self) -> &'static str {
        "theory"
    }

    fn propose(&mut self, t: u64, _rng: &mut SeededRng) -> Result<Proposal> {
        if self.pending {
            return Err(contract("Theory propose called twice without feedback"));
        }
        self.pending = true;
        Ok(Proposal::tuned(self.values_at(t)))
    }

    fn feedback(&mut self, _y: f64) -> Result<()> {
        if !std::mem::replace(&mut self.pending, false) {
            return Err(contract("Theory feedback without a proposal"));
        }
        Ok(())
    }
}

/// Fixed leading hyperparameter values; any remaining hyperparameters take
/// their theoretical value for the round. Used by grid sweeps.
#[derive(Debug, Clone)]
pub struct Fixed {
    head: Vec<f64>,
    rest: Vec<HyperparamSpec>,
    pending: bool,
}

impl Fixed {
    pub fn new(values: Vec<f64>) -> Self {
        Self {
            head: values,
            rest: Vec::new(),
            pending: false,
        }
    }

    /// Fix the first `head.len()` of `specs`; the rest follow their theory.
    pub fn with_theoretical_rest(head: Vec<f64>, specs: &[HyperparamSpec]) -> Result<Self> {
        if head.len() > specs.len() {
            return Err(contract(format!(
                "{} fixed values for {} hyperparameters",
                head.len(),
                specs.len()
            )));
        }
        Ok(Self {
            rest: specs[head.len()..].to_vec(),
            head,
            pending: false,
        })
    }
}

impl Tuner for Fixed {
    fn name(&self) -> &'static str {
        "fixed"
    }

    fn propose(&mut self, t: u64, _rng: &mut SeededRng) -> Result<Proposal> {
        if self.pending {
            return Err(contract("Fixed propose called twice without feedback"));
        }
        self.pending = true;
        let mut values = self.head.clone();
        values.extend(self.rest.iter().map(|s| s.theoretical.value(t)));
        Ok(Proposal::tuned(values))
    }

    fn feedback(&mut self, _y: f64) -> Result<()> {
        if !std::mem::replace(&mut self.pending, false) {
            return Err(contract("Fixed feedback without a proposal"));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::glb::{AlgorithmKind, AlgorithmSettings};

    #[test]
    fn noiseless_rate_is_constant() {
        let mut s = AlgorithmSettings::new(4, 1000);
        s.sigma = 0.0;
        s.lambda = 4.0;
        let algo = crate::glb::build(AlgorithmKind::LinUcb, &s).unwrap();
        let th = Theory::new(algo.hyperparams().to_vec());
        assert_eq!(th.values_at(1), vec![2.0]);
        assert_eq!(th.values_at(900), vec![2.0]);
    }

    #[test]
    fn rates_grow_and_stepsizes_are_one() {
        let s = AlgorithmSettings::new(4, 1000);
        let algo = crate::glb::build(AlgorithmKind::SgdTs, &s).unwrap();
        let th = Theory::new(algo.hyperparams().to_vec());
        let mut prev = 0.0;
        for t in [1, 10, 100, 1000] {
            let v = th.values_at(t);
            assert!(v[0] > prev);
            prev = v[0];
            assert_eq!(v[1], 1.0);
        }
    }
}
