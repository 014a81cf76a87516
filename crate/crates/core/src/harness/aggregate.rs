use crate::error::{contract, Result};

use super::RunResult;

/// Per-method curves across repetitions.
#[derive(Debug, Clone, PartialEq)]
pub struct MethodSummary {
    pub method: String,
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub final_mean: f64,
    pub final_std: f64,
    pub mean_wall_seconds: f64,
    pub reps: usize,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AggregateResult {
    pub methods: Vec<MethodSummary>,
}

impl AggregateResult {
    pub fn method(&self, name: &str) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == name)
    }

    /// Number of rounds per curve (0 when empty).
    pub fn rounds(&self) -> usize {
        self.methods.first().map_or(0, |m| m.mean.len())
    }
}

/// Standard deviation with divisor `n` (the spread of the runs themselves).
pub fn population_std(samples: &[f64], mean: f64) -> f64 {
    if samples.is_empty() {
        return 0.0;
    }
    let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
    (ss / samples.len() as f64).sqrt()
}

/// Group `runs` by method (in `order`) and aggregate each round. Runs are
/// summed in seed order, so the result does not depend on the order of
/// `runs`.
pub fn aggregate(runs: &[RunResult], order: &[String]) -> Result<AggregateResult> {
    let mut methods = Vec::with_capacity(order.len());
    for name in order {
        let mut group: Vec<&RunResult> = runs.iter().filter(|r| &r.method == name).collect();
        if group.is_empty() {
            return Err(contract(format!("no runs for method {name}")));
        }
        group.sort_by_key(|r| r.seed);
        let len = group[0].cumulative.len();
        if group.iter().any(|r| r.cumulative.len() != len) {
            return Err(contract(format!("runs of {name} have different lengths")));
        }
        let n = group.len() as f64;
        let mut mean = vec![0.0; len];
        let mut std = vec![0.0; len];
        let mut column = Vec::with_capacity(group.len());
        for t in 0..len {
            column.clear();
            column.extend(group.iter().map(|r| r.cumulative[t]));
            mean[t] = column.iter().sum::<f64>() / n;
            std[t] = population_std(&column, mean[t]);
        }
        let final_mean = mean.last().copied().unwrap_or(0.0);
        let final_std = std.last().copied().unwrap_or(0.0);
        let mean_wall_seconds = group.iter().map(|r| r.wall_seconds).sum::<f64>() / n;
        methods.push(MethodSummary {
            method: name.clone(),
            mean,
            std,
            final_mean,
            final_std,
            mean_wall_seconds,
            reps: group.len(),
        });
    }
    Ok(AggregateResult { methods })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(method: &str, seed: u64, c: Vec<f64>) -> RunResult {
        RunResult {
            method: method.into(),
            seed,
            cumulative: c,
            rewards: Vec::new(),
            wall_seconds: 0.0,
        }
    }

    #[test]
    fn single_run_has_zero_std() {
        let a = aggregate(&[run("m", 0, vec![1.0, 2.5])], &["m".into()]).unwrap();
        assert_eq!(a.methods[0].mean, vec![1.0, 2.5]);
        assert_eq!(a.methods[0].std, vec![0.0, 0.0]);
    }

    #[test]
    fn identical_runs_have_zero_std() {
        let runs = [run("m", 0, vec![0.3, 0.7]), run("m", 1, vec![0.3, 0.7])];
        let a = aggregate(&runs, &["m".into()]).unwrap();
        assert_eq!(a.methods[0].std, vec![0.0, 0.0]);
    }

    #[test]
    fn seed_order_does_not_matter() {
        let mut runs: Vec<RunResult> =
            (0..5).map(|s| run("m", s, vec![0.1 * s as f64, 0.37 * s as f64 + 0.01])).collect();
        let a = aggregate(&runs, &["m".into()]).unwrap();
        runs.reverse();
        let b = aggregate(&runs, &["m".into()]).unwrap();
        assert_eq!(a, b);
    }
}
