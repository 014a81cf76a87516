use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use log::info;
use rayon::prelude::*;

use crate::env::{
    load_csv_matrix, random_schedule, CsvDatasetEnv, GlbEnvironment, SwitchingLipschitzEnv,
    SyntheticGlbEnv,
};
use crate::error::{contract, Error, Result};
use crate::glb;
use crate::lipschitz::{DoubleRestartZooming, Point, RestartMode, ZoomingBandit, ZoomingConfig};
use crate::rng::SeededRng;
use crate::tuners::{self, Fixed, Tuner, TunerKind, TunerSettings};

use super::aggregate::{aggregate, population_std, AggregateResult};
use super::config::{EnvironmentKind, ExperimentConfig, ExperimentKind, LipschitzMethod, Metric};
use super::output::{emit_csv, write_grid_csv, write_groups_csv};
use super::{ALGO_STREAM, ENV_STREAM, SCHEDULE_STREAM};

/// One run of one method under one seed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunResult {
    pub method: String,
    pub seed: u64,
    /// Cumulative regret (or reward, per the configured metric) after each
    /// round.
    pub cumulative: Vec<f64>,
    /// Observed reward of each round.
    pub rewards: Vec<f64>,
    pub wall_seconds: f64,
}

/// Read-only inputs shared by every run of a GLB experiment.
type UserItemMatrices = (Vec<Vec<f64>>, Vec<Vec<f64>>);

#[derive(Debug, Clone, Default)]
pub struct EnvData {
    matrices: Option<Arc<UserItemMatrices>>,
}

impl EnvData {
    /// Load the user and item matrices of a CSV environment, if any.
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let env = &cfg.environment;
        if env.kind != EnvironmentKind::Csv {
            return Ok(Self::default());
        }
        let missing = || Error::Config("csv environment needs users_path and items_path".into());
        let users = load_csv_matrix(env.users_path.as_ref().ok_or_else(missing)?, env.dim)?;
        let items = load_csv_matrix(env.items_path.as_ref().ok_or_else(missing)?, env.dim)?;
        Ok(Self {
            matrices: Some(Arc::new((users, items))),
        })
    }

    fn build_env(&self, cfg: &ExperimentConfig, rng: &mut SeededRng) -> Result<Box<dyn GlbEnvironment>> {
        let e = &cfg.environment;
        Ok(match e.kind {
            EnvironmentKind::Synthetic => {
                Box::new(SyntheticGlbEnv::new(e.dim, e.arms, e.link, e.noise_sigma, rng)?)
            }
            EnvironmentKind::Csv => {
                let m = self
                    .matrices
                    .as_ref()
                    .ok_or_else(|| contract("csv matrices were not loaded"))?;
                let n_users = e.n_users.min(m.0.len());
                Box::new(CsvDatasetEnv::new(
                    &m.0,
                    m.1.clone(),
                    n_users,
                    e.arms,
                    e.link,
                    e.noise_sigma,
                    rng,
                )?)
            }
            EnvironmentKind::Switching => {
                return Err(contract("switching environment has no GLB arms"))
            }
        })
    }
}

/// How the hyperparameters of a GLB run are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TunerChoice {
    Tuned(TunerKind),
    /// First hyperparameter held at this value, the rest theoretical.
    Fixed(f64),
}

impl TunerChoice {
    pub fn label(&self) -> String {
        match self {
            TunerChoice::Tuned(k) => k.label().to_string(),
            TunerChoice::Fixed(v) => format!("fixed_{v}"),
        }
    }
}

/// Run a tuned GLB algorithm for the configured horizon under `seed`.
///
/// While the algorithm reports `needs_warmup`, and on tuner warm-up rounds,
/// a uniformly random arm is pulled. The tuner is not consulted during
/// algorithm warm-up.
pub fn run_glb_single(
    cfg: &ExperimentConfig,
    data: &EnvData,
    choice: TunerChoice,
    seed: u64,
) -> Result<RunResult> {
    let start = Instant::now();
    let horizon = cfg.horizon;
    let mut result = RunResult {
        method: choice.label(),
        seed,
        cumulative: Vec::with_capacity(horizon as usize),
        rewards: Vec::with_capacity(horizon as usize),
        wall_seconds: 0.0,
    };
    if horizon == 0 {
        return Ok(result);
    }
    let mut env_rng = SeededRng::child(seed, ENV_STREAM);
    let mut algo_rng = SeededRng::child(seed, ALGO_STREAM);
    let mut env = data.build_env(cfg, &mut env_rng)?;
    let mut algo = glb::build(cfg.algorithm.kind, &cfg.algorithm_settings())?;
    let specs = algo.hyperparams().to_vec();
    let mut tuner: Box<dyn Tuner> = match choice {
        TunerChoice::Tuned(kind) => {
            let mut s = TunerSettings::new(horizon, specs.clone());
            s.candidates = cfg.tuning.candidates.clone();
            s.t1 = cfg.tuning.t1;
            s.t2 = cfg.tuning.t2;
            s.tau0 = cfg.tuning.tau0;
            s.grid_resolution = cfg.tuning.grid_resolution;
            tuners::build(kind, &s)?
        }
        TunerChoice::Fixed(v) => Box::new(Fixed::with_theoretical_rest(vec![v], &specs)?),
    };

    let mut total = 0.0;
    for t in 1..=horizon {
        let arms = env.gen_arms(t, &mut env_rng)?;
        let theory: Vec<f64> = specs.iter().map(|s| s.theoretical.value(t)).collect();
        let (chosen, hyper, consulted) = if algo.needs_warmup() {
            (algo_rng.below(arms.len()), theory, false)
        } else {
            let p = tuner.propose(t, &mut algo_rng)?;
            if p.warm_up {
                (algo_rng.below(arms.len()), theory, true)
            } else {
                let a = algo.select(&arms, &p.values, &mut algo_rng)?;
                (a, p.values, true)
            }
        };
        let x = &arms[chosen];
        let y = env.draw_reward(x, &mut env_rng);
        total += match cfg.metric {
            Metric::Regret => (env.optimal_mean(&arms) - env.mean_reward(x)).max(0.0),
            Metric::Reward => y,
        };
        result.cumulative.push(total);
        result.rewards.push(y);
        algo.update_tuned(x, y, &hyper)?;
        if consulted {
            tuner.feedback(y)?;
        }
    }
    result.wall_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// `10 ceil((T/c)^{3/4})` capped at `T`, or `T` without change points.
pub fn lipschitz_epoch_len(horizon: u64, changes: usize) -> u64 {
    if changes == 0 {
        return horizon;
    }
    let h = 10 * ((horizon as f64 / changes as f64).powf(0.75).ceil() as u64);
    h.clamp(1, horizon.max(1))
}

/// The switching testbed of a Lipschitz bench. Random change rounds are drawn
/// once from the base seed, so every repetition shares them.
pub fn build_switching_env(cfg: &ExperimentConfig) -> Result<SwitchingLipschitzEnv> {
    let e = &cfg.environment;
    let (rounds, peaks) = match &e.change_rounds {
        Some(rounds) => {
            if e.peaks.len() != rounds.len() + 1 {
                return Err(Error::Config(format!(
                    "{} explicit change rounds need {} peaks",
                    rounds.len(),
                    rounds.len() + 1
                )));
            }
            (rounds.clone(), e.peaks.clone())
        }
        None => {
            let mut rng = SeededRng::child(cfg.seed, SCHEDULE_STREAM);
            random_schedule(cfg.horizon, e.change_count, &e.peaks, &mut rng)?
        }
    };
    SwitchingLipschitzEnv::new(e.family, rounds, peaks, e.noise_sigma, cfg.horizon)
}

enum LipschitzLearner {
    Zooming(ZoomingBandit),
    Double(DoubleRestartZooming),
}

impl LipschitzLearner {
    fn select(&mut self, rng: &mut SeededRng) -> Result<Point> {
        match self {
            LipschitzLearner::Zooming(z) => z.select_arm(rng),
            LipschitzLearner::Double(d) => d.select_arm(rng),
        }
    }

    fn update(&mut self, p: &Point, y: f64) -> Result<()> {
        match self {
            LipschitzLearner::Zooming(z) => z.update(p, y),
            LipschitzLearner::Double(d) => d.update(p, y),
        }
    }
}

fn lipschitz_learner(
    cfg: &ExperimentConfig,
    env: &SwitchingLipschitzEnv,
    method: LipschitzMethod,
) -> Result<LipschitzLearner> {
    let t = cfg.horizon;
    let l = &cfg.lipschitz;
    let base = |epoch: u64, mode: RestartMode| {
        let mut c = ZoomingConfig::new(1, t, epoch, mode).with_tau0(l.tau0);
        if let Some(r) = l.grid_resolution {
            c = c.with_grid_resolution(r);
        }
        c
    };
    Ok(match method {
        LipschitzMethod::ZoomingPlain => {
            LipschitzLearner::Zooming(ZoomingBandit::new(base(t, RestartMode::ZoomingPlain))?)
        }
        LipschitzMethod::ZoomingTsRestart => {
            let h = l
                .epoch_len
                .unwrap_or_else(|| lipschitz_epoch_len(t, env.change_rounds().len()))
                .min(t);
            LipschitzLearner::Zooming(ZoomingBandit::new(base(h, RestartMode::ZoomingTsRestart))?)
        }
        LipschitzMethod::OracleRestart => {
            let c = base(t, RestartMode::OracleRestart).with_change_points(env.change_rounds().to_vec());
            LipschitzLearner::Zooming(ZoomingBandit::new(c)?)
        }
        LipschitzMethod::DoubleRestarts => LipschitzLearner::Double(DoubleRestartZooming::new(
            base(t, RestartMode::ZoomingTsRestart),
            l.p_u,
        )?),
    })
}

/// One Lipschitz-bandit run on the switching testbed.
pub fn run_lipschitz_single(
    cfg: &ExperimentConfig,
    env: &SwitchingLipschitzEnv,
    method: LipschitzMethod,
    seed: u64,
) -> Result<RunResult> {
    let start = Instant::now();
    let mut result = RunResult {
        method: method.label().to_string(),
        seed,
        cumulative: Vec::with_capacity(cfg.horizon as usize),
        rewards: Vec::with_capacity(cfg.horizon as usize),
        wall_seconds: 0.0,
    };
    if cfg.horizon == 0 {
        return Ok(result);
    }
    let mut env_rng = SeededRng::child(seed, ENV_STREAM);
    let mut algo_rng = SeededRng::child(seed, ALGO_STREAM);
    let mut learner = lipschitz_learner(cfg, env, method)?;
    let mut total = 0.0;
    for t in 1..=cfg.horizon {
        let p = learner.select(&mut algo_rng)?;
        let x = p.coords()[0];
        let y = env.draw_reward(x, t, &mut env_rng);
        total += match cfg.metric {
            Metric::Regret => (env.optimal_mean(t) - env.eval(x, t)).max(0.0),
            Metric::Reward => y,
        };
        result.cumulative.push(total);
        result.rewards.push(y);
        learner.update(&p, y)?;
    }
    result.wall_seconds = start.elapsed().as_secs_f64();
    Ok(result)
}

/// Run every `(method, seed)` pair with seeds `base..base+R-1`, concurrently.
/// Results come back in method-major, seed-minor order; the first failure in
/// that order is returned.
pub fn run_repetitions<M, F>(cfg: &ExperimentConfig, methods: &[M], run: F) -> Result<Vec<RunResult>>
where
    M: Sync,
    F: Fn(&M, u64) -> Result<RunResult> + Sync,
{
    let jobs: Vec<(usize, u64)> = (0..methods.len())
        .flat_map(|m| (0..cfg.reps).map(move |r| (m, cfg.seed + r)))
        .collect();
    let results: Vec<Result<RunResult>> = jobs
        .par_iter()
        .map(|&(m, seed)| run(&methods[m], seed))
        .collect();
    results.into_iter().collect()
}

fn log_summary(kind: ExperimentKind, agg: &AggregateResult) {
    for m in &agg.methods {
        info!(
            "{}: {} final {:.4} +- {:.4} over {} reps, {:.3}s per run",
            kind.label(),
            m.method,
            m.final_mean,
            m.final_std,
            m.reps,
            m.mean_wall_seconds
        );
    }
}

/// Zooming, restarted Zooming TS and the oracle (plus any other configured
/// methods) on one switching testbed shared by all seeds.
pub fn run_lipschitz_bench(cfg: &ExperimentConfig) -> Result<AggregateResult> {
    let env = build_switching_env(cfg)?;
    let methods = cfg.lipschitz.methods.clone();
    let runs = run_repetitions(cfg, &methods, |m, seed| run_lipschitz_single(cfg, &env, *m, seed))?;
    let order: Vec<String> = methods.iter().map(|m| m.label().to_string()).collect();
    let agg = aggregate(&runs, &order)?;
    log_summary(ExperimentKind::LipschitzBench, &agg);
    Ok(agg)
}

/// Every configured tuner on paired seeds.
pub fn run_glb_bench(cfg: &ExperimentConfig) -> Result<AggregateResult> {
    let data = EnvData::load(cfg)?;
    let methods: Vec<TunerChoice> = cfg.tuning.methods.iter().map(|k| TunerChoice::Tuned(*k)).collect();
    let runs = run_repetitions(cfg, &methods, |m, seed| run_glb_single(cfg, &data, *m, seed))?;
    let order: Vec<String> = methods.iter().map(TunerChoice::label).collect();
    let agg = aggregate(&runs, &order)?;
    log_summary(ExperimentKind::GlbBench, &agg);
    Ok(agg)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridRow {
    pub value: f64,
    pub mean_final: f64,
    pub std_final: f64,
}

/// Centered mean reward of one grid value over one window of rounds.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupRow {
    pub group: usize,
    pub value: f64,
    pub centered_mean_reward: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridSweepResult {
    pub aggregate: AggregateResult,
    pub rows: Vec<GridRow>,
    /// Grid value with the smallest mean final value; ties go to the
    /// smallest grid value.
    pub argmin: f64,
    pub groups: Option<Vec<GroupRow>>,
}

/// Grid table from aggregated per-value curves; `values[i]` belongs to
/// `agg.methods[i]`.
pub fn grid_rows(values: &[f64], agg: &AggregateResult) -> Result<(Vec<GridRow>, f64)> {
    if values.is_empty() || values.len() != agg.methods.len() {
        return Err(contract("grid values and aggregated methods differ in length"));
    }
    let rows: Vec<GridRow> = values
        .iter()
        .zip(&agg.methods)
        .map(|(v, m)| GridRow {
            value: *v,
            mean_final: m.final_mean,
            std_final: m.final_std,
        })
        .collect();
    let best = rows
        .iter()
        .min_by(|a, b| {
            a.mean_final
                .total_cmp(&b.mean_final)
                .then(a.value.total_cmp(&b.value))
        })
        .expect("non-empty");
    let argmin = best.value;
    Ok((rows, argmin))
}

/// Per-window mean reward of each grid value, centered across values within
/// each window. `rewards[i][r]` is the reward series of value `i`, run `r`.
pub fn group_means(values: &[f64], rewards: &[Vec<&[f64]>], window: u64) -> Result<Vec<GroupRow>> {
    if window == 0 {
        return Err(contract("group window must be >= 1"));
    }
    let w = window as usize;
    let len = rewards
        .iter()
        .flat_map(|runs| runs.iter().map(|r| r.len()))
        .next()
        .unwrap_or(0);
    let groups = len.div_ceil(w);
    let mut out = Vec::with_capacity(groups * values.len());
    for g in 0..groups {
        let lo = g * w;
        let hi = ((g + 1) * w).min(len);
        let means: Vec<f64> = rewards
            .iter()
            .map(|runs| {
                let per_run: Vec<f64> = runs
                    .iter()
                    .map(|r| r[lo..hi].iter().sum::<f64>() / (hi - lo) as f64)
                    .collect();
                per_run.iter().sum::<f64>() / per_run.len() as f64
            })
            .collect();
        let center = means.iter().sum::<f64>() / means.len() as f64;
        for (v, m) in values.iter().zip(&means) {
            out.push(GroupRow {
                group: g,
                value: *v,
                centered_mean_reward: m - center,
            });
        }
    }
    Ok(out)
}

/// Fixed-hyperparameter runs for every grid value on shared seeds.
pub fn grid_sweep(cfg: &ExperimentConfig) -> Result<GridSweepResult> {
    let data = EnvData::load(cfg)?;
    let values = cfg.grid.values.clone();
    let methods: Vec<TunerChoice> = values.iter().map(|v| TunerChoice::Fixed(*v)).collect();
    let runs = run_repetitions(cfg, &methods, |m, seed| run_glb_single(cfg, &data, *m, seed))?;
    let order: Vec<String> = methods.iter().map(TunerChoice::label).collect();
    let agg = aggregate(&runs, &order)?;
    let (rows, argmin) = grid_rows(&values, &agg)?;
    let groups = match cfg.grid.group_window {
        Some(w) => {
            let per_value: Vec<Vec<&[f64]>> = order
                .iter()
                .map(|name| {
                    let mut rs: Vec<&RunResult> = runs.iter().filter(|r| &r.method == name).collect();
                    rs.sort_by_key(|r| r.seed);
                    rs.iter().map(|r| r.rewards.as_slice()).collect()
                })
                .collect();
            Some(group_means(&values, &per_value, w)?)
        }
        None => None,
    };
    info!(
        "grid_sweep: argmin {argmin} (spread of finals {:.4})",
        population_std(&rows.iter().map(|r| r.mean_final).collect::<Vec<_>>(), {
            rows.iter().map(|r| r.mean_final).sum::<f64>() / rows.len() as f64
        })
    );
    Ok(GridSweepResult {
        aggregate: agg,
        rows,
        argmin,
        groups,
    })
}

/// Everything an experiment produced, plus the files written.
#[derive(Debug, Clone)]
pub struct ExperimentOutput {
    pub aggregate: AggregateResult,
    pub grid: Option<GridSweepResult>,
    pub files: Vec<PathBuf>,
}

fn with_suffix(path: &std::path::Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Run the configured experiment and write its CSV files when `out` is set.
/// Grid sweeps also write `<out>.grid.csv` and, with a group window,
/// `<out>.groups.csv`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    cfg.validate()?;
    let (aggregate, grid) = match cfg.kind {
        ExperimentKind::LipschitzBench => (run_lipschitz_bench(cfg)?, None),
        ExperimentKind::GlbBench => (run_glb_bench(cfg)?, None),
        ExperimentKind::GridSweep => {
            let g = grid_sweep(cfg)?;
            (g.aggregate.clone(), Some(g))
        }
    };
    let mut files = Vec::new();
    if let Some(out) = &cfg.out {
        emit_csv(&aggregate, out, cfg.record_timing)?;
        files.push(out.clone());
        if let Some(g) = &grid {
            let p = with_suffix(out, ".grid.csv");
            write_grid_csv(&g.rows, g.argmin, &p)?;
            files.push(p);
            if let Some(groups) = &g.groups {
                let p = with_suffix(out, ".groups.csv");
                write_groups_csv(groups, &p)?;
                files.push(p);
            }
        }
    }
    Ok(ExperimentOutput {
        aggregate,
        grid,
        files,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_formula() {
        assert_eq!(lipschitz_epoch_len(90_000, 3), 22_800);
        assert_eq!(lipschitz_epoch_len(9_000, 3), 4_060);
        assert_eq!(lipschitz_epoch_len(500, 0), 500);
    }

    #[test]
    fn grid_argmin_ties_take_smallest() {
        let agg = AggregateResult {
            methods: [2.0, 1.0, 1.0]
                .iter()
                .map(|f| super::super::MethodSummary {
                    method: String::new(),
                    mean: vec![*f],
                    std: vec![0.0],
                    final_mean: *f,
                    final_std: 0.0,
                    mean_wall_seconds: 0.0,
                    reps: 1,
                })
                .collect(),
        };
        let (_, argmin) = grid_rows(&[0.1, 5.0, 0.5], &agg).unwrap();
        assert_eq!(argmin, 0.5);
    }

    #[test]
    fn group_means_are_centered() {
        let a = [1.0, 1.0, 0.0, 0.0];
        let b = [0.0, 0.0, 1.0, 1.0];
        let rows = group_means(&[0.1, 1.0], &[vec![&a[..]], vec![&b[..]]], 2).unwrap();
        let got: Vec<f64> = rows.iter().map(|r| r.centered_mean_reward).collect();
        assert_eq!(got, vec![0.5, -0.5, -0.5, 0.5]);
    }
}
