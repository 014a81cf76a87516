//! Sweep fixed exploration rates for LinUCB and compare the best one with
//! the theoretical rate.
//!
//! Run with `cargo run --release --example grid_sweep`.

use cdt::glb::theoretical_alpha;
use cdt::harness::{grid_sweep, ExperimentConfig, ExperimentKind};

fn main() -> cdt::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::GridSweep, 2000);
    cfg.reps = 3;
    cfg.environment.dim = 8;
    cfg.environment.arms = 40;
    cfg.grid.values = vec![0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0];
    cfg.grid.group_window = Some(500);

    let result = grid_sweep(&cfg)?;
    for row in &result.rows {
        println!("alpha {:>4.1}: regret {:8.2} (std {:.2})", row.value, row.mean_final, row.std_final);
    }
    let s = cfg.algorithm_settings();
    let theory = theoretical_alpha(cfg.horizon as f64, s.sigma, s.dim, s.lambda, s.delta(), s.norm_bound);
    println!("best alpha {} vs theoretical {theory:.2}", result.argmin);

    // how each value's reward compares with the average over values, per window
    if let Some(groups) = &result.groups {
        for g in groups.iter().filter(|g| g.value == result.argmin) {
            println!("window {}: best value is {:+.4} above the mean", g.group, g.centered_mean_reward);
        }
    }
    Ok(())
}
