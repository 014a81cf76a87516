//! Tune two hyperparameters at once (exploration rate and step size) of
//! SGD-TS on a logistic instance, comparing CDT with the discrete baselines.
//!
//! Run with `cargo run --release --example tune_sgdts`.

use cdt::glb::{AlgorithmKind, Link};
use cdt::harness::{run_glb_bench, ExperimentConfig, ExperimentKind};
use cdt::tuners::{TunerKind, CANDIDATES_C2};

fn main() -> cdt::Result<()> {
    let mut cfg = ExperimentConfig::new(ExperimentKind::GlbBench, 3000);
    cfg.reps = 5;
    cfg.environment.dim = 5;
    cfg.environment.arms = 20;
    cfg.environment.link = Link::Logistic;
    cfg.algorithm.kind = AlgorithmKind::SgdTs;
    cfg.tuning.methods = vec![TunerKind::Cdt, TunerKind::Syndicated, TunerKind::Op, TunerKind::Theory];
    cfg.tuning.candidates = CANDIDATES_C2.to_vec();

    let agg = run_glb_bench(&cfg)?;
    println!("{:<12} {:>10} {:>8}", "tuner", "regret", "std");
    for m in &agg.methods {
        println!("{:<12} {:>10.2} {:>8.2}", m.method, m.final_mean, m.final_std);
    }
    Ok(())
}
