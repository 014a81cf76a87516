//! Run tuners on an environment backed by user and item feature CSVs, as
//! produced by a matrix factorization of a ratings dataset.
//!
//! Run with `cargo run --release --example csv_dataset`.

use std::path::Path;

use cdt::harness::{run_experiment, ExperimentConfig};

fn main() -> cdt::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/csv_dataset.toml");
    // relative CSV paths in the config resolve against its directory
    let mut cfg = ExperimentConfig::load(&path, &["reps=3".to_string()])?;
    cfg.out = None;
    println!(
        "users {:?}, items {:?}, K = {}",
        cfg.environment.users_path, cfg.environment.items_path, cfg.environment.arms
    );
    let out = run_experiment(&cfg)?;
    for m in &out.aggregate.methods {
        println!("{:<12} regret {:8.2} ± {:.2}", m.method, m.final_mean, m.final_std);
    }
    Ok(())
}
