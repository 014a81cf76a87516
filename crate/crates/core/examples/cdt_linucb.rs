//! Tune LinUCB's exploration rate online with CDT on a synthetic linear
//! instance, driving the propose/select/feedback loop by hand.
//!
//! Run with `cargo run --release --example cdt_linucb`.

use cdt::env::{GlbEnvironment, SyntheticGlbEnv};
use cdt::glb::{self, AlgorithmKind, AlgorithmSettings, Link};
use cdt::tuners::{Cdt, CdtConfig, HyperBox, Tuner};
use cdt::SeededRng;

fn main() -> cdt::Result<()> {
    let horizon = 3000;
    let mut env_rng = SeededRng::child(7, 0);
    let mut algo_rng = SeededRng::child(7, 1);
    let mut env = SyntheticGlbEnv::new(5, 20, Link::Identity, 0.25, &mut env_rng)?;

    let settings = AlgorithmSettings::new(5, horizon);
    let mut algo = glb::build(AlgorithmKind::LinUcb, &settings)?;
    let theory = algo.hyperparams()[0].theoretical.value(horizon);

    let cfg = CdtConfig::new(HyperBox::cube(1, 0.1, 5.0)?, horizon)?;
    println!("warm-up T1 = {}, restart epoch T2 = {}", cfg.t1, cfg.t2);
    let mut tuner = Cdt::new(cfg)?;

    let mut regret = 0.0;
    let mut alpha_sum = 0.0;
    let mut tuned = 0u64;
    for t in 1..=horizon {
        let arms = env.gen_arms(t, &mut env_rng)?;
        let proposal = tuner.propose(t, &mut algo_rng)?;
        let chosen = if proposal.warm_up {
            algo_rng.below(arms.len())
        } else {
            alpha_sum += proposal.values[0];
            tuned += 1;
            algo.select(&arms, &proposal.values, &mut algo_rng)?
        };
        let y = env.draw_reward(&arms[chosen], &mut env_rng);
        regret += env.optimal_mean(&arms) - env.mean_reward(&arms[chosen]);
        algo.update(&arms[chosen], y)?;
        tuner.feedback(y)?;
        if t % 500 == 0 {
            println!(
                "t = {t:5}  regret = {regret:8.3}  mean alpha so far = {:.3}",
                alpha_sum / tuned.max(1) as f64
            );
        }
    }
    println!("theoretical alpha at T: {theory:.3}");
    println!(
        "top layer: {} active arms, restarts at {:?}",
        tuner.top_layer().active_arms().len(),
        tuner.top_layer().restart_log()
    );
    Ok(())
}
