//! Double restarts: EXP3 picks the restart epoch of Zooming TS once per top
//! epoch when the number of changes is unknown.
//!
//! Run with `cargo run --release --example double_restarts`.

use cdt::env::{random_schedule, Family, SwitchingLipschitzEnv, DEFAULT_PEAKS};
use cdt::lipschitz::{double_restarts_ladder, DoubleRestartZooming, RestartMode, ZoomingConfig};
use cdt::SeededRng;

fn main() -> cdt::Result<()> {
    let horizon = 10_000;
    let meta = double_restarts_ladder(horizon, 1.0)?;
    println!("top epoch {}, ladder {:?}, gamma {:.4}", meta.top_epoch_len(), meta.ladder(), meta.gamma());

    let (changes, peaks) = random_schedule(horizon, 3, &DEFAULT_PEAKS, &mut SeededRng::new(4))?;
    let env = SwitchingLipschitzEnv::new(Family::Sine, changes, peaks, 0.1, horizon)?;
    let template = ZoomingConfig::new(1, horizon, horizon, RestartMode::ZoomingTsRestart).with_tau0(0.1);
    let mut learner = DoubleRestartZooming::with_meta(template, meta)?;

    let mut env_rng = SeededRng::new(1);
    let mut rng = SeededRng::new(2);
    let mut regret = 0.0;
    for t in 1..=horizon {
        let p = learner.select_arm(&mut rng)?;
        let x = p.coords()[0];
        regret += env.optimal_mean(t) - env.eval(x, t);
        learner.update(&p, env.draw_reward(x, t, &mut env_rng))?;
    }
    let ladder = learner.meta().ladder().to_vec();
    let chosen: Vec<u64> = learner.choices().iter().map(|&j| ladder[j]).collect();
    println!("regret {regret:.1}");
    println!("epoch lengths drawn per top epoch: {chosen:?}");
    let probs: Vec<String> = learner.meta().probabilities().iter().map(|p| format!("{p:.3}")).collect();
    println!("final EXP3 distribution: [{}]", probs.join(", "));
    Ok(())
}
