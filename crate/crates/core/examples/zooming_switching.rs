//! Zooming TS with restarts against plain zooming and the change-point
//! oracle on a switching triangle function, stepping the learners by hand.
//!
//! Run with `cargo run --release --example zooming_switching`.

use cdt::env::{random_schedule, Family, SwitchingLipschitzEnv, DEFAULT_PEAKS};
use cdt::harness::lipschitz_epoch_len;
use cdt::lipschitz::{RestartMode, ZoomingBandit, ZoomingConfig};
use cdt::SeededRng;

fn main() -> cdt::Result<()> {
    let horizon = 9000;
    let (changes, peaks) = random_schedule(horizon, 3, &DEFAULT_PEAKS, &mut SeededRng::new(2))?;
    println!("change rounds {changes:?}, peaks {peaks:?}");
    let env = SwitchingLipschitzEnv::new(Family::Triangle, changes.clone(), peaks, 0.1, horizon)?;
    let epoch = lipschitz_epoch_len(horizon, changes.len());

    for mode in [RestartMode::ZoomingPlain, RestartMode::ZoomingTsRestart, RestartMode::OracleRestart] {
        let cfg = ZoomingConfig::new(1, horizon, epoch, mode)
            .with_tau0(0.1)
            .with_change_points(changes.clone());
        let mut bandit = ZoomingBandit::new(cfg)?;
        // same environment stream for every learner
        let mut env_rng = SeededRng::new(10);
        let mut rng = SeededRng::new(11);
        let mut regret = 0.0;
        for t in 1..=horizon {
            let p = bandit.select_arm(&mut rng)?;
            let x = p.coords()[0];
            regret += env.optimal_mean(t) - env.eval(x, t);
            bandit.update(&p, env.draw_reward(x, t, &mut env_rng))?;
        }
        println!(
            "{mode:?}: regret {regret:8.1}, {} active arms, {} removals, restarts {:?}",
            bandit.active_arms().len(),
            bandit.removals(),
            bandit.restart_log()
        );
    }
    Ok(())
}
