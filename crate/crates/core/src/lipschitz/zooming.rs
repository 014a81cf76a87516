use std::collections::BTreeSet;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::error::{contract, Result};
use crate::rng::SeededRng;

use super::{confidence_radius, euclidean, lex_cmp, ts_scale, Grid, Point};

/// When the active set and candidate region are reset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RestartMode {
    /// Thompson-sampling index, removal step, restart every `epoch_len` rounds.
    ZoomingTsRestart,
    /// Classic zooming: UCB index `mean + 2 r`, no removal, never restarts.
    ZoomingPlain,
    /// Thompson-sampling zooming restarted right after each known change point.
    OracleRestart,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZoomingConfig {
    pub dim: usize,
    /// Sub-Gaussian scale of the reward noise.
    pub tau0: f64,
    /// Horizon `T` entering `ln T` in the radius and sampling scale.
    pub horizon: u64,
    /// Restart epoch length `H`.
    pub epoch_len: u64,
    pub grid_resolution: f64,
    pub mode: RestartMode,
    /// Rounds `c` with `f_c != f_{c+1}`; only read in oracle mode.
    pub change_points: Vec<u64>,
}

impl ZoomingConfig {
    pub fn new(dim: usize, horizon: u64, epoch_len: u64, mode: RestartMode) -> Self {
        Self {
            dim,
            tau0: 0.5,
            horizon,
            epoch_len,
            grid_resolution: Grid::default_resolution(dim),
            mode,
            change_points: Vec::new(),
        }
    }

    pub fn with_tau0(mut self, tau0: f64) -> Self {
        self.tau0 = tau0;
        self
    }

    pub fn with_grid_resolution(mut self, resolution: f64) -> Self {
        self.grid_resolution = resolution;
        self
    }

    pub fn with_change_points(mut self, change_points: Vec<u64>) -> Self {
        self.change_points = change_points;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(contract("zooming dimension must be >= 1"));
        }
        if !(self.tau0 > 0.0) {
            return Err(contract(format!("tau0 must be positive, got {}", self.tau0)));
        }
        if self.horizon < 2 {
            return Err(contract("zooming horizon must be >= 2"));
        }
        if self.epoch_len == 0 {
            return Err(contract("epoch length must be >= 1"));
        }
        if self.mode == RestartMode::ZoomingTsRestart && self.horizon < self.epoch_len {
            return Err(contract(format!(
                "epoch length {} exceeds horizon {}",
                self.epoch_len, self.horizon
            )));
        }
        if !(self.grid_resolution > 0.0 && self.grid_resolution <= 0.1) {
            return Err(contract(format!(
                "grid resolution {} outside (0, 0.1]",
                self.grid_resolution
            )));
        }
        Ok(())
    }
}

/// An activated arm: its center, pull count and mean reward since the last
/// restart.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveArm {
    center: Point,
    pulls: u64,
    mean_reward: f64,
}

impl ActiveArm {
    pub fn new(center: Point) -> Self {
        Self {
            center,
            pulls: 0,
            mean_reward: 0.0,
        }
    }

    /// Arm with given statistics, for driving the index and removal rules
    /// directly.
    pub fn with_stats(center: Point, pulls: u64, mean_reward: f64) -> Self {
        Self {
            center,
            pulls,
            mean_reward: if pulls == 0 { 0.0 } else { mean_reward },
        }
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn pulls(&self) -> u64 {
        self.pulls
    }

    pub fn mean_reward(&self) -> f64 {
        self.mean_reward
    }

    pub fn radius(&self, config: &ZoomingConfig) -> f64 {
        confidence_radius(self.pulls, config.tau0, config.horizon)
    }

    fn observe(&mut self, reward: f64) {
        let n = self.pulls as f64;
        self.pulls += 1;
        self.mean_reward = (self.mean_reward * n + reward) / self.pulls as f64;
    }
}

/// Thompson index `mean + s_t(v) Z` with `Z` clipped standard normal;
/// unpulled arms get `+inf`.
pub fn perturbed_index(arm: &ActiveArm, config: &ZoomingConfig, rng: &mut SeededRng) -> f64 {
    if arm.pulls == 0 {
        return f64::INFINITY;
    }
    let s = ts_scale(arm.pulls, config.tau0, config.horizon);
    arm.mean_reward + s * rng.clipped_standard_normal()
}

/// Zooming learner over `[0,1]^p` with a grid standing in for the candidate
/// region.
#[derive(Debug, Clone)]
pub struct ZoomingBandit {
    config: ZoomingConfig,
    grid: Grid,
    mask: Vec<bool>,
    /// Sorted lexicographically by center.
    active: Vec<ActiveArm>,
    cover_hint: Vec<u32>,
    oracle_restarts: BTreeSet<u64>,
    round: u64,
    pending: Option<usize>,
    restart_log: Vec<u64>,
    removals: u64,
}

impl ZoomingBandit {
    pub fn new(config: ZoomingConfig) -> Result<Self> {
        config.validate()?;
        let grid = Grid::new(config.dim, config.grid_resolution)?;
        let mut oracle_restarts = BTreeSet::new();
        if config.mode == RestartMode::OracleRestart {
            for &c in &config.change_points {
                if c == 0 || c >= config.horizon {
                    warn!(
                        "change point {c} ignored: restart round {} outside 2..={}",
                        c + 1,
                        config.horizon
                    );
                    continue;
                }
                oracle_restarts.insert(c + 1);
            }
        }
        let n = grid.len();
        Ok(Self {
            config,
            grid,
            mask: vec![true; n],
            active: Vec::new(),
            cover_hint: vec![0; n],
            oracle_restarts,
            round: 1,
            pending: None,
            restart_log: Vec::new(),
            removals: 0,
        })
    }

    pub fn config(&self) -> &ZoomingConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// `true` for grid points still in the candidate region.
    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn active_arms(&self) -> &[ActiveArm] {
        &self.active
    }

    /// Round number of the next `select_arm` call (1-based).
    pub fn round(&self) -> u64 {
        self.round
    }

    /// Rounds at which a restart fired so far.
    pub fn restart_log(&self) -> &[u64] {
        &self.restart_log
    }

    pub fn removals(&self) -> u64 {
        self.removals
    }

    pub fn radius(&self, arm: &ActiveArm) -> f64 {
        arm.radius(&self.config)
    }

    pub fn is_restart_round(&self, t: u64) -> bool {
        match self.config.mode {
            RestartMode::ZoomingTsRestart => (t - 1).is_multiple_of(self.config.epoch_len),
            RestartMode::ZoomingPlain => t == 1,
            RestartMode::OracleRestart => t == 1 || self.oracle_restarts.contains(&t),
        }
    }

    /// Reset the candidate region and seed the active set with the center of
    /// the cube.
    pub fn restart(&mut self) {
        self.mask.iter_mut().for_each(|m| *m = true);
        self.active.clear();
        self.active.push(ActiveArm::new(Point::center(self.config.dim)));
        self.restart_log.push(self.round);
    }

    /// Remove the first arm `u` (scan order: lexicographic by center, then
    /// `v` in the same order) with `mean(v) - mean(u) > r(v) + 2 r(u)`, and
    /// drop its confidence ball from the candidate region. At most one
    /// removal per call; returns the removed center.
    pub fn removal_pass(&mut self) -> Option<Point> {
        let radii: Vec<f64> = self.active.iter().map(|a| a.radius(&self.config)).collect();
        let mut victim = None;
        'scan: for (ui, u) in self.active.iter().enumerate() {
            if u.pulls == 0 {
                continue;
            }
            for (vi, v) in self.active.iter().enumerate() {
                if vi == ui || v.pulls == 0 {
                    continue;
                }
                if v.mean_reward - u.mean_reward > radii[vi] + 2.0 * radii[ui] {
                    victim = Some(ui);
                    break 'scan;
                }
            }
        }
        let ui = victim?;
        let removed = self.active.remove(ui);
        let r = radii[ui];
        for (idx, m) in self.mask.iter_mut().enumerate() {
            if *m && euclidean(self.grid.point(idx), removed.center.coords()) <= r {
                *m = false;
            }
        }
        self.removals += 1;
        Some(removed.center)
    }

    /// If some candidate grid point lies outside every confidence ball,
    /// activate the lexicographically first one and return its position in
    /// the active set.
    pub fn coverage_and_activation(&mut self) -> Option<usize> {
        if self.active.iter().any(|a| a.pulls == 0) {
            return None;
        }
        let radii: Vec<f64> = self.active.iter().map(|a| a.radius(&self.config)).collect();
        let mut uncovered = None;
        for idx in 0..self.mask.len() {
            if !self.mask[idx] {
                continue;
            }
            let p = self.grid.point(idx);
            let hint = self.cover_hint[idx] as usize;
            if hint < self.active.len()
                && euclidean(p, self.active[hint].center.coords()) <= radii[hint]
            {
                continue;
            }
            match self
                .active
                .iter()
                .zip(&radii)
                .position(|(a, r)| euclidean(p, a.center.coords()) <= *r)
            {
                Some(j) => self.cover_hint[idx] = j as u32,
                None => {
                    uncovered = Some(idx);
                    break;
                }
            }
        }
        let idx = uncovered?;
        let center = Point(self.grid.point(idx).to_vec());
        let pos = self
            .active
            .partition_point(|a| lex_cmp(a.center.coords(), center.coords()).is_lt());
        self.active.insert(pos, ActiveArm::new(center));
        Some(pos)
    }

    fn index_of(&self, arm: &ActiveArm, rng: &mut SeededRng) -> f64 {
        match self.config.mode {
            RestartMode::ZoomingPlain => {
                if arm.pulls == 0 {
                    f64::INFINITY
                } else {
                    arm.mean_reward + 2.0 * arm.radius(&self.config)
                }
            }
            _ => perturbed_index(arm, &self.config, rng),
        }
    }

    /// One round of arm selection: restart, removal, activation, then the
    /// argmax of the index over the active set (ties go to the
    /// lexicographically smallest center).
    pub fn select_arm(&mut self, rng: &mut SeededRng) -> Result<Point> {
        if self.pending.is_some() {
            return Err(contract("select_arm called twice without update"));
        }
        if self.round > self.config.horizon {
            return Err(contract(format!(
                "round {} beyond horizon {}",
                self.round, self.config.horizon
            )));
        }
        if self.is_restart_round(self.round) {
            self.restart();
        } else if self.config.mode != RestartMode::ZoomingPlain {
            self.removal_pass();
        }
        let chosen = match self.coverage_and_activation() {
            Some(pos) => pos,
            None => {
                assert!(!self.active.is_empty(), "active set empty after restart");
                let mut best = 0;
                let mut best_index = f64::NEG_INFINITY;
                for i in 0..self.active.len() {
                    let idx = self.index_of(&self.active[i], rng);
                    if idx > best_index {
                        best_index = idx;
                        best = i;
                    }
                }
                best
            }
        };
        self.pending = Some(chosen);
        Ok(self.active[chosen].center.clone())
    }

    /// Record the reward of the arm returned by the last `select_arm`.
    pub fn update(&mut self, pulled: &Point, reward: f64) -> Result<()> {
        let idx = self
            .pending
            .ok_or_else(|| contract("update without a preceding select_arm"))?;
        if self.active[idx].center != *pulled {
            return Err(contract(format!(
                "update for {:?}, which is not the arm selected this round",
                pulled.coords()
            )));
        }
        self.pending = None;
        self.active[idx].observe(reward);
        self.round += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(x: &[f64]) -> Point {
        Point::new(x.to_vec()).unwrap()
    }

    fn cfg(mode: RestartMode) -> ZoomingConfig {
        ZoomingConfig::new(1, 1000, 100, mode).with_grid_resolution(0.1)
    }

    /// Radius 0.1 needs n = 13 tau0^2 ln T / (2 * 0.01); pick tau0 so n is whole.
    fn bandit_with(arms: Vec<ActiveArm>, tau0: f64) -> ZoomingBandit {
        let mut b = ZoomingBandit::new(cfg(RestartMode::ZoomingTsRestart).with_tau0(tau0)).unwrap();
        b.active = arms;
        b.active.sort_by(|x, y| x.center.lex_cmp(&y.center));
        b
    }

    fn tau_for_radius(r: f64, pulls: u64, horizon: u64) -> f64 {
        (r * r * 2.0 * pulls as f64 / (13.0 * (horizon as f64).ln())).sqrt()
    }

    #[test]
    fn removal_strict_rule() {
        let tau = tau_for_radius(0.1, 10, 1000);
        let arms = vec![
            ActiveArm::with_stats(pt(&[0.2]), 10, 0.5),
            ActiveArm::with_stats(pt(&[0.8]), 10, 0.9),
        ];
        let mut b = bandit_with(arms, tau);
        assert!((b.radius(&b.active[0]) - 0.1).abs() < 1e-12);
        let removed = b.removal_pass().unwrap();
        assert_eq!(removed, pt(&[0.2]));
        assert_eq!(b.active.len(), 1);
        // ball of radius 0.1 around 0.2 removed from the grid
        let off: Vec<f64> = b
            .grid()
            .points()
            .zip(b.mask())
            .filter(|(_, m)| !**m)
            .map(|(p, _)| p[0])
            .collect();
        assert!(off.iter().all(|x| (x - 0.2).abs() <= 0.1 + 1e-12));
        assert!(off.len() >= 2);

        let arms = vec![
            ActiveArm::with_stats(pt(&[0.2]), 10, 0.5),
            ActiveArm::with_stats(pt(&[0.8]), 10, 0.75),
        ];
        let mut b = bandit_with(arms, tau);
        assert!(b.removal_pass().is_none());
    }

    #[test]
    fn unpulled_arm_never_removed() {
        let arms = vec![
            ActiveArm::with_stats(pt(&[0.2]), 0, 0.0),
            ActiveArm::with_stats(pt(&[0.8]), 1000, 1.0),
        ];
        let mut b = bandit_with(arms, 0.01);
        assert!(b.removal_pass().is_none());
    }

    #[test]
    fn activation_first_uncovered() {
        let tau = tau_for_radius(0.2, 10, 1000);
        let mut b = bandit_with(vec![ActiveArm::with_stats(pt(&[0.5]), 10, 0.4)], tau);
        let pos = b.coverage_and_activation().unwrap();
        assert_eq!(b.active[pos].center, pt(&[0.0]));
        assert_eq!(b.active[pos].pulls, 0);
    }

    #[test]
    fn unpulled_arm_covers_all() {
        let mut b = bandit_with(vec![ActiveArm::new(Point::center(1))], 0.5);
        assert!(b.coverage_and_activation().is_none());
    }

    #[test]
    fn empty_region_needs_no_activation() {
        let mut b = bandit_with(vec![ActiveArm::with_stats(pt(&[0.5]), 10_000, 0.4)], 0.01);
        b.mask.iter_mut().for_each(|m| *m = false);
        assert!(b.coverage_and_activation().is_none());
    }

    #[test]
    fn index_floor_and_limits() {
        let c = cfg(RestartMode::ZoomingTsRestart);
        let mut rng = SeededRng::new(5);
        assert_eq!(perturbed_index(&ActiveArm::new(pt(&[0.1])), &c, &mut rng), f64::INFINITY);
        // f = 0.5, s = 0.2 with a floor draw gives 0.5 + 0.2/sqrt(2 pi)
        let floor = 0.5 + 0.2 * crate::rng::CLIP_FLOOR;
        assert!((floor - 0.5798).abs() < 1e-4);
        let arm = ActiveArm::with_stats(pt(&[0.1]), 4, 0.5);
        let s = ts_scale(4, c.tau0, c.horizon);
        for _ in 0..1000 {
            assert!(perturbed_index(&arm, &c, &mut rng) >= 0.5 + s * crate::rng::CLIP_FLOOR);
        }
    }

    #[test]
    fn first_round_pulls_center() {
        let mut b = ZoomingBandit::new(cfg(RestartMode::ZoomingTsRestart)).unwrap();
        let mut rng = SeededRng::new(0);
        let p = b.select_arm(&mut rng).unwrap();
        assert_eq!(p, Point::center(1));
        assert_eq!(b.restart_log(), &[1]);
    }

    #[test]
    fn unpulled_arm_selected() {
        let mut b = bandit_with(
            vec![
                ActiveArm::with_stats(pt(&[0.3]), 50, 0.9),
                ActiveArm::with_stats(pt(&[0.7]), 0, 0.0),
            ],
            0.5,
        );
        b.round = 2;
        let mut rng = SeededRng::new(1);
        assert_eq!(b.select_arm(&mut rng).unwrap(), pt(&[0.7]));
    }

    #[test]
    fn update_running_mean() {
        let mut arm = ActiveArm::with_stats(pt(&[0.1]), 3, 0.5);
        arm.observe(0.9);
        assert!((arm.mean_reward - 0.6).abs() < 1e-15);
        assert_eq!(arm.pulls, 4);
        let mut arm = ActiveArm::new(pt(&[0.1]));
        arm.observe(0.7);
        assert_eq!((arm.pulls, arm.mean_reward), (1, 0.7));
    }

    #[test]
    fn update_contract() {
        let mut b = ZoomingBandit::new(cfg(RestartMode::ZoomingTsRestart)).unwrap();
        assert!(b.update(&Point::center(1), 0.1).is_err());
        let mut rng = SeededRng::new(0);
        let p = b.select_arm(&mut rng).unwrap();
        assert!(b.select_arm(&mut rng).is_err());
        assert!(b.update(&pt(&[0.0]), 0.1).is_err());
        b.update(&p, 0.2).unwrap();
        for r in [0.4, 0.9] {
            let p = b.select_arm(&mut rng).unwrap();
            b.update(&p, r).unwrap();
        }
        let arm = &b.active_arms()[0];
        assert_eq!(arm.pulls(), 3);
        assert!((arm.mean_reward() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn oracle_schedule() {
        let c = ZoomingConfig::new(1, 9000, 9000, RestartMode::OracleRestart)
            .with_change_points(vec![3000, 6000, 12_000]);
        let b = ZoomingBandit::new(c).unwrap();
        let rounds: Vec<u64> = (1..=9000).filter(|&t| b.is_restart_round(t)).collect();
        assert_eq!(rounds, vec![1, 3001, 6001]);

        let c = ZoomingConfig::new(1, 9000, 9000, RestartMode::OracleRestart);
        let b = ZoomingBandit::new(c).unwrap();
        assert_eq!((1..=9000).filter(|&t| b.is_restart_round(t)).count(), 1);
    }

    #[test]
    fn horizon_enforced() {
        let mut b = ZoomingBandit::new(ZoomingConfig::new(1, 2, 2, RestartMode::ZoomingTsRestart))
            .unwrap();
        let mut rng = SeededRng::new(0);
        for _ in 0..2 {
            let p = b.select_arm(&mut rng).unwrap();
            b.update(&p, 0.0).unwrap();
        }
        assert!(b.select_arm(&mut rng).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(ZoomingBandit::new(ZoomingConfig::new(1, 10, 20, RestartMode::ZoomingTsRestart)).is_err());
        assert!(ZoomingBandit::new(ZoomingConfig::new(1, 10, 0, RestartMode::ZoomingPlain)).is_err());
        assert!(ZoomingBandit::new(
            ZoomingConfig::new(1, 10, 10, RestartMode::ZoomingPlain).with_grid_resolution(0.5)
        )
        .is_err());
    }
}
