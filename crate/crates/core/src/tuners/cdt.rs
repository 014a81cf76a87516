use log::debug;

use crate::error::{contract, Result};
use crate::lipschitz::{Point, RestartMode, ZoomingBandit, ZoomingConfig};
use crate::rng::SeededRng;

use super::{schedule_defaults, HyperBox, Proposal, Tuner};

#[derive(Debug, Clone, PartialEq)]
pub struct CdtConfig {
    pub hyper_box: HyperBox,
    /// Total rounds including warm-up.
    pub horizon: u64,
    /// Warm-up rounds with random arm pulls.
    pub t1: u64,
    /// Restart epoch of the top layer.
    pub t2: u64,
    pub tau0: f64,
    /// `None` picks the default grid for the box dimension.
    pub grid_resolution: Option<f64>,
}

impl CdtConfig {
    /// Schedule from [`schedule_defaults`].
    pub fn new(hyper_box: HyperBox, horizon: u64) -> Result<Self> {
        let (t1, t2) = schedule_defaults(horizon, hyper_box.dim())?;
        Ok(Self {
            hyper_box,
            horizon,
            t1,
            t2,
            tau0: 0.5,
            grid_resolution: None,
        })
    }

    /// Top-layer configuration on `[0,1]^p`. The epoch is capped at the
    /// top-layer horizon so short runs still validate.
    pub fn zooming(&self) -> Result<ZoomingConfig> {
        if self.t1 >= self.horizon {
            return Err(contract(format!(
                "warm-up {} leaves no tuned rounds in horizon {}",
                self.t1, self.horizon
            )));
        }
        if self.t2 == 0 {
            return Err(contract("CDT epoch length must be >= 1"));
        }
        let top_horizon = self.horizon - self.t1;
        let mut cfg = ZoomingConfig::new(
            self.hyper_box.dim(),
            top_horizon,
            self.t2.min(top_horizon),
            RestartMode::ZoomingTsRestart,
        )
        .with_tau0(self.tau0);
        if let Some(res) = self.grid_resolution {
            cfg = cfg.with_grid_resolution(res);
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Counters that do not affect decisions.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CdtDiagnostics {
    pub warm_up_rounds: u64,
    pub tuned_rounds: u64,
    /// Rewards outside `[0,1]`, where the top layer's noise scale may be off.
    pub rewards_outside_unit: u64,
}

#[derive(Debug, Clone, PartialEq)]
enum Pending {
    None,
    WarmUp,
    Tuned(Point),
}

/// Continuous dynamic tuning: random warm-up, then Zooming TS with restarts
/// over the hyperparameter box.
#[derive(Debug, Clone)]
pub struct Cdt {
    config: CdtConfig,
    top: ZoomingBandit,
    pending: Pending,
    diagnostics: CdtDiagnostics,
}

impl Cdt {
    pub fn new(config: CdtConfig) -> Result<Self> {
        let top = ZoomingBandit::new(config.zooming()?)?;
        Ok(Self {
            config,
            top,
            pending: Pending::None,
            diagnostics: CdtDiagnostics::default(),
        })
    }

    pub fn config(&self) -> &CdtConfig {
        &self.config
    }

    pub fn top_layer(&self) -> &ZoomingBandit {
        &self.top
    }

    pub fn diagnostics(&self) -> CdtDiagnostics {
        self.diagnostics
    }
}

impl Tuner for Cdt {
    fn name(&self) -> &'static str {
        "cdt"
    }

    fn propose(&mut self, t: u64, rng: &mut SeededRng) -> Result<Proposal> {
        if self.pending != Pending::None {
            return Err(contract("CDT propose called twice without feedback"));
        }
        if t > self.config.horizon {
            return Err(contract(format!(
                "round {t} beyond CDT horizon {}",
                self.config.horizon
            )));
        }
        if t <= self.config.t1 {
            self.pending = Pending::WarmUp;
            self.diagnostics.warm_up_rounds += 1;
            let center = vec![0.5; self.config.hyper_box.dim()];
            return Ok(Proposal {
                values: self.config.hyper_box.map(&center)?,
                warm_up: true,
            });
        }
        let point = self.top.select_arm(rng)?;
        let values = self.config.hyper_box.map(point.coords())?;
        self.pending = Pending::Tuned(point);
        self.diagnostics.tuned_rounds += 1;
        Ok(Proposal::tuned(values))
    }

    fn feedback(&mut self, y: f64) -> Result<()> {
        match std::mem::replace(&mut self.pending, Pending::None) {
            Pending::None => Err(contract("CDT feedback without a proposal")),
            Pending::WarmUp => Ok(()),
            Pending::Tuned(point) => {
                if !(0.0..=1.0).contains(&y) {
                    self.diagnostics.rewards_outside_unit += 1;
                    if self.diagnostics.rewards_outside_unit == 1 {
                        debug!("CDT reward {y} outside [0,1]; top-layer noise scale may be too small");
                    }
                }
                self.top.update(&point, y)
            }
        }
    }
}
