use std::path::{Path, PathBuf};

use crate::error::{contract, Error, Result};
use crate::glb::Link;
use crate::rng::SeededRng;

use super::{into_unit_ball, GlbEnvironment, RewardModel};

/// Read a comma-separated numeric matrix with `dim` columns. Blank lines and
/// lines starting with `#` are skipped. Each row is scaled into the unit
/// ball.
pub fn load_csv_matrix(path: impl AsRef<Path>, dim: usize) -> Result<Vec<Vec<f64>>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_matrix(&text, dim, path)
}

fn parse_matrix(text: &str, dim: usize, path: &Path) -> Result<Vec<Vec<f64>>> {
    let err = |line: usize, msg: String| Error::Parse {
        path: PathBuf::from(path),
        line,
        msg,
    };
    let mut rows = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != dim {
            return Err(err(i + 1, format!("expected {dim} fields, found {}", fields.len())));
        }
        let mut row = fields
            .iter()
            .map(|f| {
                f.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| err(i + 1, format!("invalid number {f:?}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        into_unit_ball(&mut row);
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(err(0, "no data rows".into()));
    }
    Ok(rows)
}

/// Arms sampled from a fixed item matrix, `theta*` from averaged user rows.
#[derive(Debug, Clone)]
pub struct CsvDatasetEnv {
    items: Vec<Vec<f64>>,
    arms: usize,
    model: RewardModel,
}

impl CsvDatasetEnv {
    /// `theta*` is the average of `n_users` distinct random user rows, scaled
    /// to unit norm (left at zero if the average vanishes).
    pub fn new(
        users: &[Vec<f64>],
        items: Vec<Vec<f64>>,
        n_users: usize,
        arms: usize,
        link: Link,
        noise_sigma: f64,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        if users.is_empty() || items.is_empty() {
            return Err(contract("user and item matrices must be non-empty"));
        }
        let dim = items[0].len();
        if users.iter().chain(&items).any(|r| r.len() != dim) {
            return Err(contract("user and item rows must share one dimension"));
        }
        if arms == 0 || arms > items.len() {
            return Err(contract(format!(
                "K = {arms} arms requested but only {} items available",
                items.len()
            )));
        }
        if n_users == 0 || n_users > users.len() {
            return Err(contract(format!(
                "cannot average {n_users} of {} users",
                users.len()
            )));
        }
        let mut theta = vec![0.0; dim];
        for i in rand::seq::index::sample(rng, users.len(), n_users) {
            for (t, u) in theta.iter_mut().zip(&users[i]) {
                *t += u / n_users as f64;
            }
        }
        let n = crate::linalg::norm(&theta);
        if n > 0.0 {
            theta.iter_mut().for_each(|t| *t /= n);
        }
        Self::with_theta(items, arms, theta, link, noise_sigma)
    }

    pub fn with_theta(
        items: Vec<Vec<f64>>,
        arms: usize,
        theta_star: Vec<f64>,
        link: Link,
        noise_sigma: f64,
    ) -> Result<Self> {
        if arms == 0 || arms > items.len() {
            return Err(contract(format!(
                "K = {arms} arms requested but only {} items available",
                items.len()
            )));
        }
        if !(noise_sigma >= 0.0) {
            return Err(contract(format!("noise sigma must be >= 0, got {noise_sigma}")));
        }
        Ok(Self {
            items,
            arms,
            model: RewardModel {
                theta_star,
                link,
                noise_sigma,
            },
        })
    }

    pub fn items(&self) -> &[Vec<f64>] {
        &self.items
    }
}

impl GlbEnvironment for CsvDatasetEnv {
    fn dim(&self) -> usize {
        self.model.theta_star.len()
    }

    fn gen_arms(&mut self, _t: u64, rng: &mut SeededRng) -> Result<Vec<Vec<f64>>> {
        Ok(rand::seq::index::sample(rng, self.items.len(), self.arms)
            .into_iter()
            .map(|i| self.items[i].clone())
            .collect())
    }

    fn model(&self) -> &RewardModel {
        &self.model
    }
}
