use crate::error::{contract, Result};

use super::euclidean;

/// Uniform grid over `[0,1]^p` standing in for the continuous arm space.
///
/// Points are indexed in lexicographic order: the first coordinate is the
/// most significant digit.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    dim: usize,
    per_axis: usize,
    coords: Vec<f64>,
}

impl Grid {
    /// Grid with spacing `resolution` along each of `dim` axes, endpoints
    /// included.
    pub fn new(dim: usize, resolution: f64) -> Result<Self> {
        if dim == 0 {
            return Err(contract("grid dimension must be >= 1"));
        }
        if !(resolution > 0.0 && resolution <= 1.0) {
            return Err(contract(format!("grid resolution {resolution} outside (0, 1]")));
        }
        let per_axis = (1.0 / resolution).round() as usize + 1;
        let len = per_axis
            .checked_pow(dim as u32)
            .filter(|n| *n <= 4_000_000)
            .ok_or_else(|| contract("grid too large"))?;
        let step = 1.0 / (per_axis - 1) as f64;
        let mut coords = Vec::with_capacity(len * dim);
        for idx in 0..len {
            let mut rem = idx;
            let start = coords.len();
            coords.resize(start + dim, 0.0);
            for axis in (0..dim).rev() {
                coords[start + axis] = (rem % per_axis) as f64 * step;
                rem /= per_axis;
            }
        }
        Ok(Self {
            dim,
            per_axis,
            coords,
        })
    }

    /// Default resolution: 1/200 for one dimension, 1/64 for two, coarser
    /// beyond so the grid stays near 10^5 points.
    pub fn default_resolution(dim: usize) -> f64 {
        match dim {
            1 => 1.0 / 200.0,
            2 => 1.0 / 64.0,
            3 => 1.0 / 32.0,
            _ => 1.0 / 8.0,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn per_axis(&self) -> usize {
        self.per_axis
    }

    pub fn point(&self, idx: usize) -> &[f64] {
        &self.coords[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Index of the grid point nearest to `x` (per-axis rounding).
    pub fn nearest(&self, x: &[f64]) -> usize {
        let step = 1.0 / (self.per_axis - 1) as f64;
        x.iter().fold(0usize, |acc, c| {
            let k = (c.clamp(0.0, 1.0) / step).round() as usize;
            acc * self.per_axis + k.min(self.per_axis - 1)
        })
    }
}

/// Greedy ball-cover count of `{v : r/2 < max f - f(v) <= r}` with balls of
/// radius `r`, where `values[i]` is `f` at `grid.point(i)`. An upper bound on
/// the r-zooming number at grid resolution.
pub fn estimate_zooming_number(grid: &Grid, values: &[f64], r: f64) -> Result<usize> {
    if values.len() != grid.len() {
        return Err(crate::error::Error::DimensionMismatch {
            expected: grid.len(),
            actual: values.len(),
        });
    }
    if !(r > 0.0 && r <= 1.0) {
        return Err(contract(format!("zooming scale {r} outside (0, 1]")));
    }
    let best = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut pending: Vec<usize> = (0..grid.len())
        .filter(|&i| {
            let gap = best - values[i];
            gap > r / 2.0 && gap <= r
        })
        .collect();
    let mut balls = 0;
    while let Some(&c) = pending.first() {
        let center = grid.point(c);
        pending.retain(|&i| euclidean(grid.point(i), center) > r);
        balls += 1;
    }
    Ok(balls)
}
