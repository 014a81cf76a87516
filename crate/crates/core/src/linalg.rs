//! Small dense linear algebra for ridge-regression bandit state.
//!
//! Sizes stay below ~32, so everything is plain row-major `Vec<f64>` with
//! O(d^3) factorizations and O(d^2) rank-one updates.

use log::debug;

use crate::error::{contract, Error, Result};
use crate::rng::SeededRng;

/// Symmetry tolerance used by routines that require symmetric input.
const SYM_TOL: f64 = 1e-9;

/// Full re-inversion cadence for [`RidgeState`].
pub const REINVERT_EVERY: u64 = 512;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn check_dim(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::DimensionMismatch { expected, actual });
    }
    Ok(())
}

/// Square matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, 1.0)
    }

    pub fn scaled_identity(n: usize, s: f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = s;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = *v;
        }
        m
    }

    /// Build from rows; every row must have `rows.len()` entries.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for row in rows {
            check_dim(n, row.len())?;
            data.extend_from_slice(row);
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| dot(self.row(i), x)).collect()
    }

    pub fn mul(&self, other: &Matrix) -> Matrix {
        let n = self.n;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        out
    }

    /// `x^T M x`.
    pub fn quad_form(&self, x: &[f64]) -> f64 {
        (0..self.n).map(|i| x[i] * dot(self.row(i), x)).sum()
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    pub fn frobenius_distance(&self, other: &Matrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    fn symmetrize(&mut self) {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let m = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = m;
                self[(j, i)] = m;
            }
        }
    }

    /// Lower-triangular Cholesky factor `L` with `L L^T = self`.
    pub fn cholesky(&self) -> Result<Matrix> {
        let n = self.n;
        let mut l = Matrix::zeros(n);
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite);
            }
            let djj = d.sqrt();
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / djj;
            }
        }
        Ok(l)
    }

    /// Inverse of a symmetric positive definite matrix via Cholesky.
    pub fn spd_inverse(&self) -> Result<Matrix> {
        let n = self.n;
        let l = self.cholesky()?;
        // L^{-1} by forward substitution, then inv = L^{-T} L^{-1}
        let mut linv = Matrix::zeros(n);
        for col in 0..n {
            for i in col..n {
                let mut s = if i == col { 1.0 } else { 0.0 };
                for k in col..i {
                    s -= l[(i, k)] * linv[(k, col)];
                }
                linv[(i, col)] = s / l[(i, i)];
            }
        }
        let mut inv = Matrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let s: f64 = (i.max(j)..n).map(|k| linv[(k, i)] * linv[(k, j)]).sum();
                inv[(i, j)] = s;
                inv[(j, i)] = s;
            }
        }
        Ok(inv)
    }
}

impl std::ops::Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n + j]
    }
}

/// `sqrt(x^T V^{-1} x)`. A negative quadratic form (round-off on a nearly
/// singular inverse) is clamped to zero.
pub fn mahalanobis_norm(x: &[f64], v_inv: &Matrix) -> f64 {
    let q = v_inv.quad_form(x);
    if q < 0.0 {
        debug!("negative quadratic form {q:e} clamped to 0");
        return 0.0;
    }
    q.sqrt()
}

/// `mean + scale * L z` with `L L^T = covariance` and `z` standard normal.
pub fn sample_gaussian_vector(
    rng: &mut SeededRng,
    mean: &[f64],
    covariance: &Matrix,
    scale: f64,
) -> Result<Vec<f64>> {
    check_dim(covariance.dim(), mean.len())?;
    let l = covariance.cholesky()?;
    if scale == 0.0 {
        return Ok(mean.to_vec());
    }
    let z: Vec<f64> = (0..mean.len()).map(|_| rng.standard_normal()).collect();
    Ok((0..mean.len())
        .map(|i| {
            let lz: f64 = (0..=i).map(|k| l[(i, k)] * z[k]).sum();
            mean[i] + scale * lz
        })
        .collect())
}

/// Smallest eigenvalue of a symmetric matrix (cyclic Jacobi rotations).
pub fn min_eigenvalue(v: &Matrix) -> Result<f64> {
    let asym = v.max_asymmetry();
    let scale = v.as_slice().iter().fold(1.0f64, |m, x| m.max(x.abs()));
    if asym > SYM_TOL * scale {
        return Err(Error::NotSymmetric(asym));
    }
    let eig = symmetric_eigenvalues(v);
    Ok(eig.into_iter().fold(f64::INFINITY, f64::min))
}

fn symmetric_eigenvalues(v: &Matrix) -> Vec<f64> {
    let n = v.dim();
    let mut a = v.clone();
    a.symmetrize();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        let diag: f64 = (0..n).map(|i| a[(i, i)].powi(2)).sum();
        if off <= 1e-30 * diag.max(1e-300) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[(i, i)]).collect()
}

/// Incremental ridge regression: `V = lambda I + sum x x^T`, `b = sum y x`.
#[derive(Debug, Clone)]
pub struct RidgeState {
    lambda: f64,
    v: Matrix,
    v_inv: Matrix,
    b: Vec<f64>,
    count: u64,
}

impl RidgeState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0) || dim == 0 {
            return Err(crate::error::contract(format!(
                "ridge state needs dim >= 1 and lambda > 0 (got dim={dim}, lambda={lambda})"
            )));
        }
        Ok(Self {
            lambda,
            v: Matrix::scaled_identity(dim, lambda),
            v_inv: Matrix::scaled_identity(dim, 1.0 / lambda),
            b: vec![0.0; dim],
            count: 0,
        })
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn v(&self) -> &Matrix {
        &self.v
    }

    pub fn v_inv(&self) -> &Matrix {
        &self.v_inv
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// `V^{-1} b`.
    pub fn theta(&self) -> Vec<f64> {
        self.v_inv.mul_vec(&self.b)
    }

    /// Add one observation. The inverse follows the Sherman-Morrison identity
    /// and is rebuilt from scratch every [`REINVERT_EVERY`] updates.
    pub fn rank_one_update(&mut self, x: &[f64], y: f64) -> Result<()> {
        let d = self.dim();
        check_dim(d, x.len())?;
        if !y.is_finite() || x.iter().any(|v| !v.is_finite()) {
            return Err(contract("ridge update needs finite x and y"));
        }
        for i in 0..d {
            self.b[i] += y * x[i];
            for j in 0..d {
                self.v[(i, j)] += x[i] * x[j];
            }
        }
        let u = self.v_inv.mul_vec(x);
        let denom = 1.0 + dot(x, &u);
        for i in 0..d {
            for j in 0..d {
                self.v_inv[(i, j)] -= u[i] * u[j] / denom;
            }
        }
        self.count += 1;
        if self.count.is_multiple_of(REINVERT_EVERY) {
            self.v_inv = self.v.spd_inverse()?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dim_closed_form() {
        let mut r = RidgeState::new(1, 1.0).unwrap();
        r.rank_one_update(&[1.0], 1.0).unwrap();
        assert_eq!(r.v()[(0, 0)], 2.0);
        assert_eq!(r.v_inv()[(0, 0)], 0.5);
        assert_eq!(r.theta(), vec![0.5]);
        assert_eq!(r.count(), 1);
    }

    #[test]
    fn zero_vector_is_noop_on_v() {
        let mut r = RidgeState::new(2, 1.0).unwrap();
        r.rank_one_update(&[0.0, 0.0], 3.0).unwrap();
        assert_eq!(r.v(), &Matrix::identity(2));
        assert_eq!(r.b(), &[0.0, 0.0]);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let mut r = RidgeState::new(2, 1.0).unwrap();
        assert!(matches!(
            r.rank_one_update(&[1.0], 1.0),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
        assert!(RidgeState::new(2, 0.0).is_err());
    }

    #[test]
    fn mahalanobis_examples() {
        assert_eq!(mahalanobis_norm(&[1.0, 0.0], &Matrix::identity(2)), 1.0);
        assert_eq!(mahalanobis_norm(&[0.0, 0.0], &Matrix::diag(&[3.0, 4.0])), 0.0);
        let v = Matrix::diag(&[0.5, 0.25]);
        assert!((mahalanobis_norm(&[1.0, 1.0], &v) - 0.75f64.sqrt()).abs() < 1e-15);
        assert_eq!(mahalanobis_norm(&[1.0], &Matrix::diag(&[-1.0])), 0.0);
    }

    #[test]
    fn eigen_examples() {
        assert!((min_eigenvalue(&Matrix::identity(3)).unwrap() - 1.0).abs() < 1e-12);
        assert!((min_eigenvalue(&Matrix::diag(&[2.0, 0.5])).unwrap() - 0.5).abs() < 1e-12);
        let m = Matrix::from_rows(&[vec![1.0, 2.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(min_eigenvalue(&m), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn gaussian_zero_scale_returns_mean() {
        let mut rng = SeededRng::new(0);
        let mean = [0.3, -1.2];
        let out = sample_gaussian_vector(&mut rng, &mean, &Matrix::identity(2), 0.0).unwrap();
        assert_eq!(out, mean.to_vec());
    }

    #[test]
    fn gaussian_rejects_indefinite() {
        let mut rng = SeededRng::new(0);
        let cov = Matrix::diag(&[1.0, -0.5]);
        assert!(matches!(
            sample_gaussian_vector(&mut rng, &[0.0, 0.0], &cov, 1.0),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn gaussian_variance_band() {
        let mut rng = SeededRng::new(11);
        let n = 100_000;
        let scale = 0.7;
        let mut s2 = [0.0; 2];
        let mut s1 = [0.0; 2];
        for _ in 0..n {
            let x = sample_gaussian_vector(&mut rng, &[0.0, 0.0], &Matrix::identity(2), scale).unwrap();
            for i in 0..2 {
                s1[i] += x[i];
                s2[i] += x[i] * x[i];
            }
        }
        for i in 0..2 {
            let m = s1[i] / n as f64;
            let var = s2[i] / n as f64 - m * m;
            assert!((var / (scale * scale) - 1.0).abs() < 0.05, "var {var}");
        }
    }

    #[test]
    fn spd_inverse_small() {
        let m = Matrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]).unwrap();
        let inv = m.spd_inverse().unwrap();
        let prod = m.mul(&inv);
        assert!(prod.frobenius_distance(&Matrix::identity(2)) < 1e-14);
    }
}
