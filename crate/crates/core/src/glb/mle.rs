use crate::error::{Error, Result};
use crate::linalg::{check_dim, dot, norm, Matrix};

use super::Link;

/// Ridge jitter that keeps the Hessian positive definite on degenerate data.
pub const MLE_JITTER: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct MleOptions {
    pub ridge: f64,
    pub tol: f64,
    pub max_iter: usize,
    pub init: Option<Vec<f64>>,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            ridge: MLE_JITTER,
            tol: 1e-8,
            max_iter: 100,
            init: None,
        }
    }
}

fn log_likelihood(data: &[(Vec<f64>, f64)], link: Link, ridge: f64, theta: &[f64]) -> f64 {
    let ll: f64 = data
        .iter()
        .map(|(x, y)| {
            let z = dot(x, theta);
            match link {
                Link::Identity => -(y - z) * (y - z) / 2.0,
                // y z - ln(1 + e^z), evaluated stably
                Link::Logistic => y * z - (z.max(0.0) + (-z.abs()).exp().ln_1p()),
            }
        })
        .sum();
    ll - ridge / 2.0 * dot(theta, theta)
}

/// Gradient of the ridge-penalized log-likelihood:
/// `sum (y - mu(x^T theta)) x - ridge theta`.
pub fn mle_gradient(data: &[(Vec<f64>, f64)], link: Link, ridge: f64, theta: &[f64]) -> Vec<f64> {
    let mut g: Vec<f64> = theta.iter().map(|t| -ridge * t).collect();
    for (x, y) in data {
        let r = y - link.mean(dot(x, theta));
        for (gi, xi) in g.iter_mut().zip(x) {
            *gi += r * xi;
        }
    }
    g
}

/// Maximum-likelihood estimate of a GLM with ridge jitter [`MLE_JITTER`].
pub fn glm_mle_newton(data: &[(Vec<f64>, f64)], link: Link, tol: f64) -> Result<Vec<f64>> {
    glm_mle_newton_with(
        data,
        link,
        &MleOptions {
            tol,
            ..MleOptions::default()
        },
    )
}

/// Damped Newton ascent on the penalized log-likelihood. Stops once the
/// gradient norm is at most `opts.tol * sqrt(1 + n)` for `n` observations.
pub fn glm_mle_newton_with(
    data: &[(Vec<f64>, f64)],
    link: Link,
    opts: &MleOptions,
) -> Result<Vec<f64>> {
    let dim = match (&opts.init, data.first()) {
        (Some(init), _) => init.len(),
        (None, Some((x, _))) => x.len(),
        (None, None) => return Err(crate::error::contract("MLE needs data or an initial point")),
    };
    for (x, _) in data {
        check_dim(dim, x.len())?;
    }
    let mut theta = opts.init.clone().unwrap_or_else(|| vec![0.0; dim]);
    let mut grad = mle_gradient(data, link, opts.ridge, &theta);
    let mut ll = log_likelihood(data, link, opts.ridge, &theta);
    // the gradient is a sum over observations, so roundoff grows with n
    let tol = opts.tol * (1.0 + data.len() as f64).sqrt();
    for _ in 0..opts.max_iter {
        if norm(&grad) <= tol {
            return Ok(theta);
        }
        let mut h = Matrix::scaled_identity(dim, opts.ridge);
        for (x, _) in data {
            let w = link.derivative(dot(x, &theta));
            for i in 0..dim {
                for j in 0..dim {
                    h[(i, j)] += w * x[i] * x[j];
                }
            }
        }
        let step = h.spd_inverse()?.mul_vec(&grad);
        // near the optimum likelihood gains fall below summation roundoff
        let slack = 64.0 * f64::EPSILON * (data.len() as f64 + ll.abs());
        let mut t = 1.0;
        loop {
            let cand: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            let cand_ll = log_likelihood(data, link, opts.ridge, &cand);
            if cand_ll >= ll - slack || t < 1e-10 {
                theta = cand;
                ll = cand_ll;
                break;
            }
            t *= 0.5;
        }
        grad = mle_gradient(data, link, opts.ridge, &theta);
    }
    let grad_norm = norm(&grad);
    if grad_norm <= tol {
        return Ok(theta);
    }
    Err(Error::NonConvergence {
        iterations: opts.max_iter,
        grad_norm,
        last: theta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn repeat(x: &[f64], y: f64, n: usize) -> Vec<(Vec<f64>, f64)> {
        (0..n).map(|_| (x.to_vec(), y)).collect()
    }

    #[test]
    fn balanced_logistic_is_zero() {
        let mut data = repeat(&[1.0], 1.0, 5);
        data.extend(repeat(&[1.0], 0.0, 5));
        let th = glm_mle_newton(&data, Link::Logistic, 1e-10).unwrap();
        assert!(th[0].abs() < 1e-10);
    }

    #[test]
    fn three_to_one_odds() {
        let mut data = repeat(&[1.0], 1.0, 3);
        data.push((vec![1.0], 0.0));
        let th = glm_mle_newton(&data, Link::Logistic, 1e-12).unwrap();
        // bisection on the jittered score equation 3 - 4 sigmoid(t) - jitter t = 0
        let score = |t: f64| 3.0 - 4.0 * super::super::sigmoid(t) - MLE_JITTER * t;
        let (mut lo, mut hi) = (0.0, 5.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if score(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        assert!((th[0] - lo).abs() < 1e-9);
        assert!((th[0] - 3f64.ln()).abs() < 1e-5);
    }

    #[test]
    fn empty_data_without_init_is_error() {
        assert!(glm_mle_newton(&[], Link::Identity, 1e-8).is_err());
    }

    #[test]
    fn iteration_cap_reports_last_iterate() {
        let data = repeat(&[1.0], 1.0, 4);
        let opts = MleOptions {
            max_iter: 1,
            tol: 1e-14,
            ..MleOptions::default()
        };
        match glm_mle_newton_with(&data, Link::Logistic, &opts) {
            Err(Error::NonConvergence { iterations, last, .. }) => {
                assert_eq!(iterations, 1);
                assert_eq!(last.len(), 1);
            }
            other => panic!("expected non-convergence, got {other:?}"),
        }
    }
}
