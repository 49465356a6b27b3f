//! Matrix Mittag-Leffler series sum_k M^k arg^k / Gamma(alpha k + beta).
//!
//! Plain power iteration with Kahan-compensated accumulation; no
//! eigendecomposition, so Jordan blocks are handled as-is. The growth of the
//! terms is bounded up front from a norm estimate of arg*M, and the realized
//! cancellation is checked after summing.

use super::gamma::rgamma;
use super::mittag_leffler::MLParams;
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

const MAX_TERMS: usize = 1200;
/// nats of term growth the f64 accumulator may lose while keeping ~1e-9.
const GROWTH_BUDGET_NATS: f64 = 16.5;
/// decimal digits of realized cancellation beyond which the sum is rejected.
const CANCEL_DIGITS: f64 = 5.5;

fn kahan_add(sum: &mut [Complex64], comp: &mut [Complex64], term: &[Complex64]) {
    for ((s, c), t) in sum.iter_mut().zip(comp.iter_mut()).zip(term.iter()) {
        let y = *t - *c;
        let new = *s + y;
        *c = (new - *s) - y;
        *s = new;
    }
}

/// sum_k M^k arg^k / Gamma(alpha k + beta); beta = 0 is allowed internally
/// (the k = 0 term then vanishes through 1/Gamma(0) = 0).
pub(crate) fn ml_matrix_series_raw(
    alpha: f64,
    beta: f64,
    m: &DMatrix<Complex64>,
    arg: Complex64,
) -> Result<DMatrix<Complex64>> {
    if !m.is_square() {
        return Err(Error::Invalid("matrix Mittag-Leffler needs a square matrix".into()));
    }
    let n = m.nrows();
    let b = m * arg;
    let growth = b.norm().powf(1.0 / alpha);
    if growth > GROWTH_BUDGET_NATS {
        return Err(Error::SeriesBudget {
            budget: MAX_TERMS,
            context: format!(
                "matrix Mittag-Leffler series would cancel ~e^{growth:.1}; use the Laplace-inversion backend"
            ),
        });
    }
    let mut power = DMatrix::<Complex64>::identity(n, n);
    let mut sum = &power * Complex64::new(rgamma(beta), 0.0);
    let mut comp = DMatrix::<Complex64>::zeros(n, n);
    let mut max_norm = sum.norm();
    let mut below = 0usize;
    for k in 1..MAX_TERMS {
        power = &power * &b;
        let c = rgamma(alpha * k as f64 + beta);
        if c == 0.0 && alpha * k as f64 + beta > 170.0 {
            below = 3;
        }
        let term = &power * Complex64::new(c, 0.0);
        let tn = term.norm();
        max_norm = max_norm.max(tn);
        kahan_add(sum.as_mut_slice(), comp.as_mut_slice(), term.as_slice());
        if tn < 1e-18 * sum.norm().max(1e-300) {
            below += 1;
        } else {
            below = 0;
        }
        if below >= 3 {
            let lost = (max_norm / sum.norm().max(1e-300)).log10();
            if lost > CANCEL_DIGITS {
                return Err(Error::PrecisionLoss {
                    context: format!("matrix Mittag-Leffler cancellation, alpha={alpha} beta={beta}"),
                    lost_digits: lost,
                });
            }
            return Ok(sum);
        }
    }
    Err(Error::SeriesBudget {
        budget: MAX_TERMS,
        context: format!("matrix Mittag-Leffler series alpha={alpha} beta={beta}"),
    })
}

/// Vector-applied variant sum_k M^k x arg^k / Gamma(alpha k + beta); O(n^2)
/// per term instead of O(n^3).
pub(crate) fn ml_matrix_apply_raw(
    alpha: f64,
    beta: f64,
    m: &DMatrix<Complex64>,
    arg: Complex64,
    x: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    if !m.is_square() || m.nrows() != x.len() {
        return Err(Error::Invalid("matrix/vector dimensions mismatch".into()));
    }
    let b = m * arg;
    let growth = b.norm().powf(1.0 / alpha);
    if growth > GROWTH_BUDGET_NATS {
        return Err(Error::SeriesBudget {
            budget: MAX_TERMS,
            context: format!(
                "matrix Mittag-Leffler apply would cancel ~e^{growth:.1}; use the Laplace-inversion backend"
            ),
        });
    }
    let mut power = x.clone();
    let mut sum = &power * Complex64::new(rgamma(beta), 0.0);
    let mut comp = DVector::<Complex64>::zeros(x.len());
    let mut max_norm = sum.norm();
    let mut below = 0usize;
    for k in 1..MAX_TERMS {
        power = &b * &power;
        let c = rgamma(alpha * k as f64 + beta);
        if c == 0.0 && alpha * k as f64 + beta > 170.0 {
            below = 3;
        }
        let term = &power * Complex64::new(c, 0.0);
        let tn = term.norm();
        max_norm = max_norm.max(tn);
        kahan_add(sum.as_mut_slice(), comp.as_mut_slice(), term.as_slice());
        if tn < 1e-18 * sum.norm().max(1e-300) {
            below += 1;
        } else {
            below = 0;
        }
        if below >= 3 {
            let lost = (max_norm / sum.norm().max(1e-300)).log10();
            if lost > CANCEL_DIGITS {
                return Err(Error::PrecisionLoss {
                    context: format!("matrix Mittag-Leffler cancellation, alpha={alpha} beta={beta}"),
                    lost_digits: lost,
                });
            }
            return Ok(sum);
        }
    }
    Err(Error::SeriesBudget {
        budget: MAX_TERMS,
        context: format!("matrix Mittag-Leffler apply alpha={alpha} beta={beta}"),
    })
}

/// sum_k M^k c_k, c_k = arg^k / Gamma(alpha k + beta).
pub fn mittag_leffler_matrix(
    p: &MLParams,
    m: &DMatrix<Complex64>,
    arg: Complex64,
) -> Result<DMatrix<Complex64>> {
    ml_matrix_series_raw(p.alpha(), p.beta(), m, arg)
}

/// The same series applied to a vector.
pub fn mittag_leffler_matrix_apply(
    p: &MLParams,
    m: &DMatrix<Complex64>,
    arg: Complex64,
    x: &DVector<Complex64>,
) -> Result<DVector<Complex64>> {
    ml_matrix_apply_raw(p.alpha(), p.beta(), m, arg, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::mittag_leffler;
    use approx::assert_relative_eq;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn zero_matrix_gives_rgamma_beta_identity() {
        let p = MLParams::new(0.7, 1.3).unwrap();
        let m = DMatrix::<Complex64>::zeros(2, 2);
        let r = mittag_leffler_matrix(&p, &m, c(2.0)).unwrap();
        let expected = rgamma(1.3);
        assert_relative_eq!(r[(0, 0)].re, expected, max_relative = 1e-14);
        assert_relative_eq!(r[(1, 1)].re, expected, max_relative = 1e-14);
        assert_eq!(r[(0, 1)], c(0.0));
    }

    #[test]
    fn diagonal_exponential() {
        let p = MLParams::new(1.0, 1.0).unwrap();
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0), c(-2.0)]));
        for &t in &[0.5, 1.5, 2.4] {
            let r = mittag_leffler_matrix(&p, &m, c(t)).unwrap();
            assert_relative_eq!(r[(0, 0)].re, (-t).exp(), max_relative = 1e-11);
            assert_relative_eq!(r[(1, 1)].re, (-2.0 * t).exp(), max_relative = 1e-8);
        }
    }

    #[test]
    fn diagonalizable_matches_scalar_eigenpath() {
        // M = V diag(-0.5, -2) V^{-1}
        let v = DMatrix::from_row_slice(2, 2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        let vinv = DMatrix::from_row_slice(2, 2, &[c(1.0), c(-1.0), c(0.0), c(1.0)]);
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![c(-0.5), c(-2.0)]));
        let m = &v * &d * &vinv;
        let p = MLParams::new(0.8, 1.4).unwrap();
        let arg = c(1.7);
        let got = mittag_leffler_matrix(&p, &m, arg).unwrap();
        let e1 = mittag_leffler(&p, arg * -0.5).unwrap();
        let e2 = mittag_leffler(&p, arg * -2.0).unwrap();
        let expected = &v * DMatrix::from_diagonal(&DVector::from_vec(vec![e1, e2])) * &vinv;
        assert!((got - expected).norm() < 1e-9);
    }

    #[test]
    fn apply_consistent_with_full_matrix() {
        let m = DMatrix::from_row_slice(2, 2, &[c(-1.0), c(1.0), c(0.0), c(-1.0)]);
        let p = MLParams::new(0.5, 1.0).unwrap();
        let x = DVector::from_vec(vec![c(0.3), c(-0.9)]);
        let arg = c(1.2);
        let full = mittag_leffler_matrix(&p, &m, arg).unwrap() * &x;
        let fast = mittag_leffler_matrix_apply(&p, &m, arg, &x).unwrap();
        assert!((full - fast).norm() < 1e-12);
    }

    #[test]
    fn growth_guard_triggers() {
        let p = MLParams::new(1.0, 1.0).unwrap();
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![c(-40.0)]));
        let r = mittag_leffler_matrix(&p, &m, c(10.0));
        assert!(matches!(r, Err(Error::SeriesBudget { .. })));
    }
}
