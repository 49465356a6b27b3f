//! Shared quadrature machinery: Gauss-Legendre rules (Golub-Welsch), an
//! adaptive panel integrator generic over the value type, Wynn's epsilon
//! acceleration for oscillatory panel sums, and the upper incomplete gamma
//! used by exponential tail estimates.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use once_cell::sync::Lazy;

/// Values an integrator can accumulate.
pub trait QuadValue: Clone {
    fn zeros_like(&self) -> Self;
    fn axpy_in(&mut self, w: f64, other: &Self);
    fn norm(&self) -> f64;
    fn sub(&self, other: &Self) -> Self;
}

impl QuadValue for f64 {
    fn zeros_like(&self) -> Self {
        0.0
    }
    fn axpy_in(&mut self, w: f64, other: &Self) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl QuadValue for Complex64 {
    fn zeros_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn axpy_in(&mut self, w: f64, other: &Self) {
        *self += w * other;
    }
    fn norm(&self) -> f64 {
        Complex64::norm(*self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl QuadValue for DVector<Complex64> {
    fn zeros_like(&self) -> Self {
        DVector::zeros(self.len())
    }
    fn axpy_in(&mut self, w: f64, other: &Self) {
        self.axpy(Complex64::new(w, 0.0), other, Complex64::new(1.0, 0.0));
    }
    fn norm(&self) -> f64 {
        nalgebra::DVector::norm(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

impl QuadValue for DMatrix<Complex64> {
    fn zeros_like(&self) -> Self {
        DMatrix::zeros(self.nrows(), self.ncols())
    }
    fn axpy_in(&mut self, w: f64, other: &Self) {
        *self += other * Complex64::new(w, 0.0);
    }
    fn norm(&self) -> f64 {
        nalgebra::DMatrix::norm(self)
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Golub-Welsch.
fn golub_welsch(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4.0 * (k * k) as f64 - 1.0).sqrt());
        jac[(k - 1, k)] = b;
        jac[(k, k - 1)] = b;
    }
    let eig = nalgebra::SymmetricEigen::new(jac);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let w = 2.0 * eig.eigenvectors[(0, i)].powi(2);
            (node, w)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

static GL8: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| golub_welsch(8));
static GL16: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| golub_welsch(16));
static GL32: Lazy<(Vec<f64>, Vec<f64>)> = Lazy::new(|| golub_welsch(32));

/// Shared Gauss-Legendre rule of size 8, 16 or 32.
pub fn gauss_legendre(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    match n {
        8 => &GL8,
        16 => &GL16,
        32 => &GL32,
        _ => panic!("unsupported Gauss-Legendre size {n}"),
    }
}

/// One Gauss-Legendre panel over [a, b].
pub fn gl_panel<T: QuadValue>(f: &mut impl FnMut(f64) -> T, a: f64, b: f64, n: usize) -> T {
    let (nodes, weights) = gauss_legendre(n);
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc: Option<T> = None;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        let v = f(mid + half * x);
        match &mut acc {
            None => {
                let mut z = v.zeros_like();
                z.axpy_in(w * half, &v);
                acc = Some(z);
            }
            Some(accv) => accv.axpy_in(w * half, &v),
        }
    }
    acc.expect("nonempty rule")
}

/// Adaptive bisection integrator on [a, b]. Returns (value, error estimate).
/// Per-interval error is measured as |GL16(whole) - GL16(left)-GL16(right)|.
pub fn integrate_adaptive<T: QuadValue>(
    f: &mut impl FnMut(f64) -> T,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_depth: usize,
) -> (T, f64) {
    struct Item {
        a: f64,
        b: f64,
        depth: usize,
    }
    let whole = gl_panel(f, a, b, 16);
    let mut total = whole.zeros_like();
    let mut err = 0.0;
    let mut stack = vec![Item { a, b, depth: 0 }];
    let scale_hint = whole.norm();
    while let Some(it) = stack.pop() {
        let coarse = gl_panel(f, it.a, it.b, 16);
        let m = 0.5 * (it.a + it.b);
        let mut fine = gl_panel(f, it.a, m, 16);
        let right = gl_panel(f, m, it.b, 16);
        fine.axpy_in(1.0, &right);
        let diff = coarse.sub(&fine).norm();
        let tol_here =
            (abs_tol + rel_tol * scale_hint) * ((it.b - it.a) / (b - a)).max(1e-3);
        if diff <= tol_here || it.depth >= max_depth {
            total.axpy_in(1.0, &fine);
            err += diff;
        } else {
            stack.push(Item {
                a: it.a,
                b: m,
                depth: it.depth + 1,
            });
            stack.push(Item {
                a: m,
                b: it.b,
                depth: it.depth + 1,
            });
        }
    }
    (total, err)
}

/// Wynn's epsilon algorithm on a sequence of partial sums. Returns the best
/// even-column estimate and a crude error gauge (distance between the last
/// two estimates). Componentwise application is adequate for the oscillatory
/// panel sums in this crate.
pub fn wynn_epsilon(partial: &[Complex64]) -> (Complex64, f64) {
    let n = partial.len();
    assert!(n >= 3);
    let mut cur: Vec<Complex64> = partial.to_vec();
    let mut prev_col: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); n + 1];
    let mut best = *partial.last().unwrap();
    let mut prev_best = best;
    for _k in 1..n {
        let mut next = Vec::with_capacity(cur.len().saturating_sub(1));
        for i in 0..cur.len() - 1 {
            let denom = cur[i + 1] - cur[i];
            let inv = if denom.norm() < 1e-300 {
                Complex64::new(1e300, 0.0)
            } else {
                1.0 / denom
            };
            next.push(prev_col[i + 1] + inv);
        }
        prev_col = std::mem::take(&mut cur);
        cur = next;
        if _k % 2 == 0 && !cur.is_empty() {
            prev_best = best;
            best = *cur.last().unwrap();
        }
        if cur.len() < 2 {
            break;
        }
    }
    (best, (best - prev_best).norm())
}

/// Upper incomplete gamma Gamma(a, x) for a > 0, x >= 0.
pub fn upper_incomplete_gamma(a: f64, x: f64) -> f64 {
    use crate::specfun::lgamma;
    if x <= 0.0 {
        return lgamma(a).exp();
    }
    if x < a + 1.0 {
        // complement of the lower series
        let mut term = 1.0 / a;
        let mut sum = term;
        for n in 1..500 {
            term *= x / (a + n as f64);
            sum += term;
            if term.abs() < 1e-16 * sum.abs() {
                break;
            }
        }
        let lower = sum * (a * x.ln() - x).exp();
        (lgamma(a).exp() - lower).max(0.0)
    } else {
        // Lentz continued fraction
        let mut f = x + 1.0 - a;
        if f.abs() < 1e-30 {
            f = 1e-30;
        }
        let mut c = f;
        let mut d = 0.0;
        for i in 1..500 {
            let an = i as f64 * (a - i as f64);
            let bn = x + 2.0 * i as f64 + 1.0 - a;
            d = bn + an * d;
            if d.abs() < 1e-30 {
                d = 1e-30;
            }
            c = bn + an / c;
            if c.abs() < 1e-30 {
                c = 1e-30;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-15 {
                break;
            }
        }
        (a * x.ln() - x).exp() / f
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gl_rules_integrate_polynomials_exactly() {
        for &n in &[8usize, 16, 32] {
            let deg = 2 * n - 1;
            let mut f = |x: f64| x.powi(deg as i32 - 2) + 3.0 * x * x;
            let v = gl_panel(&mut f, -1.0, 1.0, n);
            // odd power integrates to zero over symmetric interval
            assert_relative_eq!(v, 2.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn adaptive_handles_peaks() {
        let mut f = |x: f64| 1.0 / ((x - 0.3).powi(2) + 1e-4);
        let (v, err) = integrate_adaptive(&mut f, 0.0, 1.0, 1e-12, 1e-12, 40);
        let exact = 100.0 * ((0.7_f64 / 0.01).atan() + (0.3_f64 / 0.01).atan());
        assert_relative_eq!(v, exact, max_relative = 1e-10);
        assert!(err < 1e-6 * exact);
    }

    #[test]
    fn epsilon_accelerates_alternating_series() {
        // log(2) = sum (-1)^{k+1}/k, very slowly
        let mut s = 0.0;
        let partial: Vec<Complex64> = (1..=16)
            .map(|k| {
                s += if k % 2 == 1 { 1.0 / k as f64 } else { -1.0 / k as f64 };
                Complex64::new(s, 0.0)
            })
            .collect();
        let (v, est) = wynn_epsilon(&partial);
        assert_relative_eq!(v.re, std::f64::consts::LN_2, max_relative = 1e-10);
        assert!(est < 1e-8);
    }

    #[test]
    fn incomplete_gamma_values() {
        // Gamma(1, x) = e^{-x}
        assert_relative_eq!(upper_incomplete_gamma(1.0, 2.3), (-2.3_f64).exp(), max_relative = 1e-12);
        // Gamma(2, x) = (x+1) e^{-x}
        assert_relative_eq!(
            upper_incomplete_gamma(2.0, 5.0),
            6.0 * (-5.0_f64).exp(),
            max_relative = 1e-12
        );
        // Gamma(0.5, 0) = sqrt(pi)
        assert_relative_eq!(
            upper_incomplete_gamma(0.5, 0.0),
            std::f64::consts::PI.sqrt(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn vector_valued_adaptive() {
        let mut f = |x: f64| {
            DVector::from_vec(vec![
                Complex64::new(x.cos(), 0.0),
                Complex64::new(x.sin(), x),
            ])
        };
        let (v, _) = integrate_adaptive(&mut f, 0.0, 1.0, 1e-12, 1e-12, 30);
        assert_relative_eq!(v[0].re, 1.0_f64.sin(), max_relative = 1e-11);
        assert_relative_eq!(v[1].re, 1.0 - 1.0_f64.cos(), max_relative = 1e-11);
        assert_relative_eq!(v[1].im, 0.5, max_relative = 1e-11);
    }
}
