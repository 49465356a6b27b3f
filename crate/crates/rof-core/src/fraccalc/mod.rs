//! Fractional integral and derivative operators on sampled trajectories.
//!
//! The Riemann-Liouville integral is a convolution with the weakly singular
//! kernel g_alpha. It is evaluated by product integration: the trajectory is
//! interpolated piecewise by Lagrange polynomials of the trajectory's
//! interpolation order, and the kernel moments are integrated exactly on the
//! interval that touches the singularity while plain Gauss panels handle the
//! smooth remainder. Grids may be nonuniform (graded grids are the usual way
//! to recover full order near t = 0).
//!
//! All operations are pure transformations with per-call workspaces.

mod stencil;

pub(crate) use stencil::fornberg_weights;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::specfun::{lgamma, rgamma};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

/// Positive fractional order together with its integer ceiling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FracOrder {
    order: f64,
    ceil_m: usize,
}

impl FracOrder {
    pub fn new(order: f64) -> Result<Self> {
        if !(order > 0.0) || !order.is_finite() {
            return Err(Error::Invalid(format!(
                "fractional order must be positive, got {order}"
            )));
        }
        Ok(FracOrder {
            order,
            ceil_m: order.ceil() as usize,
        })
    }

    pub fn order(&self) -> f64 {
        self.order
    }

    /// Smallest integer >= order.
    pub fn ceil_m(&self) -> usize {
        self.ceil_m
    }

    fn is_integer(&self) -> bool {
        self.order.fract() == 0.0
    }
}

/// A sampled matrix- or vector-valued function of t on a grid starting at 0.
#[derive(Debug, Clone)]
pub struct Trajectory {
    grid: Vec<f64>,
    values: Vec<DMatrix<Complex64>>,
    interpolation_order: usize,
}

impl Trajectory {
    pub fn new(
        grid: Vec<f64>,
        values: Vec<DMatrix<Complex64>>,
        interpolation_order: usize,
    ) -> Result<Self> {
        if grid.is_empty() || grid[0] != 0.0 {
            return Err(Error::Invalid("trajectory grid must start at t = 0".into()));
        }
        if grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Invalid("trajectory grid must be strictly increasing".into()));
        }
        if values.len() != grid.len() {
            return Err(Error::Invalid(format!(
                "trajectory has {} grid points but {} values",
                grid.len(),
                values.len()
            )));
        }
        let dims = (values[0].nrows(), values[0].ncols());
        if values.iter().any(|v| (v.nrows(), v.ncols()) != dims) {
            return Err(Error::Invalid("trajectory values must share one dimension".into()));
        }
        if interpolation_order < 1 || interpolation_order > 4 {
            return Err(Error::Invalid(format!(
                "interpolation order must be in 1..=4, got {interpolation_order}"
            )));
        }
        if grid.len() < interpolation_order + 1 {
            return Err(Error::Invalid(
                "trajectory too short for its interpolation order".into(),
            ));
        }
        Ok(Trajectory {
            grid,
            values,
            interpolation_order,
        })
    }

    pub fn from_scalar_fn(
        grid: Vec<f64>,
        interpolation_order: usize,
        f: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let values = grid
            .iter()
            .map(|&t| DMatrix::from_element(1, 1, Complex64::new(f(t), 0.0)))
            .collect();
        Self::new(grid, values, interpolation_order)
    }

    pub fn from_vector_fn(
        grid: Vec<f64>,
        interpolation_order: usize,
        f: impl Fn(f64) -> DVector<Complex64>,
    ) -> Result<Self> {
        let values = grid
            .iter()
            .map(|&t| {
                let v = f(t);
                DMatrix::from_column_slice(v.len(), 1, v.as_slice())
            })
            .collect();
        Self::new(grid, values, interpolation_order)
    }

    pub fn from_matrix_fn(
        grid: Vec<f64>,
        interpolation_order: usize,
        f: impl Fn(f64) -> DMatrix<Complex64>,
    ) -> Result<Self> {
        let values = grid.iter().map(|&t| f(t)).collect();
        Self::new(grid, values, interpolation_order)
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn values(&self) -> &[DMatrix<Complex64>] {
        &self.values
    }

    pub fn value(&self, i: usize) -> &DMatrix<Complex64> {
        &self.values[i]
    }

    pub fn interpolation_order(&self) -> usize {
        self.interpolation_order
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn value_dims(&self) -> (usize, usize) {
        (self.values[0].nrows(), self.values[0].ncols())
    }

    /// Scalar payload of a 1x1 trajectory.
    pub fn scalar_at(&self, i: usize) -> Complex64 {
        self.values[i][(0, 0)]
    }

    fn zeros_value(&self) -> DMatrix<Complex64> {
        let (r, c) = self.value_dims();
        DMatrix::zeros(r, c)
    }
}

/// g_{a}(u) = u^{a-1}/Gamma(a), u > 0, via logs to dodge overflow.
fn g_val(a: f64, u: f64) -> f64 {
    if u <= 0.0 {
        0.0
    } else {
        ((a - 1.0) * u.ln() - lgamma(a)).exp()
    }
}

/// Antiderivative difference int_c^d g_a(t-s)(t-s)^k ds
///   = Gamma(a+k)/Gamma(a) [ g_{a+k+1}(t-c) - g_{a+k+1}(t-d) ].
fn kernel_moment(a: f64, k: usize, t: f64, c: f64, d: f64) -> f64 {
    let ak = a + k as f64;
    let lead = (lgamma(ak) - lgamma(a)).exp();
    let up = t - c;
    let dn = t - d;
    let g_up = if up > 0.0 {
        (ak * up.ln() - lgamma(ak + 1.0)).exp()
    } else {
        0.0
    };
    let g_dn = if dn > 0.0 {
        (ak * dn.ln() - lgamma(ak + 1.0)).exp()
    } else {
        0.0
    };
    lead * (g_up - g_dn)
}

/// Stencil window of `p + 1` grid indices around interval [t_j, t_{j+1}].
fn stencil_window(j: usize, p: usize, n: usize) -> std::ops::RangeInclusive<usize> {
    let start = (j as isize - ((p as isize - 1) / 2)).clamp(0, (n - 1 - p) as isize) as usize;
    start..=start + p
}

/// Lagrange basis values at point s for the given nodes.
fn lagrange_at(nodes: &[f64], s: f64) -> Vec<f64> {
    let mut out = vec![1.0; nodes.len()];
    for (m, w) in out.iter_mut().enumerate() {
        for (l, &xl) in nodes.iter().enumerate() {
            if l != m {
                *w *= (s - xl) / (nodes[m] - xl);
            }
        }
    }
    out
}

/// Monomial coefficients (in u) of the Lagrange basis polynomial L_m over
/// nodes expressed in the variable u: L_m(u) = prod_{l != m} (u - u_l)/(u_m - u_l).
fn lagrange_monomial(u_nodes: &[f64], m: usize) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    let mut denom = 1.0;
    for (l, &ul) in u_nodes.iter().enumerate() {
        if l == m {
            continue;
        }
        denom *= u_nodes[m] - ul;
        // multiply coeffs by (u - ul)
        let mut next = vec![0.0; coeffs.len() + 1];
        for (i, &ci) in coeffs.iter().enumerate() {
            next[i + 1] += ci;
            next[i] -= ci * ul;
        }
        coeffs = next;
    }
    for c in &mut coeffs {
        *c /= denom;
    }
    coeffs
}

/// Riemann-Liouville fractional integral (g_a * f) on the grid of f.
pub fn frac_integral(f: &Trajectory, a: &FracOrder) -> Result<Trajectory> {
    let alpha = a.order();
    let p = f.interpolation_order;
    let n = f.len();
    let grid = f.grid();
    let mut out = Vec::with_capacity(n);
    out.push(f.zeros_value());

    for i in 1..n {
        let t = grid[i];
        let mut acc = f.zeros_value();
        for j in 0..i {
            let c = grid[j];
            let d = grid[j + 1];
            let window = stencil_window(j, p, n);
            let nodes: Vec<f64> = window.clone().map(|k| grid[k]).collect();
            let idx: Vec<usize> = window.collect();
            if j + 1 == i {
                // interval touching the singularity at s = t: exact moments in
                // u = t - s, where the Lagrange nodes stay on the h-scale
                let u_nodes: Vec<f64> = nodes.iter().map(|&s| t - s).collect();
                let u_hi = t - c;
                for (m, &k_idx) in idx.iter().enumerate() {
                    let coeffs = lagrange_monomial(&u_nodes, m);
                    let mut w = 0.0;
                    for (kpow, &ck) in coeffs.iter().enumerate() {
                        // moment from u = 0 (s = t) to u = u_hi (s = c)
                        let ak = alpha + kpow as f64;
                        let moment = (lgamma(ak) - lgamma(alpha)).exp()
                            * (ak * u_hi.ln() - lgamma(ak + 1.0)).exp();
                        w += ck * moment;
                    }
                    acc += f.value(k_idx) * Complex64::new(w, 0.0);
                }
                let _ = kernel_moment; // moments handled inline above
            } else {
                // smooth panel: Gauss nodes against the interpolant
                let (gx, gw) = gauss_legendre(16);
                let mid = 0.5 * (c + d);
                let half = 0.5 * (d - c);
                let mut weights = vec![0.0; idx.len()];
                for (x, wq) in gx.iter().zip(gw.iter()) {
                    let s = mid + half * x;
                    let kernel = g_val(alpha, t - s);
                    let basis = lagrange_at(&nodes, s);
                    for (m, b) in basis.iter().enumerate() {
                        weights[m] += wq * half * kernel * b;
                    }
                }
                for (m, &k_idx) in idx.iter().enumerate() {
                    acc += f.value(k_idx) * Complex64::new(weights[m], 0.0);
                }
            }
        }
        out.push(acc);
    }
    Trajectory::new(grid.to_vec(), out, p)
}

/// m-th derivative of a trajectory by Fornberg stencils (one-sided at the ends).
fn grid_derivative(f: &Trajectory, m: usize) -> Result<Trajectory> {
    let n = f.len();
    let p = f.interpolation_order;
    let width = (m + p).min(n - 1); // stencil has width+1 points
    if width < m {
        return Err(Error::InsufficientSmoothness {
            order: p,
            required: m,
        });
    }
    let grid = f.grid();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let start = (i as isize - (width as isize / 2)).clamp(0, (n - 1 - width) as isize) as usize;
        let nodes: Vec<f64> = (start..=start + width).map(|k| grid[k]).collect();
        let w = fornberg_weights(&nodes, grid[i], m);
        let mut acc = f.zeros_value();
        for (off, wk) in w.iter().enumerate() {
            acc += f.value(start + off) * Complex64::new(*wk, 0.0);
        }
        out.push(acc);
    }
    Trajectory::new(grid.to_vec(), out, p)
}

/// Riemann-Liouville derivative (d/dt)^m I^{m-a} f.
pub fn rl_derivative(f: &Trajectory, a: &FracOrder) -> Result<Trajectory> {
    let m = a.ceil_m();
    if f.interpolation_order < m + 1 {
        return Err(Error::InsufficientSmoothness {
            order: f.interpolation_order,
            required: m + 1,
        });
    }
    if a.is_integer() {
        return grid_derivative(f, m);
    }
    let smoothed = frac_integral(f, &FracOrder::new(m as f64 - a.order())?)?;
    grid_derivative(&smoothed, m)
}

/// Values of f^(k)(0), k = 0..=upto, from one-sided stencils over the first
/// interpolation_order + 1 grid points.
pub(crate) fn derivatives_at_zero(f: &Trajectory, upto: usize) -> Result<Vec<DMatrix<Complex64>>> {
    let p = f.interpolation_order;
    let width = (p + upto).min(f.len() - 1);
    let nodes: Vec<f64> = f.grid()[..=width].to_vec();
    let mut out = Vec::with_capacity(upto + 1);
    for k in 0..=upto {
        let w = fornberg_weights(&nodes, 0.0, k);
        let mut acc = f.zeros_value();
        for (off, wk) in w.iter().enumerate() {
            acc += f.value(off) * Complex64::new(*wk, 0.0);
        }
        out.push(acc);
    }
    Ok(out)
}

/// Caputo derivative: Riemann-Liouville derivative minus the Taylor
/// correction sum_{k<m} f^(k)(0) t^{k-a}/Gamma(k-a+1). The derivatives at 0
/// are estimated from the first grid points, which is the dominant error
/// source near t = 0.
pub fn caputo_derivative(f: &Trajectory, a: &FracOrder) -> Result<Trajectory> {
    let m = a.ceil_m();
    let rl = rl_derivative(f, a)?;
    if a.is_integer() {
        return Ok(rl);
    }
    let d0 = derivatives_at_zero(f, m - 1)?;
    let grid = rl.grid().to_vec();
    let mut values = rl.values().to_vec();
    for (i, &t) in grid.iter().enumerate() {
        if i == 0 {
            // Caputo of an admissible trajectory vanishes at t = 0+ for
            // fractional order; the subtraction itself is singular there.
            values[0] = f.zeros_value();
            continue;
        }
        for (k, dk) in d0.iter().enumerate() {
            let coef = rgamma(k as f64 - a.order() + 1.0) * t.powf(k as f64 - a.order());
            values[i] -= dk * Complex64::new(coef, 0.0);
        }
    }
    Trajectory::new(grid, values, f.interpolation_order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn uniform_grid(t1: f64, n: usize) -> Vec<f64> {
        (0..n).map(|i| t1 * i as f64 / (n - 1) as f64).collect()
    }

    fn graded_grid(t1: f64, n: usize, q: f64) -> Vec<f64> {
        (0..n)
            .map(|i| t1 * ((i as f64 / (n - 1) as f64).powf(q)))
            .collect()
    }

    #[test]
    fn integral_of_one_is_t() {
        let f = Trajectory::from_scalar_fn(uniform_grid(10.0, 101), 1, |_| 1.0).unwrap();
        let g = frac_integral(&f, &FracOrder::new(1.0).unwrap()).unwrap();
        for (i, &t) in g.grid().iter().enumerate() {
            assert_relative_eq!(g.scalar_at(i).re, t, max_relative = 1e-11, epsilon = 1e-12);
        }
    }

    #[test]
    fn half_integral_of_one() {
        // I^{1/2} 1 = 2 sqrt(t/pi), max rel err <= 1e-6 on a 1000-point grid
        let f = Trajectory::from_scalar_fn(uniform_grid(10.0, 1000), 2, |_| 1.0).unwrap();
        let g = frac_integral(&f, &FracOrder::new(0.5).unwrap()).unwrap();
        let mut worst: f64 = 0.0;
        for (i, &t) in g.grid().iter().enumerate().skip(1) {
            let expect = 2.0 * (t / PI).sqrt();
            worst = worst.max((g.scalar_at(i).re - expect).abs() / expect);
        }
        assert!(worst <= 1e-6, "worst rel err {worst}");
    }

    #[test]
    fn half_integral_of_t() {
        // I^{1/2} t = t^{3/2}/Gamma(5/2)
        let f = Trajectory::from_scalar_fn(uniform_grid(5.0, 400), 2, |t| t).unwrap();
        let g = frac_integral(&f, &FracOrder::new(0.5).unwrap()).unwrap();
        let gamma_52 = 1.329_340_388_179_137_0; // Gamma(5/2)
        for (i, &t) in g.grid().iter().enumerate().skip(1) {
            let expect = t.powf(1.5) / gamma_52;
            assert_relative_eq!(g.scalar_at(i).re, expect, max_relative = 1e-7, epsilon = 1e-10);
        }
    }

    #[test]
    fn rl_derivative_of_t_is_one() {
        let f = Trajectory::from_scalar_fn(uniform_grid(4.0, 200), 2, |t| t).unwrap();
        let d = rl_derivative(&f, &FracOrder::new(1.0).unwrap()).unwrap();
        for i in 0..d.len() {
            assert_relative_eq!(d.scalar_at(i).re, 1.0, max_relative = 1e-9);
        }
    }

    #[test]
    fn rl_half_derivative_of_one() {
        // D^{1/2} 1 = t^{-1/2}/Gamma(1/2), interior rel err <= 1e-4
        let f = Trajectory::from_scalar_fn(graded_grid(4.0, 800, 2.0), 3, |_| 1.0).unwrap();
        let d = rl_derivative(&f, &FracOrder::new(0.5).unwrap()).unwrap();
        for (i, &t) in d.grid().iter().enumerate() {
            if t < 0.05 || t > 3.9 {
                continue;
            }
            let expect = t.powf(-0.5) / PI.sqrt();
            assert_relative_eq!(d.scalar_at(i).re, expect, max_relative = 1e-4);
        }
    }

    #[test]
    fn rl_derivative_semigroup_identity() {
        // D^a g_{a+1} = g_1 = 1 at interior nodes (a = 0.5)
        let a = 0.5;
        let f = Trajectory::from_scalar_fn(graded_grid(2.0, 600, 2.0), 3, |t| {
            if t > 0.0 {
                t.powf(a) / 1.329_340_388_179_137_0 * 1.5
            } else {
                0.0
            }
        })
        .unwrap();
        // g_{1.5}(t) = t^{0.5}/Gamma(1.5); Gamma(1.5) = 0.8862269254527580
        let f = Trajectory::from_scalar_fn(f.grid().to_vec(), 3, |t| {
            if t > 0.0 {
                t.powf(0.5) / 0.886_226_925_452_758_0
            } else {
                0.0
            }
        })
        .unwrap();
        let d = rl_derivative(&f, &FracOrder::new(0.5).unwrap()).unwrap();
        for (i, &t) in d.grid().iter().enumerate() {
            if t < 0.1 {
                continue;
            }
            assert_relative_eq!(d.scalar_at(i).re, 1.0, max_relative = 2e-4);
        }
    }

    #[test]
    fn caputo_kills_constants() {
        // The derivative of the weakly singular I^{m-a} of a constant cannot
        // be resolved by stencils right at t = 0; interior nodes are the
        // meaningful check.
        let f = Trajectory::from_scalar_fn(graded_grid(3.0, 400, 2.0), 2, |_| 4.2).unwrap();
        let d = caputo_derivative(&f, &FracOrder::new(0.7).unwrap()).unwrap();
        for (i, &t) in d.grid().iter().enumerate() {
            if t < 0.1 {
                continue;
            }
            // bound relative to the size of the cancelled singular terms
            let scale = 1.0 + t.powf(-0.7);
            assert!(
                d.scalar_at(i).re.abs() < 3e-5 * scale,
                "t={t}: value {}",
                d.scalar_at(i).re
            );
        }
    }

    #[test]
    fn caputo_of_t_order_half() {
        // Caputo^{1/2} t = 2 sqrt(t/pi)
        let f = Trajectory::from_scalar_fn(graded_grid(4.0, 600, 2.0), 2, |t| t).unwrap();
        let d = caputo_derivative(&f, &FracOrder::new(0.5).unwrap()).unwrap();
        for (i, &t) in d.grid().iter().enumerate() {
            if t < 0.05 {
                continue;
            }
            let expect = 2.0 * (t / PI).sqrt();
            assert_relative_eq!(d.scalar_at(i).re, expect, max_relative = 2e-4);
        }
    }

    #[test]
    fn caputo_of_t_squared_order_1_5() {
        // Caputo^{1.5} t^2 = I^{0.5} 2 = 2 t^{0.5}/Gamma(1.5)
        let f = Trajectory::from_scalar_fn(graded_grid(2.0, 800, 2.5), 3, |t| t * t).unwrap();
        let d = caputo_derivative(&f, &FracOrder::new(1.5).unwrap()).unwrap();
        for (i, &t) in d.grid().iter().enumerate() {
            if t < 0.08 || t > 1.9 {
                continue;
            }
            let expect = 2.0 * t.powf(0.5) / 0.886_226_925_452_758_0;
            assert_relative_eq!(d.scalar_at(i).re, expect, max_relative = 2e-3);
        }
    }

    #[test]
    fn composition_law() {
        // I^a I^b f = I^{a+b} f
        let f = Trajectory::from_scalar_fn(uniform_grid(3.0, 300), 2, |t| (1.0 + t).ln()).unwrap();
        let a = FracOrder::new(0.6).unwrap();
        let b = FracOrder::new(0.9).unwrap();
        let ab = FracOrder::new(1.5).unwrap();
        let lhs = frac_integral(&frac_integral(&f, &a).unwrap(), &b).unwrap();
        let rhs = frac_integral(&f, &ab).unwrap();
        for i in 0..f.len() {
            assert!(
                (lhs.scalar_at(i) - rhs.scalar_at(i)).norm() < 2e-6,
                "at t={}: {} vs {}",
                f.grid()[i],
                lhs.scalar_at(i),
                rhs.scalar_at(i)
            );
        }
    }

    #[test]
    fn left_inverse_on_vanishing_data() {
        // Caputo^a I^a f = f when f(0) = 0
        let f = Trajectory::from_scalar_fn(graded_grid(2.0, 500, 2.0), 2, |t| t * (1.0 + t)).unwrap();
        let a = FracOrder::new(0.7).unwrap();
        let round = caputo_derivative(&frac_integral(&f, &a).unwrap(), &a).unwrap();
        for (i, &t) in round.grid().iter().enumerate() {
            if t < 0.05 {
                continue;
            }
            let expect = t * (1.0 + t);
            assert_relative_eq!(round.scalar_at(i).re, expect, max_relative = 5e-4);
        }
    }

    #[test]
    fn linearity_exact() {
        let grid = uniform_grid(2.0, 60);
        let f = Trajectory::from_scalar_fn(grid.clone(), 2, |t| t.sin()).unwrap();
        let g = Trajectory::from_scalar_fn(grid.clone(), 2, |t| (0.5 * t).cos()).unwrap();
        let combo = Trajectory::from_scalar_fn(grid, 2, |t| 2.0 * t.sin() - 3.0 * (0.5 * t).cos())
            .unwrap();
        let a = FracOrder::new(0.8).unwrap();
        let fa = frac_integral(&f, &a).unwrap();
        let ga = frac_integral(&g, &a).unwrap();
        let ca = frac_integral(&combo, &a).unwrap();
        for i in 0..fa.len() {
            let lin = 2.0 * fa.scalar_at(i).re - 3.0 * ga.scalar_at(i).re;
            assert_relative_eq!(ca.scalar_at(i).re, lin, max_relative = 1e-11, epsilon = 1e-12);
        }
    }

    #[test]
    fn insufficient_smoothness_rejected() {
        let f = Trajectory::from_scalar_fn(uniform_grid(1.0, 50), 1, |t| t).unwrap();
        let r = rl_derivative(&f, &FracOrder::new(1.5).unwrap());
        assert!(matches!(r, Err(Error::InsufficientSmoothness { .. })));
    }

    #[test]
    fn grid_validation() {
        assert!(Trajectory::from_scalar_fn(vec![0.5, 1.0], 1, |_| 0.0).is_err());
        assert!(Trajectory::from_scalar_fn(vec![0.0, 1.0, 1.0], 1, |_| 0.0).is_err());
    }

    #[test]
    fn g_kernel_semigroup_under_refinement() {
        // convolution of sampled g_a with g_b approaches g_{a+b}
        let a = 1.3;
        let b = 1.7;
        let mut errs = Vec::new();
        for &n in &[100usize, 200, 400] {
            let f = Trajectory::from_scalar_fn(graded_grid(2.0, n, 2.0), 2, |t| {
                crate::specfun::g_kernel(b, t).unwrap()
            })
            .unwrap();
            let g = frac_integral(&f, &FracOrder::new(a).unwrap()).unwrap();
            let t = 2.0;
            let expect = crate::specfun::g_kernel(a + b, t).unwrap();
            errs.push((g.scalar_at(n - 1).re - expect).abs() / expect);
        }
        assert!(errs[2] < errs[0], "no refinement: {errs:?}");
        assert!(errs[2] < 1e-6, "final error too large: {errs:?}");
    }
}
