//! Construction and evaluation of (alpha,beta)-integrated resolvent operator
//! functions R_{alpha,beta}(t) for matrix generators.
//!
//! Two evaluation backends are kept deliberately independent so they can
//! cross-check each other: the Mittag-Leffler matrix power series (with a
//! Schur-Parlett continuation once the series would cancel catastrophically)
//! and numerical Laplace inversion of lambda^{alpha-beta-1}(lambda^alpha-A)^{-1}
//! on a parabolic Bromwich contour.
//!
//! A family is immutable after construction except for the cached tempered
//! bound, which is written once.

mod contour;
mod parlett;

use crate::error::{Error, Result};
use crate::fraccalc::{caputo_derivative, derivatives_at_zero, FracOrder, Trajectory};
use crate::specfun::ml_eval;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use once_cell::sync::OnceCell;
use std::path::Path;

/// Relative rank tolerance for the injectivity certificate.
const RANK_TOL: f64 = 1e-10;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Dense square complex matrix standing in for the closed operator, with
/// cached spectral metadata (singular values, eigenvalues, Schur form).
#[derive(Debug, Clone)]
pub struct GeneratorMatrix {
    entries: DMatrix<Complex64>,
    sigma_max: f64,
    sigma_min: f64,
    eigenvalues: Vec<Complex64>,
    schur: (DMatrix<Complex64>, DMatrix<Complex64>),
}

impl GeneratorMatrix {
    pub fn new(entries: DMatrix<Complex64>) -> Result<Self> {
        if !entries.is_square() || entries.is_empty() {
            return Err(Error::Invalid("generator must be a nonempty square matrix".into()));
        }
        if entries.iter().any(|e| !e.is_finite()) {
            return Err(Error::Invalid("generator entries must be finite".into()));
        }
        let svd = entries.clone().svd(false, false);
        let sigma_max = svd.singular_values.max();
        let sigma_min = svd.singular_values.min();
        // nalgebra's QR iteration stalls on matrices that are already
        // triangular (zero, diagonal, Jordan); those are their own Schur form.
        let n = entries.nrows();
        let is_upper_triangular = (1..n)
            .flat_map(|i| (0..i).map(move |j| (i, j)))
            .all(|(i, j)| entries[(i, j)].norm() <= 1e-14 * sigma_max.max(f64::MIN_POSITIVE));
        let (q, t) = if is_upper_triangular {
            (DMatrix::identity(n, n), entries.clone())
        } else {
            nalgebra::Schur::try_new(entries.clone(), 1e-13, 20_000)
                .ok_or_else(|| Error::Invalid("Schur decomposition did not converge".into()))?
                .unpack()
        };
        let eigenvalues = t.diagonal().iter().copied().collect();
        Ok(GeneratorMatrix {
            entries,
            sigma_max,
            sigma_min,
            eigenvalues,
            schur: (q, t),
        })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// Numerical injectivity: smallest singular value above the rank
    /// tolerance relative to the largest.
    pub fn is_injective(&self) -> bool {
        self.sigma_min > RANK_TOL * self.sigma_max.max(f64::MIN_POSITIVE)
    }

    /// Spectral norm (largest singular value).
    pub fn spectral_norm(&self) -> f64 {
        self.sigma_max
    }

    pub fn sigma_min(&self) -> f64 {
        self.sigma_min
    }

    pub fn eigenvalues(&self) -> &[Complex64] {
        &self.eigenvalues
    }

    pub(crate) fn schur_factors(&self) -> (&DMatrix<Complex64>, &DMatrix<Complex64>) {
        (&self.schur.0, &self.schur.1)
    }

    /// Explicitly inverted generator, certified by the injectivity test.
    pub fn inverse(&self) -> Result<GeneratorMatrix> {
        if !self.is_injective() {
            return Err(Error::Hypothesis(format!(
                "generator is not numerically injective (sigma_min/sigma_max = {:.3e})",
                self.sigma_min / self.sigma_max.max(f64::MIN_POSITIVE)
            )));
        }
        let n = self.dim();
        let inv = self
            .entries
            .clone()
            .lu()
            .solve(&DMatrix::identity(n, n))
            .ok_or_else(|| Error::Hypothesis("generator inversion failed".into()))?;
        GeneratorMatrix::new(inv)
    }

    /// diag(entries).
    pub fn diag(entries: &[Complex64]) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Invalid("diag builder needs at least one entry".into()));
        }
        Self::new(DMatrix::from_diagonal(&DVector::from_row_slice(entries)))
    }

    /// n x n Jordan block at lambda.
    pub fn jordan(lambda: Complex64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Invalid("jordan builder needs n >= 1".into()));
        }
        let mut m = DMatrix::from_diagonal(&DVector::from_element(n, lambda));
        for i in 0..n - 1 {
            m[(i, i + 1)] = c(1.0);
        }
        Self::new(m)
    }

    /// Standard second-difference matrix with Dirichlet boundaries on n
    /// interior points with spacing h (negative definite).
    pub fn laplacian_1d(n: usize, h: f64) -> Result<Self> {
        if n == 0 || !(h > 0.0) {
            return Err(Error::Invalid("laplacian_1d needs n >= 1 and h > 0".into()));
        }
        let s = 1.0 / (h * h);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(-2.0 * s);
            if i + 1 < n {
                m[(i, i + 1)] = c(s);
                m[(i + 1, i)] = c(s);
            }
        }
        Self::new(m)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::new(parse_matrix_text(&text)?)
    }
}

/// Parse a complex scalar written as `re` or `re,im`.
pub fn parse_complex(token: &str) -> Result<Complex64> {
    let token = token.trim();
    if let Some((re, im)) = token.split_once(',') {
        let re: f64 = re.trim().parse().map_err(|_| Error::Parse(format!("bad real part in {token:?}")))?;
        let im: f64 = im.trim().parse().map_err(|_| Error::Parse(format!("bad imag part in {token:?}")))?;
        Ok(Complex64::new(re, im))
    } else {
        let re: f64 = token.parse().map_err(|_| Error::Parse(format!("bad number {token:?}")))?;
        Ok(Complex64::new(re, 0.0))
    }
}

/// Matrix text format: first line n, then n rows. Each row holds n entries
/// `re,im` (or bare `re`), whitespace separated; a row of 2n bare numbers is
/// also accepted as consecutive re/im pairs.
pub fn parse_matrix_text(text: &str) -> Result<DMatrix<Complex64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let n: usize = lines
        .next()
        .ok_or_else(|| Error::Parse("empty matrix file".into()))?
        .trim()
        .parse()
        .map_err(|_| Error::Parse("first line must be the dimension n".into()))?;
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let line = lines
            .next()
            .ok_or_else(|| Error::Parse(format!("matrix file ended before row {i}")))?;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() == n {
            for (j, tok) in tokens.iter().enumerate() {
                m[(i, j)] = parse_complex(tok)?;
            }
        } else if tokens.len() == 2 * n && !line.contains(',') {
            for j in 0..n {
                let re: f64 = tokens[2 * j]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {:?}", tokens[2 * j])))?;
                let im: f64 = tokens[2 * j + 1]
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad number {:?}", tokens[2 * j + 1])))?;
                m[(i, j)] = Complex64::new(re, im);
            }
        } else {
            return Err(Error::Parse(format!(
                "row {i} has {} tokens, expected {n} complex entries or {} re/im numbers",
                tokens.len(),
                2 * n
            )));
        }
    }
    Ok(m)
}

/// Orders (alpha, beta) of an integrated resolvent family: 0 < alpha <= 2,
/// beta >= 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ROFParams {
    alpha: f64,
    beta: f64,
}

impl ROFParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 2.0) {
            return Err(Error::Invalid(format!(
                "ROF order alpha must lie in (0, 2], got {alpha}"
            )));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::Invalid(format!(
                "ROF integration order beta must be >= 0, got {beta}"
            )));
        }
        Ok(ROFParams { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Evaluation backend selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalBackend {
    /// Mittag-Leffler power series, continued by Schur-Parlett scalar
    /// evaluation where the series would cancel beyond repair.
    #[default]
    MlSeries,
    /// Bromwich-contour Laplace inversion of Eq. (3.3)'s right-hand side.
    LaplaceInversion,
}

/// Fitted tempered bound sup_t ||R(t)||/t^beta over a grid.
#[derive(Debug, Clone, Copy)]
pub struct TemperedBound {
    pub bound: f64,
    /// The ratio was still increasing at the end of the grid: the family does
    /// not look tempered.
    pub growing: bool,
}

/// A (alpha,beta)-resolvent operator family for a matrix generator.
#[derive(Debug, Clone)]
pub struct ROFFamily {
    generator: GeneratorMatrix,
    params: ROFParams,
    backend: EvalBackend,
    tempered: OnceCell<TemperedBound>,
}

impl ROFFamily {
    pub fn new(generator: GeneratorMatrix, params: ROFParams) -> Self {
        Self::with_backend(generator, params, EvalBackend::default())
    }

    pub fn with_backend(generator: GeneratorMatrix, params: ROFParams, backend: EvalBackend) -> Self {
        ROFFamily {
            generator,
            params,
            backend,
            tempered: OnceCell::new(),
        }
    }

    pub fn generator(&self) -> &GeneratorMatrix {
        &self.generator
    }

    pub fn params(&self) -> ROFParams {
        self.params
    }

    pub fn backend(&self) -> EvalBackend {
        self.backend
    }

    /// R_{alpha,beta}(t) as a full matrix.
    pub fn eval(&self, t: f64) -> Result<DMatrix<Complex64>> {
        self.eval_impl(t, None, false)
    }

    /// R_{alpha,beta}(t) x.
    pub fn apply(&self, t: f64, x: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        let m = self.eval_impl(t, Some(x), false)?;
        Ok(DVector::from_column_slice(m.as_slice()))
    }

    /// d/dt R_{alpha,beta}(t).
    pub fn eval_deriv(&self, t: f64) -> Result<DMatrix<Complex64>> {
        self.eval_impl(t, None, true)
    }

    pub fn apply_deriv(&self, t: f64, x: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        let m = self.eval_impl(t, Some(x), true)?;
        Ok(DVector::from_column_slice(m.as_slice()))
    }

    fn eval_impl(
        &self,
        t: f64,
        x: Option<&DVector<Complex64>>,
        deriv: bool,
    ) -> Result<DMatrix<Complex64>> {
        if !(t >= 0.0) {
            return Err(Error::Domain(format!("family evaluation needs t >= 0, got {t}")));
        }
        let n = self.generator.dim();
        if let Some(v) = x {
            if v.len() != n {
                return Err(Error::Invalid("vector length does not match generator".into()));
            }
        }
        let beta = self.params.beta;
        if t == 0.0 {
            // limits: R(0) = I for beta = 0, 0 for beta > 0 (continuity);
            // R'(0) exists only for beta >= 1
            let limit = if deriv {
                if beta > 1.0 {
                    DMatrix::zeros(n, n)
                } else if beta == 1.0 {
                    DMatrix::identity(n, n)
                } else {
                    return Err(Error::Domain(
                        "d/dt R_{alpha,beta} is singular at t = 0 for beta < 1".into(),
                    ));
                }
            } else if beta == 0.0 {
                DMatrix::identity(n, n)
            } else {
                DMatrix::zeros(n, n)
            };
            return Ok(match x {
                Some(v) => DMatrix::from_column_slice(n, 1, (limit * v).as_slice()),
                None => limit,
            });
        }
        match self.backend {
            EvalBackend::MlSeries => self.series_or_parlett(t, x, deriv),
            EvalBackend::LaplaceInversion => {
                contour::laplace_inversion(&self.generator, self.params.alpha, beta, t, x, deriv)
            }
        }
    }

    fn series_or_parlett(
        &self,
        t: f64,
        x: Option<&DVector<Complex64>>,
        deriv: bool,
    ) -> Result<DMatrix<Complex64>> {
        let alpha = self.params.alpha;
        let beta = self.params.beta;
        let arg = c(t.powf(alpha));
        let (series_beta, power) = if deriv { (beta, beta - 1.0) } else { (beta + 1.0, beta) };
        let a = self.generator.entries();
        let attempt = match x {
            Some(v) => crate::specfun::ml_matrix_apply_raw(alpha, series_beta, a, arg, v)
                .map(|u| DMatrix::from_column_slice(u.len(), 1, u.as_slice())),
            None => crate::specfun::ml_matrix_series_raw(alpha, series_beta, a, arg),
        };
        match attempt {
            Ok(m) => Ok(m * c(t.powf(power))),
            Err(Error::SeriesBudget { .. }) | Err(Error::PrecisionLoss { .. }) => {
                let m = self.parlett_eval(t, deriv)?;
                Ok(match x {
                    Some(v) => DMatrix::from_column_slice(a.nrows(), 1, (m * v).as_slice()),
                    None => m,
                })
            }
            Err(e) => Err(e),
        }
    }

    fn parlett_eval(&self, t: f64, deriv: bool) -> Result<DMatrix<Complex64>> {
        let alpha = self.params.alpha;
        let beta = self.params.beta;
        let (q, tri) = self.generator.schur_factors();
        let ta = t.powf(alpha);
        let (series_beta, power) = if deriv { (beta, beta - 1.0) } else { (beta + 1.0, beta) };
        let scale = c(t.powf(power));
        let mut f = move |mu: Complex64| -> Result<Complex64> {
            Ok(scale * ml_beta_any(alpha, series_beta, c(ta) * mu, false)?)
        };
        let mut fp = move |mu: Complex64| -> Result<Complex64> {
            Ok(scale * c(ta) * ml_beta_any(alpha, series_beta, c(ta) * mu, true)?)
        };
        parlett::matrix_function(q, tri, &mut f, &mut fp)
    }

    /// Sample the family on a grid as a matrix-valued trajectory.
    pub fn sample(&self, grid: &[f64], interpolation_order: usize) -> Result<Trajectory> {
        let values = grid.iter().map(|&t| self.eval(t)).collect::<Result<Vec<_>>>()?;
        Trajectory::new(grid.to_vec(), values, interpolation_order)
    }

    /// Sample t -> R(t) x on a grid.
    pub fn sample_apply(
        &self,
        grid: &[f64],
        interpolation_order: usize,
        x: &DVector<Complex64>,
    ) -> Result<Trajectory> {
        let values = grid
            .iter()
            .map(|&t| {
                let v = self.apply(t, x)?;
                Ok(DMatrix::from_column_slice(v.len(), 1, v.as_slice()))
            })
            .collect::<Result<Vec<_>>>()?;
        Trajectory::new(grid.to_vec(), values, interpolation_order)
    }

    /// Fitted tempered constant M = max_t ||R(t)||/t^beta over the grid
    /// (spectral norm). Cached single-writer; a still-increasing ratio at the
    /// grid end is flagged instead of hidden.
    pub fn fit_tempered_bound(&self, grid: &[f64]) -> Result<TemperedBound> {
        if let Some(b) = self.tempered.get() {
            return Ok(*b);
        }
        let beta = self.params.beta;
        let mut ratios = Vec::with_capacity(grid.len());
        for &t in grid {
            if t <= 0.0 {
                if beta == 0.0 {
                    ratios.push(1.0);
                }
                continue;
            }
            let r = self.eval(t)?;
            let norm = r.clone().svd(false, false).singular_values.max();
            ratios.push(norm / t.powf(beta));
        }
        if ratios.is_empty() {
            return Err(Error::Invalid("tempered fit needs a nonempty positive grid".into()));
        }
        let bound = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let tail = &ratios[ratios.len() - (ratios.len() / 4).max(2).min(ratios.len())..];
        let growing = tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9))
            && *tail.last().unwrap() >= bound * 0.999
            && tail.last().unwrap() > &(ratios[0] * 1.01);
        let b = TemperedBound { bound, growing };
        let _ = self.tempered.set(b);
        Ok(b)
    }

    /// The cached tempered bound, if one was fitted.
    pub fn tempered_bound(&self) -> Option<TemperedBound> {
        self.tempered.get().copied()
    }
}

/// (z I - A)^{-1} by direct solve, with a residual certificate.
pub fn resolvent(a: &GeneratorMatrix, z: Complex64) -> Result<DMatrix<Complex64>> {
    let n = a.dim();
    let shifted = DMatrix::<Complex64>::identity(n, n) * z - a.entries();
    let lu = shifted.clone().lu();
    let x = lu
        .solve(&DMatrix::identity(n, n))
        .ok_or(Error::NearSpectrum {
            residual: f64::INFINITY,
            tolerance: RANK_TOL,
        })?;
    let residual = (&shifted * &x - DMatrix::<Complex64>::identity(n, n)).norm();
    let scale = 1.0 + shifted.norm() * x.norm();
    if residual > RANK_TOL * scale {
        return Err(Error::NearSpectrum {
            residual: residual / scale,
            tolerance: RANK_TOL,
        });
    }
    Ok(x)
}

/// Apply the scalar Mittag-Leffler with beta >= 0 (beta = 0 is lifted through
/// E_{a,0}(w) = w E_{a,a}(w)).
pub(crate) fn ml_beta_any(alpha: f64, beta: f64, w: Complex64, deriv: bool) -> Result<Complex64> {
    if beta > 0.0 {
        ml_eval(alpha, beta, w, deriv)
    } else if !deriv {
        Ok(w * ml_eval(alpha, alpha, w, false)?)
    } else {
        Ok(ml_eval(alpha, alpha, w, false)? + w * ml_eval(alpha, alpha, w, true)?)
    }
}

/// De-integration (order-lowering) of a sampled family: the Caputo derivative
/// of order eta = beta - delta recovers R_{alpha,delta} when the vanishing
/// initial-derivative conditions hold.
pub fn deintegrate(fam: &ROFFamily, grid: &[f64], delta: f64) -> Result<Trajectory> {
    let beta = fam.params().beta();
    if !(delta >= 0.0 && delta < beta) {
        return Err(Error::Invalid(format!(
            "deintegration needs 0 <= delta < beta, got delta={delta}, beta={beta}"
        )));
    }
    let eta = beta - delta;
    let order = FracOrder::new(eta)?;
    let m = order.ceil_m();
    let traj = fam.sample(grid, m + 1)?;
    check_vanishing_initial_derivatives(&traj, m)?;
    caputo_derivative(&traj, &order)
}

/// Condition (iii) of the order-lowering equivalence: the first m stencil
/// derivatives at zero must vanish relative to the trajectory scale.
pub(crate) fn check_vanishing_initial_derivatives(traj: &Trajectory, m: usize) -> Result<()> {
    if m == 0 {
        return Ok(());
    }
    let d0 = derivatives_at_zero(traj, m - 1)?;
    let t_max = *traj.grid().last().unwrap();
    let scale0 = traj
        .values()
        .iter()
        .map(|v| v.norm())
        .fold(f64::NEG_INFINITY, f64::max)
        .max(1e-300);
    for (k, dk) in d0.iter().enumerate() {
        // compare against the k-th derivative scale of a function of size
        // scale0 varying on the horizon t_max
        let scale = scale0 / t_max.powi(k as i32);
        if dk.norm() > 0.05 * scale + 1e-9 {
            return Err(Error::Hypothesis(format!(
                "initial derivative {k} of the sampled family is {:.3e}, not numerically zero \
                 (scale {:.3e}); the order-lowering conditions fail",
                dk.norm(),
                scale
            )));
        }
    }
    Ok(())
}
