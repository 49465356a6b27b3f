//! Wright function phi(rho, mu; z) = sum_k z^k / (k! Gamma(rho k + mu)).
//!
//! Entire of order 1/(1+rho). On the negative axis it decays like
//! exp(-a r^q), q = 1/(1+rho), so the Taylor series loses exp(sigma r^q)
//! digits to cancellation; past the double-double budget the evaluation moves
//! to a numerical Hankel-loop integral on a parabola through the conjugate
//! saddle points of exp(zeta + z zeta^{-rho}).

use super::dd::{CDd, Dd};
use super::gamma::{rgamma_complex, rgamma_dd};
use crate::error::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Parameters (rho, mu) of phi(rho, mu; z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WrightParams {
    rho: f64,
    mu: Complex64,
}

impl WrightParams {
    pub fn new(rho: f64, mu: Complex64) -> Result<Self> {
        if !(rho > -1.0) || !rho.is_finite() {
            return Err(Error::Invalid(format!(
                "Wright rho must exceed -1, got {rho}"
            )));
        }
        Ok(WrightParams { rho, mu })
    }

    pub fn new_real(rho: f64, mu: f64) -> Result<Self> {
        Self::new(rho, Complex64::new(mu, 0.0))
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn mu(&self) -> Complex64 {
        self.mu
    }
}

/// Order and type of phi as an entire function: q = 1/(1+rho),
/// sigma = (1+rho) rho^{-rho/(1+rho)}.
pub(crate) fn order_and_type(rho: f64) -> (f64, f64) {
    let q = 1.0 / (1.0 + rho);
    let sigma = (1.0 + rho) * rho.powf(-rho * q);
    (q, sigma)
}

/// Largest |z| the double-double series still resolves to ~1e-12. The budget
/// accounts for the result itself being exponentially small on the negative
/// axis, |phi| ~ exp(sigma r^q cos(pi q)), plus the algebraic shrink from mu.
fn taylor_radius(rho: f64, mu: f64) -> f64 {
    let (q, sigma) = order_and_type(rho);
    let gap = 1.0 - (std::f64::consts::PI * q).cos();
    let budget = |r: f64| sigma * r.powf(q) * gap + 0.5 * mu.max(1.0) * (1.0 + r).ln();
    let mut lo = 1.0;
    let mut hi = 1e9;
    if budget(lo) > 40.0 {
        return lo;
    }
    for _ in 0..80 {
        let mid = (lo * hi).sqrt();
        if budget(mid) > 40.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// phi(rho, mu; z). Evaluation is guaranteed for 0 < rho <= 1 with real mu > 0;
/// other parameter combinations go through the plain series with a
/// cancellation guard.
pub fn wright(p: &WrightParams, z: Complex64) -> Result<Complex64> {
    let rho = p.rho;
    if !(rho > 0.0 && rho <= 1.0) {
        return Err(Error::Domain(format!(
            "Wright evaluation supports 0 < rho <= 1, got {rho}"
        )));
    }
    if !z.is_finite() {
        return Err(Error::Domain("Wright argument must be finite".into()));
    }
    let real_mu = p.mu.im == 0.0 && p.mu.re > 0.0;
    if !real_mu {
        return series_f64(rho, p.mu, z);
    }
    let mu = p.mu.re;
    if z.norm() <= taylor_radius(rho, mu) {
        return series_dd(rho, mu, z);
    }
    if z.im == 0.0 && z.re < 0.0 {
        return saddle_contour(rho, mu, -z.re).map(|v| Complex64::new(v, 0.0));
    }
    if z.im == 0.0 && z.re > 0.0 {
        // all-positive terms, no cancellation
        return series_f64(rho, p.mu, z);
    }
    Err(Error::PrecisionLoss {
        context: format!("Wright function at large complex argument {z}"),
        lost_digits: (order_and_type(rho).1 * z.norm().powf(1.0 / (1.0 + rho))) / std::f64::consts::LN_10,
    })
}

fn series_dd(rho: f64, mu: f64, z: Complex64) -> Result<Complex64> {
    const BUDGET: usize = 4000;
    let rho_dd = Dd::from_f64(rho);
    let mu_dd = Dd::from_f64(mu);
    let zc = CDd::new(z.re, z.im);
    let mut term = CDd::ONE; // z^k / k!
    let mut sum = CDd {
        re: rgamma_dd(mu_dd),
        im: Dd::ZERO,
    };
    let mut max_mag = sum.mag();
    let mut below = 0usize;
    for k in 1..BUDGET {
        term = term.mul(zc).div_f64(k as f64);
        let w = rho_dd.mul_f64(k as f64).add(mu_dd);
        if w.hi > 171.0 && term.mag() * 1e-300 < sum.mag() {
            break;
        }
        let contrib = term.scale(rgamma_dd(w));
        sum = sum.add(contrib);
        let m = contrib.mag();
        max_mag = max_mag.max(m);
        if m < 1e-18 * sum.mag().max(1e-300) {
            below += 1;
            if below >= 3 {
                let lost = (max_mag / sum.mag().max(1e-300)).log10();
                if lost > 19.0 {
                    return Err(Error::PrecisionLoss {
                        context: format!("Wright series cancellation, rho={rho} mu={mu} z={z}"),
                        lost_digits: lost,
                    });
                }
                return Ok(Complex64::new(sum.re.to_f64(), sum.im.to_f64()));
            }
        } else {
            below = 0;
        }
    }
    Err(Error::SeriesBudget {
        budget: BUDGET,
        context: format!("Wright series rho={rho} mu={mu} |z|={}", z.norm()),
    })
}

/// Plain f64 series with a cancellation estimate; used for positive arguments
/// and the non-guaranteed parameter ranges.
fn series_f64(rho: f64, mu: Complex64, z: Complex64) -> Result<Complex64> {
    const BUDGET: usize = 4000;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = rgamma_complex(mu);
    let mut max_mag = sum.norm();
    let mut below = 0usize;
    for k in 1..BUDGET {
        term = term * z / (k as f64);
        if !term.is_finite() {
            return Err(Error::PrecisionLoss {
                context: format!("Wright series overflow at |z|={}", z.norm()),
                lost_digits: 300.0,
            });
        }
        let contrib = term * rgamma_complex(mu + rho * k as f64);
        sum += contrib;
        let m = contrib.norm();
        max_mag = max_mag.max(m);
        if m < 1e-18 * sum.norm().max(1e-300) {
            below += 1;
            if below >= 3 {
                let lost = (max_mag / sum.norm().max(1e-300)).log10();
                if lost > 5.0 {
                    return Err(Error::PrecisionLoss {
                        context: format!("Wright f64 series cancellation, rho={rho} mu={mu} z={z}"),
                        lost_digits: lost,
                    });
                }
                return Ok(sum);
            }
        } else {
            below = 0;
        }
    }
    Err(Error::SeriesBudget {
        budget: BUDGET,
        context: format!("Wright f64 series rho={rho} |z|={}", z.norm()),
    })
}

/// phi(rho, mu; -r) for r beyond the series budget, via the loop integral
/// (1/2pi i) int exp(zeta - r zeta^{-rho}) zeta^{-mu} d zeta on the parabola
/// zeta(u) = m (1+iu)^2 passing through the saddle points
/// zeta_± = (rho r)^q e^{±i pi q}.
fn saddle_contour(rho: f64, mu: f64, r: f64) -> Result<f64> {
    let q = 1.0 / (1.0 + rho);
    let big_r = (rho * r).powf(q);
    let m = big_r * (1.0 + (PI * q).cos()) / 2.0;

    let integrand = |u: f64| -> Complex64 {
        let zeta = Complex64::new(m * (1.0 - u * u), 2.0 * m * u);
        let f = zeta - r * zeta.powf(-rho);
        let dz = Complex64::new(0.0, 2.0 * m) * Complex64::new(1.0, u);
        f.exp() * zeta.powf(-mu) * dz
    };

    let sum_with_step = |h: f64| -> f64 {
        // center contribution (u = 0) reduces to m^{1-mu} e^{f(m)}
        let center = m.powf(1.0 - mu) * (m - r * m.powf(-rho)).exp();
        let mut acc = center;
        let mut max_mag = center.abs();
        let mut k = 1usize;
        loop {
            let g = integrand(k as f64 * h);
            let gi = g.im;
            acc += gi;
            max_mag = max_mag.max(g.norm());
            if g.norm() < 1e-19 * max_mag.max(1e-300) && k as f64 * h > 1.5 {
                break;
            }
            k += 1;
            if k > 200_000 {
                break;
            }
        }
        acc * h / PI
    };

    let mut h = 0.5 / (1.0 + m.sqrt());
    let mut prev = sum_with_step(h);
    for _ in 0..12 {
        h *= 0.5;
        let cur = sum_with_step(h);
        if (cur - prev).abs() <= 1e-14 * cur.abs().max(1e-300) + 1e-305 {
            return Ok(cur);
        }
        prev = cur;
    }
    Ok(prev)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn w(rho: f64, mu: f64, z: f64) -> f64 {
        wright(&WrightParams::new_real(rho, mu).unwrap(), Complex64::new(z, 0.0))
            .unwrap()
            .re
    }

    #[test]
    fn wright_at_zero() {
        assert_relative_eq!(w(1.0, 1.0, 0.0), 1.0, max_relative = 1e-14);
        assert_relative_eq!(w(0.5, 2.0, 0.0), 1.0, max_relative = 1e-13);
    }

    #[test]
    fn wright_rho_one_is_shifted_bessel() {
        // phi(1, 2; -1) = J_1(2) = 0.576724807756873...
        assert_relative_eq!(w(1.0, 2.0, -1.0), 0.576_724_807_756_873_4, max_relative = 1e-12);
    }

    #[test]
    fn wright_exp_reduction() {
        // phi(1, 1; z) = sum z^k/(k!)^2 ... not exp; instead check mu=1,rho=1
        // against the Bessel identity J_0(2 sqrt(r)) = phi(1,1,-r).
        // J_0(2) = 0.2238907791412357
        assert_relative_eq!(w(1.0, 1.0, -1.0), 0.223_890_779_141_235_7, max_relative = 1e-12);
    }

    #[test]
    fn contour_matches_series_at_seam() {
        for &rho in &[0.25, 0.5, 0.75, 1.0] {
            for &mu in &[1.0, 1.5, 3.0] {
                let r = taylor_radius(rho, mu) * 0.98;
                let series = w(rho, mu, -r);
                let contour = saddle_contour(rho, mu, r).unwrap();
                assert_relative_eq!(series, contour, max_relative = 5e-10, epsilon = 1e-280);
            }
        }
    }

    #[test]
    fn contour_matches_series_inside_overlap() {
        // the contour is also exercised well inside the series region
        for &(rho, mu, r) in &[(0.5, 1.0, 8.0), (0.75, 2.0, 12.0), (0.25, 1.0, 5.0)] {
            let series = w(rho, mu, -r);
            let contour = saddle_contour(rho, mu, r).unwrap();
            assert_relative_eq!(series, contour, max_relative = 1e-9, epsilon = 1e-30);
        }
    }

    #[test]
    fn negative_axis_decay_bound() {
        // |phi(rho,1,-r)| <= L exp(-a r^q): check log|phi|/r^q stays negative
        // and roughly constant on [5, 50].
        for &rho in &[0.25, 0.5, 0.75] {
            let q = 1.0 / (1.0 + rho);
            let mut worst = f64::NEG_INFINITY;
            for i in 0..40 {
                let r = 5.0 * (10.0_f64).powf(i as f64 / 39.0);
                let v = w(rho, 1.0, -r).abs();
                if v > 0.0 {
                    worst = worst.max(v.ln() / r.powf(q));
                }
            }
            assert!(worst < 0.0, "rho={rho}: decay ratio {worst}");
        }
    }

    #[test]
    fn complex_mu_series_small_arg() {
        let p = WrightParams::new(0.5, Complex64::new(1.0, 0.3)).unwrap();
        let v = wright(&p, Complex64::new(-0.5, 0.2)).unwrap();
        assert!(v.is_finite());
    }
}
