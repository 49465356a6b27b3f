//! Bessel function of the first kind J_nu, nonnegative real order, and its
//! positive zeros.
//!
//! Three regimes: double-double power series (x <= 40), backward (Miller)
//! recurrence seeded by the fast-converging series at order ~1.7x for the
//! mid range, and Hankel's amplitude-phase expansion for large x. The phase
//! x - (nu/2 + 1/4)pi is reduced mod 2pi in double-double so large arguments
//! keep full accuracy.

use super::dd::{Dd, DD_PI, DD_TWO_PI};
use super::gamma::lgamma;
use crate::error::{Error, Result};
use std::f64::consts::PI;

/// Order nu >= 0 of J_nu.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselOrder {
    nu: f64,
}

impl BesselOrder {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu >= 0.0) || !nu.is_finite() {
            return Err(Error::Invalid(format!(
                "Bessel order must be nonnegative, got {nu}"
            )));
        }
        Ok(BesselOrder { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

/// J_nu(x) for x >= 0.
pub fn bessel_j(order: &BesselOrder, x: f64) -> Result<f64> {
    bessel_j_nu(order.nu, x)
}

pub fn bessel_j_nu(nu: f64, x: f64) -> Result<f64> {
    if !(nu >= 0.0) {
        return Err(Error::Invalid(format!("Bessel order must be >= 0, got {nu}")));
    }
    if !(x >= 0.0) {
        return Err(Error::Domain(format!("J_nu requires x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if nu == 0.0 { 1.0 } else { 0.0 });
    }
    let hankel_cut = hankel_threshold(nu);
    if x <= 40.0 {
        Ok(series_dd(nu, x))
    } else if x < hankel_cut {
        Ok(miller(nu, x))
    } else {
        Ok(hankel(nu, x))
    }
}

fn hankel_threshold(nu: f64) -> f64 {
    (1.4 * nu * nu + 25.0).max(60.0)
}

/// Power series in ratio form: J = pref * sum, pref = exp(nu ln(x/2) - lgamma(nu+1)),
/// term ratio -(x^2/4)/(k (nu+k)). The ratio recurrence avoids per-term gamma
/// calls and keeps coefficients exact to the double-double level.
fn series_dd(nu: f64, x: f64) -> f64 {
    let x2 = Dd::from_f64(x).mul_f64(x).mul_f64(0.25);
    let mut term = Dd::ONE;
    let mut sum = Dd::ONE;
    for k in 1..600 {
        term = term
            .mul(x2)
            .div_f64(-(k as f64))
            .div_f64(nu + k as f64);
        sum = sum.add(term);
        if term.hi.abs() < 1e-34 * sum.hi.abs().max(1e-300) {
            break;
        }
    }
    let pref = (nu * (x / 2.0).ln() - lgamma(nu + 1.0)).exp();
    pref * sum.to_f64()
}

/// Backward recurrence from order ~1.7x (where the series converges with mild
/// cancellation) down to nu. Stable in this direction; values only grow.
fn miller(nu: f64, x: f64) -> f64 {
    let m = ((1.7 * x - nu).max(8.0)).ceil() as usize;
    let mut upper = series_dd(nu + (m + 1) as f64, x);
    let mut cur = series_dd(nu + m as f64, x);
    let mut ord = nu + m as f64;
    while ord > nu + 0.5 {
        let lower = (2.0 * ord / x) * cur - upper;
        upper = cur;
        cur = lower;
        ord -= 1.0;
    }
    cur
}

/// Hankel expansion J = sqrt(2/(pi x)) (P cos chi - Q sin chi),
/// chi = x - (nu/2 + 1/4) pi.
fn hankel(nu: f64, x: f64) -> f64 {
    let mu = 4.0 * nu * nu;
    let mut p = 1.0_f64;
    let mut q = 0.0_f64;
    let mut a = 1.0_f64; // A_k = prod (mu - (2i-1)^2) / (k! (8x)^k)
    let mut prev = f64::INFINITY;
    for k in 1..40usize {
        a *= (mu - ((2 * k - 1) as f64).powi(2)) / (k as f64 * 8.0 * x);
        if a.abs() >= prev {
            break;
        }
        prev = a.abs();
        let quadrant = k % 4;
        match quadrant {
            1 => q += a,
            2 => p -= a,
            3 => q -= a,
            _ => p += a,
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    // chi mod 2pi in double-double
    let chi = Dd::from_f64(x).sub(DD_PI.mul_f64(0.5 * nu + 0.25));
    let n = (chi.hi / DD_TWO_PI.hi).round();
    let red = chi.sub(DD_TWO_PI.mul_f64(n)).to_f64();
    (2.0 / (PI * x)).sqrt() * (p * red.cos() - q * red.sin())
}

/// d/dx J_nu(x) = (nu/x) J_nu(x) - J_{nu+1}(x).
pub fn bessel_j_prime(nu: f64, x: f64) -> Result<f64> {
    Ok((nu / x) * bessel_j_nu(nu, x)? - bessel_j_nu(nu + 1.0, x)?)
}

/// First `count` positive zeros of J_nu, ascending. McMahon (or Olver, for
/// large order and small index) seeds refined by Newton.
pub fn bessel_j_zeros(nu: f64, count: usize) -> Result<Vec<f64>> {
    let mut zeros = Vec::with_capacity(count);
    for k in 1..=count {
        let seed = zero_seed(nu, k);
        let z = newton_zero(nu, seed)?;
        if let Some(&prev) = zeros.last() {
            if z <= prev + 1e-9 {
                return Err(Error::Invalid(format!(
                    "Bessel zero ordering failed for nu={nu} at index {k}"
                )));
            }
        }
        zeros.push(z);
    }
    Ok(zeros)
}

fn zero_seed(nu: f64, k: usize) -> f64 {
    if nu >= 6.0 && k == 1 {
        // Olver: j_{nu,1} ~ nu + 1.8557571 nu^{1/3} + 1.033150 nu^{-1/3}
        return nu + 1.855_757_1 * nu.powf(1.0 / 3.0) + 1.033_150 * nu.powf(-1.0 / 3.0);
    }
    let b = (k as f64 + 0.5 * nu - 0.25) * PI;
    let mu = 4.0 * nu * nu;
    let mut x = b - (mu - 1.0) / (8.0 * b);
    if b > 3.0 {
        x -= 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * (8.0 * b).powi(3));
    }
    x.max(nu * 0.5 + 0.5)
}

fn newton_zero(nu: f64, seed: f64) -> Result<f64> {
    let mut x = seed;
    for _ in 0..30 {
        let f = bessel_j_nu(nu, x)?;
        let fp = bessel_j_prime(nu, x)?;
        if fp == 0.0 {
            break;
        }
        let step = f / fp;
        // Keep Newton inside the current oscillation arch.
        let clamped = step.clamp(-1.5, 1.5);
        x -= clamped;
        if clamped.abs() < 1e-13 * x.abs() {
            break;
        }
    }
    let amp = (2.0 / (PI * x)).sqrt();
    let residual = bessel_j_nu(nu, x)?.abs();
    if residual > 1e-8 * amp {
        return Err(Error::Invalid(format!(
            "Bessel zero refinement stalled for nu={nu} near {x}: |J|={residual:.3e}"
        )));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn classic_values() {
        assert_relative_eq!(bessel_j_nu(0.0, 0.0).unwrap(), 1.0);
        // J_0(2) = 0.22389077914123567
        assert_relative_eq!(
            bessel_j_nu(0.0, 2.0).unwrap(),
            0.223_890_779_141_235_67,
            max_relative = 1e-12
        );
        // J_1(2) = 0.5767248077568734
        assert_relative_eq!(
            bessel_j_nu(1.0, 2.0).unwrap(),
            0.576_724_807_756_873_4,
            max_relative = 1e-12
        );
    }

    #[test]
    fn half_integer_closed_form() {
        // J_{1/2}(x) = sqrt(2/(pi x)) sin x, across all three regimes
        for &x in &[0.7, 14.0, 55.0, 300.0, 1000.0] {
            let expected = (2.0 / (PI * x)).sqrt() * x.sin();
            assert_relative_eq!(
                bessel_j_nu(0.5, x).unwrap(),
                expected,
                max_relative = 1e-10,
                epsilon = 1e-13
            );
        }
        let x = PI / 2.0;
        assert_relative_eq!(
            bessel_j_nu(0.5, x).unwrap(),
            2.0 / PI,
            max_relative = 1e-12
        );
    }

    #[test]
    fn regime_seams_agree() {
        // series vs miller at x = 40, miller vs hankel at the threshold
        for &nu in &[0.0, 0.5, 2.0, 4.5, 10.0] {
            let a = series_dd(nu, 40.0);
            let b = miller(nu, 40.0);
            assert_relative_eq!(a, b, max_relative = 1e-9, epsilon = 1e-13);
            let xc = hankel_threshold(nu);
            let c = miller(nu, xc);
            let d = hankel(nu, xc);
            assert_relative_eq!(c, d, max_relative = 1e-9, epsilon = 1e-13);
        }
    }

    #[test]
    fn zeros_of_low_orders() {
        let z0 = bessel_j_zeros(0.0, 3).unwrap();
        assert_relative_eq!(z0[0], 2.404_825_557_695_773, max_relative = 1e-11);
        assert_relative_eq!(z0[1], 5.520_078_110_286_311, max_relative = 1e-11);
        assert_relative_eq!(z0[2], 8.653_727_912_911_013, max_relative = 1e-11);
        let z1 = bessel_j_zeros(1.0, 1).unwrap();
        assert_relative_eq!(z1[0], 3.831_705_970_207_512, max_relative = 1e-11);
    }

    #[test]
    fn zeros_high_order_sane() {
        let z = bessel_j_zeros(10.0, 30).unwrap();
        // first zero of J_10 is 14.47550068655454
        assert_relative_eq!(z[0], 14.475_500_686_554_54, max_relative = 1e-9);
        for w in z.windows(2) {
            assert!(w[1] > w[0] + 2.0, "zero spacing collapsed: {w:?}");
        }
    }

    #[test]
    fn large_argument_decay_order() {
        // |J_nu(x)| = O(x^{-1/2})
        for &nu in &[0.0, 2.5] {
            let x = 900.0;
            let v = bessel_j_nu(nu, x).unwrap().abs();
            assert!(v <= 1.1 * (2.0 / (PI * x)).sqrt());
        }
    }
}
