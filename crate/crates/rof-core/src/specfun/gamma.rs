//! Gamma function in three flavors: complex f64 (Lanczos), real log-form,
//! and double-double (Spouge base + upward recurrence) for series coefficients.

use super::dd::{Dd, DD_TWO_PI};
use crate::error::{Error, Result};
use num_complex::Complex64;
use once_cell::sync::Lazy;
use std::f64::consts::PI;

/// Lanczos g = 7, 9 coefficients. Relative error ~1e-13 on the right half-plane.
const LANCZOS_G: f64 = 7.0;
const LANCZOS_C: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// sin(pi x) with exact argument reduction.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let r = x - n;
    let s = (PI * r).sin();
    if (n.rem_euclid(2.0)) as i64 == 0 {
        s
    } else {
        -s
    }
}

fn lanczos_sum(z: Complex64) -> Complex64 {
    let mut acc = Complex64::new(LANCZOS_C[0], 0.0);
    for (i, &c) in LANCZOS_C.iter().enumerate().skip(1) {
        acc += c / (z + i as f64);
    }
    acc
}

/// Gamma(z) for complex z. Poles at nonpositive integers are reported as errors.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    if z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0 {
        return Err(Error::GammaPole(z.re));
    }
    if z.re < 0.5 {
        // Reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z).
        let s = if z.im == 0.0 {
            Complex64::new(sin_pi(z.re), 0.0)
        } else {
            (Complex64::new(PI, 0.0) * z).sin()
        };
        return Ok(PI / (s * gamma(Complex64::new(1.0, 0.0) - z)?));
    }
    let zm1 = z - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    let sqrt2pi = (2.0 * PI).sqrt();
    Ok(sqrt2pi * t.powc(zm1 + 0.5) * (-t).exp() * lanczos_sum(zm1))
}

/// Gamma(x) for real x, same pole contract.
pub fn gamma_real(x: f64) -> Result<f64> {
    Ok(gamma(Complex64::new(x, 0.0))?.re)
}

/// ln Gamma(x) for x > 0.
pub fn lgamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        // ln Gamma(x) = ln(pi / sin(pi x)) - ln Gamma(1 - x); safe since sin(pi x) > 0 here.
        return (PI / sin_pi(x)).ln() - lgamma(1.0 - x);
    }
    let zm1 = x - 1.0;
    let t = zm1 + LANCZOS_G + 0.5;
    let s = lanczos_sum(Complex64::new(zm1, 0.0)).re;
    0.5 * (2.0 * PI).ln() + (zm1 + 0.5) * t.ln() - t + s.ln()
}

/// Entire reciprocal gamma 1/Gamma(x); 0 at the poles. Overflows to +-inf for
/// very negative non-integer x (|x| beyond ~170), which callers treat as a
/// series cutoff.
pub fn rgamma(x: f64) -> f64 {
    if x > 0.0 {
        if x <= 150.0 {
            // direct Lanczos keeps a flat ~2e-15 relative error; exp(-lgamma)
            // would amplify the lgamma absolute error at larger x
            let zm1 = x - 1.0;
            let t = zm1 + LANCZOS_G + 0.5;
            let sqrt2pi = (2.0 * PI).sqrt();
            1.0 / (sqrt2pi
                * t.powf(zm1 + 0.5)
                * (-t).exp()
                * lanczos_sum(Complex64::new(zm1, 0.0)).re)
        } else {
            (-lgamma(x)).exp()
        }
    } else if x.fract() == 0.0 {
        0.0
    } else {
        // 1/Gamma(x) = Gamma(1-x) sin(pi x) / pi
        let lg = lgamma(1.0 - x);
        let s = sin_pi(x);
        if lg > 700.0 {
            s.signum() * f64::INFINITY
        } else {
            lg.exp() * s / PI
        }
    }
}

/// Complex reciprocal gamma, via the Lanczos gamma. 0 at real nonpositive integers.
pub fn rgamma_complex(z: Complex64) -> Complex64 {
    match gamma(z) {
        Ok(g) => 1.0 / g,
        Err(_) => Complex64::new(0.0, 0.0),
    }
}

// ---------------------------------------------------------------------------
// Double-double gamma for x > 0: Spouge below the base point, exact-product
// upward recurrence above it. Spouge's alternating sum cancels too much for
// large x, so the recurrence carries the growth instead.
// ---------------------------------------------------------------------------

// The recurrence base sits low because the alternating Spouge sum cancels
// progressively as z grows (about e^{13} by z = 23, and still ~1e4 at z = 0.3);
// on z in (-1, 0] the sum is nearly cancellation-free and the values come out
// a couple of ulps from full double-double precision.
const SPOUGE_A: usize = 39;
const SPOUGE_BASE: f64 = 1.0;

static SPOUGE_C: Lazy<Vec<Dd>> = Lazy::new(|| {
    let mut c = Vec::with_capacity(SPOUGE_A);
    // c0 = sqrt(2 pi)
    c.push(DD_TWO_PI.powf(0.5));
    let mut fact = Dd::ONE; // (k-1)!
    for k in 1..SPOUGE_A {
        if k > 1 {
            fact = fact.mul_f64((k - 1) as f64);
        }
        let ak = Dd::from_f64((SPOUGE_A - k) as f64);
        let ck = ak
            .powf(k as f64 - 0.5)
            .mul(Dd::from_f64((SPOUGE_A - k) as f64).exp())
            .div(fact);
        c.push(if k % 2 == 1 { ck } else { ck.neg() });
    }
    c
});

/// Gamma(x) in double-double for x > 0 (x given as a Dd to keep alpha*k + beta
/// exact). Returns +inf Dd once past f64 range.
pub(crate) fn gamma_dd(x: Dd) -> Dd {
    debug_assert!(x.hi > 0.0);
    if x.hi > 171.6 {
        return Dd::from_f64(f64::INFINITY);
    }
    if x.hi <= SPOUGE_BASE {
        return spouge_dd(x);
    }
    // Gamma(x) = (x-1)(x-2)...(x-m) Gamma(x-m) with x-m in (BASE-1, BASE];
    // the exact-product recurrence carries the growth so Spouge only ever
    // runs in its cancellation-free strip.
    let m = (x.hi - SPOUGE_BASE).ceil() as usize;
    let base = x.add_f64(-(m as f64));
    let mut prod = spouge_dd(base);
    for i in 1..=m {
        prod = prod.mul(x.add_f64(-(i as f64)));
    }
    prod
}

fn spouge_dd(x: Dd) -> Dd {
    // Gamma(z+1) = (z+a)^(z+1/2) e^{-(z+a)} [c0 + sum ck/(z+k)], z = x-1.
    let z = x.add_f64(-1.0);
    let za = z.add_f64(SPOUGE_A as f64);
    let mut s = SPOUGE_C[0];
    for (k, &ck) in SPOUGE_C.iter().enumerate().skip(1) {
        s = s.add(ck.div(z.add_f64(k as f64)));
    }
    let power = za.ln().mul(z.add_f64(0.5)).exp();
    power.mul(za.neg().exp()).mul(s)
}

/// 1/Gamma(x) in double-double for x > 0; Dd::ZERO once Gamma overflows.
pub(crate) fn rgamma_dd(x: Dd) -> Dd {
    let g = gamma_dd(x);
    if g.hi.is_infinite() {
        Dd::ZERO
    } else {
        g.recip()
    }
}
