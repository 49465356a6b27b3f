//! Scalar and matrix special-function kernels: Gamma, the convolution kernel
//! g_alpha, Mittag-Leffler E_{alpha,beta}, Wright phi(rho,mu;z), and Bessel
//! J_nu.
//!
//! Every operation here is a pure function of its arguments; there is no
//! shared mutable state and concurrent use needs no coordination.

pub(crate) mod dd;

mod bessel;
mod gamma;
mod mittag_leffler;
mod ml_matrix;
mod wright;

pub use bessel::{bessel_j, bessel_j_nu, bessel_j_prime, bessel_j_zeros, BesselOrder};
pub use gamma::{gamma, gamma_real, lgamma, rgamma, rgamma_complex};
pub use mittag_leffler::{mittag_leffler, mittag_leffler_deriv, MLParams};
pub use ml_matrix::{mittag_leffler_matrix, mittag_leffler_matrix_apply};
pub use wright::{wright, WrightParams};

pub(crate) use mittag_leffler::ml_eval;
pub(crate) use ml_matrix::{ml_matrix_apply_raw, ml_matrix_series_raw};
pub(crate) use wright::order_and_type;

use crate::error::{Error, Result};

/// Convolution kernel g_alpha(t) = t^{alpha-1}/Gamma(alpha) for t > 0, 0 for
/// t <= 0. g_0 is the Dirac delta and has no pointwise value.
pub fn g_kernel(alpha: f64, t: f64) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::Invalid(format!(
            "g_alpha requires alpha >= 0, got {alpha}"
        )));
    }
    if alpha == 0.0 {
        return Err(Error::Domain(
            "g_0 is the Dirac delta; use the convolution identity path instead of pointwise evaluation"
                .into(),
        ));
    }
    if t <= 0.0 {
        return Ok(0.0);
    }
    Ok(t.powf(alpha - 1.0) * rgamma(alpha))
}
