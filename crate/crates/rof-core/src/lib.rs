//! Numerical engine for integrated fractional resolvent operator functions
//! R_{alpha,beta}(t) of finite-dimensional generators.
//!
//! The crate provides:
//!
//! * [`specfun`] — Gamma, the convolution kernel g_alpha, Mittag-Leffler,
//!   Wright and Bessel functions, scalar and matrix-valued;
//! * [`fraccalc`] — Riemann-Liouville integrals and Riemann-Liouville/Caputo
//!   derivatives of sampled trajectories by product-integration quadrature;
//! * [`rof_engine`] — construction and evaluation of (alpha,beta)-resolvent
//!   operator families for matrix generators, with a Mittag-Leffler series
//!   backend and a Bromwich-contour Laplace-inversion backend;
//! * [`inverse_transform`] — the resolvent families generated by the inverse
//!   operator, through the Bessel-kernel and Wright-subordination integral
//!   representations and the analytic-case derivative form;
//! * [`diagnostics`] — numerical verification of the Laplace identities,
//!   sectoriality, decay rates and limit laws;
//! * [`cauchy_solver`] — fractional Cauchy problems unsolved in the
//!   derivative, D_t^gamma A u = B A u + a u, solved via v = A u.

pub mod error;
pub mod quad;
pub mod specfun;

pub mod fraccalc;
pub mod rof_engine;

pub use error::{Error, Result};
