//! Schur-Parlett evaluation of a scalar function on a matrix.
//!
//! The generator's Schur form A = Q T Q^H is computed once and cached; each
//! function evaluation then runs the Parlett recurrence on the triangular
//! factor with scalar values on the diagonal. Adjacent equal eigenvalues
//! (Jordan pairs) use the confluent divided difference f'; non-adjacent
//! coincidences would need a reordered block recurrence and are reported as
//! unsupported.

use crate::error::{Error, Result};
use nalgebra::DMatrix;
use num_complex::Complex64;

/// f(T) for upper-triangular T.
pub(crate) fn triangular_function(
    t: &DMatrix<Complex64>,
    f: &mut dyn FnMut(Complex64) -> Result<Complex64>,
    fprime: &mut dyn FnMut(Complex64) -> Result<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let n = t.nrows();
    let scale = t.norm().max(1e-300);
    let tol = 1e-8 * scale;
    let mut fm = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        fm[(i, i)] = f(t[(i, i)])?;
    }
    for sep in 1..n {
        for i in 0..n - sep {
            let j = i + sep;
            let tii = t[(i, i)];
            let tjj = t[(j, j)];
            let diff = tii - tjj;
            let mut cross = t[(i, j)] * (fm[(i, i)] - fm[(j, j)]);
            for k in i + 1..j {
                cross += fm[(i, k)] * t[(k, j)] - t[(i, k)] * fm[(k, j)];
            }
            if diff.norm() > tol {
                fm[(i, j)] = cross / diff;
            } else if sep == 1 {
                fm[(i, j)] = t[(i, j)] * fprime((tii + tjj) * 0.5)?;
            } else {
                // Equal eigenvalues separated inside the triangle: the scalar
                // recurrence is singular and a block (reordered) variant
                // would be required.
                return Err(Error::Invalid(format!(
                    "Schur-Parlett: coincident eigenvalues at positions {i} and {j} \
                     are not adjacent; clustered evaluation is unsupported"
                )));
            }
        }
    }
    Ok(fm)
}

/// f(A) = Q f(T) Q^H given the cached Schur factors.
pub(crate) fn matrix_function(
    q: &DMatrix<Complex64>,
    t: &DMatrix<Complex64>,
    f: &mut dyn FnMut(Complex64) -> Result<Complex64>,
    fprime: &mut dyn FnMut(Complex64) -> Result<Complex64>,
) -> Result<DMatrix<Complex64>> {
    let ft = triangular_function(t, f, fprime)?;
    Ok(q * ft * q.adjoint())
}
