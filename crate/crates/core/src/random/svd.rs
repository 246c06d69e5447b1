use nalgebra::{ComplexField, DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;
use serde::Serialize;

use super::DenseMatrix;
use crate::error::{Error, Result};
use crate::field::Field;

/// Accepted results satisfy `residual ≤ RESIDUAL_TOLERANCE · sigma_max`.
pub const RESIDUAL_TOLERANCE: f64 = 1e-8;

/// Below this σ_min/σ₁ the squared spectrum of the Gram operator loses too
/// many digits of σ_min, and the bidiagonal route is used instead.
const GRAM_CONDITION_FLOOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SvMethod {
    Gram,
    Bidiagonal,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SingularExtremes {
    pub sigma_max: f64,
    /// Smallest singular value over the short dimension.
    pub sigma_min: f64,
    /// Backward-error estimate in singular-value units.
    pub residual: f64,
    pub method: SvMethod,
}

impl SingularExtremes {
    pub fn condition(&self) -> f64 {
        if self.sigma_min > 0.0 {
            self.sigma_max / self.sigma_min
        } else {
            f64::INFINITY
        }
    }
}

/// σ₁ and σ_min of `m`, where σ_min is taken over `min(rows, cols)` values.
///
/// Wide and tall inputs are both accepted; tall ones are handled through
/// their adjoint. Complex matrices are decomposed over ℂ.
pub fn extremal_singular_values(m: &DenseMatrix) -> Result<SingularExtremes> {
    if m.rows() == 0 || m.cols() == 0 {
        return Err(Error::Domain("empty matrix has no singular values".into()));
    }
    match m.field() {
        Field::Real => {
            let a = DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice());
            extremes(wide(a))
        }
        Field::Complex => {
            let a = DMatrix::from_fn(m.rows(), m.cols(), |i, j| {
                let (re, im) = m.get(i, j);
                Complex64::new(re, im)
            });
            extremes(wide(a))
        }
    }
}

fn wide<T: ComplexField>(a: DMatrix<T>) -> DMatrix<T> {
    if a.nrows() > a.ncols() {
        a.adjoint()
    } else {
        a
    }
}

fn extremes<T: ComplexField<RealField = f64>>(a: DMatrix<T>) -> Result<SingularExtremes> {
    if let Some(found) = via_gram(&a) {
        return Ok(found);
    }
    let found = via_bidiagonal(a);
    if found.residual > RESIDUAL_TOLERANCE * found.sigma_max {
        return Err(Error::Decomposition {
            residual: found.residual,
            limit: RESIDUAL_TOLERANCE * found.sigma_max,
        });
    }
    Ok(found)
}

fn via_gram<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Option<SingularExtremes> {
    let gram = a * a.adjoint();
    let eig = SymmetricEigen::new(gram.clone());
    let (mut imax, mut imin) = (0, 0);
    for (i, &v) in eig.eigenvalues.iter().enumerate() {
        if v > eig.eigenvalues[imax] {
            imax = i;
        }
        if v < eig.eigenvalues[imin] {
            imin = i;
        }
    }
    let sigma_max = eig.eigenvalues[imax].max(0.0).sqrt();
    let sigma_min = eig.eigenvalues[imin].max(0.0).sqrt();
    if sigma_max == 0.0 {
        return Some(SingularExtremes {
            sigma_max,
            sigma_min,
            residual: 0.0,
            method: SvMethod::Gram,
        });
    }
    if sigma_min < GRAM_CONDITION_FLOOR * sigma_max {
        return None;
    }
    let eig_residual = |i: usize| {
        let v = eig.eigenvectors.column(i);
        let lambda = T::from_real(eig.eigenvalues[i]);
        (&gram * &v - v * lambda).norm()
    };
    // first-order perturbation: δσ ≈ δλ / (2σ)
    let residual = eig_residual(imax).max(eig_residual(imin)) / (2.0 * sigma_max);
    (residual <= RESIDUAL_TOLERANCE * sigma_max).then_some(SingularExtremes {
        sigma_max,
        sigma_min,
        residual,
        method: SvMethod::Gram,
    })
}

fn via_bidiagonal<T: ComplexField<RealField = f64>>(a: DMatrix<T>) -> SingularExtremes {
    let svd = SVD::new(a.clone(), true, true);
    let s = &svd.singular_values;
    let (mut imax, mut imin) = (0, 0);
    for i in 0..s.len() {
        if s[i] > s[imax] {
            imax = i;
        }
        if s[i] < s[imin] {
            imin = i;
        }
    }
    let (u, v_t) = match (&svd.u, &svd.v_t) {
        (Some(u), Some(v_t)) => (u, v_t),
        _ => unreachable!("singular vectors were requested"),
    };
    let triplet_residual = |i: usize| {
        let v = v_t.row(i).adjoint();
        (&a * v - u.column(i) * T::from_real(s[i])).norm()
    };
    SingularExtremes {
        sigma_max: s[imax],
        sigma_min: s[imin],
        residual: triplet_residual(imax).max(triplet_residual(imin)),
        method: SvMethod::Bidiagonal,
    }
}
