use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::Field;
use crate::random::{extremal_singular_values, gaussian_matrix, DenseMatrix, RngStream};

/// A frame matrix `F` whose columns are the frame vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    matrix: DenseMatrix,
    /// Whether `F = A/√n` for a raw Gaussian `A`.
    normalized: bool,
}

impl FrameMatrix {
    /// Wraps an arbitrary matrix as a frame, without normalization.
    pub fn from_matrix(matrix: DenseMatrix) -> Self {
        Self {
            matrix,
            normalized: false,
        }
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn normalized(&self) -> bool {
        self.normalized
    }

    /// Ambient dimension n.
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    /// Number of frame vectors N.
    pub fn len(&self) -> usize {
        self.matrix.cols()
    }

    pub fn is_empty(&self) -> bool {
        self.matrix.cols() == 0
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            matrix: self.matrix.scaled(factor),
            normalized: self.normalized,
        }
    }
}

/// `F = A/√n` with `A` an `n × N` Gaussian matrix drawn from `rng`.
///
/// Fails if `N ≥ n` and the sample is rank deficient.
pub fn frame_from_gaussian(
    rng: &RngStream,
    n: usize,
    n_cols: usize,
    field: Field,
) -> Result<FrameMatrix> {
    if n == 0 || n_cols == 0 {
        return Err(Error::Domain(format!(
            "frame needs n, N >= 1, got {n}, {n_cols}"
        )));
    }
    let a = gaussian_matrix(rng, n, n_cols, field);
    let frame = FrameMatrix {
        matrix: a.scaled(1.0 / (n as f64).sqrt()),
        normalized: true,
    };
    if n_cols >= n && extremal_singular_values(&frame.matrix)?.sigma_min == 0.0 {
        return Err(Error::Domain("sampled frame is rank deficient".into()));
    }
    Ok(frame)
}

/// Indices of the retained frame vectors, 0-based and strictly increasing.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct ErasurePattern {
    kept: Vec<usize>,
}

impl ErasurePattern {
    pub fn new(kept: Vec<usize>, n_cols: usize) -> Result<Self> {
        if kept.is_empty() {
            return Err(Error::Domain(
                "erasure pattern must keep at least one column".into(),
            ));
        }
        if kept.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(format!(
                "erasure pattern indices must be strictly increasing: {kept:?}"
            )));
        }
        let last = *kept.last().expect("nonempty");
        if last >= n_cols {
            return Err(Error::IndexOutOfRange {
                index: last,
                cols: n_cols,
            });
        }
        Ok(Self { kept })
    }

    pub(crate) fn from_sorted(kept: Vec<usize>) -> Self {
        Self { kept }
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn len(&self) -> usize {
        self.kept.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kept.is_empty()
    }
}

/// `F_S`, the retained columns in pattern order.
pub fn submatrix(f: &FrameMatrix, s: &ErasurePattern) -> Result<DenseMatrix> {
    f.matrix.select_columns(s.kept())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_validation() {
        assert!(ErasurePattern::new(vec![], 3).is_err());
        assert!(ErasurePattern::new(vec![1, 1], 3).is_err());
        assert!(ErasurePattern::new(vec![2, 1], 3).is_err());
        assert_eq!(
            ErasurePattern::new(vec![0, 3], 3),
            Err(Error::IndexOutOfRange { index: 3, cols: 3 })
        );
        assert_eq!(ErasurePattern::new(vec![0, 2], 3).unwrap().kept(), &[0, 2]);
    }

    #[test]
    fn single_entry_frame() {
        let f = frame_from_gaussian(&RngStream::new(3, 0), 1, 1, Field::Real).unwrap();
        let a = gaussian_matrix(&RngStream::new(3, 0), 1, 1, Field::Real);
        assert_eq!(f.matrix().as_slice(), a.as_slice());
        let e = extremal_singular_values(f.matrix()).unwrap();
        assert!((e.sigma_max.powi(2) - a.as_slice()[0].powi(2)).abs() < 1e-15);
    }

    #[test]
    fn normalization_scales_singular_values() {
        let s = RngStream::new(8, 1);
        let f = frame_from_gaussian(&s, 5, 12, Field::Complex).unwrap();
        assert!(f.normalized());
        let a = gaussian_matrix(&s, 5, 12, Field::Complex);
        let (ef, ea) = (
            extremal_singular_values(f.matrix()).unwrap(),
            extremal_singular_values(&a).unwrap(),
        );
        assert!((ef.sigma_max - ea.sigma_max / 5f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn full_and_single_column_submatrices() {
        let f = frame_from_gaussian(&RngStream::new(1, 1), 3, 5, Field::Real).unwrap();
        let all = ErasurePattern::new((0..5).collect(), 5).unwrap();
        assert_eq!(&submatrix(&f, &all).unwrap(), f.matrix());
        let first = ErasurePattern::new(vec![0], 5).unwrap();
        let col = submatrix(&f, &first).unwrap();
        let norm = (0..3)
            .map(|i| f.matrix().get(i, 0).0.powi(2))
            .sum::<f64>()
            .sqrt();
        let e = extremal_singular_values(&col).unwrap();
        assert!((e.sigma_max - norm).abs() < 1e-14);
    }
}
