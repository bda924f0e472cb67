//! Cholesky and Reverse Cholesky decompositions of SPD matrices.
//!
//! The Reverse Cholesky decomposition `M = U U^T` (U upper triangular with
//! positive diagonal) is computed as the ordinary Cholesky decomposition of
//! the index-reversed matrix: if `P` is the reversal permutation and
//! `P^T M P = L L^T`, then `U = P L P^T`.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Relative symmetry tolerance applied before factorizing. Inputs within
/// the tolerance are silently replaced by `(M + M^T) / 2`, which is what
/// the random generators produce anyway.
pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Lower,
    Upper,
}

/// Triangular matrix with strictly positive diagonal entries.
///
/// Entries on the wrong side of the diagonal are exact zeros, never values
/// that merely round to zero.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularFactor {
    matrix: Matrix,
    orientation: Orientation,
}

impl TriangularFactor {
    /// Validates the structural invariants and wraps the matrix.
    pub fn new(matrix: Matrix, orientation: Orientation) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::NotSquare {
                rows: matrix.rows(),
                cols: matrix.cols(),
            });
        }
        let n = matrix.rows();
        for i in 0..n {
            if !(matrix.get(i, i) > 0.0) {
                return Err(Error::NotPositiveDefinite {
                    index: i,
                    pivot: matrix.get(i, i),
                });
            }
            for j in 0..n {
                let structural_zero = match orientation {
                    Orientation::Lower => j > i,
                    Orientation::Upper => j < i,
                };
                if structural_zero && matrix.get(i, j) != 0.0 {
                    return Err(Error::Structure(format!(
                        "entry ({i}, {j}) = {} must be zero for a {orientation:?} factor",
                        matrix.get(i, j)
                    )));
                }
            }
        }
        Ok(TriangularFactor {
            matrix,
            orientation,
        })
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn n(&self) -> usize {
        self.matrix.rows()
    }

    pub fn into_matrix(self) -> Matrix {
        self.matrix
    }
}

fn check_symmetric(m: &Matrix) -> Result<Matrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    if !m.is_symmetric_within(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric { tol: SYMMETRY_TOL });
    }
    Ok(m.symmetrize())
}

/// Cholesky decomposition `M = L L^T` with `L` lower triangular and a
/// strictly positive diagonal.
///
/// Right-looking outer-product form with a fixed loop order, so repeated
/// factorizations are bit-identical. A nonpositive (or NaN) pivot reports
/// the failing index; no partial factor is returned.
pub fn cholesky_lower(m: &Matrix) -> Result<TriangularFactor> {
    let mut a = check_symmetric(m)?;
    let n = a.rows();
    let mut l = Matrix::zeros(n, n);
    for k in 0..n {
        let pivot = a.get(k, k);
        if !(pivot > 0.0) {
            return Err(Error::NotPositiveDefinite { index: k, pivot });
        }
        let root = pivot.sqrt();
        l.set(k, k, root);
        for i in (k + 1)..n {
            l.set(i, k, a.get(i, k) / root);
        }
        for j in (k + 1)..n {
            for i in j..n {
                let v = a.get(i, j) - l.get(i, k) * l.get(j, k);
                a.set(i, j, v);
            }
        }
    }
    TriangularFactor::new(l, Orientation::Lower)
}

/// Reverse Cholesky decomposition `M = U U^T` with `U` upper triangular
/// and a strictly positive diagonal.
///
/// Equals `reversal_permute(cholesky_lower(reversal_permute(M)))` bit for
/// bit. Pivot failures are reported in the original index order.
pub fn reverse_cholesky(m: &Matrix) -> Result<TriangularFactor> {
    let n = m.rows();
    let reversed = if m.is_square() {
        m.reversal_permute()
    } else {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    };
    let l = cholesky_lower(&reversed).map_err(|e| match e {
        Error::NotPositiveDefinite { index, pivot } => Error::NotPositiveDefinite {
            index: n - 1 - index,
            pivot,
        },
        other => other,
    })?;
    TriangularFactor::new(l.matrix().reversal_permute(), Orientation::Upper)
}

/// `(L^{-1})^T` for a lower factor, computed column by column through
/// forward substitution against the identity. The result is upper
/// triangular with positive diagonal.
pub fn invert_lower_transpose(l: &TriangularFactor) -> Result<Matrix> {
    assert_eq!(
        l.orientation(),
        Orientation::Lower,
        "inverse-transpose expects a lower factor"
    );
    let x = l
        .matrix()
        .forward_substitution(&Matrix::identity(l.n()))?;
    Ok(x.transpose())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    #[test]
    fn cholesky_identity() {
        let l = cholesky_lower(&Matrix::identity(3)).unwrap();
        assert_eq!(*l.matrix(), Matrix::identity(3));
    }

    #[test]
    fn cholesky_hand_case() {
        let m = Matrix::from_rows(&[&[4.0, 2.0], &[2.0, 5.0]]);
        let l = cholesky_lower(&m).unwrap();
        let expect = Matrix::from_rows(&[&[2.0, 0.0], &[1.0, 2.0]]);
        assert_eq!(*l.matrix(), expect);
        let rec = l.matrix().matmul(&l.matrix().transpose()).unwrap();
        assert_eq!(rec, m);
    }

    #[test]
    fn cholesky_indefinite_reports_index() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        match cholesky_lower(&m) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected pivot failure, got {other:?}"),
        }
    }

    #[test]
    fn cholesky_rejects_asymmetric() {
        let m = Matrix::from_rows(&[&[1.0, 2.0], &[0.5, 1.0]]);
        assert!(matches!(
            cholesky_lower(&m),
            Err(Error::NotSymmetric { .. })
        ));
    }

    #[test]
    fn cholesky_nan_pivot_is_not_positive_definite() {
        let m = Matrix::from_rows(&[&[f64::NAN, 0.0], &[0.0, 1.0]]);
        // NaN is symmetric-tolerated only off the diagonal; the diagonal
        // NaN must surface as a pivot failure, not propagate.
        assert!(matches!(
            cholesky_lower(&m),
            Err(Error::NotPositiveDefinite { index: 0, .. })
        ));
    }

    #[test]
    fn structural_zeros_are_exact() {
        let m = Matrix::from_rows(&[
            &[4.0, 2.0, 0.8],
            &[2.0, 5.0, 1.2],
            &[0.8, 1.2, 3.0],
        ]);
        let l = cholesky_lower(&m).unwrap();
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(l.matrix().get(i, j).to_bits(), 0.0f64.to_bits());
            }
        }
    }

    #[test]
    fn reverse_cholesky_identity() {
        let u = reverse_cholesky(&Matrix::identity(2)).unwrap();
        assert_eq!(*u.matrix(), Matrix::identity(2));
    }

    #[test]
    fn reverse_cholesky_hand_case() {
        // u22^2 = 4, u12 u22 = 2, u11^2 + u12^2 = 5
        let m = Matrix::from_rows(&[&[5.0, 2.0], &[2.0, 4.0]]);
        let u = reverse_cholesky(&m).unwrap();
        let expect = Matrix::from_rows(&[&[2.0, 1.0], &[0.0, 2.0]]);
        assert_eq!(*u.matrix(), expect);
        assert_eq!(u.orientation(), Orientation::Upper);
    }

    #[test]
    fn reverse_cholesky_diagonal() {
        let m = Matrix::from_rows(&[&[9.0, 0.0], &[0.0, 4.0]]);
        let u = reverse_cholesky(&m).unwrap();
        assert_eq!(
            *u.matrix(),
            Matrix::from_rows(&[&[3.0, 0.0], &[0.0, 2.0]])
        );
    }

    #[test]
    fn reverse_cholesky_matches_permuted_construction_bitwise() {
        let m = Matrix::from_rows(&[
            &[6.0, 2.0, 1.0],
            &[2.0, 5.0, 2.0],
            &[1.0, 2.0, 4.0],
        ]);
        let u = reverse_cholesky(&m).unwrap();
        let via_perm = cholesky_lower(&m.reversal_permute())
            .unwrap()
            .into_matrix()
            .reversal_permute();
        assert_eq!(*u.matrix(), via_perm);
    }

    #[test]
    fn reverse_cholesky_error_index_in_original_coordinates() {
        // Indefinite in a way that breaks at reversed index 1 -> original 1
        // for the 3x3 case below the leading 2x2 of the reversed matrix is
        // [[1,2],[2,1]], failing at reversed pivot 1 = original index 1.
        let m = Matrix::from_rows(&[
            &[1.0, 0.0, 0.0],
            &[0.0, 1.0, 2.0],
            &[0.0, 2.0, 1.0],
        ]);
        match reverse_cholesky(&m) {
            Err(Error::NotPositiveDefinite { index, .. }) => assert_eq!(index, 1),
            other => panic!("expected pivot failure, got {other:?}"),
        }
    }

    #[test]
    fn invert_lower_transpose_cases() {
        let i3 = TriangularFactor::new(Matrix::identity(3), Orientation::Lower).unwrap();
        assert_eq!(invert_lower_transpose(&i3).unwrap(), Matrix::identity(3));

        let l = TriangularFactor::new(
            Matrix::from_rows(&[&[2.0, 0.0], &[1.0, 2.0]]),
            Orientation::Lower,
        )
        .unwrap();
        let inv_t = invert_lower_transpose(&l).unwrap();
        assert_eq!(
            inv_t,
            Matrix::from_rows(&[&[0.5, -0.25], &[0.0, 0.5]])
        );

        let d = TriangularFactor::new(
            Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 4.0]]),
            Orientation::Lower,
        )
        .unwrap();
        assert_eq!(
            invert_lower_transpose(&d).unwrap(),
            Matrix::from_rows(&[&[0.5, 0.0], &[0.0, 0.25]])
        );
    }

    #[test]
    fn invert_lower_transpose_against_product() {
        let l = cholesky_lower(&Matrix::from_rows(&[
            &[4.0, 2.0, 1.0],
            &[2.0, 6.0, 3.0],
            &[1.0, 3.0, 5.0],
        ]))
        .unwrap();
        let inv_t = invert_lower_transpose(&l).unwrap();
        // inv_t * l^T = I
        let prod = inv_t.matmul(&l.matrix().transpose()).unwrap();
        let resid = prod.sub(&Matrix::identity(3)).two_norm().value;
        assert!(resid <= 3.0 * 1e-12 * l.matrix().condition_number().unwrap());
    }

    #[test]
    fn triangular_factor_rejects_bad_structure() {
        let not_zeroed = Matrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        assert!(TriangularFactor::new(not_zeroed, Orientation::Lower).is_err());
        let bad_diag = Matrix::from_rows(&[&[1.0, 0.0], &[0.0, -1.0]]);
        assert!(TriangularFactor::new(bad_diag, Orientation::Lower).is_err());
    }

    #[test]
    fn closed_form_2x2_and_3x3_oracle() {
        let mut rng = crate::rng::RngStream::new(5);
        for _ in 0..50 {
            // random SPD 2x2: [[a, b], [b, c]] with a > 0, det > 0
            let a = 0.5 + rng.uniform();
            let b = rng.uniform() - 0.5;
            let c = (b * b) / a + 0.5 + rng.uniform();
            let m = Matrix::from_rows(&[&[a, b], &[b, c]]);
            let l = cholesky_lower(&m).unwrap();
            let l11 = a.sqrt();
            let l21 = b / l11;
            let l22 = (c - l21 * l21).sqrt();
            assert_close(l.matrix().get(0, 0), l11, 1e-13);
            assert_close(l.matrix().get(1, 0), l21, 1e-13);
            assert_close(l.matrix().get(1, 1), l22, 1e-13);

            let u = reverse_cholesky(&m).unwrap();
            // closed form: u22 = sqrt(c), u12 = b / u22, u11 = sqrt(a - u12^2)
            let u22 = c.sqrt();
            let u12 = b / u22;
            let u11 = (a - u12 * u12).sqrt();
            assert_close(u.matrix().get(1, 1), u22, 1e-13);
            assert_close(u.matrix().get(0, 1), u12, 1e-13);
            assert_close(u.matrix().get(0, 0), u11, 1e-13);
        }
    }
}
