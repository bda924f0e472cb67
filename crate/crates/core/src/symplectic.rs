//! The symplectic structure: J-products, defect metrics, residual-block
//! analysis and the analytic condition/perturbation bounds.
//!
//! J is never materialized. Every J-product is a block row swap with
//! negation, which is exact in floating point; that exactness is what makes
//! the (2,2) residual block of a block lower-triangular factor a bit-exact
//! zero rather than a small number.
//!
//! Defect norms are spectral norms, not Frobenius, because the sandwich
//! bound relating the residual blocks to the full defect is a 2-norm
//! statement.

use crate::error::{Error, Result};
use crate::factor::BlockFactor;
use crate::matrix::Matrix;

/// Default tolerance for symplecticity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Conformal 2x2 block partition of a 2n x 2n matrix.
#[derive(Debug, Clone)]
pub struct BlockView {
    pub a11: Matrix,
    pub a12: Matrix,
    pub a21: Matrix,
    pub a22: Matrix,
    pub n: usize,
}

impl BlockView {
    pub fn split(m: &Matrix) -> Result<BlockView> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        if m.rows() % 2 != 0 {
            return Err(Error::OddDimension { dim: m.rows() });
        }
        let n = m.rows() / 2;
        let mut blocks = [
            Matrix::zeros(n, n),
            Matrix::zeros(n, n),
            Matrix::zeros(n, n),
            Matrix::zeros(n, n),
        ];
        for i in 0..n {
            for j in 0..n {
                blocks[0].set(i, j, m.get(i, j));
                blocks[1].set(i, j, m.get(i, n + j));
                blocks[2].set(i, j, m.get(n + i, j));
                blocks[3].set(i, j, m.get(n + i, n + j));
            }
        }
        let [a11, a12, a21, a22] = blocks;
        Ok(BlockView {
            a11,
            a12,
            a21,
            a22,
            n,
        })
    }
}

/// Loss-of-symplecticity report for one matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymplecticDefect {
    /// Absolute defect `|| X^T J X - J ||_2`.
    pub delta: f64,
    /// Relative defect `delta / ||X||_2^2`.
    pub symp_rel: f64,
    /// `||X||_2`.
    pub norm_x: f64,
}

/// Residual-block report for a computed block lower-triangular factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FactorResidual {
    /// `|| L11^T L21 - L21^T L11 ||_2`; identical for both algorithms.
    pub f11_norm: f64,
    /// `|| L11^T L22 - I ||_2`; the block that separates the algorithms.
    pub f12_norm: f64,
    /// Full defect `Delta(L)` of the assembled factor.
    pub delta_l: f64,
}

/// `J x` computed as a block row swap with negation: the top half of the
/// result is the bottom half of `x`, and the bottom half is the negated
/// top half. Works for any 2n x k matrix.
pub fn apply_j(x: &Matrix) -> Result<Matrix> {
    if x.rows() % 2 != 0 {
        return Err(Error::OddDimension { dim: x.rows() });
    }
    let n = x.rows() / 2;
    let mut out = Matrix::zeros(x.rows(), x.cols());
    for i in 0..n {
        for j in 0..x.cols() {
            out.set(i, j, x.get(n + i, j));
            out.set(n + i, j, -x.get(i, j));
        }
    }
    Ok(out)
}

/// The residual `X^T J X - J`, with J applied implicitly and subtracted
/// entrywise along its two identity diagonals.
pub fn symplectic_residual(x: &Matrix) -> Result<Matrix> {
    if !x.is_square() {
        return Err(Error::NotSquare {
            rows: x.rows(),
            cols: x.cols(),
        });
    }
    let jx = apply_j(x)?;
    let mut r = x.transpose().matmul(&jx)?;
    let n = x.rows() / 2;
    for i in 0..n {
        r.set(i, n + i, r.get(i, n + i) - 1.0);
        r.set(n + i, i, r.get(n + i, i) + 1.0);
    }
    Ok(r)
}

/// Absolute and relative loss of symplecticity of `x`.
///
/// The zero matrix is rejected: its relative defect is undefined.
pub fn symplecticity_defect(x: &Matrix) -> Result<SymplecticDefect> {
    if x.max_abs() == 0.0 {
        return Err(Error::DegenerateInput);
    }
    let r = symplectic_residual(x)?;
    let delta = r.two_norm().value;
    let norm_x = x.two_norm().value;
    Ok(SymplecticDefect {
        delta,
        symp_rel: delta / (norm_x * norm_x),
        norm_x,
    })
}

/// Symplecticity test for a block lower-triangular matrix given as a view:
/// `|| a22^T a11 - I || <= tol` and `|| a21^T a11 - a11^T a21 || <= tol`.
///
/// The (1,2) block must be exactly zero.
pub fn is_symplectic_blocklower(l: &BlockView, tol: f64) -> Result<bool> {
    if l.a12.max_abs() != 0.0 {
        return Err(Error::Structure(
            "block (1,2) must be zero for a block lower-triangular matrix".into(),
        ));
    }
    let ident = Matrix::identity(l.n);
    let inv_pair = l.a22.transpose().matmul(&l.a11)?.sub(&ident);
    if inv_pair.two_norm().value > tol {
        return Ok(false);
    }
    let sym_pair = l
        .a21
        .transpose()
        .matmul(&l.a11)?
        .sub(&l.a11.transpose().matmul(&l.a21)?);
    Ok(sym_pair.two_norm().value <= tol)
}

/// Orthogonal-symplectic test: the block pattern `[C S; -S C]` within
/// `tol`, plus orthogonality `||Q^T Q - I|| <= tol`.
pub fn is_orthogonal_symplectic(q: &Matrix, tol: f64) -> bool {
    if !q.is_square() || q.rows() % 2 != 0 {
        return false;
    }
    let view = match BlockView::split(q) {
        Ok(v) => v,
        Err(_) => return false,
    };
    if view.a11.sub(&view.a22).two_norm().value > tol {
        return false;
    }
    if view.a12.add(&view.a21).two_norm().value > tol {
        return false;
    }
    let gram = match q.transpose().matmul(q) {
        Ok(g) => g,
        Err(_) => return false,
    };
    gram.sub(&Matrix::identity(q.rows())).two_norm().value <= tol
}

/// `J^T A^T J`, the inverse of a symplectic matrix. Symplecticity of the
/// input is the caller's responsibility; nothing is checked beyond shape.
///
/// Since `J^T = -J`, the value reduces to `J (J A)^T` and is computed with
/// two J-applications and one transpose, with no explicit sign fixup.
pub fn symplectic_inverse(a: &Matrix) -> Result<Matrix> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    apply_j(&apply_j(a)?.transpose())
}

/// Residual blocks and full defect of a computed factor.
///
/// `F11 = L11^T L21 - L21^T L11` and `F12 = L11^T L22 - I` are formed
/// straight from the blocks; the full 2n x 2n residual product is never
/// built here. The accumulation order mirrors the assembled-residual path
/// exactly, so these blocks are bitwise the corresponding blocks of
/// `L^T J L - J` and the sandwich bound
/// `max(||F11||, ||F12||) <= Delta(L) <= 2 max(||F11||, ||F12||)`
/// holds up to norm-estimation error.
pub fn factor_residual(l: &BlockFactor) -> FactorResidual {
    let n = l.n();
    let l11 = l.l11().matrix();
    let l21 = l.l21();
    let l22 = l.l22().matrix();

    let mut f11 = Matrix::zeros(n, n);
    let mut f12 = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = 0.0;
            for k in 0..n {
                acc += l11.get(k, i) * l21.get(k, j);
            }
            for k in 0..n {
                acc += l21.get(k, i) * (-l11.get(k, j));
            }
            f11.set(i, j, acc);

            let mut acc12 = 0.0;
            for k in 0..n {
                acc12 += l11.get(k, i) * l22.get(k, j);
            }
            if i == j {
                acc12 -= 1.0;
            }
            f12.set(i, j, acc12);
        }
    }

    let assembled = l.assemble();
    let r = symplectic_residual(&assembled).expect("assembled factor is square and even");
    FactorResidual {
        f11_norm: f11.two_norm().value,
        f12_norm: f12.two_norm().value,
        delta_l: r.two_norm().value,
    }
}

/// Certified upper bound `||X||^2 / (1 - Delta(X))` for the condition
/// number of a nearly symplectic matrix. Requires `Delta(X) < 1`.
pub fn kappa_bound(x: &Matrix) -> Result<f64> {
    let defect = symplecticity_defect(x)?;
    if defect.delta >= 1.0 {
        return Err(Error::BoundInapplicable {
            delta: defect.delta,
        });
    }
    Ok(defect.norm_x * defect.norm_x / (1.0 - defect.delta))
}

/// The 2n x 2n matrix `diag(D, -D)` with `D = sqrt(t-1) diag(1, 0, ..., 0)`.
///
/// Its defect equals `t` up to roundoff. For n >= 2 (or t = 1) the matrix
/// is singular; for n = 1 with t > 1 it is not, since every singular 2x2
/// matrix has defect exactly 1.
pub fn singular_with_defect(t: f64, n: usize) -> Result<Matrix> {
    if !(t >= 1.0) {
        return Err(Error::ParamOutOfRange(format!("t = {t} must be >= 1")));
    }
    assert!(n >= 1);
    let d = (t - 1.0).sqrt();
    let mut x = Matrix::zeros(2 * n, 2 * n);
    x.set(0, 0, d);
    x.set(n, n, -d);
    Ok(x)
}

/// Certified defect bound `||A||^2 (2 eps + eps^2)` for any perturbation
/// `A + E` of a symplectic `A` with `||E|| <= eps ||A||`.
pub fn perturbation_bound(norm_a: f64, eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::ParamOutOfRange(format!(
            "eps = {eps} must lie in (0, 1)"
        )));
    }
    if !(norm_a > 0.0) {
        return Err(Error::ParamOutOfRange(format!(
            "norm_a = {norm_a} must be positive"
        )));
    }
    Ok(norm_a * norm_a * (2.0 * eps + eps * eps))
}

/// Extracts the (2,2) block of `L^T J L - J` for a bit-exactness check.
/// Structural zeros in the factor never meet arithmetic, so the block is
/// expected to be exactly `+0.0` in every entry.
pub fn residual_f22(l: &BlockFactor) -> Matrix {
    let assembled = l.assemble();
    let r = symplectic_residual(&assembled).expect("assembled factor is square and even");
    let n = l.n();
    let mut f22 = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            f22.set(i, j, r.get(n + i, n + j));
        }
    }
    f22
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cholesky::{Orientation, TriangularFactor};

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn j2() -> Matrix {
        Matrix::from_rows(&[&[0.0, 1.0], &[-1.0, 0.0]])
    }

    #[test]
    fn apply_j_on_identity_gives_j() {
        assert_eq!(apply_j(&Matrix::identity(2)).unwrap(), j2());
    }

    #[test]
    fn apply_j_twice_negates() {
        let x = Matrix::from_rows(&[&[1.0, 2.0], &[3.0, 4.0]]);
        let jjx = apply_j(&apply_j(&x).unwrap()).unwrap();
        assert_eq!(jjx, x.scale(-1.0));
    }

    #[test]
    fn apply_j_column_vector() {
        let x = Matrix::from_col(&[1.0, 0.0]);
        assert_eq!(apply_j(&x).unwrap(), Matrix::from_col(&[0.0, -1.0]));
    }

    #[test]
    fn apply_j_rejects_odd_rows() {
        assert!(matches!(
            apply_j(&Matrix::zeros(3, 2)),
            Err(Error::OddDimension { dim: 3 })
        ));
    }

    #[test]
    fn defect_of_identity_is_exactly_zero() {
        let d = symplecticity_defect(&Matrix::identity(4)).unwrap();
        assert_eq!(d.delta, 0.0);
    }

    #[test]
    fn defect_of_j_is_roundoff() {
        let d = symplecticity_defect(&j2()).unwrap();
        assert!(d.delta <= 1e-15);
    }

    #[test]
    fn defect_of_unit_determinant_diagonal() {
        let x = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        let d = symplecticity_defect(&x).unwrap();
        assert!(d.delta <= 1e-15);
    }

    #[test]
    fn defect_rejects_zero_matrix() {
        assert!(matches!(
            symplecticity_defect(&Matrix::zeros(2, 2)),
            Err(Error::DegenerateInput)
        ));
    }

    #[test]
    fn defect_relative_consistency() {
        let x = Matrix::from_rows(&[&[1.5, 0.2], &[0.1, 0.8]]);
        let d = symplecticity_defect(&x).unwrap();
        assert_close(d.symp_rel, d.delta / (d.norm_x * d.norm_x), 1e-18);
    }

    fn view_from_diag_blocks(l11: f64, l21: f64, l22: f64) -> BlockView {
        let m = Matrix::from_rows(&[&[l11, 0.0], &[l21, l22]]);
        BlockView::split(&m).unwrap()
    }

    #[test]
    fn blocklower_identity_true_at_zero_tol() {
        let v = BlockView::split(&Matrix::identity(4)).unwrap();
        assert!(is_symplectic_blocklower(&v, 0.0).unwrap());
    }

    #[test]
    fn blocklower_forced_pair_true() {
        let v = view_from_diag_blocks(2.0, 0.0, 0.5);
        assert!(is_symplectic_blocklower(&v, 0.0).unwrap());
    }

    #[test]
    fn blocklower_wrong_inverse_false() {
        let v = view_from_diag_blocks(2.0, 0.0, 1.0);
        assert!(!is_symplectic_blocklower(&v, 1e-6).unwrap());
    }

    #[test]
    fn blocklower_rejects_nonzero_a12() {
        let m = Matrix::from_rows(&[&[1.0, 0.5], &[0.0, 1.0]]);
        let v = BlockView::split(&m).unwrap();
        assert!(matches!(
            is_symplectic_blocklower(&v, 1e-6),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn orthogonal_symplectic_cases() {
        assert!(is_orthogonal_symplectic(&Matrix::identity(4), 0.0));
        assert!(is_orthogonal_symplectic(&j2(), 0.0));
        let d = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        assert!(!is_orthogonal_symplectic(&d, 1e-10));
    }

    #[test]
    fn symplectic_inverse_cases() {
        assert_eq!(
            symplectic_inverse(&Matrix::identity(2)).unwrap(),
            Matrix::identity(2)
        );
        assert_eq!(symplectic_inverse(&j2()).unwrap(), j2().scale(-1.0));
        let a = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        assert_eq!(
            symplectic_inverse(&a).unwrap(),
            Matrix::from_rows(&[&[0.5, 0.0], &[0.0, 2.0]])
        );
    }

    fn block_factor_from_diag(l11: f64, l21: f64, l22: f64) -> BlockFactor {
        BlockFactor::new(
            TriangularFactor::new(Matrix::from_rows(&[&[l11]]), Orientation::Lower).unwrap(),
            Matrix::from_rows(&[&[l21]]),
            TriangularFactor::new(Matrix::from_rows(&[&[l22]]), Orientation::Upper).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn factor_residual_identity_is_zero() {
        let l = block_factor_from_diag(1.0, 0.0, 1.0);
        let r = factor_residual(&l);
        assert_eq!(r.f11_norm, 0.0);
        assert_eq!(r.f12_norm, 0.0);
        assert_eq!(r.delta_l, 0.0);
    }

    #[test]
    fn factor_residual_hand_case() {
        let l = block_factor_from_diag(1.0, 0.0, 2.0);
        let r = factor_residual(&l);
        assert_eq!(r.f11_norm, 0.0);
        assert_close(r.f12_norm, 1.0, 1e-13);
        assert_close(r.delta_l, 1.0, 1e-13);
    }

    #[test]
    fn factor_residual_blocks_match_assembled_residual_bitwise() {
        // moderately arbitrary 2x2 blocks
        let l11 = TriangularFactor::new(
            Matrix::from_rows(&[&[1.5, 0.0], &[0.7, 2.25]]),
            Orientation::Lower,
        )
        .unwrap();
        let l21 = Matrix::from_rows(&[&[0.3, -1.2], &[0.9, 0.11]]);
        let l22 = TriangularFactor::new(
            Matrix::from_rows(&[&[0.67, -0.2], &[0.0, 0.44]]),
            Orientation::Upper,
        )
        .unwrap();
        let bf = BlockFactor::new(l11, l21, l22).unwrap();

        let n = bf.n();
        let r = symplectic_residual(&bf.assemble()).unwrap();
        let l11m = bf.l11().matrix();
        let l21m = bf.l21();
        let l22m = bf.l22().matrix();
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += l11m.get(k, i) * l21m.get(k, j);
                }
                for k in 0..n {
                    acc += l21m.get(k, i) * (-l11m.get(k, j));
                }
                assert_eq!(acc.to_bits(), r.get(i, j).to_bits(), "F11 ({i},{j})");

                let mut acc12 = 0.0;
                for k in 0..n {
                    acc12 += l11m.get(k, i) * l22m.get(k, j);
                }
                if i == j {
                    acc12 -= 1.0;
                }
                assert_eq!(acc12.to_bits(), r.get(i, n + j).to_bits(), "F12 ({i},{j})");
            }
        }
    }

    #[test]
    fn residual_f22_is_bit_exact_zero() {
        let l11 = TriangularFactor::new(
            Matrix::from_rows(&[&[1.5, 0.0], &[-0.7, 2.25]]),
            Orientation::Lower,
        )
        .unwrap();
        let l21 = Matrix::from_rows(&[&[0.3, -1.2], &[0.9, 0.11]]);
        let l22 = TriangularFactor::new(
            Matrix::from_rows(&[&[0.67, -0.2], &[0.0, 0.44]]),
            Orientation::Upper,
        )
        .unwrap();
        let bf = BlockFactor::new(l11, l21, l22).unwrap();
        let f22 = residual_f22(&bf);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(f22.get(i, j).to_bits(), 0.0f64.to_bits());
            }
        }
    }

    #[test]
    fn kappa_bound_cases() {
        assert_close(kappa_bound(&Matrix::identity(2)).unwrap(), 1.0, 1e-12);
        assert_close(kappa_bound(&j2()).unwrap(), 1.0, 1e-12);
        let x = Matrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.5]]);
        let bound = kappa_bound(&x).unwrap();
        assert_close(bound, 4.0, 1e-11);
        let kappa = x.condition_number().unwrap();
        assert_close(kappa, 4.0, 1e-11);
        assert!(kappa <= bound * (1.0 + 1e-8));
    }

    #[test]
    fn kappa_bound_inapplicable_above_one() {
        let x = singular_with_defect(5.0, 2).unwrap();
        assert!(matches!(
            kappa_bound(&x),
            Err(Error::BoundInapplicable { .. })
        ));
    }

    #[test]
    fn singular_with_defect_t1_is_zero_matrix() {
        let x = singular_with_defect(1.0, 3).unwrap();
        assert_eq!(x.max_abs(), 0.0);
        let delta = symplectic_residual(&x).unwrap().two_norm().value;
        assert_close(delta, 1.0, 1e-12);
    }

    #[test]
    fn singular_with_defect_delta_matches_t() {
        let x = singular_with_defect(5.0, 2).unwrap();
        let delta = symplectic_residual(&x).unwrap().two_norm().value;
        assert_close(delta, 5.0, 5.0 * 1e-12);
        assert!(matches!(
            x.lu_solve(&Matrix::identity(4)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn singular_with_defect_rejects_small_t() {
        assert!(matches!(
            singular_with_defect(0.5, 2),
            Err(Error::ParamOutOfRange(_))
        ));
    }

    #[test]
    fn perturbation_bound_direct_values() {
        assert_close(perturbation_bound(1.0, 0.5).unwrap(), 1.25, 1e-15);
        assert_close(perturbation_bound(2.0, 0.1).unwrap(), 0.84, 1e-15);
        assert!(perturbation_bound(1.0, 1.5).is_err());
        assert!(perturbation_bound(0.0, 0.5).is_err());
    }
}
