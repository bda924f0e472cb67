//! The two symplectic LL^T factorization algorithms.
//!
//! Both start the same way: Cholesky of the leading block, then a
//! multi-column forward substitution for the off-diagonal block. They
//! differ only in how the trailing block is produced:
//!
//! * W1 inverts the Cholesky factor by forward substitution against the
//!   identity and transposes (about 5/3 n^3 flops in total);
//! * W2 forms the Schur complement and takes its Reverse Cholesky
//!   decomposition (about 8/3 n^3 flops).
//!
//! Flop counts are documentation, never asserted at runtime. W2 is the
//! numerically stable choice; W1 is cheaper but its decomposition error
//! grows with the conditioning of the leading block.
//!
//! Symplecticity of the input is measured and reported but never enforced:
//! feeding perturbed non-symplectic matrices is a supported use and the
//! factor algorithms are well defined whenever their Cholesky stages
//! succeed. When a stage fails midway no partial factor is returned.

use std::fmt;
use std::str::FromStr;

use crate::cholesky::{
    cholesky_lower, invert_lower_transpose, reverse_cholesky, Orientation, TriangularFactor,
    SYMMETRY_TOL,
};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::symplectic::{factor_residual, BlockView, FactorResidual};

/// Which algorithm produced a factorization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    W1,
    W2,
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Algorithm::W1 => write!(f, "w1"),
            Algorithm::W2 => write!(f, "w2"),
        }
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "w1" => Ok(Algorithm::W1),
            "w2" => Ok(Algorithm::W2),
            other => Err(Error::ParamOutOfRange(format!(
                "unknown algorithm {other:?}, expected w1 or w2"
            ))),
        }
    }
}

/// Block lower-triangular factor `[L11 0; L21 L22]` with `L11` lower and
/// `L22` upper triangular, both with positive diagonals.
#[derive(Debug, Clone)]
pub struct BlockFactor {
    l11: TriangularFactor,
    l21: Matrix,
    l22: TriangularFactor,
}

impl BlockFactor {
    pub fn new(l11: TriangularFactor, l21: Matrix, l22: TriangularFactor) -> Result<Self> {
        let n = l11.n();
        if l11.orientation() != Orientation::Lower {
            return Err(Error::Structure("L11 must be lower triangular".into()));
        }
        if l22.orientation() != Orientation::Upper {
            return Err(Error::Structure("L22 must be upper triangular".into()));
        }
        if l21.rows() != n || l21.cols() != n || l22.n() != n {
            return Err(Error::DimensionMismatch {
                left_rows: n,
                left_cols: n,
                right_rows: l21.rows(),
                right_cols: l21.cols(),
            });
        }
        Ok(BlockFactor { l11, l21, l22 })
    }

    pub fn n(&self) -> usize {
        self.l11.n()
    }

    pub fn l11(&self) -> &TriangularFactor {
        &self.l11
    }

    pub fn l21(&self) -> &Matrix {
        &self.l21
    }

    pub fn l22(&self) -> &TriangularFactor {
        &self.l22
    }

    /// The full 2n x 2n matrix. The (1,2) block is exact zeros.
    pub fn assemble(&self) -> Matrix {
        let n = self.n();
        let mut out = Matrix::zeros(2 * n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, self.l11.matrix().get(i, j));
                out.set(n + i, j, self.l21.get(i, j));
                out.set(n + i, n + j, self.l22.matrix().get(i, j));
            }
        }
        out
    }
}

/// A factorization together with its error statistics, computed eagerly so
/// downstream reporting never recomputes them inconsistently.
#[derive(Debug, Clone)]
pub struct FactorizationOutput {
    pub factor: BlockFactor,
    pub algorithm: Algorithm,
    /// Decomposition error `||A - L L^T||_2 / ||A||_2`.
    pub dec: f64,
    pub residual: FactorResidual,
}

fn check_input(a: &Matrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if a.rows() % 2 != 0 {
        return Err(Error::OddDimension { dim: a.rows() });
    }
    if !a.is_symmetric_within(SYMMETRY_TOL) {
        return Err(Error::NotSymmetric { tol: SYMMETRY_TOL });
    }
    Ok(())
}

/// Shared first two steps of both algorithms: `L11` from the Cholesky
/// decomposition of `A11` and `L21` from `L11 L21^T = A12`.
fn leading_blocks(a: &Matrix) -> Result<(BlockView, TriangularFactor, Matrix)> {
    check_input(a)?;
    let view = BlockView::split(a)?;
    let l11 = cholesky_lower(&view.a11)?;
    let x = l11.matrix().forward_substitution(&view.a12)?;
    Ok((view, l11, x.transpose()))
}

fn schur_of(a22: &Matrix, l21: &Matrix) -> Result<Matrix> {
    Ok(a22.sub(&l21.matmul(&l21.transpose())?).symmetrize())
}

fn finish(
    a: &Matrix,
    l11: TriangularFactor,
    l21: Matrix,
    l22: TriangularFactor,
    algorithm: Algorithm,
) -> Result<FactorizationOutput> {
    let factor = BlockFactor::new(l11, l21, l22)?;
    let residual = factor_residual(&factor);
    let assembled = factor.assemble();
    let reconstruction = assembled.matmul(&assembled.transpose())?;
    let dec = a.sub(&reconstruction).two_norm().value / a.two_norm().value;
    Ok(FactorizationOutput {
        factor,
        algorithm,
        dec,
        residual,
    })
}

/// Schur complement `S = A22 - L21 L21^T` of the leading block, formed the
/// way W2 forms it and symmetrized. Equals `A22 - A12^T A11^{-1} A12`.
pub fn schur_complement(a: &BlockView) -> Result<Matrix> {
    let l11 = cholesky_lower(&a.a11)?;
    let x = l11.matrix().forward_substitution(&a.a12)?;
    schur_of(&a.a22, &x.transpose())
}

/// Algorithm W1: `L22 = (L11^{-1})^T` by forward substitution against the
/// identity.
pub fn factor_w1(a: &Matrix) -> Result<FactorizationOutput> {
    let (_, l11, l21) = leading_blocks(a)?;
    let l22 = TriangularFactor::new(invert_lower_transpose(&l11)?, Orientation::Upper)?;
    finish(a, l11, l21, l22, Algorithm::W1)
}

/// Algorithm W2: `L22` from the Reverse Cholesky decomposition of the
/// Schur complement.
pub fn factor_w2(a: &Matrix) -> Result<FactorizationOutput> {
    let (view, l11, l21) = leading_blocks(a)?;
    let s = schur_of(&view.a22, &l21)?;
    let l22 = reverse_cholesky(&s)?;
    finish(a, l11, l21, l22, Algorithm::W2)
}

/// Exact-arithmetic identity check `L22 = (L11^{-1})^T`, with a
/// conditioning-aware tolerance: true iff
/// `|| L22 - invert_lower_transpose(L11) ||_2 <= tol * kappa_2(A11)`.
pub fn verify_theorem2(a: &Matrix, out: &FactorizationOutput, tol: f64) -> Result<bool> {
    let view = BlockView::split(a)?;
    let kappa11 = view.a11.condition_number()?;
    let diff = out
        .factor
        .l22()
        .matrix()
        .sub(&invert_lower_transpose(out.factor.l11())?);
    Ok(diff.two_norm().value <= tol * kappa11)
}
