//! Symplectic LL^T factorization of symmetric positive definite symplectic
//! matrices, with loss-of-symplecticity diagnostics.
//!
//! A 2n x 2n real matrix `A` is symplectic when `A^T J A = J` for the
//! canonical skew-symmetric `J = [0 I; -I 0]`. For SPD symplectic `A` there
//! is a factorization `A = L L^T` with `L` block lower triangular and
//! itself symplectic. Two algorithms compute it:
//!
//! * `W1` inverts the Cholesky factor of the leading block directly;
//!   cheap, but its decomposition error tracks the conditioning of that
//!   block.
//! * `W2` takes the Reverse Cholesky decomposition of the Schur
//!   complement; costlier and numerically stable.
//!
//! The crate provides the dense kernels ([`matrix`]), both factorizations
//! ([`factor`]), the symplectic structure and its analytic bounds
//! ([`symplectic`]), deterministic and seeded test-matrix families
//! ([`generators`]) and replayable statistics sweeps ([`experiments`]).
//! The `symplt` binary exposes all of it on the command line.

pub mod cholesky;
pub mod error;
pub mod experiments;
pub mod factor;
pub mod generators;
pub mod matrix;
mod rng;
pub mod symplectic;

pub use error::{Error, Result};
pub use matrix::{ComplexMatrix, Matrix, NormReport};
