//! Dense row-major matrix type and the shared numerical kernels.
//!
//! Everything downstream (factorizations, defect metrics, experiment
//! sweeps) is built on this module: multiplication, triangular solves,
//! LU with partial pivoting, a power-iteration spectral norm and the
//! CSV interchange format.
//!
//! All kernels use fixed, documented accumulation orders so that repeated
//! runs on one platform are bit-reproducible. Inner products accumulate
//! left to right in index order; no extended-precision accumulation is
//! used anywhere.

use std::path::Path;

use crate::error::{Error, Result};
use crate::rng::mix64;

/// Dense real matrix, 64-bit entries in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

/// Outcome of a spectral-norm estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    /// Estimated 2-norm (largest singular value).
    pub value: f64,
    /// Power-iteration steps actually taken.
    pub iterations: usize,
    /// False when the Rayleigh sequence did not settle within the cap;
    /// `value` is then the best estimate and the caller decides.
    pub converged: bool,
}

/// Relative tolerance between successive Rayleigh estimates.
const POWER_TOL: f64 = 1e-12;
/// Iteration cap for the power method.
const POWER_MAX_ITERATIONS: usize = 5000;

impl Matrix {
    /// Creates a matrix from row-major data.
    ///
    /// Returns an error when `data.len() != rows * cols`. Entries are not
    /// inspected here; file readers and generators are the places that
    /// guarantee finiteness.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                left_rows: rows,
                left_cols: cols,
                right_rows: data.len() / cols.max(1),
                right_cols: cols,
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Test helper: builds a matrix from nested row slices.
    pub fn from_rows(rows: &[&[f64]]) -> Self {
        assert!(!rows.is_empty());
        let cols = rows[0].len();
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            assert_eq!(r.len(), cols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: rows.len(),
            cols,
            data,
        }
    }

    pub fn from_col(entries: &[f64]) -> Self {
        Matrix {
            rows: entries.len(),
            cols: 1,
            data: entries.to_vec(),
        }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Largest entry magnitude; 0 for the zero matrix.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc, &x| acc.max(x.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|&x| x * x).sum::<f64>().sqrt()
    }

    /// Transpose: (i, j) -> (j, i).
    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// Product `self * other` with inner products accumulated left to
    /// right in index order, so results are bit-reproducible.
    pub fn matmul(&self, other: &Matrix) -> Result<Matrix> {
        if self.cols != other.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: other.rows,
                right_cols: other.cols,
            });
        }
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0.0;
                for k in 0..self.cols {
                    acc += self.data[i * self.cols + k] * other.data[k * other.cols + j];
                }
                out.data[i * other.cols + j] = acc;
            }
        }
        Ok(out)
    }

    /// Entrywise sum; shapes must agree.
    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// Entrywise difference; shapes must agree.
    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    pub fn scale(&self, c: f64) -> Matrix {
        let data = self.data.iter().map(|x| c * x).collect();
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data,
        }
    }

    /// (M + M^T) / 2 for square input; the result is bitwise symmetric.
    pub fn symmetrize(&self) -> Matrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = (self.get(i, j) + self.get(j, i)) / 2.0;
            }
        }
        out
    }

    /// True when `max |a_ij - a_ji| <= tol * max |a_ij|`.
    pub fn is_symmetric_within(&self, tol: f64) -> bool {
        if !self.is_square() {
            return false;
        }
        let scale = self.max_abs();
        if scale == 0.0 {
            return true;
        }
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                if (self.get(i, j) - self.get(j, i)).abs() > tol * scale {
                    return false;
                }
            }
        }
        true
    }

    fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.cols);
        let mut out = vec![0.0; self.rows];
        for i in 0..self.rows {
            let mut acc = 0.0;
            for k in 0..self.cols {
                acc += self.data[i * self.cols + k] * v[k];
            }
            out[i] = acc;
        }
        out
    }

    fn mul_vec_transposed(&self, w: &[f64]) -> Vec<f64> {
        debug_assert_eq!(w.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for j in 0..self.cols {
            let mut acc = 0.0;
            for k in 0..self.rows {
                acc += self.data[k * self.cols + j] * w[k];
            }
            out[j] = acc;
        }
        out
    }

    /// Spectral norm estimate by power iteration on `A^T A`, applied as two
    /// matrix-vector products per step (the Gram matrix is never formed).
    ///
    /// The start vector is a fixed pseudorandom positive vector. A uniform
    /// start vector is exactly orthogonal to the dominant singular direction
    /// of some structured inputs (constant-diagonal 2x2 blocks show up in
    /// the inverse test family) and the iteration then settles on the wrong
    /// eigenvalue, so a seeded start is used instead; it is constant across
    /// runs and platforms. Stops when successive Rayleigh estimates agree
    /// to `1e-12` relative, with a cap of 5000 steps.
    pub fn two_norm(&self) -> NormReport {
        let mut v = start_vector(self.cols);
        let mut lambda_prev: Option<f64> = None;
        let mut lambda = 0.0;
        for iter in 1..=POWER_MAX_ITERATIONS {
            let w = self.mul_vec(&v);
            lambda = w.iter().fold(0.0, |acc, x| acc + x * x);
            if lambda == 0.0 {
                // A v vanished: exact for the zero matrix, otherwise the
                // start hit the null space and the caller gets the best
                // (zero) estimate flagged as unconverged.
                let zero = self.data.iter().all(|&x| x == 0.0);
                return NormReport {
                    value: 0.0,
                    iterations: iter,
                    converged: zero,
                };
            }
            if let Some(prev) = lambda_prev {
                if (lambda - prev).abs() <= POWER_TOL * lambda {
                    return NormReport {
                        value: lambda.sqrt(),
                        iterations: iter,
                        converged: true,
                    };
                }
            }
            lambda_prev = Some(lambda);
            let u = self.mul_vec_transposed(&w);
            let norm_u = u.iter().fold(0.0, |acc, x| acc + x * x).sqrt();
            if norm_u == 0.0 {
                return NormReport {
                    value: lambda.sqrt(),
                    iterations: iter,
                    converged: false,
                };
            }
            for (vi, ui) in v.iter_mut().zip(&u) {
                *vi = ui / norm_u;
            }
        }
        NormReport {
            value: lambda.sqrt(),
            iterations: POWER_MAX_ITERATIONS,
            converged: false,
        }
    }

    /// Solves `L X = b` for lower-triangular `L`, column by column.
    ///
    /// Only the lower triangle of `self` is referenced. Multi-column
    /// right-hand sides are solved independently in column order.
    pub fn forward_substitution(&self, b: &Matrix) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: b.rows,
                right_cols: b.cols,
            });
        }
        let n = self.rows;
        for i in 0..n {
            let d = self.get(i, i);
            if d == 0.0 || !d.is_finite() {
                return Err(Error::SingularTriangular { index: i });
            }
        }
        let mut x = Matrix::zeros(n, b.cols);
        for j in 0..b.cols {
            for i in 0..n {
                let mut acc = b.get(i, j);
                for k in 0..i {
                    acc -= self.get(i, k) * x.get(k, j);
                }
                x.set(i, j, acc / self.get(i, i));
            }
        }
        Ok(x)
    }

    /// Solves `A X = b` by LU with partial pivoting.
    ///
    /// An exact zero pivot after row exchange reports the singular column.
    pub fn lu_solve(&self, b: &Matrix) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        if b.rows != self.rows {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: b.rows,
                right_cols: b.cols,
            });
        }
        let n = self.rows;
        let mut lu = self.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let mut pivot_row = k;
            let mut pivot_mag = lu.get(k, k).abs();
            for i in (k + 1)..n {
                let mag = lu.get(i, k).abs();
                if mag > pivot_mag {
                    pivot_mag = mag;
                    pivot_row = i;
                }
            }
            if pivot_mag == 0.0 {
                return Err(Error::Singular { column: k });
            }
            if pivot_row != k {
                for j in 0..n {
                    let a = lu.get(k, j);
                    let b_ = lu.get(pivot_row, j);
                    lu.set(k, j, b_);
                    lu.set(pivot_row, j, a);
                }
                perm.swap(k, pivot_row);
            }
            let pivot = lu.get(k, k);
            for i in (k + 1)..n {
                let m = lu.get(i, k) / pivot;
                lu.set(i, k, m);
                for j in (k + 1)..n {
                    let v = lu.get(i, j) - m * lu.get(k, j);
                    lu.set(i, j, v);
                }
            }
        }

        let mut x = Matrix::zeros(n, b.cols);
        let mut y = vec![0.0; n];
        for col in 0..b.cols {
            for i in 0..n {
                let mut acc = b.get(perm[i], col);
                for k in 0..i {
                    acc -= lu.get(i, k) * y[k];
                }
                y[i] = acc;
            }
            for i in (0..n).rev() {
                let mut acc = y[i];
                for k in (i + 1)..n {
                    acc -= lu.get(i, k) * x.get(k, col);
                }
                x.set(i, col, acc / lu.get(i, i));
            }
        }
        Ok(x)
    }

    /// Spectral condition number via an explicit LU-based inverse:
    /// `two_norm(A) * two_norm(A^{-1})`.
    pub fn condition_number(&self) -> Result<f64> {
        if !self.is_square() {
            return Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let inv = self.lu_solve(&Matrix::identity(self.rows))?;
        Ok(self.two_norm().value * inv.two_norm().value)
    }

    /// Similarity transform by the index-reversal permutation:
    /// entry (i, j) moves to (n-1-i, n-1-j). An involution.
    pub fn reversal_permute(&self) -> Matrix {
        assert!(self.is_square(), "reversal permutation needs a square matrix");
        let n = self.rows;
        let mut out = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[(n - 1 - i) * n + (n - 1 - j)] = self.data[i * n + j];
            }
        }
        out
    }

    /// Parses the CSV interchange format: one row per line, comma-separated
    /// decimal entries, no header. All entries must be finite.
    pub fn parse_csv(text: &str) -> Result<Matrix> {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let mut row = Vec::new();
            for field in line.split(',') {
                let v: f64 = field.trim().parse().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    msg: format!("bad float {:?}: {e}", field.trim()),
                })?;
                if !v.is_finite() {
                    return Err(Error::NonFinite {
                        row: rows.len(),
                        col: row.len(),
                    });
                }
                row.push(v);
            }
            if let Some(first) = rows.first() {
                if row.len() != first.len() {
                    return Err(Error::Parse {
                        line: lineno + 1,
                        msg: format!("expected {} entries, found {}", first.len(), row.len()),
                    });
                }
            }
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(Error::Parse {
                line: 0,
                msg: "empty matrix".into(),
            });
        }
        let cols = rows[0].len();
        let data: Vec<f64> = rows.into_iter().flatten().collect();
        Matrix::new(data.len() / cols, cols, data)
    }

    /// Formats to CSV with 17 significant digits, which round-trips every
    /// finite double exactly.
    pub fn format_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            for j in 0..self.cols {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{:.16e}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }

    pub fn read_csv(path: &Path) -> Result<Matrix> {
        let text = std::fs::read_to_string(path)?;
        Matrix::parse_csv(&text)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.format_csv())?;
        Ok(())
    }
}

/// Fixed pseudorandom start vector for the power method, normalized.
/// Entries lie in (1, 2) so the vector is never orthogonal to a
/// nonnegative dominant eigenvector.
fn start_vector(n: usize) -> Vec<f64> {
    const SEED: u64 = 0xD1B5_4A32_D192_ED03;
    let mut v = Vec::with_capacity(n);
    for i in 0..n {
        let h = mix64(SEED ^ (i as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        v.push(1.0 + ((h >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64));
    }
    let norm = v.iter().fold(0.0, |acc, x| acc + x * x).sqrt();
    for x in &mut v {
        *x /= norm;
    }
    v
}

/// Dense complex matrix stored as separate real and imaginary arrays.
///
/// Only what the orthogonal-symplectic generator needs lives here: a
/// Householder QR that retains the unitary factor.
#[derive(Debug, Clone)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    re: Vec<f64>,
    im: Vec<f64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0);
        ComplexMatrix {
            rows,
            cols,
            re: vec![0.0; rows * cols],
            im: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m.re[i * n + i] = 1.0;
        }
        m
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> (f64, f64) {
        let idx = i * self.cols + j;
        (self.re[idx], self.im[idx])
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, re: f64, im: f64) {
        let idx = i * self.cols + j;
        self.re[idx] = re;
        self.im[idx] = im;
    }

    /// Real part as a `Matrix`.
    pub fn real(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.re.clone(),
        }
    }

    /// Imaginary part as a `Matrix`.
    pub fn imag(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.im.clone(),
        }
    }

    /// `|| Q^H Q - I ||_F`, the unitarity residual.
    pub fn unitarity_residual(&self) -> f64 {
        assert!(self.rows == self.cols);
        let n = self.rows;
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                let (mut re, mut im) = (0.0, 0.0);
                for k in 0..n {
                    let (ar, ai) = self.get(k, i);
                    let (br, bi) = self.get(k, j);
                    // conj(a) * b
                    re += ar * br + ai * bi;
                    im += ar * bi - ai * br;
                }
                if i == j {
                    re -= 1.0;
                }
                acc += re * re + im * im;
            }
        }
        acc.sqrt()
    }

    /// Unitary factor Q of a Householder QR. R is discarded and no column
    /// sign normalization is applied; rank-deficient input still yields a
    /// unitary Q because Q is a product of exact reflectors.
    pub fn complex_qr_q(&self) -> ComplexMatrix {
        assert!(self.rows == self.cols, "QR generator expects square input");
        let n = self.rows;
        let mut r = self.clone();
        let mut q = ComplexMatrix::identity(n);
        let mut v_re = vec![0.0; n];
        let mut v_im = vec![0.0; n];

        for k in 0..n {
            let len = n - k;
            let mut norm_x_sq = 0.0;
            for i in 0..len {
                let (xr, xi) = r.get(k + i, k);
                v_re[i] = xr;
                v_im[i] = xi;
                norm_x_sq += xr * xr + xi * xi;
            }
            let norm_x = norm_x_sq.sqrt();
            if norm_x == 0.0 {
                continue;
            }
            let (ar, ai) = (v_re[0], v_im[0]);
            let a_abs = (ar * ar + ai * ai).sqrt();
            let (pr, pi) = if a_abs == 0.0 {
                (1.0, 0.0)
            } else {
                (ar / a_abs, ai / a_abs)
            };
            // v = x + phase * ||x|| * e1
            v_re[0] += pr * norm_x;
            v_im[0] += pi * norm_x;
            let mut v_norm_sq = 0.0;
            for i in 0..len {
                v_norm_sq += v_re[i] * v_re[i] + v_im[i] * v_im[i];
            }
            if v_norm_sq == 0.0 {
                continue;
            }
            let beta = 2.0 / v_norm_sq;

            // R <- H R on trailing columns: x -= beta (v^H x) v
            for j in k..n {
                let (mut wr, mut wi) = (0.0, 0.0);
                for i in 0..len {
                    let (rr, ri) = r.get(k + i, j);
                    wr += v_re[i] * rr + v_im[i] * ri;
                    wi += v_re[i] * ri - v_im[i] * rr;
                }
                wr *= beta;
                wi *= beta;
                for i in 0..len {
                    let (rr, ri) = r.get(k + i, j);
                    r.set(
                        k + i,
                        j,
                        rr - (wr * v_re[i] - wi * v_im[i]),
                        ri - (wr * v_im[i] + wi * v_re[i]),
                    );
                }
            }

            // Q <- Q H: row by row, q -= beta (q v) conj(v)^T
            for i in 0..n {
                let (mut tr, mut ti) = (0.0, 0.0);
                for c in 0..len {
                    let (qr, qi) = q.get(i, k + c);
                    tr += qr * v_re[c] - qi * v_im[c];
                    ti += qr * v_im[c] + qi * v_re[c];
                }
                tr *= beta;
                ti *= beta;
                for c in 0..len {
                    let (qr, qi) = q.get(i, k + c);
                    q.set(
                        i,
                        k + c,
                        qr - (tr * v_re[c] + ti * v_im[c]),
                        qi - (-tr * v_im[c] + ti * v_re[c]),
                    );
                }
            }
        }
        q
    }
}
