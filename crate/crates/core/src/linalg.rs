//! Dense complex linear algebra for qudit states.
//!
//! Matrices are stored row-major. Eigen- and singular-value problems are
//! delegated to `nalgebra`; everything that touches the tensor structure
//! (Kronecker products, partial traces, local conjugations) is done here on
//! the raw row-major buffer.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
pub use num_complex::Complex64 as C64;

use crate::{Error, Result};

/// Entrywise tolerance for Hermiticity, trace and positivity of states, and
/// for unitarity of operators.
pub const STATE_TOL: f64 = 1e-10;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Dense complex matrix in row-major order.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries. Rejects a wrong entry count
    /// and non-finite entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::invalid("shape", "rows and cols must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvariantViolation("non-finite matrix entry".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    /// Square matrix with the given real diagonal.
    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { ZERO })
    }

    /// The projector `|v><v|` (no normalization is applied).
    pub fn outer(v: &[C64]) -> Self {
        let n = v.len();
        Self::from_fn(n, n, |i, j| v[i] * v[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row-major entries.
    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    /// `self += s * other`.
    pub fn add_scaled(&mut self, other: &ComplexMatrix, s: f64) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * s;
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `M - M^dagger`; infinite for non-square input.
    pub fn hermiticity_error(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut err = 0.0f64;
        for i in 0..n {
            for j in i..n {
                err = err.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        err
    }

    /// `(M + M^dagger) / 2`.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub fn from_nalgebra(m: &DMatrix<C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    fn check_square(&self) -> Result<usize> {
        if self.is_square() {
            Ok(self.rows)
        } else {
            Err(Error::NotSquare {
                rows: self.rows,
                cols: self.cols,
            })
        }
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in add");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols), "shape mismatch in sub");
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// Panics when the inner dimensions disagree.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "shape mismatch in matmul");
        let mut out = ComplexMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == ZERO {
                    continue;
                }
                for (o, b) in out_row.iter_mut().zip(rhs.row(k)) {
                    *o += a * b;
                }
            }
        }
        out
    }
}

/// Kronecker product: `result[(i*rb + k), (j*cb + l)] = a[i,j] * b[k,l]`.
pub fn tensor_product(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (rb, cb) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * rb, a.cols * cb, |r, c| {
        a[(r / rb, c / cb)] * b[(r % rb, c % cb)]
    })
}

/// Conjugates the middle factor of a `left * d * right` dimensional operator:
/// returns `(1 (x) op (x) 1) state (1 (x) op (x) 1)^dagger`.
///
/// Cost is `O(D^2 d)` for `D = left * d * right`, against `O(D^3)` for the
/// dense product. Zero entries of `op` are skipped, which makes the
/// Weyl-Heisenberg operators (one nonzero per row) cheap.
pub fn local_conjugate(state: &ComplexMatrix, op: &ComplexMatrix, left: usize, right: usize) -> ComplexMatrix {
    let d = op.rows;
    let dim = left * d * right;
    assert!(op.is_square(), "local operator must be square");
    assert_eq!(
        (state.rows, state.cols),
        (dim, dim),
        "local operator does not fit the state"
    );

    // Left multiplication: rows of the result are combinations of rows.
    let mut tmp = ComplexMatrix::zeros(dim, dim);
    for l in 0..left {
        for a in 0..d {
            for b in 0..d {
                let coef = op[(a, b)];
                if coef == ZERO {
                    continue;
                }
                for s in 0..right {
                    let r_out = (l * d + a) * right + s;
                    let r_in = (l * d + b) * right + s;
                    let (src, dst) = (r_in * dim, r_out * dim);
                    for c in 0..dim {
                        let v = state.data[src + c];
                        tmp.data[dst + c] += coef * v;
                    }
                }
            }
        }
    }

    // Right multiplication by the adjoint acts on the column index.
    let mut out = ComplexMatrix::zeros(dim, dim);
    for r in 0..dim {
        let src = &tmp.data[r * dim..(r + 1) * dim];
        let dst = &mut out.data[r * dim..(r + 1) * dim];
        for l in 0..left {
            for a in 0..d {
                for b in 0..d {
                    let coef = op[(a, b)].conj();
                    if coef == ZERO {
                        continue;
                    }
                    for s in 0..right {
                        dst[(l * d + a) * right + s] += src[(l * d + b) * right + s] * coef;
                    }
                }
            }
        }
    }
    out
}

/// Hilbert-Schmidt (Frobenius) norm `sqrt(tr X^dagger X)`.
pub fn hs_norm(x: &ComplexMatrix) -> f64 {
    x.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Eigenvalues of the Hermitian part of `x`, ascending.
pub fn hermitian_eigenvalues(x: &ComplexMatrix) -> Result<Vec<f64>> {
    x.check_square()?;
    let h = x.hermitian_part().to_nalgebra();
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    Ok(ev)
}

/// Schatten-1 norm: the sum of singular values. Hermitian inputs go through
/// the eigenvalue route, everything else through an SVD.
pub fn trace_norm(x: &ComplexMatrix) -> Result<f64> {
    x.check_square()?;
    let scale = x.max_abs().max(1.0);
    if x.hermiticity_error() <= 1e-12 * scale {
        Ok(hermitian_eigenvalues(x)?.iter().map(|l| l.abs()).sum())
    } else {
        Ok(x.to_nalgebra().singular_values().iter().sum())
    }
}

/// Which half of a bipartition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Subsystem {
    A,
    B,
}

/// A qudit state: Hermitian, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates `matrix` and stores its Hermitian part.
    ///
    /// Hermiticity is checked before symmetrizing, so drift above
    /// [`STATE_TOL`] is still reported.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.check_square()?;
        if !matrix.is_finite() {
            return Err(Error::InvariantViolation("non-finite state entry".into()));
        }
        let herm = matrix.hermiticity_error();
        if herm > STATE_TOL {
            return Err(Error::InvariantViolation(format!(
                "state is not Hermitian (max |M - M^dagger| = {herm:e})"
            )));
        }
        let matrix = matrix.hermitian_part();
        let tr = matrix.trace().re;
        if (tr - 1.0).abs() > STATE_TOL {
            return Err(Error::InvariantViolation(format!("state trace is {tr}, not 1")));
        }
        let min_ev = hermitian_eigenvalues(&matrix)?[0];
        if min_ev < -STATE_TOL {
            return Err(Error::InvariantViolation(format!(
                "state has negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(Self { dim, matrix })
    }

    /// `|psi><psi|` for the normalized `ket`.
    pub fn from_ket(ket: &[C64]) -> Result<Self> {
        let norm = ket.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if ket.is_empty() || norm < 1e-300 || !norm.is_finite() {
            return Err(Error::invalid("ket", "vector must be nonzero and finite"));
        }
        let v: Vec<C64> = ket.iter().map(|z| z / norm).collect();
        Ok(Self {
            dim: v.len(),
            matrix: ComplexMatrix::outer(&v).hermitian_part(),
        })
    }

    /// Skips the eigenvalue check. Callers guarantee the state came from a
    /// valid state through a trace-preserving, positivity-preserving map.
    pub(crate) fn from_matrix_trusted(matrix: ComplexMatrix) -> Self {
        debug_assert!(matrix.is_square());
        debug_assert!(matrix.hermiticity_error() <= STATE_TOL);
        Self {
            dim: matrix.rows,
            matrix: matrix.hermitian_part(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix).expect("density matrices are square")
    }

    /// `||self - other||_1`, without the conventional factor 1/2.
    pub fn distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        trace_norm(&(&self.matrix - &other.matrix))
    }

    /// `||self - 1/d||_1`.
    pub fn distance_to_maximally_mixed(&self) -> f64 {
        let shift = 1.0 / self.dim as f64;
        let mut m = self.matrix.clone();
        for i in 0..self.dim {
            m[(i, i)] -= shift;
        }
        trace_norm(&m).expect("density matrices are square")
    }

    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::from_matrix_trusted(tensor_product(&self.matrix, &other.matrix))
    }
}

/// Unitary operator, `U^dagger U = 1` within [`STATE_TOL`] entrywise.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary {
    dim: usize,
    matrix: ComplexMatrix,
}

impl Unitary {
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.check_square()?;
        let err = (&matrix.adjoint() * &matrix).max_abs_diff(&ComplexMatrix::identity(dim));
        if err > STATE_TOL || !err.is_finite() {
            return Err(Error::InvariantViolation(format!(
                "operator is not unitary (max |U^dagger U - 1| = {err:e})"
            )));
        }
        Ok(Self { dim, matrix })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            matrix: ComplexMatrix::identity(dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary {
            dim: self.dim,
            matrix: self.matrix.adjoint(),
        }
    }

    /// `U rho U^dagger`.
    pub fn conjugate(&self, rho: &DensityMatrix) -> Result<DensityMatrix> {
        if rho.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: rho.dim,
            });
        }
        Ok(DensityMatrix::from_matrix_trusted(local_conjugate(
            &rho.matrix,
            &self.matrix,
            1,
            1,
        )))
    }
}

/// Reduced state on the subsystems listed in `keep` (strictly increasing
/// positions into `dims`).
pub fn partial_trace_multi(rho: &DensityMatrix, dims: &[usize], keep: &[usize]) -> Result<DensityMatrix> {
    let total: usize = dims.iter().product();
    if dims.is_empty() || dims.contains(&0) || total != rho.dim {
        return Err(Error::DimensionMismatch {
            expected: rho.dim,
            found: total,
        });
    }
    if keep.is_empty() || keep.windows(2).any(|w| w[0] >= w[1]) || keep[keep.len() - 1] >= dims.len() {
        return Err(Error::invalid(
            "keep",
            "kept subsystems must be nonempty, strictly increasing and in range",
        ));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep.contains(k)).collect();
    let kept_dim: usize = keep.iter().map(|&k| dims[k]).product();
    let traced_dim: usize = traced.iter().map(|&k| dims[k]).product();

    // Place value of each subsystem in the full row-major index.
    let mut place = vec![1usize; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        place[k] = place[k + 1] * dims[k + 1];
    }
    let offset = |subsystems: &[usize], mut idx: usize| -> usize {
        let mut full = 0;
        for &k in subsystems.iter().rev() {
            full += (idx % dims[k]) * place[k];
            idx /= dims[k];
        }
        full
    };
    let kept_off: Vec<usize> = (0..kept_dim).map(|i| offset(keep, i)).collect();
    let traced_off: Vec<usize> = (0..traced_dim).map(|t| offset(&traced, t)).collect();

    let m = &rho.matrix;
    let out = ComplexMatrix::from_fn(kept_dim, kept_dim, |i, j| {
        traced_off.iter().map(|&t| m[(kept_off[i] + t, kept_off[j] + t)]).sum()
    });
    Ok(DensityMatrix::from_matrix_trusted(out))
}

/// Reduced state of a bipartite `dims.0 * dims.1` system on `keep`.
pub fn partial_trace(rho: &DensityMatrix, dims: (usize, usize), keep: Subsystem) -> Result<DensityMatrix> {
    let keep = match keep {
        Subsystem::A => [0],
        Subsystem::B => [1],
    };
    partial_trace_multi(rho, &[dims.0, dims.1], &keep)
}

/// Eigenvalues in `[-STATE_TOL, 0)` are treated as zero.
fn entropy_of_spectrum(spectrum: &[f64]) -> f64 {
    let s: f64 = spectrum.iter().filter(|&&l| l > 0.0).map(|&l| -l * l.log2()).sum();
    s.max(0.0)
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    entropy_of_spectrum(&rho.eigenvalues())
}

/// `tr rho^2`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    // Hermitian, so tr(rho^2) = sum |rho_ij|^2.
    rho.matrix.data.iter().map(|z| z.norm_sqr()).sum()
}

/// `S(A) + S(B) - S(AB)` in bits.
pub fn mutual_information(rho_ab: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let a = partial_trace(rho_ab, dims, Subsystem::A)?;
    let b = partial_trace(rho_ab, dims, Subsystem::B)?;
    let i = von_neumann_entropy(&a) + von_neumann_entropy(&b) - von_neumann_entropy(rho_ab);
    if i < -1e-8 {
        return Err(Error::InvariantViolation(format!("negative mutual information {i}")));
    }
    Ok(i.max(0.0))
}

/// `(1/d) sum_{i,j} |ii><jj|` on `C^d (x) C^d`.
pub fn maximally_entangled_state(d: usize) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::invalid("d", "maximally entangled state needs d >= 2"));
    }
    let dim = d * d;
    let w = 1.0 / d as f64;
    let m = ComplexMatrix::from_fn(dim, dim, |r, c| {
        if r % (d + 1) == 0 && c % (d + 1) == 0 {
            C64::new(w, 0.0)
        } else {
            ZERO
        }
    });
    Ok(DensityMatrix::from_matrix_trusted(m))
}

/// `1/d`.
pub fn maximally_mixed(d: usize) -> Result<DensityMatrix> {
    if d == 0 {
        return Err(Error::invalid("d", "dimension must be positive"));
    }
    Ok(DensityMatrix::from_matrix_trusted(
        ComplexMatrix::identity(d).scale(1.0 / d as f64),
    ))
}
