//! Dense complex-matrix kernel.
//!
//! Storage is row-major and dense. The largest matrices in this crate are joint
//! system-control operators on a truncated Fock space (a few hundred rows), so
//! no sparsity is exploited anywhere.
//!
//! Three validated wrappers sit on top of [`ComplexMatrix`]:
//! [`DensityMatrix`], [`HermitianOperator`] and [`UnitaryOperator`]. Each checks
//! its invariant on construction against the tolerances in [`crate::tolerance`].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tolerance;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            write!(f, "  ")?;
            for c in 0..self.cols {
                let z = self[(r, c)];
                write!(f, "{:+.6}{:+.6}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidParameter(format!(
                "empty matrix {rows}x{cols}"
            )));
        }
        if data.len() != rows * cols {
            return Err(Error::BadLength {
                expected: rows * cols,
                found: data.len(),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, data })
    }

    /// Square matrix from a real row-major slice.
    pub fn from_real(n: usize, data: &[f64]) -> Result<Self> {
        Self::from_row_major(n, n, data.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(rows > 0 && cols > 0, "empty matrix");
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self::from_fn(rows, cols, |_, _| ZERO)
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, n, |r, c| if r == c { ONE } else { ZERO })
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |r, c| if r == c { diag[r] } else { ZERO })
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(
            n,
            n,
            |r, c| if r == c { C64::new(diag[r], 0.0) } else { ZERO },
        )
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        Self::from_fn(u.len(), v.len(), |r, c| u[r] * v[c].conj())
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

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn column(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols))
            .map(|k| self[(k, k)])
            .collect()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(C64::new(s, 0.0))
    }

    pub fn trace(&self) -> C64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|k| self[(k, k)]).sum()
    }

    /// tr(self · rhs) without forming the product.
    pub fn trace_product(&self, rhs: &ComplexMatrix) -> C64 {
        assert!(
            self.cols == rhs.rows && self.rows == rhs.cols,
            "trace_product dimension mismatch"
        );
        let mut acc = ZERO;
        for r in 0..self.rows {
            let row = &self.data[r * self.cols..(r + 1) * self.cols];
            for (k, a) in row.iter().enumerate() {
                acc += a * rhs.data[k * rhs.cols + r];
            }
        }
        acc
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, rhs.rows, "matmul dimension mismatch");
        let (n, m, p) = (self.rows, self.cols, rhs.cols);
        let mut out = vec![ZERO; n * p];
        for i in 0..n {
            let out_row = &mut out[i * p..(i + 1) * p];
            for k in 0..m {
                let a = self.data[i * m + k];
                if a == ZERO {
                    continue;
                }
                let rhs_row = &rhs.data[k * p..(k + 1) * p];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        ComplexMatrix {
            rows: n,
            cols: p,
            data: out,
        }
    }

    /// `a · self · b†`.
    pub fn sandwich(&self, a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
        a.matmul(self).matmul(&b.adjoint())
    }

    /// `u · self · u†`.
    pub fn conjugate_by(&self, u: &ComplexMatrix) -> ComplexMatrix {
        self.sandwich(u, u)
    }

    /// Largest entrywise modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise modulus of `self − other`.
    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest entrywise modulus of `self − self†`.
    pub fn hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] - self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise modulus of `self + self†`.
    pub fn anti_hermiticity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0f64;
        for r in 0..n {
            for c in r..n {
                worst = worst.max((self[(r, c)] + self[(c, r)].conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise modulus of `self†self − 1`.
    pub fn unitarity_defect(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        self.adjoint()
            .matmul(self)
            .max_abs_diff(&ComplexMatrix::identity(self.rows))
    }

    /// Top-left `k×k` block.
    pub fn leading_block(&self, k: usize) -> ComplexMatrix {
        assert!(k <= self.rows && k <= self.cols && k > 0);
        ComplexMatrix::from_fn(k, k, |r, c| self[(r, c)])
    }

    pub(crate) fn to_nalgebra(&self) -> DMatrix<C64> {
        DMatrix::from_row_slice(self.rows, self.cols, &self.data)
    }

    pub(crate) fn from_nalgebra(m: &DMatrix<C64>) -> ComplexMatrix {
        ComplexMatrix::from_fn(m.nrows(), m.ncols(), |r, c| m[(r, c)])
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &self.data[r * self.cols + c]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        assert!(r < self.rows && c < self.cols, "index out of bounds");
        &mut self.data[r * self.cols + c]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

impl Neg for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn neg(self) -> ComplexMatrix {
        self.scale_real(-1.0)
    }
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let (br, bc) = (b.rows, b.cols);
    ComplexMatrix::from_fn(a.rows * br, a.cols * bc, |r, c| {
        a[(r / br, c / bc)] * b[(r % br, c % bc)]
    })
}

/// Which factor of a bipartite `A ⊗ B` space to keep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    A,
    B,
}

/// Partial trace of an arbitrary square matrix on `A ⊗ B`.
pub fn partial_trace_matrix(
    m: &ComplexMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows,
            cols: m.cols,
        });
    }
    if m.rows != dim_a * dim_b {
        return Err(Error::DimensionMismatch {
            expected: dim_a * dim_b,
            found: m.rows,
        });
    }
    let out = match keep {
        Subsystem::A => ComplexMatrix::from_fn(dim_a, dim_a, |i, j| {
            (0..dim_b).map(|k| m[(i * dim_b + k, j * dim_b + k)]).sum()
        }),
        Subsystem::B => ComplexMatrix::from_fn(dim_b, dim_b, |i, j| {
            (0..dim_a).map(|k| m[(k * dim_b + i, k * dim_b + j)]).sum()
        }),
    };
    Ok(out)
}

/// Partial trace of a density matrix on `A ⊗ B`, keeping one factor.
pub fn partial_trace(
    rho: &DensityMatrix,
    dim_a: usize,
    dim_b: usize,
    keep: Subsystem,
) -> Result<DensityMatrix> {
    let m = partial_trace_matrix(rho.matrix(), dim_a, dim_b, keep)?;
    Ok(DensityMatrix::from_trusted(m))
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    /// Ascending; ties keep the order returned by the solver.
    pub values: Vec<f64>,
    /// Eigenvectors as columns, in the order of `values`.
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `V f(Λ) V†`.
    pub fn map_spectrum(&self, f: impl Fn(f64) -> C64) -> ComplexMatrix {
        let n = self.values.len();
        let fv: Vec<C64> = self.values.iter().map(|&x| f(x)).collect();
        let v = &self.vectors;
        let mut scaled = v.clone();
        for r in 0..n {
            for c in 0..n {
                scaled[(r, c)] *= fv[c];
            }
        }
        scaled.matmul(&v.adjoint())
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map_spectrum(|x| C64::new(x, 0.0))
    }

    pub fn unitary(&self) -> UnitaryOperator {
        UnitaryOperator::from_trusted(self.vectors.clone())
    }
}

/// Eigendecomposition of a Hermitian matrix with eigenvalues sorted ascending.
pub fn eig_hermitian(h: &ComplexMatrix) -> Result<HermitianEigen> {
    if !h.is_square() {
        return Err(Error::NotSquare {
            rows: h.rows,
            cols: h.cols,
        });
    }
    let defect = h.hermiticity_defect();
    if defect > tolerance::HERM {
        return Err(Error::NotHermitian(defect));
    }
    Ok(eig_hermitian_unchecked(h))
}

fn eig_hermitian_unchecked(h: &ComplexMatrix) -> HermitianEigen {
    let n = h.rows;
    let eig = SymmetricEigen::new(h.to_nalgebra());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = ComplexMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    HermitianEigen { values, vectors }
}

/// Matrix exponential.
///
/// Hermitian and anti-Hermitian generators go through the spectral route;
/// anything else falls back to scaling-and-squaring Padé.
pub fn expm(g: &ComplexMatrix) -> ComplexMatrix {
    assert!(g.is_square(), "expm of non-square matrix");
    let scale = g.max_abs().max(1.0);
    if g.max_abs() == 0.0 {
        return ComplexMatrix::identity(g.rows);
    }
    if g.anti_hermiticity_defect() <= 1e-13 * scale {
        // g = iK with K Hermitian
        let k = g.scale(-I);
        return eig_hermitian_unchecked(&k).map_spectrum(|x| C64::new(0.0, x).exp());
    }
    if g.hermiticity_defect() <= 1e-13 * scale {
        return eig_hermitian_unchecked(g).map_spectrum(|x| C64::new(x.exp(), 0.0));
    }
    ComplexMatrix::from_nalgebra(&g.to_nalgebra().exp())
}

/// Positive, unit-trace, Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
}

impl DensityMatrix {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows,
                cols: mat.cols,
            });
        }
        let defect = mat.hermiticity_defect();
        if defect > tolerance::HERM {
            return Err(Error::NotHermitian(defect));
        }
        let tr = mat.trace();
        if (tr - ONE).norm() > tolerance::TRACE {
            return Err(Error::InvalidTrace(tr.re));
        }
        let min_eig = eig_hermitian_unchecked(&mat).values[0];
        if min_eig < -tolerance::PSD {
            return Err(Error::NotPositive(min_eig));
        }
        Ok(Self { mat })
    }

    /// Wraps a matrix produced by a validity-preserving map of valid inputs.
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermiticity_defect() < 1e-8);
        debug_assert!((mat.trace() - ONE).norm() < 1e-8);
        Self { mat }
    }

    /// Pure state |ψ⟩⟨ψ| from a normalized ket.
    pub fn pure(ket: &[C64]) -> Result<Self> {
        let norm: f64 = ket.iter().map(|z| z.norm_sqr()).sum();
        if (norm - 1.0).abs() > tolerance::TRACE {
            return Err(Error::InvalidTrace(norm));
        }
        Ok(Self::from_trusted(ComplexMatrix::outer(ket, ket)))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    /// Spectrum, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        eig_hermitian_unchecked(&self.mat).values
    }

    pub fn eig(&self) -> HermitianEigen {
        eig_hermitian_unchecked(&self.mat)
    }

    /// Re tr(ρ H).
    pub fn expectation(&self, h: &HermitianOperator) -> f64 {
        self.mat.trace_product(h.matrix()).re
    }

    /// U ρ U†.
    pub fn evolve(&self, u: &UnitaryOperator) -> DensityMatrix {
        DensityMatrix::from_trusted(self.mat.conjugate_by(u.matrix()))
    }

    /// von Neumann entropy with 0·ln 0 := 0.
    pub fn entropy(&self) -> f64 {
        self.eigenvalues()
            .into_iter()
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    }
}

/// Hermitian operator (observable or Hamiltonian).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator {
    mat: ComplexMatrix,
}

impl HermitianOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows,
                cols: mat.cols,
            });
        }
        let defect = mat.hermiticity_defect();
        if defect > tolerance::HERM {
            return Err(Error::NotHermitian(defect));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        debug_assert!(mat.hermiticity_defect() < 1e-8);
        Self { mat }
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        Self::from_trusted(ComplexMatrix::from_real_diag(diag))
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn eig(&self) -> HermitianEigen {
        eig_hermitian_unchecked(&self.mat)
    }

    /// `self ⊗ 1 + 1 ⊗ other`.
    pub fn non_interacting_sum(&self, other: &HermitianOperator) -> HermitianOperator {
        let a = kron(&self.mat, &ComplexMatrix::identity(other.dim()));
        let b = kron(&ComplexMatrix::identity(self.dim()), &other.mat);
        HermitianOperator::from_trusted(&a + &b)
    }
}

/// Unitary operator.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitaryOperator {
    mat: ComplexMatrix,
}

impl UnitaryOperator {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows,
                cols: mat.cols,
            });
        }
        let defect = mat.unitarity_defect();
        if defect > tolerance::UNITARY {
            return Err(Error::NotUnitary(defect));
        }
        Ok(Self { mat })
    }

    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        Self { mat }
    }

    pub fn identity(dim: usize) -> Self {
        Self::from_trusted(ComplexMatrix::identity(dim))
    }

    /// `exp(g)` for an anti-Hermitian generator `g`.
    pub fn from_generator(g: &ComplexMatrix) -> Result<Self> {
        let defect = g.anti_hermiticity_defect();
        if defect > tolerance::HERM * g.max_abs().max(1.0) {
            return Err(Error::NotHermitian(defect));
        }
        Self::new(expm(g))
    }

    pub fn dim(&self) -> usize {
        self.mat.rows
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn adjoint(&self) -> UnitaryOperator {
        Self::from_trusted(self.mat.adjoint())
    }

    /// `self · rhs`.
    pub fn compose(&self, rhs: &UnitaryOperator) -> UnitaryOperator {
        Self::from_trusted(self.mat.matmul(&rhs.mat))
    }

    pub fn with_phase(&self, phase: f64) -> UnitaryOperator {
        Self::from_trusted(self.mat.scale(C64::from_polar(1.0, phase)))
    }
}

/// Pauli matrices.
pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, ONE, ONE, ZERO]).unwrap()
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_row_major(2, 2, vec![ZERO, -I, I, ZERO]).unwrap()
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, -1.0])
}
