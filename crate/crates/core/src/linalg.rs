//! Dense complex linear algebra: Kronecker products, Hermitian
//! eigendecomposition, Gibbs weights and partial traces.
//!
//! Tensor factors flatten left to right with the leftmost factor varying
//! slowest. For factor dimensions `(d0, d1, ..., dk)` the composite index of
//! `(i0, i1, ..., ik)` is `((i0 * d1 + i1) * d2 + ...) * dk + ik`. [`kron`]
//! builds operators in this order and [`partial_trace_keep_first`] reads
//! density matrices in the same order.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::{Mat, MatRef, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Largest Hilbert-space dimension any operator may have.
pub const DEFAULT_MAX_HILBERT_DIM: usize = 40_000;

/// Relative anti-Hermitian part tolerated (and symmetrised away) by [`eigh`].
pub const HERMITIAN_RTOL: f64 = 1e-12;

/// Ground-eigenspace degeneracy window, relative to the spectral range.
pub const GROUND_DEGENERACY_RTOL: f64 = 1e-10;

pub const TRACE_TOL: f64 = 1e-10;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const PURITY_TOL: f64 = 1e-9;

/// Row-major dense complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
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

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::validation(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Builds a matrix from real row slices; convenient for small literals.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::validation("ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(n, m, data)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::validation(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let prod = self.to_faer() * rhs.to_faer();
        Ok(Self::from_faer(prod.as_ref()))
    }

    /// `self * rhs - rhs * self`.
    pub fn commutator(&self, rhs: &Self) -> Result<Self> {
        Ok(&self.matmul(rhs)? - &rhs.matmul(self)?)
    }

    pub fn scale(&self, s: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise distance to `other`; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max |M - M†|`; infinite for non-square input.
    pub fn hermiticity_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermiticity_residual() <= HERMITIAN_RTOL * self.max_abs()
    }

    pub(crate) fn to_faer(&self) -> Mat<C64> {
        Mat::from_fn(self.rows, self.cols, |i, j| self.data[i * self.cols + j])
    }

    pub(crate) fn from_faer(m: MatRef<'_, C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        &mut self.data[i * self.cols + j]
    }
}

fn zip_entries(a: &ComplexMatrix, b: &ComplexMatrix, f: impl Fn(C64, C64) -> C64) -> ComplexMatrix {
    assert_eq!(
        (a.rows, a.cols),
        (b.rows, b.cols),
        "elementwise operation on mismatched shapes"
    );
    ComplexMatrix {
        rows: a.rows,
        cols: a.cols,
        data: a.data.iter().zip(&b.data).map(|(&x, &y)| f(x, y)).collect(),
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_entries(self, rhs, |x, y| x + y)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        zip_entries(self, rhs, |x, y| x - y)
    }
}

impl Mul<f64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, s: f64) -> ComplexMatrix {
        self.scale(C64::new(s, 0.0))
    }
}

impl Mul<C64> for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, s: C64) -> ComplexMatrix {
        self.scale(s)
    }
}

/// Kronecker product `a ⊗ b`, capped at [`DEFAULT_MAX_HILBERT_DIM`].
pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    kron_capped(a, b, DEFAULT_MAX_HILBERT_DIM)
}

pub fn kron_capped(a: &ComplexMatrix, b: &ComplexMatrix, cap: usize) -> Result<ComplexMatrix> {
    let rows = a.rows.checked_mul(b.rows);
    let cols = a.cols.checked_mul(b.cols);
    let (rows, cols) = match (rows, cols) {
        (Some(r), Some(c)) if r <= cap && c <= cap => (r, c),
        (r, c) => {
            return Err(Error::Sizing {
                dim: r.unwrap_or(usize::MAX).max(c.unwrap_or(usize::MAX)),
                cap,
            })
        }
    };
    let mut out = ComplexMatrix::zeros(rows, cols);
    for i in 0..a.rows {
        for j in 0..a.cols {
            let aij = a[(i, j)];
            if aij == C64::new(0.0, 0.0) {
                continue;
            }
            for k in 0..b.rows {
                let row = (i * b.rows + k) * cols + j * b.cols;
                for l in 0..b.cols {
                    out.data[row + l] = aij * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Kronecker product of several factors, leftmost slowest.
pub fn kron_all(factors: &[&ComplexMatrix]) -> Result<ComplexMatrix> {
    let (first, rest) = factors
        .split_first()
        .ok_or_else(|| Error::validation("kron_all needs at least one factor"))?;
    rest.iter()
        .try_fold((*first).clone(), |acc, f| kron(&acc, f))
}

/// Eigendecomposition of a Hermitian matrix; eigenvalues ascending.
#[derive(Clone, Debug, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: ComplexMatrix,
}

impl Spectrum {
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Columns are orthonormal eigenvectors.
    pub fn eigenvectors(&self) -> &ComplexMatrix {
        &self.eigenvectors
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn spectral_range(&self) -> f64 {
        spectral_range(&self.eigenvalues)
    }

    /// `V diag(E) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = self.eigenvectors.to_faer();
        let scaled = Mat::from_fn(v.nrows(), v.ncols(), |i, k| v[(i, k)] * self.eigenvalues[k]);
        let prod = &scaled * v.adjoint();
        ComplexMatrix::from_faer(prod.as_ref())
    }

    /// `max |V†V - I|`.
    pub fn orthonormality_residual(&self) -> f64 {
        let v = self.eigenvectors.to_faer();
        let gram = v.adjoint() * &v;
        let n = gram.nrows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((gram[(i, j)] - C64::new(target, 0.0)).norm());
            }
        }
        worst
    }
}

fn spectral_range(eigenvalues: &[f64]) -> f64 {
    match (eigenvalues.first(), eigenvalues.last()) {
        (Some(lo), Some(hi)) => hi - lo,
        _ => 0.0,
    }
}

/// Hermitian eigendecomposition.
///
/// Inputs whose anti-Hermitian part is within `HERMITIAN_RTOL * max|H|` are
/// symmetrised to `(H + H†)/2`; anything further off is rejected.
pub fn eigh(h: &ComplexMatrix) -> Result<Spectrum> {
    if !h.is_square() {
        return Err(Error::validation(format!(
            "eigh needs a square matrix, got {}x{}",
            h.rows, h.cols
        )));
    }
    let residual = h.hermiticity_residual();
    let scale = h.max_abs();
    if residual > HERMITIAN_RTOL * scale {
        return Err(Error::validation(format!(
            "matrix is not Hermitian: max|H - H†| = {residual:e} against max|H| = {scale:e}"
        )));
    }
    let n = h.rows;
    let sym = Mat::from_fn(n, n, |i, j| (h[(i, j)] + h[(j, i)].conj()) * 0.5);
    let evd = sym
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenConvergence { dim: n })?;
    let s = evd.S();
    let eigenvalues: Vec<f64> = (0..n).map(|k| s[k].re).collect();
    let eigenvectors = ComplexMatrix::from_faer(evd.U());
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Normalised Boltzmann weights for an ascending spectrum.
///
/// `beta = +inf` selects the ground eigenspace (all levels within
/// `GROUND_DEGENERACY_RTOL * (E_max - E_min)` of the minimum) with equal
/// weights. Finite `beta` is shifted by the minimum to avoid underflow.
pub fn gibbs_weights(eigenvalues: &[f64], beta: f64) -> Result<Vec<f64>> {
    if beta.is_nan() || beta < 0.0 {
        return Err(Error::validation(format!(
            "inverse temperature must be >= 0 or +inf, got {beta}"
        )));
    }
    if eigenvalues.is_empty() {
        return Err(Error::validation("empty spectrum"));
    }
    let e_min = eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
    let e_max = eigenvalues
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    let mut weights: Vec<f64> = if beta.is_infinite() {
        let window = GROUND_DEGENERACY_RTOL * (e_max - e_min);
        eigenvalues
            .iter()
            .map(|&e| if e - e_min <= window { 1.0 } else { 0.0 })
            .collect()
    } else {
        eigenvalues
            .iter()
            .map(|&e| (-beta * (e - e_min)).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= z);
    Ok(weights)
}

/// Positive, unit-trace Hermitian matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates every density-matrix invariant.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let rho = Self { matrix };
        rho.check_invariants()?;
        Ok(rho)
    }

    pub(crate) fn new_unchecked(matrix: ComplexMatrix) -> Self {
        Self { matrix }
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalised) non-zero vector.
    pub fn from_pure_state(psi: &[C64]) -> Result<Self> {
        let norm2: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        if psi.is_empty() || norm2 == 0.0 {
            return Err(Error::validation("pure state vector must be non-zero"));
        }
        let m = ComplexMatrix::from_fn(psi.len(), psi.len(), |i, j| psi[i] * psi[j].conj() / norm2);
        Ok(Self { matrix: m })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = &ComplexMatrix::identity(dim) * (1.0 / dim as f64);
        Self { matrix: m }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `tr ρ²`, evaluated as the squared Frobenius norm.
    pub fn purity(&self) -> f64 {
        self.matrix.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        Ok(eigh(&self.matrix)?.eigenvalues)
    }

    pub fn check_invariants(&self) -> Result<()> {
        let m = &self.matrix;
        if !m.is_square() {
            return Err(Error::validation("density matrix must be square"));
        }
        let herm = m.hermiticity_residual();
        if herm > HERMITIAN_RTOL * m.max_abs().max(1.0) {
            return Err(Error::validation(format!(
                "density matrix not Hermitian (residual {herm:e})"
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::validation(format!("density matrix trace is {tr}")));
        }
        let min_eig = self
            .eigenvalues()?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if min_eig < -POSITIVITY_TOL {
            return Err(Error::Positivity {
                min_eigenvalue: min_eig,
            });
        }
        let p = self.purity();
        let lo = 1.0 / self.dim() as f64 - PURITY_TOL;
        if p < lo || p > 1.0 + PURITY_TOL {
            return Err(Error::validation(format!("purity {p} outside [1/dim, 1]")));
        }
        Ok(())
    }
}

/// Gibbs state `Σ_k w_k |k⟩⟨k|` of a spectrum at inverse temperature `beta`.
pub fn gibbs_density(spec: &Spectrum, beta: f64) -> Result<DensityMatrix> {
    let weights = gibbs_weights(&spec.eigenvalues, beta)?;
    let v = spec.eigenvectors.to_faer();
    let kept: Vec<usize> = (0..weights.len()).filter(|&k| weights[k] > 0.0).collect();
    let n = v.nrows();
    let left = Mat::from_fn(n, kept.len(), |i, c| v[(i, kept[c])] * weights[kept[c]]);
    let right = Mat::from_fn(n, kept.len(), |i, c| v[(i, kept[c])]);
    let rho = &left * right.adjoint();
    Ok(DensityMatrix::new_unchecked(ComplexMatrix::from_faer(
        rho.as_ref(),
    )))
}

/// Traces out every factor but the first. `dims` lists all factor
/// dimensions in flattening order.
pub fn partial_trace_keep_first(rho: &DensityMatrix, dims: &[usize]) -> Result<DensityMatrix> {
    let kept = *dims
        .first()
        .ok_or_else(|| Error::validation("partial trace needs at least one factor"))?;
    if dims.contains(&0) {
        return Err(Error::validation("factor dimensions must be positive"));
    }
    let rest: usize = dims[1..].iter().product();
    if kept * rest != rho.dim() {
        return Err(Error::validation(format!(
            "factor dimensions {dims:?} do not multiply to {}",
            rho.dim()
        )));
    }
    let m = &rho.matrix;
    let out = ComplexMatrix::from_fn(kept, kept, |s, t| {
        (0..rest).map(|r| m[(s * rest + r, t * rest + r)]).sum()
    });
    Ok(DensityMatrix::new_unchecked(out))
}
