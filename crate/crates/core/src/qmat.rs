//! Dense complex linear algebra and quantum-state primitives.
//!
//! Everything downstream (ensembles, instruments, entanglement measures)
//! is built on the types here: [`CMatrix`] for raw complex matrices,
//! [`DensityMatrix`] for validated quantum states with subsystem structure,
//! and [`Spectrum`] for Hermitian eigendecompositions. All information
//! quantities are in bits (logarithms base 2); matrices are row-major
//! and sized for desk-scale work (dimension <= 64).

use num_complex::Complex;
use std::ops::{Add, Mul, Sub};

use crate::error::{Error, Result};

pub type Complex64 = Complex<f64>;

/// Maximum allowed deviation from Hermiticity.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Maximum allowed deviation of a density-matrix trace from 1.
pub const TRACE_TOL: f64 = 1e-10;
/// Eigenvalues above this (negative) floor are treated as numerical noise.
pub const EIGENVALUE_FLOOR: f64 = -1e-9;
/// Eigenvalues at or below this are part of the kernel.
pub const KERNEL_TOL: f64 = 1e-12;
/// Kernel-overlap threshold beyond which relative entropy is infinite.
pub const SUPPORT_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex::new(0.0, 0.0);
const ONE: Complex64 = Complex::new(1.0, 0.0);

/// log base 2, with 0 log 0 = 0.
pub(crate) fn xlog2x(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Complex column vector (a pure state when normalized).
#[derive(Debug, Clone, PartialEq)]
pub struct CVector {
    data: Vec<Complex64>,
}

impl CVector {
    pub fn new(data: Vec<Complex64>) -> Self {
        Self { data }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            data: vec![ZERO; dim],
        }
    }

    pub fn from_real(entries: &[f64]) -> Self {
        Self {
            data: entries.iter().map(|&r| Complex::new(r, 0.0)).collect(),
        }
    }

    /// Computational basis state |index> in the given dimension.
    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut data = vec![ZERO; dim];
        data[index] = ONE;
        Self { data }
    }

    pub fn dim(&self) -> usize {
        self.data.len()
    }

    pub fn get(&self, i: usize) -> Complex64 {
        self.data[i]
    }

    pub fn set(&mut self, i: usize, value: Complex64) {
        self.data[i] = value;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn norm(&self) -> f64 {
        self.data
            .iter()
            .map(|c| c.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Self {
            data: self.data.iter().map(|c| c / n).collect(),
        }
    }

    /// Inner product <self|other>.
    pub fn inner(&self, other: &CVector) -> Complex64 {
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// Outer product |self><self|.
    pub fn outer(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| self.data[i] * self.data[j].conj())
    }

    /// Tensor product |self> (x) |other>.
    pub fn tensor(&self, other: &CVector) -> Self {
        let mut data = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.data {
            for b in &other.data {
                data.push(a * b);
            }
        }
        Self { data }
    }

    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|c| c.conj()).collect(),
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
        }
    }

    pub fn add(&self, other: &CVector) -> Self {
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

/// Reorder the tensor factors of a state vector. `perm[k]` is the old
/// position of the factor placed at new position `k`.
pub fn permute_vector(v: &CVector, dims: &[usize], perm: &[usize]) -> Result<CVector> {
    let total: usize = dims.iter().product();
    if v.dim() != total {
        return Err(Error::DimensionMismatch(format!(
            "vector has dimension {} but subsystem dims multiply to {}",
            v.dim(),
            total
        )));
    }
    check_permutation(perm, dims.len())?;
    let new_dims: Vec<usize> = perm.iter().map(|&p| dims[p]).collect();
    let mut out = vec![ZERO; total];
    for (old_flat, &value) in v.data().iter().enumerate() {
        let old_multi = unflatten(old_flat, dims);
        let new_multi: Vec<usize> = perm.iter().map(|&p| old_multi[p]).collect();
        out[flatten(&new_multi, &new_dims)] = value;
    }
    Ok(CVector::new(out))
}

fn unflatten(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut multi = vec![0usize; dims.len()];
    for k in (0..dims.len()).rev() {
        multi[k] = flat % dims[k];
        flat /= dims[k];
    }
    multi
}

fn flatten(multi: &[usize], dims: &[usize]) -> usize {
    let mut flat = 0usize;
    for (k, &i) in multi.iter().enumerate() {
        flat = flat * dims[k] + i;
    }
    flat
}

fn check_permutation(perm: &[usize], len: usize) -> Result<()> {
    let mut seen = vec![false; len];
    if perm.len() != len {
        return Err(Error::InvalidInput(format!(
            "permutation has length {} but there are {} subsystems",
            perm.len(),
            len
        )));
    }
    for &p in perm {
        if p >= len || seen[p] {
            return Err(Error::InvalidInput(format!(
                "invalid subsystem permutation {:?}",
                perm
            )));
        }
        seen[p] = true;
    }
    Ok(())
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    data: Vec<Complex64>,
    rows: usize,
    cols: usize,
}

impl CMatrix {
    pub fn new(data: Vec<Complex64>, rows: usize, cols: usize) -> Self {
        assert_eq!(data.len(), rows * cols, "data length must match dimensions");
        Self { data, rows, cols }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: vec![ZERO; rows * cols],
            rows,
            cols,
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, ONE);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(
        rows: usize,
        cols: usize,
        mut f: F,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { data, rows, cols }
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| {
            if i == j {
                Complex::new(diag[i], 0.0)
            } else {
                ZERO
            }
        })
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.cols + col] = value;
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

    pub fn trace(&self) -> Complex64 {
        (0..self.rows.min(self.cols)).map(|i| self.get(i, i)).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Self {
        Self {
            data: self.data.iter().map(|c| c.conj()).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn scale(&self, factor: Complex64) -> Self {
        Self {
            data: self.data.iter().map(|c| c * factor).collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn add(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a + b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn sub(&self, other: &CMatrix) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self {
            data: self
                .data
                .iter()
                .zip(other.data.iter())
                .map(|(a, b)| a - b)
                .collect(),
            rows: self.rows,
            cols: self.cols,
        }
    }

    pub fn matmul(&self, other: &CMatrix) -> Self {
        assert_eq!(self.cols, other.rows, "dimension mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    let v = out.get(i, j) + a * other.get(k, j);
                    out.set(i, j, v);
                }
            }
        }
        out
    }

    pub fn matvec(&self, v: &CVector) -> CVector {
        assert_eq!(self.cols, v.dim(), "dimension mismatch in matvec");
        let mut out = Vec::with_capacity(self.rows);
        for i in 0..self.rows {
            let mut sum = ZERO;
            for j in 0..self.cols {
                sum += self.get(i, j) * v.get(j);
            }
            out.push(sum);
        }
        CVector::new(out)
    }

    /// Kronecker product self (x) other.
    pub fn tensor(&self, other: &CMatrix) -> Self {
        let rows = self.rows * other.rows;
        let cols = self.cols * other.cols;
        let mut out = Self::zeros(rows, cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                let a = self.get(i, j);
                if a == ZERO {
                    continue;
                }
                for k in 0..other.rows {
                    for l in 0..other.cols {
                        out.set(i * other.rows + k, j * other.cols + l, a * other.get(k, l));
                    }
                }
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(other.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// max_ij |M[i][j] - conj(M[j][i])|.
    pub fn hermiticity_violation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..=i {
                let d = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_violation() <= tol
    }

    /// (M + M†)/2; removes numerical Hermiticity drift.
    pub fn hermitized(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| {
            (self.get(i, j) + self.get(j, i).conj()) * 0.5
        })
    }

    /// Real Frobenius inner product tr(A B) for Hermitian A, B.
    pub fn inner_hermitian(&self, other: &CMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let mut acc = 0.0f64;
        for i in 0..self.rows {
            for j in 0..self.cols {
                acc += (self.get(i, j) * other.get(j, i)).re;
            }
        }
        acc
    }

    /// Entries as nested [re, im] pairs (row major), the wire format used
    /// by all JSON interfaces.
    pub fn to_entries(&self) -> Vec<Vec<[f64; 2]>> {
        (0..self.rows)
            .map(|i| {
                (0..self.cols)
                    .map(|j| {
                        let c = self.get(i, j);
                        [c.re, c.im]
                    })
                    .collect()
            })
            .collect()
    }

    pub fn from_entries(entries: &[Vec<[f64; 2]>]) -> Result<Self> {
        let rows = entries.len();
        if rows == 0 {
            return Err(Error::MalformedJson("empty matrix".into()));
        }
        let cols = entries[0].len();
        if entries.iter().any(|r| r.len() != cols) {
            return Err(Error::MalformedJson("ragged matrix rows".into()));
        }
        Ok(Self::from_fn(rows, cols, |i, j| {
            Complex::new(entries[i][j][0], entries[i][j][1])
        }))
    }

    fn to_nalgebra(&self) -> nalgebra::DMatrix<Complex64> {
        nalgebra::DMatrix::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }
}

impl Add for &CMatrix {
    type Output = CMatrix;
    fn add(self, other: &CMatrix) -> CMatrix {
        CMatrix::add(self, other)
    }
}

impl Sub for &CMatrix {
    type Output = CMatrix;
    fn sub(self, other: &CMatrix) -> CMatrix {
        CMatrix::sub(self, other)
    }
}

impl Mul for &CMatrix {
    type Output = CMatrix;
    fn mul(self, other: &CMatrix) -> CMatrix {
        self.matmul(other)
    }
}

/// Kronecker product of two matrices.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.tensor(b)
}

/// Eigendecomposition of a Hermitian matrix. Eigenvalues are real and
/// sorted in descending order; eigenvectors are the matching columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    eigenvectors: CMatrix,
}

impl Spectrum {
    pub(crate) fn from_parts(eigenvalues: Vec<f64>, eigenvectors: CMatrix) -> Self {
        Self {
            eigenvalues,
            eigenvectors,
        }
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvectors as columns, aligned with `eigenvalues`.
    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    pub fn eigenvector(&self, k: usize) -> CVector {
        let n = self.eigenvectors.rows();
        CVector::new((0..n).map(|i| self.eigenvectors.get(i, k)).collect())
    }

    /// V f(Lambda) V† for a real scalar function of the eigenvalues.
    pub fn apply<F: Fn(f64) -> f64>(&self, f: F) -> CMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut out = CMatrix::zeros(n, n);
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            let fl = f(lambda);
            if fl == 0.0 {
                continue;
            }
            for i in 0..n {
                let vi = v.get(i, k);
                for j in 0..n {
                    let val = out.get(i, j) + vi * v.get(j, k).conj() * fl;
                    out.set(i, j, val);
                }
            }
        }
        out
    }

    pub fn reconstruct(&self) -> CMatrix {
        self.apply(|x| x)
    }
}

/// Eigendecomposition of a Hermitian matrix.
pub fn hermitian_eig(m: &CMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::NotSquare {
            rows: m.rows(),
            cols: m.cols(),
        });
    }
    let violation = m.hermiticity_violation();
    if violation > HERMITICITY_TOL {
        return Err(Error::NotHermitian(violation));
    }
    let eig = m.hermitized().to_nalgebra().symmetric_eigen();
    let n = m.rows();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = CMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(Spectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Validated quantum state: Hermitian, PSD, unit trace, with subsystem
/// dimensions whose product matches the matrix dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
    dims: Vec<usize>,
}

impl DensityMatrix {
    /// Validates Hermiticity, trace and positivity.
    pub fn new(mat: CMatrix, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        if mat.rows() != total || dims.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "matrix dimension {} does not match subsystem dims {:?}",
                mat.rows(),
                dims
            )));
        }
        let violation = mat.hermiticity_violation();
        if violation > HERMITICITY_TOL {
            return Err(Error::NotHermitian(violation));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidTrace(tr.re));
        }
        let state = Self {
            mat: mat.hermitized(),
            dims: dims.to_vec(),
        };
        let spec = hermitian_eig(&state.mat)?;
        let min = spec
            .eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveSemidefinite(min));
        }
        Ok(state)
    }

    /// |psi><psi| for a normalized state vector.
    pub fn from_pure(psi: &CVector, dims: &[usize]) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-8 {
            return Err(Error::NotNormalized(norm));
        }
        let total: usize = dims.iter().product();
        if psi.dim() != total {
            return Err(Error::DimensionMismatch(format!(
                "vector dimension {} does not match subsystem dims {:?}",
                psi.dim(),
                dims
            )));
        }
        let psi = psi.normalized();
        Ok(Self {
            mat: psi.outer(),
            dims: dims.to_vec(),
        })
    }

    /// I/d on the given subsystem dims.
    pub fn maximally_mixed(dims: &[usize]) -> Self {
        let total: usize = dims.iter().product();
        Self {
            mat: CMatrix::identity(total).scale(Complex::new(1.0 / total as f64, 0.0)),
            dims: dims.to_vec(),
        }
    }

    /// Internal constructor for states that are valid by construction
    /// (Kraus updates, partial traces). Hermitizes but skips the
    /// eigenvalue check.
    pub(crate) fn from_parts_unchecked(mat: CMatrix, dims: &[usize]) -> Self {
        Self {
            mat: mat.hermitized(),
            dims: dims.to_vec(),
        }
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn subsystem_count(&self) -> usize {
        self.dims.len()
    }

    /// Reinterpret the subsystem structure without changing the matrix.
    pub fn with_dims(&self, dims: &[usize]) -> Result<Self> {
        let total: usize = dims.iter().product();
        if total != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "dims {:?} do not multiply to {}",
                dims,
                self.dim()
            )));
        }
        Ok(Self {
            mat: self.mat.clone(),
            dims: dims.to_vec(),
        })
    }

    /// Trace out all subsystems not listed in `keep` (indices ascending).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::InvalidInput(
                "partial trace must keep at least one subsystem".into(),
            ));
        }
        let m = self.dims.len();
        let mut sorted = keep.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != keep.len() {
            return Err(Error::InvalidInput(format!(
                "duplicate subsystem indices in {:?}",
                keep
            )));
        }
        for &k in &sorted {
            if k >= m {
                return Err(Error::InvalidSubsystem { index: k, count: m });
            }
        }
        let traced: Vec<usize> = (0..m).filter(|k| !sorted.contains(k)).collect();
        let keep_dims: Vec<usize> = sorted.iter().map(|&k| self.dims[k]).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&k| self.dims[k]).collect();
        let keep_total: usize = keep_dims.iter().product();
        let traced_total: usize = traced_dims.iter().product();

        let mut out = CMatrix::zeros(keep_total, keep_total);
        let mut old_row = vec![0usize; m];
        let mut old_col = vec![0usize; m];
        for i in 0..keep_total {
            let ki = unflatten(i, &keep_dims);
            for j in 0..keep_total {
                let kj = unflatten(j, &keep_dims);
                let mut sum = ZERO;
                for t in 0..traced_total {
                    let tt = unflatten(t, &traced_dims);
                    for (pos, &sys) in sorted.iter().enumerate() {
                        old_row[sys] = ki[pos];
                        old_col[sys] = kj[pos];
                    }
                    for (pos, &sys) in traced.iter().enumerate() {
                        old_row[sys] = tt[pos];
                        old_col[sys] = tt[pos];
                    }
                    sum += self
                        .mat
                        .get(flatten(&old_row, &self.dims), flatten(&old_col, &self.dims));
                }
                out.set(i, j, sum);
            }
        }
        Ok(Self::from_parts_unchecked(out, &keep_dims))
    }

    /// Reorder tensor factors; `perm[k]` is the old position of the
    /// subsystem placed at new position `k`.
    pub fn permute_subsystems(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.dims.len())?;
        let new_dims: Vec<usize> = perm.iter().map(|&p| self.dims[p]).collect();
        let n = self.dim();
        let mut out = CMatrix::zeros(n, n);
        for i in 0..n {
            let mi = unflatten(i, &self.dims);
            let ni: Vec<usize> = perm.iter().map(|&p| mi[p]).collect();
            let fi = flatten(&ni, &new_dims);
            for j in 0..n {
                let mj = unflatten(j, &self.dims);
                let nj: Vec<usize> = perm.iter().map(|&p| mj[p]).collect();
                out.set(fi, flatten(&nj, &new_dims), self.mat.get(i, j));
            }
        }
        Ok(Self {
            mat: out,
            dims: new_dims,
        })
    }

    /// Merge subsystems [0, split) and [split, end) into a bipartite view.
    pub fn bipartition_at(&self, split: usize) -> Result<Self> {
        if split == 0 || split >= self.dims.len() {
            return Err(Error::InvalidInput(format!(
                "bipartition split {} out of range for {} subsystems",
                split,
                self.dims.len()
            )));
        }
        let left: usize = self.dims[..split].iter().product();
        let right: usize = self.dims[split..].iter().product();
        self.with_dims(&[left, right])
    }

    /// Permute `left` subsystems to the front and merge each side,
    /// yielding a two-factor state for the requested bipartition.
    pub fn bipartite_view(&self, left: &[usize]) -> Result<Self> {
        let m = self.dims.len();
        let mut sorted = left.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != left.len() || sorted.is_empty() || sorted.len() >= m {
            return Err(Error::InvalidInput(format!(
                "invalid bipartition {:?} of {} subsystems",
                left, m
            )));
        }
        for &k in &sorted {
            if k >= m {
                return Err(Error::InvalidSubsystem { index: k, count: m });
            }
        }
        let mut perm = sorted.clone();
        perm.extend((0..m).filter(|k| !sorted.contains(k)));
        self.permute_subsystems(&perm)?.bipartition_at(sorted.len())
    }

    /// Entrywise complex conjugation (in the computational basis).
    pub fn conjugate(&self) -> Self {
        Self {
            mat: self.mat.conj(),
            dims: self.dims.clone(),
        }
    }

    /// Tensor product with dims concatenated.
    pub fn tensor(&self, other: &DensityMatrix) -> Self {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        Self {
            mat: self.mat.tensor(&other.mat),
            dims,
        }
    }

    /// Cleaned eigendecomposition: eigenvalues clipped into [0, 1 + 1e-9];
    /// values below the noise floor are an error.
    pub fn spectrum(&self) -> Result<Spectrum> {
        let spec = hermitian_eig(&self.mat)?;
        let mut eigenvalues = Vec::with_capacity(spec.eigenvalues.len());
        for &l in spec.eigenvalues() {
            if l < EIGENVALUE_FLOOR {
                return Err(Error::NotPositiveSemidefinite(l));
            }
            eigenvalues.push(l.clamp(0.0, 1.0 + 1e-9));
        }
        Ok(Spectrum {
            eigenvalues,
            eigenvectors: spec.eigenvectors,
        })
    }

    /// tr(rho^2); 1 for pure states.
    pub fn purity(&self) -> f64 {
        self.mat.inner_hermitian(&self.mat)
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        (self.purity() - 1.0).abs() <= tol
    }
}

/// von Neumann entropy S(rho) = -sum lambda log2 lambda, in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let spec = rho.spectrum()?;
    Ok(spec
        .eigenvalues()
        .iter()
        .map(|&l| -xlog2x(l.clamp(0.0, 1.0)))
        .sum::<f64>()
        + 0.0)
}

/// Quantum relative entropy S(rho|sigma) = tr(rho log2 rho - rho log2 sigma),
/// in bits. Returns `f64::INFINITY` when rho has weight on the kernel of
/// sigma.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(format!(
            "relative entropy of a {}-dim state against a {}-dim state",
            rho.dim(),
            sigma.dim()
        )));
    }
    let rho_spec = rho.spectrum()?;
    let sigma_spec = sigma.spectrum()?;

    let mut kernel_overlap = 0.0f64;
    let mut cross = 0.0f64;
    for (k, &mu) in sigma_spec.eigenvalues().iter().enumerate() {
        let w = sigma_spec.eigenvector(k);
        // <w|rho|w>
        let overlap = w.inner(&rho.mat().matvec(&w)).re.max(0.0);
        if mu <= KERNEL_TOL {
            kernel_overlap += overlap;
        } else {
            cross += overlap * mu.min(1.0).log2();
        }
    }
    if kernel_overlap > SUPPORT_TOL {
        return Ok(f64::INFINITY);
    }
    let self_term: f64 = rho_spec
        .eigenvalues()
        .iter()
        .map(|&l| xlog2x(l.clamp(0.0, 1.0)))
        .sum();
    Ok(self_term - cross)
}

/// Partial transpose on the right factor of a `d_left (x) d_right` matrix.
pub fn partial_transpose(m: &CMatrix, d_left: usize, d_right: usize) -> Result<CMatrix> {
    let n = d_left * d_right;
    if !m.is_square() || m.rows() != n {
        return Err(Error::DimensionMismatch(format!(
            "partial transpose of a {}x{} matrix with factors {}x{}",
            m.rows(),
            m.cols(),
            d_left,
            d_right
        )));
    }
    let mut out = CMatrix::zeros(n, n);
    for i in 0..d_left {
        for j in 0..d_left {
            for k in 0..d_right {
                for l in 0..d_right {
                    out.set(
                        i * d_right + k,
                        j * d_right + l,
                        m.get(i * d_right + l, j * d_right + k),
                    );
                }
            }
        }
    }
    Ok(out)
}
