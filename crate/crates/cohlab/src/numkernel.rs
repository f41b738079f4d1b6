//! Dense complex linear algebra: Hermitian eigendecomposition, tensor
//! products, partial trace, purification, trace norm.
//!
//! Everything is double precision, row-major, and deterministic: the
//! eigensolver is a cyclic complex Jacobi iteration with a fixed rotation
//! order, eigenvalues are returned descending with a lexicographic
//! eigenvector tie-break, and eigenvector columns carry a fixed global-phase
//! convention (largest-modulus entry real and positive). Tensor indices are
//! big-endian: in `tensor(a, b)` the first factor is the most significant,
//! `index = i_a * dim_b + i_b`.

use std::sync::atomic::{AtomicUsize, Ordering};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Hermiticity tolerance: max |m - m^dagger| entry.
pub const HERMITICITY_TOL: f64 = 1e-10;
/// Unitarity tolerance: max |U^dagger U - I| entry.
pub const UNITARITY_TOL: f64 = 1e-9;
/// State eigenvalues in [-EIG_CLAMP_TOL, 0) are clamped to zero; anything
/// more negative is rejected.
pub const EIG_CLAMP_TOL: f64 = 1e-10;
/// Default cap on any constructed operator dimension (12 qubits).
pub const DEFAULT_DIM_CAP: usize = 4096;

static DIM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_DIM_CAP);

/// Current cap on operator dimensions produced by `tensor` and friends.
pub fn dim_cap() -> usize {
    DIM_CAP.load(Ordering::Relaxed)
}

/// Override the dimension cap (the CLI wires this to an environment
/// variable). Affects subsequent `tensor`/`tensor_power` calls globally.
pub fn set_dim_cap(cap: usize) {
    DIM_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// Dense row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

/// Interchange document: `dim_rows`, `dim_cols`, `entries` as `[re, im]`
/// pairs in row-major order. Loaders reject length mismatches and
/// non-finite entries.
#[derive(Serialize, Deserialize)]
struct MatrixDoc {
    dim_rows: usize,
    dim_cols: usize,
    entries: Vec<[f64; 2]>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        MatrixDoc {
            dim_rows: self.rows,
            dim_cols: self.cols,
            entries: self.data.iter().map(|z| [z.re, z.im]).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = MatrixDoc::deserialize(d)?;
        let entries = doc
            .entries
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        ComplexMatrix::new(doc.dim_rows, doc.dim_cols, entries).map_err(serde::de::Error::custom)
    }
}

impl ComplexMatrix {
    /// Build from row-major data, rejecting length mismatches and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Parse {
                context: format!(
                    "entries length {} does not match {}x{}",
                    data.len(),
                    rows,
                    cols
                ),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Parse {
                context: "non-finite entry".into(),
            });
        }
        Ok(ComplexMatrix { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        ComplexMatrix { rows, cols, data }
    }

    /// Real diagonal matrix.
    pub fn diagonal(values: &[f64]) -> Self {
        let d = values.len();
        Self::from_fn(d, d, |r, c| {
            if r == c {
                Complex64::new(values[r], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        })
    }

    /// Column vector from amplitudes.
    pub fn column_vector(amplitudes: &[Complex64]) -> Self {
        ComplexMatrix {
            rows: amplitudes.len(),
            cols: 1,
            data: amplitudes.to_vec(),
        }
    }

    /// Projector |v><v| from a column vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let d = v.len();
        Self::from_fn(d, d, |r, c| v[r] * v[c].conj())
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

    /// Square dimension; panics on non-square (callers check first).
    pub fn dim(&self) -> usize {
        debug_assert!(self.is_square());
        self.rows
    }

    #[inline]
    pub fn get(&self, r: usize, c: usize) -> Complex64 {
        self.data[r * self.cols + c]
    }

    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: Complex64) {
        self.data[r * self.cols + c] = v;
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self.get(c, r).conj())
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn scaled_complex(&self, factor: Complex64) -> Self {
        ComplexMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|a| a * factor).collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let (n, k, m) = (self.rows, self.cols, other.cols);
        let mut out = vec![Complex64::new(0.0, 0.0); n * m];
        for r in 0..n {
            for s in 0..k {
                let a = self.data[r * k + s];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let row = &other.data[s * m..(s + 1) * m];
                let dst = &mut out[r * m..(r + 1) * m];
                for c in 0..m {
                    dst[c] += a * row[c];
                }
            }
        }
        ComplexMatrix {
            rows: n,
            cols: m,
            data: out,
        }
    }

    /// A B A^dagger, the conjugation pattern of channel application.
    pub fn conjugate_with(&self, inner: &Self) -> Self {
        self.matmul(inner).matmul(&self.adjoint())
    }

    pub fn trace(&self) -> Complex64 {
        debug_assert!(self.is_square());
        (0..self.rows).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs_entry(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// max |m - m^dagger| entry; zero for exactly Hermitian input.
    pub fn hermiticity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut dev: f64 = 0.0;
        for r in 0..self.rows {
            for c in r..self.cols {
                dev = dev.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        dev
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_deviation() <= tol
    }

    /// max |U^dagger U - I| entry.
    pub fn unitarity_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let gram = self.adjoint().matmul(self);
        gram.sub(&Self::identity(self.rows)).max_abs_entry()
    }

    /// Zero out off-diagonal entries, keeping the diagonal bit-exact.
    pub fn diagonal_part(&self) -> Self {
        debug_assert!(self.is_square());
        let mut out = Self::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            out.set(i, i, self.get(i, i));
        }
        out
    }

    pub fn column(&self, c: usize) -> Vec<Complex64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }
}

impl std::ops::Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::add(self, rhs)
    }
}

impl std::ops::Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix::sub(self, rhs)
    }
}

/// Eigendecomposition of a Hermitian matrix: descending real eigenvalues and
/// the matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl Spectrum {
    /// V diag(lambda) V^dagger.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let d = self.eigenvalues.len();
        let v = &self.eigenvectors;
        ComplexMatrix::from_fn(d, d, |r, c| {
            (0..d)
                .map(|k| v.get(r, k) * self.eigenvalues[k] * v.get(c, k).conj())
                .sum()
        })
    }

    /// max |V^dagger V - I| entry.
    pub fn orthonormality_deviation(&self) -> f64 {
        self.eigenvectors.unitarity_deviation()
    }
}

/// Hermitian eigendecomposition by cyclic complex Jacobi rotations.
///
/// Rejects inputs whose Hermiticity deviation exceeds [`HERMITICITY_TOL`].
/// Ordering is deterministic: eigenvalues descending, ties broken by
/// lexicographic comparison of eigenvector absolute values, and each column
/// phase-fixed so its largest-modulus entry is real positive.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<Spectrum> {
    jacobi(m, true)
}

/// Eigenvalues only (descending); skips the eigenvector accumulation.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    Ok(jacobi(m, false)?.eigenvalues)
}

fn jacobi(m: &ComplexMatrix, want_vectors: bool) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::dim_mismatch(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let dev = m.hermiticity_deviation();
    if dev > HERMITICITY_TOL {
        return Err(Error::NotHermitian {
            deviation: dev,
            tolerance: HERMITICITY_TOL,
        });
    }
    let d = m.dim();
    if d == 0 {
        return Ok(Spectrum {
            eigenvalues: vec![],
            eigenvectors: ComplexMatrix::zeros(0, 0),
        });
    }

    let mut a = m.clone();
    // Symmetrize exactly so rotations see a Hermitian matrix.
    for r in 0..d {
        for c in (r + 1)..d {
            let avg = (a.get(r, c) + a.get(c, r).conj()) * 0.5;
            a.set(r, c, avg);
            a.set(c, r, avg.conj());
        }
        let re = a.get(r, r).re;
        a.set(r, r, Complex64::new(re, 0.0));
    }
    let mut v = if want_vectors {
        ComplexMatrix::identity(d)
    } else {
        ComplexMatrix::zeros(0, 0)
    };

    let scale = a.frobenius_norm().max(1e-300);
    let target = 1e-14 * scale;
    let max_sweeps = 64;
    let mut converged = false;
    for _sweep in 0..max_sweeps {
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += 2.0 * a.get(p, q).norm_sqr();
            }
        }
        if off.sqrt() <= target {
            converged = true;
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a.get(p, q);
                let g = apq.norm();
                if g <= target / (d as f64) {
                    continue;
                }
                let omega = apq / g;
                let alpha = a.get(p, p).re;
                let beta = a.get(q, q).re;
                let tau = (beta - alpha) / (2.0 * g);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                let s_om = omega * s;

                // Rows p, q of A <- J^dagger A.
                for k in 0..d {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, apk * c - aqk * s_om);
                    a.set(q, k, apk * s_om.conj() + aqk * c);
                }
                // Columns p, q of A <- A J.
                for k in 0..d {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, akp * c - akq * s_om.conj());
                    a.set(k, q, akp * s_om + akq * c);
                }
                if want_vectors {
                    for k in 0..d {
                        let vkp = v.get(k, p);
                        let vkq = v.get(k, q);
                        v.set(k, p, vkp * c - vkq * s_om.conj());
                        v.set(k, q, vkp * s_om + vkq * c);
                    }
                }
            }
        }
    }
    if !converged {
        // One more residual check: the last sweep may have finished the job.
        let mut off = 0.0f64;
        for p in 0..d {
            for q in (p + 1)..d {
                off += 2.0 * a.get(p, q).norm_sqr();
            }
        }
        let residual = off.sqrt();
        if residual > target.max(1e-11 * scale) {
            return Err(Error::NumericalFailure {
                sweeps: max_sweeps,
                residual,
            });
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    let eigenvalues: Vec<f64> = (0..d).map(|i| a.get(i, i).re).collect();
    let tie_eps = 1e-12 * scale.max(1.0);
    if want_vectors {
        order.sort_by(|&i, &j| {
            let (li, lj) = (eigenvalues[i], eigenvalues[j]);
            if (li - lj).abs() > tie_eps {
                return lj.partial_cmp(&li).unwrap();
            }
            // Tie: lexicographic on eigenvector absolute values.
            for k in 0..d {
                let (ai, aj) = (v.get(k, i).norm(), v.get(k, j).norm());
                if (ai - aj).abs() > 1e-12 {
                    return aj.partial_cmp(&ai).unwrap();
                }
            }
            std::cmp::Ordering::Equal
        });
    } else {
        order.sort_by(|&i, &j| eigenvalues[j].partial_cmp(&eigenvalues[i]).unwrap());
    }

    let sorted_values: Vec<f64> = order.iter().map(|&i| eigenvalues[i]).collect();
    let vectors = if want_vectors {
        let mut out = ComplexMatrix::zeros(d, d);
        for (new_c, &old_c) in order.iter().enumerate() {
            let mut col = v.column(old_c);
            // Global phase: largest-modulus entry becomes real positive.
            let mut best = 0usize;
            let mut best_norm = 0.0f64;
            for (k, z) in col.iter().enumerate() {
                let n = z.norm();
                if n > best_norm + 1e-12 {
                    best_norm = n;
                    best = k;
                }
            }
            if best_norm > 0.0 {
                let phase = col[best] / best_norm;
                let correction = phase.conj();
                for z in col.iter_mut() {
                    *z *= correction;
                }
            }
            for k in 0..d {
                out.set(k, new_c, col[k]);
            }
        }
        out
    } else {
        ComplexMatrix::zeros(0, 0)
    };

    Ok(Spectrum {
        eigenvalues: sorted_values,
        eigenvectors: vectors,
    })
}

/// Kronecker product with the big-endian index convention
/// `(i_a, i_b) -> i_a * dim_b + i_b`. Errors if the product dimension
/// exceeds the configured cap.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let rows = a.rows() * b.rows();
    let cols = a.cols() * b.cols();
    let cap = dim_cap();
    if rows > cap || cols > cap {
        return Err(Error::DimensionOverflow {
            requested: rows.max(cols),
            cap,
        });
    }
    let mut out = ComplexMatrix::zeros(rows, cols);
    for ra in 0..a.rows() {
        for ca in 0..a.cols() {
            let f = a.get(ra, ca);
            if f.re == 0.0 && f.im == 0.0 {
                continue;
            }
            for rb in 0..b.rows() {
                for cb in 0..b.cols() {
                    out.set(ra * b.rows() + rb, ca * b.cols() + cb, f * b.get(rb, cb));
                }
            }
        }
    }
    Ok(out)
}

/// n-fold Kronecker power (n >= 1).
pub fn tensor_power(m: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    if n == 0 {
        return Err(Error::param("tensor power needs n >= 1"));
    }
    let mut out = m.clone();
    for _ in 1..n {
        out = tensor(&out, m)?;
    }
    Ok(out)
}

/// Which tensor factor `partial_trace` keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    First,
    Second,
}

/// Trace out one factor of a bipartite operator on `dims.0 x dims.1`.
pub fn partial_trace(
    m: &ComplexMatrix,
    dims: (usize, usize),
    keep: Keep,
) -> Result<ComplexMatrix> {
    let (da, db) = dims;
    if !m.is_square() || m.rows() != da * db {
        return Err(Error::dim_mismatch(format!(
            "partial trace of {}x{} with factors {}x{}",
            m.rows(),
            m.cols(),
            da,
            db
        )));
    }
    match keep {
        Keep::First => {
            let mut out = ComplexMatrix::zeros(da, da);
            for r in 0..da {
                for c in 0..da {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for b in 0..db {
                        sum += m.get(r * db + b, c * db + b);
                    }
                    out.set(r, c, sum);
                }
            }
            Ok(out)
        }
        Keep::Second => {
            let mut out = ComplexMatrix::zeros(db, db);
            for r in 0..db {
                for c in 0..db {
                    let mut sum = Complex64::new(0.0, 0.0);
                    for a in 0..da {
                        sum += m.get(a * db + r, a * db + c);
                    }
                    out.set(r, c, sum);
                }
            }
            Ok(out)
        }
    }
}

/// Purify a density operator: returns the column vector
/// `sum_i sqrt(lambda_i) |i>_S |i>_Z` of dimension d^2, built from the
/// deterministic eigendecomposition. Tracing out the second factor of its
/// projector recovers the input.
pub fn purify(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let spectrum = hermitian_eig(rho)?;
    let lambdas = clamp_state_eigenvalues(&spectrum.eigenvalues)?;
    let d = rho.dim();
    let cap = dim_cap();
    if d * d > cap {
        return Err(Error::DimensionOverflow {
            requested: d * d,
            cap,
        });
    }
    let mut amps = vec![Complex64::new(0.0, 0.0); d * d];
    for (i, &l) in lambdas.iter().enumerate() {
        if l == 0.0 {
            continue;
        }
        let w = l.sqrt();
        let col = spectrum.eigenvectors.column(i);
        for (s, &amp_s) in col.iter().enumerate() {
            // |i>_S |i>_Z with the S factor most significant; the Z copy of
            // |i> is the computational basis vector e_i.
            amps[s * d + i] += amp_s * w;
        }
    }
    Ok(ComplexMatrix::column_vector(&amps))
}

/// Schatten 1-norm. Hermitian inputs take the fast exact path (sum of
/// absolute eigenvalues); general square matrices go through the singular
/// values of m^dagger m.
pub fn trace_norm(m: &ComplexMatrix) -> Result<f64> {
    if !m.is_square() {
        return Err(Error::dim_mismatch(format!(
            "trace norm needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if m.is_hermitian(HERMITICITY_TOL) {
        let vals = hermitian_eigenvalues(m)?;
        return Ok(vals.iter().map(|l| l.abs()).sum());
    }
    let gram = m.adjoint().matmul(m);
    let vals = hermitian_eigenvalues(&gram)?;
    Ok(vals.iter().map(|l| l.max(0.0).sqrt()).sum())
}

/// d^n checked against both usize overflow and the configured cap.
pub fn checked_space_dim(d: usize, n: usize) -> Result<usize> {
    let cap = dim_cap();
    d.checked_pow(n as u32)
        .filter(|&dim| dim <= cap)
        .ok_or(Error::DimensionOverflow {
            requested: d.saturating_pow(n as u32),
            cap,
        })
}

/// Clamp a state spectrum: values in [-EIG_CLAMP_TOL, 0) become 0, anything
/// more negative is an invalid state.
pub fn clamp_state_eigenvalues(values: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(values.len());
    for &l in values {
        if l < -EIG_CLAMP_TOL {
            return Err(Error::InvalidState {
                context: format!("eigenvalue {l:.3e} below -{EIG_CLAMP_TOL:.1e}"),
            });
        }
        out.push(l.max(0.0));
    }
    Ok(out)
}
