//! Classical typical sets, quantum typical subspaces for n copies of a
//! spectrum, and the trace-distance inequality toolkit (Fannes-Audenaert,
//! gentle operator lemma).
//!
//! Typicality is the weak (entropy-window) kind: a length-n sequence is
//! delta-typical when its sample entropy sits within delta of the source
//! entropy. Enumeration is exact and restricted to the support, so spectra
//! with zero eigenvalues (pure states) degrade gracefully. Sequences are
//! stored base-d encoded, most significant symbol first, matching the
//! tensor index convention.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{
    dim_cap, hermitian_eig, trace_norm, ComplexMatrix, Spectrum, HERMITICITY_TOL,
};
use crate::states::{shannon_entropy, von_neumann_entropy, DensityMatrix};

/// Largest enumerable sequence space d^n.
pub const MAX_SEQUENCES: u128 = 1 << 24;

/// Validated probability vector with cached entropy (bits).
#[derive(Debug, Clone)]
pub struct ClassicalDistribution {
    probs: Vec<f64>,
    entropy: f64,
}

impl ClassicalDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::param("probabilities must be finite and nonnegative"));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > 1e-12 {
            return Err(Error::param(format!("probabilities sum to {sum}")));
        }
        let entropy = shannon_entropy(&probs);
        Ok(ClassicalDistribution { probs, entropy })
    }

    /// Renormalizing constructor for spectra that carry state-validation
    /// slack (trace within 1e-10 rather than 1e-12).
    pub fn from_spectrum(values: &[f64]) -> Result<Self> {
        let sum: f64 = values.iter().sum();
        if sum <= 0.0 {
            return Err(Error::param("spectrum sums to zero"));
        }
        Self::new(values.iter().map(|v| v / sum).collect())
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn entropy(&self) -> f64 {
        self.entropy
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Sample entropy of a sequence: -(1/n) sum log2 p(x_i).
pub fn sample_entropy(seq: &[usize], p: &ClassicalDistribution) -> Result<f64> {
    if seq.is_empty() {
        return Err(Error::param("sample entropy of an empty sequence"));
    }
    let mut sum = 0.0;
    for &x in seq {
        let px = *p.probs().get(x).ok_or(Error::ZeroProbabilitySymbol { symbol: x })?;
        if px <= 0.0 {
            return Err(Error::ZeroProbabilitySymbol { symbol: x });
        }
        sum -= px.log2();
    }
    Ok(sum / seq.len() as f64)
}

/// Exact enumeration of the delta-typical set.
#[derive(Debug, Clone)]
pub struct TypicalSet {
    pub n: usize,
    pub delta: f64,
    /// Sequences encoded base d, most significant symbol first, ascending.
    pub sequences: Vec<u64>,
    /// Total probability mass of the set.
    pub mass: f64,
}

pub fn decode_sequence(code: u64, d: usize, n: usize) -> Vec<usize> {
    let mut out = vec![0usize; n];
    let mut c = code;
    for slot in (0..n).rev() {
        out[slot] = (c % d as u64) as usize;
        c /= d as u64;
    }
    out
}

/// Enumerate all delta-typical sequences of length n. Only support symbols
/// are walked, so the cost is |supp|^n even for degenerate spectra.
pub fn typical_set(p: &ClassicalDistribution, n: usize, delta: f64) -> Result<TypicalSet> {
    if n == 0 {
        return Err(Error::param("typical set needs n >= 1"));
    }
    if delta < 0.0 {
        return Err(Error::param(format!("delta = {delta} must be nonnegative")));
    }
    let d = p.len();
    let total = (d as u128).pow(n as u32);
    if total > MAX_SEQUENCES {
        return Err(Error::TooLarge {
            requested: total,
            limit: MAX_SEQUENCES,
        });
    }
    let support: Vec<usize> = (0..d).filter(|&i| p.probs()[i] > 0.0).collect();
    let log_probs: Vec<f64> = support.iter().map(|&i| p.probs()[i].log2()).collect();
    let h = p.entropy();
    let s = support.len() as u64;
    let count: u64 = s.pow(n as u32);

    // Fixed-size blocks keep the parallel enumeration deterministic: each
    // block is scanned sequentially and blocks are merged in order.
    const BLOCK: u64 = 1 << 12;
    let blocks = count.div_ceil(BLOCK);
    let partials = crate::par::map_indexed(blocks as usize, |b| {
        let start = b as u64 * BLOCK;
        let end = (start + BLOCK).min(count);
        let mut members = Vec::new();
        let mut mass = 0.0f64;
        let mut digits = vec![0usize; n];
        // Decode `start` in base s.
        let mut c = start;
        for slot in (0..n).rev() {
            digits[slot] = (c % s) as usize;
            c /= s;
        }
        for _ in start..end {
            let mut log_p = 0.0;
            for &dg in &digits {
                log_p += log_probs[dg];
            }
            let h_bar = -log_p / n as f64;
            if (h_bar - h).abs() <= delta {
                let mut code = 0u64;
                for &dg in &digits {
                    code = code * d as u64 + support[dg] as u64;
                }
                members.push(code);
                mass += 2f64.powf(log_p);
            }
            // Odometer increment.
            for slot in (0..n).rev() {
                digits[slot] += 1;
                if digits[slot] < s as usize {
                    break;
                }
                digits[slot] = 0;
            }
        }
        (members, mass)
    });

    let mut sequences = Vec::new();
    let mut mass = 0.0;
    for (members, m) in partials {
        sequences.extend(members);
        mass += m;
    }
    Ok(TypicalSet {
        n,
        delta,
        sequences,
        mass,
    })
}

/// Delta-typical subspace of rho^(x)n, carried in the eigenbasis of rho and
/// mapped to the computational frame through the stored eigenvectors.
#[derive(Debug, Clone)]
pub struct TypicalSubspace {
    pub n: usize,
    pub delta: f64,
    /// Spectrum of the source state (renormalized, descending).
    pub base: ClassicalDistribution,
    /// Eigenvector columns of the source state, in spectrum order.
    eigenvectors: ComplexMatrix,
    /// Typical sequences over spectrum indices, base-d encoded, ascending.
    pub indices: Vec<u64>,
    /// Probability mass Tr(Pi rho^(x)n).
    pub mass: f64,
    /// 2^{n (H - delta)}.
    pub d_lower: f64,
    /// 2^{n (H(rho^d) + delta)} for the source state's diagonal.
    pub d_upper_diag: f64,
    source_dim: usize,
    coordinate_aligned: bool,
}

impl TypicalSubspace {
    pub fn dim_typ(&self) -> usize {
        self.indices.len()
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    /// Full-space dimension d^n.
    pub fn space_dim(&self) -> usize {
        self.source_dim.pow(self.n as u32)
    }

    /// True when every source eigenvector is a computational basis vector,
    /// so the subspace basis is a set of reference-basis vectors.
    pub fn is_coordinate_aligned(&self) -> bool {
        self.coordinate_aligned
    }

    /// Basis column for the i-th typical sequence: the tensor product of the
    /// source eigenvector columns selected by the sequence.
    pub fn basis_vector(&self, i: usize) -> Vec<Complex64> {
        let d = self.source_dim;
        let seq = decode_sequence(self.indices[i], d, self.n);
        let mut vec = vec![Complex64::new(1.0, 0.0)];
        for &sym in &seq {
            let col = self.eigenvectors.column(sym);
            let mut next = vec![Complex64::new(0.0, 0.0); vec.len() * d];
            for (a, &va) in vec.iter().enumerate() {
                if va.re == 0.0 && va.im == 0.0 {
                    continue;
                }
                for (b, &vb) in col.iter().enumerate() {
                    next[a * d + b] = va * vb;
                }
            }
            vec = next;
        }
        vec
    }

    /// For a coordinate-aligned subspace: the computational index of the
    /// i-th basis vector.
    pub fn aligned_index(&self, i: usize) -> Option<usize> {
        if !self.coordinate_aligned {
            return None;
        }
        let d = self.source_dim;
        let seq = decode_sequence(self.indices[i], d, self.n);
        let mut idx = 0usize;
        for &sym in &seq {
            // Column `sym` is e_{row} for a unique row.
            let col = self.eigenvectors.column(sym);
            let row = col
                .iter()
                .enumerate()
                .max_by(|(_, a), (_, b)| a.norm().partial_cmp(&b.norm()).unwrap())
                .map(|(r, _)| r)
                .unwrap();
            idx = idx * d + row;
        }
        Some(idx)
    }

    /// Dense projector in the computational frame. Quadratic in d^n; meant
    /// for small copy counts.
    pub fn projector(&self) -> Result<ComplexMatrix> {
        let dim = self.space_dim();
        if dim > dim_cap() {
            return Err(Error::DimensionOverflow {
                requested: dim,
                cap: dim_cap(),
            });
        }
        let mut out = ComplexMatrix::zeros(dim, dim);
        for i in 0..self.dim_typ() {
            let v = self.basis_vector(i);
            for r in 0..dim {
                if v[r].re == 0.0 && v[r].im == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    let cur = out.get(r, c);
                    out.set(r, c, cur + v[r] * v[c].conj());
                }
            }
        }
        Ok(out)
    }
}

/// Build the delta-typical subspace of rho^(x)n from the deterministic
/// eigendecomposition of rho. The ambient dimension d^n must stay within
/// the operator cap.
pub fn typical_subspace(rho: &DensityMatrix, n: usize, delta: f64) -> Result<TypicalSubspace> {
    crate::numkernel::checked_space_dim(rho.dim(), n)?;
    let Spectrum {
        eigenvalues,
        eigenvectors,
    } = hermitian_eig(rho.matrix())?;
    let clamped = crate::numkernel::clamp_state_eigenvalues(&eigenvalues)?;
    let base = ClassicalDistribution::from_spectrum(&clamped)?;
    let set = typical_set(&base, n, delta)?;

    let d = rho.dim();
    let diag: Vec<f64> = (0..d).map(|i| rho.matrix().get(i, i).re.max(0.0)).collect();
    let h_diag = shannon_entropy(&diag);
    let h = base.entropy();

    // Aligned iff every eigenvector column is a computational basis vector.
    let coordinate_aligned = (0..d).all(|c| {
        let col = eigenvectors.column(c);
        let mut ones = 0;
        let mut ok = true;
        for z in &col {
            let norm = z.norm();
            if norm > 1.0 - 1e-9 {
                ones += 1;
                // Phase convention makes the big entry real positive.
                ok &= (z - Complex64::new(1.0, 0.0)).norm() < 1e-9;
            } else if norm > 1e-9 {
                ok = false;
            }
        }
        ok && ones == 1
    });

    Ok(TypicalSubspace {
        n,
        delta,
        base,
        eigenvectors,
        indices: set.sequences,
        mass: set.mass,
        d_lower: 2f64.powf(n as f64 * (h - delta)),
        d_upper_diag: 2f64.powf(n as f64 * (h_diag + delta)),
        source_dim: d,
        coordinate_aligned,
    })
}

/// Numerical check of the three typical-subspace properties.
#[derive(Debug, Clone, Copy)]
pub struct TypicalityReport {
    /// Tr(Pi rho^(x)n).
    pub mass: f64,
    /// 1 - mass, the epsilon that property (a) reports.
    pub eps: f64,
    pub dim_typ: usize,
    /// (1 - eps) 2^{n(H - delta)} <= dim_typ <= 2^{n(H + delta)}.
    pub dim_bounds_ok: bool,
    pub dim_lower: f64,
    pub dim_upper: f64,
    /// Eigenvalue sandwich of the pinched operator on the typical block.
    pub sandwich_ok: bool,
    pub sandwich_min: f64,
    pub sandwich_max: f64,
}

/// Evaluate properties (a)-(c) for a subspace built from `rho`'s spectrum.
/// The pinched operator Pi rho^(x)n Pi is diagonal in the subspace basis
/// with entries p(x^n), so the sandwich is checked classically.
pub fn typicality_properties(ts: &TypicalSubspace, rho: &DensityMatrix) -> Result<TypicalityReport> {
    if rho.dim() != ts.source_dim {
        return Err(Error::dim_mismatch(format!(
            "subspace was built for dim {}, state has dim {}",
            ts.source_dim,
            rho.dim()
        )));
    }
    let n = ts.n as f64;
    let h = ts.base.entropy();
    let eps = 1.0 - ts.mass;
    let dim_lower = (1.0 - eps) * 2f64.powf(n * (h - ts.delta));
    let dim_upper = 2f64.powf(n * (h + ts.delta));
    let k = ts.dim_typ() as f64;
    let dim_bounds_ok = dim_lower <= k + 1e-9 && k <= dim_upper + 1e-9;

    let lo_bound = 2f64.powf(-n * (h + ts.delta));
    let hi_bound = 2f64.powf(-n * (h - ts.delta));
    let mut sandwich_min = f64::INFINITY;
    let mut sandwich_max: f64 = 0.0;
    for &code in &ts.indices {
        let seq = decode_sequence(code, ts.source_dim, ts.n);
        let p: f64 = seq.iter().map(|&x| ts.base.probs()[x]).product();
        sandwich_min = sandwich_min.min(p);
        sandwich_max = sandwich_max.max(p);
    }
    let sandwich_ok = if ts.indices.is_empty() {
        true
    } else {
        sandwich_min >= lo_bound * (1.0 - 1e-12) && sandwich_max <= hi_bound * (1.0 + 1e-12)
    };

    Ok(TypicalityReport {
        mass: ts.mass,
        eps,
        dim_typ: ts.dim_typ(),
        dim_bounds_ok,
        dim_lower,
        dim_upper,
        sandwich_ok,
        sandwich_min,
        sandwich_max,
    })
}

/// Two sides of the Fannes-Audenaert entropy continuity bound.
#[derive(Debug, Clone, Copy)]
pub struct FannesAudenaert {
    /// |H(rho) - H(sigma)|.
    pub delta_h: f64,
    /// T log2(d-1) + H2(T) with T the half trace distance.
    pub bound: f64,
    pub trace_half_distance: f64,
    pub holds: bool,
}

pub fn fannes_audenaert_check(
    rho: &DensityMatrix,
    sigma: &DensityMatrix,
) -> Result<FannesAudenaert> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dim_mismatch(format!(
            "states of dim {} and {}",
            rho.dim(),
            sigma.dim()
        )));
    }
    let d = rho.dim() as f64;
    let t = 0.5 * trace_norm(&rho.matrix().sub(sigma.matrix()))?;
    let delta_h = (von_neumann_entropy(rho)? - von_neumann_entropy(sigma)?).abs();
    // log2(d - 1) vanishes at d = 2, no special-casing needed.
    let log_term = if d > 1.0 { (d - 1.0).log2() } else { 0.0 };
    let bound = t.clamp(0.0, 1.0) * log_term + crate::coherence::binary_entropy(t.clamp(0.0, 1.0))?;
    Ok(FannesAudenaert {
        delta_h,
        bound,
        trace_half_distance: t,
        holds: bound >= delta_h - 1e-9,
    })
}

/// Outcome of the gentle operator lemma check.
#[derive(Debug, Clone, Copy)]
pub struct GentleOperator {
    /// max(0, Tr rho - Tr(Lambda rho)).
    pub eps: f64,
    /// ||rho - sqrt(Lambda) rho sqrt(Lambda)||_1.
    pub disturbance: f64,
    pub holds: bool,
}

/// Check `disturbance <= 2 sqrt(eps)` for a measurement operator
/// 0 <= Lambda <= I (within 1e-9 on the spectrum).
pub fn gentle_operator_check(lambda: &ComplexMatrix, rho: &DensityMatrix) -> Result<GentleOperator> {
    if !lambda.is_square() || lambda.dim() != rho.dim() {
        return Err(Error::dim_mismatch(format!(
            "operator {}x{} against state of dim {}",
            lambda.rows(),
            lambda.cols(),
            rho.dim()
        )));
    }
    if lambda.hermiticity_deviation() > HERMITICITY_TOL {
        return Err(Error::NotAMeasurementOperator {
            context: "not Hermitian".into(),
        });
    }
    let decomp = hermitian_eig(lambda)?;
    for &l in &decomp.eigenvalues {
        if !(-1e-9..=1.0 + 1e-9).contains(&l) {
            return Err(Error::NotAMeasurementOperator {
                context: format!("eigenvalue {l} outside [0, 1]"),
            });
        }
    }
    // Spectral square root with clamped eigenvalues.
    let d = lambda.dim();
    let v = &decomp.eigenvectors;
    let sqrt_lambda = ComplexMatrix::from_fn(d, d, |r, c| {
        (0..d)
            .map(|k| v.get(r, k) * decomp.eigenvalues[k].max(0.0).sqrt() * v.get(c, k).conj())
            .sum()
    });
    let pinched = sqrt_lambda.matmul(rho.matrix()).matmul(&sqrt_lambda);
    let disturbance = trace_norm(&rho.matrix().sub(&pinched))?;
    let overlap = (0..d)
        .map(|i| {
            (0..d)
                .map(|j| (lambda.get(i, j) * rho.matrix().get(j, i)).re)
                .sum::<f64>()
        })
        .sum::<f64>();
    let eps = (1.0 - overlap).max(0.0);
    Ok(GentleOperator {
        eps,
        disturbance,
        holds: disturbance <= 2.0 * eps.sqrt() + 1e-9,
    })
}
