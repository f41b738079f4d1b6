//! Validated quantum states, named state families, and entropy functionals.
//!
//! All entropies are in bits. A [`DensityMatrix`] can only be constructed
//! through validation: Hermitian within 1e-10, unit trace within 1e-10, and
//! eigenvalues above -1e-10 (small negatives are clamped to zero wherever a
//! spectrum feeds an entropy).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{
    self, clamp_state_eigenvalues, hermitian_eigenvalues, partial_trace, ComplexMatrix, Keep,
    HERMITICITY_TOL,
};

/// Unit-trace tolerance for state validation.
pub const TRACE_TOL: f64 = 1e-10;

/// Validated d x d density operator.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityMatrix {
    dim: usize,
    matrix: ComplexMatrix,
}

impl<'de> Deserialize<'de> for DensityMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            dim: usize,
            matrix: ComplexMatrix,
        }
        let doc = Doc::deserialize(d)?;
        if doc.matrix.rows() != doc.dim {
            return Err(serde::de::Error::custom(format!(
                "declared dim {} does not match matrix rows {}",
                doc.dim,
                doc.matrix.rows()
            )));
        }
        DensityMatrix::new(doc.matrix).map_err(serde::de::Error::custom)
    }
}

impl DensityMatrix {
    /// Validate and wrap a candidate density operator.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::InvalidState {
                context: format!("state must be square, got {}x{}", matrix.rows(), matrix.cols()),
            });
        }
        let dev = matrix.hermiticity_deviation();
        if dev > HERMITICITY_TOL {
            return Err(Error::InvalidState {
                context: format!("not Hermitian: deviation {dev:.3e}"),
            });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState {
                context: format!("trace {tr} differs from 1"),
            });
        }
        let vals = hermitian_eigenvalues(&matrix)?;
        clamp_state_eigenvalues(&vals).map_err(|_| Error::InvalidState {
            context: format!(
                "negative eigenvalue {:.3e}",
                vals.last().copied().unwrap_or(0.0)
            ),
        })?;
        Ok(DensityMatrix {
            dim: matrix.dim(),
            matrix,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix {
            dim,
            matrix: ComplexMatrix::identity(dim).scaled(1.0 / dim as f64),
        }
    }

    /// Clamped eigenvalues, descending.
    pub fn spectrum_values(&self) -> Result<Vec<f64>> {
        clamp_state_eigenvalues(&hermitian_eigenvalues(&self.matrix)?)
    }

    /// n-fold tensor power rho^(x)n.
    pub fn tensor_power(&self, n: usize) -> Result<Self> {
        let m = numkernel::tensor_power(&self.matrix, n)?;
        DensityMatrix::new(m)
    }

    /// Purification vector on S (x) Z with the system factor most
    /// significant; tracing Z out recovers the state.
    pub fn purify(&self) -> Result<ComplexMatrix> {
        numkernel::purify(&self.matrix)
    }
}

/// Unit-norm pure state amplitudes in the computational basis.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dim: usize,
    amplitudes: Vec<Complex64>,
}

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState {
                context: format!("pure state norm {norm} differs from 1"),
            });
        }
        Ok(PureState {
            dim: amplitudes.len(),
            amplitudes,
        })
    }

    pub fn basis_state(dim: usize, index: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); dim];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        PureState { dim, amplitudes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    /// Rank-one projector |psi><psi| as a validated state.
    pub fn projector(&self) -> DensityMatrix {
        DensityMatrix {
            dim: self.dim,
            matrix: ComplexMatrix::outer(&self.amplitudes),
        }
    }
}

/// The maximally coherent state: all amplitudes 1/sqrt(d).
pub fn maximally_coherent(d: usize) -> PureState {
    assert!(d >= 1, "dimension must be positive");
    let amp = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    PureState {
        dim: d,
        amplitudes: vec![amp; d],
    }
}

/// The maximally coherent mixed family
/// rho_p = (1-p) I/d + p |psi_d><psi_d| for p in [0, 1].
pub fn max_coherent_mixed(d: usize, p: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    let pure = maximally_coherent(d).projector();
    let mixed = ComplexMatrix::identity(d).scaled((1.0 - p) / d as f64);
    DensityMatrix::new(mixed.add(&pure.matrix().scaled(p)))
}

/// Shannon entropy in bits with the 0 log 0 = 0 convention. Assumes a
/// clamped nonnegative input.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.log2())
        .sum::<f64>()
        + 0.0 // normalize -0.0 from a deterministic spectrum
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    Ok(shannon_entropy(&rho.spectrum_values()?))
}

/// Quantum mutual information I(A:B) = H(A) + H(B) - H(AB) in bits.
pub fn mutual_information(rho_ab: &DensityMatrix, dims: (usize, usize)) -> Result<f64> {
    let (da, db) = dims;
    if rho_ab.dim() != da * db {
        return Err(Error::dim_mismatch(format!(
            "bipartite state of dim {} does not split as {}x{}",
            rho_ab.dim(),
            da,
            db
        )));
    }
    let a = DensityMatrix::new(partial_trace(rho_ab.matrix(), dims, Keep::First)?)?;
    let b = DensityMatrix::new(partial_trace(rho_ab.matrix(), dims, Keep::Second)?)?;
    Ok(von_neumann_entropy(&a)? + von_neumann_entropy(&b)? - von_neumann_entropy(rho_ab)?)
}

/// Outcome of the Araki-Lieb inequality |H(A) - H(B)| <= H(AB).
#[derive(Debug, Clone, Copy)]
pub struct ArakiLieb {
    /// |H(A) - H(B)|
    pub lhs: f64,
    /// H(AB)
    pub rhs: f64,
    pub holds: bool,
}

pub fn araki_lieb_check(rho_ab: &DensityMatrix, dims: (usize, usize)) -> Result<ArakiLieb> {
    let (da, db) = dims;
    if rho_ab.dim() != da * db {
        return Err(Error::dim_mismatch(format!(
            "bipartite state of dim {} does not split as {}x{}",
            rho_ab.dim(),
            da,
            db
        )));
    }
    let a = DensityMatrix::new(partial_trace(rho_ab.matrix(), dims, Keep::First)?)?;
    let b = DensityMatrix::new(partial_trace(rho_ab.matrix(), dims, Keep::Second)?)?;
    let lhs = (von_neumann_entropy(&a)? - von_neumann_entropy(&b)?).abs();
    let rhs = von_neumann_entropy(rho_ab)?;
    Ok(ArakiLieb {
        lhs,
        rhs,
        holds: rhs >= lhs - 1e-9,
    })
}

/// Seeded Hilbert-Schmidt-style random state: G G^dagger / Tr(G G^dagger)
/// with G a d x rank matrix of independent standard complex Gaussians.
pub fn random_state(d: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    if rank == 0 || rank > d {
        return Err(Error::param(format!("rank {rank} outside 1..={d}")));
    }
    let mut rng = crate::seeding::substream(seed, &[0x5157_4154]);
    let g = ComplexMatrix::from_fn(d, rank, |_, _| crate::seeding::complex_gaussian(&mut rng));
    let gram = g.matmul(&g.adjoint());
    let tr = gram.trace().re;
    DensityMatrix::new(gram.scaled(1.0 / tr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::tensor;

    const H_075: f64 = 0.8112781244591328; // -0.75 log2 0.75 - 0.25 log2 0.25

    #[test]
    fn maximally_coherent_amplitudes() {
        let one = maximally_coherent(1);
        assert_eq!(one.amplitudes()[0], Complex64::new(1.0, 0.0));

        let two = maximally_coherent(2);
        let amp = 1.0 / 2.0f64.sqrt();
        for a in two.amplitudes() {
            assert!((a - Complex64::new(amp, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn max_coherent_mixed_limits_and_spectrum() {
        let flat = max_coherent_mixed(3, 0.0).unwrap();
        assert!(flat
            .matrix()
            .sub(&ComplexMatrix::identity(3).scaled(1.0 / 3.0))
            .max_abs_entry()
            < 1e-14);

        let pure = max_coherent_mixed(3, 1.0).unwrap();
        assert!(pure
            .matrix()
            .sub(maximally_coherent(3).projector().matrix())
            .max_abs_entry()
            < 1e-14);

        // d=2, p=1/2: closed-form eigenvalues (1 +- p)/2.
        let rho = max_coherent_mixed(2, 0.5).unwrap();
        let vals = rho.spectrum_values().unwrap();
        assert!((vals[0] - 0.75).abs() < 1e-12);
        assert!((vals[1] - 0.25).abs() < 1e-12);
        assert!((von_neumann_entropy(&rho).unwrap() - H_075).abs() < 1e-12);

        assert!(max_coherent_mixed(2, 1.5).is_err());
    }

    #[test]
    fn entropy_examples() {
        let pure = maximally_coherent(4).projector();
        assert!(von_neumann_entropy(&pure).unwrap().abs() < 1e-9);

        let mixed = DensityMatrix::maximally_mixed(2);
        assert!((von_neumann_entropy(&mixed).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn entropy_invariant_under_unitary_conjugation() {
        for seed in 0..20u64 {
            let rho = random_state(3, 3, seed).unwrap();
            let u = crate::erasure::haar_unitary(3, seed + 777);
            let rotated = DensityMatrix::new(u.conjugate_with(rho.matrix())).unwrap();
            let h0 = von_neumann_entropy(&rho).unwrap();
            let h1 = von_neumann_entropy(&rotated).unwrap();
            assert!((h0 - h1).abs() < 1e-9, "seed {seed}: {h0} vs {h1}");
        }
    }

    #[test]
    fn mutual_information_examples() {
        // Product state.
        let a = random_state(2, 2, 5).unwrap();
        let b = random_state(3, 2, 6).unwrap();
        let ab = DensityMatrix::new(tensor(a.matrix(), b.matrix()).unwrap()).unwrap();
        assert!(mutual_information(&ab, (2, 3)).unwrap().abs() < 1e-9);

        // Maximally entangled two-qubit state.
        let amp = 1.0 / 2.0f64.sqrt();
        let bell = PureState::new(vec![
            Complex64::new(amp, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(0.0, 0.0),
            Complex64::new(amp, 0.0),
        ])
        .unwrap()
        .projector();
        assert!((mutual_information(&bell, (2, 2)).unwrap() - 2.0).abs() < 1e-9);

        // Pure bipartite state gives 2 H(A).
        let rho = DensityMatrix::new(ComplexMatrix::diagonal(&[0.75, 0.25])).unwrap();
        let psi = rho.purify().unwrap();
        let joint = DensityMatrix::new(ComplexMatrix::outer(psi.data())).unwrap();
        assert!((mutual_information(&joint, (2, 2)).unwrap() - 2.0 * H_075).abs() < 1e-9);
    }

    #[test]
    fn mutual_information_bounds_on_random_states() {
        for seed in 0..40u64 {
            let ab = random_state(4, 1 + (seed % 4) as usize, seed).unwrap();
            let mi = mutual_information(&ab, (2, 2)).unwrap();
            let a = DensityMatrix::new(
                partial_trace(ab.matrix(), (2, 2), Keep::First).unwrap(),
            )
            .unwrap();
            let b = DensityMatrix::new(
                partial_trace(ab.matrix(), (2, 2), Keep::Second).unwrap(),
            )
            .unwrap();
            let ha = von_neumann_entropy(&a).unwrap();
            let hb = von_neumann_entropy(&b).unwrap();
            assert!(mi >= -1e-9);
            assert!(mi <= 2.0 * ha.min(hb) + 1e-9);
        }
    }

    #[test]
    fn araki_lieb_cases() {
        let rho = DensityMatrix::new(ComplexMatrix::diagonal(&[0.6, 0.4])).unwrap();
        let psi = rho.purify().unwrap();
        let joint = DensityMatrix::new(ComplexMatrix::outer(psi.data())).unwrap();
        let al = araki_lieb_check(&joint, (2, 2)).unwrap();
        assert!(al.lhs < 1e-9 && al.rhs < 1e-9 && al.holds);

        // I/2 (x) |0><0|: H(A)=1, H(B)=0, H(AB)=1.
        let a = DensityMatrix::maximally_mixed(2);
        let b = PureState::basis_state(2, 0).projector();
        let ab = DensityMatrix::new(tensor(a.matrix(), b.matrix()).unwrap()).unwrap();
        let al = araki_lieb_check(&ab, (2, 2)).unwrap();
        assert!((al.lhs - 1.0).abs() < 1e-9 && (al.rhs - 1.0).abs() < 1e-9 && al.holds);

        for seed in 0..100u64 {
            let ab = random_state(4, 1 + (seed % 4) as usize, 3000 + seed).unwrap();
            assert!(araki_lieb_check(&ab, (2, 2)).unwrap().holds, "seed {seed}");
        }
    }

    #[test]
    fn random_state_contract() {
        let pure = random_state(4, 1, 11).unwrap();
        assert!(von_neumann_entropy(&pure).unwrap() < 1e-9);

        let a = random_state(3, 2, 42).unwrap();
        let b = random_state(3, 2, 42).unwrap();
        assert_eq!(a.matrix().data(), b.matrix().data());

        assert!(random_state(2, 3, 0).is_err());
        assert!(random_state(2, 0, 0).is_err());
    }

    #[test]
    fn random_state_mean_approaches_maximally_mixed() {
        let mut mean = ComplexMatrix::zeros(2, 2);
        let count = 1000u64;
        for seed in 0..count {
            mean = mean.add(random_state(2, 2, seed).unwrap().matrix());
        }
        mean = mean.scaled(1.0 / count as f64);
        let dist = crate::numkernel::trace_norm(
            &mean.sub(&ComplexMatrix::identity(2).scaled(0.5)),
        )
        .unwrap();
        assert!(dist < 0.05, "Monte Carlo mean off by {dist}");
    }

    #[test]
    fn validation_rejects_malformed_states() {
        // Non-Hermitian.
        let m = ComplexMatrix::from_fn(2, 2, |r, c| Complex64::new((r + 2 * c) as f64, 0.0));
        assert!(DensityMatrix::new(m).is_err());

        // Wrong trace.
        let m = ComplexMatrix::diagonal(&[0.9, 0.9]);
        assert!(DensityMatrix::new(m).is_err());

        // Negative eigenvalue.
        let m = ComplexMatrix::diagonal(&[1.2, -0.2]);
        assert!(DensityMatrix::new(m).is_err());
    }

    #[test]
    fn serialization_round_trip_revalidates() {
        let rho = max_coherent_mixed(2, 0.3).unwrap();
        let doc = serde_json::to_string(&rho).unwrap();
        let back: DensityMatrix = serde_json::from_str(&doc).unwrap();
        assert!(back.matrix().sub(rho.matrix()).max_abs_entry() < 1e-15);

        // Tampered payload must be rejected on load.
        let bad = doc.replace("1.0", "2.0");
        if bad != doc {
            assert!(serde_json::from_str::<DensityMatrix>(&bad).is_err());
        }
    }
}
