//! Random-unitary ensembles, incoherent unitaries, and entropy exchange.
//!
//! A channel here is a weighted ensemble `{p_i, U_i}` acting as
//! `rho -> sum_i p_i U_i rho U_i^dagger`. Entropy exchange is computed two
//! independent ways: the Kraus-overlap matrix `W_ij = sqrt(p_i p_j)
//! Tr(U_i rho U_j^dagger)` (scales with the ensemble size) and the
//! purification route (scales with dim^2). The two must agree; tests and the
//! acceptance suite hold them to 1e-9 of each other.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numkernel::{
    clamp_state_eigenvalues, hermitian_eigenvalues, tensor, ComplexMatrix, UNITARITY_TOL,
};
use crate::states::{shannon_entropy, DensityMatrix};

const PROB_SUM_TOL: f64 = 1e-10;

/// Weighted list {p_i, U_i} representing a random-unitary channel.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnitaryEnsemble {
    dim: usize,
    members: Vec<EnsembleMember>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleMember {
    pub p: f64,
    pub unitary: ComplexMatrix,
}

impl<'de> Deserialize<'de> for UnitaryEnsemble {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Doc {
            dim: usize,
            members: Vec<EnsembleMember>,
        }
        let doc = Doc::deserialize(d)?;
        let members = doc
            .members
            .into_iter()
            .map(|m| (m.p, m.unitary))
            .collect();
        UnitaryEnsemble::new(doc.dim, members).map_err(serde::de::Error::custom)
    }
}

impl UnitaryEnsemble {
    /// Validate probabilities (nonnegative, sum 1 within 1e-10) and member
    /// unitarity (within 1e-9).
    pub fn new(dim: usize, members: Vec<(f64, ComplexMatrix)>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::InvalidEnsemble {
                context: "ensemble needs at least one member".into(),
            });
        }
        let mut sum = 0.0;
        for (i, (p, u)) in members.iter().enumerate() {
            if *p < 0.0 {
                return Err(Error::InvalidEnsemble {
                    context: format!("member {i} has negative probability {p}"),
                });
            }
            sum += p;
            if u.rows() != dim || u.cols() != dim {
                return Err(Error::InvalidEnsemble {
                    context: format!("member {i} is {}x{}, expected {dim}x{dim}", u.rows(), u.cols()),
                });
            }
            let dev = u.unitarity_deviation();
            if dev > UNITARITY_TOL {
                return Err(Error::InvalidEnsemble {
                    context: format!("member {i} unitarity deviation {dev:.3e}"),
                });
            }
        }
        if (sum - 1.0).abs() > PROB_SUM_TOL {
            return Err(Error::InvalidEnsemble {
                context: format!("probabilities sum to {sum}"),
            });
        }
        Ok(UnitaryEnsemble {
            dim,
            members: members
                .into_iter()
                .map(|(p, unitary)| EnsembleMember { p, unitary })
                .collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }

    pub fn members(&self) -> &[EnsembleMember] {
        &self.members
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.members.iter().map(|m| m.p).collect()
    }

    /// True when every member factors as permutation x phases.
    pub fn all_incoherent(&self) -> bool {
        self.members
            .iter()
            .all(|m| IncoherentUnitary::from_matrix(&m.unitary, 1e-8).is_some())
    }

    /// n-fold product ensemble: members are all tensor products of n member
    /// choices with product weights. Size grows as N^n.
    pub fn tensor_power(&self, n: usize, member_limit: usize) -> Result<UnitaryEnsemble> {
        if n == 0 {
            return Err(Error::param("ensemble tensor power needs n >= 1"));
        }
        let total = (self.size() as u128).pow(n as u32);
        if total > member_limit as u128 {
            return Err(Error::TooLarge {
                requested: total,
                limit: member_limit as u128,
            });
        }
        let mut members: Vec<(f64, ComplexMatrix)> =
            vec![(1.0, ComplexMatrix::identity(1))];
        for _ in 0..n {
            let mut next = Vec::with_capacity(members.len() * self.size());
            for (p, u) in &members {
                for m in &self.members {
                    next.push((p * m.p, tensor(u, &m.unitary)?));
                }
            }
            members = next;
        }
        UnitaryEnsemble::new(self.dim.pow(n as u32), members)
    }
}

/// Incoherent unitary in factored form U = V Pi: first the permutation Pi,
/// then the diagonal phase V, so `U |j> = e^{i phi_{Pi(j)}} |Pi(j)>`.
#[derive(Debug, Clone, PartialEq)]
pub struct IncoherentUnitary {
    dim: usize,
    permutation: Vec<usize>,
    phases: Vec<f64>,
}

impl IncoherentUnitary {
    pub fn new(permutation: Vec<usize>, phases: Vec<f64>) -> Result<Self> {
        let dim = permutation.len();
        if phases.len() != dim {
            return Err(Error::param(format!(
                "{} phases for a dimension-{dim} permutation",
                phases.len()
            )));
        }
        let mut seen = vec![false; dim];
        for &t in &permutation {
            if t >= dim || seen[t] {
                return Err(Error::param("permutation is not a bijection".to_string()));
            }
            seen[t] = true;
        }
        let tau = 2.0 * std::f64::consts::PI;
        let phases = phases.into_iter().map(|p| p.rem_euclid(tau)).collect();
        Ok(IncoherentUnitary {
            dim,
            permutation,
            phases,
        })
    }

    pub fn identity(dim: usize) -> Self {
        IncoherentUnitary {
            dim,
            permutation: (0..dim).collect(),
            phases: vec![0.0; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn permutation(&self) -> &[usize] {
        &self.permutation
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    /// Dense matrix with entry e^{i phi_{Pi(j)}} at (Pi(j), j).
    pub fn to_matrix(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let t = self.permutation[j];
            m.set(t, j, Complex64::from_polar(1.0, self.phases[t]));
        }
        m
    }

    /// Group product: `self` applied after `other`.
    pub fn compose(&self, other: &IncoherentUnitary) -> IncoherentUnitary {
        assert_eq!(self.dim, other.dim);
        let mut permutation = vec![0usize; self.dim];
        let mut phases = vec![0.0; self.dim];
        for j in 0..self.dim {
            let mid = other.permutation[j];
            let end = self.permutation[mid];
            permutation[j] = end;
            phases[end] = (other.phases[mid] + self.phases[end])
                .rem_euclid(2.0 * std::f64::consts::PI);
        }
        IncoherentUnitary {
            dim: self.dim,
            permutation,
            phases,
        }
    }

    pub fn inverse(&self) -> IncoherentUnitary {
        let mut permutation = vec![0usize; self.dim];
        let mut phases = vec![0.0; self.dim];
        for j in 0..self.dim {
            let t = self.permutation[j];
            permutation[t] = j;
            phases[j] = (-self.phases[t]).rem_euclid(2.0 * std::f64::consts::PI);
        }
        IncoherentUnitary {
            dim: self.dim,
            permutation,
            phases,
        }
    }

    /// Seeded uniform draw: a random permutation and uniform phases.
    pub fn random(dim: usize, seed: u64) -> IncoherentUnitary {
        use rand::Rng;
        let mut rng = crate::seeding::substream(seed, &[0x0049_4e43]);
        let mut permutation: Vec<usize> = (0..dim).collect();
        // Fisher-Yates.
        for i in (1..dim).rev() {
            let j = rng.gen_range(0..=i);
            permutation.swap(i, j);
        }
        let tau = 2.0 * std::f64::consts::PI;
        let phases = (0..dim).map(|_| rng.gen::<f64>() * tau).collect();
        IncoherentUnitary {
            dim,
            permutation,
            phases,
        }
    }

    /// Factorization test: accept a matrix with exactly one unit-modulus
    /// entry per column (and per row) within `tol`.
    pub fn from_matrix(m: &ComplexMatrix, tol: f64) -> Option<IncoherentUnitary> {
        if !m.is_square() {
            return None;
        }
        let d = m.dim();
        let mut permutation = vec![usize::MAX; d];
        let mut phases = vec![0.0; d];
        let mut row_used = vec![false; d];
        for j in 0..d {
            let mut hit = None;
            for r in 0..d {
                let z = m.get(r, j);
                let n = z.norm();
                if (n - 1.0).abs() <= tol {
                    if hit.is_some() {
                        return None;
                    }
                    hit = Some((r, z));
                } else if n > tol {
                    return None;
                }
            }
            let (r, z) = hit?;
            if row_used[r] {
                return None;
            }
            row_used[r] = true;
            permutation[j] = r;
            phases[r] = z.arg().rem_euclid(2.0 * std::f64::consts::PI);
        }
        Some(IncoherentUnitary {
            dim: d,
            permutation,
            phases,
        })
    }
}

/// Apply the channel: sum_i p_i U_i rho U_i^dagger, summed in member order.
pub fn apply_ensemble(e: &UnitaryEnsemble, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if e.dim() != rho.dim() {
        return Err(Error::dim_mismatch(format!(
            "ensemble dim {} vs state dim {}",
            e.dim(),
            rho.dim()
        )));
    }
    let terms = crate::par::map_indexed(e.size(), |i| {
        let m = &e.members[i];
        m.unitary.conjugate_with(rho.matrix()).scaled(m.p)
    });
    let mut out = ComplexMatrix::zeros(e.dim(), e.dim());
    for t in &terms {
        out = out.add(t);
    }
    DensityMatrix::new(out)
}

/// Shift operator X |j> = |j + 1 mod d> and clock operator
/// Z |j> = e^{2 pi i j / d} |j> combined as X^k Z^j.
pub fn weyl_operator(d: usize, k: usize, j: usize) -> IncoherentUnitary {
    let tau = 2.0 * std::f64::consts::PI;
    let mut permutation = vec![0usize; d];
    let mut phases = vec![0.0; d];
    for a in 0..d {
        let target = (a + k) % d;
        permutation[a] = target;
        // X^k Z^j |a> = e^{2 pi i a j / d} |a + k>; the phase indexes the target.
        phases[target] = (tau * (a as f64) * (j as f64) / d as f64).rem_euclid(tau);
    }
    IncoherentUnitary {
        dim: d,
        permutation,
        phases,
    }
}

/// The d^2 Weyl operators X^k Z^j, each with weight 1/d^2. Averaging the
/// conjugation over the full set sends every input to I/d exactly.
pub fn weyl_ensemble(d: usize) -> UnitaryEnsemble {
    assert!(d >= 1, "dimension must be positive");
    let p = 1.0 / (d * d) as f64;
    let members = (0..d)
        .flat_map(|k| (0..d).map(move |j| (k, j)))
        .map(|(k, j)| (p, weyl_operator(d, k, j).to_matrix()))
        .collect();
    UnitaryEnsemble::new(d, members).expect("Weyl operators are unitary")
}

/// The clock subgroup {1/d, Z^j}: applying it equals dephasing.
pub fn z_dephasing_ensemble(d: usize) -> UnitaryEnsemble {
    assert!(d >= 1, "dimension must be positive");
    let p = 1.0 / d as f64;
    let members = (0..d)
        .map(|j| (p, weyl_operator(d, 0, j).to_matrix()))
        .collect();
    UnitaryEnsemble::new(d, members).expect("clock operators are unitary")
}

/// The environment state W_ij = sqrt(p_i p_j) Tr(U_i rho U_j^dagger); valid
/// density matrix of dimension N.
pub fn exchange_matrix(e: &UnitaryEnsemble, rho: &DensityMatrix) -> Result<ComplexMatrix> {
    if e.dim() != rho.dim() {
        return Err(Error::dim_mismatch(format!(
            "ensemble dim {} vs state dim {}",
            e.dim(),
            rho.dim()
        )));
    }
    let n = e.size();
    // Precompute U_i rho once; W_ij is then a Frobenius inner product. Each
    // lower-triangle row is independent, so the pair loop parallelizes with
    // a deterministic result.
    let products = crate::par::map_indexed(n, |i| e.members[i].unitary.matmul(rho.matrix()));
    let rows = crate::par::map_indexed(n, |i| {
        let a = products[i].data();
        (0..=i)
            .map(|j| {
                let mut tr = Complex64::new(0.0, 0.0);
                let b = e.members[j].unitary.data();
                for (x, y) in a.iter().zip(b.iter()) {
                    tr += x * y.conj();
                }
                tr * (e.members[i].p * e.members[j].p).sqrt()
            })
            .collect::<Vec<_>>()
    });
    let mut w = ComplexMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            w.set(i, j, v);
            w.set(j, i, v.conj());
        }
    }
    Ok(w)
}

/// Entropy exchange in bits via the Kraus-overlap matrix.
pub fn entropy_exchange(e: &UnitaryEnsemble, rho: &DensityMatrix) -> Result<f64> {
    let w = exchange_matrix(e, rho)?;
    let vals = clamp_state_eigenvalues(&hermitian_eigenvalues(&w)?)?;
    Ok(shannon_entropy(&vals))
}

/// Entropy exchange in bits via purification: apply the channel to the
/// system half of a purification and take the joint output entropy.
/// Independent of [`entropy_exchange`]; the two must agree to 1e-9.
pub fn entropy_exchange_via_purification(
    e: &UnitaryEnsemble,
    rho: &DensityMatrix,
) -> Result<f64> {
    if e.dim() != rho.dim() {
        return Err(Error::dim_mismatch(format!(
            "ensemble dim {} vs state dim {}",
            e.dim(),
            rho.dim()
        )));
    }
    let psi = rho.purify()?;
    let joint = ComplexMatrix::outer(psi.data());
    let d = rho.dim();
    let eye = ComplexMatrix::identity(d);
    let mut out = ComplexMatrix::zeros(d * d, d * d);
    for m in e.members() {
        let extended = tensor(&m.unitary, &eye)?;
        out = out.add(&extended.conjugate_with(&joint).scaled(m.p));
    }
    let vals = clamp_state_eigenvalues(&hermitian_eigenvalues(&out)?)?;
    Ok(shannon_entropy(&vals))
}

/// The noise chain (H_e, H(p), log2 N). The chain H_e <= H(p) <= log2 N
/// holds for every random-unitary channel; violation beyond 1e-9 is a bug.
pub fn ensemble_entropy_bounds(
    e: &UnitaryEnsemble,
    rho: &DensityMatrix,
) -> Result<(f64, f64, f64)> {
    let h_e = entropy_exchange(e, rho)?;
    let h_p = shannon_entropy(&e.probabilities());
    let log_n = (e.size() as f64).log2();
    assert!(
        h_e <= h_p + 1e-9 && h_p <= log_n + 1e-9,
        "entropy chain violated: H_e={h_e}, H(p)={h_p}, log N={log_n}"
    );
    Ok((h_e, h_p, log_n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coherence::{dephase, relative_entropy_coherence};
    use crate::erasure::haar_unitary;
    use crate::states::{maximally_coherent, random_state, von_neumann_entropy};

    fn pauli_pair() -> UnitaryEnsemble {
        let z = weyl_operator(2, 0, 1).to_matrix();
        UnitaryEnsemble::new(2, vec![(0.5, ComplexMatrix::identity(2)), (0.5, z)]).unwrap()
    }

    #[test]
    fn apply_identity_ensemble_is_noop() {
        let e = UnitaryEnsemble::new(3, vec![(1.0, ComplexMatrix::identity(3))]).unwrap();
        let rho = random_state(3, 2, 1).unwrap();
        let out = apply_ensemble(&e, &rho).unwrap();
        assert!(out.matrix().sub(rho.matrix()).max_abs_entry() < 1e-15);
    }

    #[test]
    fn qubit_erasure_by_two_incoherent_unitaries() {
        let psi2 = maximally_coherent(2).projector();
        let out = apply_ensemble(&pauli_pair(), &psi2).unwrap();
        let err = crate::numkernel::trace_norm(
            &out.matrix().sub(&ComplexMatrix::identity(2).scaled(0.5)),
        )
        .unwrap();
        assert!(err < 1e-12, "trace-norm error {err}");
    }

    #[test]
    fn weyl_ensemble_is_pauli_group_for_qubits() {
        let e = weyl_ensemble(2);
        assert_eq!(e.size(), 4);
        for m in e.members() {
            assert!((m.p - 0.25).abs() < 1e-15);
        }
        // I, Z, X, XZ in the k-major enumeration.
        let x = weyl_operator(2, 1, 0).to_matrix();
        assert!(e.members()[2].unitary.sub(&x).max_abs_entry() < 1e-15);
        assert!(e.all_incoherent());
    }

    #[test]
    fn weyl_ensemble_randomizes_exactly() {
        for d in 2..=5usize {
            let e = weyl_ensemble(d);
            for seed in 0..5u64 {
                let rho = random_state(d, 1 + (seed as usize % d), seed).unwrap();
                let out = apply_ensemble(&e, &rho).unwrap();
                let err = crate::numkernel::trace_norm(
                    &out
                        .matrix()
                        .sub(&ComplexMatrix::identity(d).scaled(1.0 / d as f64)),
                )
                .unwrap();
                assert!(err < 1e-10, "d={d} seed={seed}: {err}");
            }
        }
    }

    #[test]
    fn weyl_exchange_entropy_on_maximally_mixed_qubit() {
        let e = weyl_ensemble(2);
        let rho = DensityMatrix::maximally_mixed(2);
        // W is diagonal I/4: two noise bits.
        let h = entropy_exchange(&e, &rho).unwrap();
        assert!((h - 2.0).abs() < 1e-9);
        let h2 = entropy_exchange_via_purification(&e, &rho).unwrap();
        assert!((h - h2).abs() < 1e-9);
    }

    #[test]
    fn z_dephasing_matches_dephase() {
        for d in 2..=4usize {
            let e = z_dephasing_ensemble(d);
            for seed in 0..5u64 {
                let rho = random_state(d, d, 40 + seed).unwrap();
                let out = apply_ensemble(&e, &rho).unwrap();
                let expect = dephase(&rho);
                assert!(out.matrix().sub(expect.matrix()).max_abs_entry() < 1e-10);
            }
        }
        // Diagonal states are fixed points.
        let diag = DensityMatrix::new(ComplexMatrix::diagonal(&[0.2, 0.3, 0.5])).unwrap();
        let out = apply_ensemble(&z_dephasing_ensemble(3), &diag).unwrap();
        assert!(out.matrix().sub(diag.matrix()).max_abs_entry() < 1e-12);
    }

    #[test]
    fn incoherent_matrix_convention() {
        let id = IncoherentUnitary::identity(3);
        assert!(id.to_matrix().sub(&ComplexMatrix::identity(3)).max_abs_entry() < 1e-15);

        // Swap with phases (0, pi): entry e^{i phi_{Pi(j)}} at (Pi(j), j).
        let u = IncoherentUnitary::new(vec![1, 0], vec![0.0, std::f64::consts::PI]).unwrap();
        let m = u.to_matrix();
        assert!((m.get(1, 0) - Complex64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!((m.get(0, 1) - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(m.get(0, 0).norm() < 1e-15 && m.get(1, 1).norm() < 1e-15);
    }

    #[test]
    fn incoherent_group_operations_match_matrices() {
        for seed in 0..20u64 {
            let a = IncoherentUnitary::random(4, seed);
            let b = IncoherentUnitary::random(4, seed + 1000);
            let prod = a.compose(&b).to_matrix();
            let direct = a.to_matrix().matmul(&b.to_matrix());
            assert!(prod.sub(&direct).max_abs_entry() < 1e-12, "seed {seed}");

            let inv = a.inverse().to_matrix();
            let gram = a.to_matrix().matmul(&inv);
            assert!(gram.sub(&ComplexMatrix::identity(4)).max_abs_entry() < 1e-12);

            let recovered =
                IncoherentUnitary::from_matrix(&a.to_matrix(), 1e-9).expect("factorizable");
            assert!(recovered.to_matrix().sub(&a.to_matrix()).max_abs_entry() < 1e-12);
        }
        // A Haar unitary is essentially never incoherent.
        assert!(IncoherentUnitary::from_matrix(&haar_unitary(3, 7), 1e-8).is_none());
    }

    #[test]
    fn incoherent_conjugation_preserves_diagonal_entropy() {
        for seed in 0..100u64 {
            let rho = random_state(4, 1 + (seed as usize % 4), 500 + seed).unwrap();
            let u = IncoherentUnitary::random(4, seed);
            let rotated =
                DensityMatrix::new(u.to_matrix().conjugate_with(rho.matrix())).unwrap();
            let h0 = von_neumann_entropy(&dephase(&rho)).unwrap();
            let h1 = von_neumann_entropy(&dephase(&rotated)).unwrap();
            assert!((h0 - h1).abs() < 1e-12, "seed {seed}");

            let c0 = relative_entropy_coherence(&rho).unwrap();
            let c1 = relative_entropy_coherence(&rotated).unwrap();
            assert!((c0 - c1).abs() < 1e-9, "seed {seed}: C_r changed {c0} -> {c1}");
        }
    }

    #[test]
    fn exchange_entropy_examples() {
        let single = UnitaryEnsemble::new(2, vec![(1.0, haar_unitary(2, 3))]).unwrap();
        let rho = random_state(2, 2, 9).unwrap();
        assert!(entropy_exchange(&single, &rho).unwrap() < 1e-9);

        let psi2 = maximally_coherent(2).projector();
        let h = entropy_exchange(&pauli_pair(), &psi2).unwrap();
        assert!((h - 1.0).abs() < 1e-9);

        // Dephasing a pure state injects exactly its coherence.
        for d in 2..=4usize {
            for seed in 0..5u64 {
                let pure = random_state(d, 1, 70 + seed).unwrap();
                let h = entropy_exchange(&z_dephasing_ensemble(d), &pure).unwrap();
                let cr = relative_entropy_coherence(&pure).unwrap();
                assert!((h - cr).abs() < 1e-9, "d={d} seed={seed}: {h} vs {cr}");
            }
        }
    }

    #[test]
    fn dual_route_agreement_on_random_pairs() {
        for seed in 0..20u64 {
            let d = 2 + (seed as usize % 4);
            let n = 2 + (seed as usize % 5);
            let members: Vec<(f64, ComplexMatrix)> = (0..n)
                .map(|i| (1.0 / n as f64, haar_unitary(d, seed * 100 + i as u64)))
                .collect();
            let e = UnitaryEnsemble::new(d, members).unwrap();
            let rho = random_state(d, 1 + (seed as usize % d), seed).unwrap();
            let a = entropy_exchange(&e, &rho).unwrap();
            let b = entropy_exchange_via_purification(&e, &rho).unwrap();
            assert!((a - b).abs() < 1e-9, "seed {seed}: {a} vs {b}");
        }
    }

    #[test]
    fn entropy_chain_examples() {
        let psi2 = maximally_coherent(2).projector();
        let (h_e, h_p, log_n) = ensemble_entropy_bounds(&pauli_pair(), &psi2).unwrap();
        assert!((h_e - 1.0).abs() < 1e-9);
        assert!((h_p - 1.0).abs() < 1e-9);
        assert!((log_n - 1.0).abs() < 1e-12);

        let zero = crate::states::PureState::basis_state(2, 0).projector();
        let (h_e, h_p, log_n) = ensemble_entropy_bounds(&weyl_ensemble(2), &zero).unwrap();
        assert!((h_e - 1.0).abs() < 1e-9, "H_e = {h_e}");
        assert!((h_p - 2.0).abs() < 1e-9);
        assert!((log_n - 2.0).abs() < 1e-12);

        let single = UnitaryEnsemble::new(2, vec![(1.0, haar_unitary(2, 1))]).unwrap();
        let (h_e, h_p, log_n) = ensemble_entropy_bounds(&single, &zero).unwrap();
        assert!(h_e.abs() < 1e-9 && h_p.abs() < 1e-12 && log_n.abs() < 1e-12);
    }

    #[test]
    fn ensemble_validation_rejects_bad_input() {
        assert!(UnitaryEnsemble::new(2, vec![]).is_err());

        let skew = ComplexMatrix::diagonal(&[1.0, 2.0]);
        assert!(UnitaryEnsemble::new(2, vec![(1.0, skew)]).is_err());

        let i2 = ComplexMatrix::identity(2);
        assert!(UnitaryEnsemble::new(2, vec![(0.7, i2.clone()), (0.7, i2.clone())]).is_err());
        assert!(UnitaryEnsemble::new(2, vec![(-0.5, i2.clone()), (1.5, i2)]).is_err());
    }

    #[test]
    fn product_ensemble_size_and_weights() {
        let sq = pauli_pair().tensor_power(2, 64).unwrap();
        assert_eq!(sq.size(), 4);
        assert_eq!(sq.dim(), 4);
        for m in sq.members() {
            assert!((m.p - 0.25).abs() < 1e-15);
        }
        assert!(pauli_pair().tensor_power(2, 3).is_err());
    }

    #[test]
    fn serialization_round_trip() {
        let e = weyl_ensemble(3);
        let doc = serde_json::to_string(&e).unwrap();
        let back: UnitaryEnsemble = serde_json::from_str(&doc).unwrap();
        assert_eq!(back.size(), 9);
        for (a, b) in e.members().iter().zip(back.members()) {
            assert!(a.unitary.sub(&b.unitary).max_abs_entry() < 1e-15);
        }
    }
}
