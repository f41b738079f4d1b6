//! Coherence measures in the fixed reference basis.
//!
//! The reference basis is permanently the computational (coordinate) basis;
//! a different basis is realized by conjugating states before calling in.
//! Trace-norm distances carry no 1/2 factor, matching the epsilon-decohering
//! convention `||R(rho) - tau||_1 <= epsilon`; the half-distance appears only
//! inside the Fannes-Audenaert checker.

use crate::error::{Error, Result};
use crate::numkernel::trace_norm;
use crate::states::{shannon_entropy, von_neumann_entropy, DensityMatrix};

/// Delete all off-diagonal entries, keeping the diagonal bit-exact.
pub fn dephase(rho: &DensityMatrix) -> DensityMatrix {
    DensityMatrix::new(rho.matrix().diagonal_part())
        .expect("dephasing a valid state yields a valid state")
}

/// Relative entropy of coherence C_r(rho) = H(rho^d) - H(rho) in bits.
pub fn relative_entropy_coherence(rho: &DensityMatrix) -> Result<f64> {
    let diag: Vec<f64> = (0..rho.dim()).map(|i| rho.matrix().get(i, i).re.max(0.0)).collect();
    Ok(shannon_entropy(&diag) - von_neumann_entropy(rho)?)
}

/// l1 norm of coherence: sum of off-diagonal moduli.
pub fn l1_coherence(rho: &DensityMatrix) -> f64 {
    let d = rho.dim();
    let mut sum = 0.0;
    for r in 0..d {
        for c in 0..d {
            if r != c {
                sum += rho.matrix().get(r, c).norm();
            }
        }
    }
    sum
}

/// Binary Shannon entropy in bits, zero at both endpoints.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::param(format!("binary entropy argument {x} outside [0, 1]")));
    }
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    Ok(term(x) + term(1.0 - x))
}

/// Feasible upper bound on the trace-norm distance to the incoherent set:
/// tau = dephase(sigma) together with epsilon_up = ||sigma - tau||_1.
pub fn incoherent_distance_witness(sigma: &DensityMatrix) -> Result<(f64, DensityMatrix)> {
    let tau = dephase(sigma);
    let eps = trace_norm(&sigma.matrix().sub(tau.matrix()))?;
    Ok((eps, tau))
}

/// Refine the witness by projected local search over diagonal states
/// q on the probability simplex, minimizing ||sigma - diag(q)||_1.
///
/// Small dimensions only; the witness diagonal is the starting point, so the
/// result never exceeds the witness value.
pub fn incoherent_distance_opt(sigma: &DensityMatrix, iters: usize, seed: u64) -> Result<f64> {
    let d = sigma.dim();
    if d > 16 {
        return Err(Error::param(format!(
            "incoherent distance refinement supports dim <= 16, got {d}"
        )));
    }
    let objective = |q: &[f64]| -> f64 {
        let mut m = sigma.matrix().clone();
        for i in 0..d {
            let v = m.get(i, i);
            m.set(i, i, v - q[i]);
        }
        trace_norm(&m).expect("Hermitian difference")
    };

    let mut q: Vec<f64> = (0..d).map(|i| sigma.matrix().get(i, i).re.max(0.0)).collect();
    let total: f64 = q.iter().sum();
    if total > 0.0 {
        for v in q.iter_mut() {
            *v /= total;
        }
    }
    let mut best = objective(&q);

    use rand::Rng;
    let mut rng = crate::seeding::substream(seed, &[0x004f_5054]);
    let mut step = 0.25;
    for it in 0..iters {
        // Shrink the mass-transfer step over the budget.
        if it > 0 && it % (iters / 8).max(1) == 0 {
            step *= 0.5;
        }
        let i = rng.gen_range(0..d);
        let j = rng.gen_range(0..d);
        if i == j {
            continue;
        }
        let delta = step * rng.gen::<f64>();
        let moved = delta.min(q[j]);
        if moved <= 0.0 {
            continue;
        }
        let mut cand = q.clone();
        cand[j] -= moved;
        cand[i] += moved;
        let val = objective(&cand);
        if val < best {
            best = val;
            q = cand;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::ComplexMatrix;
    use crate::states::{max_coherent_mixed, maximally_coherent, random_state};

    const H_075: f64 = 0.8112781244591328;

    #[test]
    fn dephase_examples() {
        let diag = DensityMatrix::new(ComplexMatrix::diagonal(&[0.7, 0.3])).unwrap();
        assert_eq!(dephase(&diag).matrix().data(), diag.matrix().data());

        let psi2 = maximally_coherent(2).projector();
        let out = dephase(&psi2);
        assert!(out
            .matrix()
            .sub(&ComplexMatrix::identity(2).scaled(0.5))
            .max_abs_entry()
            < 1e-15);

        for seed in 0..20u64 {
            let rho = random_state(3, 3, seed).unwrap();
            let once = dephase(&rho);
            let twice = dephase(&once);
            assert_eq!(once.matrix().data(), twice.matrix().data());
        }
    }

    #[test]
    fn dephasing_cannot_lower_entropy() {
        for seed in 0..30u64 {
            let rho = random_state(4, 1 + (seed % 4) as usize, seed).unwrap();
            let h = von_neumann_entropy(&rho).unwrap();
            let hd = von_neumann_entropy(&dephase(&rho)).unwrap();
            assert!(hd >= h - 1e-9, "seed {seed}: H(rho^d)={hd} < H(rho)={h}");
        }
    }

    #[test]
    fn relative_entropy_coherence_examples() {
        let diag = DensityMatrix::new(ComplexMatrix::diagonal(&[0.7, 0.2, 0.1])).unwrap();
        assert!(relative_entropy_coherence(&diag).unwrap().abs() < 1e-12);

        let psi2 = maximally_coherent(2).projector();
        assert!((relative_entropy_coherence(&psi2).unwrap() - 1.0).abs() < 1e-9);

        let rho = max_coherent_mixed(2, 0.5).unwrap();
        assert!((relative_entropy_coherence(&rho).unwrap() - (1.0 - H_075)).abs() < 1e-9);
    }

    #[test]
    fn coherence_mixedness_complementarity_for_the_family() {
        // C_r(rho_p) = log2 d - H(rho_p) across the family.
        for d in 2..=5usize {
            for k in 0..=10 {
                let p = k as f64 / 10.0;
                let rho = max_coherent_mixed(d, p).unwrap();
                let cr = relative_entropy_coherence(&rho).unwrap();
                let h = von_neumann_entropy(&rho).unwrap();
                assert!(
                    (cr + h - (d as f64).log2()).abs() < 1e-9,
                    "d={d} p={p}: C_r + H = {}",
                    cr + h
                );
            }
        }
    }

    #[test]
    fn l1_examples() {
        let diag = DensityMatrix::new(ComplexMatrix::diagonal(&[0.5, 0.5])).unwrap();
        assert_eq!(l1_coherence(&diag), 0.0);

        for d in 2..=5usize {
            let psi = maximally_coherent(d).projector();
            assert!((l1_coherence(&psi) - (d as f64 - 1.0)).abs() < 1e-12);
        }

        use num_complex::Complex64;
        let mut m = ComplexMatrix::diagonal(&[0.5, 0.5]);
        m.set(0, 1, Complex64::new(0.3, 0.0));
        m.set(1, 0, Complex64::new(0.3, 0.0));
        let rho = DensityMatrix::new(m).unwrap();
        assert!((l1_coherence(&rho) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn both_measures_agree_on_incoherence() {
        for seed in 0..40u64 {
            let rho = random_state(3, 2, seed).unwrap();
            let cr = relative_entropy_coherence(&rho).unwrap();
            let l1 = l1_coherence(&rho);
            assert_eq!(cr.abs() < 1e-9, l1 < 1e-9, "seed {seed}: cr={cr} l1={l1}");

            let diag = dephase(&rho);
            assert!(relative_entropy_coherence(&diag).unwrap().abs() < 1e-9);
            assert!(l1_coherence(&diag) < 1e-12);
        }
    }

    #[test]
    fn binary_entropy_examples() {
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert!((binary_entropy(0.1).unwrap() - 0.46899559358928117).abs() < 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.1).is_err());
    }

    #[test]
    fn witness_examples() {
        let diag = DensityMatrix::new(ComplexMatrix::diagonal(&[0.8, 0.2])).unwrap();
        let (eps, tau) = incoherent_distance_witness(&diag).unwrap();
        assert!(eps < 1e-12);
        assert_eq!(tau.matrix().data(), diag.matrix().data());

        let psi2 = maximally_coherent(2).projector();
        let (eps, tau) = incoherent_distance_witness(&psi2).unwrap();
        assert!((eps - 1.0).abs() < 1e-9);
        assert!(tau
            .matrix()
            .sub(&ComplexMatrix::identity(2).scaled(0.5))
            .max_abs_entry()
            < 1e-12);
    }

    /// Brute-force grid oracle for the qubit diagonal minimization.
    fn qubit_grid_min(sigma: &DensityMatrix) -> f64 {
        let mut best = f64::INFINITY;
        let steps = 2000;
        for k in 0..=steps {
            let q = k as f64 / steps as f64;
            let mut m = sigma.matrix().clone();
            let d0 = m.get(0, 0);
            let d1 = m.get(1, 1);
            m.set(0, 0, d0 - q);
            m.set(1, 1, d1 - (1.0 - q));
            best = best.min(trace_norm(&m).unwrap());
        }
        best
    }

    #[test]
    fn optimizer_matches_grid_oracle_on_qubits() {
        for seed in 0..15u64 {
            let sigma = random_state(2, 2, 100 + seed).unwrap();
            let opt = incoherent_distance_opt(&sigma, 4000, seed).unwrap();
            let (witness, _) = incoherent_distance_witness(&sigma).unwrap();
            let grid = qubit_grid_min(&sigma);
            assert!(opt <= witness + 1e-9, "seed {seed}");
            assert!((opt - grid).abs() < 1e-3, "seed {seed}: opt={opt} grid={grid}");
        }

        let diag = DensityMatrix::new(ComplexMatrix::diagonal(&[0.25, 0.75])).unwrap();
        assert!(incoherent_distance_opt(&diag, 100, 0).unwrap() < 1e-12);

        let psi2 = maximally_coherent(2).projector();
        assert!(incoherent_distance_opt(&psi2, 2000, 0).unwrap() <= 1.0 + 1e-9);
    }

    #[test]
    fn optimizer_rejects_large_dims() {
        let rho = DensityMatrix::maximally_mixed(17);
        assert!(incoherent_distance_opt(&rho, 10, 0).is_err());
    }
}
