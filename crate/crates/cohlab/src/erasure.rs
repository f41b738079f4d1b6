//! Erasure-cost experiments: the entropy-exchange lower bound, the sampled
//! twirl construction, operator-Chernoff concentration runs, and finite-copy
//! rate curves.
//!
//! The sampled eraser draws its unitaries from the Weyl twirl group of the
//! typical subspace attached to the **dephased** input spectrum. That
//! subspace is spanned by reference-basis product vectors, so the twirl
//! target `tau = Pi / dim(Pi)` is an incoherent state and every sampled
//! member factors as permutation x phases. The eigenbasis typical subspace
//! of the input itself (the gentle-operator side of the argument) remains
//! available through [`crate::typicality::typical_subspace`].
//!
//! Achieved decoherence error is reported under two metrics: trace distance
//! to `tau`, and the dephasing witness (distance to the output's own
//! diagonal). Reported rates are `log2(N) / n`. Every seeded operation
//! derives per-cell substreams, so reports are bitwise reproducible for any
//! thread count.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::channels::{
    apply_ensemble, entropy_exchange, weyl_operator, IncoherentUnitary, UnitaryEnsemble,
};
use crate::coherence::{binary_entropy, dephase, incoherent_distance_witness,
    relative_entropy_coherence};
use crate::error::{Error, Result};
use crate::numkernel::{trace_norm, ComplexMatrix};
use crate::seeding::substream;
use crate::states::{random_state, von_neumann_entropy, DensityMatrix};
use crate::typicality::{typical_subspace, TypicalSubspace};

const TAG_SAMPLE: u64 = 0x5357;
const TAG_HAAR: u64 = 0x4841;
const TAG_CHERNOFF_STATE: u64 = 0xC0;
const TAG_CHERNOFF_TRIAL: u64 = 0xC1;
const TAG_CELL: u64 = 0xCE11;

/// Validated parameters for the sampled-eraser experiments: copy count and
/// an error budget inside the Chernoff window (0, 1/2).
#[derive(Debug, Clone)]
pub struct ErasureBoundInput {
    pub rho: DensityMatrix,
    pub n: usize,
    pub eps: f64,
}

impl ErasureBoundInput {
    pub fn new(rho: DensityMatrix, n: usize, eps: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("copy count must be >= 1"));
        }
        if !(eps > 0.0 && eps < 0.5) {
            return Err(Error::param(format!("eps = {eps} outside (0, 1/2)")));
        }
        Ok(ErasureBoundInput { rho, n, eps })
    }
}

/// Single-copy bound H(rho_I) - H(rho) for a decohering map with incoherent
/// output `rho_I`. May be negative for mixed inputs; returned as-is.
pub fn single_copy_bound(rho: &DensityMatrix, rho_i: &DensityMatrix) -> Result<f64> {
    if rho.dim() != rho_i.dim() {
        return Err(Error::dim_mismatch(format!(
            "states of dim {} and {}",
            rho.dim(),
            rho_i.dim()
        )));
    }
    let off = crate::coherence::l1_coherence(rho_i);
    if off > 1e-9 {
        return Err(Error::NotIncoherentOutput { deviation: off });
    }
    Ok(von_neumann_entropy(rho_i)? - von_neumann_entropy(rho)?)
}

/// Entropy-exchange lower bound n [C_r(rho) - eps log2 d - H2(eps)] for an
/// eps-decohering incoherent-unitary channel on n copies. Negative values
/// (vacuous bound) are returned as-is. `eps` is accepted on [0, 1]; callers
/// evaluating the bound at an achieved trace-norm error clamp into that
/// range first.
pub fn exchange_entropy_floor(rho: &DensityMatrix, n: usize, eps: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::param("copy count must be >= 1"));
    }
    let c_r = relative_entropy_coherence(rho)?;
    let d = rho.dim() as f64;
    Ok(n as f64 * (c_r - eps * d.log2() - binary_entropy(eps)?))
}

/// Outcome of checking the entropy-exchange bound on a concrete
/// incoherent-unitary channel.
#[derive(Debug, Clone, Serialize)]
pub struct ExchangeFloorReport {
    pub n: usize,
    /// Dephasing-witness error of the channel output.
    pub achieved_eps: f64,
    pub entropy_exchange: f64,
    /// Bound evaluated at the achieved (clamped) witness error.
    pub bound: f64,
    pub bound_holds: bool,
    /// Entropy of the pinched (dephased) output.
    pub dephased_entropy: f64,
    /// n H(rho^d), the floor the pinched output entropy must reach.
    pub diagonal_floor: f64,
    pub diagonal_floor_holds: bool,
    /// ||R(rho^n) - R_D||_1; bounded by twice the witness error.
    pub pinch_distance: f64,
}

/// Apply an incoherent-unitary ensemble to rho^(x)n and verify the
/// entropy-exchange chain against the bound at the achieved witness error.
pub fn check_exchange_floor(
    e: &UnitaryEnsemble,
    rho: &DensityMatrix,
    n: usize,
) -> Result<ExchangeFloorReport> {
    let dim_n = crate::numkernel::checked_space_dim(rho.dim(), n)?;
    if e.dim() != dim_n {
        return Err(Error::dim_mismatch(format!(
            "ensemble acts on dim {}, expected {}^{n}",
            e.dim(),
            rho.dim()
        )));
    }
    for (i, m) in e.members().iter().enumerate() {
        if IncoherentUnitary::from_matrix(&m.unitary, 1e-8).is_none() {
            return Err(Error::NotIncoherentEnsemble { index: i });
        }
    }

    let rho_n = rho.tensor_power(n)?;
    let out = apply_ensemble(e, &rho_n)?;
    let (achieved_eps, pinched) = incoherent_distance_witness(&out)?;
    let pinch_distance = achieved_eps; // tau is the pinched output itself
    let entropy_exchange = entropy_exchange(e, &rho_n)?;
    let bound = exchange_entropy_floor(rho, n, achieved_eps.clamp(0.0, 1.0))?;
    let dephased_entropy = von_neumann_entropy(&pinched)?;
    let diagonal_floor = n as f64 * von_neumann_entropy(&dephase(rho))?;
    Ok(ExchangeFloorReport {
        n,
        achieved_eps,
        entropy_exchange,
        bound,
        bound_holds: entropy_exchange >= bound - 1e-9,
        dephased_entropy,
        diagonal_floor,
        diagonal_floor_holds: dephased_entropy >= diagonal_floor - 1e-9,
        pinch_distance,
    })
}

/// Seeded Haar-distributed unitary: Gaussian matrix orthonormalized by
/// modified Gram-Schmidt (whose triangular factor has a positive real
/// diagonal, which is exactly the correction that makes the result Haar).
pub fn haar_unitary(dim: usize, seed: u64) -> ComplexMatrix {
    assert!(dim >= 1, "dimension must be positive");
    let mut rng = substream(seed, &[TAG_HAAR]);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(dim);
    while cols.len() < dim {
        let mut col: Vec<Complex64> = (0..dim)
            .map(|_| crate::seeding::complex_gaussian(&mut rng))
            .collect();
        for prev in &cols {
            let overlap: Complex64 = prev
                .iter()
                .zip(&col)
                .map(|(p, c)| p.conj() * c)
                .sum();
            for (c, p) in col.iter_mut().zip(prev) {
                *c -= overlap * p;
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // essentially impossible; redraw
        }
        for z in col.iter_mut() {
            *z /= norm;
        }
        cols.push(col);
    }
    ComplexMatrix::from_fn(dim, dim, |r, c| cols[c][r])
}

/// Embed a Weyl operator of the subspace dimension so it acts within the
/// subspace basis and as identity on the complement.
fn embed_subspace_operator(ts: &TypicalSubspace, w: &IncoherentUnitary) -> ComplexMatrix {
    let dim = ts.space_dim();
    let k = ts.dim_typ();
    debug_assert_eq!(w.dim(), k);
    if ts.is_coordinate_aligned() {
        // Generalized permutation: exact entries, exact unitarity.
        let rows: Vec<usize> = (0..k).map(|i| ts.aligned_index(i).unwrap()).collect();
        let mut m = ComplexMatrix::identity(dim);
        for j in 0..k {
            m.set(rows[j], rows[j], Complex64::new(0.0, 0.0));
        }
        for j in 0..k {
            let t = w.permutation()[j];
            m.set(
                rows[t],
                rows[j],
                Complex64::from_polar(1.0, w.phases()[t]),
            );
        }
        return m;
    }
    // U = I + B (W - I_k) B^dagger.
    let basis: Vec<Vec<Complex64>> = (0..k).map(|i| ts.basis_vector(i)).collect();
    let w_mat = w.to_matrix();
    let mut m = ComplexMatrix::identity(dim);
    for a in 0..k {
        for b in 0..k {
            let coeff = w_mat.get(a, b)
                - if a == b {
                    Complex64::new(1.0, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                };
            if coeff.norm() < 1e-300 {
                continue;
            }
            for r in 0..dim {
                let va = basis[a][r];
                if va.re == 0.0 && va.im == 0.0 {
                    continue;
                }
                for c in 0..dim {
                    let cur = m.get(r, c);
                    m.set(r, c, cur + coeff * va * basis[b][c].conj());
                }
            }
        }
    }
    m
}

/// The full Weyl twirl group of a typical subspace, embedded in the ambient
/// space: dim_typ^2 members with uniform weights. Averaging over all of them
/// maps any state supported in the subspace to Pi / dim_typ exactly.
pub fn subspace_twirl_ensemble(ts: &TypicalSubspace) -> Result<UnitaryEnsemble> {
    let k = ts.dim_typ();
    if k == 0 {
        return Err(Error::param(
            "typical subspace is empty; enlarge delta or the copy count",
        ));
    }
    let p = 1.0 / (k * k) as f64;
    let mut members = Vec::with_capacity(k * k);
    for a in 0..k {
        for b in 0..k {
            members.push((p, embed_subspace_operator(ts, &weyl_operator(k, a, b))));
        }
    }
    UnitaryEnsemble::new(ts.space_dim(), members)
}

/// A sampled erasure channel: N uniform draws from the subspace twirl group,
/// the twirl subspace, and the incoherent target tau = Pi / dim_typ.
#[derive(Debug, Clone)]
pub struct SampledEraser {
    pub n: usize,
    pub eps: f64,
    pub size: usize,
    pub seed: u64,
    pub c_r: f64,
    pub ensemble: UnitaryEnsemble,
    pub subspace: TypicalSubspace,
    pub tau: DensityMatrix,
}

/// Ensemble size prescribed for the error budget: ceil(2^{n (C_r + 3 eps)}).
pub fn eraser_size(c_r: f64, n: usize, eps: f64) -> usize {
    2f64.powf(n as f64 * (c_r + 3.0 * eps)).ceil() as usize
}

/// Build the sampled eraser at the prescribed ensemble size.
pub fn sample_eraser(rho: &DensityMatrix, n: usize, eps: f64, seed: u64) -> Result<SampledEraser> {
    sample_eraser_with_size(rho, n, eps, seed, None)
}

/// Build the sampled eraser, optionally overriding the ensemble size (used
/// by the downward rate search).
pub fn sample_eraser_with_size(
    rho: &DensityMatrix,
    n: usize,
    eps: f64,
    seed: u64,
    size: Option<usize>,
) -> Result<SampledEraser> {
    let input = ErasureBoundInput::new(rho.clone(), n, eps)?;
    let dim_n = crate::numkernel::checked_space_dim(rho.dim(), n)?;

    let c_r = relative_entropy_coherence(rho)?;
    let diagonal = dephase(rho);
    let subspace = typical_subspace(&diagonal, n, eps)?;
    let k = subspace.dim_typ();
    if k == 0 {
        return Err(Error::param(
            "typical subspace of the dephased input is empty at this (n, eps)",
        ));
    }
    let size = match size {
        Some(s) if s >= 1 => s,
        Some(_) => return Err(Error::param("ensemble size must be >= 1")),
        None => eraser_size(c_r, input.n, input.eps),
    };

    use rand::Rng;
    let mut rng = substream(seed, &[TAG_SAMPLE, n as u64, size as u64]);
    let p = 1.0 / size as f64;
    let draws: Vec<(usize, usize)> = (0..size)
        .map(|_| (rng.gen_range(0..k), rng.gen_range(0..k)))
        .collect();
    let members: Vec<(f64, ComplexMatrix)> = crate::par::map_indexed(size, |i| {
        let (a, b) = draws[i];
        (p, embed_subspace_operator(&subspace, &weyl_operator(k, a, b)))
    });
    let ensemble = UnitaryEnsemble::new(dim_n, members)?;

    let tau = if subspace.is_coordinate_aligned() {
        let mut m = ComplexMatrix::zeros(dim_n, dim_n);
        let w = 1.0 / k as f64;
        for i in 0..k {
            let idx = subspace.aligned_index(i).unwrap();
            m.set(idx, idx, Complex64::new(w, 0.0));
        }
        DensityMatrix::new(m)?
    } else {
        DensityMatrix::new(subspace.projector()?.scaled(1.0 / k as f64))?
    };

    Ok(SampledEraser {
        n,
        eps,
        size,
        seed,
        c_r,
        ensemble,
        subspace,
        tau,
    })
}

/// One experiment record per (n, eps, N, seed).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErasureReport {
    pub n: usize,
    pub eps: f64,
    pub members: usize,
    pub seed: u64,
    /// Dephasing-witness distance of the channel output.
    pub achieved_eps_witness: f64,
    /// Trace distance of the channel output to tau.
    pub achieved_eps_tau: f64,
    pub entropy_exchange: f64,
    /// Lower bound evaluated at the achieved (clamped) witness error.
    pub exchange_floor: f64,
    /// log2(N) / n.
    pub rate: f64,
    pub c_r: f64,
}

/// Apply the sampled eraser to rho^(x)n and record both error metrics, the
/// entropy exchange, and the bound at the achieved witness error.
pub fn verify_eraser(se: &SampledEraser, rho: &DensityMatrix) -> Result<ErasureReport> {
    let rho_n = rho.tensor_power(se.n)?;
    let out = apply_ensemble(&se.ensemble, &rho_n)?;
    let achieved_eps_tau = trace_norm(&out.matrix().sub(se.tau.matrix()))?;
    let (achieved_eps_witness, _) = incoherent_distance_witness(&out)?;
    let h_e = entropy_exchange(&se.ensemble, &rho_n)?;
    let bound = exchange_entropy_floor(rho, se.n, achieved_eps_witness.clamp(0.0, 1.0))?;
    Ok(ErasureReport {
        n: se.n,
        eps: se.eps,
        members: se.size,
        seed: se.seed,
        achieved_eps_witness,
        achieved_eps_tau,
        entropy_exchange: h_e,
        exchange_floor: bound,
        rate: (se.size as f64).log2() / se.n as f64,
        c_r: se.c_r,
    })
}

/// Cheap evaluation for the rate search: trace distance to tau only.
pub fn tau_distance(se: &SampledEraser, rho: &DensityMatrix) -> Result<f64> {
    let rho_n = rho.tensor_power(se.n)?;
    let out = apply_ensemble(&se.ensemble, &rho_n)?;
    trace_norm(&out.matrix().sub(se.tau.matrix()))
}

/// Random-operator family for the concentration experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OperatorFamily {
    /// X_i = a I: zero variance, success probability one.
    Constant,
    /// X_i = (a d) W_i sigma W_i^dagger over the uniform Weyl group, with a
    /// seeded state sigma flattened so that X <= I; E X = a I exactly.
    TwirledState,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ChernoffOutcome {
    pub empirical_success: f64,
    /// 1 - 2 dim exp(-N eps^2 a / (4 ln 2)); may be negative (vacuous).
    pub bound: f64,
    pub trials: usize,
}

/// Empirically test the two-sided operator concentration of the sample
/// average of N draws against the analytic lower bound.
pub fn chernoff_experiment(
    dim: usize,
    a: f64,
    eps: f64,
    n_samples: usize,
    trials: usize,
    seed: u64,
    family: OperatorFamily,
) -> Result<ChernoffOutcome> {
    if dim == 0 {
        return Err(Error::param("dimension must be >= 1"));
    }
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::param(format!("a = {a} outside (0, 1)")));
    }
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::param(format!("eps = {eps} outside (0, 1/2)")));
    }
    if (1.0 + eps) * a > 1.0 + 1e-12 {
        return Err(Error::param(format!(
            "(1 + eps) a = {} exceeds 1",
            (1.0 + eps) * a
        )));
    }
    if n_samples == 0 || trials == 0 {
        return Err(Error::param("need n_samples >= 1 and trials >= 1"));
    }

    let bound =
        1.0 - 2.0 * dim as f64 * (-(n_samples as f64) * eps * eps * a / (4.0 * 2f64.ln())).exp();

    let empirical_success = match family {
        OperatorFamily::Constant => {
            // X-bar = a I for every draw; the interval (1 +- eps) a I always
            // contains it.
            1.0
        }
        OperatorFamily::TwirledState => {
            // Flatten a seeded state until lambda_max <= 1/(a d) so that
            // X = (a d) W sigma W^dagger stays below I.
            let sigma = random_state(dim, dim, substream_seed(seed, TAG_CHERNOFF_STATE))?;
            let vals = sigma.spectrum_values()?;
            let lmax = vals[0];
            let target = (1.0 / (a * dim as f64)) * (1.0 - 1e-12);
            let uniform = 1.0 / dim as f64;
            let s = if lmax <= target {
                1.0
            } else {
                (target - uniform) / (lmax - uniform)
            };
            let flat = ComplexMatrix::identity(dim).scaled((1.0 - s) * uniform);
            let sigma = DensityMatrix::new(flat.add(&sigma.matrix().scaled(s)))?;

            // Precompute all d^2 conjugates (a d) W sigma W^dagger.
            let k = dim * dim;
            let conjugates: Vec<ComplexMatrix> = (0..k)
                .map(|i| {
                    let w = weyl_operator(dim, i / dim, i % dim).to_matrix();
                    w.conjugate_with(sigma.matrix()).scaled(a * dim as f64)
                })
                .collect();

            let lo = (1.0 - eps) * a - 1e-12;
            let hi = (1.0 + eps) * a + 1e-12;
            let successes = crate::par::map_indexed(trials, |t| {
                use rand::Rng;
                let mut rng = substream(seed, &[TAG_CHERNOFF_TRIAL, t as u64]);
                let mut avg = ComplexMatrix::zeros(dim, dim);
                for _ in 0..n_samples {
                    avg = avg.add(&conjugates[rng.gen_range(0..k)]);
                }
                avg = avg.scaled(1.0 / n_samples as f64);
                let lambda = crate::numkernel::hermitian_eigenvalues(&avg)
                    .expect("sample average is Hermitian");
                let ok = lambda.iter().all(|&l| l >= lo && l <= hi);
                usize::from(ok)
            });
            successes.iter().sum::<usize>() as f64 / trials as f64
        }
    };

    Ok(ChernoffOutcome {
        empirical_success,
        bound,
        trials,
    })
}

fn substream_seed(master: u64, tag: u64) -> u64 {
    use rand::Rng;
    substream(master, &[tag]).gen()
}

/// Per-(n, seed-index) cell seed used by the multi-seed drivers; exposed so
/// the CLI and the curve sweep agree on the partition.
pub fn derive_cell_seed(master: u64, n: usize, idx: usize) -> u64 {
    substream_seed(master, TAG_CELL ^ ((n as u64) << 32) ^ idx as u64)
}

/// Best ensemble size found by the downward search at one copy count.
#[derive(Debug, Clone, Serialize)]
pub struct BestRate {
    pub n: usize,
    pub formula_size: usize,
    /// Smallest tested size that still met the target error in a majority of
    /// seeds; equals `formula_size` when nothing tested passed (best found,
    /// not certified).
    pub best_size: usize,
    pub rate_best: f64,
    /// The eps budget: the twirl-accuracy target on the tau distance.
    pub target_error: f64,
    /// Fraction of seeds meeting the target at `best_size`.
    pub pass_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RateCurve {
    pub reports: Vec<ErasureReport>,
    pub best: Vec<BestRate>,
}

/// Sweep n = 1..=n_max: run the sampled eraser per seed at the prescribed
/// size, then search downward (halving, then binary refinement) for the
/// smallest tested size whose tau error stays within the eps budget for a
/// majority of seeds. The eps budget is the twirl-accuracy target of the
/// concentration step; the looser end-to-end guarantee eps + 2 sqrt(eps)
/// belongs to [`verify_eraser`] at the prescribed size. States with nothing
/// to erase pass at tiny sizes; coherent states typically keep the
/// prescribed size, whose rate carries the ceil slack log2(N)/n ->
/// C_r + 3 eps from above. Work is partitioned by (n, seed) cells with
/// derived substreams; report ordering is canonical (n, size, seed).
pub fn rate_curve(
    rho: &DensityMatrix,
    eps: f64,
    n_max: usize,
    seeds: usize,
    master_seed: u64,
) -> Result<RateCurve> {
    if seeds == 0 {
        return Err(Error::param("need at least one seed"));
    }
    if n_max == 0 {
        return Err(Error::param("need n_max >= 1"));
    }
    let target = eps;
    let mut reports = Vec::new();
    let mut best = Vec::new();

    for n in 1..=n_max {
        let cell_seeds: Vec<u64> = (0..seeds)
            .map(|idx| derive_cell_seed(master_seed, n, idx))
            .collect();

        let formula_reports: Vec<ErasureReport> = {
            let results = crate::par::map_indexed(seeds, |idx| {
                let se = sample_eraser(rho, n, eps, cell_seeds[idx])?;
                verify_eraser(&se, rho)
            });
            results.into_iter().collect::<Result<Vec<_>>>()?
        };
        let formula_size = formula_reports[0].members;
        reports.extend(formula_reports.iter().cloned());

        // Majority-of-seeds pass test at a candidate size.
        let passes = |size: usize| -> Result<(bool, f64)> {
            let dists = crate::par::map_indexed(seeds, |idx| {
                let se = sample_eraser_with_size(rho, n, eps, cell_seeds[idx], Some(size))?;
                tau_distance(&se, rho)
            });
            let dists = dists.into_iter().collect::<Result<Vec<_>>>()?;
            let ok = dists.iter().filter(|&&d| d <= target).count();
            Ok((2 * ok > seeds, ok as f64 / seeds as f64))
        };

        let (formula_pass, formula_fraction) = passes(formula_size)?;
        let (best_size, pass_fraction) = if !formula_pass {
            (formula_size, formula_fraction)
        } else {
            // Halve until failure (or size 1), then binary refinement.
            let mut hi = formula_size;
            let mut hi_fraction = formula_fraction;
            let mut lo = 0usize; // exclusive failing floor
            let mut cur = formula_size / 2;
            while cur >= 1 {
                let (ok, frac) = passes(cur)?;
                if ok {
                    hi = cur;
                    hi_fraction = frac;
                    if cur == 1 {
                        break;
                    }
                    cur /= 2;
                } else {
                    lo = cur;
                    break;
                }
            }
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                let (ok, frac) = passes(mid)?;
                if ok {
                    hi = mid;
                    hi_fraction = frac;
                } else {
                    lo = mid;
                }
            }
            (hi, hi_fraction)
        };

        if best_size != formula_size {
            let extra = crate::par::map_indexed(seeds, |idx| {
                let se =
                    sample_eraser_with_size(rho, n, eps, cell_seeds[idx], Some(best_size))?;
                verify_eraser(&se, rho)
            });
            reports.extend(extra.into_iter().collect::<Result<Vec<_>>>()?);
        }

        best.push(BestRate {
            n,
            formula_size,
            best_size,
            rate_best: (best_size as f64).log2() / n as f64,
            target_error: target,
            pass_fraction,
        });
    }

    reports.sort_by(|a, b| {
        (a.n, a.members, a.seed)
            .partial_cmp(&(b.n, b.members, b.seed))
            .unwrap()
    });
    Ok(RateCurve { reports, best })
}
