//! Exact (realization-level) detectability, distinguishability, and
//! isolability tests, plus Monte-Carlo generic verdicts over sampled weight
//! realizations.
//!
//! Two systems `(Phi, Q)` and `(Phi_bar, Q)` are distinguishable when the
//! stacked matrix `col{Q dPhi, Q Phi dPhi, ..., Q Phi^(nx-1) dPhi}` is
//! nonzero, equivalently when `Q (lambda I - Phi)^(-1) dPhi` is not the zero
//! transfer function. The stacked condition is evaluated through the
//! unobservable subspace of `(Phi, Q)`: the systems are indistinguishable
//! exactly when every column of `dPhi` lies in that subspace.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{cmax_abs, complexify, resolvent_solve, sample_lambda, spectral_radius};
use crate::netgraph::{FailureScenario, FailureSet, NetworkModel};
use crate::sysmodel::{assemble_lumped, sample_weights, SubsystemDynamics, WeightRealization};

const SOLVE_RETRIES: usize = 10;
const WITNESS_RETRIES: usize = 32;

/// Outcome of a pairwise distinguishability test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    Distinguishable,
    Indistinguishable,
}

/// The residual norm the verdict was based on.
#[derive(Debug, Clone, Copy, Serialize)]
pub enum Evidence {
    /// Largest relative component of a perturbation column outside the
    /// unobservable subspace.
    StackedNorm(f64),
    /// Largest scaled transfer-function entry over the sampled points.
    TransferNorm { norm: f64, samples: usize },
}

impl Evidence {
    pub fn norm(&self) -> f64 {
        match *self {
            Evidence::StackedNorm(v) => v,
            Evidence::TransferNorm { norm, .. } => norm,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DistinguishabilityReport {
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub tolerance_used: f64,
}

impl DistinguishabilityReport {
    pub fn is_distinguishable(&self) -> bool {
        self.verdict == Verdict::Distinguishable
    }

    fn from_norm(norm: f64, tolerance: f64, evidence: Evidence) -> Self {
        let verdict = if norm > tolerance {
            Verdict::Distinguishable
        } else {
            Verdict::Indistinguishable
        };
        Self {
            verdict,
            evidence,
            tolerance_used: tolerance,
        }
    }
}

/// Relative singular-value cutoff for the rank decision in the kernel
/// computation.
const RANK_TOL: f64 = 1e-10;

/// Orthonormal basis of the kernel of the stacked observability matrix
/// `col{Q, Q Phi, ..., Q Phi^(nx-1)}`, as the columns of the returned matrix
/// (zero columns when `(Phi, Q)` is observable). Row blocks are rescaled per
/// power so that growing or decaying powers of `Phi` do not swamp the rank
/// decision.
pub fn unobservable_subspace(phi: &DMatrix<f64>, q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n_x = phi.nrows();
    if phi.ncols() != n_x || q.ncols() != n_x {
        return Err(Error::DimensionMismatch(format!(
            "phi is {}x{}, q has {} columns",
            phi.nrows(),
            phi.ncols(),
            q.ncols()
        )));
    }
    let n_y = q.nrows();
    let mut stacked = DMatrix::zeros(n_x * n_y, n_x);
    let mut block = q.clone();
    for k in 0..n_x {
        let scale = block.amax();
        if scale > 0.0 {
            stacked
                .view_mut((k * n_y, 0), (n_y, n_x))
                .copy_from(&(&block / scale));
        }
        block *= phi;
    }
    let svd = stacked.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let sigma_max = svd.singular_values.max();
    let cutoff = sigma_max * RANK_TOL;
    let kernel_rows: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| svd.singular_values[i] <= cutoff)
        .collect();
    let mut basis = DMatrix::zeros(n_x, kernel_rows.len());
    for (col, &row) in kernel_rows.iter().enumerate() {
        basis.set_column(col, &v_t.row(row).transpose());
    }
    Ok(basis)
}

/// Kernel-containment distinguishability test: distinguishable iff some
/// column of `phi_i - phi_j` has a relative component outside the
/// unobservable subspace of `(phi_i, q)` exceeding `tol`.
pub fn is_distinguishable(
    phi_i: &DMatrix<f64>,
    phi_j: &DMatrix<f64>,
    q: &DMatrix<f64>,
    tol: f64,
) -> Result<DistinguishabilityReport> {
    if tol <= 0.0 {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if phi_i.shape() != phi_j.shape() {
        return Err(Error::DimensionMismatch(format!(
            "phi_i is {:?}, phi_j is {:?}",
            phi_i.shape(),
            phi_j.shape()
        )));
    }
    let delta = phi_i - phi_j;
    if delta.amax() == 0.0 {
        return Ok(DistinguishabilityReport::from_norm(
            0.0,
            tol,
            Evidence::StackedNorm(0.0),
        ));
    }
    let basis = unobservable_subspace(phi_i, q)?;
    let mut worst = 0.0_f64;
    for col in delta.column_iter() {
        let norm = col.norm();
        if norm == 0.0 {
            continue;
        }
        let residual = if basis.ncols() == 0 {
            norm
        } else {
            (&col - &basis * (basis.transpose() * &col)).norm()
        };
        worst = worst.max(residual / norm);
    }
    Ok(DistinguishabilityReport::from_norm(
        worst,
        tol,
        Evidence::StackedNorm(worst),
    ))
}

/// Literal stacked observability-difference form with per-step row
/// normalization; a secondary check for small state dimensions.
pub fn stacked_norm(phi: &DMatrix<f64>, delta_phi: &DMatrix<f64>, q: &DMatrix<f64>) -> f64 {
    let n_x = phi.nrows();
    let d_scale = delta_phi.amax();
    if d_scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    let mut block = q.clone();
    for _ in 0..n_x {
        let scale = block.amax();
        if scale > 0.0 {
            worst = worst.max((&block * delta_phi).amax() / (scale * d_scale));
        }
        block *= phi;
    }
    worst
}

/// Resolvent-sampling distinguishability test: evaluate `Q (lambda I - Phi)^(-1) dPhi` at
/// pseudo-random complex points with `|lambda| > 2 rho(Phi) + 1` and test the
/// scaled entry maximum against `tol`.
pub fn transfer_check(
    phi: &DMatrix<f64>,
    delta_phi: &DMatrix<f64>,
    q: &DMatrix<f64>,
    samples: usize,
    tol: f64,
) -> Result<DistinguishabilityReport> {
    if tol <= 0.0 {
        return Err(Error::NonPositiveTolerance(tol));
    }
    if phi.shape() != delta_phi.shape() || q.ncols() != phi.nrows() {
        return Err(Error::DimensionMismatch(format!(
            "phi {:?}, delta_phi {:?}, q {:?}",
            phi.shape(),
            delta_phi.shape(),
            q.shape()
        )));
    }
    let d_scale = delta_phi.amax();
    if d_scale == 0.0 {
        return Ok(DistinguishabilityReport::from_norm(
            0.0,
            tol,
            Evidence::TransferNorm { norm: 0.0, samples },
        ));
    }
    let q_scale = q.amax().max(f64::MIN_POSITIVE);
    let rho = spectral_radius(phi);
    let phi_c = complexify(phi);
    let delta_c = complexify(delta_phi);
    let q_c = complexify(q);
    let mut rng = ChaCha8Rng::seed_from_u64(0x7f5e_c0de);
    let mut norm = 0.0_f64;
    for _ in 0..samples.max(1) {
        let mut solved = None;
        let mut lambda = sample_lambda(&mut rng, rho);
        for attempt in 0..=SOLVE_RETRIES {
            if let Some(x) = resolvent_solve(&phi_c, lambda, &delta_c) {
                solved = Some((lambda, x));
                break;
            }
            if attempt == SOLVE_RETRIES {
                return Err(Error::SolveFailed(SOLVE_RETRIES));
            }
            lambda = sample_lambda(&mut rng, rho);
        }
        let (lambda, x) = solved.expect("solved or returned above");
        let g = &q_c * x;
        // The resolvent decays like 1/|lambda|; undo that so the tolerance is
        // scale-free.
        norm = norm.max(cmax_abs(&g) * (1.0 + lambda.norm()) / (q_scale * d_scale));
    }
    Ok(DistinguishabilityReport::from_norm(
        norm,
        tol,
        Evidence::TransferNorm { norm, samples },
    ))
}

/// Detectability of a topology failure for a concrete weight realization:
/// distinguishability of the nominal lumped system from the one with the
/// failed edges' weights zeroed.
pub fn is_detectable(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure: &FailureScenario,
    weights: &WeightRealization,
    tol: f64,
) -> Result<DistinguishabilityReport> {
    model.apply_failure(failure)?; // validates the failure against the model
    let nominal = assemble_lumped(dynamics, weights, model.sensors())?;
    let faulty_w = weights.zero_edges(failure);
    let faulty = assemble_lumped(dynamics, &faulty_w, model.sensors())?;
    is_distinguishable(&nominal.phi, &faulty.phi, &nominal.q, tol)
}

/// Pairwise verdicts for a failure set, nominal scenario included.
#[derive(Debug, Clone)]
pub struct IsolabilityReport {
    pub isolable: bool,
    /// One report per pair `(i, j)` with `0 <= i < j <= r`, lexicographic.
    pub pairs: Vec<((usize, usize), DistinguishabilityReport)>,
}

impl IsolabilityReport {
    pub fn failing_pairs(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .filter(|(_, r)| !r.is_distinguishable())
            .map(|(p, _)| *p)
            .collect()
    }
}

/// Isolability of a failure set for a concrete weight realization: every
/// scenario pair, including the nominal one, must be distinguishable.
pub fn is_isolable(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure_set: &FailureSet,
    weights: &WeightRealization,
    tol: f64,
) -> Result<IsolabilityReport> {
    let r = failure_set.len();
    let mut lumped = Vec::with_capacity(r + 1);
    lumped.push(assemble_lumped(dynamics, weights, model.sensors())?);
    for scenario in failure_set.scenarios() {
        model.apply_failure(scenario)?;
        let w = weights.zero_edges(scenario);
        lumped.push(assemble_lumped(dynamics, &w, model.sensors())?);
    }
    let q = &lumped[0].q;
    let mut pairs = Vec::new();
    let mut isolable = true;
    for i in 0..=r {
        for j in (i + 1)..=r {
            let report = is_distinguishable(&lumped[i].phi, &lumped[j].phi, q, tol)?;
            isolable &= report.is_distinguishable();
            pairs.push(((i, j), report));
        }
    }
    Ok(IsolabilityReport { isolable, pairs })
}

/// Certified margins of a witness initial state: for every pair, the relative
/// norm of the stacked output-difference map applied to the state.
#[derive(Debug, Clone)]
pub struct WitnessCertificate {
    pub pair_margins: Vec<((usize, usize), f64)>,
    pub draws_used: usize,
}

/// Draw a pseudo-random unit-norm initial state whose output trajectories
/// differ for every pair of the given state matrices. The scenario list must
/// be pairwise distinguishable; almost every draw certifies.
pub fn witness_initial_state(
    phis: &[DMatrix<f64>],
    q: &DMatrix<f64>,
    seed: u64,
) -> Result<(DVector<f64>, WitnessCertificate)> {
    let n_x = q.ncols();
    for phi in phis {
        if phi.shape() != (n_x, n_x) {
            return Err(Error::DimensionMismatch(format!(
                "phi is {:?} but q has {n_x} columns",
                phi.shape()
            )));
        }
    }
    // F_ij stacks Q Phi_i^k - Q Phi_j^k for k = 1..2nx-1, each power block
    // rescaled for stability (rescaling cannot turn a nonzero map into zero).
    let mut maps = Vec::new();
    let n_y = q.nrows();
    for i in 0..phis.len() {
        for j in (i + 1)..phis.len() {
            let mut f = DMatrix::zeros((2 * n_x - 1) * n_y, n_x);
            let mut bi = q.clone();
            let mut bj = q.clone();
            for k in 0..(2 * n_x - 1) {
                bi *= &phis[i];
                bj *= &phis[j];
                let diff = &bi - &bj;
                let scale = bi.amax().max(bj.amax());
                if scale > 0.0 {
                    f.view_mut((k * n_y, 0), (n_y, n_x))
                        .copy_from(&(diff / scale));
                }
            }
            let f_norm = f.amax();
            if f_norm <= 1e-12 {
                return Err(Error::NotPairwiseDistinguishable(i, j));
            }
            maps.push(((i, j), f, f_norm));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for draw in 1..=WITNESS_RETRIES {
        let mut x0 = DVector::from_fn(n_x, |_, _| rng.gen_range(-1.0..1.0));
        let norm = x0.norm();
        if norm == 0.0 {
            continue;
        }
        x0 /= norm;
        let mut margins = Vec::with_capacity(maps.len());
        let mut ok = true;
        for ((i, j), f, f_norm) in &maps {
            let margin = (f * &x0).norm() / f_norm;
            ok &= margin > 1e-9;
            margins.push(((*i, *j), margin));
        }
        if ok {
            return Ok((
                x0,
                WitnessCertificate {
                    pair_margins: margins,
                    draws_used: draw,
                },
            ));
        }
    }
    Err(Error::WitnessExhausted(WITNESS_RETRIES))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GenericOutcome {
    GenericallyTrue,
    GenericallyFalse,
}

/// Monte-Carlo verdict on a generic property. A single successful realization
/// certifies `GenericallyTrue`; `GenericallyFalse` is probabilistic and
/// flagged as such.
#[derive(Debug, Clone, Serialize)]
pub struct GenericVerdict {
    pub verdict: GenericOutcome,
    pub trials: usize,
    /// Seeds whose realization satisfied the property, ascending.
    pub witnesses: Vec<u64>,
    /// True when the verdict rests only on the absence of witnesses.
    pub probabilistic: bool,
}

impl GenericVerdict {
    pub fn holds(&self) -> bool {
        self.verdict == GenericOutcome::GenericallyTrue
    }

    fn from_witnesses(witnesses: Vec<u64>, trials: usize) -> Self {
        let generically_true = !witnesses.is_empty();
        GenericVerdict {
            verdict: if generically_true {
                GenericOutcome::GenericallyTrue
            } else {
                GenericOutcome::GenericallyFalse
            },
            trials,
            witnesses,
            probabilistic: !generically_true,
        }
    }
}

/// Sample `trials` weight realizations and test detectability on each; one
/// detectable realization certifies generic detectability.
pub fn generic_detectable_mc(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure: &FailureScenario,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<GenericVerdict> {
    let mut witnesses = Vec::new();
    for t in 0..trials.max(1) {
        let trial_seed = seed.wrapping_add(t as u64);
        let weights = sample_weights(model, trial_seed);
        if is_detectable(dynamics, model, failure, &weights, tol)?.is_distinguishable() {
            witnesses.push(trial_seed);
        }
    }
    Ok(GenericVerdict::from_witnesses(witnesses, trials.max(1)))
}

/// Monte-Carlo generic isolability; a single realization isolating all pairs
/// certifies.
pub fn generic_isolable_mc(
    dynamics: &SubsystemDynamics,
    model: &NetworkModel,
    failure_set: &FailureSet,
    trials: usize,
    tol: f64,
    seed: u64,
) -> Result<GenericVerdict> {
    let mut witnesses = Vec::new();
    for t in 0..trials.max(1) {
        let trial_seed = seed.wrapping_add(t as u64);
        let weights = sample_weights(model, trial_seed);
        if is_isolable(dynamics, model, failure_set, &weights, tol)?.isolable {
            witnesses.push(trial_seed);
        }
    }
    Ok(GenericVerdict::from_witnesses(witnesses, trials.max(1)))
}

/// Default relative tolerance separating structural zeros from generic
/// nonzeros.
pub const DEFAULT_TOL: f64 = 1e-9;
