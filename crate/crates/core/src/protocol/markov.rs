//! Restricted distinguishability and the Markov-type concentration bound.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::require_samples;
use crate::algebra::OperatorAlgebra;
use crate::error::{ManError, Result};
use crate::linalg::{dagger, eigh, partial_trace, require_unitary, trace_norm_hermitian, CMatrix};
use crate::rng::{haar_state, RngStream};

const STATE_TOL: f64 = 1e-9;
/// MAN values below this are treated as exactly zero.
const MAN_ZERO: f64 = 1e-12;

fn require_state(rho: &CMatrix, d: usize) -> Result<()> {
    if rho.nrows() != d || rho.ncols() != d {
        return Err(ManError::ShapeMismatch(format!(
            "state {:?} vs dimension {d}",
            rho.shape()
        )));
    }
    let herm = (rho - dagger(rho)).norm();
    let trace = rho.trace();
    let (evals, _) = eigh(rho);
    let min = evals.iter().cloned().fold(f64::INFINITY, f64::min);
    if herm > STATE_TOL
        || (trace.re - 1.0).abs() > STATE_TOL
        || trace.im.abs() > STATE_TOL
        || min < -STATE_TOL
    {
        return Err(ManError::InvalidState(format!(
            "hermiticity defect {herm:.2e}, trace {trace:.6}, minimum eigenvalue {min:.2e}"
        )));
    }
    Ok(())
}

/// `Σ_J ||Tr_{n_J}(W_J† Δ W_J)||₁` with `Δ = Δ_U - Δ_V` the difference of the
/// evolved states. Assumes validated inputs.
fn block_distance(b: &OperatorAlgebra, delta: &CMatrix) -> Result<f64> {
    let mut total = 0.0;
    for block in b.decomposition()?.blocks() {
        let restricted = dagger(&block.isometry) * delta * &block.isometry;
        let m = partial_trace(&restricted, &[block.multiplicity, block.irrep_dim], &[1])?;
        total += trace_norm_hermitian(&m);
    }
    Ok(total)
}

/// `sup_{X∈B, ||X||∞≤1} |Tr(X (U†ρU - V†ρV))|`.
pub fn restricted_distance(
    u: &CMatrix,
    v: &CMatrix,
    b: &OperatorAlgebra,
    rho0: &CMatrix,
) -> Result<f64> {
    let d = b.dim();
    for m in [u, v] {
        if m.nrows() != d || m.ncols() != d {
            return Err(ManError::ShapeMismatch(format!(
                "unitary {:?} vs dimension {d}",
                m.shape()
            )));
        }
        require_unitary(m, 1e-9)?;
    }
    require_state(rho0, d)?;
    let delta = dagger(u) * rho0 * u - dagger(v) * rho0 * v;
    block_distance(b, &delta)
}

/// `(c(B), c̃(B))` with `c(B) = 2√(2 d(B) max_J d_J/n_J)` and the variant
/// `c̃(B) = 2√(2 d(B)) max_J d_J/n_J`.
pub fn markov_constants(b: &OperatorAlgebra) -> Result<(f64, f64)> {
    let dec = b.decomposition()?;
    let db = dec.algebra_dim() as f64;
    let ratio = dec
        .blocks()
        .iter()
        .map(|blk| blk.irrep_dim as f64 / blk.multiplicity as f64)
        .fold(0.0, f64::max);
    Ok((
        2.0 * (2.0 * db * ratio).sqrt(),
        2.0 * (2.0 * db).sqrt() * ratio,
    ))
}

/// For each of `samples` Haar pairs `(U, V)` in `A`, the maximum of the
/// restricted distance over `state_samples` Haar-random pure states.
pub fn sample_sup_distances(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    samples: usize,
    state_samples: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    a.require_same_dim(b)?;
    require_samples(samples, 1)?;
    require_samples(state_samples, 1)?;
    let d = a.dim();
    let dec = a.decomposition()?;
    b.decomposition()?;
    (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i);
            let u = dec.haar_unitary(&mut rng);
            let v = dec.haar_unitary(&mut rng);
            let mut best = 0.0f64;
            for _ in 0..state_samples {
                let phi = haar_state(d, &mut rng)?;
                let rho = &phi * phi.adjoint();
                let delta = dagger(&u) * &rho * &u - dagger(&v) * &rho * &v;
                best = best.max(block_distance(b, &delta)?);
            }
            Ok(best)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovReport {
    pub epsilon: f64,
    pub man: f64,
    pub c_b: f64,
    pub c_b_variant: f64,
    /// `(d c(B)/ε) √S(A:B)`.
    pub bound: f64,
    pub bound_variant: f64,
    /// Fraction of pairs whose sampled sup-distance is at least `ε`.
    pub probability: f64,
    pub std_error: f64,
    pub samples: usize,
    pub state_samples: usize,
    pub seed: u64,
    pub max_distance: f64,
    pub mean_distance: f64,
    /// `probability - bound > 5 σ`.
    pub violation: bool,
}

fn report_from(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    epsilon: f64,
    man: f64,
    distances: &[f64],
    state_samples: usize,
    seed: u64,
) -> Result<MarkovReport> {
    if epsilon.is_nan() || epsilon <= 0.0 || epsilon.is_infinite() {
        return Err(ManError::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    let (c_b, c_b_variant) = markov_constants(b)?;
    let d = a.dim() as f64;
    let n = distances.len() as f64;
    let hits = distances.iter().filter(|&&x| x >= epsilon).count() as f64;
    let p = hits / n;
    let std_error = (p * (1.0 - p) / n).sqrt();
    let bound = d * c_b / epsilon * man.sqrt();
    Ok(MarkovReport {
        epsilon,
        man,
        c_b,
        c_b_variant,
        bound,
        bound_variant: d * c_b_variant / epsilon * man.sqrt(),
        probability: p,
        std_error,
        samples: distances.len(),
        state_samples,
        seed,
        max_distance: distances.iter().cloned().fold(0.0, f64::max),
        mean_distance: distances.iter().sum::<f64>() / n,
        violation: p - bound > 5.0 * std_error,
    })
}

/// Empirical `Pr[sup_ρ d_B ≥ ε]` against the bound `(d c(B)/ε) √S(A:B)`.
pub fn markov_bound_check(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    epsilon: f64,
    samples: usize,
    state_samples: usize,
    seed: u64,
) -> Result<MarkovReport> {
    markov_sweep(a, b, &[epsilon], samples, state_samples, seed).map(|mut v| v.remove(0))
}

/// The bound check at several `ε` sharing one set of sampled distances.
pub fn markov_sweep(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    epsilons: &[f64],
    samples: usize,
    state_samples: usize,
    seed: u64,
) -> Result<Vec<MarkovReport>> {
    if epsilons.is_empty() {
        return Err(ManError::EmptyInput("no epsilon values".into()));
    }
    let man = a.man_with(b)?;
    let man = if man < MAN_ZERO { 0.0 } else { man };
    let distances = sample_sup_distances(a, b, samples, state_samples, seed)?;
    epsilons
        .iter()
        .map(|&e| report_from(a, b, e, man, &distances, state_samples, seed))
        .collect()
}
