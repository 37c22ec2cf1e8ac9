//! Monte-Carlo oracle and simulated measurement protocols.

mod choi;
mod markov;
mod montecarlo;
mod stochastic;

pub use choi::{
    algebra_state, choi_renyi_identity, protocol_choi, protocol_choi_self, AlgebraState,
    RenyiIdentity,
};
pub use markov::{
    markov_bound_check, markov_constants, markov_sweep, restricted_distance, sample_sup_distances,
    MarkovReport,
};
pub use montecarlo::{mc_man_direct, mc_orbit_averaged_man};
pub use stochastic::{
    protocol_stochastic, protocol_stochastic_exact, protocol_stochastic_self,
    protocol_stochastic_self_exact,
};

use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{ManError, Result};
use crate::man::{extended_float, Method};
use crate::rng::RngStream;

/// Default number of Monte-Carlo samples.
pub const DEFAULT_SAMPLES: usize = 10_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorResult {
    pub method: Method,
    pub estimate: f64,
    /// Standard error of `estimate`; `inf` when it cannot be estimated.
    #[serde(with = "extended_float")]
    pub std_error: f64,
    /// Number of random draws; zero for exact evaluations.
    pub samples: usize,
    pub shots_per_swap: Option<u64>,
    pub seed: u64,
    pub numerator_mean: Option<f64>,
    pub denominator_mean: Option<f64>,
}

impl EstimatorResult {
    pub(crate) fn exact(method: Method, estimate: f64, seed: u64) -> Self {
        Self {
            method,
            estimate,
            std_error: 0.0,
            samples: 0,
            shots_per_swap: None,
            seed,
            numerator_mean: None,
            denominator_mean: None,
        }
    }

    /// `|estimate - target| <= k σ`, exact agreement counting when `σ = 0`.
    pub fn agrees_with(&self, target: f64, k: f64) -> bool {
        (self.estimate - target).abs() <= k * self.std_error + 1e-12
    }
}

/// Mean and standard error (sample standard deviation over `√n`).
pub(crate) fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// One swap test with `shots` repetitions on states with overlap
/// `t = Tr(S ρ⊗σ)`; returns the estimate `2k/N - 1` of `t`.
pub(crate) fn swap_test(t: f64, shots: u64, rng: &mut RngStream) -> Result<f64> {
    if shots == 0 {
        return Err(ManError::InvalidArgument("shots must be positive".into()));
    }
    let p = ((1.0 + t) / 2.0).clamp(0.0, 1.0);
    let k = Binomial::new(shots, p)
        .map_err(|e| ManError::Numerical(format!("binomial({shots}, {p}): {e}")))?
        .sample(rng);
    Ok(2.0 * k as f64 / shots as f64 - 1.0)
}

pub(crate) fn require_samples(samples: usize, min: usize) -> Result<()> {
    if samples < min {
        return Err(ManError::InvalidArgument(format!(
            "need at least {min} samples, got {samples}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests;
