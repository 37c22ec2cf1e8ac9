//! Direct Haar averages of commutators.

use rayon::prelude::*;

use super::{mean_and_se, require_samples, EstimatorResult};
use crate::algebra::OperatorAlgebra;
use crate::error::Result;
use crate::man::{projected_weight, Method};
use crate::rng::{haar_unitary, RngStream};

/// Averages `||[U, V]||²/(2d)` over independent Haar unitaries `U ∈ A`,
/// `V ∈ B`. Sample `i` draws from stream `i` of `seed`.
pub fn mc_man_direct(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    samples: usize,
    seed: u64,
) -> Result<EstimatorResult> {
    a.require_same_dim(b)?;
    require_samples(samples, 1)?;
    let (da, db) = (a.decomposition()?, b.decomposition()?);
    let d = a.dim() as f64;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i);
            let u = da.haar_unitary(&mut rng);
            let v = db.haar_unitary(&mut rng);
            (&u * &v - &v * &u).norm_squared() / (2.0 * d)
        })
        .collect();
    let (estimate, std_error) = mean_and_se(&values);
    Ok(EstimatorResult {
        method: Method::MonteCarlo,
        estimate,
        std_error,
        samples,
        shots_per_swap: None,
        seed,
        numerator_mean: None,
        denominator_mean: None,
    })
}

/// Averages the closed-form `S(A : U(B))` over Haar unitaries `U` on the
/// whole space.
pub fn mc_orbit_averaged_man(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    samples: usize,
    seed: u64,
) -> Result<EstimatorResult> {
    a.require_same_dim(b)?;
    require_samples(samples, 1)?;
    let e = a.decomposition()?.block_bases().e;
    let bp = b.commutant();
    let coords = bp.coords();
    let dim = a.dim();
    let d = dim as f64;
    let values: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i);
            let u = haar_unitary(dim, &mut rng).expect("positive dimension");
            let ud = u.adjoint();
            let rotated: Vec<_> = e.iter().map(|x| &ud * x * &u).collect();
            1.0 - projected_weight(&rotated, coords) / d
        })
        .collect();
    let (estimate, std_error) = mean_and_se(&values);
    Ok(EstimatorResult {
        method: Method::MonteCarloOrbit,
        estimate,
        std_error,
        samples,
        shots_per_swap: None,
        seed,
        numerator_mean: None,
        denominator_mean: None,
    })
}
