//! Protocol 2: projections of Haar-random pure states.

use rayon::prelude::*;

use super::{require_samples, swap_test, EstimatorResult};
use crate::algebra::OperatorAlgebra;
use crate::error::{ManError, Result};
use crate::linalg::{c64, trace_of_product, CMatrix};
use crate::man::Method;
use crate::rng::{haar_state, RngStream};

/// Numerator `<P_X(φ̂), P_Y(φ̂)>` and denominator `||P_W(φ̂)||²` of the
/// stochastic estimator.
struct Pairing<'a> {
    x: &'a OperatorAlgebra,
    y: &'a OperatorAlgebra,
    w: &'a OperatorAlgebra,
}

impl Pairing<'_> {
    fn terms(&self, rho: &CMatrix) -> (f64, f64) {
        let px = self.x.project(rho);
        let py = self.y.project(rho);
        let pw = self.w.project(rho);
        (trace_of_product(&px, &py).re, pw.norm_squared())
    }

    /// `E_φ f(φ̂) = (f-pairing on 1 + Σ_lm f-pairing on |l><m|)/(d(d+1))`.
    fn exact(&self) -> (f64, f64) {
        let d = self.x.dim();
        let pair = |m: &CMatrix| {
            let px = self.x.project(m);
            let py = self.y.project(m);
            let pw = self.w.project(m);
            (
                crate::linalg::hs_inner(&px, &py).expect("same shape").re,
                pw.norm_squared(),
            )
        };
        let (mut num, mut den) = pair(&CMatrix::identity(d, d));
        let mut e = CMatrix::zeros(d, d);
        for l in 0..d {
            for m in 0..d {
                e[(l, m)] = c64(1.0, 0.0);
                let (n, w) = pair(&e);
                num += n;
                den += w;
                e[(l, m)] = c64(0.0, 0.0);
            }
        }
        let norm = (d * (d + 1)) as f64;
        (num / norm, den / norm)
    }
}

/// Estimated means with their standard errors.
struct Moments {
    num: f64,
    den: f64,
    std_error: f64,
    den_se: f64,
}

impl Moments {
    fn exact((num, den): (f64, f64)) -> Self {
        Self {
            num,
            den,
            std_error: 0.0,
            den_se: 0.0,
        }
    }
}

fn finish(
    method: Method,
    d: usize,
    m: Moments,
    samples: usize,
    shots: Option<u64>,
    seed: u64,
) -> Result<EstimatorResult> {
    let Moments {
        num,
        den,
        std_error,
        den_se,
    } = m;
    let c = 1.0 / (d as f64 + 1.0);
    let gap = den - c;
    if gap <= 3.0 * den_se || gap <= 1e-12 {
        return Err(ManError::IllConditioned(format!(
            "denominator {den:.6e} minus 1/(d+1) is {gap:.3e} (standard error {den_se:.3e})"
        )));
    }
    Ok(EstimatorResult {
        method,
        estimate: 1.0 - (num - c) / gap,
        std_error,
        samples,
        shots_per_swap: shots,
        seed,
        numerator_mean: Some(num),
        denominator_mean: Some(den),
    })
}

fn sampled(
    method: Method,
    pairing: &Pairing<'_>,
    samples: usize,
    shots: Option<u64>,
    seed: u64,
) -> Result<EstimatorResult> {
    require_samples(samples, 2)?;
    let d = pairing.x.dim();
    let draws: Vec<(f64, f64)> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::new(seed, i);
            let phi = haar_state(d, &mut rng)?;
            let rho = &phi * phi.adjoint();
            let (num, den) = pairing.terms(&rho);
            match shots {
                None => Ok((num, den)),
                Some(n) => Ok((swap_test(num, n, &mut rng)?, swap_test(den, n, &mut rng)?)),
            }
        })
        .collect::<Result<_>>()?;
    let n = samples as f64;
    let mn = draws.iter().map(|v| v.0).sum::<f64>() / n;
    let md = draws.iter().map(|v| v.1).sum::<f64>() / n;
    let (mut vn, mut vd, mut cov) = (0.0, 0.0, 0.0);
    for (a, b) in &draws {
        vn += (a - mn) * (a - mn);
        vd += (b - md) * (b - md);
        cov += (a - mn) * (b - md);
    }
    vn /= n - 1.0;
    vd /= n - 1.0;
    cov /= n - 1.0;
    let c = 1.0 / (d as f64 + 1.0);
    let gap = md - c;
    let g = (mn - c) / gap;
    let var = (vn + g * g * vd - 2.0 * g * cov) / (n * gap * gap);
    let den_se = (vd / n).sqrt();
    let m = Moments {
        num: mn,
        den: md,
        std_error: var.max(0.0).sqrt(),
        den_se,
    };
    finish(method, d, m, samples, shots, seed)
}

fn check_pair(a: &OperatorAlgebra, b: &OperatorAlgebra) -> Result<()> {
    a.require_same_dim(b)?;
    if !a.decomposition()?.is_collinear().collinear {
        return Err(ManError::NotCollinear);
    }
    Ok(())
}

/// `S = 1 - (E<P_A φ̂, P_{B'} φ̂> - 1/(d+1)) / (E||P_A φ̂||² - 1/(d+1))`
/// estimated from paired Haar draws, optionally with swap-test shot noise.
pub fn protocol_stochastic(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    samples: usize,
    shots: Option<u64>,
    seed: u64,
) -> Result<EstimatorResult> {
    check_pair(a, b)?;
    let bp = b.commutant();
    let pairing = Pairing { x: a, y: &bp, w: a };
    sampled(Method::ProtocolStochastic, &pairing, samples, shots, seed)
}

/// The stochastic estimator with both expectations evaluated exactly.
pub fn protocol_stochastic_exact(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
) -> Result<EstimatorResult> {
    check_pair(a, b)?;
    let bp = b.commutant();
    let pairing = Pairing { x: a, y: &bp, w: a };
    finish(
        Method::ProtocolStochastic,
        a.dim(),
        Moments::exact(pairing.exact()),
        0,
        None,
        0,
    )
}

/// `NC(A) = 1 - (E||P_Z φ̂||² - 1/(d+1)) / (E||P_A φ̂||² - 1/(d+1))`.
pub fn protocol_stochastic_self(
    a: &OperatorAlgebra,
    samples: usize,
    shots: Option<u64>,
    seed: u64,
) -> Result<EstimatorResult> {
    check_pair(a, a)?;
    let z = a.center();
    let pairing = Pairing { x: &z, y: &z, w: a };
    sampled(
        Method::ProtocolStochasticSelf,
        &pairing,
        samples,
        shots,
        seed,
    )
}

pub fn protocol_stochastic_self_exact(a: &OperatorAlgebra) -> Result<EstimatorResult> {
    check_pair(a, a)?;
    let z = a.center();
    let pairing = Pairing { x: &z, y: &z, w: a };
    finish(
        Method::ProtocolStochasticSelf,
        a.dim(),
        Moments::exact(pairing.exact()),
        0,
        None,
        0,
    )
}
