//! Protocol 1: algebra states and swap tests on the doubled space.

use serde::{Deserialize, Serialize};

use super::{swap_test, EstimatorResult};
use crate::algebra::OperatorAlgebra;
use crate::error::{ManError, Result};
use crate::linalg::{trace_of_product, CMatrix};
use crate::man::{LogBase, Method};
use crate::rng::RngStream;

/// `ω(A) = (P_A ⊗ id)|Φ+><Φ+|` on `H ⊗ H`.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraState {
    dim: usize,
    matrix: CMatrix,
}

impl AlgebraState {
    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `||ω||₂²`, equal to `d(A)/d²`.
    pub fn purity(&self) -> f64 {
        self.matrix.norm_squared()
    }

    /// `S₂(ω) = -log ||ω||₂²`.
    pub fn renyi2(&self, base: LogBase) -> f64 {
        -base.log(self.purity())
    }

    /// `Tr(S ω ⊗ σ) = Tr(ω σ)`.
    pub fn swap_overlap(&self, other: &AlgebraState) -> f64 {
        trace_of_product(&self.matrix, &other.matrix).re
    }
}

pub fn algebra_state(a: &OperatorAlgebra) -> AlgebraState {
    AlgebraState {
        dim: a.dim(),
        matrix: a.projection_map().choi(),
    }
}

fn require_collinear(a: &OperatorAlgebra) -> Result<()> {
    if a.decomposition()?.is_collinear().collinear {
        Ok(())
    } else {
        Err(ManError::NotCollinear)
    }
}

/// `S = 1 - t_num/t_den` from two swap overlaps, either exactly or through
/// binomial swap tests with `shots` repetitions each.
fn ratio_estimate(
    method: Method,
    t_num: f64,
    t_den: f64,
    shots: Option<u64>,
    seed: u64,
) -> Result<EstimatorResult> {
    let Some(n) = shots else {
        let mut r = EstimatorResult::exact(method, 1.0 - t_num / t_den, seed);
        r.numerator_mean = Some(t_num);
        r.denominator_mean = Some(t_den);
        return Ok(r);
    };
    let num = swap_test(t_num, n, &mut RngStream::new(seed, 0))?;
    let den = swap_test(t_den, n, &mut RngStream::new(seed, 1))?;
    let nf = n as f64;
    let var_num = (1.0 - num * num).max(0.0) / nf;
    let var_den = (1.0 - den * den).max(0.0) / nf;
    if den <= 3.0 * var_den.sqrt() {
        return Err(ManError::IllConditioned(format!(
            "denominator estimate {den:.3e} within 3 standard errors of zero"
        )));
    }
    let ratio = num / den;
    let std_error = ((var_num + ratio * ratio * var_den) / (den * den)).sqrt();
    Ok(EstimatorResult {
        method,
        estimate: 1.0 - ratio,
        std_error,
        samples: 2 * n as usize,
        shots_per_swap: Some(n),
        seed,
        numerator_mean: Some(num),
        denominator_mean: Some(den),
    })
}

/// `S(A:B) = 1 - Tr(S ω(A)⊗ω(B')) / ||ω(A)||₂²` for collinear `A`.
pub fn protocol_choi(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    shots: Option<u64>,
    seed: u64,
) -> Result<EstimatorResult> {
    a.require_same_dim(b)?;
    require_collinear(a)?;
    let wa = algebra_state(a);
    let wb = algebra_state(&b.commutant());
    ratio_estimate(
        Method::ProtocolChoi,
        wa.swap_overlap(&wb),
        wa.purity(),
        shots,
        seed,
    )
}

/// `NC(A) = 1 - ||ω(Z(A))||₂² / ||ω(A)||₂²` for collinear `A`.
pub fn protocol_choi_self(
    a: &OperatorAlgebra,
    shots: Option<u64>,
    seed: u64,
) -> Result<EstimatorResult> {
    require_collinear(a)?;
    let wa = algebra_state(a);
    let wz = algebra_state(&a.center());
    ratio_estimate(
        Method::ProtocolChoiSelf,
        wz.purity(),
        wa.purity(),
        shots,
        seed,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RenyiIdentity {
    /// `NC₂(A)` from the structural data.
    pub nc2: f64,
    /// `S₂(ω(Z(A))) - S₂(ω(A))`.
    pub entropy_gap: f64,
}

/// Both sides of `NC₂(A) = S₂(ω(Z(A))) - S₂(ω(A))` for collinear `A`.
pub fn choi_renyi_identity(a: &OperatorAlgebra, base: LogBase) -> Result<RenyiIdentity> {
    require_collinear(a)?;
    let nc2 = crate::man::self_man(a, base)?.s2;
    let wa = algebra_state(a);
    let wz = algebra_state(&a.center());
    Ok(RenyiIdentity {
        nc2,
        entropy_gap: wz.renyi2(base) - wa.renyi2(base),
    })
}
