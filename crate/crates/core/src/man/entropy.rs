//! MAN as an average linear-entropy production of block CP maps.

use serde::{Deserialize, Serialize};

use super::{LogBase, ManReport, Method};
use crate::algebra::{CentralBlock, OperatorAlgebra};
use crate::error::Result;
use crate::linalg::{c64, CMatrix};

/// Contribution of one central block `J` of `B`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyBlockTerm {
    pub multiplicity: usize,
    pub irrep_dim: usize,
    /// `p_J = n_J d_J / d`.
    pub weight: f64,
    /// `a_J = n_J (d_J + 1)/d_J`.
    pub a: f64,
    /// `b_J = 1 - n_J/d_J`.
    pub b: f64,
    /// `E_φ S_lin(T_J(φ̂))`, exact two-design average.
    pub mean_pure_entropy: f64,
    /// `S_lin(T_J(1/d_J))`.
    pub mixed_entropy: f64,
    /// `p_J {a_J E S_lin - n_J S_lin(mixed) + b_J}`.
    pub contribution: f64,
}

/// `T_J(X) = P_{A'}(iso_J (1_n/n ⊗ X) iso_J†)`.
fn block_map(block: &CentralBlock, a_comm: &OperatorAlgebra, x: &CMatrix) -> CMatrix {
    let n = block.multiplicity as f64;
    a_comm.project(&block.embed_irrep(x).scale(1.0 / n))
}

/// `S(A:B) = Σ_J p_J {a_J E[S_lin(T_J(φ̂_J))] - n_J S_lin(T_J(1/d_J)) + b_J}`
/// with the Haar expectation evaluated exactly through
/// `E[φ̂⊗φ̂] = (1 + S)/(d_J(d_J+1))`.
pub fn entropy_decomposition_man(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    base: LogBase,
) -> Result<(ManReport, Vec<EntropyBlockTerm>)> {
    a.require_same_dim(b)?;
    let d = a.dim() as f64;
    let a_comm = a.commutant();
    let dec = b.decomposition()?;
    let mut terms = Vec::with_capacity(dec.blocks().len());
    let mut total = 0.0;
    for block in dec.blocks() {
        let (n, dj) = (block.multiplicity, block.irrep_dim);
        let t_one = block_map(block, &a_comm, &CMatrix::identity(dj, dj)).norm_squared();
        let mut units = 0.0;
        let mut e = CMatrix::zeros(dj, dj);
        for l in 0..dj {
            for m in 0..dj {
                e[(l, m)] = c64(1.0, 0.0);
                units += block_map(block, &a_comm, &e).norm_squared();
                e[(l, m)] = c64(0.0, 0.0);
            }
        }
        let djf = dj as f64;
        let nf = n as f64;
        let mean_purity = (t_one + units) / (djf * (djf + 1.0));
        let mixed_purity = t_one / (djf * djf);
        let weight = nf * djf / d;
        let a_j = nf * (djf + 1.0) / djf;
        let b_j = 1.0 - nf / djf;
        let mean_pure_entropy = 1.0 - mean_purity;
        let mixed_entropy = 1.0 - mixed_purity;
        let contribution = weight * (a_j * mean_pure_entropy - nf * mixed_entropy + b_j);
        total += contribution;
        terms.push(EntropyBlockTerm {
            multiplicity: n,
            irrep_dim: dj,
            weight,
            a: a_j,
            b: b_j,
            mean_pure_entropy,
            mixed_entropy,
            contribution,
        });
    }
    let report = ManReport::new(total, Method::Entropy, base)?.with_summaries(&[a, b])?;
    Ok((report, terms))
}
