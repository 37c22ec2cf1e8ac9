//! The operator `Ω_A = Σ_α e_α ⊗ e_α†` on `H ⊗ H`.

use serde::{Deserialize, Serialize};

use super::{LogBase, ManReport, Method};
use crate::algebra::OperatorAlgebra;
use crate::error::Result;
use crate::linalg::{c64, kron, swap_operator, CMatrix, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OmegaRoute {
    /// Sum over the matrix-unit basis, accumulated over nonzero entries.
    Blocks,
    /// `Σ_J (1/d_J) (iso_J ⊗ iso_J)(1 ⊗ S_{d_J})(iso_J ⊗ iso_J)†`.
    Swap,
    /// Partial transpose of the transfer matrix of `P_{A'}`.
    Reshuffle,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OmegaOperator {
    dim: usize,
    matrix: CMatrix,
}

impl OmegaOperator {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `Tr Ω_A`, equal to `d(A')`.
    pub fn trace(&self) -> f64 {
        self.matrix.trace().re
    }

    /// `Tr(S Ω_A)`, equal to `d`.
    pub fn swap_trace(&self) -> f64 {
        crate::linalg::swap_trace(&self.matrix, self.dim).re
    }

    /// `Tr(S Ω_A Ω_B)` without forming the product.
    pub fn swap_product_trace(&self, other: &OmegaOperator) -> f64 {
        let d = self.dim;
        let n = d * d;
        let swap = |r: usize| (r % d) * d + r / d;
        let mut acc = c64(0.0, 0.0);
        for r in 0..n {
            let back = swap(r);
            for c in 0..n {
                let a = self.matrix[(r, c)];
                if a != C64::new(0.0, 0.0) {
                    acc += a * other.matrix[(c, back)];
                }
            }
        }
        acc.re
    }
}

pub fn omega_operator(a: &OperatorAlgebra) -> Result<OmegaOperator> {
    omega_operator_via(a, OmegaRoute::Blocks)
}

pub fn omega_operator_via(a: &OperatorAlgebra, route: OmegaRoute) -> Result<OmegaOperator> {
    let d = a.dim();
    let matrix = match route {
        OmegaRoute::Blocks => omega_blocks(a)?,
        OmegaRoute::Swap => omega_swap(a)?,
        OmegaRoute::Reshuffle => a.commutant().projection_map().omega_style(),
    };
    Ok(OmegaOperator { dim: d, matrix })
}

fn omega_blocks(a: &OperatorAlgebra) -> Result<CMatrix> {
    let d = a.dim();
    let dec = a.decomposition()?;
    let mut out = CMatrix::zeros(d * d, d * d);
    let zero = C64::new(0.0, 0.0);
    for b in dec.blocks() {
        let (n, dj) = (b.multiplicity, b.irrep_dim);
        let scale = 1.0 / dj as f64;
        for l in 0..dj {
            for m in 0..dj {
                let mut e = CMatrix::zeros(d, d);
                for p in 0..n {
                    let u = b.isometry.column(p * dj + l);
                    let v = b.isometry.column(p * dj + m);
                    e += u * v.adjoint();
                }
                let nz: Vec<(usize, usize, C64)> = (0..d)
                    .flat_map(|i| (0..d).map(move |j| (i, j)))
                    .map(|(i, j)| (i, j, e[(i, j)]))
                    .filter(|&(_, _, v)| v != zero)
                    .collect();
                // (e ⊗ e†)[(i,k),(j,l)] = e[i,j] conj(e[l,k])
                for &(i, j, x) in &nz {
                    for &(l, k, y) in &nz {
                        out[(i * d + k, j * d + l)] += x * y.conj() * scale;
                    }
                }
            }
        }
    }
    Ok(out)
}

fn omega_swap(a: &OperatorAlgebra) -> Result<CMatrix> {
    let d = a.dim();
    let dec = a.decomposition()?;
    let mut out = CMatrix::zeros(d * d, d * d);
    for b in dec.blocks() {
        let (n, dj) = (b.multiplicity, b.irrep_dim);
        let w = kron(&b.isometry, &b.isometry);
        let s = swap_operator(&[n, dj], &[1])?;
        out += (&w * s * w.adjoint()).scale(1.0 / dj as f64);
    }
    Ok(out)
}

/// `S(A:B) = 1 - Tr(S Ω_A Ω_B)/d`.
pub fn man_omega(a: &OperatorAlgebra, b: &OperatorAlgebra, base: LogBase) -> Result<ManReport> {
    a.require_same_dim(b)?;
    let oa = omega_operator(a)?;
    let ob = omega_operator(b)?;
    let raw = 1.0 - oa.swap_product_trace(&ob) / a.dim() as f64;
    ManReport::new(raw, Method::Omega, base)?.with_summaries(&[a, b])
}
