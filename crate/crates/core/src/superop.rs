//! Linear maps on `d×d` matrices in transfer-matrix form.

use crate::error::{ManError, Result};
use crate::linalg::{c64, vec_row, CMatrix, C64};

/// Linear map on `L(C^d)`, stored as its `d²×d²` transfer matrix acting on
/// row-major vectorizations (`X -> A X B†` is `A ⊗ conj(B)`).
#[derive(Clone, Debug, PartialEq)]
pub struct SuperOperator {
    dim: usize,
    transfer: CMatrix,
}

impl SuperOperator {
    pub fn from_transfer(transfer: CMatrix) -> Result<Self> {
        let (r, c) = transfer.shape();
        if r != c {
            return Err(ManError::ShapeMismatch(format!("transfer matrix {r}x{c}")));
        }
        let dim = (r as f64).sqrt().round() as usize;
        if dim * dim != r {
            return Err(ManError::ShapeMismatch(format!(
                "transfer size {r} is not a square dimension"
            )));
        }
        Ok(Self { dim, transfer })
    }

    /// Builds the transfer matrix column by column from the images of the
    /// matrix units `|i><j|`.
    pub fn from_fn(dim: usize, mut f: impl FnMut(&CMatrix) -> CMatrix) -> Self {
        let n = dim * dim;
        let mut transfer = CMatrix::zeros(n, n);
        let mut unit = CMatrix::zeros(dim, dim);
        for i in 0..dim {
            for j in 0..dim {
                unit[(i, j)] = c64(1.0, 0.0);
                let image = f(&unit);
                transfer.set_column(i * dim + j, &vec_row(&image));
                unit[(i, j)] = c64(0.0, 0.0);
            }
        }
        Self { dim, transfer }
    }

    /// `X -> Σ_k K_k X K_k†`.
    pub fn from_kraus(kraus: &[CMatrix]) -> Result<Self> {
        let first = kraus
            .first()
            .ok_or_else(|| ManError::EmptyInput("empty Kraus set".into()))?;
        let d = first.nrows();
        let mut transfer = CMatrix::zeros(d * d, d * d);
        for k in kraus {
            if k.shape() != (d, d) {
                return Err(ManError::ShapeMismatch(
                    "Kraus operators differ in shape".into(),
                ));
            }
            transfer += k.kronecker(&k.map(|z| z.conj()));
        }
        Ok(Self { dim: d, transfer })
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            transfer: CMatrix::identity(dim * dim, dim * dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn transfer(&self) -> &CMatrix {
        &self.transfer
    }

    pub fn apply(&self, x: &CMatrix) -> Result<CMatrix> {
        if x.shape() != (self.dim, self.dim) {
            return Err(ManError::ShapeMismatch(format!(
                "operand {:?} for map on dimension {}",
                x.shape(),
                self.dim
            )));
        }
        let v = &self.transfer * vec_row(x);
        Ok(CMatrix::from_row_slice(self.dim, self.dim, v.as_slice()))
    }

    pub fn compose(&self, inner: &SuperOperator) -> Result<Self> {
        if self.dim != inner.dim {
            return Err(ManError::DimensionMismatch {
                left: self.dim,
                right: inner.dim,
            });
        }
        Ok(Self {
            dim: self.dim,
            transfer: &self.transfer * &inner.transfer,
        })
    }

    /// `Tr_HS(T† F)`.
    pub fn hs_inner(&self, other: &SuperOperator) -> C64 {
        self.transfer
            .iter()
            .zip(other.transfer.iter())
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    pub fn trace_hs(&self) -> C64 {
        self.transfer.trace()
    }

    /// Normalized Choi state `(T ⊗ id)|Φ+><Φ+|`.
    pub fn choi(&self) -> CMatrix {
        let d = self.dim;
        let mut out = CMatrix::zeros(d * d, d * d);
        let scale = 1.0 / d as f64;
        for a in 0..d {
            for b in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        out[(a * d + i, b * d + j)] = self.transfer[(a * d + b, i * d + j)] * scale;
                    }
                }
            }
        }
        out
    }

    /// Partial transpose of the second tensor factor of the transfer matrix:
    /// `Σ_k A_k ⊗ B_kᵀ  ->  Σ_k A_k ⊗ B_k`. For a Kraus map `Σ_k K_k X K_k†`
    /// this yields `Σ_k K_k ⊗ K_k†`.
    pub fn omega_style(&self) -> CMatrix {
        partial_transpose_second(&self.transfer, self.dim)
    }

    /// Inverse of [`SuperOperator::omega_style`].
    pub fn from_omega_style(omega: &CMatrix) -> Result<Self> {
        let probe = Self::from_transfer(omega.clone())?;
        Ok(Self {
            dim: probe.dim,
            transfer: partial_transpose_second(omega, probe.dim),
        })
    }

    pub fn reshuffle(&self) -> (CMatrix, CMatrix) {
        (self.choi(), self.omega_style())
    }
}

fn partial_transpose_second(m: &CMatrix, d: usize) -> CMatrix {
    let mut out = CMatrix::zeros(d * d, d * d);
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    out[(i * d + l, k * d + j)] = m[(i * d + j, k * d + l)];
                }
            }
        }
    }
    out
}
