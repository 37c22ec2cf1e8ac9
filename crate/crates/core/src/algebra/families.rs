//! Named algebra families with known block structure.

use nalgebra::DVector;

use super::structure::{CentralBlock, StructuralDecomposition};
use super::OperatorAlgebra;
use crate::error::{ManError, Result};
use crate::linalg::{
    c64, from_herm_coords, herm_coords, require_unitary, swap_operator, CMatrix, CVector, RMatrix,
};

fn coords_from_structure(dec: &StructuralDecomposition) -> RMatrix {
    let mut cols = Vec::new();
    for b in dec.blocks() {
        let dj = b.irrep_dim;
        let scale = 1.0 / (b.multiplicity as f64).sqrt();
        for c in 0..dj * dj {
            let mut e = DVector::zeros(dj * dj);
            e[c] = 1.0;
            let h = from_herm_coords(e.as_slice(), dj);
            cols.push(herm_coords(&b.embed_irrep(&h).scale(scale)));
        }
    }
    RMatrix::from_columns(&cols)
}

impl OperatorAlgebra {
    /// Algebra `⊕_J iso_J (1_{n_J} ⊗ M_{d_J}) iso_J†` with structure and
    /// commutant filled in.
    pub fn from_structure(dec: StructuralDecomposition) -> OperatorAlgebra {
        let dim = dec.dim();
        let dual = dec.dual();
        let bare = OperatorAlgebra::from_coords(dim, coords_from_structure(&dec))
            .with_structure(dec.clone(), None);
        let commutant = OperatorAlgebra::from_coords(dim, coords_from_structure(&dual))
            .with_structure(dual, Some(bare.clone()));
        bare.with_structure(dec, Some(commutant))
    }

    /// `L(C^d)`.
    pub fn full(d: usize) -> Result<OperatorAlgebra> {
        Self::structural(&[(1, d)], None)
    }

    /// `C·1`.
    pub fn trivial(d: usize) -> Result<OperatorAlgebra> {
        Self::structural(&[(d, 1)], None)
    }

    /// Algebra with blocks `(n_J, d_J)` laid out consecutively, optionally
    /// rotated by a basis-change unitary.
    pub fn structural(blocks: &[(usize, usize)], basis_change: Option<&CMatrix>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(ManError::EmptyInput("no structural blocks".into()));
        }
        if blocks.iter().any(|&(n, d)| n == 0 || d == 0) {
            return Err(ManError::ZeroDimension);
        }
        let dim: usize = blocks.iter().map(|(n, d)| n * d).sum();
        let u = match basis_change {
            Some(u) => {
                if u.shape() != (dim, dim) {
                    return Err(ManError::ShapeMismatch(format!(
                        "basis change {:?} for dimension {dim}",
                        u.shape()
                    )));
                }
                require_unitary(u, 1e-9)?;
                u.clone()
            }
            None => CMatrix::identity(dim, dim),
        };
        let mut offset = 0;
        let mut out = Vec::with_capacity(blocks.len());
        for &(n, d) in blocks {
            let iso = u.columns(offset, n * d).into_owned();
            out.push(CentralBlock::from_isometry(n, d, iso));
            offset += n * d;
        }
        Ok(Self::from_structure(StructuralDecomposition::new(dim, out)))
    }

    /// Maximal abelian algebra spanned by the projectors onto an orthonormal
    /// basis.
    pub fn masa(basis: &[CVector]) -> Result<OperatorAlgebra> {
        let u = basis_to_unitary(basis)?;
        let d = u.nrows();
        Self::structural(&vec![(1, 1); d], Some(&u))
    }

    pub fn diagonal_masa(d: usize) -> Result<OperatorAlgebra> {
        Self::structural(&vec![(1, 1); d], None)
    }

    /// Local algebra `L(H_S) ⊗ 1_{S^c}` of a region (0-based site indices).
    pub fn lattice(site_dims: &[usize], region: &[usize]) -> Result<OperatorAlgebra> {
        if site_dims.is_empty() {
            return Err(ManError::EmptyInput("no lattice sites".into()));
        }
        if site_dims.contains(&0) {
            return Err(ManError::ZeroDimension);
        }
        if let Some(&index) = region.iter().find(|&&i| i >= site_dims.len()) {
            return Err(ManError::InvalidRegion {
                index,
                sites: site_dims.len(),
            });
        }
        let inside: Vec<usize> = (0..site_dims.len())
            .filter(|i| region.contains(i))
            .collect();
        let outside: Vec<usize> = (0..site_dims.len())
            .filter(|i| !region.contains(i))
            .collect();
        let dim: usize = site_dims.iter().product();
        let n: usize = outside.iter().map(|&i| site_dims[i]).product();
        let ds: usize = inside.iter().map(|&i| site_dims[i]).product();
        let mut stride = vec![1usize; site_dims.len()];
        for i in (0..site_dims.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * site_dims[i + 1];
        }
        let index_of = |mut p: usize, sites: &[usize]| -> usize {
            let mut idx = 0;
            for &s in sites.iter().rev() {
                idx += (p % site_dims[s]) * stride[s];
                p /= site_dims[s];
            }
            idx
        };
        let mut iso = CMatrix::zeros(dim, dim);
        for p in 0..n {
            for l in 0..ds {
                let row = index_of(p, &outside) + index_of(l, &inside);
                iso[(row, p * ds + l)] = c64(1.0, 0.0);
            }
        }
        let block = CentralBlock::from_isometry(n, ds, iso);
        Ok(Self::from_structure(StructuralDecomposition::new(
            dim,
            vec![block],
        )))
    }

    /// `L(C^{d1}) ⊗ 1_{d2}`.
    pub fn factor_left(d1: usize, d2: usize) -> Result<OperatorAlgebra> {
        Self::lattice(&[d1, d2], &[0])
    }

    /// `1_{d1} ⊗ L(C^{d2})`.
    pub fn factor_right(d1: usize, d2: usize) -> Result<OperatorAlgebra> {
        Self::lattice(&[d1, d2], &[1])
    }

    /// Operators on `(C^k)^{⊗2}` commuting with the swap. Built through the
    /// generic commutant route.
    pub fn symmetric_operators(k: usize) -> Result<OperatorAlgebra> {
        let s = swap_operator(&[k], &[0])?;
        Ok(OperatorAlgebra::from_generators(&[s], k * k)?.commutant())
    }

    /// `d-2` one-dimensional blocks glued to one qubit block.
    pub fn asymptotically_abelian(d: usize) -> Result<OperatorAlgebra> {
        if d < 2 {
            return Err(ManError::InvalidArgument(
                "asymptotically abelian family needs d >= 2".into(),
            ));
        }
        let mut blocks = vec![(1, 1); d - 2];
        blocks.push((1, 2));
        Self::structural(&blocks, None)
    }
}

/// Packs orthonormal vectors as the columns of a unitary.
pub fn basis_to_unitary(basis: &[CVector]) -> Result<CMatrix> {
    let first = basis
        .first()
        .ok_or_else(|| ManError::EmptyInput("empty basis".into()))?;
    let d = first.len();
    if basis.len() != d || basis.iter().any(|v| v.len() != d) {
        return Err(ManError::ShapeMismatch(format!(
            "{} vectors of dimension {d}",
            basis.len()
        )));
    }
    let u = CMatrix::from_columns(basis);
    let defect = crate::linalg::unitarity_defect(&u);
    if defect > 1e-9 {
        return Err(ManError::NotOrthonormal(defect));
    }
    Ok(u)
}
