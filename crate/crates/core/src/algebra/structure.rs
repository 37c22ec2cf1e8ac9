//! Central-block decomposition `H = ⊕_J C^{n_J} ⊗ C^{d_J}` and the objects
//! built from it (matrix-unit bases, in-algebra Haar unitaries).

use serde::{Deserialize, Serialize};

use super::OperatorAlgebra;
use crate::error::{ManError, Result};
use crate::linalg::{
    cluster_sorted, eigh, herm_coords, kron, polar_unitary, real_range, CMatrix, RMatrix,
};
use crate::rng::{haar_unitary, RngStream};

const CLUSTER_GAP: f64 = 1e-7;
const BLOCK_FORM_TOL: f64 = 1e-8;
const MAX_ATTEMPTS: u64 = 8;
const DECOMPOSE_SEED: u64 = 0x5eed_a1e6_b7a5_0001;

/// One central block: `Π_J` and an isometry `C^{n_J} ⊗ C^{d_J} -> range(Π_J)`
/// under which the algebra acts as `1_{n_J} ⊗ M_{d_J}`. Column `p*d_J + l`
/// of the isometry is the vector `|p> ⊗ |l>`.
#[derive(Clone, Debug)]
pub struct CentralBlock {
    pub multiplicity: usize,
    pub irrep_dim: usize,
    pub projection: CMatrix,
    pub isometry: CMatrix,
}

impl CentralBlock {
    pub(crate) fn from_isometry(multiplicity: usize, irrep_dim: usize, isometry: CMatrix) -> Self {
        let projection = &isometry * isometry.adjoint();
        Self {
            multiplicity,
            irrep_dim,
            projection,
            isometry,
        }
    }

    fn column(&self, p: usize, l: usize) -> nalgebra::DVectorView<'_, crate::linalg::C64> {
        self.isometry.column(p * self.irrep_dim + l)
    }

    /// `iso (1_n ⊗ X) iso†` for an operator `X` on the irrep factor.
    pub fn embed_irrep(&self, x: &CMatrix) -> CMatrix {
        let local = kron(&CMatrix::identity(self.multiplicity, self.multiplicity), x);
        &self.isometry * local * self.isometry.adjoint()
    }

    /// `iso (X ⊗ 1_d) iso†` for an operator `X` on the multiplicity factor.
    pub fn embed_multiplicity(&self, x: &CMatrix) -> CMatrix {
        let local = kron(x, &CMatrix::identity(self.irrep_dim, self.irrep_dim));
        &self.isometry * local * self.isometry.adjoint()
    }

    /// `iso† X iso`.
    pub fn restrict(&self, x: &CMatrix) -> CMatrix {
        self.isometry.adjoint() * x * &self.isometry
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Collinearity {
    pub collinear: bool,
    /// Common value of `n_J / d_J` when collinear.
    pub ratio: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StructuralSummary {
    pub dim: usize,
    pub center_dim: usize,
    pub multiplicities: Vec<usize>,
    pub irrep_dims: Vec<usize>,
    pub algebra_dim: usize,
    pub commutant_dim: usize,
    pub collinear: bool,
}

#[derive(Clone, Debug)]
pub struct StructuralDecomposition {
    dim: usize,
    blocks: Vec<CentralBlock>,
}

/// The bases `e_α = iso(1_n/√d_J ⊗ |l><m|)iso†` of the algebra and
/// `ẽ_β = iso(|p><q| ⊗ 1_d/√n_J)iso†` of its commutant.
#[derive(Clone, Debug)]
pub struct BlockBases {
    pub e: Vec<CMatrix>,
    pub e_tilde: Vec<CMatrix>,
    /// Block index of each `e_α`.
    pub e_block: Vec<usize>,
    pub e_tilde_block: Vec<usize>,
}

impl StructuralDecomposition {
    /// Sorts blocks canonically by `(d_J, n_J, Tr(Π_J diag(1..d)))`.
    pub(crate) fn new(dim: usize, mut blocks: Vec<CentralBlock>) -> Self {
        let key = |b: &CentralBlock| {
            let pos: f64 = (0..dim)
                .map(|i| (i + 1) as f64 * b.projection[(i, i)].re)
                .sum();
            (b.irrep_dim, b.multiplicity, pos)
        };
        blocks.sort_by(|a, b| {
            let (ka, kb) = (key(a), key(b));
            ka.0.cmp(&kb.0)
                .then(ka.1.cmp(&kb.1))
                .then(ka.2.total_cmp(&kb.2))
        });
        Self { dim, blocks }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> &[CentralBlock] {
        &self.blocks
    }

    pub fn center_dim(&self) -> usize {
        self.blocks.len()
    }

    pub fn multiplicities(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.multiplicity).collect()
    }

    pub fn irrep_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.irrep_dim).collect()
    }

    /// `d(A) = Σ_J d_J²`.
    pub fn algebra_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.irrep_dim * b.irrep_dim).sum()
    }

    /// `d(A') = Σ_J n_J²`.
    pub fn commutant_dim(&self) -> usize {
        self.blocks
            .iter()
            .map(|b| b.multiplicity * b.multiplicity)
            .sum()
    }

    pub fn max_irrep_dim(&self) -> usize {
        self.blocks.iter().map(|b| b.irrep_dim).max().unwrap_or(1)
    }

    pub fn is_collinear(&self) -> Collinearity {
        let ratios: Vec<f64> = self
            .blocks
            .iter()
            .map(|b| b.multiplicity as f64 / b.irrep_dim as f64)
            .collect();
        let first = ratios[0];
        let collinear = ratios.iter().all(|r| (r - first).abs() <= 1e-9);
        Collinearity {
            collinear,
            ratio: collinear.then_some(first),
        }
    }

    pub fn summary(&self) -> StructuralSummary {
        StructuralSummary {
            dim: self.dim,
            center_dim: self.center_dim(),
            multiplicities: self.multiplicities(),
            irrep_dims: self.irrep_dims(),
            algebra_dim: self.algebra_dim(),
            commutant_dim: self.commutant_dim(),
            collinear: self.is_collinear().collinear,
        }
    }

    /// Structure of the commutant: multiplicity and irrep factors exchanged.
    pub fn dual(&self) -> StructuralDecomposition {
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let (n, dj) = (b.multiplicity, b.irrep_dim);
                let mut iso = CMatrix::zeros(self.dim, n * dj);
                for p in 0..n {
                    for l in 0..dj {
                        iso.set_column(l * n + p, &b.isometry.column(p * dj + l));
                    }
                }
                CentralBlock::from_isometry(dj, n, iso)
            })
            .collect();
        StructuralDecomposition::new(self.dim, blocks)
    }

    pub fn conjugate(&self, u: &CMatrix) -> StructuralDecomposition {
        let blocks = self
            .blocks
            .iter()
            .map(|b| CentralBlock::from_isometry(b.multiplicity, b.irrep_dim, u * &b.isometry))
            .collect();
        StructuralDecomposition::new(self.dim, blocks)
    }

    pub fn block_bases(&self) -> BlockBases {
        let mut out = BlockBases {
            e: Vec::new(),
            e_tilde: Vec::new(),
            e_block: Vec::new(),
            e_tilde_block: Vec::new(),
        };
        for (j, b) in self.blocks.iter().enumerate() {
            let (n, dj) = (b.multiplicity, b.irrep_dim);
            let se = 1.0 / (dj as f64).sqrt();
            for l in 0..dj {
                for m in 0..dj {
                    let mut e = CMatrix::zeros(self.dim, self.dim);
                    for p in 0..n {
                        e += b.column(p, l) * b.column(p, m).adjoint();
                    }
                    out.e.push(e.scale(se));
                    out.e_block.push(j);
                }
            }
            let st = 1.0 / (n as f64).sqrt();
            for p in 0..n {
                for q in 0..n {
                    let mut e = CMatrix::zeros(self.dim, self.dim);
                    for l in 0..dj {
                        e += b.column(p, l) * b.column(q, l).adjoint();
                    }
                    out.e_tilde.push(e.scale(st));
                    out.e_tilde_block.push(j);
                }
            }
        }
        out
    }

    /// `U = Σ_J iso_J (1_{n_J} ⊗ U_J) iso_J†` with independent Haar `U_J`.
    pub fn haar_unitary(&self, rng: &mut RngStream) -> CMatrix {
        let mut u = CMatrix::zeros(self.dim, self.dim);
        for b in &self.blocks {
            let uj = haar_unitary(b.irrep_dim, rng).expect("positive block dimension");
            u += b.embed_irrep(&uj);
        }
        u
    }

    /// Largest deviation of `iso† B iso` from the form `1_n ⊗ X` over a set of
    /// algebra elements, plus the deviation of `Σ Π_J` from the identity.
    pub fn block_form_defect(&self, elements: &[CMatrix]) -> f64 {
        let mut worst: f64 = 0.0;
        let total: CMatrix = self
            .blocks
            .iter()
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, b| {
                acc + &b.projection
            });
        worst = worst.max((total - CMatrix::identity(self.dim, self.dim)).norm());
        for b in &self.blocks {
            for x in elements {
                worst = worst.max(block_form_defect(b, x));
            }
        }
        worst
    }
}

fn block_form_defect(block: &CentralBlock, x: &CMatrix) -> f64 {
    let y = block.restrict(x);
    let dj = block.irrep_dim;
    let top = y.view((0, 0), (dj, dj)).into_owned();
    let ideal = kron(
        &CMatrix::identity(block.multiplicity, block.multiplicity),
        &top,
    );
    (y - ideal).norm() / (1.0 + x.norm())
}

pub(super) fn decompose(alg: &OperatorAlgebra) -> Result<StructuralDecomposition> {
    let mut last_err = ManError::DecompositionFailed("no attempt made".into());
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = RngStream::new(DECOMPOSE_SEED, attempt);
        match try_decompose(alg, &mut rng) {
            Ok(d) => return Ok(d),
            Err(e) => last_err = e,
        }
    }
    Err(ManError::DecompositionFailed(format!(
        "gave up after {MAX_ATTEMPTS} attempts: {last_err}"
    )))
}

fn try_decompose(alg: &OperatorAlgebra, rng: &mut RngStream) -> Result<StructuralDecomposition> {
    let d = alg.dim();
    let center = alg.center();
    let dz = center.algebra_dim();
    if dz == 0 {
        return Err(ManError::DecompositionFailed("empty center".into()));
    }
    let supports: Vec<CMatrix> = if dz == 1 {
        vec![CMatrix::identity(d, d)]
    } else {
        let z = center.random_hermitian(rng);
        let (values, vectors) = eigh(&z);
        let clusters = cluster_sorted(&values, CLUSTER_GAP);
        if clusters.len() != dz {
            return Err(ManError::DecompositionFailed(format!(
                "central element has {} eigenvalue clusters, center dimension is {dz}",
                clusters.len()
            )));
        }
        clusters
            .into_iter()
            .map(|r| vectors.columns(r.start, r.len()).into_owned())
            .collect()
    };

    let mut blocks = Vec::with_capacity(dz);
    for w in supports {
        blocks.push(split_block(alg, &w, rng)?);
    }
    let dec = StructuralDecomposition::new(d, blocks);
    let defect = dec.block_form_defect(alg.basis());
    if defect > BLOCK_FORM_TOL {
        return Err(ManError::DecompositionFailed(format!(
            "block form defect {defect:.3e}"
        )));
    }
    Ok(dec)
}

/// Builds matrix units inside one central block with orthonormal support `w`.
fn split_block(alg: &OperatorAlgebra, w: &CMatrix, rng: &mut RngStream) -> Result<CentralBlock> {
    let r = w.ncols();
    let wd = w.adjoint();
    let restricted: Vec<_> = alg
        .basis()
        .iter()
        .map(|b| herm_coords(&(&wd * b * w)))
        .collect();
    let rank = real_range(&RMatrix::from_columns(&restricted)).ncols();
    let dj = (rank as f64).sqrt().round() as usize;
    if dj == 0 || dj * dj != rank || !r.is_multiple_of(dj) {
        return Err(ManError::DecompositionFailed(format!(
            "block of size {r} carries a {rank}-dimensional algebra"
        )));
    }
    let n = r / dj;
    if dj == 1 {
        return Ok(CentralBlock::from_isometry(n, 1, w.clone()));
    }

    let h = &wd * alg.random_hermitian(rng) * w;
    let (values, vectors) = eigh(&h);
    let clusters = cluster_sorted(&values, CLUSTER_GAP);
    if clusters.len() != dj || clusters.iter().any(|c| c.len() != n) {
        return Err(ManError::DecompositionFailed(
            "degenerate block element; retrying".into(),
        ));
    }
    let q: Vec<CMatrix> = clusters
        .iter()
        .map(|c| vectors.columns(c.start, n).into_owned())
        .collect();
    let mut local = CMatrix::zeros(r, n * dj);
    for p in 0..n {
        local.set_column(p * dj, &q[0].column(p));
    }
    for l in 1..dj {
        let x = &wd * alg.random_element(rng) * w;
        let k = q[l].adjoint() * x * &q[0];
        let (polar, smin, smax) = polar_unitary(&k);
        if smax <= 1e-10 || smin < 1e-6 * smax {
            return Err(ManError::DecompositionFailed(
                "matrix unit not in generic position; retrying".into(),
            ));
        }
        let v = &q[l] * polar;
        for p in 0..n {
            local.set_column(p * dj + l, &v.column(p));
        }
    }
    let iso = w * local;
    let block = CentralBlock::from_isometry(n, dj, iso);
    Ok(block)
}
