//! Hermitian-closed unital matrix algebras.
//!
//! An [`OperatorAlgebra`] is stored as a hermitian HS-orthonormal basis. The
//! structural decomposition and the commutant are computed lazily and cached;
//! constructors that know the block structure up front (lattice, structural,
//! MASA families) fill the caches directly.

mod families;
mod structure;

pub use families::*;
pub use structure::{
    BlockBases, CentralBlock, Collinearity, StructuralDecomposition, StructuralSummary,
};

use std::fmt;
use std::sync::OnceLock;

use nalgebra::DVector;

use crate::error::{ManError, Result};
use crate::linalg::{
    c64, from_herm_coords, herm_coords, hermitian_span_coords, identity, real_intersection,
    real_null_space, require_unitary, vec_row, CMatrix, RMatrix,
};
use crate::rng::RngStream;
use crate::superop::SuperOperator;

/// Tolerance for membership and closure checks.
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Two algebras are equal when their projections differ by at most this much.
pub const EQUALITY_TOL: f64 = 1e-8;

pub struct OperatorAlgebra {
    dim: usize,
    coords: RMatrix,
    basis: Vec<CMatrix>,
    decomposition: OnceLock<StructuralDecomposition>,
    commutant: OnceLock<Box<OperatorAlgebra>>,
}

impl Clone for OperatorAlgebra {
    fn clone(&self) -> Self {
        Self {
            dim: self.dim,
            coords: self.coords.clone(),
            basis: self.basis.clone(),
            decomposition: self.decomposition.clone(),
            commutant: self.commutant.clone(),
        }
    }
}

impl fmt::Debug for OperatorAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OperatorAlgebra")
            .field("dim", &self.dim)
            .field("algebra_dim", &self.basis.len())
            .field("decomposed", &self.decomposition.get().is_some())
            .finish()
    }
}

impl OperatorAlgebra {
    /// Wraps an orthonormal set of hermitian coordinate columns. The caller
    /// guarantees that the span is a unital *-algebra.
    pub(crate) fn from_coords(dim: usize, coords: RMatrix) -> Self {
        let basis = coords
            .column_iter()
            .map(|c| from_herm_coords(c.as_slice(), dim))
            .collect();
        Self {
            dim,
            coords,
            basis,
            decomposition: OnceLock::new(),
            commutant: OnceLock::new(),
        }
    }

    /// Smallest unital *-algebra containing `gens`.
    pub fn from_generators(gens: &[CMatrix], dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(ManError::ZeroDimension);
        }
        if let Some(g) = gens.iter().find(|g| g.shape() != (dim, dim)) {
            return Err(ManError::ShapeMismatch(format!(
                "generator {:?} in dimension {dim}",
                g.shape()
            )));
        }
        let mut span = vec![identity(dim)];
        span.extend(gens.iter().cloned());
        let seed_coords = hermitian_span_coords(&span)?;
        let generators: Vec<CMatrix> = seed_coords
            .column_iter()
            .map(|c| from_herm_coords(c.as_slice(), dim))
            .collect();
        let mut coords = seed_coords;
        let max_rounds = dim * dim;
        for _ in 0..=max_rounds {
            let current: Vec<CMatrix> = coords
                .column_iter()
                .map(|c| from_herm_coords(c.as_slice(), dim))
                .collect();
            let mut grown = current.clone();
            for b in &current {
                for g in &generators {
                    grown.push(b * g);
                }
            }
            let next = hermitian_span_coords(&grown)?;
            if next.ncols() == coords.ncols() {
                return Ok(Self::from_coords(dim, coords));
            }
            coords = next;
        }
        Err(ManError::ClosureDidNotConverge(max_rounds))
    }

    /// Treats `span` as a spanning set and verifies that it is already a
    /// unital *-algebra.
    pub fn from_spanning_set(span: &[CMatrix]) -> Result<Self> {
        let dim = span
            .first()
            .ok_or_else(|| ManError::EmptyInput("empty spanning set".into()))?
            .nrows();
        let coords = hermitian_span_coords(span)?;
        let alg = Self::from_coords(dim, coords);
        alg.check_algebra()?;
        Ok(alg)
    }

    /// Ambient Hilbert space dimension `d`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Linear dimension `d(A)`.
    pub fn algebra_dim(&self) -> usize {
        self.basis.len()
    }

    /// Hermitian HS-orthonormal basis.
    pub fn basis(&self) -> &[CMatrix] {
        &self.basis
    }

    /// Basis in real hermitian coordinates, one column per element.
    pub fn coords(&self) -> &RMatrix {
        &self.coords
    }

    /// HS-orthogonal projection `P_A(X) = Σ_k B_k Tr(B_k X)`.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            let w = crate::linalg::trace_of_product(b, x);
            out += b * w;
        }
        out
    }

    /// Squared HS norm of `P_A(X)` computed from the basis overlaps.
    pub fn projected_norm_sq(&self, x: &CMatrix) -> f64 {
        self.basis
            .iter()
            .map(|b| crate::linalg::trace_of_product(b, x).norm_sqr())
            .sum()
    }

    pub fn residual(&self, x: &CMatrix) -> f64 {
        (x - self.project(x)).norm()
    }

    pub fn contains(&self, x: &CMatrix) -> bool {
        self.residual(x) <= MEMBERSHIP_TOL * (1.0 + x.norm())
    }

    /// Checks unitality and closure under products (adjoint closure holds by
    /// construction of the hermitian basis).
    pub fn check_algebra(&self) -> Result<()> {
        let one = identity(self.dim);
        let r = self.residual(&one);
        if r > MEMBERSHIP_TOL {
            return Err(ManError::Numerical(format!(
                "identity residual {r:.3e} outside the span"
            )));
        }
        for a in &self.basis {
            for b in &self.basis {
                let p = a * b;
                let r = self.residual(&p);
                if r > MEMBERSHIP_TOL {
                    return Err(ManError::Numerical(format!(
                        "span not closed under products (residual {r:.3e})"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Projection CP-map onto the algebra in transfer form.
    pub fn projection_map(&self) -> SuperOperator {
        let n = self.dim * self.dim;
        let mut transfer = CMatrix::zeros(n, n);
        for b in &self.basis {
            let v = vec_row(b);
            transfer += &v * v.adjoint();
        }
        SuperOperator::from_transfer(transfer).expect("square transfer")
    }

    /// Commutant `A'`.
    pub fn commutant(&self) -> OperatorAlgebra {
        self.commutant
            .get_or_init(|| Box::new(self.compute_commutant()))
            .as_ref()
            .clone()
    }

    fn compute_commutant(&self) -> OperatorAlgebra {
        let d = self.dim;
        let n = d * d;
        let units: Vec<CMatrix> = (0..n)
            .map(|c| {
                let mut e = DVector::zeros(n);
                e[c] = 1.0;
                from_herm_coords(e.as_slice(), d)
            })
            .collect();
        // Rows: coordinates of i[H_c, B_k] for every basis element B_k.
        let k = self.basis.len();
        let mut stacked = RMatrix::zeros(k * n, n);
        for (kk, b) in self.basis.iter().enumerate() {
            for (c, h) in units.iter().enumerate() {
                let comm = (h * b - b * h) * c64(0.0, 1.0);
                let col = herm_coords(&comm);
                stacked.view_mut((kk * n, c), (n, 1)).copy_from(&col);
            }
        }
        let null = real_null_space(&stacked);
        OperatorAlgebra::from_coords(d, null)
    }

    /// Center `Z(A) = A ∩ A'`.
    pub fn center(&self) -> OperatorAlgebra {
        let comm = self.commutant();
        OperatorAlgebra::from_coords(self.dim, real_intersection(&self.coords, comm.coords()))
    }

    pub fn intersection(&self, other: &OperatorAlgebra) -> Result<OperatorAlgebra> {
        self.require_same_dim(other)?;
        Ok(OperatorAlgebra::from_coords(
            self.dim,
            real_intersection(&self.coords, &other.coords),
        ))
    }

    /// `U A U†`.
    pub fn conjugate(&self, u: &CMatrix) -> Result<OperatorAlgebra> {
        if u.shape() != (self.dim, self.dim) {
            return Err(ManError::ShapeMismatch(format!(
                "unitary {:?} for dimension {}",
                u.shape(),
                self.dim
            )));
        }
        require_unitary(u, 1e-9)?;
        let ud = u.adjoint();
        let rotated: Vec<CMatrix> = self.basis.iter().map(|b| u * b * &ud).collect();
        let coords = RMatrix::from_columns(&rotated.iter().map(herm_coords).collect::<Vec<_>>());
        let out = OperatorAlgebra::from_coords(self.dim, coords);
        if let Some(dec) = self.decomposition.get() {
            let _ = out.decomposition.set(dec.conjugate(u));
        }
        if let Some(comm) = self.commutant.get() {
            let c = comm.conjugate(u)?;
            let _ = out.commutant.set(Box::new(c));
        }
        Ok(out)
    }

    /// Basis-free equality test: `||P_A - P_B||_HS <= 1e-8`.
    pub fn same_as(&self, other: &OperatorAlgebra) -> bool {
        self.projector_distance(other) <= EQUALITY_TOL
    }

    pub fn projector_distance(&self, other: &OperatorAlgebra) -> f64 {
        if self.dim != other.dim {
            return f64::INFINITY;
        }
        let (q, r) = (&self.coords, &other.coords);
        let cross = q.transpose() * r;
        let a = q - r * cross.transpose();
        let b = r - q * &cross;
        (a.norm_squared() + b.norm_squared()).sqrt()
    }

    /// `Tr_HS(P_A P_B)` for two algebras on the same space.
    pub fn projection_overlap(&self, other: &OperatorAlgebra) -> Result<f64> {
        self.require_same_dim(other)?;
        Ok((self.coords.transpose() * &other.coords).norm_squared())
    }

    /// True when every element of `self` lies in `other`.
    pub fn is_subalgebra_of(&self, other: &OperatorAlgebra) -> bool {
        self.basis.iter().all(|b| other.contains(b))
    }

    pub fn random_hermitian(&self, rng: &mut RngStream) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim, self.dim);
        for b in &self.basis {
            out += b.scale(rng.normal());
        }
        out
    }

    pub fn random_element(&self, rng: &mut RngStream) -> CMatrix {
        let re = self.random_hermitian(rng);
        let im = self.random_hermitian(rng);
        re + im * c64(0.0, 1.0)
    }

    /// Central-block decomposition, computed on first use.
    pub fn decomposition(&self) -> Result<&StructuralDecomposition> {
        if let Some(d) = self.decomposition.get() {
            return Ok(d);
        }
        let dec = structure::decompose(self)?;
        let _ = self.decomposition.set(dec);
        Ok(self.decomposition.get().expect("just set"))
    }

    /// Copy without cached structure; forces the generic decomposition path.
    pub fn without_cached_structure(&self) -> OperatorAlgebra {
        OperatorAlgebra::from_coords(self.dim, self.coords.clone())
    }

    pub(crate) fn with_structure(
        self,
        decomposition: StructuralDecomposition,
        commutant: Option<OperatorAlgebra>,
    ) -> Self {
        let _ = self.decomposition.set(decomposition);
        if let Some(c) = commutant {
            let _ = self.commutant.set(Box::new(c));
        }
        self
    }

    pub fn summary(&self) -> Result<StructuralSummary> {
        Ok(self.decomposition()?.summary())
    }

    pub(crate) fn require_same_dim(&self, other: &OperatorAlgebra) -> Result<()> {
        if self.dim != other.dim {
            return Err(ManError::DimensionMismatch {
                left: self.dim,
                right: other.dim,
            });
        }
        Ok(())
    }
}
