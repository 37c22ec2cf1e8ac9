//! Closed forms for MAN in terms of projections and structural data.

use serde::{Deserialize, Serialize};

use super::{LogBase, ManBounds, ManReport, Method};
use crate::algebra::{basis_to_unitary, OperatorAlgebra};
use crate::error::{ManError, Result};
use crate::linalg::{c64, herm_coords, require_unitary, CMatrix, CVector, RMatrix};

/// `Σ_k ||P(x_k)||²` for the HS projection onto the span of the hermitian
/// coordinate columns `coords`.
pub(crate) fn projected_weight(xs: &[CMatrix], coords: &RMatrix) -> f64 {
    let mut total = 0.0;
    for x in xs {
        let xd = x.adjoint();
        let re = herm_coords(&((x + &xd).scale(0.5)));
        let im = herm_coords(&((x - &xd) * c64(0.0, -0.5)));
        total += (coords.transpose() * re).norm_squared();
        total += (coords.transpose() * im).norm_squared();
    }
    total
}

/// `1 - (1/d) Σ_α ||P_{B'}(e_α)||²` with `e_α` the matrix-unit basis of `A`.
pub(crate) fn projection_value(a: &OperatorAlgebra, b: &OperatorAlgebra) -> Result<f64> {
    a.require_same_dim(b)?;
    let e = a.decomposition()?.block_bases().e;
    let weight = projected_weight(&e, b.commutant().coords());
    Ok(1.0 - weight / a.dim() as f64)
}

pub fn man_projection(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    base: LogBase,
) -> Result<ManReport> {
    let raw = projection_value(a, b)?;
    ManReport::new(raw, Method::Projection, base)?.with_summaries(&[a, b])
}

fn require_collinear(a: &OperatorAlgebra) -> Result<()> {
    if a.decomposition()?.is_collinear().collinear {
        Ok(())
    } else {
        Err(ManError::NotCollinear)
    }
}

/// `S = 1 - Tr_HS(P_A P_{B'})/d(A)` for collinear `A`. When `d(A) = d(B')`
/// the distance form `||P_A - P_{B'}||²/(2 d(A))` is attached as a check.
pub fn man_collinear(a: &OperatorAlgebra, b: &OperatorAlgebra, base: LogBase) -> Result<ManReport> {
    a.require_same_dim(b)?;
    require_collinear(a)?;
    let bp = b.commutant();
    let da = a.algebra_dim() as f64;
    let raw = 1.0 - a.projection_overlap(&bp)? / da;
    let mut report = ManReport::new(raw, Method::Collinear, base)?.with_summaries(&[a, b])?;
    if a.algebra_dim() == bp.algebra_dim() {
        let dist = a.projector_distance(&bp);
        report = report.with_check(Method::CollinearDistance.as_str(), dist * dist / (2.0 * da));
    }
    Ok(report)
}

/// `NC(A) = 1 - (1/d) Σ_J n_J/d_J`, with the collinear form, the irrep
/// mean and both upper bounds attached as checks.
pub fn self_man(a: &OperatorAlgebra, base: LogBase) -> Result<ManReport> {
    let dec = a.decomposition()?;
    let d = a.dim() as f64;
    let ratio_sum: f64 = dec
        .blocks()
        .iter()
        .map(|b| b.multiplicity as f64 / b.irrep_dim as f64)
        .sum();
    let nc = 1.0 - ratio_sum / d;
    // Σ_J p_J ||R_J||², R_J = (1/d_J)^{⊗2}
    let purity: f64 = dec
        .blocks()
        .iter()
        .map(|b| {
            let p = (b.multiplicity * b.irrep_dim) as f64 / d;
            p / (b.irrep_dim * b.irrep_dim) as f64
        })
        .sum();
    let irrep_mean: f64 = dec
        .blocks()
        .iter()
        .map(|b| {
            let p = (b.multiplicity * b.irrep_dim) as f64 / d;
            p * (1.0 - 1.0 / (b.irrep_dim * b.irrep_dim) as f64)
        })
        .sum();
    let dmax = dec.max_irrep_dim() as f64;
    let mut report = ManReport::new(nc, Method::SelfMan, base)?
        .with_summaries(&[a])?
        .with_check("nc2-structural", -base.log(purity))
        .with_check("irrep-mean", irrep_mean)
        .with_check("max-irrep-bound", 1.0 - 1.0 / (dmax * dmax))
        .with_check("ambient-bound", 1.0 - 1.0 / (d * d))
        .with_check("nc2-irrep-bound", base.log(dmax * dmax));
    if dec.is_collinear().collinear {
        let coll = 1.0 - dec.center_dim() as f64 / dec.algebra_dim() as f64;
        report = report.with_check(Method::SelfManCollinear.as_str(), coll);
    }
    Ok(report)
}

pub fn man_bounds(a: &OperatorAlgebra, b: &OperatorAlgebra, base: LogBase) -> Result<ManBounds> {
    a.require_same_dim(b)?;
    let d2 = (a.dim() * a.dim()) as f64;
    let dap = a.decomposition()?.commutant_dim() as f64;
    let dbp = b.decomposition()?.commutant_dim() as f64;
    let (da, db) = (a.algebra_dim() as f64, b.algebra_dim() as f64);
    let widest = dap.max(dbp);
    let smallest = da.min(db);
    let (intersection_bound, intersection_log_bound) =
        if a.decomposition()?.is_collinear().collinear {
            let inter = a.intersection(&b.commutant())?.algebra_dim() as f64;
            (Some(1.0 - inter / da), Some(base.log(da / inter)))
        } else {
            (None, None)
        };
    Ok(ManBounds {
        commutant_bound: 1.0 - widest / d2,
        commutant_log_bound: base.log(d2) - base.log(widest),
        weak_bound: 1.0 - 1.0 / smallest,
        weak_log_bound: base.log(smallest),
        intersection_bound,
        intersection_log_bound,
    })
}

/// `S(X : L(H)) = 1 - d(X')/d²`.
pub fn fraction_man(a: &OperatorAlgebra) -> Result<f64> {
    let d2 = (a.dim() * a.dim()) as f64;
    Ok(1.0 - a.decomposition()?.commutant_dim() as f64 / d2)
}

/// `E_U S(A : U(B)) = S(A:L) S(B:L) / S(L:L)`.
pub fn orbit_averaged_man(a: &OperatorAlgebra, b: &OperatorAlgebra) -> Result<f64> {
    a.require_same_dim(b)?;
    let d = a.dim() as f64;
    if a.dim() < 2 {
        return Err(ManError::InvalidArgument(
            "orbit average needs dimension at least 2".into(),
        ));
    }
    let full = 1.0 - 1.0 / (d * d);
    Ok(fraction_man(a)? * fraction_man(b)? / full)
}

pub fn orbit_averaged_report(
    a: &OperatorAlgebra,
    b: &OperatorAlgebra,
    base: LogBase,
) -> Result<ManReport> {
    let v = orbit_averaged_man(a, b)?;
    ManReport::new(v, Method::OrbitAveraged, base)?.with_summaries(&[a, b])
}

fn uniform_site_dim(site_dims: &[usize]) -> Result<usize> {
    let first = *site_dims
        .first()
        .ok_or_else(|| ManError::EmptyInput("no lattice sites".into()))?;
    if first == 0 {
        return Err(ManError::ZeroDimension);
    }
    if site_dims.iter().any(|&x| x != first) {
        return Err(ManError::NonUniformSites);
    }
    Ok(first)
}

fn check_region(region: &[usize], sites: usize) -> Result<()> {
    match region.iter().find(|&&i| i >= sites) {
        Some(&index) => Err(ManError::InvalidRegion { index, sites }),
        None => Ok(()),
    }
}

fn count_distinct(region: &[usize], keep: impl Fn(usize) -> bool) -> usize {
    let mut r: Vec<usize> = region.iter().cloned().filter(|&i| keep(i)).collect();
    r.sort_unstable();
    r.dedup();
    r.len()
}

/// Closed forms on a lattice of identical sites (0-based regions):
/// `S = 1 - d^{-2|S1∩S2|}`, `S₂ = c_d |S1∩S2|`, with the conditional value
/// `S₂(A_{S1}|A_{S2}) = c_d |S1∖S2|` and `NC(A_{S1})` attached.
pub fn lattice_man(
    site_dims: &[usize],
    s1: &[usize],
    s2: &[usize],
    base: LogBase,
) -> Result<ManReport> {
    let ds = uniform_site_dim(site_dims)? as f64;
    check_region(s1, site_dims.len())?;
    check_region(s2, site_dims.len())?;
    let overlap = count_distinct(s1, |i| s2.contains(&i));
    let only_first = count_distinct(s1, |i| !s2.contains(&i));
    let size1 = count_distinct(s1, |_| true);
    let cd = base.log(ds * ds);
    let s = 1.0 - ds.powi(-2 * overlap as i32);
    let mut report = ManReport::new(s, Method::Lattice, base)?;
    report.s2 = cd * overlap as f64;
    Ok(report
        .with_check("c_d", cd)
        .with_check("conditional-s2", cd * only_first as f64)
        .with_check("conditional-s", 1.0 - ds.powi(-2 * only_first as i32))
        .with_check("nc-first", 1.0 - ds.powi(-2 * size1 as i32))
        .with_check("nc2-first", cd * size1 as f64))
}

/// Transition matrix `X_ij = |<i|j~>|²` between two orthonormal bases.
pub fn transition_matrix(basis: &[CVector], other: &[CVector]) -> Result<RMatrix> {
    let u = basis_to_unitary(basis)?;
    let v = basis_to_unitary(other)?;
    if u.nrows() != v.nrows() {
        return Err(ManError::DimensionMismatch {
            left: u.nrows(),
            right: v.nrows(),
        });
    }
    let overlaps = u.adjoint() * v;
    Ok(overlaps.map(|z| z.norm_sqr()))
}

/// `S = (1/d) Σ_i S_lin(p_i)` and `S₂ = -log((1/d) Σ_i ||p_i||²)` with
/// `p_i = (|<i|j~>|²)_j`.
pub fn masa_man(basis: &[CVector], other: &[CVector], base: LogBase) -> Result<ManReport> {
    let x = transition_matrix(basis, other)?;
    let d = x.nrows() as f64;
    let purity: f64 = x.row_iter().map(|r| r.norm_squared()).sum::<f64>() / d;
    let mut report = ManReport::new(1.0 - purity, Method::Masa, base)?;
    report.s2 = if purity > 0.0 {
        -base.log(purity)
    } else {
        f64::INFINITY
    };
    Ok(report)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantumnessReport {
    pub dim: usize,
    /// `Q = λ_max(1 - XᵀX)/d`.
    pub quantumness: f64,
    pub man: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
}

/// Relative quantumness as the top eigenvalue of `1 - XᵀX` over `d`, with
/// the sandwich `Q <= S <= d Q` checked against the MASA MAN.
pub fn quantumness(basis: &[CVector], other: &[CVector]) -> Result<QuantumnessReport> {
    let x = transition_matrix(basis, other)?;
    let n = x.nrows();
    let d = n as f64;
    let gram = RMatrix::identity(n, n) - x.transpose() * &x;
    let top = nalgebra::SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let q = (top / d).max(0.0);
    let man = masa_man(basis, other, LogBase::Two)?.s;
    let tol = 1e-12;
    Ok(QuantumnessReport {
        dim: n,
        quantumness: q,
        man,
        lower_holds: q <= man + tol,
        upper_holds: man <= d * q + tol,
    })
}

/// `G_A(U) = S(A : U(A'))`.
pub fn a_otoc(a: &OperatorAlgebra, u: &CMatrix, base: LogBase) -> Result<ManReport> {
    if u.shape() != (a.dim(), a.dim()) {
        return Err(ManError::ShapeMismatch(format!(
            "unitary {:?} for dimension {}",
            u.shape(),
            a.dim()
        )));
    }
    require_unitary(u, 1e-9)?;
    let evolved = a.commutant().conjugate(u)?;
    let raw = projection_value(a, &evolved)?;
    ManReport::new(raw, Method::AOtoc, base)?.with_summaries(&[a])
}

impl OperatorAlgebra {
    /// `S(A : B)` through the projection form, without report overhead.
    pub fn man_with(&self, other: &OperatorAlgebra) -> Result<f64> {
        projection_value(self, other).and_then(super::clamp_unit)
    }
}
