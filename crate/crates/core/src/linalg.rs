//! Dense complex matrix helpers: Hilbert–Schmidt geometry, tensor-factor
//! utilities (swaps, partial traces) and the spectral primitives used by the
//! algebra code.
//!
//! Matrices are `nalgebra::DMatrix<Complex64>`. Whenever a matrix is flattened
//! into a vector the flattening is row-major (`vec(X)[i*d + j] = X[i][j]`), so
//! the map `X -> A X B^dagger` has transfer matrix `A ⊗ conj(B)`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{ManError, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;
pub type RMatrix = DMatrix<f64>;

/// Relative singular-value threshold below which a direction counts as zero.
pub const RANK_TOL: f64 = 1e-9;

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn dagger(m: &CMatrix) -> CMatrix {
    m.adjoint()
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// `Tr(A† B)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> Result<C64> {
    if a.shape() != b.shape() {
        return Err(ManError::ShapeMismatch(format!(
            "{:?} vs {:?}",
            a.shape(),
            b.shape()
        )));
    }
    Ok(a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum())
}

pub fn hs_norm_sq(a: &CMatrix) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum()
}

/// `Tr(A B)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn commutator(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a * b - b * a
}

/// Frobenius distance of `U† U` from the identity.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    if !u.is_square() {
        return f64::INFINITY;
    }
    let n = u.nrows();
    (u.adjoint() * u - identity(n)).norm()
}

pub fn require_unitary(u: &CMatrix, tol: f64) -> Result<()> {
    let defect = unitarity_defect(u);
    if defect > tol {
        return Err(ManError::NotUnitary(defect));
    }
    Ok(())
}

pub fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Eigen-decomposition of a hermitian matrix, eigenvalues ascending.
pub fn eigh(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    let eig = SymmetricEigen::new(hermitian_part(m));
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Groups ascending values into clusters; a gap larger than
/// `rel_gap * (max - min)` starts a new cluster.
pub fn cluster_sorted(values: &[f64], rel_gap: f64) -> Vec<std::ops::Range<usize>> {
    if values.is_empty() {
        return Vec::new();
    }
    let range = values[values.len() - 1] - values[0];
    let tol = rel_gap * range;
    let mut clusters = Vec::new();
    let mut start = 0;
    for i in 1..values.len() {
        if values[i] - values[i - 1] > tol {
            clusters.push(start..i);
            start = i;
        }
    }
    clusters.push(start..values.len());
    clusters
}

/// Trace norm of a hermitian matrix.
pub fn trace_norm_hermitian(m: &CMatrix) -> f64 {
    eigh(m).0.iter().map(|x| x.abs()).sum()
}

/// Unitary factor of the polar decomposition together with the extreme
/// singular values of `k`.
pub fn polar_unitary(k: &CMatrix) -> (CMatrix, f64, f64) {
    let svd = k.clone().svd(true, true);
    let u = svd.u.expect("requested U");
    let v_t = svd.v_t.expect("requested V^T");
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let min = svd
        .singular_values
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    (u * v_t, min, max)
}

/// Row-major flattening.
pub fn vec_row(m: &CMatrix) -> CVector {
    let (r, c) = m.shape();
    CVector::from_iterator(r * c, (0..r).flat_map(|i| (0..c).map(move |j| m[(i, j)])))
}

pub fn unvec_row(v: &[C64], rows: usize, cols: usize) -> CMatrix {
    CMatrix::from_row_slice(rows, cols, v)
}

/// Real coordinates of a hermitian matrix in an orthonormal basis of the real
/// space of hermitian matrices (diagonal units, then `√2·Re`, `√2·Im` of the
/// strict upper triangle). The map is an isometry for the HS inner product.
pub fn herm_coords(h: &CMatrix) -> DVector<f64> {
    let d = h.nrows();
    let mut out = DVector::zeros(d * d);
    let s2 = std::f64::consts::SQRT_2;
    for i in 0..d {
        out[i] = h[(i, i)].re;
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = (h[(i, j)] + h[(j, i)].conj()) * 0.5;
            out[k] = s2 * z.re;
            out[k + 1] = s2 * z.im;
            k += 2;
        }
    }
    out
}

pub fn from_herm_coords(c: &[f64], d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    let r = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..d {
        m[(i, i)] = c64(c[i], 0.0);
    }
    let mut k = d;
    for i in 0..d {
        for j in (i + 1)..d {
            let z = c64(c[k] * r, c[k + 1] * r);
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Orthonormal basis (columns) of the null space of a real matrix.
pub fn real_null_space(m: &RMatrix) -> RMatrix {
    let n = m.ncols();
    let padded;
    let m = if m.nrows() < n {
        padded = {
            let mut p = RMatrix::zeros(n, n);
            p.view_mut((0, 0), (m.nrows(), n)).copy_from(m);
            p
        };
        &padded
    } else {
        m
    };
    let svd = m.clone().svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s <= RANK_TOL * smax || smax == 0.0)
        .map(|(i, _)| v_t.row(i).transpose())
        .collect();
    if cols.is_empty() {
        RMatrix::zeros(n, 0)
    } else {
        RMatrix::from_columns(&cols)
    }
}

/// Orthonormal basis (columns) of the column space of a real matrix.
pub fn real_range(m: &RMatrix) -> RMatrix {
    let rows = m.nrows();
    if m.ncols() == 0 {
        return RMatrix::zeros(rows, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return RMatrix::zeros(rows, 0);
    }
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOL * smax)
        .map(|(i, _)| u.column(i).into_owned())
        .collect();
    RMatrix::from_columns(&cols)
}

/// Orthonormal basis of `span ∩ other` for two real subspaces given by
/// orthonormal columns.
pub fn real_intersection(a: &RMatrix, b: &RMatrix) -> RMatrix {
    let rows = a.nrows();
    if a.ncols() == 0 || b.ncols() == 0 {
        return RMatrix::zeros(rows, 0);
    }
    let overlap = a.transpose() * b;
    let svd = overlap.svd(true, false);
    let u = svd.u.expect("requested U");
    let cols: Vec<_> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= 1.0 - 1e-8)
        .map(|(i, _)| a * u.column(i))
        .collect();
    if cols.is_empty() {
        RMatrix::zeros(rows, 0)
    } else {
        real_range(&RMatrix::from_columns(&cols))
    }
}

fn require_common_shape(span: &[CMatrix]) -> Result<(usize, usize)> {
    let first = span
        .first()
        .ok_or_else(|| ManError::EmptyInput("no matrices to orthonormalize".into()))?;
    let shape = first.shape();
    if let Some(bad) = span.iter().find(|m| m.shape() != shape) {
        return Err(ManError::ShapeMismatch(format!(
            "{:?} vs {:?}",
            shape,
            bad.shape()
        )));
    }
    Ok(shape)
}

/// HS-orthonormal basis of the complex span of `span`.
pub fn orthonormalize_hs(span: &[CMatrix]) -> Result<Vec<CMatrix>> {
    let (r, c) = require_common_shape(span)?;
    let stacked = CMatrix::from_columns(&span.iter().map(vec_row).collect::<Vec<_>>());
    let svd = stacked.svd(true, false);
    let u = svd.u.expect("requested U");
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if smax == 0.0 {
        return Err(ManError::EmptyInput("all input matrices are zero".into()));
    }
    Ok(svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s > RANK_TOL * smax)
        .map(|(i, _)| unvec_row(u.column(i).as_slice(), r, c))
        .collect())
}

/// Hermitian HS-orthonormal basis for the span of `{X, X†}` over all inputs,
/// returned as real coordinates (columns of the result, see [`herm_coords`]).
pub fn hermitian_span_coords(span: &[CMatrix]) -> Result<RMatrix> {
    let (r, c) = require_common_shape(span)?;
    if r != c {
        return Err(ManError::ShapeMismatch(format!("non-square {r}x{c}")));
    }
    let mut cols = Vec::with_capacity(2 * span.len());
    for x in span {
        let xd = x.adjoint();
        cols.push(herm_coords(&((x + &xd).scale(0.5))));
        cols.push(herm_coords(&((x - &xd) * c64(0.0, -0.5))));
    }
    let range = real_range(&RMatrix::from_columns(&cols));
    if range.ncols() == 0 {
        return Err(ManError::EmptyInput("all input matrices are zero".into()));
    }
    Ok(range)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for i in (0..dims.len().saturating_sub(1)).rev() {
        s[i] = s[i + 1] * dims[i + 1];
    }
    s
}

fn digits(mut index: usize, dims: &[usize], out: &mut [usize]) {
    for k in (0..dims.len()).rev() {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

fn check_region(region: &[usize], sites: usize) -> Result<()> {
    match region.iter().find(|&&i| i >= sites) {
        Some(&index) => Err(ManError::InvalidRegion { index, sites }),
        None => Ok(()),
    }
}

/// Region swap `T_S` on `(⊗_i H_i)^{⊗2}`: exchanges the two copies of every
/// factor listed in `region` (0-based) and acts trivially on the rest.
/// The first copy occupies the leading tensor slots.
pub fn swap_operator(dims: &[usize], region: &[usize]) -> Result<CMatrix> {
    if dims.is_empty() {
        return Err(ManError::EmptyInput("no tensor factors".into()));
    }
    if dims.contains(&0) {
        return Err(ManError::ZeroDimension);
    }
    check_region(region, dims.len())?;
    let n = dims.len();
    let doubled: Vec<usize> = dims.iter().chain(dims.iter()).cloned().collect();
    let st = strides(&doubled);
    let total: usize = doubled.iter().product();
    let mut m = CMatrix::zeros(total, total);
    let mut dig = vec![0; 2 * n];
    for col in 0..total {
        digits(col, &doubled, &mut dig);
        for &i in region {
            dig.swap(i, n + i);
        }
        let row: usize = dig.iter().zip(&st).map(|(a, b)| a * b).sum();
        m[(row, col)] = c64(1.0, 0.0);
    }
    Ok(m)
}

/// Partial trace keeping the factors listed in `keep` (0-based, in their
/// original order).
pub fn partial_trace(m: &CMatrix, dims: &[usize], keep: &[usize]) -> Result<CMatrix> {
    if dims.is_empty() {
        return Err(ManError::EmptyInput("no tensor factors".into()));
    }
    check_region(keep, dims.len())?;
    let total: usize = dims.iter().product();
    if m.nrows() != total || m.ncols() != total {
        return Err(ManError::ShapeMismatch(format!(
            "matrix {:?} vs product dimension {}",
            m.shape(),
            total
        )));
    }
    let mut kept: Vec<usize> = keep.to_vec();
    kept.sort_unstable();
    kept.dedup();
    let kdims: Vec<usize> = kept.iter().map(|&i| dims[i]).collect();
    let kst = strides(&kdims);
    let kd: usize = kdims.iter().product();
    let mut out = CMatrix::zeros(kd, kd);
    let mut rdig = vec![0; dims.len()];
    let mut cdig = vec![0; dims.len()];
    for row in 0..total {
        digits(row, dims, &mut rdig);
        let r: usize = kept.iter().zip(&kst).map(|(&f, s)| rdig[f] * s).sum();
        for col in 0..total {
            digits(col, dims, &mut cdig);
            let traced_match = (0..dims.len())
                .filter(|i| !kept.contains(i))
                .all(|i| rdig[i] == cdig[i]);
            if traced_match {
                let c: usize = kept.iter().zip(&kst).map(|(&f, s)| cdig[f] * s).sum();
                out[(r, c)] += m[(row, col)];
            }
        }
    }
    Ok(out)
}

/// `Tr(S M)` for the swap `S` on `C^d ⊗ C^d`.
pub fn swap_trace(m: &CMatrix, d: usize) -> C64 {
    let mut acc = c64(0.0, 0.0);
    for i in 0..d {
        for j in 0..d {
            acc += m[(j * d + i, i * d + j)];
        }
    }
    acc
}
