//! Frequently used matrices and bases.

use crate::linalg::{c64, CMatrix, CVector};

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(1., 0.), c64(1., 0.), c64(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(0., 0.), c64(0., -1.), c64(0., 1.), c64(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c64(1., 0.), c64(0., 0.), c64(0., 0.), c64(-1., 0.)])
}

pub fn hadamard() -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_row_slice(2, 2, &[c64(s, 0.), c64(s, 0.), c64(s, 0.), c64(-s, 0.)])
}

/// Discrete Fourier transform `F_{jk} = ω^{jk}/√d`.
pub fn fourier(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| {
        let theta = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
        c64(theta.cos() * norm, theta.sin() * norm)
    })
}

pub fn columns(u: &CMatrix) -> Vec<CVector> {
    u.column_iter().map(|c| c.into_owned()).collect()
}

pub fn computational_basis(d: usize) -> Vec<CVector> {
    columns(&CMatrix::identity(d, d))
}

/// Bell basis of two qubits: `(|00>±|11>)/√2`, `(|01>±|10>)/√2`.
pub fn bell_basis() -> Vec<CVector> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = |a: usize, b: usize, sign: f64| {
        let mut out = CVector::zeros(4);
        out[a] = c64(s, 0.);
        out[b] = c64(sign * s, 0.);
        out
    };
    vec![v(0, 3, 1.0), v(0, 3, -1.0), v(1, 2, 1.0), v(1, 2, -1.0)]
}

/// Two-qudit swap gate on `C^d ⊗ C^d`.
pub fn swap_gate(d: usize) -> CMatrix {
    crate::linalg::swap_operator(&[d], &[0]).expect("d > 0")
}
