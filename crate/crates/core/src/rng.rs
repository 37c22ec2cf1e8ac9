//! Counter-based random streams and Haar sampling.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use crate::error::{ManError, Result};
use crate::linalg::{c64, CMatrix, CVector};

/// A reproducible random stream identified by `(seed, stream)`.
///
/// Every Monte-Carlo sample draws from its own stream (the sample index), so
/// results do not depend on evaluation order or worker count.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    inner: ChaCha12Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut inner = ChaCha12Rng::seed_from_u64(seed);
        inner.set_stream(stream);
        Self {
            seed,
            stream,
            inner,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    pub fn normal(&mut self) -> f64 {
        self.inner.sample(StandardNormal)
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Matrix with i.i.d. standard complex Gaussian entries (`E|z|^2 = 1`).
pub fn random_complex_matrix(rows: usize, cols: usize, rng: &mut RngStream) -> CMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    CMatrix::from_fn(rows, cols, |_, _| {
        let re = rng.normal();
        let im = rng.normal();
        c64(re * s, im * s)
    })
}

/// Haar-distributed unitary via QR of a Ginibre matrix, with the phases of
/// `diag(R)` moved into `Q`.
pub fn haar_unitary(d: usize, rng: &mut RngStream) -> Result<CMatrix> {
    if d == 0 {
        return Err(ManError::ZeroDimension);
    }
    let g = random_complex_matrix(d, d, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let rjj = r[(j, j)];
        let n = rjj.norm();
        let phase = if n > 0.0 { rjj / n } else { c64(1.0, 0.0) };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    Ok(q)
}

/// Haar-random pure state (normalized complex Gaussian vector).
pub fn haar_state(d: usize, rng: &mut RngStream) -> Result<CVector> {
    if d == 0 {
        return Err(ManError::ZeroDimension);
    }
    let v = random_complex_matrix(d, 1, rng).column(0).into_owned();
    let n = v.norm();
    Ok(v.unscale(n))
}
