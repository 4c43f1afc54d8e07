//! Exact quantum kicked rotor on an `N`-dimensional torus Hilbert space.
//!
//! With `2 pi hbar N = 1` the position grid is `q_s = s / N`, `s = 1..=N`,
//! and one period is the Floquet matrix
//!
//! ```text
//! F_rs = (i N)^{-1/2} exp[i pi (r - s)^2 / N] exp[i N K cos(2 pi s / N) / (2 pi)]
//! ```

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::phase_space::{packet_evaluate, GaussianPacket, C64};

/// Torus images summed on each side of the grid when discretizing a packet.
pub const DEFAULT_IMAGE_CUTOFF: i64 = 1;

/// One-period propagator of the quantum kicked rotor.
#[derive(Clone, Debug)]
pub struct FloquetMatrix {
    n: usize,
    k: f64,
    entries: DMatrix<C64>,
}

/// Position-grid amplitudes of a torus state, normalized to one.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    pub amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(amplitudes: DVector<C64>) -> Self {
        Self { amplitudes }
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amplitudes.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amplitudes.dotc(&other.amplitudes)
    }
}

/// Builds the Floquet matrix for dimension `n` and kicking strength `k`.
///
/// The free-flight factor picks up `(-1)^n` when `r - s` shifts by `n`, so
/// odd dimensions quantize the torus with an antiperiodic boundary in
/// position. [`discretize_packet`] builds periodic states, which matches
/// the matrix only for even `n`.
pub fn floquet_matrix(n: usize, k: f64) -> Result<FloquetMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Hilbert-space dimension must be >= 2, got {n}")));
    }
    let nf = n as f64;
    let prefactor = C64::new(0.0, nf).sqrt().inv();
    let kick: Vec<C64> = (1..=n)
        .map(|s| C64::from_polar(1.0, nf * k / (2.0 * PI) * (2.0 * PI * s as f64 / nf).cos()))
        .collect();
    // the free-flight phase depends on (r - s)^2 mod 2N only
    let free: Vec<C64> = (0..2 * n)
        .map(|d| C64::from_polar(1.0, PI * ((d * d) % (2 * n)) as f64 / nf))
        .collect();
    let entries = DMatrix::from_fn(n, n, |r, s| prefactor * free[r.abs_diff(s)] * kick[s]);
    Ok(FloquetMatrix { n, k, entries })
}

impl FloquetMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn kick(&self) -> f64 {
        self.k
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    /// `F^t |state>`.
    pub fn propagate(&self, state: &StateVector, t: usize) -> StateVector {
        let mut v = state.amplitudes.clone();
        for _ in 0..t {
            v = &self.entries * v;
        }
        StateVector::new(v)
    }

    /// `(F^dagger)^t |state>`.
    pub fn propagate_backward(&self, state: &StateVector, t: usize) -> StateVector {
        let mut v = state.amplitudes.clone();
        for _ in 0..t {
            v = self.entries.ad_mul(&v);
        }
        StateVector::new(v)
    }

    /// `<beta| F^t |alpha>`.
    pub fn correlation(&self, alpha: &StateVector, beta: &StateVector, t: usize) -> C64 {
        beta.inner(&self.propagate(alpha, t))
    }

    /// `max |F^dagger F - I|` over entries.
    pub fn unitarity_defect(&self) -> f64 {
        let mut g = self.entries.ad_mul(&self.entries);
        for i in 0..self.n {
            g[(i, i)] -= C64::from(1.0);
        }
        g.iter().fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Position grid `q_s = s / N`.
pub fn grid(n: usize) -> impl Iterator<Item = f64> {
    (1..=n).map(move |s| s as f64 / n as f64)
}

/// Samples a one-dimensional packet on the torus grid, summing position
/// images `q_s + m` for `|m| <= DEFAULT_IMAGE_CUTOFF`, then renormalizes.
pub fn discretize_packet(packet: &GaussianPacket, n: usize) -> Result<StateVector> {
    discretize_packet_with(packet, n, DEFAULT_IMAGE_CUTOFF)
}

pub fn discretize_packet_with(packet: &GaussianPacket, n: usize, image_cutoff: i64) -> Result<StateVector> {
    if packet.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: packet.dim() });
    }
    if n < 2 {
        return Err(Error::InvalidArgument(format!("Hilbert-space dimension must be >= 2, got {n}")));
    }
    let amplitudes = DVector::from_iterator(
        n,
        grid(n).map(|q| {
            (-image_cutoff..=image_cutoff)
                .map(|m| packet_evaluate(packet, &DVector::from_element(1, q + m as f64)))
                .sum::<C64>()
        }),
    );
    let norm = amplitudes.norm();
    if !(norm > 0.0) {
        return Err(Error::InvalidPacket("packet vanishes on the grid".into()));
    }
    Ok(StateVector::new(amplitudes / C64::from(norm)))
}

/// `<beta| F^t |alpha>` with both packets discretized at dimension `n`.
pub fn quantum_correlation(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    t: usize,
    n: usize,
    k: f64,
) -> Result<C64> {
    let f = floquet_matrix(n, k)?;
    Ok(f.correlation(&discretize_packet(alpha, n)?, &discretize_packet(beta, n)?, t))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_have_uniform_modulus() {
        let f = floquet_matrix(37, 8.25).unwrap();
        let expected = 1.0 / 37f64.sqrt();
        assert!(f.entries().iter().all(|z| (z.norm() - expected).abs() < 1e-15));
    }

    #[test]
    fn matches_direct_formula() {
        let (n, k) = (11usize, 1.3);
        let f = floquet_matrix(n, k).unwrap();
        let nf = n as f64;
        let pre = C64::new(0.0, nf).sqrt().inv();
        for r in 1..=n {
            for s in 1..=n {
                let d = r as f64 - s as f64;
                let phase = PI * d * d / nf + nf * k / (2.0 * PI) * (2.0 * PI * s as f64 / nf).cos();
                let want = pre * C64::from_polar(1.0, phase);
                assert!((f.entries()[(r - 1, s - 1)] - want).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn principal_root_prefactor() {
        let f = floquet_matrix(4, 0.0).unwrap();
        // (4i)^{-1/2} = exp(-i pi / 4) / 2, and the diagonal carries no other phase
        let want = C64::from_polar(0.5, -PI / 4.0);
        assert!((f.entries()[(0, 0)] - want).norm() < 1e-15);
    }

    #[test]
    fn small_dimension_spectrum_on_unit_circle() {
        for (n, k) in [(16, 0.05), (64, 8.25), (128, 3.0)] {
            let f = floquet_matrix(n, k).unwrap();
            let schur = nalgebra::linalg::Schur::new(f.entries().clone());
            let (_, t) = schur.unpack();
            for i in 0..n {
                assert!((t[(i, i)].norm() - 1.0).abs() < 1e-10, "n={n} k={k}");
            }
        }
    }

    #[test]
    fn rejects_tiny_dimension() {
        assert!(floquet_matrix(1, 0.0).is_err());
    }

    #[test]
    fn discretized_packet_is_normalized() {
        let a = GaussianPacket::rotor(0.815, 0.2, 300).unwrap();
        let v = discretize_packet(&a, 300).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn distant_packets_are_orthogonal() {
        let a = GaussianPacket::rotor(0.0, 0.2, 700).unwrap();
        let b = GaussianPacket::rotor(0.0, 0.7, 700).unwrap();
        let va = discretize_packet(&a, 700).unwrap();
        let vb = discretize_packet(&b, 700).unwrap();
        assert!((va.inner(&va) - 1.0).norm() < 1e-14);
        assert!(va.inner(&vb).norm() < 1e-100);
    }
}
