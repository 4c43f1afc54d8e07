//! Gaussian wave packets, their complexified Lagrangian manifolds, and the
//! saddle conditions shared by every propagation method.
//!
//! A packet is parametrized by a real phase-space center `(p, q)`, a real
//! symmetric positive-definite width matrix `b` and `hbar`:
//!
//! ```text
//! <x|alpha> = (2^D det b / pi^D)^(1/4) exp[-(x-q).b.(x-q) + (i/hbar) p.(x-q)]
//! ```
//!
//! Any complex point `(P, Q)` with `2b.Q + (i/hbar) P = 2b.q + (i/hbar) p`
//! reproduces the same spatial dependence; the normalization and phase are
//! restored by the factors [`f_minus`] (ket side) and [`f_plus`] (bra side).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub(crate) const I: C64 = C64::new(0.0, 1.0);

/// A unit-normalized Gaussian wave packet.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianPacket {
    center_p: DVector<f64>,
    center_q: DVector<f64>,
    b: DMatrix<f64>,
    hbar: f64,
}

impl GaussianPacket {
    pub fn new(
        center_p: DVector<f64>,
        center_q: DVector<f64>,
        b: DMatrix<f64>,
        hbar: f64,
    ) -> Result<Self> {
        let d = center_q.len();
        if d == 0 {
            return Err(Error::InvalidPacket("zero-dimensional packet".into()));
        }
        if center_p.len() != d {
            return Err(Error::DimensionMismatch { expected: d, found: center_p.len() });
        }
        if b.nrows() != d || b.ncols() != d {
            return Err(Error::DimensionMismatch { expected: d, found: b.nrows() });
        }
        if !(hbar.is_finite() && hbar > 0.0) {
            return Err(Error::InvalidPacket(format!("hbar must be positive, got {hbar}")));
        }
        let scale = b.amax().max(f64::MIN_POSITIVE);
        if (&b - b.transpose()).amax() > 1e-12 * scale {
            return Err(Error::InvalidPacket("width matrix is not symmetric".into()));
        }
        if b.clone().cholesky().is_none() {
            return Err(Error::InvalidPacket("width matrix is not positive definite".into()));
        }
        Ok(Self { center_p, center_q, b, hbar })
    }

    /// One-dimensional packet with width parameter `b = 1/(4 sigma^2)`.
    pub fn new_1d(p: f64, q: f64, b: f64, hbar: f64) -> Result<Self> {
        Self::new(
            DVector::from_element(1, p),
            DVector::from_element(1, q),
            DMatrix::from_element(1, 1, b),
            hbar,
        )
    }

    /// Kicked-rotor packet at Hilbert dimension `n`: `2 pi hbar n = 1` and
    /// `1/b = 4 sigma^2 = 2 hbar`, so position and momentum widths are equal.
    pub fn rotor(p: f64, q: f64, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidArgument(format!("Hilbert dimension must be >= 2, got {n}")));
        }
        let hbar = rotor_hbar(n);
        Self::new_1d(p, q, 1.0 / (2.0 * hbar), hbar)
    }

    pub fn dim(&self) -> usize {
        self.center_q.len()
    }

    pub fn center_p(&self) -> &DVector<f64> {
        &self.center_p
    }

    pub fn center_q(&self) -> &DVector<f64> {
        &self.center_q
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn b_inverse(&self) -> DMatrix<f64> {
        self.b.clone().cholesky().expect("validated positive definite").inverse()
    }

    /// `(2^D det b / pi^D)^(1/4)`.
    pub fn normalization(&self) -> f64 {
        let d = self.dim() as i32;
        (2f64.powi(d) * self.b.determinant() / PI.powi(d)).powf(0.25)
    }

    /// Position width `sigma` of a one-dimensional packet (`b = 1/(4 sigma^2)`).
    pub fn sigma(&self) -> f64 {
        (0.25 / self.b[(0, 0)]).sqrt()
    }

    /// Momentum width `hbar / (2 sigma)` of a one-dimensional packet.
    pub fn sigma_p(&self) -> f64 {
        self.hbar / (2.0 * self.sigma())
    }

    /// The same packet moved to `(p + dp, q + dq)`.
    pub fn shifted(&self, dp: &DVector<f64>, dq: &DVector<f64>) -> Self {
        Self {
            center_p: &self.center_p + dp,
            center_q: &self.center_q + dq,
            b: self.b.clone(),
            hbar: self.hbar,
        }
    }

    /// The same packet shape and center at a different `hbar`, with `b`
    /// rescaled as `1/hbar` so the phase-space shape is unchanged.
    pub fn rescaled_hbar(&self, hbar: f64) -> Result<Self> {
        Self::new(
            self.center_p.clone(),
            self.center_q.clone(),
            &self.b * (self.hbar / hbar),
            hbar,
        )
    }
}

/// `hbar` of the quantized rotor at Hilbert dimension `n`.
pub fn rotor_hbar(n: usize) -> f64 {
    1.0 / (2.0 * PI * n as f64)
}

/// A point of complexified phase space.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexPhasePoint {
    pub p: DVector<C64>,
    pub q: DVector<C64>,
}

impl ComplexPhasePoint {
    pub fn new(p: DVector<C64>, q: DVector<C64>) -> Self {
        assert_eq!(p.len(), q.len(), "phase point components must share a dimension");
        Self { p, q }
    }

    pub fn new_1d(p: C64, q: C64) -> Self {
        Self::new(DVector::from_element(1, p), DVector::from_element(1, q))
    }

    pub fn from_real(p: &DVector<f64>, q: &DVector<f64>) -> Self {
        Self::new(p.map(C64::from), q.map(C64::from))
    }

    pub fn dim(&self) -> usize {
        self.q.len()
    }

    /// Largest imaginary component magnitude.
    pub fn max_imag(&self) -> f64 {
        self.p.iter().chain(self.q.iter()).fold(0.0, |m, z| m.max(z.im.abs()))
    }

    pub fn is_real(&self) -> bool {
        self.max_imag() == 0.0
    }

    pub fn real_p(&self) -> DVector<f64> {
        self.p.map(|z| z.re)
    }

    pub fn real_q(&self) -> DVector<f64> {
        self.q.map(|z| z.re)
    }

    /// Max-norm distance between two points.
    pub fn distance(&self, other: &Self) -> f64 {
        (&self.p - &other.p)
            .iter()
            .chain((&self.q - &other.q).iter())
            .fold(0.0, |m, z| m.max(z.norm()))
    }
}

/// Saddle-condition residuals at the two ends of a candidate trajectory.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualPair {
    pub c0: DVector<C64>,
    pub ct: DVector<C64>,
}

impl ResidualPair {
    /// `max(|C0|, |Ct|)` in the raw units of the constraint (inverse length).
    pub fn norm(&self) -> f64 {
        self.c0.norm().max(self.ct.norm())
    }

    /// Residual expressed as a phase-space distance: `hbar * max(|C0|, |Ct|)`.
    ///
    /// When `2 hbar b = 1` this is `|(Q - q) + i(P - p)|`, independent of
    /// `hbar`, which makes it the natural convergence measure.
    pub fn scaled_norm(&self, hbar: f64) -> f64 {
        hbar * self.norm()
    }
}

fn check_dim(packet: &GaussianPacket, d: usize) -> Result<()> {
    if packet.dim() != d {
        return Err(Error::DimensionMismatch { expected: packet.dim(), found: d });
    }
    Ok(())
}

fn real_quad(v: &DVector<f64>, m: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    v.dot(&(m * w))
}

/// `<x|alpha>`.
pub fn packet_evaluate(packet: &GaussianPacket, x: &DVector<f64>) -> C64 {
    let dx = x - packet.center_q();
    let exponent = C64::new(
        -real_quad(&dx, packet.b(), &dx),
        packet.center_p().dot(&dx) / packet.hbar(),
    );
    packet.normalization() * exponent.exp()
}

/// Point of the ket manifold of `packet` with position `q`.
pub fn manifold_point(packet: &GaussianPacket, q: &DVector<C64>) -> ComplexPhasePoint {
    let b = packet.b().map(C64::from);
    let offset = q - packet.center_q().map(C64::from);
    let p = packet.center_p().map(C64::from) + (b * offset) * (2.0 * packet.hbar() * I);
    ComplexPhasePoint::new(p, q.clone())
}

/// The terms shared by both normalization factors; `sign` is `-1` for the
/// ket and `+1` for the bra.
fn norm_factor(packet: &GaussianPacket, point: &ComplexPhasePoint, sign: f64) -> C64 {
    let hbar = packet.hbar();
    let b_inv = packet.b_inverse();
    let pr = point.p.map(|z| z.re);
    let pi = point.p.map(|z| z.im);
    let qi = point.q.map(|z| z.im);
    let phase = real_quad(&pr, &b_inv, &pi) / (2.0 * hbar * hbar);
    let damping = -real_quad(&pi, &b_inv, &pi) / (4.0 * hbar * hbar)
        - real_quad(&qi, packet.b(), &qi)
        + sign * pr.dot(&qi) / hbar;
    C64::new(damping, phase)
}

/// Ket-side factor `F-` restoring normalization and phase when `point0`
/// (a point of the ket manifold) is used as the packet's complex center.
pub fn f_minus(alpha: &GaussianPacket, point0: &ComplexPhasePoint) -> C64 {
    norm_factor(alpha, point0, -1.0)
}

/// Bra-side factor `F+`; differs from [`f_minus`] in the sign of the
/// `Re P . Im Q / hbar` term.
pub fn f_plus(beta: &GaussianPacket, point_t: &ComplexPhasePoint) -> C64 {
    norm_factor(beta, point_t, 1.0)
}

/// `-Re F-`: a diagnostic measure of how far a ket-manifold point is from
/// being real. Zero on real points.
pub fn ket_complexity(alpha: &GaussianPacket, point0: &ComplexPhasePoint) -> f64 {
    -f_minus(alpha, point0).re
}

/// `-Re F+` for a bra-manifold point.
pub fn bra_complexity(beta: &GaussianPacket, point_t: &ComplexPhasePoint) -> f64 {
    -f_plus(beta, point_t).re
}

/// `<x|alpha>` written around a complex center `point0` of the ket
/// manifold, with the coefficient `normalization * exp(F-)`.
pub fn ket_from_complex_center(
    alpha: &GaussianPacket,
    point0: &ComplexPhasePoint,
    x: &DVector<f64>,
) -> C64 {
    let b = alpha.b().map(C64::from);
    let dx = x.map(C64::from) - &point0.q;
    let quad = dx.dot(&(&b * &dx));
    let lin = point0.p.dot(&dx);
    let coefficient = alpha.normalization() * f_minus(alpha, point0).exp();
    coefficient * (-quad + I * lin / alpha.hbar()).exp()
}

/// `<beta|x>` written around a complex center `point_t` of the bra
/// manifold, with the coefficient `normalization * exp(F+)`.
pub fn bra_from_complex_center(
    beta: &GaussianPacket,
    point_t: &ComplexPhasePoint,
    x: &DVector<f64>,
) -> C64 {
    let b = beta.b().map(C64::from);
    let dx = x.map(C64::from) - &point_t.q;
    let quad = dx.dot(&(&b * &dx));
    let lin = point_t.p.dot(&dx);
    let coefficient = beta.normalization() * f_plus(beta, point_t).exp();
    coefficient * (-quad - I * lin / beta.hbar()).exp()
}

/// Saddle residuals: `C0` measures distance of `point0` from the ket
/// manifold of `alpha`, `Ct` distance of `point_t` from the bra manifold of
/// `beta`.
pub fn residuals(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    point0: &ComplexPhasePoint,
    point_t: &ComplexPhasePoint,
) -> ResidualPair {
    let c0 = constraint(alpha, point0, 1.0);
    let ct = constraint(beta, point_t, -1.0);
    ResidualPair { c0, ct }
}

fn constraint(packet: &GaussianPacket, point: &ComplexPhasePoint, sign: f64) -> DVector<C64> {
    let b = packet.b().map(C64::from);
    let dq = &point.q - packet.center_q().map(C64::from);
    let dp = &point.p - packet.center_p().map(C64::from);
    (b * dq) * C64::from(2.0) + dp * (sign * I / packet.hbar())
}

/// Closed-form `<beta|alpha>`.
pub fn gaussian_overlap(alpha: &GaussianPacket, beta: &GaussianPacket) -> Result<C64> {
    check_dim(beta, alpha.dim())?;
    if (alpha.hbar() - beta.hbar()).abs() > 1e-15 * alpha.hbar() {
        return Err(Error::InvalidArgument("packets must share hbar".into()));
    }
    let hbar = alpha.hbar();
    let d = alpha.dim() as i32;
    let (ba, bb) = (alpha.b(), beta.b());
    let (qa, qb) = (alpha.center_q(), beta.center_q());
    let (pa, pb) = (alpha.center_p(), beta.center_p());

    // integrand exp[-x.A.x + c.x + d]
    let a = ba + bb;
    let c: DVector<C64> = (ba * qa + bb * qb).map(|v| C64::from(2.0 * v))
        + (pa - pb).map(|v| I * v / hbar);
    let d0 = C64::new(
        -real_quad(qa, ba, qa) - real_quad(qb, bb, qb),
        -(pa.dot(qa) - pb.dot(qb)) / hbar,
    );
    let a_inv = a.clone().cholesky().expect("sum of positive-definite matrices").inverse();
    let a_inv_c = a_inv.map(C64::from) * &c;
    let gauss = (PI.powi(d) / a.determinant()).sqrt();
    Ok(alpha.normalization()
        * beta.normalization()
        * gauss
        * (c.dot(&a_inv_c) / 4.0 + d0).exp())
}
