//! Free particle `H = p^2 / 2m`: every semiclassical method is exact here,
//! which makes it a closed-form test oracle.

use nalgebra::DMatrix;

use crate::dynamics::{ComplexTrajectory, Flow, StabilityMatrix};
use crate::error::{Error, Result};
use crate::phase_space::{manifold_point, ComplexPhasePoint, GaussianPacket, C64, I};

/// Free flight of duration `time`, D-generic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FreeFlow {
    pub mass: f64,
    pub time: f64,
    /// Stability checkpoints along the flight.
    pub substeps: usize,
}

impl FreeFlow {
    pub fn new(mass: f64, time: f64) -> Result<Self> {
        if !(mass > 0.0) || !time.is_finite() {
            return Err(Error::InvalidArgument(format!("need mass > 0 and finite time, got {mass}, {time}")));
        }
        Ok(Self { mass, time, substeps: 8 })
    }

    fn stability(&self, d: usize, tau: f64) -> StabilityMatrix {
        StabilityMatrix {
            m11: DMatrix::identity(d, d),
            m12: DMatrix::zeros(d, d),
            m21: DMatrix::identity(d, d) * C64::from(tau / self.mass),
            m22: DMatrix::identity(d, d),
        }
    }
}

impl Flow for FreeFlow {
    fn trajectory(&self, ic: &ComplexPhasePoint) -> Result<ComplexTrajectory> {
        let d = ic.dim();
        let end = ComplexPhasePoint::new(ic.p.clone(), &ic.q + &ic.p * C64::from(self.time / self.mass));
        let action = ic.p.iter().map(|p| p * p).sum::<C64>() * (self.time / (2.0 * self.mass));
        let n = self.substeps.max(1);
        let checkpoints = (0..=n).map(|j| self.stability(d, self.time * j as f64 / n as f64)).collect();
        Ok(ComplexTrajectory {
            points: vec![ic.clone(), end],
            action,
            stability: self.stability(d, self.time),
            checkpoints,
        })
    }
}

/// `kappa = hbar t / (2 m sigma^2)`.
pub fn spreading(alpha: &GaussianPacket, t: f64, mass: f64) -> f64 {
    alpha.hbar() * t / (2.0 * mass * alpha.sigma().powi(2))
}

fn check_1d(alpha: &GaussianPacket) -> Result<()> {
    if alpha.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: alpha.dim() });
    }
    Ok(())
}

/// Initial point of the saddle trajectory reaching `x` at time `t`. At
/// `t = 0` this is the manifold point with position `x`.
pub fn free_particle_saddle(alpha: &GaussianPacket, x: f64, t: f64, mass: f64) -> Result<ComplexPhasePoint> {
    check_1d(alpha)?;
    let (pa, qa) = (alpha.center_p()[0], alpha.center_q()[0]);
    if t == 0.0 {
        return Ok(manifold_point(alpha, &nalgebra::DVector::from_element(1, C64::from(x))));
    }
    let kappa = spreading(alpha, t, mass);
    let qt = qa + t * pa / mass;
    let denom = C64::new(1.0, kappa);
    let p0 = pa + I * (kappa * mass / t) * (x - qt) / denom;
    let q0 = qa + (x - qt) / denom;
    Ok(ComplexPhasePoint::new_1d(p0, q0))
}

/// Real off-center initial condition reaching `x` at time `t`.
pub fn free_particle_offcenter(alpha: &GaussianPacket, x: f64, t: f64, mass: f64) -> (f64, f64) {
    let (pa, qa) = (alpha.center_p()[0], alpha.center_q()[0]);
    let qt = qa + t * pa / mass;
    (pa + mass / t * (x - qt), qa)
}

/// Exactly evolved packet `<x|U(t)|alpha>`.
pub fn free_particle_exact(alpha: &GaussianPacket, x: f64, t: f64, mass: f64) -> Result<C64> {
    check_1d(alpha)?;
    let hbar = alpha.hbar();
    let s2 = alpha.sigma().powi(2);
    let (pa, qa) = (alpha.center_p()[0], alpha.center_q()[0]);
    let kappa = spreading(alpha, t, mass);
    let qt = qa + t * pa / mass;
    let denom = C64::new(1.0, kappa);
    let dx = x - qt;
    let exponent = -dx * dx / (4.0 * s2 * denom) + I * pa * dx / hbar + I * pa * pa * t / (2.0 * mass * hbar);
    Ok((1.0 / (2.0 * std::f64::consts::PI * s2)).powf(0.25) / denom.sqrt() * exponent.exp())
}
