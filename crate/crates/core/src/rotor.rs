//! Kicked-rotor dynamics on the unit torus and its analytic continuation.
//!
//! One period is a kick followed by unit-time free flight:
//!
//! ```text
//! p' = p - (K / 2 pi) sin(2 pi q)
//! q' = q + p'
//! ```
//!
//! Complex propagation always runs on the unfolded torus so that winding
//! numbers, and with them the action phases, are kept.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{ComplexTrajectory, Flow, StabilityMatrix, Winding};
use crate::error::{Error, Result};
use crate::phase_space::{ComplexPhasePoint, GaussianPacket, C64};

/// Kicking strength. `K = 0` is the free rotor.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RotorParams {
    pub k: f64,
}

impl RotorParams {
    pub fn new(k: f64) -> Result<Self> {
        if !(k.is_finite() && k >= 0.0) {
            return Err(Error::InvalidArgument(format!("kicking strength must be >= 0, got {k}")));
        }
        Ok(Self { k })
    }

    fn kick_scale(&self) -> f64 {
        self.k / (2.0 * PI)
    }
}

/// Controls for complex propagation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PropagationOptions {
    /// Stability checkpoints per kick and per free flight.
    pub substeps: usize,
    /// Largest tolerated `|Im P|` or `|Im Q|`.
    pub runaway_bound: f64,
}

impl Default for PropagationOptions {
    fn default() -> Self {
        Self { substeps: 8, runaway_bound: 10.0 }
    }
}

/// Real forward step on the unfolded torus.
#[inline]
pub fn step_real(p: f64, q: f64, k: f64) -> (f64, f64) {
    let p1 = p - k / (2.0 * PI) * (2.0 * PI * q).sin();
    (p1, q + p1)
}

/// Exact inverse of [`step_real`].
#[inline]
pub fn inverse_step_real(p: f64, q: f64, k: f64) -> (f64, f64) {
    let q0 = q - p;
    (p + k / (2.0 * PI) * (2.0 * PI * q0).sin(), q0)
}

/// Forward step of a real point together with a tangent vector `(dp, dq)`.
#[inline]
pub fn step_tangent(p: f64, q: f64, dp: f64, dq: f64, k: f64) -> (f64, f64, f64, f64) {
    let c = k * (2.0 * PI * q).cos();
    let (p1, q1) = step_real(p, q, k);
    let dp1 = dp - c * dq;
    (p1, q1, dp1, dq + dp1)
}

/// Inverse step of a real point together with a tangent vector.
#[inline]
pub fn inverse_step_tangent(p: f64, q: f64, dp: f64, dq: f64, k: f64) -> (f64, f64, f64, f64) {
    let (p0, q0) = inverse_step_real(p, q, k);
    let dq0 = dq - dp;
    let c = k * (2.0 * PI * q0).cos();
    (p0, q0, dp + c * dq0, dq0)
}

/// Single-step stability matrix `[[1, -K c], [1, 1 - K c]]`, `c = cos(2 pi q)`.
pub fn step_stability(q: f64, params: RotorParams) -> [[f64; 2]; 2] {
    let c = params.k * (2.0 * PI * q).cos();
    [[1.0, -c], [1.0, 1.0 - c]]
}

fn fold(x: f64) -> f64 {
    x - x.floor()
}

/// One map application. With `fold` the result is reduced into `[0, 1)`,
/// which is only meaningful for real points.
pub fn map_step(point: &ComplexPhasePoint, params: RotorParams, fold_torus: bool) -> Result<ComplexPhasePoint> {
    if fold_torus && !point.is_real() {
        return Err(Error::FoldComplex);
    }
    let kick = params.kick_scale();
    let p = point
        .p
        .zip_map(&point.q, |p, q| p - (q * (2.0 * PI)).sin() * kick);
    let q = &point.q + &p;
    let mut out = ComplexPhasePoint::new(p, q);
    if fold_torus {
        out.p.apply(|z| *z = C64::from(fold(z.re)));
        out.q.apply(|z| *z = C64::from(fold(z.re)));
    }
    Ok(out)
}

/// Exact inverse of the unfolded map.
pub fn inverse_map_step(point: &ComplexPhasePoint, params: RotorParams) -> ComplexPhasePoint {
    let kick = params.kick_scale();
    let q = &point.q - &point.p;
    let p = point.p.zip_map(&q, |p, q| p + (q * (2.0 * PI)).sin() * kick);
    ComplexPhasePoint::new(p, q)
}

fn kick_blocks(cos_term: &DVector<C64>, strength: f64) -> StabilityMatrix {
    let d = cos_term.len();
    StabilityMatrix {
        m11: DMatrix::identity(d, d),
        m12: DMatrix::from_diagonal(&cos_term.map(|c| -c * strength)),
        m21: DMatrix::zeros(d, d),
        m22: DMatrix::identity(d, d),
    }
}

fn drift_blocks(d: usize, tau: f64) -> StabilityMatrix {
    StabilityMatrix {
        m11: DMatrix::identity(d, d),
        m12: DMatrix::zeros(d, d),
        m21: DMatrix::identity(d, d) * C64::from(tau),
        m22: DMatrix::identity(d, d),
    }
}

/// Propagates `ic` for `t` kicks with default options.
pub fn propagate(ic: &ComplexPhasePoint, t: usize, params: RotorParams) -> Result<ComplexTrajectory> {
    propagate_with(ic, t, params, PropagationOptions::default())
}

/// Propagates `ic` for `t` kicks on the unfolded torus, accumulating the
/// action `sum (Q_{n+1} - Q_n)^2 / 2 + (K / 4 pi^2) cos(2 pi Q_n)` and the
/// stability product.
///
/// Stability checkpoints ramp each kick's strength from zero to one and
/// then advance the free flight, so the recorded path is continuous.
pub fn propagate_with(
    ic: &ComplexPhasePoint,
    t: usize,
    params: RotorParams,
    options: PropagationOptions,
) -> Result<ComplexTrajectory> {
    let d = ic.dim();
    let substeps = options.substeps.max(1);
    let mut points = Vec::with_capacity(t + 1);
    points.push(ic.clone());
    let mut action = C64::new(0.0, 0.0);
    let mut stability = StabilityMatrix::identity(d);
    let mut checkpoints = Vec::with_capacity(2 * substeps * t + 1);
    checkpoints.push(stability.clone());

    let mut current = ic.clone();
    for step in 0..t {
        let cos_term = current.q.map(|q| (q * (2.0 * PI)).cos() * params.k);
        let next = map_step(&current, params, false)?;

        let magnitude = next.max_imag();
        if !(magnitude <= options.runaway_bound) {
            return Err(Error::Runaway { step: step + 1, magnitude, bound: options.runaway_bound });
        }

        let dq = &next.q - &current.q;
        action += dq.iter().map(|z| z * z * 0.5).sum::<C64>()
            + cos_term.iter().sum::<C64>() / (2.0 * PI)
                / (2.0 * PI);

        for j in 1..=substeps {
            let s = j as f64 / substeps as f64;
            checkpoints.push(stability.then(&kick_blocks(&cos_term, s)));
        }
        let kicked = stability.then(&kick_blocks(&cos_term, 1.0));
        for j in 1..=substeps {
            let tau = j as f64 / substeps as f64;
            checkpoints.push(kicked.then(&drift_blocks(d, tau)));
        }
        stability = kicked.then(&drift_blocks(d, 1.0));

        points.push(next.clone());
        current = next;
    }

    Ok(ComplexTrajectory { points, action, stability, checkpoints })
}

/// Kicked rotor propagated for a fixed number of kicks.
#[derive(Clone, Copy, Debug)]
pub struct RotorFlow {
    pub params: RotorParams,
    pub steps: usize,
    pub options: PropagationOptions,
}

impl RotorFlow {
    pub fn new(params: RotorParams, steps: usize) -> Self {
        Self { params, steps, options: PropagationOptions::default() }
    }

    pub fn with_options(mut self, options: PropagationOptions) -> Self {
        self.options = options;
        self
    }
}

impl Flow for RotorFlow {
    fn trajectory(&self, ic: &ComplexPhasePoint) -> Result<ComplexTrajectory> {
        propagate_with(ic, self.steps, self.params, self.options)
    }

    fn nearest_winding(&self, endpoint: &ComplexPhasePoint, beta: &GaussianPacket) -> Winding {
        Winding::new(
            (endpoint.p[0].re - beta.center_p()[0]).round() as i64,
            (endpoint.q[0].re - beta.center_q()[0]).round() as i64,
        )
    }
}
