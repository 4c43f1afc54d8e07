//! Real-trajectory methods: off-center representative trajectories and
//! linearized wave-packet dynamics about the packet center.

use nalgebra::DVector;

use crate::dynamics::{packet_image, ComplexTrajectory, Flow, Winding};
use crate::error::{Error, Result};
use crate::phase_space::{ComplexPhasePoint, GaussianPacket, C64, I};
use crate::seeds::{SeedKind, SeedTrajectory};
use crate::semiclassics::branch::tracked_sqrt;
use crate::semiclassics::ggwpd::image_phase;
use crate::semiclassics::CorrelationResult;

/// One representative trajectory's term in the off-center sum.
#[derive(Clone, Debug)]
pub struct OffCenterContribution {
    pub winding: Winding,
    pub a0: C64,
    pub a1: C64,
    pub a2: C64,
    pub a3: C64,
    pub a4: C64,
    pub dx_a: f64,
    pub dp_a: f64,
    pub dx_b: f64,
    pub dp_b: f64,
    pub value: C64,
}

fn scalar_blocks(m: &crate::dynamics::StabilityMatrix) -> (C64, C64, C64, C64) {
    (m.m11[(0, 0)], m.m12[(0, 0)], m.m21[(0, 0)], m.m22[(0, 0)])
}

fn check_pair(alpha: &GaussianPacket, beta: &GaussianPacket) -> Result<f64> {
    if alpha.dim() != 1 || beta.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: alpha.dim().max(beta.dim()) });
    }
    let (sa, sb) = (alpha.sigma(), beta.sigma());
    if (sa - sb).abs() > 1e-12 * sa || (alpha.hbar() - beta.hbar()).abs() > 1e-15 * alpha.hbar() {
        return Err(Error::InvalidArgument("off-center sums need equal widths and hbar".into()));
    }
    Ok(sa * sa)
}

/// `a0(M) = M11 + M22 + i (hbar M21 / 2 sigma^2 - 2 sigma^2 M12 / hbar)`.
fn a0_of(s2: f64, hbar: f64) -> impl Fn(&crate::dynamics::StabilityMatrix) -> C64 {
    move |m| {
        let (m11, m12, m21, m22) = scalar_blocks(m);
        m11 + m22 + I * (m21 * (hbar / (2.0 * s2)) - m12 * (2.0 * s2 / hbar))
    }
}

/// Term of one real trajectory, given the unshifted `beta` and the image
/// the trajectory targets.
pub fn offcenter_contribution(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    trajectory: &ComplexTrajectory,
    winding: Winding,
) -> Result<OffCenterContribution> {
    let s2 = check_pair(alpha, beta)?;
    let hbar = alpha.hbar();
    let target = packet_image(beta, winding);
    let (m11, m12, m21, m22) = scalar_blocks(&trajectory.stability);
    let a0 = a0_of(s2, hbar)(&trajectory.stability);
    if a0 == C64::new(0.0, 0.0) {
        return Err(Error::Caustic("off-center prefactor A0".into()));
    }
    let a1 = m22 - I * (2.0 * s2 / hbar) * m12;
    let a2 = m11 - I * (2.0 * s2 / hbar) * m12;
    let a3 = m11 + I * (hbar / (2.0 * s2)) * m21;
    let a4 = m22 + I * (hbar / (2.0 * s2)) * m21;

    let (x0, p0) = (trajectory.initial().q[0].re, trajectory.initial().p[0].re);
    let (xt, pt) = (trajectory.last().q[0].re, trajectory.last().p[0].re);
    let (xa, pa) = (alpha.center_q()[0], alpha.center_p()[0]);
    let (xb, pb) = (target.center_q()[0], target.center_p()[0]);
    let w = (2.0 * s2).sqrt();
    let (dx_a, dp_a) = ((xa - x0) / w, (pa - p0) * w / hbar);
    let (dx_b, dp_b) = ((xb - xt) / w, (pb - pt) * w / hbar);

    let quad = a1 * dx_a * dx_a + a2 * dx_b * dx_b + a3 * dp_a * dp_a + a4 * dp_b * dp_b
        - 2.0 * C64::new(dx_a, dp_a) * C64::new(dx_b, -dp_b)
        + 2.0 * I * a1 * dx_a * dp_a
        - 2.0 * I * a2 * dx_b * dp_b;
    let classical = trajectory.action.re + pt * (xb - xt) - p0 * (xa - x0);
    let root = tracked_sqrt(trajectory, a0_of(s2, hbar))?;
    let value = image_phase(beta, winding) * 2f64.sqrt() / root
        * (I * classical / hbar - quad / (2.0 * a0)).exp();
    Ok(OffCenterContribution { winding, a0, a1, a2, a3, a4, dx_a, dp_a, dx_b, dp_b, value })
}

fn real_trajectory(flow: &dyn Flow, ic: (f64, f64)) -> Result<ComplexTrajectory> {
    flow.trajectory(&ComplexPhasePoint::new_1d(C64::from(ic.0), C64::from(ic.1)))
}

/// Off-center real-trajectory estimate of `<beta|U|alpha>`, one term per seed.
pub fn offcenter_correlation(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    seeds: &[SeedTrajectory],
    flow: &dyn Flow,
) -> Result<CorrelationResult<OffCenterContribution>> {
    let branches = seeds
        .iter()
        .map(|s| offcenter_contribution(alpha, beta, &real_trajectory(flow, s.ic)?, s.winding))
        .collect::<Result<Vec<_>>>()?;
    Ok(CorrelationResult { total: branches.iter().map(|c| c.value).sum(), branches, pruned: 0 })
}

/// Linearized wave-packet dynamics: the off-center formula on the single
/// trajectory through the center of `alpha`, aimed at the nearest image
/// of `beta`.
pub fn linearized_correlation(alpha: &GaussianPacket, beta: &GaussianPacket, flow: &dyn Flow) -> Result<C64> {
    check_pair(alpha, beta)?;
    let ic = (alpha.center_p()[0], alpha.center_q()[0]);
    let traj = real_trajectory(flow, ic)?;
    let winding = flow.nearest_winding(traj.last(), beta);
    Ok(offcenter_contribution(alpha, beta, &traj, winding)?.value)
}

/// Seed for the center trajectory of `alpha`.
pub fn center_seed(alpha: &GaussianPacket, t: usize, winding: Winding) -> SeedTrajectory {
    SeedTrajectory {
        ic: (alpha.center_p()[0], alpha.center_q()[0]),
        t,
        winding,
        kind: SeedKind::Integrable,
    }
}

/// Linearized propagated wavefunction `<x|U|alpha>`: the packet's center
/// follows the classical trajectory while its width evolves with the
/// stability matrix.
pub fn linearized_wavefunction(alpha: &GaussianPacket, x: f64, flow: &dyn Flow) -> Result<C64> {
    check_pair(alpha, alpha)?;
    let hbar = alpha.hbar();
    let traj = real_trajectory(flow, (alpha.center_p()[0], alpha.center_q()[0]))?;
    let (m11, m12, m21, m22) = scalar_blocks(&traj.stability);
    let z0 = I * 2.0 * hbar * alpha.b()[(0, 0)];
    let zt = (m11 * z0 + m12) / (m21 * z0 + m22);
    let root = tracked_sqrt(&traj, |m| {
        let (_, _, m21, m22) = scalar_blocks(m);
        m22 + m21 * z0
    })?;
    let (qt, pt) = (traj.last().q[0].re, traj.last().p[0].re);
    let dx = x - qt;
    let exponent = I / hbar * (0.5 * zt * dx * dx + pt * dx + traj.action);
    Ok(alpha.normalization() / root * exponent.exp())
}

/// Off-center propagated wavefunction at `x` from one real trajectory:
/// the action is expanded to second order about the trajectory and
/// integrated against the initial packet.
pub fn offcenter_wavefunction(alpha: &GaussianPacket, x: f64, ic: (f64, f64), flow: &dyn Flow) -> Result<C64> {
    check_pair(alpha, alpha)?;
    let hbar = alpha.hbar();
    let b = alpha.b()[(0, 0)];
    let traj = real_trajectory(flow, ic)?;
    let (m11, _, m21, m22) = scalar_blocks(&traj.stability);
    if m21 == C64::new(0.0, 0.0) {
        return Err(Error::Caustic("position focal point of the off-center trajectory".into()));
    }
    let (x0, p0) = (traj.initial().q[0].re, traj.initial().p[0].re);
    let (xt, pt) = (traj.last().q[0].re, traj.last().p[0].re);
    let (xa, pa) = (alpha.center_q()[0], alpha.center_p()[0]);
    let (s_tt, s_t0, s_00) = (m11 / m21, -m21.inv(), m22 / m21);
    let delta = xa - x0;
    let dx = x - xt;

    // integral over eta = y - x0 of exp(-a eta^2 + c eta + k)
    let a = b - I * s_00 / (2.0 * hbar);
    let c = I / hbar * (pa - p0 + s_t0 * dx) + 2.0 * b * delta;
    let k = -b * delta * delta - I / hbar * pa * delta
        + I / hbar * (traj.action + pt * dx + 0.5 * s_tt * dx * dx);
    let root = tracked_sqrt(&traj, |m| {
        let (_, _, m21, m22) = scalar_blocks(m);
        m22 + m21 * (2.0 * hbar * b) * I
    })?;
    Ok(alpha.normalization() / root * (c * c / (4.0 * a) + k).exp())
}

/// Real position of `x` as a vector, for the D-generic APIs.
pub fn position(x: f64) -> DVector<f64> {
    DVector::from_element(1, x)
}
