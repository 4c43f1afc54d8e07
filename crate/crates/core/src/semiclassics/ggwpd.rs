//! Steepest-descent evaluation of correlations and wavefunctions over
//! complex saddle trajectories.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::dynamics::{packet_image, ComplexTrajectory, Flow, Winding};
use crate::error::{Error, Result};
use crate::phase_space::{f_minus, f_plus, residuals, ComplexPhasePoint, GaussianPacket, C64, I};
use crate::semiclassics::branch::tracked_sqrt;
use crate::semiclassics::newton::{converge, SaddleOptions, SaddleTrajectory};
use crate::semiclassics::CorrelationResult;

/// Relative weight below which a branch is dropped from a sum.
pub const PRUNE_RELATIVE: f64 = 1e-12;

/// One saddle's term in the correlation sum.
#[derive(Clone, Debug)]
pub struct SaddleContribution {
    pub winding: Winding,
    pub action: C64,
    pub f_minus: C64,
    pub f_plus: C64,
    /// Reciprocal square root of the prefactor determinant on its tracked sheet.
    pub prefactor: C64,
    /// Torus phase of the targeted image, `exp(-i n_p q_beta / hbar)`.
    pub image_phase: C64,
    pub value: C64,
}

/// `exp(-i n_p q_beta / hbar)`: relates the correlation with a momentum
/// image of `beta` to the one with the torus state itself.
pub fn image_phase(beta: &GaussianPacket, winding: Winding) -> C64 {
    if winding.n_p == 0 {
        return C64::new(1.0, 0.0);
    }
    let phase = -(winding.n_p as f64) * beta.center_q()[0] / beta.hbar();
    C64::from_polar(1.0, phase.rem_euclid(2.0 * PI))
}

fn correlation_determinant(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
) -> impl Fn(&crate::dynamics::StabilityMatrix) -> C64 {
    let hbar = alpha.hbar();
    let ba = alpha.b().map(C64::from);
    let bb = beta.b().map(C64::from);
    move |m| {
        let a: DMatrix<C64> = &m.m11 * &ba + &bb * &m.m22 + &bb * &m.m21 * &ba * (2.0 * hbar * I)
            - &m.m12 * (I / (2.0 * hbar));
        a.determinant()
    }
}

/// Evaluates the term of one converged saddle. `beta` is the unshifted
/// final packet; the saddle's seed names the image it targets.
pub fn saddle_contribution(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    saddle: &SaddleTrajectory,
) -> Result<SaddleContribution> {
    let winding = saddle.seed.winding;
    let target = packet_image(beta, winding);
    let traj = &saddle.trajectory;
    let hbar = alpha.hbar();
    let d = alpha.dim() as i32;
    let root = tracked_sqrt(traj, correlation_determinant(alpha, &target)).map_err(|_| {
        Error::Caustic(format!("correlation prefactor of the branch seeded at {:?}", saddle.seed.ic))
    })?;
    let fm = f_minus(alpha, traj.initial());
    let fp = f_plus(&target, traj.last());
    let norm = (4f64.powi(d) * alpha.b().determinant() * target.b().determinant()).powf(0.25);
    let phase = image_phase(beta, winding);
    let value = phase * norm * (I * traj.action / hbar + fm + fp).exp() / root;
    Ok(SaddleContribution {
        winding,
        action: traj.action,
        f_minus: fm,
        f_plus: fp,
        prefactor: root.inv(),
        image_phase: phase,
        value,
    })
}

/// `<beta|U|alpha>` summed over saddles. Branches whose exponential weight
/// `|exp(i S / hbar + F- + F+)|` falls below `PRUNE_RELATIVE` times the
/// largest are dropped.
pub fn ggwpd_correlation(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    saddles: &[SaddleTrajectory],
) -> Result<CorrelationResult<SaddleContribution>> {
    ggwpd_correlation_with(alpha, beta, saddles, PRUNE_RELATIVE)
}

pub fn ggwpd_correlation_with(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    saddles: &[SaddleTrajectory],
    prune_relative: f64,
) -> Result<CorrelationResult<SaddleContribution>> {
    let all = saddles
        .iter()
        .map(|s| saddle_contribution(alpha, beta, s))
        .collect::<Result<Vec<_>>>()?;
    let hbar = alpha.hbar();
    let weight = |c: &SaddleContribution| (I * c.action / hbar + c.f_minus + c.f_plus).re.exp();
    let largest = all.iter().map(weight).fold(0.0, f64::max);
    let total_count = all.len();
    let branches: Vec<_> = all.into_iter().filter(|c| weight(c) >= prune_relative * largest).collect();
    Ok(CorrelationResult {
        total: branches.iter().map(|c| c.value).sum(),
        pruned: total_count - branches.len(),
        branches,
    })
}

/// A complex trajectory from the ket manifold of `alpha` ending at a real
/// position `x`.
#[derive(Clone, Debug)]
pub struct PositionSaddle {
    pub trajectory: ComplexTrajectory,
    pub iterations: usize,
    pub residual_norm: f64,
}

fn position_residual(alpha: &GaussianPacket, x: &DVector<f64>, traj: &ComplexTrajectory) -> f64 {
    let c0 = residuals(alpha, alpha, traj.initial(), traj.initial()).c0;
    let ct = &traj.last().q - x.map(C64::from);
    (alpha.hbar() * c0.norm()).max(ct.norm())
}

/// Newton search for the saddle whose endpoint position is `x`.
pub fn find_position_saddle(
    alpha: &GaussianPacket,
    x: &DVector<f64>,
    start: &ComplexPhasePoint,
    flow: &dyn Flow,
    options: &SaddleOptions,
) -> Result<PositionSaddle> {
    let d = alpha.dim();
    if x.len() != d || start.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: x.len().max(start.dim()) });
    }
    let hbar = alpha.hbar();
    let ba = alpha.b().map(C64::from) * C64::from(2.0);
    let step = |traj: &ComplexTrajectory| -> Result<ComplexPhasePoint> {
        let c0 = residuals(alpha, alpha, traj.initial(), traj.initial()).c0;
        let ct = &traj.last().q - x.map(C64::from);
        let m = &traj.stability;
        let mut jac = DMatrix::zeros(2 * d, 2 * d);
        jac.view_mut((0, 0), (d, d)).copy_from(&(DMatrix::identity(d, d) * (I / hbar)));
        jac.view_mut((0, d), (d, d)).copy_from(&ba);
        jac.view_mut((d, 0), (d, d)).copy_from(&m.m21);
        jac.view_mut((d, d), (d, d)).copy_from(&m.m22);
        let rhs = -DVector::from_iterator(2 * d, c0.iter().chain(ct.iter()).copied());
        let delta = jac.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
        Ok(ComplexPhasePoint::new(
            &traj.initial().p + delta.rows(0, d),
            &traj.initial().q + delta.rows(d, d),
        ))
    };
    let (trajectory, iterations, history) =
        converge(start.clone(), flow, options, |t| position_residual(alpha, x, t), step)?;
    let residual_norm = *history.last().expect("history holds the initial residual");
    Ok(PositionSaddle { trajectory, iterations, residual_norm })
}

/// Propagated wavefunction `<x|U|alpha>` summed over position saddles.
pub fn ggwpd_wavefunction(alpha: &GaussianPacket, saddles: &[PositionSaddle]) -> Result<C64> {
    let hbar = alpha.hbar();
    let ba = alpha.b().map(C64::from);
    saddles
        .iter()
        .map(|s| {
            let traj = &s.trajectory;
            let root = tracked_sqrt(traj, |m| (&m.m22 + &m.m21 * &ba * (2.0 * hbar * I)).determinant())?;
            let exponent = I * traj.action / hbar + f_minus(alpha, traj.initial());
            Ok(alpha.normalization() * exponent.exp() / root)
        })
        .sum()
}
