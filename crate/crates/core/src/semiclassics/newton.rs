//! Newton-Raphson search for complex saddle trajectories.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dynamics::{packet_image, ComplexTrajectory, Flow};
use crate::error::{Error, Result};
use crate::phase_space::{residuals, ComplexPhasePoint, GaussianPacket, ResidualPair, C64, I};
use crate::seeds::SeedTrajectory;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaddleOptions {
    /// Convergence threshold on `hbar * max(|C0|, |Ct|)`.
    pub tol: f64,
    pub max_iter: usize,
    /// Step halvings tried when a full Newton step increases the residual.
    pub max_halvings: usize,
}

impl Default for SaddleOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 25, max_halvings: 6 }
    }
}

/// A converged complex trajectory from the ket manifold of `alpha` to the
/// bra manifold of an image of `beta`.
#[derive(Clone, Debug)]
pub struct SaddleTrajectory {
    pub trajectory: ComplexTrajectory,
    pub seed: SeedTrajectory,
    /// Newton updates applied.
    pub iterations: usize,
    pub residual_norm: f64,
    /// Residual before each update and after the last one.
    pub residual_history: Vec<f64>,
}

impl SaddleTrajectory {
    pub fn initial(&self) -> &ComplexPhasePoint {
        self.trajectory.initial()
    }
}

fn stack(a: &DVector<C64>, b: &DVector<C64>) -> DVector<C64> {
    DVector::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).copied())
}

fn solve(jac: DMatrix<C64>, rhs: DVector<C64>) -> Result<DVector<C64>> {
    let scale = jac.iter().fold(0.0f64, |m, z| m.max(z.norm()));
    let lu = jac.lu();
    let u = lu.u();
    let pivot = (0..u.nrows()).map(|i| u[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    if !(pivot > 1e-14 * scale) {
        return Err(Error::SingularSystem);
    }
    lu.solve(&rhs).ok_or(Error::SingularSystem)
}

/// One Newton update of the initial point of `current` toward the saddle
/// between `alpha` and `beta` (already shifted to the targeted image).
/// Returns the updated initial point and the residuals before the update.
pub fn newton_step(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    current: &ComplexTrajectory,
) -> Result<(ComplexPhasePoint, ResidualPair)> {
    let d = alpha.dim();
    if beta.dim() != d || current.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, found: beta.dim().max(current.dim()) });
    }
    let hbar = alpha.hbar();
    let r = residuals(alpha, beta, current.initial(), current.last());
    let m = &current.stability;
    let ba = alpha.b().map(C64::from) * C64::from(2.0);
    let bb = beta.b().map(C64::from) * C64::from(2.0);
    let ih = I / hbar;

    // unknowns (dP0, dQ0)
    let mut jac = DMatrix::zeros(2 * d, 2 * d);
    jac.view_mut((0, 0), (d, d)).copy_from(&(DMatrix::identity(d, d) * ih));
    jac.view_mut((0, d), (d, d)).copy_from(&ba);
    jac.view_mut((d, 0), (d, d)).copy_from(&(&bb * &m.m21 - &m.m11 * ih));
    jac.view_mut((d, d), (d, d)).copy_from(&(&bb * &m.m22 - &m.m12 * ih));
    let delta = solve(jac, -stack(&r.c0, &r.ct))?;

    let p0 = &current.initial().p + delta.rows(0, d);
    let q0 = &current.initial().q + delta.rows(d, d);
    Ok((ComplexPhasePoint::new(p0, q0), r))
}

/// Converges the saddle trajectory associated with a real seed.
pub fn find_saddle(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    seed: &SeedTrajectory,
    flow: &dyn Flow,
    options: &SaddleOptions,
) -> Result<SaddleTrajectory> {
    let target = packet_image(beta, seed.winding);
    let start = ComplexPhasePoint::new_1d(C64::from(seed.ic.0), C64::from(seed.ic.1));
    let (trajectory, iterations, residual_history) = converge(
        start,
        flow,
        options,
        |traj| residuals(alpha, &target, traj.initial(), traj.last()).scaled_norm(alpha.hbar()),
        |traj| newton_step(alpha, &target, traj).map(|(z, _)| z),
    )?;
    let residual_norm = *residual_history.last().expect("history holds the initial residual");
    Ok(SaddleTrajectory { trajectory, seed: *seed, iterations, residual_norm, residual_history })
}

/// Damped Newton iteration shared by the correlation and wavefunction
/// saddle searches: full steps are halved while they fail to reduce the
/// residual or run away.
pub(crate) fn converge(
    start: ComplexPhasePoint,
    flow: &dyn Flow,
    options: &SaddleOptions,
    residual: impl Fn(&ComplexTrajectory) -> f64,
    step: impl Fn(&ComplexTrajectory) -> Result<ComplexPhasePoint>,
) -> Result<(ComplexTrajectory, usize, Vec<f64>)> {
    let mut traj = flow.trajectory(&start)?;
    let mut r = residual(&traj);
    let mut history = vec![r];
    let mut iterations = 0;
    while !(r < options.tol) {
        if iterations >= options.max_iter {
            return Err(Error::NoConvergence { iterations, residual: r });
        }
        let z = traj.initial().clone();
        let full = step(&traj)?;
        let mut lambda = 1.0;
        let mut accepted = None;
        let mut last_err = None;
        for _ in 0..=options.max_halvings {
            let trial = ComplexPhasePoint::new(
                &z.p + (&full.p - &z.p) * C64::from(lambda),
                &z.q + (&full.q - &z.q) * C64::from(lambda),
            );
            match flow.trajectory(&trial) {
                Ok(t) => {
                    let rt = residual(&t);
                    // near the rounding floor a non-decreasing step is still accepted
                    if rt < r || rt < options.tol {
                        accepted = Some((t, rt));
                        break;
                    }
                }
                Err(e @ Error::Runaway { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
            lambda *= 0.5;
        }
        let Some((t, rt)) = accepted else {
            return Err(last_err.unwrap_or(Error::NoConvergence { iterations, residual: r }));
        };
        traj = t;
        r = rt;
        history.push(r);
        iterations += 1;
    }
    Ok((traj, iterations, history))
}
