//! Square roots on the sheet selected by continuity in time.

use crate::dynamics::{ComplexTrajectory, StabilityMatrix};
use crate::error::{Error, Result};
use crate::phase_space::C64;

/// Continuously unwrapped argument of a determinant sampled along a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchTracker {
    phase: f64,
    last: C64,
}

impl BranchTracker {
    /// Starts on the principal branch of `initial`.
    pub fn new(initial: C64) -> Result<Self> {
        if initial == C64::new(0.0, 0.0) || !initial.is_finite() {
            return Err(Error::Caustic("initial determinant".into()));
        }
        Ok(Self { phase: initial.arg(), last: initial })
    }

    /// Advances to `det`, assuming the phase moved by less than `pi` since
    /// the previous sample.
    pub fn update(&mut self, det: C64) -> Result<()> {
        if det == C64::new(0.0, 0.0) || !det.is_finite() {
            return Err(Error::Caustic("determinant vanished along the path".into()));
        }
        self.phase += (det / self.last).arg();
        self.last = det;
        Ok(())
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    /// `sqrt` of the latest determinant on the tracked sheet.
    pub fn sqrt(&self) -> C64 {
        C64::from_polar(self.last.norm().sqrt(), 0.5 * self.phase)
    }
}

/// Feeds `det` to the tracker and returns its square root on the tracked
/// sheet.
pub fn branch_sqrt(det: C64, tracker: &mut BranchTracker) -> Result<C64> {
    tracker.update(det)?;
    Ok(tracker.sqrt())
}

/// Square root of `f(M)` continued along the stability checkpoints of a
/// trajectory, starting from the principal root at the identity.
pub fn tracked_sqrt(trajectory: &ComplexTrajectory, f: impl Fn(&StabilityMatrix) -> C64) -> Result<C64> {
    let mut samples = trajectory.checkpoints.iter();
    let first = samples.next().map(&f).unwrap_or_else(|| f(&trajectory.stability));
    let mut tracker = BranchTracker::new(first)?;
    for m in samples {
        tracker.update(f(m))?;
    }
    Ok(tracker.sqrt())
}

/// Phase of `f(M)` unwrapped along the checkpoints.
pub fn branch_phase(trajectory: &ComplexTrajectory, f: impl Fn(&StabilityMatrix) -> C64) -> Result<f64> {
    let mut samples = trajectory.checkpoints.iter();
    let first = samples.next().map(&f).unwrap_or_else(|| f(&trajectory.stability));
    let mut tracker = BranchTracker::new(first)?;
    for m in samples {
        tracker.update(f(m))?;
    }
    Ok(tracker.phase())
}
