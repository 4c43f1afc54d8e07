//! Semiclassical evaluators of propagated wave packets and correlations.

pub mod branch;
pub mod free_particle;
pub mod ggwpd;
pub mod newton;
pub mod offcenter;

use crate::phase_space::C64;

pub use branch::{branch_phase, branch_sqrt, tracked_sqrt, BranchTracker};
pub use free_particle::{free_particle_exact, free_particle_offcenter, free_particle_saddle, FreeFlow};
pub use ggwpd::{
    find_position_saddle, ggwpd_correlation, ggwpd_correlation_with, ggwpd_wavefunction, saddle_contribution, PositionSaddle,
    SaddleContribution,
};
pub use newton::{find_saddle, newton_step, SaddleOptions, SaddleTrajectory};
pub use offcenter::{
    linearized_correlation, linearized_wavefunction, offcenter_correlation, offcenter_wavefunction,
    OffCenterContribution,
};

/// A correlation value with its per-branch breakdown.
#[derive(Clone, Debug)]
pub struct CorrelationResult<T> {
    pub total: C64,
    pub branches: Vec<T>,
    /// Branches dropped as negligible.
    pub pruned: usize,
}
