//! Trajectory containers shared by every flow, and the [`Flow`] trait the
//! semiclassical evaluators are written against.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::phase_space::{ComplexPhasePoint, GaussianPacket, C64};

/// The four `D x D` blocks of a `2D x 2D` stability matrix acting on
/// `(dP, dQ)` column vectors:
///
/// ```text
/// dP_t = m11 dP_0 + m12 dQ_0
/// dQ_t = m21 dP_0 + m22 dQ_0
/// ```
#[derive(Clone, Debug, PartialEq)]
pub struct StabilityMatrix {
    pub m11: DMatrix<C64>,
    pub m12: DMatrix<C64>,
    pub m21: DMatrix<C64>,
    pub m22: DMatrix<C64>,
}

impl StabilityMatrix {
    pub fn identity(d: usize) -> Self {
        Self {
            m11: DMatrix::identity(d, d),
            m12: DMatrix::zeros(d, d),
            m21: DMatrix::zeros(d, d),
            m22: DMatrix::identity(d, d),
        }
    }

    pub fn from_blocks(m11: C64, m12: C64, m21: C64, m22: C64) -> Self {
        let one = |z| DMatrix::from_element(1, 1, z);
        Self { m11: one(m11), m12: one(m12), m21: one(m21), m22: one(m22) }
    }

    pub fn dim(&self) -> usize {
        self.m11.nrows()
    }

    /// `step * self`: the stability after following `self` by `step`.
    pub fn then(&self, step: &StabilityMatrix) -> StabilityMatrix {
        StabilityMatrix {
            m11: &step.m11 * &self.m11 + &step.m12 * &self.m21,
            m12: &step.m11 * &self.m12 + &step.m12 * &self.m22,
            m21: &step.m21 * &self.m11 + &step.m22 * &self.m21,
            m22: &step.m21 * &self.m12 + &step.m22 * &self.m22,
        }
    }

    pub fn full(&self) -> DMatrix<C64> {
        let d = self.dim();
        let mut m = DMatrix::zeros(2 * d, 2 * d);
        m.view_mut((0, 0), (d, d)).copy_from(&self.m11);
        m.view_mut((0, d), (d, d)).copy_from(&self.m12);
        m.view_mut((d, 0), (d, d)).copy_from(&self.m21);
        m.view_mut((d, d), (d, d)).copy_from(&self.m22);
        m
    }

    pub fn determinant(&self) -> C64 {
        self.full().determinant()
    }

    /// Linearized image of an initial displacement.
    pub fn apply(&self, dp: &DVector<C64>, dq: &DVector<C64>) -> (DVector<C64>, DVector<C64>) {
        (&self.m11 * dp + &self.m12 * dq, &self.m21 * dp + &self.m22 * dq)
    }

    /// Largest imaginary part over all entries.
    pub fn max_imag(&self) -> f64 {
        [&self.m11, &self.m12, &self.m21, &self.m22]
            .iter()
            .flat_map(|m| m.iter())
            .fold(0.0, |a, z| a.max(z.im.abs()))
    }
}

/// A complexified trajectory with its accumulated action and stability.
///
/// `checkpoints` samples the stability matrix along a continuous path from
/// the identity (time zero) to `stability` (final time); square-root
/// branches of stability-dependent determinants are fixed by unwrapping
/// their phase along this path.
#[derive(Clone, Debug)]
pub struct ComplexTrajectory {
    pub points: Vec<ComplexPhasePoint>,
    pub action: C64,
    pub stability: StabilityMatrix,
    pub checkpoints: Vec<StabilityMatrix>,
}

impl ComplexTrajectory {
    pub fn initial(&self) -> &ComplexPhasePoint {
        &self.points[0]
    }

    pub fn last(&self) -> &ComplexPhasePoint {
        self.points.last().expect("trajectory has at least one point")
    }

    pub fn dim(&self) -> usize {
        self.initial().dim()
    }

    pub fn max_imag(&self) -> f64 {
        self.points
            .iter()
            .map(ComplexPhasePoint::max_imag)
            .fold(self.action.im.abs().max(self.stability.max_imag()), f64::max)
    }
}

/// Integer lattice translation on the unfolded torus: the image of a
/// center `(p, q)` is `(p + n_p, q + n_q)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Winding {
    pub n_p: i64,
    pub n_q: i64,
}

impl Winding {
    pub const ZERO: Winding = Winding { n_p: 0, n_q: 0 };

    pub fn new(n_p: i64, n_q: i64) -> Self {
        Self { n_p, n_q }
    }

    pub fn is_zero(&self) -> bool {
        *self == Self::ZERO
    }

    pub fn negated(&self) -> Self {
        Self { n_p: -self.n_p, n_q: -self.n_q }
    }

    pub fn max_abs(&self) -> u64 {
        self.n_p.unsigned_abs().max(self.n_q.unsigned_abs())
    }
}

/// Image of a packet under a winding. Only one-dimensional packets carry
/// nonzero windings.
pub fn packet_image(packet: &GaussianPacket, winding: Winding) -> GaussianPacket {
    if winding.is_zero() {
        return packet.clone();
    }
    assert_eq!(packet.dim(), 1, "torus images are defined for one-dimensional packets");
    packet.shifted(
        &DVector::from_element(1, winding.n_p as f64),
        &DVector::from_element(1, winding.n_q as f64),
    )
}

/// A classical flow for a fixed propagation time, analytically continued
/// to complex initial conditions.
pub trait Flow: Sync {
    fn trajectory(&self, ic: &ComplexPhasePoint) -> Result<ComplexTrajectory>;

    /// Winding of the image of `beta` closest to a trajectory endpoint.
    /// Flows on an unbounded phase space have only the trivial image.
    fn nearest_winding(&self, _endpoint: &ComplexPhasePoint, _beta: &GaussianPacket) -> Winding {
        Winding::ZERO
    }
}
