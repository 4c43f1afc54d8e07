//! Invariant and shearing curves of the real kicked-rotor map.
//!
//! Every curve is the image of a straight seed segment: a point with
//! parameter `u` is `f^n(anchor + u * direction)`, where `f` is the forward
//! map for unstable and shearing curves and the inverse map for stable ones.
//! Keeping the parameter lets callers re-evaluate, refine and polish
//! intersections without interpolating between samples.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::phase_space::GaussianPacket;
use crate::rotor::{inverse_step_real, inverse_step_tangent, step_real, step_tangent, step_stability, RotorParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ManifoldKind {
    Unstable,
    Stable,
    Shearing,
}

/// Sampling controls for curve construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ManifoldOptions {
    /// Half-length of the seed segment along the eigenvector.
    pub seed_length: f64,
    /// Largest allowed distance between consecutive samples.
    pub spacing: f64,
    /// Refinement aborts beyond this many samples.
    pub point_cap: usize,
    /// Samples on the seed segment before refinement.
    pub initial_points: usize,
    /// Iteration limit while growing a curve to its arc budget.
    pub max_iterations: usize,
}

impl Default for ManifoldOptions {
    fn default() -> Self {
        Self { seed_length: 1e-6, spacing: 1e-3, point_cap: 2_000_000, initial_points: 17, max_iterations: 200 }
    }
}

/// An ordered sampled curve in the real unfolded phase plane.
#[derive(Clone, Debug, PartialEq)]
pub struct ManifoldCurve {
    pub kind: ManifoldKind,
    /// Fixed point or packet center the curve grows from, as `(p, q)`.
    pub anchor: (f64, f64),
    pub direction: (f64, f64),
    /// Map applications between the seed segment and the samples.
    pub iterations: usize,
    pub params: RotorParams,
    /// Seed-segment parameter of each sample.
    pub parameters: Vec<f64>,
    /// Samples as `(p, q)`.
    pub points: Vec<(f64, f64)>,
}

impl ManifoldCurve {
    fn forward(&self) -> bool {
        self.kind != ManifoldKind::Stable
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Curve point at seed parameter `u`.
    pub fn evaluate(&self, u: f64) -> (f64, f64) {
        let (mut p, mut q) = (self.anchor.0 + u * self.direction.0, self.anchor.1 + u * self.direction.1);
        let k = self.params.k;
        for _ in 0..self.iterations {
            (p, q) = if self.forward() { step_real(p, q, k) } else { inverse_step_real(p, q, k) };
        }
        (p, q)
    }

    /// Curve point and its derivative with respect to `u`.
    pub fn evaluate_tangent(&self, u: f64) -> (f64, f64, f64, f64) {
        let mut s = (self.anchor.0 + u * self.direction.0, self.anchor.1 + u * self.direction.1, self.direction.0, self.direction.1);
        let k = self.params.k;
        for _ in 0..self.iterations {
            s = if self.forward() {
                step_tangent(s.0, s.1, s.2, s.3, k)
            } else {
                inverse_step_tangent(s.0, s.1, s.2, s.3, k)
            };
        }
        s
    }

    pub fn arc_length(&self) -> f64 {
        self.points.windows(2).map(|w| dist(w[0], w[1])).sum()
    }

    /// The same parameter range pushed `steps` further along the map and
    /// re-refined.
    pub fn advanced(&self, steps: usize, options: &ManifoldOptions) -> Result<ManifoldCurve> {
        let mut curve = ManifoldCurve { iterations: self.iterations + steps, ..self.clone() };
        curve.resample(self.parameters.clone(), options)?;
        Ok(curve)
    }

    /// Connected piece through the anchor that stays within `radius` of it.
    pub fn local_branch(&self, radius: f64) -> ManifoldCurve {
        if self.points.is_empty() {
            return self.clone();
        }
        let center = self
            .parameters
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.abs().total_cmp(&b.1.abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let inside = |i: usize| dist(self.points[i], self.anchor) <= radius;
        let mut lo = center;
        while lo > 0 && inside(lo - 1) {
            lo -= 1;
        }
        let mut hi = center;
        while hi + 1 < self.points.len() && inside(hi + 1) {
            hi += 1;
        }
        ManifoldCurve {
            parameters: self.parameters[lo..=hi].to_vec(),
            points: self.points[lo..=hi].to_vec(),
            ..self.clone()
        }
    }

    /// Smallest distance from `(p, q)` to the sampled polyline.
    pub fn distance_to(&self, point: (f64, f64)) -> f64 {
        match self.points.len() {
            0 => f64::INFINITY,
            1 => dist(self.points[0], point),
            _ => self
                .points
                .windows(2)
                .map(|w| segment_distance(w[0], w[1], point))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Axis-aligned bounds `(p_min, p_max, q_min, q_max)`.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        self.points.iter().fold(
            (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY),
            |b, &(p, q)| (b.0.min(p), b.1.max(p), b.2.min(q), b.3.max(q)),
        )
    }

    /// Writes `index,p,q` rows.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let csv_err = |source| Error::Csv { path: path.to_path_buf(), source };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(["index", "p", "q"]).map_err(csv_err)?;
        for (i, (p, q)) in self.points.iter().enumerate() {
            w.write_record([i.to_string(), format!("{p:.16e}"), format!("{q:.16e}")])
                .map_err(csv_err)?;
        }
        w.flush().map_err(|source| Error::Io { path: path.to_path_buf(), source })
    }

    /// Samples at `parameters`, then bisects in `u` until consecutive
    /// samples are closer than the spacing bound. Gaps whose parameter
    /// interval has collapsed to rounding level are left alone.
    fn resample(&mut self, parameters: Vec<f64>, options: &ManifoldOptions) -> Result<()> {
        let mut us = parameters;
        let mut pts: Vec<(f64, f64)> = us.iter().map(|&u| self.evaluate(u)).collect();
        loop {
            let mut new_us = Vec::with_capacity(us.len() * 2);
            let mut new_pts = Vec::with_capacity(us.len() * 2);
            let mut inserted = false;
            for i in 0..us.len() {
                new_us.push(us[i]);
                new_pts.push(pts[i]);
                if i + 1 < us.len() {
                    let (a, b) = (us[i], us[i + 1]);
                    let mid = 0.5 * (a + b);
                    let resolvable = mid != a && mid != b && (b - a).abs() > 1e-14 * a.abs().max(b.abs());
                    if dist(pts[i], pts[i + 1]) > options.spacing && resolvable {
                        new_us.push(mid);
                        new_pts.push(self.evaluate(mid));
                        inserted = true;
                    }
                }
            }
            if new_us.len() > options.point_cap {
                return Err(Error::RefinementCap { cap: options.point_cap });
            }
            us = new_us;
            pts = new_pts;
            if !inserted {
                break;
            }
        }
        self.parameters = us;
        self.points = pts;
        Ok(())
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn segment_distance(a: (f64, f64), b: (f64, f64), x: (f64, f64)) -> f64 {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let len2 = dx * dx + dy * dy;
    if len2 == 0.0 {
        return dist(a, x);
    }
    let s = (((x.0 - a.0) * dx + (x.1 - a.1) * dy) / len2).clamp(0.0, 1.0);
    dist((a.0 + s * dx, a.1 + s * dy), x)
}

/// Eigenvalue and unit eigenvector in `(p, q)` order.
pub type Eigenpair = (f64, (f64, f64));

/// Eigen-decomposition of the one-step stability matrix at a hyperbolic
/// fixed point: `((lambda_u, v_u), (lambda_s, v_s))`.
pub fn fixed_point_eigen(fp: (f64, f64), params: RotorParams) -> Result<(Eigenpair, Eigenpair)> {
    let (p1, q1) = step_real(fp.0, fp.1, params.k);
    let displacement = dist((p1, q1), fp);
    if displacement > 1e-12 {
        return Err(Error::NotFixedPoint { p: fp.0, q: fp.1, displacement });
    }
    let m = step_stability(fp.1, params);
    let trace = m[0][0] + m[1][1];
    if trace.abs() <= 2.0 {
        return Err(Error::NotHyperbolic { p: fp.0, q: fp.1, trace });
    }
    let disc = (trace * trace - 4.0).sqrt();
    let (l1, l2) = (0.5 * (trace + disc), 0.5 * (trace - disc));
    let (lu, ls) = if l1.abs() > l2.abs() { (l1, l2) } else { (l2, l1) };
    // (M - lambda) v = 0 with m[0][1] = -K c nonzero for a hyperbolic point
    let eigvec = |l: f64| {
        let v = (-m[0][1], m[0][0] - l);
        let n = v.0.hypot(v.1);
        let v = (v.0 / n, v.1 / n);
        if v.1 < 0.0 { (-v.0, -v.1) } else { v }
    };
    Ok(((lu, eigvec(lu)), (ls, eigvec(ls))))
}

fn grow(
    kind: ManifoldKind,
    fp: (f64, f64),
    direction: (f64, f64),
    params: RotorParams,
    arc_budget: f64,
    options: &ManifoldOptions,
) -> Result<ManifoldCurve> {
    let n = options.initial_points.max(2);
    let eps = options.seed_length;
    let parameters: Vec<f64> = (0..n).map(|i| -eps + 2.0 * eps * i as f64 / (n - 1) as f64).collect();
    let mut curve = ManifoldCurve {
        kind,
        anchor: fp,
        direction,
        iterations: 0,
        params,
        parameters: Vec::new(),
        points: Vec::new(),
    };
    curve.resample(parameters, options)?;
    while curve.arc_length() < arc_budget {
        if curve.iterations >= options.max_iterations {
            return Err(Error::InvalidArgument(format!(
                "manifold did not reach arc length {arc_budget} within {} iterations",
                options.max_iterations
            )));
        }
        curve = curve.advanced(1, options)?;
    }
    Ok(curve)
}

/// Unstable manifold of a hyperbolic fixed point, grown forward until its
/// arc length reaches `arc_budget`.
pub fn unstable_manifold(fp: (f64, f64), params: RotorParams, arc_budget: f64) -> Result<ManifoldCurve> {
    unstable_manifold_with(fp, params, arc_budget, &ManifoldOptions::default())
}

pub fn unstable_manifold_with(
    fp: (f64, f64),
    params: RotorParams,
    arc_budget: f64,
    options: &ManifoldOptions,
) -> Result<ManifoldCurve> {
    let ((_, vu), _) = fixed_point_eigen(fp, params)?;
    grow(ManifoldKind::Unstable, fp, vu, params, arc_budget, options)
}

/// Stable manifold of a hyperbolic fixed point, grown with the inverse map.
pub fn stable_manifold(fp: (f64, f64), params: RotorParams, arc_budget: f64) -> Result<ManifoldCurve> {
    stable_manifold_with(fp, params, arc_budget, &ManifoldOptions::default())
}

pub fn stable_manifold_with(
    fp: (f64, f64),
    params: RotorParams,
    arc_budget: f64,
    options: &ManifoldOptions,
) -> Result<ManifoldCurve> {
    let (_, (_, vs)) = fixed_point_eigen(fp, params)?;
    grow(ManifoldKind::Stable, fp, vs, params, arc_budget, options)
}

/// Default half-width of the shearing line in units of the momentum width.
pub const DEFAULT_SHEAR_WIDTH: f64 = 5.0;

/// Line of initial conditions `q = q_center`, `p = p_center + u`,
/// `|u| <= width * sigma_p`.
pub fn shearing_manifold(packet: &GaussianPacket, params: RotorParams) -> Result<ManifoldCurve> {
    shearing_manifold_with(packet, params, DEFAULT_SHEAR_WIDTH, &ManifoldOptions::default())
}

pub fn shearing_manifold_with(
    packet: &GaussianPacket,
    params: RotorParams,
    width: f64,
    options: &ManifoldOptions,
) -> Result<ManifoldCurve> {
    if packet.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: packet.dim() });
    }
    let w = width * packet.sigma_p();
    let n = options.initial_points.max(2);
    let mut curve = ManifoldCurve {
        kind: ManifoldKind::Shearing,
        anchor: (packet.center_p()[0], packet.center_q()[0]),
        direction: (1.0, 0.0),
        iterations: 0,
        params,
        parameters: Vec::new(),
        points: Vec::new(),
    };
    let parameters = (0..n).map(|i| -w + 2.0 * w * i as f64 / (n - 1) as f64).collect();
    curve.resample(parameters, options)?;
    Ok(curve)
}
