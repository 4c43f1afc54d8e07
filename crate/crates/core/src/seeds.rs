//! Real off-center seed trajectories for the saddle search.
//!
//! Integrable transport is seeded from the shearing line of the initial
//! packet, chaotic transport from heteroclinic intersections between the
//! unstable manifold of the initial center and the stable manifold of each
//! torus image of the final center.

use serde::{Deserialize, Serialize};

use crate::dynamics::Winding;
use crate::error::{Error, Result};
use crate::manifold::{
    shearing_manifold_with, stable_manifold_with, unstable_manifold_with, ManifoldCurve, ManifoldOptions,
};
use crate::phase_space::GaussianPacket;
use crate::rotor::{step_real, RotorParams};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedKind {
    Integrable,
    Heteroclinic,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Integrable,
    Chaotic,
}

/// A real trajectory standing for one branch of the transport sum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedTrajectory {
    /// Initial condition `(p, q)`.
    pub ic: (f64, f64),
    pub t: usize,
    /// Image of the final packet the trajectory reaches.
    pub winding: Winding,
    pub kind: SeedKind,
}

impl SeedTrajectory {
    /// Real endpoint after `t` unfolded steps.
    pub fn endpoint(&self, params: RotorParams) -> (f64, f64) {
        (0..self.t).fold(self.ic, |(p, q), _| step_real(p, q, params.k))
    }

    /// The seed mirrored through the origin. The image `c + w` of a final
    /// center `c` goes to `-c - w`, which is again an image of `c` when `2c`
    /// is a lattice vector; otherwise `None`.
    pub fn reflected(&self, center: (f64, f64)) -> Option<SeedTrajectory> {
        let (dp, dq) = (-2.0 * center.0, -2.0 * center.1);
        if dp.fract() != 0.0 || dq.fract() != 0.0 {
            return None;
        }
        let winding = Winding::new(dp as i64 - self.winding.n_p, dq as i64 - self.winding.n_q);
        Some(SeedTrajectory { ic: (-self.ic.0, -self.ic.1), winding, ..*self })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SeedOptions {
    /// Largest `|n_p|` and `|n_q|` considered.
    pub image_range: i64,
    /// Branches whose initial point or endpoint lies further than this many
    /// packet widths from the respective center are dropped.
    pub prune_sigma: f64,
    /// Half-width of the shearing line in momentum widths.
    pub shear_width_sigma: f64,
    /// Radius of the local invariant-manifold branches used for chaotic seeds.
    pub branch_radius: f64,
    /// Arc length grown before clipping to the local branch.
    pub arc_budget: f64,
    pub manifold: ManifoldOptions,
}

impl Default for SeedOptions {
    fn default() -> Self {
        Self {
            image_range: 1,
            prune_sigma: 5.0,
            shear_width_sigma: 5.0,
            branch_radius: 0.3,
            arc_budget: 2.0,
            manifold: ManifoldOptions::default(),
        }
    }
}

/// Phase-space distance in packet widths.
fn width_distance(packet: &GaussianPacket, p: f64, q: f64) -> f64 {
    let dp = (p - packet.center_p()[0]) / packet.sigma_p();
    let dq = (q - packet.center_q()[0]) / packet.sigma();
    dp.hypot(dq)
}

fn check_1d(packet: &GaussianPacket) -> Result<()> {
    if packet.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: packet.dim() });
    }
    Ok(())
}

/// Locates one representative real trajectory per transport branch from
/// `alpha` to the torus images of `beta` after `t` kicks.
pub fn find_seeds(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    t: usize,
    params: RotorParams,
    regime: Regime,
    options: &SeedOptions,
) -> Result<Vec<SeedTrajectory>> {
    check_1d(alpha)?;
    check_1d(beta)?;
    let mut seeds = match regime {
        Regime::Integrable => integrable_seeds(alpha, beta, t, params, options)?,
        Regime::Chaotic => heteroclinic_seeds(alpha, beta, t, params, options)?,
    };
    seeds.retain(|s| {
        let (pe, qe) = s.endpoint(params);
        let beta_image = crate::dynamics::packet_image(beta, s.winding);
        width_distance(alpha, s.ic.0, s.ic.1) <= options.prune_sigma
            && width_distance(&beta_image, pe, qe) <= options.prune_sigma
    });
    seeds.sort_by(|a, b| {
        a.winding
            .cmp(&b.winding)
            .then(a.ic.0.total_cmp(&b.ic.0))
            .then(a.ic.1.total_cmp(&b.ic.1))
    });
    seeds.dedup_by(|a, b| a.winding == b.winding && (a.ic.0 - b.ic.0).hypot(a.ic.1 - b.ic.1) < 1e-9);
    Ok(seeds)
}

fn integrable_seeds(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    t: usize,
    params: RotorParams,
    options: &SeedOptions,
) -> Result<Vec<SeedTrajectory>> {
    let line = shearing_manifold_with(alpha, params, options.shear_width_sigma, &options.manifold)?;
    let image = line.advanced(t, &options.manifold)?;
    let (pb, qb) = (beta.center_p()[0], beta.center_q()[0]);
    let range = options.image_range;
    let mut seeds = Vec::new();
    for n_q in -range..=range {
        let target = qb + n_q as f64;
        let g = |u: f64| image.evaluate(u).1 - target;
        for i in 0..image.len().saturating_sub(1) {
            let (ga, gb) = (image.points[i].1 - target, image.points[i + 1].1 - target);
            if ga == 0.0 || ga.signum() != gb.signum() {
                let u = bisect(&g, image.parameters[i], image.parameters[i + 1]);
                let ic = (alpha.center_p()[0] + u, alpha.center_q()[0]);
                let seed = SeedTrajectory { ic, t, winding: Winding::ZERO, kind: SeedKind::Integrable };
                let (pe, _) = seed.endpoint(params);
                let n_p = (pe - pb).round() as i64;
                if n_p.abs() <= range {
                    seeds.push(SeedTrajectory { winding: Winding::new(n_p, n_q), ..seed });
                }
            }
        }
    }
    Ok(seeds)
}

/// Root of `g` on a sign-changing bracket, to rounding level.
fn bisect(g: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let mut ga = g(a);
    if ga == 0.0 {
        return a;
    }
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        let gm = g(m);
        if gm == 0.0 {
            return m;
        }
        if gm.signum() == ga.signum() {
            a = m;
            ga = gm;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn heteroclinic_seeds(
    alpha: &GaussianPacket,
    beta: &GaussianPacket,
    t: usize,
    params: RotorParams,
    options: &SeedOptions,
) -> Result<Vec<SeedTrajectory>> {
    let fa = (alpha.center_p()[0], alpha.center_q()[0]);
    let fb = (beta.center_p()[0], beta.center_q()[0]);
    let unstable = unstable_manifold_with(fa, params, options.arc_budget, &options.manifold)?
        .local_branch(options.branch_radius);
    let transported = unstable.advanced(t, &options.manifold)?;
    let stable = stable_manifold_with(fb, params, options.arc_budget, &options.manifold)?
        .local_branch(options.branch_radius);

    let (tp0, tp1, tq0, tq1) = transported.bounds();
    let (sp0, sp1, sq0, sq1) = stable.bounds();
    let range = options.image_range;
    let mut seeds = Vec::new();
    for n_p in -range..=range {
        for n_q in -range..=range {
            let shift = (n_p as f64, n_q as f64);
            let bbox = (sp0 + shift.0, sp1 + shift.0, sq0 + shift.1, sq1 + shift.1);
            if bbox.1 < tp0 || bbox.0 > tp1 || bbox.3 < tq0 || bbox.2 > tq1 {
                continue;
            }
            for (u, s) in crossings(&transported, &stable, shift, bbox) {
                let u = polish(&transported, &stable, shift, u, s).unwrap_or(u);
                seeds.push(SeedTrajectory {
                    ic: unstable.evaluate(u),
                    t,
                    winding: Winding::new(n_p, n_q),
                    kind: SeedKind::Heteroclinic,
                });
            }
        }
    }
    Ok(seeds)
}

/// Parameter pairs `(u, s)` where the sampled polylines `a` and `b + shift`
/// cross, linearly interpolated within the crossing segments.
fn crossings(
    a: &ManifoldCurve,
    b: &ManifoldCurve,
    shift: (f64, f64),
    bbox: (f64, f64, f64, f64),
) -> Vec<(f64, f64)> {
    let shifted: Vec<(f64, f64)> = b.points.iter().map(|&(p, q)| (p + shift.0, q + shift.1)).collect();
    let mut out = Vec::new();
    for i in 0..a.len().saturating_sub(1) {
        let (a0, a1) = (a.points[i], a.points[i + 1]);
        if a0.0.max(a1.0) < bbox.0 || a0.0.min(a1.0) > bbox.1 || a0.1.max(a1.1) < bbox.2 || a0.1.min(a1.1) > bbox.3 {
            continue;
        }
        for j in 0..shifted.len().saturating_sub(1) {
            if let Some((x, y)) = segment_intersection(a0, a1, shifted[j], shifted[j + 1]) {
                let u = a.parameters[i] + x * (a.parameters[i + 1] - a.parameters[i]);
                let s = b.parameters[j] + y * (b.parameters[j + 1] - b.parameters[j]);
                out.push((u, s));
            }
        }
    }
    out
}

/// Fractions `(x, y)` along `a0 -> a1` and `b0 -> b1` of a proper crossing.
fn segment_intersection(a0: (f64, f64), a1: (f64, f64), b0: (f64, f64), b1: (f64, f64)) -> Option<(f64, f64)> {
    let r = (a1.0 - a0.0, a1.1 - a0.1);
    let s = (b1.0 - b0.0, b1.1 - b0.1);
    let denom = r.0 * s.1 - r.1 * s.0;
    if denom == 0.0 {
        return None;
    }
    let d = (b0.0 - a0.0, b0.1 - a0.1);
    let x = (d.0 * s.1 - d.1 * s.0) / denom;
    let y = (d.0 * r.1 - d.1 * r.0) / denom;
    // half-open on the far end so shared vertices are counted once
    ((0.0..1.0).contains(&x) && (0.0..1.0).contains(&y)).then_some((x, y))
}

/// Newton refinement of a crossing in the seed parameters of both curves.
/// The residual stalls at the rounding floor of the long compositions, so
/// the best iterate is kept once progress stops.
fn polish(a: &ManifoldCurve, b: &ManifoldCurve, shift: (f64, f64), mut u: f64, mut s: f64) -> Option<f64> {
    let mut best = (f64::INFINITY, u);
    let mut stalled = 0;
    for _ in 0..60 {
        let (pa, qa, dpa, dqa) = a.evaluate_tangent(u);
        let (pb, qb, dpb, dqb) = b.evaluate_tangent(s);
        let (fp, fq) = (pa - pb - shift.0, qa - qb - shift.1);
        let residual = fp.hypot(fq);
        if residual < best.0 {
            best = (residual, u);
            stalled = 0;
        } else {
            stalled += 1;
            if stalled >= 4 {
                break;
            }
        }
        // [dpa -dpb; dqa -dqb] [du; ds] = -[fp; fq]
        let det = dpb * dqa - dpa * dqb;
        if det == 0.0 {
            break;
        }
        u += (fp * dqb - dpb * fq) / det;
        s += (dqa * fp - dpa * fq) / det;
    }
    (best.0 < 1e-10).then_some(best.1)
}
