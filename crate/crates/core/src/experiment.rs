//! Kicked-rotor sweeps over `hbar = 1 / (2 pi N)`: configuration, the
//! quantum / off-center / GGWPD comparison, CSV output and the report.

use std::fmt::Write as _;
use std::fs::File;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifold::{shearing_manifold_with, stable_manifold_with, unstable_manifold_with, ManifoldCurve};
use crate::phase_space::{GaussianPacket, C64, I};
use crate::quantum::quantum_correlation;
use crate::rotor::{PropagationOptions, RotorFlow, RotorParams};
use crate::seeds::{find_seeds, Regime, SeedOptions, SeedTrajectory};
use crate::semiclassics::{find_saddle, ggwpd_correlation_with, offcenter_correlation, SaddleOptions, SaddleTrajectory};

pub const PRESETS: [&str; 2] = ["integrable-fig2", "chaotic-fig6"];

/// Per-component tolerance of the seed and saddle regression checks.
pub const REGRESSION_TOL: f64 = 1e-6;
/// Largest saddle shift allowed between the extreme N of a sweep.
pub const INVARIANCE_TOL: f64 = 1e-10;
pub const MAX_NEWTON_ITERATIONS: usize = 8;

/// Smallest N at which the convergence checks start.
const BASELINE_N: usize = 100;

fn default_image_range() -> i64 {
    1
}
fn default_tol() -> f64 {
    SaddleOptions::default().tol
}
fn default_max_iter() -> usize {
    SaddleOptions::default().max_iter
}
fn default_prune_sigma() -> f64 {
    SeedOptions::default().prune_sigma
}
fn default_prune_relative() -> f64 {
    crate::semiclassics::ggwpd::PRUNE_RELATIVE
}
fn default_substeps() -> usize {
    PropagationOptions::default().substeps
}

/// A sweep scenario. Packets at each N are rotor packets with
/// `b = pi N`. Centers are `(p, q)` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: String,
    #[serde(rename = "K")]
    pub k: f64,
    pub t: usize,
    pub alpha_center: (f64, f64),
    pub beta_center: (f64, f64),
    #[serde(rename = "N_list")]
    pub n_list: Vec<usize>,
    pub regime: Regime,
    #[serde(default = "default_image_range")]
    pub image_range: i64,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// Seed cutoff in packet widths at the smallest N.
    #[serde(default = "default_prune_sigma")]
    pub prune_sigma: f64,
    /// Relative weight below which saddle branches are dropped.
    #[serde(default = "default_prune_relative")]
    pub prune_relative: f64,
    /// Stability checkpoints per kick and per drift.
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    #[serde(default)]
    pub reference: Reference,
}

/// Published values a sweep is checked against.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Reference {
    /// Real seeds `(p, q)`.
    pub seeds: Vec<(f64, f64)>,
    /// Saddle initial conditions `[Re P0, Im P0, Re Q0, Im Q0]`.
    pub saddles: Vec<[f64; 4]>,
    /// Smallest acceptable `|C_qm - C_oc| / |C_qm - C_ggwpd|` at the largest N.
    pub min_error_ratio: Option<f64>,
}

fn preset_n_list() -> Vec<usize> {
    (50..=700).step_by(50).collect()
}

impl ExperimentConfig {
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "integrable-fig2" => Ok(Self {
                name: name.into(),
                k: 0.05,
                t: 2,
                alpha_center: (0.815, 0.2),
                beta_center: (0.77, 0.8),
                n_list: preset_n_list(),
                regime: Regime::Integrable,
                image_range: 1,
                tol: default_tol(),
                max_iter: default_max_iter(),
                prune_sigma: default_prune_sigma(),
                prune_relative: default_prune_relative(),
                substeps: default_substeps(),
                reference: Reference {
                    seeds: vec![(0.8075799, 0.2)],
                    saddles: vec![[0.8019843, 0.0062830, 0.2062830, 0.0130157]],
                    min_error_ratio: Some(10.0),
                },
            }),
            "chaotic-fig6" => Ok(Self {
                name: name.into(),
                k: 8.25,
                t: 2,
                alpha_center: (0.0, 0.0),
                beta_center: (0.0, 0.5),
                n_list: preset_n_list(),
                regime: Regime::Chaotic,
                // the branches reach momentum images up to |n_p| = 2
                image_range: 3,
                tol: default_tol(),
                max_iter: default_max_iter(),
                prune_sigma: default_prune_sigma(),
                prune_relative: default_prune_relative(),
                substeps: default_substeps(),
                reference: Reference {
                    seeds: vec![(-0.0892369, -0.0766275), (-0.1125783, -0.0966593)],
                    saddles: vec![
                        [0.0095152, -0.0611558, -0.0611558, -0.0095152],
                        [0.0115409, -0.0764952, -0.0764952, -0.0115409],
                    ],
                    min_error_ratio: None,
                },
            }),
            _ => Err(Error::Config(format!("unknown preset {name:?}; expected one of {PRESETS:?}"))),
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.into(), source })?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Config(msg));
        if !(self.k >= 0.0) || !self.k.is_finite() {
            return fail(format!("K must be finite and >= 0, got {}", self.k));
        }
        if self.t == 0 {
            return fail("t must be >= 1".into());
        }
        if let Some(n) = self.n_list.iter().find(|&&n| n < 2 || n % 2 == 1) {
            return fail(format!("N_list entries must be even and >= 2, got {n}"));
        }
        if self.image_range < 0 {
            return fail(format!("image_range must be >= 0, got {}", self.image_range));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 || self.substeps == 0 {
            return fail("tol, max_iter and substeps must be positive".into());
        }
        if !(self.prune_sigma > 0.0) || !(self.prune_relative >= 0.0) {
            return fail("pruning thresholds must be positive".into());
        }
        let finite = [self.alpha_center.0, self.alpha_center.1, self.beta_center.0, self.beta_center.1];
        if finite.iter().any(|v| !v.is_finite()) {
            return fail("packet centers must be finite".into());
        }
        Ok(())
    }

    pub fn params(&self) -> Result<RotorParams> {
        RotorParams::new(self.k)
    }

    pub fn flow(&self) -> Result<RotorFlow> {
        let options = PropagationOptions { substeps: self.substeps, ..Default::default() };
        Ok(RotorFlow::new(self.params()?, self.t).with_options(options))
    }

    pub fn packets(&self, n: usize) -> Result<(GaussianPacket, GaussianPacket)> {
        Ok((
            GaussianPacket::rotor(self.alpha_center.0, self.alpha_center.1, n)?,
            GaussianPacket::rotor(self.beta_center.0, self.beta_center.1, n)?,
        ))
    }

    pub fn seed_options(&self) -> SeedOptions {
        SeedOptions { image_range: self.image_range, prune_sigma: self.prune_sigma, ..Default::default() }
    }

    pub fn saddle_options(&self) -> SaddleOptions {
        SaddleOptions { tol: self.tol, max_iter: self.max_iter, ..Default::default() }
    }
}

/// Seeds and converged saddles of a scenario, found with the packets at `n`.
pub fn find_branches(config: &ExperimentConfig, n: usize) -> Result<(Vec<SeedTrajectory>, Vec<SaddleTrajectory>)> {
    let (alpha, beta) = config.packets(n)?;
    let seeds = find_seeds(&alpha, &beta, config.t, config.params()?, config.regime, &config.seed_options())?;
    let flow = config.flow()?;
    let saddles = seeds
        .iter()
        .map(|s| find_saddle(&alpha, &beta, s, &flow, &config.saddle_options()))
        .collect::<Result<Vec<_>>>()?;
    Ok((seeds, saddles))
}

/// Phase-space curves behind the seed search, named for output files:
/// the shearing line of `alpha` and its image for integrable scenarios,
/// the unstable manifold through `alpha`, its image and the stable
/// manifold through `beta` for chaotic ones.
pub fn manifold_curves(config: &ExperimentConfig, n: usize) -> Result<Vec<(&'static str, ManifoldCurve)>> {
    let (alpha, _) = config.packets(n)?;
    let params = config.params()?;
    let opts = config.seed_options();
    Ok(match config.regime {
        Regime::Integrable => {
            let line = shearing_manifold_with(&alpha, params, opts.shear_width_sigma, &opts.manifold)?;
            let image = line.advanced(config.t, &opts.manifold)?;
            vec![("shear-initial", line), ("shear-propagated", image)]
        }
        Regime::Chaotic => {
            let unstable = unstable_manifold_with(config.alpha_center, params, opts.arc_budget, &opts.manifold)?
                .local_branch(opts.branch_radius);
            let image = unstable.advanced(config.t, &opts.manifold)?;
            let stable = stable_manifold_with(config.beta_center, params, opts.arc_budget, &opts.manifold)?
                .local_branch(opts.branch_radius);
            vec![("unstable-initial", unstable), ("unstable-propagated", image), ("stable-final", stable)]
        }
    })
}

/// One N of a sweep. Failed evaluations leave NaN in their columns and a
/// message in `status`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub c_qm: C64,
    pub c_oc: C64,
    pub c_ggwpd: C64,
    pub abs_err_oc: f64,
    pub abs_err_ggwpd: f64,
    pub ratio_oc: f64,
    pub ratio_ggwpd: f64,
    pub phase_err_oc: f64,
    pub phase_err_ggwpd: f64,
    pub status: String,
}

/// `arg(a conj(b))` in `(-pi, pi]`.
pub fn phase_difference(a: C64, b: C64) -> f64 {
    let phase = (a * b.conj()).arg();
    if phase == -std::f64::consts::PI {
        std::f64::consts::PI
    } else {
        phase
    }
}

impl SweepRow {
    pub fn new(n: usize, c_qm: C64, c_oc: C64, c_ggwpd: C64, status: String) -> Self {
        Self {
            n,
            c_qm,
            c_oc,
            c_ggwpd,
            abs_err_oc: (c_qm - c_oc).norm(),
            abs_err_ggwpd: (c_qm - c_ggwpd).norm(),
            ratio_oc: c_qm.norm() / c_oc.norm(),
            ratio_ggwpd: c_qm.norm() / c_ggwpd.norm(),
            phase_err_oc: phase_difference(c_qm, c_oc),
            phase_err_ggwpd: phase_difference(c_qm, c_ggwpd),
            status,
        }
    }

    pub fn is_ok(&self) -> bool {
        self.status == "ok"
    }
}

/// Everything a sweep produced.
#[derive(Clone, Debug)]
pub struct SweepOutcome {
    pub config: ExperimentConfig,
    pub seeds: Vec<SeedTrajectory>,
    pub saddles: Vec<SaddleTrajectory>,
    /// Largest shift of a saddle re-converged at the largest N.
    pub invariance: Option<f64>,
    /// Seed or saddle failure shared by every row.
    pub failure: Option<String>,
    pub rows: Vec<SweepRow>,
}

const NAN: C64 = C64::new(f64::NAN, f64::NAN);

/// Runs the three-way comparison at every N of the configuration. Seeds
/// and saddles are found once at the smallest N and reused, after checking
/// that the saddles at the largest N coincide.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepOutcome> {
    config.validate()?;
    let mut ns = config.n_list.clone();
    ns.sort_unstable();
    ns.dedup();
    let mut outcome = SweepOutcome {
        config: config.clone(),
        seeds: vec![],
        saddles: vec![],
        invariance: None,
        failure: None,
        rows: vec![],
    };
    let (Some(&n_min), Some(&n_max)) = (ns.first(), ns.last()) else {
        return Ok(outcome);
    };
    let flow = config.flow()?;
    match find_branches(config, n_min) {
        Ok((seeds, _)) if seeds.is_empty() => {
            outcome.failure = Some(format!("no branches within {} widths at N = {n_min}", config.prune_sigma));
        }
        Ok((seeds, saddles)) => {
            outcome.seeds = seeds;
            outcome.saddles = saddles;
        }
        Err(e) => outcome.failure = Some(e.to_string()),
    }
    if outcome.failure.is_none() {
        outcome.invariance = Some(invariance(config, &outcome.saddles, n_max, &flow)?);
    }

    outcome.rows = ns
        .par_iter()
        .map(|&n| sweep_row(config, n, &outcome, &flow))
        .collect();
    Ok(outcome)
}

fn invariance(config: &ExperimentConfig, saddles: &[SaddleTrajectory], n: usize, flow: &RotorFlow) -> Result<f64> {
    let (alpha, beta) = config.packets(n)?;
    let mut worst: f64 = 0.0;
    for s in saddles {
        worst = match find_saddle(&alpha, &beta, &s.seed, flow, &config.saddle_options()) {
            Ok(again) => worst.max(again.initial().distance(s.initial())),
            Err(_) => f64::INFINITY,
        };
    }
    Ok(worst)
}

fn sweep_row(config: &ExperimentConfig, n: usize, outcome: &SweepOutcome, flow: &RotorFlow) -> SweepRow {
    let (alpha, beta) = match config.packets(n) {
        Ok(packets) => packets,
        Err(e) => return SweepRow::new(n, NAN, NAN, NAN, format!("packets: {e}")),
    };
    let mut problems = vec![];
    let mut note = |r: Result<C64>, what: &str| {
        r.unwrap_or_else(|e| {
            problems.push(format!("{what}: {e}"));
            NAN
        })
    };
    let c_qm = note(quantum_correlation(&alpha, &beta, config.t, n, config.k), "quantum");
    let (c_oc, c_ggwpd) = match &outcome.failure {
        Some(f) => (note(Err(Error::Config(f.clone())), "branches"), NAN),
        None => (
            note(offcenter_correlation(&alpha, &beta, &outcome.seeds, flow).map(|r| r.total), "offcenter"),
            note(
                ggwpd_correlation_with(&alpha, &beta, &outcome.saddles, config.prune_relative).map(|r| r.total),
                "ggwpd",
            ),
        ),
    };
    let status = if problems.is_empty() { "ok".to_string() } else { problems.join("; ") };
    SweepRow::new(n, c_qm, c_oc, c_ggwpd, status)
}

pub const CSV_HEADER: [&str; 14] = [
    "N",
    "C_qm_re",
    "C_qm_im",
    "C_oc_re",
    "C_oc_im",
    "C_ggwpd_re",
    "C_ggwpd_im",
    "abs_err_oc",
    "abs_err_ggwpd",
    "ratio_oc",
    "ratio_ggwpd",
    "phase_err_oc",
    "phase_err_ggwpd",
    "status",
];

fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes the rows as CSV with one header line; reals carry 17
/// significant digits so the file parses back bit-exactly.
pub fn emit_csv(rows: &[SweepRow], path: &Path) -> Result<()> {
    let csv_err = |source| Error::Csv { path: path.into(), source };
    let file = File::create(path).map_err(|source| Error::Io { path: path.into(), source })?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in rows {
        let reals = [
            r.c_qm.re,
            r.c_qm.im,
            r.c_oc.re,
            r.c_oc.im,
            r.c_ggwpd.re,
            r.c_ggwpd.im,
            r.abs_err_oc,
            r.abs_err_ggwpd,
            r.ratio_oc,
            r.ratio_ggwpd,
            r.phase_err_oc,
            r.phase_err_ggwpd,
        ];
        let mut record = vec![r.n.to_string()];
        record.extend(reals.iter().map(|&x| fmt_real(x)));
        record.push(r.status.clone());
        w.write_record(&record).map_err(csv_err)?;
    }
    w.flush().map_err(|source| Error::Io { path: path.into(), source })
}

/// Parses a file written by [`emit_csv`].
pub fn read_csv(path: &Path) -> Result<Vec<SweepRow>> {
    let csv_err = |source| Error::Csv { path: path.into(), source };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = reader.headers().map_err(csv_err)?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::Config(format!("{}: unexpected header", path.display())));
    }
    let bad = |field: &str| Error::Config(format!("{}: bad field {field:?}", path.display()));
    reader
        .records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let real = |i: usize| rec[i].parse::<f64>().map_err(|_| bad(&rec[i]));
            Ok(SweepRow {
                n: rec[0].parse().map_err(|_| bad(&rec[0]))?,
                c_qm: C64::new(real(1)?, real(2)?),
                c_oc: C64::new(real(3)?, real(4)?),
                c_ggwpd: C64::new(real(5)?, real(6)?),
                abs_err_oc: real(7)?,
                abs_err_ggwpd: real(8)?,
                ratio_oc: real(9)?,
                ratio_ggwpd: real(10)?,
                phase_err_oc: real(11)?,
                phase_err_ggwpd: real(12)?,
                status: rec[13].to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug)]
pub struct Report {
    pub checks: Vec<Check>,
    pub text: String,
}

impl Report {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn components(s: &SaddleTrajectory) -> [f64; 4] {
    let z = s.initial();
    [z.p[0].re, z.p[0].im, z.q[0].re, z.q[0].im]
}

fn max_component_gap(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// `|hbar C0|`, the distance of a saddle's start from the ket manifold of
/// `alpha`; for `2 sigma^2 = hbar` packets it reads `|(Q0 - q) + i (P0 - p)|`.
fn manifold_defect(config: &ExperimentConfig, s: &SaddleTrajectory) -> f64 {
    let z = s.initial();
    let (p, q) = config.alpha_center;
    ((z.q[0] - q) + I * (z.p[0] - p)).norm()
}

struct Checks(Vec<Check>);

impl Checks {
    fn push(&mut self, name: &str, pass: bool, detail: String) {
        self.0.push(Check { name: name.into(), pass, detail });
    }
}

/// Table of the sweep plus pass/fail lines for its acceptance checks.
pub fn emit_report(outcome: &SweepOutcome) -> Report {
    let config = &outcome.config;
    let mut text = String::new();
    let mut checks = Checks(vec![]);
    let _ = writeln!(
        text,
        "scenario {}: K={} t={} alpha=({}, {}) beta=({}, {}) regime={:?}",
        if config.name.is_empty() { "<unnamed>" } else { &config.name },
        config.k,
        config.t,
        config.alpha_center.0,
        config.alpha_center.1,
        config.beta_center.0,
        config.beta_center.1,
        config.regime,
    );

    let complete = outcome.failure.is_none() && outcome.rows.iter().all(SweepRow::is_ok);
    let detail = match &outcome.failure {
        Some(f) => f.clone(),
        None => format!("{} of {} rows ok", outcome.rows.iter().filter(|r| r.is_ok()).count(), outcome.rows.len()),
    };
    checks.push("sweep complete", complete, detail);

    let _ = writeln!(text, "\nbranches ({}):", outcome.saddles.len());
    for s in &outcome.saddles {
        let z = s.initial();
        let _ = writeln!(
            text,
            "  seed ({:+.7}, {:+.7}) winding ({}, {})  saddle P0 = {:+.7}{:+.7}i  Q0 = {:+.7}{:+.7}i  iterations {}  residual {:.1e}  |P0 - p - i(Q0 - q)| {:.1e}",
            s.seed.ic.0,
            s.seed.ic.1,
            s.seed.winding.n_p,
            s.seed.winding.n_q,
            z.p[0].re,
            z.p[0].im,
            z.q[0].re,
            z.q[0].im,
            s.iterations,
            s.residual_norm,
            manifold_defect(config, s),
        );
    }

    for &(p, q) in &config.reference.seeds {
        let gap = outcome
            .seeds
            .iter()
            .map(|s| (s.ic.0 - p).abs().max((s.ic.1 - q).abs()))
            .fold(f64::INFINITY, f64::min);
        checks.push(
            &format!("seed ({p}, {q})"),
            gap <= REGRESSION_TOL,
            format!("nearest seed deviates by {gap:.3e} (tolerance {REGRESSION_TOL:.0e})"),
        );
    }
    for &want in &config.reference.saddles {
        let best = outcome
            .saddles
            .iter()
            .min_by(|a, b| max_component_gap(components(a), want).total_cmp(&max_component_gap(components(b), want)));
        let (pass, detail) = match best {
            Some(s) => {
                let got = components(s);
                let gaps: Vec<String> = got.iter().zip(want).map(|(g, w)| format!("{:.1e}", (g - w).abs())).collect();
                (
                    max_component_gap(got, want) <= REGRESSION_TOL,
                    format!("component deviations [Re P0, Im P0, Re Q0, Im Q0] = [{}]", gaps.join(", ")),
                )
            }
            None => (false, "no saddles".into()),
        };
        checks.push(
            &format!("saddle ({}{:+}i, {}{:+}i)", want[0], want[1], want[2], want[3]),
            pass,
            detail,
        );
    }
    if !outcome.saddles.is_empty() {
        let worst_iter = outcome.saddles.iter().map(|s| s.iterations).max().unwrap_or(0);
        let worst_res = outcome.saddles.iter().map(|s| s.residual_norm).fold(0.0, f64::max);
        checks.push(
            "newton convergence",
            worst_iter <= MAX_NEWTON_ITERATIONS && worst_res < config.tol,
            format!("at most {worst_iter} iterations, largest residual {worst_res:.1e}"),
        );
        let defect = outcome.saddles.iter().map(|s| manifold_defect(config, s)).fold(0.0, f64::max);
        checks.push("initial manifold identity", defect < config.tol, format!("largest defect {defect:.1e}"));
    }
    if let Some(gap) = reflection_gap(outcome) {
        checks.push(
            "reflection symmetry",
            gap <= INVARIANCE_TOL,
            format!("largest |reflected saddle + saddle| {gap:.1e}"),
        );
    }
    if let Some(shift) = outcome.invariance {
        checks.push(
            "hbar invariance of saddles",
            shift <= INVARIANCE_TOL,
            format!("largest shift between N extremes {shift:.1e}"),
        );
    }

    let _ = writeln!(
        text,
        "\n{:>5} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11} {:>11}  status",
        "N", "|C_qm|", "err_oc", "err_ggwpd", "ratio_oc", "ratio_gg", "phase_oc", "phase_gg"
    );
    for r in &outcome.rows {
        let _ = writeln!(
            text,
            "{:>5} {:>11.4e} {:>11.4e} {:>11.4e} {:>11.6} {:>11.6} {:>11.3e} {:>11.3e}  {}",
            r.n,
            r.c_qm.norm(),
            r.abs_err_oc,
            r.abs_err_ggwpd,
            r.ratio_oc,
            r.ratio_ggwpd,
            r.phase_err_oc,
            r.phase_err_ggwpd,
            r.status
        );
    }
    convergence_checks(outcome, &mut checks);

    let _ = writeln!(text);
    for c in &checks.0 {
        let _ = writeln!(text, "{} {}: {}", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    Report { checks: checks.0, text }
}

fn reflection_gap(outcome: &SweepOutcome) -> Option<f64> {
    // mirroring through the origin maps alpha to itself only when it sits there
    let (a, b) = (outcome.config.alpha_center, outcome.config.beta_center);
    if a != (0.0, 0.0) || outcome.saddles.is_empty() {
        return None;
    }
    let mut worst: f64 = 0.0;
    for s in &outcome.saddles {
        let mirror = s.seed.reflected(b)?;
        let partner = outcome
            .saddles
            .iter()
            .find(|o| o.seed.winding == mirror.winding && (o.seed.ic.0 - mirror.ic.0).hypot(o.seed.ic.1 - mirror.ic.1) < 1e-9);
        worst = match partner {
            Some(o) => {
                let (z, w) = (s.initial(), o.initial());
                worst.max((z.p[0] + w.p[0]).norm().max((z.q[0] + w.q[0]).norm()))
            }
            None => f64::INFINITY,
        };
    }
    Some(worst)
}

fn convergence_checks(outcome: &SweepOutcome, checks: &mut Checks) {
    let rows: Vec<&SweepRow> = outcome.rows.iter().filter(|r| r.n >= BASELINE_N).collect();
    let (Some(first), Some(last)) = (rows.first(), rows.last()) else {
        return;
    };
    let hierarchy = rows.iter().all(|r| r.abs_err_ggwpd < r.abs_err_oc);
    let violations: Vec<String> =
        rows.iter().filter(|r| !(r.abs_err_ggwpd < r.abs_err_oc)).map(|r| r.n.to_string()).collect();
    checks.push(
        "error hierarchy",
        hierarchy,
        if violations.is_empty() {
            format!("|C_qm - C_ggwpd| < |C_qm - C_oc| for all {} rows with N >= {BASELINE_N}", rows.len())
        } else {
            format!("violated at N = {}", violations.join(", "))
        },
    );
    let error_ratio = last.abs_err_oc / last.abs_err_ggwpd;
    if let Some(min) = outcome.config.reference.min_error_ratio {
        checks.push(
            "error ratio at largest N",
            error_ratio >= min,
            format!("{error_ratio:.2} at N = {} (need >= {min})", last.n),
        );
    }
    if first.n == last.n {
        return;
    }
    let dev = |r: &SweepRow| (r.ratio_ggwpd - 1.0).abs();
    let dev_oc = (last.ratio_oc - 1.0).abs();
    checks.push(
        "ratio convergence",
        dev(last) < 1e-2 && dev(last) < dev(first) && dev_oc >= 5.0 * dev(last),
        format!(
            "|A_qm/A_ggwpd - 1| = {:.2e} at N = {} vs {:.2e} at N = {}; |A_qm/A_oc - 1| = {:.2e}",
            dev(last),
            last.n,
            dev(first),
            first.n,
            dev_oc
        ),
    );
    let ph = |r: &SweepRow| r.phase_err_ggwpd.abs();
    checks.push(
        "phase convergence",
        ph(last) < 1e-2 && ph(last) < ph(first),
        format!("|phase_err_ggwpd| = {:.2e} rad at N = {} vs {:.2e} at N = {}", ph(last), last.n, ph(first), first.n),
    );
    let bound = outcome.rows.iter().map(|r| r.c_qm.norm()).fold(0.0, f64::max);
    checks.push("quantum correlation bound", bound <= 1.0 + 1e-12, format!("largest |C_qm| {bound:.6}"));
}
