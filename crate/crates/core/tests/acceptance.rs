//! End-to-end acceptance checks, one PASS/FAIL line per criterion.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::time::{Duration, Instant};

use ggwpd::dynamics::Flow;
use ggwpd::experiment::{emit_csv, find_branches, run_sweep, ExperimentConfig, SweepOutcome, SweepRow};
use ggwpd::phase_space::{ComplexPhasePoint, GaussianPacket, C64};
use ggwpd::quantum::{discretize_packet, floquet_matrix};
use ggwpd::rotor::{propagate, RotorParams};
use ggwpd::seeds::SeedTrajectory;
use ggwpd::semiclassics::offcenter::position;
use ggwpd::semiclassics::{
    find_position_saddle, free_particle_exact, free_particle_offcenter, ggwpd_wavefunction,
    linearized_wavefunction, offcenter_wavefunction, FreeFlow, SaddleOptions, SaddleTrajectory,
};

const I: C64 = C64::new(0.0, 1.0);

struct Verdict {
    pass: bool,
    notes: Vec<String>,
}

impl Verdict {
    fn new() -> Self {
        Self { pass: true, notes: vec![] }
    }

    fn check(&mut self, ok: bool, note: String) {
        self.pass &= ok;
        self.notes.push(format!("{}{}", if ok { "" } else { "[fail] " }, note));
    }
}

fn preset(name: &str) -> ExperimentConfig {
    ExperimentConfig::preset(name).expect("preset exists")
}

fn components(s: &SaddleTrajectory) -> [f64; 4] {
    let z = s.initial();
    [z.p[0].re, z.p[0].im, z.q[0].re, z.q[0].im]
}

fn gap4(a: [f64; 4], b: [f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn seed_gap(seeds: &[SeedTrajectory], want: (f64, f64)) -> f64 {
    seeds.iter().map(|s| (s.ic.0 - want.0).abs().max((s.ic.1 - want.1).abs())).fold(f64::INFINITY, f64::min)
}

fn criterion_1() -> Verdict {
    let mut v = Verdict::new();
    let config = preset("integrable-fig2");
    let start = Instant::now();
    let branches = find_branches(&config, config.n_list[0]);
    let elapsed = start.elapsed();
    let Ok((seeds, saddles)) = branches else {
        v.check(false, format!("branch search failed: {:?}", branches.err()));
        return v;
    };
    v.check(seeds.len() == 1, format!("{} seed(s)", seeds.len()));
    let gap = seed_gap(&seeds, (0.8075799, 0.2));
    v.check(gap <= 1e-6, format!("seed {:?} deviates from (0.8075799, 0.20) by {gap:.2e} (tol 1e-6)", seeds[0].ic));
    let want = [0.8019843, 0.0062830, 0.2062830, 0.0130157];
    let s = &saddles[0];
    v.check(gap4(components(s), want) <= 1e-6, format!("saddle deviation {:.1e} (tol 1e-6)", gap4(components(s), want)));
    v.check(
        s.iterations <= 8 && s.residual_norm < 1e-12,
        format!("{} iterations to residual {:.1e}", s.iterations, s.residual_norm),
    );
    v.check(elapsed < Duration::from_secs(1), format!("runtime {:.3} s", elapsed.as_secs_f64()));
    v
}

fn criterion_2() -> Verdict {
    let mut v = Verdict::new();
    let config = preset("chaotic-fig6");
    let Ok((seeds, saddles)) = find_branches(&config, config.n_list[0]) else {
        v.check(false, "branch search failed".into());
        return v;
    };
    let printed = [
        ((-0.0892369, -0.0766275), [0.0095152, -0.0611558, -0.0611558, -0.0095152]),
        ((-0.1125783, -0.0966593), [0.0115409, -0.0764952, -0.0764952, -0.0115409]),
    ];
    for (seed, want) in printed {
        v.check(seed_gap(&seeds, seed) <= 1e-6, format!("seed {seed:?} found to {:.1e}", seed_gap(&seeds, seed)));
        let best = saddles.iter().map(|s| gap4(components(s), want)).fold(f64::INFINITY, f64::min);
        v.check(best <= 1e-6, format!("saddle for {seed:?} to {best:.1e}"));
    }
    let identity = saddles.iter().map(|s| (s.initial().p[0] - I * s.initial().q[0]).norm()).fold(0.0, f64::max);
    v.check(identity < 1e-12, format!("max |P0 - iQ0| {identity:.1e}"));
    let mut mirror_gap: f64 = 0.0;
    for s in &saddles {
        let m = s.seed.reflected(config.beta_center).expect("beta center is a half-lattice point");
        let partner = saddles
            .iter()
            .find(|o| o.seed.winding == m.winding && (o.seed.ic.0 - m.ic.0).hypot(o.seed.ic.1 - m.ic.1) < 1e-9);
        mirror_gap = mirror_gap.max(match partner {
            Some(o) => (s.initial().p[0] + o.initial().p[0]).norm().max((s.initial().q[0] + o.initial().q[0]).norm()),
            None => f64::INFINITY,
        });
    }
    v.check(mirror_gap <= 1e-10, format!("reflected saddles negated to {mirror_gap:.1e} over {} branches", saddles.len()));
    v
}

fn rows_from(outcome: &SweepOutcome, from: usize) -> Vec<&SweepRow> {
    outcome.rows.iter().filter(|r| r.n >= from).collect()
}

fn criterion_3(sweeps: &[(String, SweepOutcome, Duration)]) -> Verdict {
    let mut v = Verdict::new();
    for (name, out, elapsed) in sweeps {
        let rows = rows_from(out, 100);
        let bad: Vec<usize> =
            rows.iter().filter(|r| !r.is_ok() || !(r.abs_err_ggwpd < r.abs_err_oc)).map(|r| r.n).collect();
        v.check(bad.is_empty(), format!("{name}: ggwpd beats off-center at all N >= 100 (violations {bad:?})"));
        v.check(*elapsed < Duration::from_secs(60), format!("{name}: sweep {:.2} s", elapsed.as_secs_f64()));
        if name == "integrable-fig2" {
            let last = rows.last().expect("N = 700 row");
            let ratio = last.abs_err_oc / last.abs_err_ggwpd;
            v.check(ratio >= 10.0, format!("{name}: error ratio at N = {} is {ratio:.1}", last.n));
        }
    }
    v
}

fn endpoints(out: &SweepOutcome) -> (&SweepRow, &SweepRow) {
    let rows = rows_from(out, 100);
    (rows[0], rows[rows.len() - 1])
}

fn criterion_4(sweeps: &[(String, SweepOutcome, Duration)]) -> Verdict {
    let mut v = Verdict::new();
    for (name, out, _) in sweeps {
        let (first, last) = endpoints(out);
        let dev = |r: &SweepRow| (r.ratio_ggwpd - 1.0).abs();
        let dev_oc = (last.ratio_oc - 1.0).abs();
        v.check(dev(last) < 1e-2, format!("{name}: |A_qm/A_ggwpd - 1| = {:.2e} at N = {}", dev(last), last.n));
        v.check(dev(last) < dev(first), format!("{name}: down from {:.2e} at N = {}", dev(first), first.n));
        v.check(dev_oc >= 5.0 * dev(last), format!("{name}: |A_qm/A_oc - 1| = {dev_oc:.2e}"));
    }
    v
}

fn criterion_5(sweeps: &[(String, SweepOutcome, Duration)]) -> Verdict {
    let mut v = Verdict::new();
    for (name, out, _) in sweeps {
        let (first, last) = endpoints(out);
        let (a, b) = (first.phase_err_ggwpd.abs(), last.phase_err_ggwpd.abs());
        v.check(b < 1e-2 && b < a, format!("{name}: |phase_err_ggwpd| {a:.2e} -> {b:.2e} rad"));
    }
    v
}

fn criterion_6() -> Verdict {
    let mut v = Verdict::new();
    let start = Instant::now();
    let alpha = GaussianPacket::new_1d(0.7, -0.3, 0.25, 1.0).expect("unit packet");
    let mut worst = [0.0f64; 3];
    let mut failures = 0;
    for t in [0.5, 1.0, 2.0, 5.0] {
        let flow = FreeFlow::new(1.0, t).expect("valid flight");
        let qt = -0.3 + 0.7 * t;
        for j in 0..=48 {
            let x = qt - 6.0 + 0.25 * j as f64;
            let exact = free_particle_exact(&alpha, x, t, 1.0).expect("1-D packet");
            let start_point = ComplexPhasePoint::new_1d(C64::from(0.7), C64::from(-0.3));
            let values = [
                linearized_wavefunction(&alpha, x, &flow),
                offcenter_wavefunction(&alpha, x, free_particle_offcenter(&alpha, x, t, 1.0), &flow),
                find_position_saddle(&alpha, &position(x), &start_point, &flow, &SaddleOptions::default())
                    .and_then(|s| ggwpd_wavefunction(&alpha, &[s])),
            ];
            for (w, val) in worst.iter_mut().zip(values) {
                match val {
                    Ok(z) => *w = w.max((z - exact).norm()),
                    Err(_) => failures += 1,
                }
            }
        }
    }
    let elapsed = start.elapsed();
    for (name, w) in ["linearized", "off-center", "ggwpd"].iter().zip(worst) {
        v.check(w < 1e-12, format!("{name} max error {w:.1e}"));
    }
    v.check(failures == 0, format!("{failures} evaluation failures"));
    v.check(elapsed < Duration::from_secs(1), format!("runtime {:.3} s", elapsed.as_secs_f64()));
    v
}

fn criterion_7(sweeps: &[(String, SweepOutcome, Duration)]) -> Verdict {
    let mut v = Verdict::new();
    for k in [0.05, 8.25] {
        let defect = floquet_matrix(700, k).expect("N = 700").unitarity_defect();
        v.check(defect < 1e-12, format!("K = {k}: ||F^dag F - I||_max = {defect:.1e}"));
    }
    let mut norm_dev: f64 = 0.0;
    let mut largest: f64 = 0.0;
    for (_, out, _) in sweeps {
        for &n in &out.config.n_list {
            let (a, b) = out.config.packets(n).expect("packets");
            for p in [a, b] {
                norm_dev = norm_dev.max((discretize_packet(&p, n).expect("1-D").norm() - 1.0).abs());
            }
        }
        largest = out.rows.iter().map(|r| r.c_qm.norm()).fold(largest, f64::max);
    }
    v.check(norm_dev < 1e-12, format!("packet norms within {norm_dev:.1e} of one"));
    v.check(largest <= 1.0, format!("largest |C_qm| {largest:.6}"));
    v
}

fn boundary_action(q0: C64, qt: C64, guess: C64, params: RotorParams) -> Option<C64> {
    let mut p0 = guess;
    for _ in 0..50 {
        let traj = propagate(&ComplexPhasePoint::new_1d(p0, q0), 2, params).ok()?;
        let miss = traj.last().q[0] - qt;
        if miss.norm() < 1e-15 {
            return Some(traj.action);
        }
        p0 -= miss / traj.stability.m21[(0, 0)];
    }
    None
}

fn criterion_8() -> Verdict {
    let mut v = Verdict::new();
    let mut det_dev: f64 = 0.0;
    let mut fd_dev: f64 = 0.0;
    let mut shift: f64 = 0.0;
    for name in ggwpd::experiment::PRESETS {
        let config = preset(name);
        let params = config.params().expect("valid K");
        let flow = config.flow().expect("valid flow");
        let (Ok((seeds, saddles)), Ok((_, fine))) = (find_branches(&config, 50), find_branches(&config, 700)) else {
            v.check(false, format!("{name}: branch search failed"));
            continue;
        };
        let mut trajectories: Vec<_> = seeds
            .iter()
            .filter_map(|s| flow.trajectory(&ComplexPhasePoint::new_1d(C64::from(s.ic.0), C64::from(s.ic.1))).ok())
            .collect();
        v.check(trajectories.len() == seeds.len(), format!("{name}: all real trajectories propagate"));
        trajectories.extend(saddles.iter().map(|s| s.trajectory.clone()));
        for traj in &trajectories {
            for m in traj.checkpoints.iter().chain([&traj.stability]) {
                det_dev = det_dev.max((m.determinant() - 1.0).norm());
            }
            let (p0, q0) = (traj.initial().p[0], traj.initial().q[0]);
            let (pt, qt) = (traj.last().p[0], traj.last().q[0]);
            let (m11, m21, m22) = (traj.stability.m11[(0, 0)], traj.stability.m21[(0, 0)], traj.stability.m22[(0, 0)]);
            let h = C64::from(1e-4);
            let zero = C64::from(0.0);
            let s = |a: C64, b: C64| boundary_action(q0 + a, qt + b, p0, params).unwrap_or(C64::new(f64::NAN, 0.0));
            let rel = |got: C64, want: C64| (got - want).norm() / want.norm().max(1.0);
            let checks = [
                rel((s(h, zero) - s(-h, zero)) / (2.0 * h), -p0),
                rel((s(zero, h) - s(zero, -h)) / (2.0 * h), pt),
                rel((s(h, zero) - 2.0 * s(zero, zero) + s(-h, zero)) / (h * h), m22 / m21),
                rel((s(zero, h) - 2.0 * s(zero, zero) + s(zero, -h)) / (h * h), m11 / m21),
                rel((s(h, h) - s(h, -h) - s(-h, h) + s(-h, -h)) / (4.0 * h * h), -m21.inv()),
            ];
            fd_dev = checks.iter().fold(fd_dev, |a, &b| if b.is_nan() { f64::INFINITY } else { a.max(b) });
        }
        for (c, f) in saddles.iter().zip(&fine) {
            shift = shift.max(c.initial().distance(f.initial()));
        }
    }
    v.check(det_dev < 1e-10, format!("stability determinants within {det_dev:.1e} of one"));
    v.check(fd_dev < 1e-5, format!("action derivative identities to {fd_dev:.1e}"));
    v.check(shift < 1e-10, format!("saddle shift between N = 50 and 700 {shift:.1e}"));
    v
}

fn criterion_9() -> Verdict {
    let mut v = Verdict::new();
    let dir = tempfile::tempdir().expect("temp dir");
    for name in ggwpd::experiment::PRESETS {
        let config = preset(name);
        let mut files = vec![];
        for run in 0..2 {
            let path = dir.path().join(format!("{name}-{run}.csv"));
            let written = run_sweep(&config).and_then(|out| emit_csv(&out.rows, &path));
            files.push(written.ok().and_then(|_| std::fs::read(&path).ok()));
        }
        let same = files[0].is_some() && files[0] == files[1];
        let len = files[0].as_ref().map_or(0, Vec::len);
        v.check(same, format!("{name}: two runs give identical {len}-byte CSVs"));
    }
    v
}

fn main() {
    let sweeps: Vec<(String, SweepOutcome, Duration)> = ggwpd::experiment::PRESETS
        .iter()
        .map(|name| {
            let start = Instant::now();
            let out = run_sweep(&preset(name)).expect("preset sweeps run");
            (name.to_string(), out, start.elapsed())
        })
        .collect();
    let verdicts = [
        ("saddle regression, integrable", criterion_1()),
        ("saddle regression, chaotic", criterion_2()),
        ("error hierarchy", criterion_3(&sweeps)),
        ("ratio convergence", criterion_4(&sweeps)),
        ("phase convergence", criterion_5(&sweeps)),
        ("free-particle exactness", criterion_6()),
        ("oracle integrity", criterion_7(&sweeps)),
        ("structural invariants", criterion_8()),
        ("determinism", criterion_9()),
    ];
    let mut failed = 0;
    for (i, (title, v)) in verdicts.iter().enumerate() {
        println!("{} criterion {} ({title}): {}", if v.pass { "PASS" } else { "FAIL" }, i + 1, v.notes.join("; "));
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} of {} criteria pass", verdicts.len() - failed, verdicts.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
