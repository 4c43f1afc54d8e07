use ggwpd::dynamics::Winding;
use ggwpd::phase_space::{packet_evaluate, ComplexPhasePoint, GaussianPacket, C64};
use ggwpd::seeds::{SeedKind, SeedTrajectory};
use ggwpd::semiclassics::offcenter::position;
use ggwpd::semiclassics::{
    find_position_saddle, find_saddle, free_particle_exact, free_particle_offcenter, free_particle_saddle,
    ggwpd_correlation, ggwpd_wavefunction, linearized_correlation, linearized_wavefunction, offcenter_correlation,
    offcenter_wavefunction, FreeFlow, SaddleOptions,
};

const TIMES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

// m = sigma = hbar = 1
fn packet(p: f64, q: f64) -> GaussianPacket {
    GaussianPacket::new_1d(p, q, 0.25, 1.0).unwrap()
}

fn grid(center: f64) -> impl Iterator<Item = f64> {
    (0..=48).map(move |j| center - 6.0 + 0.25 * j as f64)
}

fn close(a: C64, b: C64) -> bool {
    (a - b).norm() < 1e-12
}

#[test]
fn linearized_wavefunction_is_exact() {
    let a = packet(0.7, -0.3);
    for t in TIMES {
        let flow = FreeFlow::new(1.0, t).unwrap();
        for x in grid(-0.3 + 0.7 * t) {
            let got = linearized_wavefunction(&a, x, &flow).unwrap();
            let want = free_particle_exact(&a, x, t, 1.0).unwrap();
            assert!(close(got, want), "t={t} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn offcenter_wavefunction_is_exact() {
    let a = packet(0.7, -0.3);
    for t in TIMES {
        let flow = FreeFlow::new(1.0, t).unwrap();
        for x in grid(-0.3 + 0.7 * t) {
            let ic = free_particle_offcenter(&a, x, t, 1.0);
            let got = offcenter_wavefunction(&a, x, ic, &flow).unwrap();
            let want = free_particle_exact(&a, x, t, 1.0).unwrap();
            assert!(close(got, want), "t={t} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn ggwpd_wavefunction_is_exact() {
    let a = packet(0.7, -0.3);
    for t in TIMES {
        let flow = FreeFlow::new(1.0, t).unwrap();
        for x in grid(-0.3 + 0.7 * t) {
            let start = ComplexPhasePoint::new_1d(C64::from(0.7), C64::from(-0.3));
            let saddle = find_position_saddle(&a, &position(x), &start, &flow, &SaddleOptions::default()).unwrap();
            let closed = free_particle_saddle(&a, x, t, 1.0).unwrap();
            assert!(saddle.trajectory.initial().distance(&closed) < 1e-12, "t={t} x={x}");
            let got = ggwpd_wavefunction(&a, &[saddle]).unwrap();
            let want = free_particle_exact(&a, x, t, 1.0).unwrap();
            assert!(close(got, want), "t={t} x={x}: {got} vs {want}");
        }
    }
}

#[test]
fn zero_time_saddle_is_manifold_point() {
    let a = packet(0.7, -0.3);
    let flow = FreeFlow::new(1.0, 0.0).unwrap();
    let x = 1.1;
    let start = ComplexPhasePoint::new_1d(C64::from(0.7), C64::from(-0.3));
    let saddle = find_position_saddle(&a, &position(x), &start, &flow, &SaddleOptions::default()).unwrap();
    let closed = free_particle_saddle(&a, x, 0.0, 1.0).unwrap();
    assert!(saddle.trajectory.initial().distance(&closed) < 1e-12);
    let want = packet_evaluate(&a, &position(x));
    assert!(close(ggwpd_wavefunction(&a, &[saddle]).unwrap(), want));
}

/// `<beta|U|alpha>` by trapezoid quadrature of the exactly evolved packet.
fn quadrature(alpha: &GaussianPacket, beta: &GaussianPacket, t: f64) -> C64 {
    let h = 1e-3;
    let (lo, hi) = (-40.0, 40.0);
    let n = ((hi - lo) / h) as usize;
    (0..=n)
        .map(|j| {
            let x = lo + h * j as f64;
            packet_evaluate(beta, &position(x)).conj() * free_particle_exact(alpha, x, t, 1.0).unwrap() * h
        })
        .sum()
}

#[test]
fn correlations_are_exact() {
    let a = packet(0.7, -0.3);
    for t in TIMES {
        let flow = FreeFlow::new(1.0, t).unwrap();
        for (pb, qb) in [(0.7, -0.3 + 0.7 * t), (0.2, 1.5), (1.4, -1.0)] {
            let b = packet(pb, qb);
            let want = quadrature(&a, &b, t);
            let seed = SeedTrajectory { ic: (0.7, -0.3), t: 1, winding: Winding::ZERO, kind: SeedKind::Integrable };
            let saddle = find_saddle(&a, &b, &seed, &flow, &SaddleOptions::default()).unwrap();
            let g = ggwpd_correlation(&a, &b, &[saddle]).unwrap().total;
            let l = linearized_correlation(&a, &b, &flow).unwrap();
            // any real trajectory serves as the expansion point of a quadratic action
            let shifted = SeedTrajectory { ic: (0.3, 0.4), ..seed };
            let o = offcenter_correlation(&a, &b, &[shifted], &flow).unwrap().total;
            for (name, got) in [("ggwpd", g), ("linearized", l), ("offcenter", o)] {
                assert!(close(got, want), "{name} t={t} beta=({pb},{qb}): {got} vs {want}");
            }
        }
    }
}
