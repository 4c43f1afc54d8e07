use ggwpd::phase_space::{ComplexPhasePoint, C64};
use ggwpd::rotor::{inverse_map_step, map_step, propagate, step_real, step_stability, RotorParams};
use ggwpd::semiclassics::{branch_sqrt, BranchTracker};
use proptest::prelude::*;

fn point(pr: f64, pi: f64, qr: f64, qi: f64) -> ComplexPhasePoint {
    ComplexPhasePoint::new_1d(C64::new(pr, pi), C64::new(qr, qi))
}

proptest! {
    #[test]
    fn inverse_undoes_a_step(k in 0.0f64..10.0, pr in -2.0f64..2.0, pi in -0.1f64..0.1,
                             qr in -2.0f64..2.0, qi in -0.1f64..0.1) {
        let params = RotorParams::new(k).unwrap();
        let z = point(pr, pi, qr, qi);
        let back = inverse_map_step(&map_step(&z, params, false).unwrap(), params);
        prop_assert!(back.distance(&z) < 1e-12);
    }

    #[test]
    fn complex_stability_is_symplectic(k in 0.0f64..10.0, t in 1usize..4, pr in -1.0f64..1.0,
                                       pi in -0.05f64..0.05, qr in -1.0f64..1.0, qi in -0.05f64..0.05) {
        let params = RotorParams::new(k).unwrap();
        // strongly unstable starts may leave the bounded strip, which is reported as an error
        let traj = propagate(&point(pr, pi, qr, qi), t, params);
        prop_assume!(traj.is_ok());
        let traj = traj.unwrap();
        // m11 m22 - m12 m21 cancels, so roundoff scales with the squared entries
        for m in traj.checkpoints.iter().chain([&traj.stability]) {
            let scale = 1.0 + m.full().norm_squared();
            prop_assert!((m.determinant() - 1.0).norm() < 1e-14 * scale);
        }
    }

    #[test]
    fn real_stability_matches_finite_differences(k in 0.0f64..10.0, p in -1.0f64..1.0, q in -1.0f64..1.0) {
        let h = 1e-6;
        let m = step_stability(q, RotorParams::new(k).unwrap());
        let (pp, qp) = step_real(p + h, q, k);
        let (pm, qm) = step_real(p - h, q, k);
        let (pq, qq) = step_real(p, q + h, k);
        let (pn, qn) = step_real(p, q - h, k);
        let scale = 1.0 + k;
        prop_assert!(((pp - pm) / (2.0 * h) - m[0][0]).abs() < 1e-6 * scale);
        prop_assert!(((qp - qm) / (2.0 * h) - m[1][0]).abs() < 1e-6 * scale);
        prop_assert!(((pq - pn) / (2.0 * h) - m[0][1]).abs() < 1e-6 * scale);
        prop_assert!(((qq - qn) / (2.0 * h) - m[1][1]).abs() < 1e-6 * scale);
    }

    #[test]
    fn tracked_root_squares_back(turns in 0.0f64..4.0, r in 0.1f64..10.0, samples in 8usize..64) {
        let path = |s: f64| C64::from_polar(r, 2.0 * std::f64::consts::PI * turns * s);
        let mut tracker = BranchTracker::new(path(0.0)).unwrap();
        let mut root = tracker.sqrt();
        for j in 1..=samples {
            root = branch_sqrt(path(j as f64 / samples as f64), &mut tracker).unwrap();
        }
        let end = path(1.0);
        prop_assert!((root * root - end).norm() < 1e-12 * r);
        // the root follows half the winding angle
        let want = C64::from_polar(r.sqrt(), std::f64::consts::PI * turns);
        prop_assert!((root - want).norm() < 1e-12 * r.sqrt());
    }
}
