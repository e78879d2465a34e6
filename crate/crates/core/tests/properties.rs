use num_complex::Complex64;
use proptest::prelude::*;
use qcp_core::angle::{f_theta, f_theta_prime};
use qcp_core::dd::to_c64;
use qcp_core::graph::{square_grid, Labelling};
use qcp_core::hirota::{
    assign_arguments, extend_dd, hirota_residual, hirota_solve_face, zgamma_axis_values_dd, FillOrder,
};
use qcp_core::io::{load, save, Document, Payload};
use qcp_core::sg::{cross_ratio, solve_cross_ratio, zgamma_map};
use qcp_core::solver::{RadiusProblem, RadiusSystem};
use qcp_core::surface::Brick;
use std::f64::consts::PI;

fn point() -> impl Strategy<Value = Complex64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(x, y)| Complex64::new(x, y))
}

fn unit() -> impl Strategy<Value = Complex64> {
    (0.0..2.0 * PI).prop_map(|t| Complex64::from_polar(1.0, t))
}

proptest! {
    #[test]
    fn angle_function_symmetry(x in -30.0..30.0f64, t in 1e-3..PI - 1e-3) {
        prop_assert!((f_theta(x, t) + f_theta(-x, t) - (PI - t)).abs() < 1e-12);
        let v = f_theta(x, t);
        prop_assert!(v > 0.0 && v < PI - t + 1e-15);
        prop_assert!(f_theta_prime(x, t) > 0.0 || x.abs() > 20.0);
    }

    #[test]
    fn cross_ratio_solve_inverts(p1 in point(), p2 in point(), p3 in point(), q in unit()) {
        let sep = (p1 - p2).norm().min((p2 - p3).norm()).min((p1 - p3).norm());
        prop_assume!(sep > 0.1);
        if let Ok(p4) = solve_cross_ratio(p1, p2, p3, q) {
            prop_assume!((p4 - p1).norm() > 1e-3 && p4.norm() < 1e4);
            prop_assert!((cross_ratio(p1, p2, p3, p4) - q).norm() < 1e-8);
        }
    }

    #[test]
    fn hirota_solution_closes(r0 in 0.2..5.0f64, r1 in 0.2..5.0f64, b0 in unit(), b1 in unit(),
                              a0 in unit(), a1 in unit(), slot in 0usize..4) {
        prop_assume!((a0.conj() * a1).im.abs() > 0.05);
        // [x0, y0, x1, y1]: black x, white y
        let w = [b0, Complex64::new(r0, 0.0), b1, Complex64::new(r1, 0.0)];
        let mut known = w.map(Some);
        known[slot] = None;
        if let Ok(v) = hirota_solve_face(known, a0, a1) {
            let mut full = w;
            full[slot] = v;
            let scale = full.iter().map(|z| z.norm()).fold(1.0, f64::max);
            prop_assert!(hirota_residual(full, a0, a1).norm() < 1e-12 * scale * scale);
        }
    }

    #[test]
    fn theta_wraps_by_pi(t0 in -PI..PI, gaps in proptest::collection::vec(0.05..0.6f64, 1..6), m in -20i64..20) {
        let mut t = t0;
        let mut dirs = vec![Complex64::from_polar(1.0, t)];
        for g in &gaps {
            t += g;
            dirs.push(Complex64::from_polar(1.0, t));
        }
        prop_assume!(t - t0 < PI - 0.05);
        let e = assign_arguments(&dirs, None).unwrap();
        let d = e.d() as i64;
        prop_assert!((e.theta_m(m + d) - e.theta_m(m) - PI).abs() < 1e-12);
        prop_assert!((e.a_m(m + d) + e.a_m(m)).norm() < 1e-15);
        let step = e.theta_m(m + 1) - e.theta_m(m);
        prop_assert!(step > 0.0 && step < PI);
    }

    #[test]
    fn map_documents_round_trip(gamma in 0.1..1.9f64, psi in 0.2..PI - 0.2, size in 1usize..5) {
        if let Ok(m) = zgamma_map(gamma, psi, size) {
            let doc = Document::new(Payload::Map(m), "zgamma-sg", &[("gamma", gamma.to_string())]);
            let bytes = save(&doc).unwrap();
            prop_assert_eq!(load(&bytes).unwrap(), doc);
        }
    }

    #[test]
    fn jacobian_matches_differences(u in proptest::collection::vec(-0.5..0.5f64, 13), b in proptest::collection::vec(0.5..2.0f64, 12)) {
        let (g, _, _) = square_grid(6);
        let boundary = g.white_vertices().filter(|&v| !g.is_interior(v)).zip(&b).map(|(v, &r)| (v, r)).collect();
        let labelling = Labelling::constant(g.num_faces(), PI / 2.0);
        let sys = RadiusSystem::new(&RadiusProblem { graph: g, labelling, boundary, initial: None }).unwrap();
        prop_assert_eq!(sys.len(), u.len());
        let u = u.as_slice();
        let j = sys.jacobian(u);
        let h = 1e-6;
        for k in 0..u.len() {
            let mut up = u.to_vec();
            let mut dn = u.to_vec();
            up[k] += h;
            dn[k] -= h;
            let (fp, fm) = (sys.residual(&up), sys.residual(&dn));
            for i in 0..u.len() {
                prop_assert!(((fp[i] - fm[i]) / (2.0 * h) - j.get(i, k)).abs() < 1e-6);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn fill_order_does_not_matter(seed in any::<u64>(), gamma in 0.3..1.7f64) {
        let dirs: Vec<Complex64> = (0..3).map(|k| Complex64::from_polar(1.0, 0.9 * k as f64)).collect();
        let ed = assign_arguments(&dirs, None).unwrap();
        let brick = Brick { lo: vec![0; 3], hi: vec![3; 3] };
        let known = zgamma_axis_values_dd(gamma, &ed, &brick.hi).unwrap();
        let a = extend_dd(&known, &dirs, &brick, FillOrder::Lexicographic).unwrap();
        let b = extend_dd(&known, &dirs, &brick, FillOrder::Random(seed)).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            let (x, y) = (to_c64(x.unwrap()), to_c64(y.unwrap()));
            prop_assert!((x - y).norm() < 1e-12 * x.norm().max(1.0));
        }
    }
}
