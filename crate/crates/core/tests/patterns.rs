use num_complex::Complex64;
use qcp_core::analysis::{generation_ratio_stats, rigidity_experiment, shortened_resistance, subharmonicity_check};
use qcp_core::graph::{square_grid, Labelling, RadiusFunction};
use qcp_core::hirota::{
    comparison_function, extend_to_brick, rhombic_labelling, zgamma_pattern, ComparisonFunction, FillOrder,
};
use qcp_core::pattern::{check_pattern, CirclePattern, Checks};
use qcp_core::projection::{generate_embedding, symmetric_plane, LiftedEmbedding, Offset};
use qcp_core::sg::{map_to_pattern, zgamma_checks, zgamma_map};
use qcp_core::solver::{solve_radii, RadiusProblem, SolveOptions};
use qcp_core::surface::{brick_of, lift_embedding};
use qcp_core::Error;
use std::f64::consts::PI;

fn five_fold(rho: f64) -> LiftedEmbedding {
    generate_embedding(&symmetric_plane(5, Offset::Diagonal(-0.2)).unwrap(), rho).unwrap()
}

fn isoradial(e: &LiftedEmbedding) -> CirclePattern {
    CirclePattern::from_points(e.graph.clone(), rhombic_labelling(&e.graph, &e.positions), e.positions.clone()).unwrap()
}

#[test]
fn comparison_of_similar_patterns() {
    let e = five_fold(5.0);
    let r = isoradial(&e);
    let w = comparison_function(&r, &r).unwrap();
    assert!(w.iter().all(|z| (z - 1.0).norm() < 1e-12));

    let lambda = 2.5;
    let scaled = CirclePattern::from_points(r.graph.clone(), r.labelling.clone(), r.points.iter().map(|p| p * lambda).collect())
        .unwrap();
    let w = comparison_function(&r, &scaled).unwrap();
    for v in 0..w.len() {
        let want = if r.graph.color(v) == qcp_core::graph::Color::White { lambda } else { 1.0 };
        assert!((w[v] - want).norm() < 1e-12);
    }

    let rot = Complex64::from_polar(1.0, 0.7);
    let turned =
        CirclePattern::from_points(r.graph.clone(), r.labelling.clone(), r.points.iter().map(|p| p * rot).collect()).unwrap();
    let w = comparison_function(&r, &turned).unwrap();
    for v in 0..w.len() {
        let want = if r.graph.color(v) == qcp_core::graph::Color::White { Complex64::new(1.0, 0.0) } else { rot };
        assert!((w[v] - want).norm() < 1e-12);
    }

    let (g, pos, _) = square_grid(3);
    let other = CirclePattern::from_points(g.clone(), Labelling::constant(g.num_faces(), PI / 2.0), pos).unwrap();
    assert!(matches!(comparison_function(&r, &other), Err(Error::Input(_))));
}

#[test]
fn constant_data_extends_to_constant() {
    let e = five_fold(4.0);
    let s = lift_embedding(&e).unwrap();
    let ones = ComparisonFunction { values: s.vertices().into_iter().map(|p| (p, Complex64::new(1.0, 0.0))).collect() };
    let brick = brick_of(&s).unwrap();
    let w = extend_to_brick(&ones, &e.directions, &brick, FillOrder::Lexicographic).unwrap();
    assert_eq!(w.values.len(), brick.num_points());
    assert!(w.values.values().all(|z| (z - 1.0).norm() < 1e-14));
}

#[test]
fn quasicrystallic_patterns() {
    let e = five_fold(8.0);
    let one = zgamma_pattern(&e, 1.0, None).unwrap();
    assert!(one.pattern.radii.0.values().all(|&r| (r - 1.0).abs() < 1e-14));

    for gamma in [5.0 / 6.0, 5.0 / 4.0] {
        let z = zgamma_pattern(&e, gamma, None).unwrap();
        assert!(z.max_brick_residual < 1e-9);
        assert!(z.max_type_deviation < 1e-10);
        let rep = check_pattern(&z.pattern, Checks { immersed: true, embedded: false, convex: false });
        assert!(rep.immersion.is_empty());
    }
    assert!(matches!(zgamma_pattern(&e, 2.0, None), Err(Error::Domain(_))));
}

#[test]
fn random_orders_agree_on_the_sector() {
    let e = five_fold(8.0);
    let a = qcp_core::hirota::zgamma_pattern_with(&e, 5.0 / 6.0, None, FillOrder::Lexicographic).unwrap();
    let b = qcp_core::hirota::zgamma_pattern_with(&e, 5.0 / 6.0, None, FillOrder::Random(7)).unwrap();
    for (p, q) in a.pattern.points.iter().zip(&b.pattern.points) {
        assert!((p - q).norm() < 1e-12);
    }
}

#[test]
fn square_grid_recursion() {
    let f = zgamma_map(1.0, PI / 2.0, 5).unwrap();
    let sp = map_to_pattern(&f).unwrap();
    for v in sp.pattern.graph.white_vertices() {
        assert!((sp.pattern.radii.get(v) - 1.0).abs() < 1e-14);
        let (n, m) = sp.coords[v];
        assert!((sp.pattern.points[v] - Complex64::new(n as f64, m as f64)).norm() < 1e-14);
    }
    let z = zgamma_checks(&f).unwrap();
    assert!(z.sign_min.abs() < 1e-14 && z.identity_max < 1e-14);

    let z = zgamma_checks(&zgamma_map(1.5, PI / 2.0, 10).unwrap()).unwrap();
    assert!(z.sign_min >= 0.0 && z.sign_violations.is_empty());
    assert!(zgamma_map(0.0, PI / 2.0, 3).is_err());
}

#[test]
fn solver_recovers_zgamma_radii() {
    let sp = map_to_pattern(&zgamma_map(1.5, PI / 2.0, 6).unwrap()).unwrap();
    let g = &sp.pattern.graph;
    let boundary = g.white_vertices().filter(|&v| !g.is_interior(v)).map(|v| (v, sp.pattern.radii.get(v))).collect();
    let problem = RadiusProblem { graph: g.clone(), labelling: sp.pattern.labelling.clone(), boundary, initial: None };
    let (r, rep) = solve_radii(&problem, SolveOptions::default()).unwrap();
    assert!(rep.converged);
    for v in g.white_vertices() {
        assert!((r.get(v) / sp.pattern.radii.get(v) - 1.0).abs() < 1e-8);
    }
    let stalled = solve_radii(&problem, SolveOptions { tol: 1e-10, max_iter: 1 }).unwrap().1;
    assert!(!stalled.converged);
}

#[test]
fn generation_ratios_decay() {
    let sp = map_to_pattern(&zgamma_map(1.5, PI / 2.0, 15).unwrap()).unwrap();
    let s = generation_ratio_stats(&sp.pattern, sp.index[&(0, 0)]).unwrap();
    assert!(s[12].unwrap() < s[4].unwrap());
}

#[test]
fn subharmonicity_examples() {
    let z = zgamma_pattern(&five_fold(8.0), 5.0 / 6.0, None).unwrap();
    let g = &z.pattern.graph;
    let rep = subharmonicity_check(&z.pattern.radii, &z.pattern.radii, g, &z.pattern.labelling).unwrap();
    assert!(rep.violations.is_empty() && rep.checked > 0);
    let iso = RadiusFunction::constant(g, 1.0);
    let rep = subharmonicity_check(&z.pattern.radii, &iso, g, &z.pattern.labelling).unwrap();
    assert!(rep.violations.is_empty());
}

#[test]
fn resistance_examples() {
    let e = five_fold(40.0);
    let v0 = e.central_white();
    let one = shortened_resistance(&e, v0, 1, 4.0).unwrap();
    assert_eq!(one.partial_sums[0], 1.0 / one.edge_counts[0] as f64);
    assert!(matches!(shortened_resistance(&e, v0, 50, 4.0), Err(Error::WindowTooSmall { .. })));
}

#[test]
fn rigidity_examples() {
    let r = rigidity_experiment(1.0, PI / 2.0, 6, SolveOptions::default()).unwrap();
    assert!(r.max_deviation < 1e-12);
    let r = rigidity_experiment(1.5, PI / 2.0, 10, SolveOptions::default()).unwrap();
    assert!(r.max_deviation < 1e-8);
    assert!(r.m1.windows(2).all(|w| w[1] >= w[0]));
}
