use num_complex::Complex64;
use qcp_core::angle::angle_function;
use qcp_core::graph::{check_admissible, closing_residual, invert_radii, square_grid, vertex_residual, Labelling, RadiusFunction};
use qcp_core::pattern::{check_pattern, layout_pattern, CirclePattern, Checks, Seed};
use qcp_core::projection::{generate_embedding, projection_scales, symmetric_plane, Offset, PlaneSpec};
use qcp_core::sg::{map_to_pattern, zgamma_map};
use qcp_core::surface::{
    brick_of, check_monotone, lift_embedding, project_surface, simple_flip, strip_flip, Facet, Half, QuadSurface,
    SignedAxis,
};
use qcp_core::Error;
use std::f64::consts::PI;

fn five_fold(rho: f64) -> qcp_core::projection::LiftedEmbedding {
    generate_embedding(&symmetric_plane(5, Offset::Diagonal(-0.2)).unwrap(), rho).unwrap()
}

#[test]
fn angle_function_examples() {
    assert!((angle_function(0.0, PI / 2.0, 0).unwrap() - PI / 4.0).abs() < 1e-15);
    assert!((angle_function(2f64.ln(), PI / 2.0, 0).unwrap() - 2f64.atan()).abs() < 1e-15);
    assert!((angle_function(0.0, PI / 2.0, 1).unwrap() - 0.5).abs() < 1e-15);
    assert!(matches!(angle_function(0.0, PI, 0), Err(Error::Domain(_))));
}

#[test]
fn relabelled_face_breaks_two_black_vertices() {
    let (g, _, _) = square_grid(4);
    let mut l = Labelling::constant(g.num_faces(), PI / 2.0);
    assert!(check_admissible(&g, &l).unwrap().is_empty());
    // face 5 is interior: both of its black corners are interior
    l.0[5] = PI / 3.0;
    let bad = check_admissible(&g, &l).unwrap();
    assert_eq!(bad.len(), 2);
    for (v, _) in bad {
        assert!(g.face(5).contains(&v));
    }
}

#[test]
fn closing_residual_closed_form() {
    let r = closing_residual(1.0, &[2.0; 4], &[PI / 2.0; 4]).unwrap();
    assert!((r - (4.0 * 2f64.atan() - PI)).abs() < 1e-14);
    assert!(closing_residual(1.0, &[], &[]).is_err());
}

#[test]
fn inverted_zgamma_radii_still_close() {
    let sp = map_to_pattern(&zgamma_map(1.5, PI / 2.0, 6).unwrap()).unwrap();
    let p = &sp.pattern;
    let inv = invert_radii(&p.radii);
    for v in p.graph.interior_whites() {
        assert!(vertex_residual(&p.graph, &p.labelling, &p.radii, v).abs() < 1e-10);
        assert!(vertex_residual(&p.graph, &p.labelling, &inv, v).abs() < 1e-10);
    }
}

#[test]
fn layout_of_z1_radii_gives_unit_circles() {
    let sp = map_to_pattern(&zgamma_map(1.0, PI / 2.0, 4).unwrap()).unwrap();
    let g = &sp.pattern.graph;
    let v0 = sp.index[&(0, 0)];
    let r = RadiusFunction::constant(g, 1.0);
    let black = g.opposite(g.star(v0)[0].face, v0);
    let first = g.face(g.star(v0)[0].face).iter().copied().find(|&u| u != v0 && u != black).unwrap();
    let dir = sp.pattern.points[first] - sp.pattern.points[v0];
    let p = layout_pattern(g, &sp.pattern.labelling, &r, Seed { vertex: v0, center: Complex64::new(0.0, 0.0), direction: dir })
        .unwrap();
    for v in g.white_vertices() {
        assert!((p.points[v] - sp.pattern.points[v]).norm() < 1e-12);
        assert_eq!(p.radii.get(v), 1.0);
    }
}

#[test]
fn five_fold_patch_is_embedded_and_convex() {
    let e = five_fold(6.0);
    let l = qcp_core::hirota::rhombic_labelling(&e.graph, &e.positions);
    let p = CirclePattern::from_points(e.graph.clone(), l, e.positions.clone()).unwrap();
    assert!(check_pattern(&p, Checks::all()).is_clean());
}

#[test]
fn orthogonal_z32_is_embedded() {
    let sp = map_to_pattern(&zgamma_map(1.5, PI / 2.0, 10).unwrap()).unwrap();
    assert!(check_pattern(&sp.pattern, Checks::all()).is_clean());
}

#[test]
fn projection_scale_examples() {
    assert_eq!(projection_scales(&PlaneSpec::square()).unwrap(), vec![1.0, 1.0]);
    for c in projection_scales(&symmetric_plane(5, Offset::Diagonal(-0.2)).unwrap()).unwrap() {
        assert!((c - 2.5f64.sqrt()).abs() < 1e-12);
    }
}

#[test]
fn five_fold_angles_are_multiples_of_pi_over_five() {
    let e = five_fold(6.0);
    for f in e.graph.faces() {
        let a = e.positions[f[1]] - e.positions[f[0]];
        let b = e.positions[f[3]] - e.positions[f[0]];
        assert!((a.norm() - 1.0).abs() < 1e-9 && (b.norm() - 1.0).abs() < 1e-9);
        let k = (b / a).arg().abs() / (PI / 5.0);
        assert!((k - k.round()).abs() < 1e-9 && (1.0..=4.0).contains(&k.round()));
    }
}

#[test]
fn symmetric_plane_variants() {
    assert!(matches!(symmetric_plane(4, Offset::Diagonal(0.1)), Err(Error::Unsupported(_))));
    let ten = generate_embedding(&symmetric_plane(5, Offset::Diagonal(-0.5)).unwrap(), 6.0).unwrap();
    assert!(ten.graph.num_faces() > 50);
    let seven = generate_embedding(&symmetric_plane(7, Offset::Diagonal(0.0123)).unwrap(), 5.0).unwrap();
    assert_eq!(seven.directions.len(), 7);
}

#[test]
fn lift_project_round_trip() {
    let e = five_fold(6.0);
    let s = lift_embedding(&e).unwrap();
    assert!(check_monotone(&s).monotone);
    let p = project_surface(&s, &e.directions).unwrap();
    assert_eq!(p.graph.num_faces(), e.graph.num_faces());
    let shift = e.positions[e.central_white()];
    let mut got: Vec<(i64, i64)> = p.positions.iter().map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect();
    let mut want: Vec<(i64, i64)> =
        e.positions.iter().map(|z| z - shift).map(|z| ((z.re * 1e6).round() as i64, (z.im * 1e6).round() as i64)).collect();
    got.sort();
    want.sort();
    assert_eq!(got, want);
    let b = brick_of(&s).unwrap();
    for k in 0..5 {
        assert_eq!(b.lo[k], s.vertices().iter().map(|p| p[k]).min().unwrap());
        assert_eq!(b.hi[k], s.vertices().iter().map(|p| p[k]).max().unwrap());
    }
}

#[test]
fn flip_changes_only_the_hexagon() {
    let e = five_fold(6.0);
    let s = lift_embedding(&e).unwrap();
    let v = s.vertices().into_iter().find(|v| simple_flip(&s, v).is_ok()).expect("a flippable corner");
    let t = simple_flip(&s, &v).unwrap();
    assert_eq!(t.facets.len(), s.facets.len());
    assert_eq!(s.facets.difference(&t.facets).count(), 3);
    let a = project_surface(&s, &e.directions).unwrap();
    let b = project_surface(&t, &e.directions).unwrap();
    for f in s.facets.intersection(&t.facets) {
        for c in f.corners() {
            assert_eq!(a.positions[a.index_of(&c).unwrap()], b.positions[b.index_of(&c).unwrap()]);
        }
    }
}

fn ribbon(len: i64, hole: Option<i64>) -> QuadSurface {
    let mut facets = Vec::new();
    for n in 0..len {
        if Some(n) != hole {
            facets.push(Facet::new(vec![0, n, 0], 1, 2));
        }
        facets.push(Facet::new(vec![0, n, 0], 0, 1));
    }
    QuadSurface::new(3, facets).unwrap()
}

#[test]
fn strip_flips() {
    let dirs: Vec<Complex64> = (0..3).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 3.0)).collect();
    let axes = (SignedAxis::new(0, 1), SignedAxis::new(1, 1), SignedAxis::new(2, 1));
    let s = ribbon(6, None);
    let t = strip_flip(&s, &dirs, &[0, 0, 0], axes, Half::Plus).unwrap();
    for n in 0..6 {
        assert!(t.facets.contains(&Facet::new(vec![0, n, 1], 0, 1)));
        assert!(t.facets.contains(&Facet::new(vec![1, n, 0], 1, 2)));
    }
    assert!(t.facets.contains(&Facet::new(vec![0, 0, 0], 0, 2)));
    assert_eq!(t.facets.len(), 13);

    // length one: same as the cube-corner flip
    let corner = QuadSurface::new(
        3,
        [Facet::new(vec![0, 0, 0], 0, 1), Facet::new(vec![0, 0, 0], 1, 2), Facet::new(vec![0, 0, 0], 0, 2)],
    )
    .unwrap();
    assert_eq!(strip_flip(&corner, &dirs, &[0, 0, 0], axes, Half::Plus).unwrap(), simple_flip(&corner, &[0, 0, 0]).unwrap());

    assert!(matches!(strip_flip(&ribbon(6, Some(2)), &dirs, &[0, 0, 0], axes, Half::Plus), Err(Error::Strip(_))));
    let swapped = (SignedAxis::new(1, 1), SignedAxis::new(0, 1), SignedAxis::new(2, 1));
    assert!(matches!(strip_flip(&s, &dirs, &[0, 0, 0], swapped, Half::Plus), Err(Error::Condition(_))));
}
