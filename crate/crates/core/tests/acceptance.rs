//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! criterion fails.

use num_complex::Complex64;
use qcp_core::analysis::{rigidity_experiment, shortened_resistance, subharmonicity_check};
use qcp_core::angle::{f_theta, f_theta_prime};
use qcp_core::dd::to_c64;
use qcp_core::graph::RadiusFunction;
use qcp_core::hirota::{
    assign_arguments, extend_dd, pattern_from_w, zgamma_axis_values_dd, zgamma_pattern, zgamma_square_radii, FillOrder,
};
use qcp_core::pattern::{check_pattern, Checks};
use qcp_core::projection::{generate_embedding, symmetric_plane, LiftedEmbedding, Offset};
use qcp_core::sg::{map_to_pattern, zgamma_checks, zgamma_map};
use qcp_core::solver::SolveOptions;
use qcp_core::surface::{brick_of, simple_flip, strip_flip, Brick, Facet, Half, QuadSurface, SignedAxis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::{Duration, Instant};

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: String) -> Outcome {
    Outcome { ok, detail }
}

fn five_fold(rho: f64) -> LiftedEmbedding {
    generate_embedding(&symmetric_plane(5, Offset::Diagonal(-0.2)).unwrap(), rho).unwrap()
}

fn angle_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut fe, mut de) = (0.0f64, 0.0f64);
    for _ in 0..1000 {
        let x: f64 = rng.gen_range(-20.0..20.0);
        let t: f64 = rng.gen_range(1e-3..PI - 1e-3);
        fe = fe.max((f_theta(x, t) + f_theta(-x, t) - (PI - t)).abs());
        let h = 1e-5;
        let fd = (f_theta(x + h, t) - f_theta(x - h, t)) / (2.0 * h);
        de = de.max((fd - f_theta_prime(x, t)).abs());
    }
    outcome(fe < 1e-10 && de < 1e-6, format!("functional equation {fe:.1e}, derivative {de:.1e}"))
}

fn z1_identity() -> Outcome {
    let f = zgamma_map(1.0, PI / 2.0, 20).unwrap();
    let mut dev = 0.0f64;
    let mut count = 0;
    for n in 0..=40i64 {
        for m in 0..=40 - n {
            if let Some(z) = f.get(n, m) {
                dev = dev.max((z - Complex64::new(n as f64, m as f64)).norm());
                count += 1;
            }
        }
    }
    outcome(dev < 1e-10 && count > 800, format!("{count} points, max deviation {dev:.1e}"))
}

fn z32_embedded() -> Outcome {
    let f = zgamma_map(1.5, PI / 2.0, 15).unwrap();
    let sp = map_to_pattern(&f).unwrap();
    let rep = check_pattern(&sp.pattern, Checks { immersed: false, embedded: true, convex: false });
    let bd = f.boundary_center_deviation();
    let z = zgamma_checks(&f).unwrap();
    outcome(
        rep.overlaps.is_empty() && bd < 1e-8 && z.sign_violations.is_empty() && z.checked_vertices > 0,
        format!(
            "{} overlaps, boundary deviation {bd:.1e}, sign min {:.3} over {} vertices",
            rep.overlaps.len(),
            z.sign_min,
            z.checked_vertices
        ),
    )
}

fn radius_identity() -> Outcome {
    let z = zgamma_checks(&zgamma_map(1.5, 2.0 * PI / 3.0, 12).unwrap()).unwrap();
    outcome(
        z.identity_max < 1e-7 && z.checked_vertices > 0,
        format!("identity residual {:.1e} over {} vertices", z.identity_max, z.checked_vertices),
    )
}

fn brick_uniqueness() -> Outcome {
    let dirs: Vec<Complex64> = (0..4).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 5.0)).collect();
    let ed = assign_arguments(&dirs, None).unwrap();
    let brick = Brick { lo: vec![0; 4], hi: vec![4; 4] };
    let known = zgamma_axis_values_dd(5.0 / 6.0, &ed, &brick.hi).unwrap();
    let fields: Vec<Vec<Complex64>> = (0..100u64)
        .map(|s| {
            let f = extend_dd(&known, &dirs, &brick, FillOrder::Random(s)).unwrap();
            f.values.iter().map(|v| to_c64(v.unwrap())).collect()
        })
        .collect();
    let mut pair = 0.0f64;
    for i in 0..fields.len() {
        for j in i + 1..fields.len() {
            for (a, b) in fields[i].iter().zip(&fields[j]) {
                pair = pair.max((a - b).norm() / a.norm().max(1.0));
            }
        }
    }
    let mut type_dev = 0.0f64;
    for (idx, v) in fields[0].iter().enumerate() {
        let p = brick.point(idx);
        if p.iter().sum::<i64>() % 2 == 0 {
            type_dev = type_dev.max(v.im.abs() / v.norm());
            if v.re <= 0.0 {
                type_dev = f64::INFINITY;
            }
        } else {
            type_dev = type_dev.max((v.norm() - 1.0).abs());
        }
    }
    outcome(pair < 1e-9 && type_dev < 1e-9, format!("pairwise deviation {pair:.1e}, type deviation {type_dev:.1e}"))
}

fn quasi_zgamma() -> Outcome {
    let z = zgamma_pattern(&five_fold(8.0), 5.0 / 6.0, None).unwrap();
    let rep = check_pattern(&z.pattern, Checks::all());
    let (lo, hi) = qcp_core::sg::convexity_window(PI / 5.0);
    let inside = lo <= 5.0 / 6.0 && 5.0 / 6.0 <= hi;
    outcome(
        z.max_brick_residual < 1e-9 && rep.immersion.is_empty() && rep.nonconvex.is_empty() && inside,
        format!(
            "{} faces, Hirota residual {:.1e}, {} immersion and {} convexity violations, window [{lo:.3}, {hi:.3}]",
            z.pattern.graph.num_faces(),
            z.max_brick_residual,
            rep.immersion.len(),
            rep.nonconvex.len()
        ),
    )
}

fn rigidity() -> Outcome {
    let r = rigidity_experiment(1.5, PI / 2.0, 10, SolveOptions::default()).unwrap();
    outcome(
        r.max_deviation < 1e-8,
        format!("max relative deviation {:.1e} after {} Newton steps", r.max_deviation, r.solve.iterations),
    )
}

fn subharmonicity() -> Outcome {
    let z = zgamma_pattern(&five_fold(8.0), 5.0 / 6.0, None).unwrap();
    let g = &z.pattern.graph;
    let iso = RadiusFunction::constant(g, 1.0);
    let a = subharmonicity_check(&z.pattern.radii, &iso, g, &z.pattern.labelling).unwrap();
    let b = subharmonicity_check(&iso, &z.pattern.radii, g, &z.pattern.labelling).unwrap();
    let v = a.violations.len() + b.violations.len();
    outcome(v == 0 && a.checked > 0, format!("{} vertices checked, {v} violations", a.checked))
}

fn resistance() -> Outcome {
    let e = five_fold(212.0);
    let r = shortened_resistance(&e, e.central_white(), 50, 4.0).unwrap();
    let inc = r.partial_sums.windows(2).all(|w| w[1] > w[0]);
    outcome(
        inc && r.log_bound_holds && r.partial_sums.len() == 50,
        format!("S_50 = {:.4}, C1 = {:.4}, increasing {inc}, log bound {}", r.partial_sums[49], r.min_area, r.log_bound_holds),
    )
}

fn flips() -> Outcome {
    // involution on every cube corner of the quasicrystallic surface
    let z = zgamma_pattern(&five_fold(8.0), 5.0 / 6.0, None).unwrap();
    let s = &z.surface;
    let mut flipped = 0;
    let mut involution = true;
    for v in s.vertices() {
        if let Ok(t) = simple_flip(s, &v) {
            let new: Vec<_> = t.vertices().difference(&s.vertices()).cloned().collect();
            involution &= new.len() == 1 && simple_flip(&t, &new[0]).map(|b| &b == s).unwrap_or(false);
            flipped += 1;
        }
    }

    // strip flip on a folded ribbon in Z^3 and layouts from shared data
    let dirs: Vec<Complex64> = (0..3).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 3.0)).collect();
    let mut facets = Vec::new();
    for n in 0..6i64 {
        facets.push(Facet::new(vec![0, n, 1], 1, 2));
        facets.push(Facet::new(vec![0, n, 0], 1, 2));
        facets.push(Facet::new(vec![0, n, 0], 0, 1));
        facets.push(Facet::new(vec![1, n, 0], 0, 1));
    }
    let before = QuadSurface::new(3, facets).unwrap();
    let axes = (SignedAxis::new(0, 1), SignedAxis::new(1, 1), SignedAxis::new(2, 1));
    let after = strip_flip(&before, &dirs, &[0, 0, 0], axes, Half::Plus).unwrap();
    let brick = brick_of(&before).unwrap().union(&brick_of(&after).unwrap());
    let ed = assign_arguments(&dirs, None).unwrap();
    let known = zgamma_axis_values_dd(5.0 / 6.0, &ed, &brick.hi).unwrap();
    let field = extend_dd(&known, &dirs, &brick, FillOrder::Lexicographic).unwrap();
    let w = |p: &[i64]| field.get(p).map(to_c64);
    let (pa, sa) = pattern_from_w(&before, &dirs, &w, &[0, 0, 0]).unwrap();
    let (pb, sb) = pattern_from_w(&after, &dirs, &w, &[0, 0, 0]).unwrap();
    let at = |pat: &qcp_core::pattern::CirclePattern, proj: &qcp_core::surface::ProjectedSurface, p: &[i64]| {
        pat.points[proj.index_of(p).unwrap()]
    };
    let mut shared = 0;
    let mut dev = 0.0f64;
    for f in before.facets.intersection(&after.facets) {
        shared += 1;
        for c in f.corners() {
            dev = dev.max((at(&pa, &sa, &c) - at(&pb, &sb, &c)).norm());
        }
    }
    let changed = before != after;
    outcome(
        involution && flipped > 0 && changed && shared > 0 && dev < 1e-8,
        format!("{flipped} corner flips undone exactly, {shared} shared faces agree to {dev:.1e}"),
    )
}

fn cross_module() -> Outcome {
    let mut worst = 0.0f64;
    let mut count = 0;
    for (g, psi) in [(5.0 / 6.0, PI / 2.0), (1.5, 2.0 * PI / 3.0)] {
        let sp = map_to_pattern(&zgamma_map(g, psi, 10).unwrap()).unwrap();
        let h: BTreeMap<(i64, i64), f64> = zgamma_square_radii(g, psi, 10).unwrap();
        for (k, r) in h {
            let rs = sp.pattern.radii.get(sp.index[&k]);
            worst = worst.max((r - rs).abs() / rs);
            count += 1;
        }
    }
    outcome(worst < 1e-8 && count > 0, format!("{count} radii, max relative deviation {worst:.1e}"))
}

fn main() {
    let criteria: [(&str, u64, fn() -> Outcome); 11] = [
        ("angle function suite", 1, angle_suite),
        ("Z^1 identity", 1, z1_identity),
        ("Z^3/2 orthogonal pattern embedded", 5, z32_embedded),
        ("radius identity at psi = 2pi/3", 5, radius_identity),
        ("brick extension uniqueness", 30, brick_uniqueness),
        ("quasicrystallic Z^5/6 pattern", 60, quasi_zgamma),
        ("rigidity from boundary radii", 30, rigidity),
        ("subharmonicity", 10, subharmonicity),
        ("resistance divergence", 30, resistance),
        ("flip algebra", 5, flips),
        ("d = 2 Hirota against recursion", 10, cross_module),
    ];
    let mut failed = 0;
    for (i, (name, limit, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = std::panic::catch_unwind(run).unwrap_or_else(|_| outcome(false, "panicked".into()));
        let el = t.elapsed();
        let ok = r.ok && el < Duration::from_secs(*limit);
        if !ok {
            failed += 1;
        }
        println!(
            "criterion {:>2} {}: {name}: {} ({:.2} s of {limit} s)",
            i + 1,
            if ok { "PASS" } else { "FAIL" },
            r.detail,
            el.as_secs_f64()
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
