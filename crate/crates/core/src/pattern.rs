//! Kites, circle patterns, breadth-first layout and validity checks.

use crate::angle::f_theta;
use crate::error::{Error, Result};
use crate::graph::{vertex_residual, BQuadGraph, Color, Labelling, RadiusFunction};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::f64::consts::PI;

/// Points (white y0, black x0, white y1, black x1) of one face.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Kite {
    pub face: usize,
    pub points: [Complex64; 4],
}

impl Kite {
    /// Interior angle at corner `i`, in (0, 2π).
    pub fn angle(&self, i: usize) -> f64 {
        let p = self.points;
        let a = p[(i + 1) % 4] - p[i];
        let b = p[(i + 3) % 4] - p[i];
        let t = (b / a).arg();
        if t < 0.0 {
            t + 2.0 * PI
        } else {
            t
        }
    }

    /// Signed area (positive for counterclockwise kites).
    pub fn area(&self) -> f64 {
        polygon_area(&self.points)
    }

    /// The two triangles obtained by cutting along the white diagonal, which
    /// is the kite's symmetry axis and therefore always inside it.
    pub fn triangles(&self) -> [[Complex64; 3]; 2] {
        let p = self.points;
        [[p[0], p[1], p[2]], [p[0], p[2], p[3]]]
    }

    fn bbox(&self) -> (Complex64, Complex64) {
        let mut lo = self.points[0];
        let mut hi = self.points[0];
        for p in &self.points[1..] {
            lo = Complex64::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = Complex64::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (lo, hi)
    }
}

/// Circles at white vertices together with one kite per face.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CirclePattern {
    pub graph: BQuadGraph,
    pub labelling: Labelling,
    /// Position of every vertex: circle centers for white, intersection
    /// points for black.
    pub points: Vec<Complex64>,
    pub radii: RadiusFunction,
    pub kites: Vec<Kite>,
}

impl CirclePattern {
    /// Builds a pattern directly from vertex positions (kites follow the faces).
    pub fn from_points(graph: BQuadGraph, labelling: Labelling, points: Vec<Complex64>) -> Result<Self> {
        if points.len() != graph.num_vertices() {
            return Err(Error::Input("one point per vertex required".into()));
        }
        let mut radii = RadiusFunction::default();
        for v in graph.white_vertices() {
            let Some(c) = graph.star(v).first() else { continue };
            radii.0.insert(v, (points[c.next] - points[v]).norm());
        }
        let kites = graph
            .faces()
            .iter()
            .enumerate()
            .map(|(i, f)| Kite { face: i, points: [points[f[0]], points[f[1]], points[f[2]], points[f[3]]] })
            .collect();
        Ok(CirclePattern { graph, labelling, points, radii, kites })
    }

    pub fn center(&self, v: usize) -> Complex64 {
        self.points[v]
    }
}

/// Seed for the layout: a white vertex, its center and the direction of the
/// first kite edge (towards the first black neighbour in its star).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Seed {
    pub vertex: usize,
    pub center: Complex64,
    pub direction: Complex64,
}

/// Local kite coordinates for face [y0, x0, y1, x1] with y0 at 0 and y1 on
/// the positive real axis.
pub fn local_kite(r0: f64, r1: f64, alpha: f64) -> [Complex64; 4] {
    let phi = 2.0 * f_theta(r1.ln() - r0.ln(), alpha);
    let d = (r0 * r0 + r1 * r1 - 2.0 * r0 * r1 * alpha.cos()).sqrt();
    [
        Complex64::new(0.0, 0.0),
        Complex64::from_polar(r0, -phi / 2.0),
        Complex64::new(d, 0.0),
        Complex64::from_polar(r0, phi / 2.0),
    ]
}

/// Breadth-first kite placement from the seed. Re-reached points must
/// coincide to 1e−8 (relative to the pattern scale); they are never averaged.
pub fn layout_pattern(
    graph: &BQuadGraph,
    labelling: &Labelling,
    r: &RadiusFunction,
    seed: Seed,
) -> Result<CirclePattern> {
    if labelling.0.len() != graph.num_faces() {
        return Err(Error::Input("labelling does not cover all faces".into()));
    }
    r.validate()?;
    for v in graph.white_vertices() {
        if !r.0.contains_key(&v) {
            return Err(Error::Input(format!("missing radius for white vertex {v}")));
        }
    }
    if !graph.is_connected() {
        return Err(Error::Input("graph is not connected".into()));
    }
    if graph.color(seed.vertex) != Color::White {
        return Err(Error::Input("seed vertex must be white".into()));
    }
    let mut worst = (usize::MAX, 0.0f64);
    for v in graph.interior_whites() {
        let res = vertex_residual(graph, labelling, r, v).abs();
        if res > worst.1 || worst.0 == usize::MAX {
            worst = (v, res);
        }
    }
    if worst.0 != usize::MAX && worst.1 >= 1e-9 {
        return Err(Error::NonClosing { vertex: worst.0, residual: worst.1 });
    }

    let scale = r.0.values().cloned().fold(1.0f64, f64::max);
    let tol = 1e-8 * scale.max(1.0);
    let n = graph.num_vertices();
    let mut pts: Vec<Option<Complex64>> = vec![None; n];
    let first = *graph.star(seed.vertex).first().ok_or_else(|| Error::Input("isolated seed".into()))?;
    let dir = seed.direction / seed.direction.norm();
    pts[seed.vertex] = Some(seed.center);
    pts[first.next] = Some(seed.center + dir * r.get(seed.vertex));

    let nb = graph.face_neighbours();
    let mut placed = vec![false; graph.num_faces()];
    let mut queue = VecDeque::from([first.face]);
    let mut queued = vec![false; graph.num_faces()];
    queued[first.face] = true;
    while let Some(f) = queue.pop_front() {
        let q = graph.face(f);
        let local = local_kite(r.get(q[0]), r.get(q[2]), labelling.get(f));
        // match any fully known edge of the face
        let mut motion = None;
        for i in 0..4 {
            let (a, b) = (q[i], q[(i + 1) % 4]);
            if let (Some(pa), Some(pb)) = (pts[a], pts[b]) {
                let la = local[i];
                let lb = local[(i + 1) % 4];
                let rot = (pb - pa) / (lb - la);
                if ((pb - pa).norm() - (lb - la).norm()).abs() > tol {
                    return Err(Error::Layout { vertex: b, distance: ((pb - pa).norm() - (lb - la).norm()).abs() });
                }
                let rot = rot / rot.norm();
                motion = Some((rot, pa - rot * la));
                break;
            }
        }
        let (rot, shift) = motion.ok_or_else(|| Error::Input(format!("face {f} reached without a known edge")))?;
        for i in 0..4 {
            let p = rot * local[i] + shift;
            match pts[q[i]] {
                Some(old) => {
                    let dist = (old - p).norm();
                    if dist > tol {
                        return Err(Error::Layout { vertex: q[i], distance: dist });
                    }
                }
                None => pts[q[i]] = Some(p),
            }
        }
        placed[f] = true;
        for &g in &nb[f] {
            if !queued[g] {
                queued[g] = true;
                queue.push_back(g);
            }
        }
    }
    if placed.iter().any(|p| !p) {
        return Err(Error::Input("graph is not connected through faces".into()));
    }
    let points: Vec<Complex64> = pts.into_iter().map(|p| p.expect("all vertices placed")).collect();
    let kites = graph
        .faces()
        .iter()
        .enumerate()
        .map(|(i, f)| Kite { face: i, points: [points[f[0]], points[f[1]], points[f[2]], points[f[3]]] })
        .collect();
    Ok(CirclePattern {
        graph: graph.clone(),
        labelling: labelling.clone(),
        points,
        radii: RadiusFunction(graph.white_vertices().map(|v| (v, r.get(v))).collect()),
        kites,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Checks {
    pub immersed: bool,
    pub embedded: bool,
    pub convex: bool,
}

impl Checks {
    pub fn all() -> Self {
        Checks { immersed: true, embedded: true, convex: true }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PatternReport {
    /// (white vertex, kite angle sum) with |sum − 2π| > 1e−8.
    pub immersion: Vec<(usize, f64)>,
    /// Pairs of faces whose kite interiors overlap, with the overlap area.
    pub overlaps: Vec<(usize, usize, f64)>,
    /// (face, largest interior angle) for non-convex kites.
    pub nonconvex: Vec<(usize, f64)>,
    pub checked_immersed: bool,
    pub checked_embedded: bool,
    pub checked_convex: bool,
}

impl PatternReport {
    pub fn is_clean(&self) -> bool {
        self.immersion.is_empty() && self.overlaps.is_empty() && self.nonconvex.is_empty()
    }
}

/// Runs the requested checks; violations are reported, never raised.
pub fn check_pattern(pattern: &CirclePattern, checks: Checks) -> PatternReport {
    let mut rep = PatternReport {
        checked_immersed: checks.immersed,
        checked_embedded: checks.embedded,
        checked_convex: checks.convex,
        ..Default::default()
    };
    let g = &pattern.graph;
    if checks.immersed {
        for v in g.interior_whites() {
            let s: f64 = g
                .star(v)
                .iter()
                .map(|c| {
                    let k = &pattern.kites[c.face];
                    let i = g.face(c.face).iter().position(|&u| u == v).unwrap();
                    k.angle(i)
                })
                .sum();
            if (s - 2.0 * PI).abs() > 1e-8 {
                rep.immersion.push((v, s));
            }
        }
    }
    if checks.convex {
        for k in &pattern.kites {
            let m = (0..4).map(|i| k.angle(i)).fold(0.0, f64::max);
            if m > PI + 1e-12 || k.area() <= 0.0 {
                rep.nonconvex.push((k.face, m));
            }
        }
    }
    if checks.embedded {
        rep.overlaps = kite_overlaps(&pattern.kites);
    }
    rep
}

/// Pairs of kites whose interiors overlap by more than 1e−10 of the smaller
/// kite area. Broad phase: uniform spatial hash on bounding boxes.
pub fn kite_overlaps(kites: &[Kite]) -> Vec<(usize, usize, f64)> {
    if kites.is_empty() {
        return Vec::new();
    }
    let boxes: Vec<(Complex64, Complex64)> = kites.iter().map(|k| k.bbox()).collect();
    let cell = {
        let mut sizes: Vec<f64> = boxes.iter().map(|(lo, hi)| (hi.re - lo.re).max(hi.im - lo.im)).collect();
        sizes.sort_by(|a, b| a.partial_cmp(b).unwrap());
        sizes[sizes.len() / 2].max(1e-12)
    };
    let key = |x: f64| (x / cell).floor() as i64;
    let mut grid: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, (lo, hi)) in boxes.iter().enumerate() {
        for gx in key(lo.re)..=key(hi.re) {
            for gy in key(lo.im)..=key(hi.im) {
                grid.entry((gx, gy)).or_default().push(i);
            }
        }
    }
    let mut found: Vec<(usize, usize, f64)> = (0..kites.len())
        .into_par_iter()
        .flat_map_iter(|i| {
            let (lo, hi) = boxes[i];
            let mut cands = Vec::new();
            for gx in key(lo.re)..=key(hi.re) {
                for gy in key(lo.im)..=key(hi.im) {
                    if let Some(v) = grid.get(&(gx, gy)) {
                        cands.extend(v.iter().copied().filter(|&j| j > i));
                    }
                }
            }
            cands.sort_unstable();
            cands.dedup();
            let mut out = Vec::new();
            for j in cands {
                let (lo2, hi2) = boxes[j];
                if lo2.re > hi.re || lo.re > hi2.re || lo2.im > hi.im || lo.im > hi2.im {
                    continue;
                }
                let a = overlap_area(&kites[i], &kites[j]);
                let thr = 1e-10 * kites[i].area().abs().min(kites[j].area().abs());
                if a > thr {
                    out.push((kites[i].face, kites[j].face, a));
                }
            }
            out
        })
        .collect();
    found.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
    found
}

fn overlap_area(a: &Kite, b: &Kite) -> f64 {
    let mut s = 0.0;
    for ta in a.triangles() {
        for tb in b.triangles() {
            s += convex_intersection_area(&ta, &tb);
        }
    }
    s
}

fn polygon_area(p: &[Complex64]) -> f64 {
    let n = p.len();
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (p[i], p[(i + 1) % n]);
        s += a.re * b.im - a.im * b.re;
    }
    0.5 * s
}

fn ccw(t: &[Complex64; 3]) -> Vec<Complex64> {
    if polygon_area(t) < 0.0 {
        vec![t[0], t[2], t[1]]
    } else {
        t.to_vec()
    }
}

/// Sutherland–Hodgman clip of two triangles; returns the overlap area.
pub fn convex_intersection_area(a: &[Complex64; 3], b: &[Complex64; 3]) -> f64 {
    let mut poly = ccw(a);
    let clip = ccw(b);
    for i in 0..3 {
        if poly.is_empty() {
            return 0.0;
        }
        let (c0, c1) = (clip[i], clip[(i + 1) % 3]);
        let side = |p: Complex64| {
            let e = c1 - c0;
            let q = p - c0;
            e.re * q.im - e.im * q.re
        };
        let input = std::mem::take(&mut poly);
        for k in 0..input.len() {
            let p = input[k];
            let q = input[(k + 1) % input.len()];
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                poly.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                poly.push(p + (q - p) * t);
            }
        }
    }
    if poly.len() < 3 {
        0.0
    } else {
        polygon_area(&poly).max(0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::square_grid;

    #[test]
    fn two_orthogonal_unit_circles() {
        let k = local_kite(1.0, 1.0, PI / 2.0);
        assert!((k[2].re - 2f64.sqrt()).abs() < 1e-15);
        assert!(((k[1] - k[2]).norm() - 1.0).abs() < 1e-15);
        assert!(((k[3] - k[2]).norm() - 1.0).abs() < 1e-15);
        let kite = Kite { face: 0, points: k };
        assert!(kite.area() > 0.0);
        assert!((kite.angle(1) - PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn square_grid_isoradial_layout() {
        let (g, _, coords) = square_grid(6);
        let l = Labelling::constant(g.num_faces(), PI / 2.0);
        let r = RadiusFunction::constant(&g, 1.0);
        let seed = Seed { vertex: 0, center: Complex64::new(0.0, 0.0), direction: Complex64::new(1.0, 0.0) };
        let p = layout_pattern(&g, &l, &r, seed).unwrap();
        for v in 0..g.num_vertices() {
            let (i, j) = coords[v];
            assert!((p.points[v] - Complex64::new(i as f64, j as f64)).norm() < 1e-12);
        }
        let rep = check_pattern(&p, Checks::all());
        assert!(rep.is_clean(), "{rep:?}");
    }

    #[test]
    fn translated_kite_overlaps() {
        let (g, _, _) = square_grid(3);
        let l = Labelling::constant(g.num_faces(), PI / 2.0);
        let r = RadiusFunction::constant(&g, 1.0);
        let seed = Seed { vertex: 0, center: Complex64::new(0.0, 0.0), direction: Complex64::new(1.0, 0.0) };
        let mut p = layout_pattern(&g, &l, &r, seed).unwrap();
        let d = p.kites[4].points[0] - p.kites[0].points[0];
        for q in &mut p.kites[0].points {
            *q += d;
        }
        let rep = check_pattern(&p, Checks { embedded: true, ..Default::default() });
        assert_eq!(rep.overlaps.len(), 1);
        assert_eq!((rep.overlaps[0].0, rep.overlaps[0].1), (0, 4));
    }

    #[test]
    fn non_closing_is_rejected() {
        let (g, _, _) = square_grid(2);
        let l = Labelling::constant(g.num_faces(), PI / 2.0);
        let mut r = RadiusFunction::constant(&g, 1.0);
        r.0.insert(4, 3.0);
        let seed = Seed { vertex: 0, center: Complex64::new(0.0, 0.0), direction: Complex64::new(1.0, 0.0) };
        assert!(matches!(layout_pattern(&g, &l, &r, seed), Err(Error::NonClosing { vertex: 4, .. })));
    }

    #[test]
    fn clip_area() {
        let a = [Complex64::new(0.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(0.0, 2.0)];
        let b = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        assert!((convex_intersection_area(&a, &b) - 0.5).abs() < 1e-15);
        let c = [Complex64::new(5.0, 5.0), Complex64::new(6.0, 5.0), Complex64::new(5.0, 6.0)];
        assert_eq!(convex_intersection_area(&a, &c), 0.0);
    }
}
