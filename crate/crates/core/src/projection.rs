//! Rhombic embeddings from a 2-plane in R^d by the grid projection method
//! (de Bruijn's multigrid dual).

use crate::error::{Error, Result};
use crate::graph::{BQuadGraph, Color};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::f64::consts::PI;

const GRAZE_TOL: f64 = 1e-9;

/// Affine 2-plane E = t + span(u1, u2) in R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaneSpec {
    pub d: usize,
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub t: Vec<f64>,
}

/// Offset along (1, …, 1) or a full translation vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Offset {
    Diagonal(f64),
    Vector(Vec<f64>),
}

impl PlaneSpec {
    /// E = R² inside R², which yields the square grid.
    pub fn square() -> Self {
        PlaneSpec { d: 2, u1: vec![1.0, 0.0], u2: vec![0.0, 1.0], t: vec![0.0, 0.0] }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d < 2 {
            return Err(Error::Input("dimension must be at least 2".into()));
        }
        if self.u1.len() != self.d || self.u2.len() != self.d || self.t.len() != self.d {
            return Err(Error::Input("plane vectors must have length d".into()));
        }
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        if (dot(&self.u1, &self.u1) - 1.0).abs() > 1e-9
            || (dot(&self.u2, &self.u2) - 1.0).abs() > 1e-9
            || dot(&self.u1, &self.u2).abs() > 1e-9
        {
            return Err(Error::Input("u1, u2 must be orthonormal".into()));
        }
        if self.t.iter().chain(&self.u1).chain(&self.u2).any(|x| !x.is_finite()) {
            return Err(Error::Input("plane data must be finite".into()));
        }
        Ok(())
    }

    /// Projection of e_k onto span(u1, u2) as a complex number.
    pub fn projected_axis(&self, k: usize) -> Complex64 {
        Complex64::new(self.u1[k], self.u2[k])
    }

    /// Plane coordinates of the origin of E (the point t).
    pub fn t_plane(&self) -> Complex64 {
        let dot = |a: &[f64]| a.iter().zip(&self.t).map(|(x, y)| x * y).sum::<f64>();
        Complex64::new(dot(&self.u1), dot(&self.u2))
    }
}

/// c_j = 1/|P_E(e_j)|.
pub fn projection_scales(plane: &PlaneSpec) -> Result<Vec<f64>> {
    plane.validate()?;
    (0..plane.d)
        .map(|k| {
            let n = plane.projected_axis(k).norm();
            if n <= 1e-9 {
                Err(Error::Degenerate(format!("axis {} projects to a point", k + 1)))
            } else {
                Ok(1.0 / n)
            }
        })
        .collect()
}

/// Invariant plane of the cyclic coordinate shift for the rotation block by
/// 2π/n, translated by `offset`.
pub fn symmetric_plane(folds: usize, offset: Offset) -> Result<PlaneSpec> {
    if folds < 5 || folds % 2 == 0 {
        return Err(Error::Unsupported(format!("{folds}-fold planes (need odd n >= 5)")));
    }
    let s = (2.0 / folds as f64).sqrt();
    let ang = |k: usize| 2.0 * PI * k as f64 / folds as f64;
    let u1 = (0..folds).map(|k| s * ang(k).cos()).collect();
    let u2 = (0..folds).map(|k| s * ang(k).sin()).collect();
    let t = match offset {
        Offset::Diagonal(x) => vec![x; folds],
        Offset::Vector(v) => {
            if v.len() != folds {
                return Err(Error::Input(format!("offset has {} entries, need {folds}", v.len())));
            }
            v
        }
    };
    Ok(PlaneSpec { d: folds, u1, u2, t })
}

/// Rhombic embedding with its lift to the scaled lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedEmbedding {
    pub graph: BQuadGraph,
    /// Planar positions, relative to the projection of t.
    pub positions: Vec<Complex64>,
    /// Integer lattice coordinates n; the lattice point is (c_k n_k).
    pub coords: Vec<Vec<i64>>,
    pub scales: Vec<f64>,
    /// Unit edge directions a_k = P_E(c_k e_k); the full set is ±a_k.
    pub directions: Vec<Complex64>,
}

impl LiftedEmbedding {
    /// Index of the white vertex closest to the projected origin (ties broken
    /// lexicographically by lattice coordinates).
    pub fn central_white(&self) -> usize {
        let mut best: Option<usize> = None;
        for v in self.graph.white_vertices() {
            best = match best {
                None => Some(v),
                Some(b) => {
                    let (db, dv) = (self.positions[b].norm(), self.positions[v].norm());
                    if dv < db - 1e-12 || ((dv - db).abs() <= 1e-12 && self.coords[v] < self.coords[b]) {
                        Some(v)
                    } else {
                        Some(b)
                    }
                }
            };
        }
        best.expect("embedding has white vertices")
    }
}

type Facet = (Vec<i64>, usize, usize);

fn frac_to_half(g: f64) -> f64 {
    (g - g.floor() - 0.5).abs()
}

/// Grid projection restricted to the window |position| < ρ.
pub fn generate_embedding(plane: &PlaneSpec, rho: f64) -> Result<LiftedEmbedding> {
    if !(rho > 2.0) {
        return Err(Error::Input(format!("window radius {rho} must exceed 2")));
    }
    let c = projection_scales(plane)?;
    let d = plane.d;
    let u: Vec<Complex64> = (0..d).map(|k| plane.projected_axis(k)).collect();
    let a: Vec<Complex64> = (0..d).map(|k| u[k] * c[k]).collect();
    let contained = (0..d).filter(|&k| u[k].norm_sqr() > 1.0 - 1e-12).count();
    if contained == 1 || (contained >= 2 && d > 2) {
        return Err(Error::Degenerate("E contains a lattice segment".into()));
    }
    for j in 0..d {
        for k in j + 1..d {
            if (a[j].conj() * a[k]).im.abs() < 1e-9 {
                return Err(Error::Degenerate(format!("axes {} and {} project to parallel lines", j + 1, k + 1)));
            }
        }
    }
    let tp = plane.t_plane();
    let t = &plane.t;
    let g = |l: usize, lam: Complex64| (t[l] + lam.re * u[l].re + lam.im * u[l].im) / c[l];
    let position = |n: &[i64]| -> Complex64 { n.iter().zip(&a).map(|(&m, &ak)| ak * m as f64).sum::<Complex64>() - tp };

    let reach = 0.5 * c.iter().map(|x| x * x).sum::<f64>().sqrt();
    let big_r = rho + reach + 1.0;
    let line_range = |k: usize| {
        // λ·U_k = c_k (m + 1/2) − t_k with |λ·U_k| ≤ R |U_k|
        let lim = big_r * u[k].norm();
        let lo = ((-lim + t[k]) / c[k] - 0.5).floor() as i64;
        let hi = ((lim + t[k]) / c[k] - 0.5).ceil() as i64;
        lo..=hi
    };
    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|j| (j + 1..d).map(move |k| (j, k))).collect();

    enum Hit {
        Face(Facet),
        Triple(Vec<usize>, Vec<i64>),
        Bad(String),
    }
    let hits: Vec<Hit> = pairs
        .par_iter()
        .flat_map_iter(|&(j, k)| {
            let det = u[j].re * u[k].im - u[j].im * u[k].re;
            let mut out = Vec::new();
            for mj in line_range(j) {
                let bj = c[j] * (mj as f64 + 0.5) - t[j];
                for mk in line_range(k) {
                    let bk = c[k] * (mk as f64 + 0.5) - t[k];
                    let lam = Complex64::new((bj * u[k].im - bk * u[j].im) / det, (u[j].re * bk - u[k].re * bj) / det);
                    if lam.norm() >= big_r {
                        continue;
                    }
                    let mut n = vec![0i64; d];
                    let mut extra = Vec::new();
                    for l in 0..d {
                        if l == j || l == k {
                            continue;
                        }
                        let gl = g(l, lam);
                        if frac_to_half(gl) < GRAZE_TOL {
                            extra.push(l);
                            n[l] = (gl - 0.5).round() as i64;
                        } else {
                            n[l] = gl.round() as i64;
                        }
                    }
                    n[j] = mj;
                    n[k] = mk;
                    if extra.is_empty() {
                        out.push(Hit::Face((n, j, k)));
                    } else if extra.len() == 1 {
                        let mut js = vec![j, k, extra[0]];
                        js.sort_unstable();
                        out.push(Hit::Triple(js, n));
                    } else {
                        out.push(Hit::Bad(format!(
                            "{} grid lines meet at plane point ({:.6}, {:.6}); perturb the offset t",
                            extra.len() + 2,
                            lam.re,
                            lam.im
                        )));
                    }
                }
            }
            out
        })
        .collect();

    let mut facets: BTreeSet<Facet> = BTreeSet::new();
    let mut triples: BTreeSet<(Vec<usize>, Vec<i64>)> = BTreeSet::new();
    for h in hits {
        match h {
            Hit::Face(f) => {
                facets.insert(f);
            }
            Hit::Triple(js, n) => {
                triples.insert((js, n));
            }
            Hit::Bad(msg) => return Err(Error::Degenerate(msg)),
        }
    }
    for (js, n) in triples {
        let z = split_corner(plane, &c, &u, &js, &n);
        for x in 0..3 {
            for y in x + 1..3 {
                let (p, q) = (js[x], js[y]);
                let r = js[3 - x - y];
                let mut base = n.clone();
                base[r] = z[r];
                facets.insert((base, p, q));
            }
        }
    }

    // window: keep facets whose four corners lie strictly inside ρ
    let corners = |f: &Facet| -> [Vec<i64>; 4] {
        let (b, j, k) = f;
        let mut p1 = b.clone();
        p1[*j] += 1;
        let mut p2 = p1.clone();
        p2[*k] += 1;
        let mut p3 = b.clone();
        p3[*k] += 1;
        [b.clone(), p1, p2, p3]
    };
    let kept: Vec<Facet> = facets.into_iter().filter(|f| corners(f).iter().all(|p| position(p).norm() < rho)).collect();
    if kept.is_empty() {
        return Err(Error::Input("window contains no complete face".into()));
    }
    let kept = central_component(&kept, &corners, &position);

    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    for f in &kept {
        for p in corners(f) {
            index.entry(p).or_insert(0);
        }
    }
    let coords: Vec<Vec<i64>> = index.keys().cloned().collect();
    for (i, v) in index.values_mut().enumerate() {
        *v = i;
    }
    let colors: Vec<Color> = coords
        .iter()
        .map(|n| if n.iter().sum::<i64>().rem_euclid(2) == 0 { Color::White } else { Color::Black })
        .collect();
    let faces: Vec<[usize; 4]> = kept
        .iter()
        .map(|f| {
            let cs = corners(f);
            let ids = [index[&cs[0]], index[&cs[1]], index[&cs[2]], index[&cs[3]]];
            if (a[f.1].conj() * a[f.2]).im > 0.0 {
                ids
            } else {
                [ids[0], ids[3], ids[2], ids[1]]
            }
        })
        .collect();
    let positions = coords.iter().map(|n| position(n)).collect();
    let graph = BQuadGraph::new(colors, faces)?;
    Ok(LiftedEmbedding { graph, positions, coords, scales: c, directions: a })
}

/// Corner of the 3-cube at a triple point that is added to split the hexagon:
/// one of the two corners not incident to a sector, the one nearer to E.
fn split_corner(plane: &PlaneSpec, c: &[f64], u: &[Complex64], js: &[usize], n: &[i64]) -> Vec<i64> {
    // boundary directions of the three lines around the point
    let mut bound: Vec<f64> = Vec::new();
    for &j in js {
        let perp = Complex64::new(-u[j].im, u[j].re).arg();
        bound.push(perp.rem_euclid(2.0 * PI));
        bound.push((perp + PI).rem_euclid(2.0 * PI));
    }
    bound.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mut seen: BTreeSet<[bool; 3]> = BTreeSet::new();
    for i in 0..bound.len() {
        let next = if i + 1 < bound.len() { bound[i + 1] } else { bound[0] + 2.0 * PI };
        let mid = Complex64::from_polar(1.0, 0.5 * (bound[i] + next));
        let sig = [0, 1, 2].map(|x| mid.re * u[js[x]].re + mid.im * u[js[x]].im > 0.0);
        seen.insert(sig);
    }
    let mut best: Option<(f64, Vec<i64>)> = None;
    for bits in 0..8u32 {
        let sig = [bits & 1 != 0, bits & 2 != 0, bits & 4 != 0];
        if seen.contains(&sig) {
            continue;
        }
        let mut z = n.to_vec();
        for x in 0..3 {
            z[js[x]] = n[js[x]] + sig[x] as i64;
        }
        // squared distance of the lattice point from E
        let y: Vec<f64> = (0..plane.d).map(|k| c[k] * z[k] as f64 - plane.t[k]).collect();
        let p1: f64 = y.iter().zip(&plane.u1).map(|(a, b)| a * b).sum();
        let p2: f64 = y.iter().zip(&plane.u2).map(|(a, b)| a * b).sum();
        let dist = y.iter().map(|v| v * v).sum::<f64>() - p1 * p1 - p2 * p2;
        best = match best {
            None => Some((dist, z)),
            Some((bd, bz)) => {
                if dist < bd - 1e-12 || ((dist - bd).abs() <= 1e-12 && z < bz) {
                    Some((dist, z))
                } else {
                    Some((bd, bz))
                }
            }
        };
    }
    best.expect("two hidden corners exist").1
}

fn central_component(
    kept: &[Facet],
    corners: &dyn Fn(&Facet) -> [Vec<i64>; 4],
    position: &dyn Fn(&[i64]) -> Complex64,
) -> Vec<Facet> {
    let mut by_edge: HashMap<(Vec<i64>, Vec<i64>), Vec<usize>> = HashMap::new();
    for (i, f) in kept.iter().enumerate() {
        let cs = corners(f);
        for e in 0..4 {
            let (p, q) = (cs[e].clone(), cs[(e + 1) % 4].clone());
            let key = if p < q { (p, q) } else { (q, p) };
            by_edge.entry(key).or_default().push(i);
        }
    }
    let mut adj = vec![Vec::new(); kept.len()];
    for fs in by_edge.values() {
        for &x in fs {
            for &y in fs {
                if x != y {
                    adj[x].push(y);
                }
            }
        }
    }
    let start = (0..kept.len())
        .min_by(|&x, &y| {
            let px: Complex64 = corners(&kept[x]).iter().map(|p| position(p)).sum::<Complex64>();
            let py: Complex64 = corners(&kept[y]).iter().map(|p| position(p)).sum::<Complex64>();
            px.norm().partial_cmp(&py.norm()).unwrap().then_with(|| kept[x].cmp(&kept[y]))
        })
        .unwrap();
    let mut seen = vec![false; kept.len()];
    seen[start] = true;
    let mut stack = vec![start];
    while let Some(f) = stack.pop() {
        for &g in &adj[f] {
            if !seen[g] {
                seen[g] = true;
                stack.push(g);
            }
        }
    }
    kept.iter().zip(seen).filter(|(_, s)| *s).map(|(f, _)| f.clone()).collect()
}
