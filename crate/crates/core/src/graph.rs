//! b-quad-graphs, labellings, radius functions and the closing condition.

use crate::angle::f_theta;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Color {
    White,
    Black,
}

/// One entry of a vertex star: the face and the neighbours that precede and
/// follow the vertex in that face's counterclockwise order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Corner {
    pub face: usize,
    pub next: usize,
    pub prev: usize,
}

/// Bipartite quadrilateral cell complex.
///
/// Faces are counterclockwise `[y0, x0, y1, x1]` with `y0, y1` white and
/// `x0, x1` black.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(into = "RawGraph", try_from = "RawGraph")]
pub struct BQuadGraph {
    colors: Vec<Color>,
    faces: Vec<[usize; 4]>,
    stars: Vec<Vec<Corner>>,
    interior: Vec<bool>,
    boundary_face: Vec<bool>,
}

#[derive(Serialize, Deserialize)]
struct RawGraph {
    colors: Vec<Color>,
    faces: Vec<[usize; 4]>,
}

impl From<BQuadGraph> for RawGraph {
    fn from(g: BQuadGraph) -> Self {
        RawGraph { colors: g.colors, faces: g.faces }
    }
}

impl TryFrom<RawGraph> for BQuadGraph {
    type Error = Error;
    fn try_from(r: RawGraph) -> Result<Self> {
        BQuadGraph::new(r.colors, r.faces)
    }
}

impl BQuadGraph {
    /// Validates and indexes a face list. Faces may start at either vertex
    /// color; they are rotated so that position 0 is white.
    pub fn new(colors: Vec<Color>, faces: Vec<[usize; 4]>) -> Result<Self> {
        let nv = colors.len();
        let mut norm = Vec::with_capacity(faces.len());
        for (fi, f) in faces.iter().enumerate() {
            for &v in f {
                if v >= nv {
                    return Err(Error::Input(format!("face {fi} references vertex {v} >= {nv}")));
                }
            }
            for i in 0..4 {
                for j in i + 1..4 {
                    if f[i] == f[j] {
                        return Err(Error::Input(format!("face {fi} repeats vertex {}", f[i])));
                    }
                }
            }
            let mut g = *f;
            if colors[g[0]] == Color::Black {
                g.rotate_left(1);
            }
            let ok = colors[g[0]] == Color::White
                && colors[g[1]] == Color::Black
                && colors[g[2]] == Color::White
                && colors[g[3]] == Color::Black;
            if !ok {
                return Err(Error::Input(format!("face {fi} does not alternate colors")));
            }
            norm.push(g);
        }

        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (fi, f) in norm.iter().enumerate() {
            for i in 0..4 {
                let e = (f[i], f[(i + 1) % 4]);
                if let Some(o) = directed.insert(e, fi) {
                    return Err(Error::Input(format!(
                        "directed edge {:?} used by faces {o} and {fi} (orientation or multiplicity)",
                        e
                    )));
                }
            }
        }
        let mut boundary_face = vec![false; norm.len()];
        for (fi, f) in norm.iter().enumerate() {
            for i in 0..4 {
                if !directed.contains_key(&(f[(i + 1) % 4], f[i])) {
                    boundary_face[fi] = true;
                }
            }
        }

        let mut raw: Vec<Vec<Corner>> = vec![Vec::new(); nv];
        for (fi, f) in norm.iter().enumerate() {
            for i in 0..4 {
                raw[f[i]].push(Corner { face: fi, next: f[(i + 1) % 4], prev: f[(i + 3) % 4] });
            }
        }
        let mut stars = Vec::with_capacity(nv);
        let mut interior = vec![false; nv];
        for (v, corners) in raw.into_iter().enumerate() {
            let (ordered, closed) = order_star(&corners)?;
            interior[v] = closed;
            if closed && ordered.len() < 3 {
                return Err(Error::Input(format!("interior vertex {v} has degree < 3")));
            }
            stars.push(ordered);
        }
        Ok(BQuadGraph { colors, faces: norm, stars, interior, boundary_face })
    }

    pub fn num_vertices(&self) -> usize {
        self.colors.len()
    }
    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }
    pub fn colors(&self) -> &[Color] {
        &self.colors
    }
    pub fn color(&self, v: usize) -> Color {
        self.colors[v]
    }
    pub fn faces(&self) -> &[[usize; 4]] {
        &self.faces
    }
    pub fn face(&self, f: usize) -> [usize; 4] {
        self.faces[f]
    }
    /// Corners around `v` in counterclockwise order (one or more open fans
    /// for boundary vertices, a single closed cycle for interior ones).
    pub fn star(&self, v: usize) -> &[Corner] {
        &self.stars[v]
    }
    pub fn is_interior(&self, v: usize) -> bool {
        self.interior[v]
    }
    pub fn is_boundary_face(&self, f: usize) -> bool {
        self.boundary_face[f]
    }
    pub fn white_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(|&v| self.colors[v] == Color::White)
    }
    pub fn black_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.num_vertices()).filter(|&v| self.colors[v] == Color::Black)
    }
    pub fn interior_whites(&self) -> Vec<usize> {
        self.white_vertices().filter(|&v| self.interior[v]).collect()
    }

    /// White neighbour of white vertex `v` across face `f`.
    pub fn opposite(&self, f: usize, v: usize) -> usize {
        let q = self.faces[f];
        let i = q.iter().position(|&u| u == v).expect("vertex not on face");
        q[(i + 2) % 4]
    }

    /// White-graph star of `v`: (neighbour, face) pairs in counterclockwise order.
    pub fn white_star(&self, v: usize) -> Vec<(usize, usize)> {
        self.stars[v].iter().map(|c| (self.opposite(c.face, v), c.face)).collect()
    }

    /// Undirected edges of the quad graph, each once with the white end first.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for f in &self.faces {
            out.push((f[0], f[1]));
            out.push((f[0], f[3]));
            out.push((f[2], f[1]));
            out.push((f[2], f[3]));
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Edges of the white graph G (one per face), as (y0, y1, face).
    pub fn white_edges(&self) -> Vec<(usize, usize, usize)> {
        self.faces.iter().enumerate().map(|(i, f)| (f[0], f[2], i)).collect()
    }

    /// Faces adjacent through a shared quad edge.
    pub fn face_neighbours(&self) -> Vec<Vec<usize>> {
        let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for i in 0..4 {
                let (a, b) = (f[i], f[(i + 1) % 4]);
                by_edge.entry((a.min(b), a.max(b))).or_default().push(fi);
            }
        }
        let mut nb = vec![Vec::new(); self.faces.len()];
        for fs in by_edge.values() {
            if fs.len() == 2 {
                nb[fs[0]].push(fs[1]);
                nb[fs[1]].push(fs[0]);
            }
        }
        for l in &mut nb {
            l.sort_unstable();
        }
        nb
    }

    pub fn is_connected(&self) -> bool {
        if self.faces.is_empty() {
            return false;
        }
        let nb = self.face_neighbours();
        let mut seen = vec![false; self.faces.len()];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(f) = stack.pop() {
            for &g in &nb[f] {
                if !seen[g] {
                    seen[g] = true;
                    stack.push(g);
                }
            }
        }
        let used: Vec<bool> = {
            let mut u = vec![false; self.num_vertices()];
            for f in &self.faces {
                for &v in f {
                    u[v] = true;
                }
            }
            u
        };
        seen.iter().all(|&s| s) && used.iter().all(|&u| u)
    }
}

fn order_star(corners: &[Corner]) -> Result<(Vec<Corner>, bool)> {
    if corners.is_empty() {
        return Ok((Vec::new(), false));
    }
    // Rotating counterclockwise around v, the corner after c is the one whose
    // `next` neighbour equals c.prev.
    let by_next: HashMap<usize, usize> =
        corners.iter().enumerate().map(|(i, c)| (c.next, i)).collect();
    let by_prev: HashMap<usize, usize> =
        corners.iter().enumerate().map(|(i, c)| (c.prev, i)).collect();
    let mut used = vec![false; corners.len()];
    let mut out = Vec::with_capacity(corners.len());
    let mut closed = false;
    let mut fans = 0;
    loop {
        // start each fan at a corner without predecessor, or anywhere if all closed
        let start = (0..corners.len())
            .filter(|&i| !used[i])
            .find(|&i| !by_prev.contains_key(&corners[i].next))
            .or_else(|| (0..corners.len()).find(|&i| !used[i]));
        let Some(mut i) = start else { break };
        fans += 1;
        let fan_start = i;
        loop {
            used[i] = true;
            out.push(corners[i]);
            match by_next.get(&corners[i].prev) {
                Some(&j) if j == fan_start => {
                    closed = true;
                    break;
                }
                Some(&j) if !used[j] => i = j,
                Some(_) => {
                    return Err(Error::Input("vertex star is not a disk or fan".into()));
                }
                None => break,
            }
        }
    }
    if closed && fans > 1 {
        return Err(Error::Input("vertex star has a closed cycle plus extra faces".into()));
    }
    Ok((out, closed))
}

/// Intersection angle per face, in (0, π).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Labelling(pub Vec<f64>);

impl Labelling {
    pub fn constant(num_faces: usize, alpha: f64) -> Self {
        Labelling(vec![alpha; num_faces])
    }
    pub fn get(&self, f: usize) -> f64 {
        self.0[f]
    }
}

/// Positive radius per white vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct RadiusFunction(#[serde(with = "crate::io::entries")] pub BTreeMap<usize, f64>);

impl RadiusFunction {
    pub fn constant(graph: &BQuadGraph, r: f64) -> Self {
        RadiusFunction(graph.white_vertices().map(|v| (v, r)).collect())
    }
    pub fn get(&self, v: usize) -> f64 {
        self.0[&v]
    }
    pub fn validate(&self) -> Result<()> {
        for (&v, &r) in &self.0 {
            if !(r.is_finite() && r > 0.0) {
                return Err(Error::Input(format!("radius {r} at vertex {v} is not positive and finite")));
            }
        }
        Ok(())
    }
}

/// Interior black vertices whose angle sum differs from 2π by more than 1e−12.
pub fn check_admissible(graph: &BQuadGraph, labelling: &Labelling) -> Result<Vec<(usize, f64)>> {
    if labelling.0.len() != graph.num_faces() {
        return Err(Error::Input(format!(
            "labelling has {} entries for {} faces",
            labelling.0.len(),
            graph.num_faces()
        )));
    }
    let mut out = Vec::new();
    for v in graph.black_vertices() {
        if !graph.is_interior(v) {
            continue;
        }
        let s: f64 = graph.star(v).iter().map(|c| labelling.get(c.face)).sum();
        if (s - 2.0 * PI).abs() > 1e-12 {
            out.push((v, s));
        }
    }
    Ok(out)
}

/// Σ f_{α_j}(log r_j − log r_0) − π.
pub fn closing_residual(center_radius: f64, neighbor_radii: &[f64], angles: &[f64]) -> Result<f64> {
    if neighbor_radii.is_empty() {
        return Err(Error::Input("empty star".into()));
    }
    if neighbor_radii.len() != angles.len() {
        return Err(Error::Input("radii and angles differ in length".into()));
    }
    if !(center_radius > 0.0) || neighbor_radii.iter().any(|&r| !(r > 0.0)) {
        return Err(Error::Input("radii must be positive".into()));
    }
    if angles.iter().any(|&a| !(a > 0.0 && a < PI)) {
        return Err(Error::Domain("angles must lie in (0, pi)".into()));
    }
    let u0 = center_radius.ln();
    Ok(neighbor_radii.iter().zip(angles).map(|(&r, &a)| f_theta(r.ln() - u0, a)).sum::<f64>() - PI)
}

/// Closing residual at an interior white vertex of a graph.
pub fn vertex_residual(graph: &BQuadGraph, labelling: &Labelling, r: &RadiusFunction, v: usize) -> f64 {
    let u0 = r.get(v).ln();
    graph
        .white_star(v)
        .iter()
        .map(|&(w, f)| f_theta(r.get(w).ln() - u0, labelling.get(f)))
        .sum::<f64>()
        - PI
}

/// v ↦ 1/r(v).
pub fn invert_radii(r: &RadiusFunction) -> RadiusFunction {
    RadiusFunction(r.0.iter().map(|(&v, &x)| (v, 1.0 / x)).collect())
}

/// Square grid patch on the vertices (i, j), 0 ≤ i, j ≤ n. White iff i + j even.
/// Returns the graph, the vertex positions and the (i, j) coordinates.
pub fn square_grid(n: usize) -> (BQuadGraph, Vec<num_complex::Complex64>, Vec<(i64, i64)>) {
    let idx = |i: usize, j: usize| i * (n + 1) + j;
    let mut colors = Vec::new();
    let mut pos = Vec::new();
    let mut coords = Vec::new();
    for i in 0..=n {
        for j in 0..=n {
            colors.push(if (i + j) % 2 == 0 { Color::White } else { Color::Black });
            pos.push(num_complex::Complex64::new(i as f64, j as f64));
            coords.push((i as i64, j as i64));
        }
    }
    let mut faces = Vec::new();
    for i in 0..n {
        for j in 0..n {
            faces.push([idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1)]);
        }
    }
    (BQuadGraph::new(colors, faces).expect("square grid is valid"), pos, coords)
}
