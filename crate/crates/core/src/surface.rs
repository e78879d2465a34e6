//! Quad-surfaces in Z^d: lifting, projection, monotonicity, bricks and flips.

use crate::error::{Error, Result};
use crate::graph::{BQuadGraph, Color};
use crate::projection::LiftedEmbedding;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

pub type Point = Vec<i64>;

/// Unit 2-facet {base + s e_j + t e_k : s, t ∈ [0, 1]} with j < k.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Facet {
    pub base: Point,
    pub j: usize,
    pub k: usize,
}

impl Facet {
    pub fn new(base: Point, j: usize, k: usize) -> Self {
        let (j, k) = if j < k { (j, k) } else { (k, j) };
        Facet { base, j, k }
    }

    /// Corners in the order base, +e_j, +e_j+e_k, +e_k.
    pub fn corners(&self) -> [Point; 4] {
        let b = &self.base;
        let mut p1 = b.clone();
        p1[self.j] += 1;
        let mut p2 = p1.clone();
        p2[self.k] += 1;
        let mut p3 = b.clone();
        p3[self.k] += 1;
        [b.clone(), p1, p2, p3]
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter().enumerate().all(|(i, &x)| {
            let b = self.base[i];
            if i == self.j || i == self.k {
                x == b || x == b + 1
            } else {
                x == b
            }
        })
    }

    pub fn translated(&self, v: &[i64]) -> Facet {
        Facet { base: self.base.iter().zip(v).map(|(a, b)| a + b).collect(), j: self.j, k: self.k }
    }
}

/// A signed coordinate direction s·e_axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedAxis {
    pub axis: usize,
    pub sign: i64,
}

impl SignedAxis {
    pub fn new(axis: usize, sign: i64) -> Self {
        SignedAxis { axis, sign: sign.signum() }
    }
    fn vector(&self, d: usize) -> Point {
        let mut v = vec![0; d];
        v[self.axis] = self.sign;
        v
    }
    fn neg(self) -> Self {
        SignedAxis { axis: self.axis, sign: -self.sign }
    }
}

/// Facet at corner z spanned by two signed directions.
pub fn facet_at(z: &[i64], a: SignedAxis, b: SignedAxis) -> Facet {
    let mut base = z.to_vec();
    if a.sign < 0 {
        base[a.axis] -= 1;
    }
    if b.sign < 0 {
        base[b.axis] -= 1;
    }
    Facet::new(base, a.axis, b.axis)
}

fn add(p: &[i64], q: &[i64]) -> Point {
    p.iter().zip(q).map(|(a, b)| a + b).collect()
}

/// Two-dimensional subcomplex of Z^d given by its facets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadSurface {
    pub d: usize,
    pub facets: BTreeSet<Facet>,
}

impl QuadSurface {
    pub fn new(d: usize, facets: impl IntoIterator<Item = Facet>) -> Result<Self> {
        let facets: BTreeSet<Facet> = facets.into_iter().collect();
        for f in &facets {
            if f.base.len() != d || f.j >= f.k || f.k >= d {
                return Err(Error::Input(format!("facet {f:?} does not fit Z^{d}")));
            }
        }
        Ok(QuadSurface { d, facets })
    }

    pub fn vertices(&self) -> BTreeSet<Point> {
        self.facets.iter().flat_map(|f| f.corners()).collect()
    }

    /// Undirected edges as (lower endpoint, axis).
    pub fn edges(&self) -> BTreeSet<(Point, usize)> {
        let mut out = BTreeSet::new();
        for f in &self.facets {
            let c = f.corners();
            out.insert((c[0].clone(), f.j));
            out.insert((c[3].clone(), f.j));
            out.insert((c[0].clone(), f.k));
            out.insert((c[1].clone(), f.k));
        }
        out
    }

    pub fn facets_at(&self, p: &[i64]) -> Vec<Facet> {
        // a facet containing p has base p − (0/1 on its two axes)
        let mut out = Vec::new();
        for j in 0..self.d {
            for k in j + 1..self.d {
                for (sj, sk) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                    let mut b = p.to_vec();
                    b[j] -= sj;
                    b[k] -= sk;
                    let f = Facet { base: b, j, k };
                    if self.facets.contains(&f) {
                        out.push(f);
                    }
                }
            }
        }
        out
    }

    pub fn color(p: &[i64]) -> Color {
        if p.iter().sum::<i64>().rem_euclid(2) == 0 {
            Color::White
        } else {
            Color::Black
        }
    }
}

/// Lifts a rhombic embedding: the seed white vertex goes to the origin and an
/// edge of direction ±a_k becomes ±e_k.
pub fn lift_graph(
    graph: &BQuadGraph,
    positions: &[Complex64],
    directions: &[Complex64],
    seed: usize,
) -> Result<(QuadSurface, Vec<Point>)> {
    let d = directions.len();
    if graph.color(seed) != Color::White {
        return Err(Error::Lift("seed must be white".into()));
    }
    let classify = |dz: Complex64| -> Result<SignedAxis> {
        for (k, a) in directions.iter().enumerate() {
            if (dz - a).norm() < 1e-9 {
                return Ok(SignedAxis::new(k, 1));
            }
            if (dz + a).norm() < 1e-9 {
                return Ok(SignedAxis::new(k, -1));
            }
        }
        Err(Error::Lift(format!("edge vector {dz} is not an edge direction")))
    };
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); graph.num_vertices()];
    for (x, y) in graph.edges() {
        adj[x].push(y);
        adj[y].push(x);
    }
    let mut coords: Vec<Option<Point>> = vec![None; graph.num_vertices()];
    coords[seed] = Some(vec![0; d]);
    let mut queue = VecDeque::from([seed]);
    while let Some(v) = queue.pop_front() {
        let cv = coords[v].clone().unwrap();
        for &w in &adj[v] {
            let s = classify(positions[w] - positions[v])?;
            let mut cw = cv.clone();
            cw[s.axis] += s.sign;
            match &coords[w] {
                Some(old) if *old != cw => {
                    return Err(Error::Lift(format!("vertex {w} reached with coordinates {old:?} and {cw:?}")))
                }
                Some(_) => {}
                None => {
                    coords[w] = Some(cw);
                    queue.push_back(w);
                }
            }
        }
    }
    let coords: Vec<Point> = coords
        .into_iter()
        .enumerate()
        .map(|(v, c)| c.ok_or_else(|| Error::Lift(format!("vertex {v} unreachable"))))
        .collect::<Result<_>>()?;
    let mut facets = BTreeSet::new();
    for (fi, q) in graph.faces().iter().enumerate() {
        let pts: Vec<&Point> = q.iter().map(|&v| &coords[v]).collect();
        let mut lo = pts[0].clone();
        for p in &pts[1..] {
            for i in 0..d {
                lo[i] = lo[i].min(p[i]);
            }
        }
        let axes: Vec<usize> = (0..d).filter(|&i| pts.iter().any(|p| p[i] != lo[i])).collect();
        if axes.len() != 2 {
            return Err(Error::Lift(format!("face {fi} does not lift to a unit facet")));
        }
        let f = Facet::new(lo, axes[0], axes[1]);
        let cs = f.corners();
        if !pts.iter().all(|p| cs.contains(p)) {
            return Err(Error::Lift(format!("face {fi} does not lift to a unit facet")));
        }
        if !facets.insert(f) {
            return Err(Error::Lift(format!("face {fi} lifts onto an existing facet")));
        }
    }
    Ok((QuadSurface { d, facets }, coords))
}

/// Lift of a grid-projection embedding from its central white vertex.
pub fn lift_embedding(e: &LiftedEmbedding) -> Result<QuadSurface> {
    Ok(lift_graph(&e.graph, &e.positions, &e.directions, e.central_white())?.0)
}

/// Planar rhombic embedding obtained from a quad-surface.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProjectedSurface {
    pub graph: BQuadGraph,
    pub positions: Vec<Complex64>,
    pub coords: Vec<Point>,
    /// Facet of each face.
    pub facets: Vec<Facet>,
}

impl ProjectedSurface {
    pub fn index_of(&self, p: &[i64]) -> Option<usize> {
        self.coords.binary_search_by(|c| c.as_slice().cmp(p)).ok()
    }
}

/// position(n) = Σ n_k a_k; faces are oriented counterclockwise.
pub fn project_surface(surface: &QuadSurface, directions: &[Complex64]) -> Result<ProjectedSurface> {
    if directions.len() != surface.d {
        return Err(Error::Input("one direction per axis required".into()));
    }
    let coords: Vec<Point> = surface.vertices().into_iter().collect();
    let index: HashMap<&Point, usize> = coords.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let positions: Vec<Complex64> = coords
        .iter()
        .map(|n| n.iter().zip(directions).map(|(&m, a)| a * m as f64).sum())
        .collect();
    let colors = coords.iter().map(|p| QuadSurface::color(p)).collect();
    let mut faces = Vec::new();
    let mut facets = Vec::new();
    for f in &surface.facets {
        let c = f.corners();
        let ids = [index[&c[0]], index[&c[1]], index[&c[2]], index[&c[3]]];
        let ccw = (directions[f.j].conj() * directions[f.k]).im > 0.0;
        faces.push(if ccw { ids } else { [ids[0], ids[3], ids[2], ids[1]] });
        facets.push(f.clone());
    }
    let graph = BQuadGraph::new(colors, faces)?;
    Ok(ProjectedSurface { graph, positions, coords, facets })
}

/// Result of the monotonicity check; `witness` is a pair with no
/// octant-monotone path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneReport {
    pub monotone: bool,
    pub witness: Option<(Point, Point)>,
}

/// Every pair must be joined by a path whose steps lie in one octant. For a
/// pair (u, v) the octant is forced on the axes where u and v differ, and
/// the remaining axes cannot move at all, so one search per sign pattern of
/// v − u suffices.
pub fn check_monotone(surface: &QuadSurface) -> MonotoneReport {
    let verts: Vec<Point> = surface.vertices().into_iter().collect();
    let index: HashMap<&Point, usize> = verts.iter().enumerate().map(|(i, p)| (p, i)).collect();
    let mut adj: Vec<Vec<(usize, usize, i64)>> = vec![Vec::new(); verts.len()];
    for (p, axis) in surface.edges() {
        let mut q = p.clone();
        q[axis] += 1;
        let (a, b) = (index[&p], index[&q]);
        adj[a].push((b, axis, 1));
        adj[b].push((a, axis, -1));
    }
    for u in 0..verts.len() {
        let mut groups: BTreeMap<Vec<i64>, Vec<usize>> = BTreeMap::new();
        for v in 0..verts.len() {
            if v != u {
                let s: Vec<i64> = verts[v].iter().zip(&verts[u]).map(|(a, b)| (a - b).signum()).collect();
                groups.entry(s).or_default().push(v);
            }
        }
        for (sig, targets) in groups {
            let mut seen = vec![false; verts.len()];
            seen[u] = true;
            let mut stack = vec![u];
            while let Some(x) = stack.pop() {
                for &(y, axis, s) in &adj[x] {
                    if sig[axis] == s && !seen[y] {
                        seen[y] = true;
                        stack.push(y);
                    }
                }
            }
            if let Some(&v) = targets.iter().find(|&&v| !seen[v]) {
                return MonotoneReport { monotone: false, witness: Some((verts[u].clone(), verts[v].clone())) };
            }
        }
    }
    MonotoneReport { monotone: true, witness: None }
}

/// Coordinate box [lo_k, hi_k].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Brick {
    pub lo: Point,
    pub hi: Point,
}

impl Brick {
    pub fn d(&self) -> usize {
        self.lo.len()
    }
    pub fn contains(&self, p: &[i64]) -> bool {
        p.iter().enumerate().all(|(i, &x)| self.lo[i] <= x && x <= self.hi[i])
    }
    pub fn extents(&self) -> Vec<usize> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| (b - a + 1) as usize).collect()
    }
    pub fn num_points(&self) -> usize {
        self.extents().iter().product()
    }
    /// Mixed-radix index, first coordinate most significant, so index order
    /// is lexicographic order.
    pub fn index(&self, p: &[i64]) -> usize {
        let mut idx = 0usize;
        for i in 0..self.d() {
            idx = idx * (self.hi[i] - self.lo[i] + 1) as usize + (p[i] - self.lo[i]) as usize;
        }
        idx
    }
    pub fn point(&self, mut idx: usize) -> Point {
        let ext = self.extents();
        let mut p = vec![0; self.d()];
        for i in (0..self.d()).rev() {
            p[i] = self.lo[i] + (idx % ext[i]) as i64;
            idx /= ext[i];
        }
        p
    }
    pub fn union(&self, other: &Brick) -> Brick {
        Brick {
            lo: self.lo.iter().zip(&other.lo).map(|(a, b)| *a.min(b)).collect(),
            hi: self.hi.iter().zip(&other.hi).map(|(a, b)| *a.max(b)).collect(),
        }
    }
}

pub fn brick_of(surface: &QuadSurface) -> Result<Brick> {
    let verts = surface.vertices();
    let first = verts.iter().next().ok_or_else(|| Error::Input("empty surface".into()))?;
    let mut lo = first.clone();
    let mut hi = first.clone();
    for p in &verts {
        for i in 0..surface.d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    Ok(Brick { lo, hi })
}

/// Replaces the three facets of a cube corner at `z` by the three opposite
/// facets of the same cube.
pub fn simple_flip(surface: &QuadSurface, z: &[i64]) -> Result<QuadSurface> {
    let at = surface.facets_at(z);
    if at.len() != 3 {
        return Err(Error::Flip(format!("vertex {z:?} has {} incident facets, need 3", at.len())));
    }
    // signed directions from z along the facet edges
    let mut dirs: BTreeMap<usize, i64> = BTreeMap::new();
    for f in &at {
        for axis in [f.j, f.k] {
            let s = if f.base[axis] == z[axis] { 1 } else { -1 };
            if let Some(&old) = dirs.get(&axis) {
                if old != s {
                    return Err(Error::Flip(format!("facets at {z:?} do not form a cube corner")));
                }
            }
            dirs.insert(axis, s);
        }
    }
    if dirs.len() != 3 {
        return Err(Error::Flip(format!("facets at {z:?} span {} axes, need 3", dirs.len())));
    }
    let sa: Vec<SignedAxis> = dirs.iter().map(|(&a, &s)| SignedAxis::new(a, s)).collect();
    let corner_pairs = [(0, 1), (0, 2), (1, 2)];
    let expected: BTreeSet<Facet> = corner_pairs.iter().map(|&(x, y)| facet_at(z, sa[x], sa[y])).collect();
    if expected != at.iter().cloned().collect() {
        return Err(Error::Flip(format!("facets at {z:?} do not form a cube corner")));
    }
    let mut zp = z.to_vec();
    for s in &sa {
        zp[s.axis] += s.sign;
    }
    if surface.vertices().contains(&zp) {
        return Err(Error::Flip(format!("opposite corner {zp:?} already on the surface")));
    }
    let mut out = surface.clone();
    for f in &at {
        out.facets.remove(f);
    }
    for &(x, y) in &corner_pairs {
        out.facets.insert(facet_at(&zp, sa[x].neg(), sa[y].neg()));
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Half {
    Plus,
    Minus,
    Both,
}

/// Strictly inside the convex angle spanned by `a` and `c`.
fn strictly_between(a: Complex64, b: Complex64, c: Complex64) -> bool {
    let cross = |x: Complex64, y: Complex64| x.re * y.im - x.im * y.re;
    let ac = cross(a, c);
    if ac.abs() < 1e-12 {
        return false;
    }
    cross(a, b) * ac > 1e-12 && cross(b, c) * ac > 1e-12
}

fn run_length(surface: &QuadSurface, z: &[i64], e1: SignedAxis, e2: SignedAxis, e3: SignedAxis) -> Result<usize> {
    let step = e2.vector(surface.d);
    let mut p = z.to_vec();
    let mut n = 0;
    loop {
        let has1 = surface.facets.contains(&facet_at(&p, e1, e2));
        let has2 = surface.facets.contains(&facet_at(&p, e2, e3));
        match (has1, has2) {
            (true, true) => {
                n += 1;
                p = add(&p, &step);
            }
            (false, false) => return Ok(n),
            _ => return Err(Error::Strip(format!("strip has a hole at {p:?}"))),
        }
    }
}

/// Finite version of the strip flip: the run of facets f1 + n ẽ2, f2 + n ẽ2
/// starting at the pivot `z` is shifted by ẽ3 and ẽ1 respectively, and the
/// facet spanned by ẽ1, ẽ3 is added at the pivot.
///
/// The run must reach the surface boundary. If the pivot already carries the
/// (ẽ1, ẽ3) facet the operation is the composition of simple flips along the
/// run, which moves that facet to the far end.
///
/// Geometric condition: the planar direction of ẽ2 (of −ẽ2 for `Minus`) lies
/// strictly inside the convex angle between the directions of ẽ1 and ẽ3.
pub fn strip_flip(
    surface: &QuadSurface,
    directions: &[Complex64],
    z: &[i64],
    axes: (SignedAxis, SignedAxis, SignedAxis),
    half: Half,
) -> Result<QuadSurface> {
    let d = surface.d;
    let (e1, e2, e3) = axes;
    if e1.axis == e2.axis || e2.axis == e3.axis || e1.axis == e3.axis {
        return Err(Error::Input("strip axes must be distinct".into()));
    }
    if [e1, e2, e3].iter().any(|s| s.axis >= d) || directions.len() != d || z.len() != d {
        return Err(Error::Input("strip axes or pivot out of range".into()));
    }
    let dir = |s: SignedAxis| directions[s.axis] * s.sign as f64;
    let cond = |e2: SignedAxis| strictly_between(dir(e1), dir(e2), dir(e3));
    match half {
        Half::Plus | Half::Minus => {
            let e2 = if half == Half::Minus { e2.neg() } else { e2 };
            if !cond(e2) {
                return Err(Error::Condition(format!(
                    "direction of the strip axis is not strictly between the directions of axes {} and {}",
                    e1.axis + 1,
                    e3.axis + 1
                )));
            }
            let len = run_length(surface, z, e1, e2, e3)?;
            if len == 0 {
                return Err(Error::Strip(format!("no strip facets at pivot {z:?}")));
            }
            let step = e2.vector(d);
            let cap = facet_at(z, e1, e3);
            if surface.facets.contains(&cap) {
                let mut s = surface.clone();
                let mut p = z.to_vec();
                for _ in 0..len {
                    s = simple_flip(&s, &p)?;
                    p = add(&p, &step);
                }
                return Ok(s);
            }
            let end: Point = z.iter().zip(&step).map(|(a, b)| a + b * len as i64).collect();
            let last = add(z, &step.iter().map(|x| x * (len as i64 - 1)).collect::<Vec<_>>());
            let at_end = surface.facets_at(&end);
            let allowed = [facet_at(&last, e1, e2), facet_at(&last, e2, e3)];
            if at_end.iter().any(|f| !allowed.contains(f)) {
                return Err(Error::Strip(format!("strip does not reach the boundary at {end:?}")));
            }
            shift_run(surface, z, (e1, e2, e3), 0..len as i64, Some(cap))
        }
        Half::Both => {
            if !cond(e2) && !cond(e2.neg()) {
                return Err(Error::Condition("strip axis direction not between the side directions".into()));
            }
            let fwd = run_length(surface, z, e1, e2, e3)?;
            // facets behind the pivot are f1, f2 translated by −n ẽ2, n ≥ 1
            let mut lo = 0i64;
            loop {
                let p = add(z, &e2.vector(d).iter().map(|x| x * (lo - 1)).collect::<Vec<_>>());
                let has1 = surface.facets.contains(&facet_at(&p, e1, e2));
                let has2 = surface.facets.contains(&facet_at(&p, e2, e3));
                match (has1, has2) {
                    (true, true) => lo -= 1,
                    (false, false) => break,
                    _ => return Err(Error::Strip(format!("strip has a hole at {p:?}"))),
                }
            }
            if fwd == 0 {
                return Err(Error::Strip(format!("no strip facets at pivot {z:?}")));
            }
            let step = e2.vector(d);
            let at = |n: i64| add(z, &step.iter().map(|x| x * n).collect::<Vec<_>>());
            for (end, last) in [(at(fwd as i64), at(fwd as i64 - 1)), (at(lo), at(lo))] {
                let allowed = [facet_at(&last, e1, e2), facet_at(&last, e2, e3)];
                if surface.facets_at(&end).iter().any(|f| !allowed.contains(f)) {
                    return Err(Error::Strip(format!("strip does not reach the boundary at {end:?}")));
                }
            }
            shift_run(surface, z, (e1, e2, e3), lo..fwd as i64, None)
        }
    }
}

fn shift_run(
    surface: &QuadSurface,
    z: &[i64],
    (e1, e2, e3): (SignedAxis, SignedAxis, SignedAxis),
    range: std::ops::Range<i64>,
    cap: Option<Facet>,
) -> Result<QuadSurface> {
    let d = surface.d;
    let (v1, v2, v3) = (e1.vector(d), e2.vector(d), e3.vector(d));
    let mut out = surface.clone();
    let mut added = Vec::new();
    for n in range {
        let p = add(z, &v2.iter().map(|x| x * n).collect::<Vec<_>>());
        let f1 = facet_at(&p, e1, e2);
        let f2 = facet_at(&p, e2, e3);
        out.facets.remove(&f1);
        out.facets.remove(&f2);
        added.push(f1.translated(&v3));
        added.push(f2.translated(&v1));
    }
    added.extend(cap);
    for f in added {
        if !out.facets.insert(f.clone()) {
            return Err(Error::Strip(format!("shifted facet {f:?} already present")));
        }
    }
    Ok(out)
}
