//! Comparison functions, the Hirota equation and its extension to bricks,
//! and the quasicrystallic Z^γ boundary data.

use crate::dd::{self, cdd, to_c64, Cdd};
use crate::error::{Error, Result};
use crate::graph::{BQuadGraph, Color, Labelling};
use crate::pattern::CirclePattern;
use crate::projection::LiftedEmbedding;
use crate::surface::{brick_of, lift_graph, project_surface, Brick, Facet, Point, ProjectedSurface, QuadSurface};
use num_complex::{Complex, Complex64};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::f64::consts::PI;

/// Edge directions a_1..a_d (in axis order) with assigned arguments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeDirectionSet {
    pub directions: Vec<Complex64>,
    /// θ of each axis direction.
    pub theta: Vec<f64>,
    /// Axes in circular order starting from the first direction.
    pub order: Vec<usize>,
}

impl EdgeDirectionSet {
    pub fn d(&self) -> usize {
        self.directions.len()
    }

    /// θ_m for m ∈ Z (1-based, circular order), with θ_{m+d} = θ_m + π.
    pub fn theta_m(&self, m: i64) -> f64 {
        let d = self.d() as i64;
        let q = (m - 1).div_euclid(d);
        let r = (m - 1).rem_euclid(d) as usize;
        self.theta[self.order[r]] + q as f64 * PI
    }

    /// a_m for m ∈ Z, with a_{m+d} = −a_m.
    pub fn a_m(&self, m: i64) -> Complex64 {
        let d = self.d() as i64;
        let q = (m - 1).div_euclid(d);
        let r = (m - 1).rem_euclid(d) as usize;
        let a = self.directions[self.order[r]];
        if q.rem_euclid(2) == 0 {
            a
        } else {
            -a
        }
    }

    /// θ of an axis to double-double accuracy.
    pub fn theta_dd(&self, k: usize) -> dd::Dd {
        let a = unit_dd(self.directions[k]);
        let principal = dd::arg(a);
        let turns = ((self.theta[k] - dd::to_f64(principal)) / (2.0 * PI)).round();
        principal + dd::pi() * (2.0 * turns)
    }
}

fn unit_dd(a: Complex64) -> Cdd {
    let z = cdd(a);
    let n = dd::norm(z);
    Complex::new(dd::div(z.re, n), dd::div(z.im, n))
}

/// Assigns θ_1 = `theta1` (default: principal argument of the circularly
/// first direction) and θ_{m+1} − θ_m ∈ (0, π). The directions must lie in an
/// open half-plane; axes pointing the other way must be negated first.
pub fn assign_arguments(directions: &[Complex64], theta1: Option<f64>) -> Result<EdgeDirectionSet> {
    let d = directions.len();
    if d < 2 {
        return Err(Error::Input("need at least two directions".into()));
    }
    for (k, a) in directions.iter().enumerate() {
        if !(a.norm() > 0.0) || !a.re.is_finite() || !a.im.is_finite() {
            return Err(Error::Input(format!("direction {} is not a nonzero finite number", k + 1)));
        }
    }
    for j in 0..d {
        for k in j + 1..d {
            let c = (directions[j].conj() * directions[k]).im / (directions[j].norm() * directions[k].norm());
            if c.abs() < 1e-12 {
                return Err(Error::Input(format!("directions {} and {} are equal or opposite", j + 1, k + 1)));
            }
        }
    }
    // the circularly first direction is the one with every other direction
    // strictly within a half-turn counterclockwise from it
    let args: Vec<f64> = directions.iter().map(|a| a.arg()).collect();
    let first = (0..d)
        .find(|&s| (0..d).all(|k| k == s || (args[k] - args[s]).rem_euclid(2.0 * PI) < PI))
        .ok_or_else(|| Error::Input("directions do not lie in an open half-plane".into()))?;
    let t1 = match theta1 {
        None => args[first],
        Some(t) => {
            let diff = (t - args[first]).rem_euclid(2.0 * PI);
            if diff.min(2.0 * PI - diff) > 1e-9 {
                return Err(Error::Input(format!("theta1 = {t} is not an argument of the first direction")));
            }
            t
        }
    };
    let theta: Vec<f64> =
        (0..d).map(|k| if k == first { t1 } else { t1 + (args[k] - t1).rem_euclid(2.0 * PI) }).collect();
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| theta[x].partial_cmp(&theta[y]).unwrap());
    Ok(EdgeDirectionSet { directions: directions.to_vec(), theta, order })
}

/// Sparse complex field on Z^d.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ComparisonFunction {
    #[serde(with = "crate::io::entries")]
    pub values: BTreeMap<Point, Complex64>,
}

impl ComparisonFunction {
    pub fn get(&self, p: &[i64]) -> Option<Complex64> {
        self.values.get(p).copied()
    }
}

/// Hirota expression w(x0)w(y0)a0 − w(x1)w(y0)a1 − w(x1)w(y1)a0 + w(x0)w(y1)a1
/// with w = [x0, y0, x1, y1].
pub fn hirota_residual(w: [Complex64; 4], a0: Complex64, a1: Complex64) -> Complex64 {
    let [x0, y0, x1, y1] = w;
    x0 * y0 * a0 - x1 * y0 * a1 - x1 * y1 * a0 + x0 * y1 * a1
}

fn hirota_dd(w: &[Cdd; 4], a0: Cdd, a1: Cdd) -> Cdd {
    let [x0, y0, x1, y1] = *w;
    x0 * y0 * a0 - x1 * y0 * a1 - x1 * y1 * a0 + x0 * y1 * a1
}

/// Solves the Hirota equation for the single missing entry of
/// `[w(x0), w(y0), w(x1), w(y1)]`. The equation is linear in each entry.
fn solve_face_dd(known: [Option<Cdd>; 4], a0: Cdd, a1: Cdd) -> std::result::Result<Cdd, String> {
    let missing: Vec<usize> = (0..4).filter(|&i| known[i].is_none()).collect();
    if missing.len() != 1 {
        return Err(format!("need exactly one unknown, got {}", missing.len()));
    }
    let m = missing[0];
    let zero = Complex::new(dd::dd(0.0), dd::dd(0.0));
    let one = Complex::new(dd::dd(1.0), dd::dd(0.0));
    let mut w = [zero; 4];
    for i in 0..4 {
        if let Some(v) = known[i] {
            w[i] = v;
        }
    }
    let b = hirota_dd(&w, a0, a1);
    w[m] = one;
    let a = hirota_dd(&w, a0, a1) - b;
    if dd::abs(a) < 1e-12 {
        return Err("vanishing coefficient of the unknown".into());
    }
    Ok(-dd::cdiv(b, a))
}

/// Missing value of `[w(x0), w(y0), w(x1), w(y1)]` from the Hirota equation,
/// with a0 = x0 − y0 and a1 = x1 − y0.
pub fn hirota_solve_face(known: [Option<Complex64>; 4], a0: Complex64, a1: Complex64) -> Result<Complex64> {
    let k = known.map(|v| v.map(cdd));
    solve_face_dd(k, cdd(a0), cdd(a1)).map(to_c64).map_err(Error::SingularFace)
}

/// Corners of a facet as (x0, y0, x1, y1) together with the reference edges
/// a0 = x0 − y0 and a1 = x1 − y0.
pub fn facet_roles(f: &Facet) -> ([Point; 4], (usize, i64), (usize, i64)) {
    let c = f.corners(); // base, +e_j, +e_j+e_k, +e_k
    if QuadSurface::color(&f.base) == Color::White {
        ([c[1].clone(), c[0].clone(), c[3].clone(), c[2].clone()], (f.j, 1), (f.k, 1))
    } else {
        ([c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()], (f.j, -1), (f.k, 1))
    }
}

/// Fill order for the brick extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FillOrder {
    /// Wavefronts of ready facets; each new vertex is computed from its
    /// lexicographically smallest ready facet. Deterministic and parallel.
    Lexicographic,
    /// One random ready facet at a time.
    Random(u64),
}

/// Double-double field on a brick.
#[derive(Debug, Clone)]
pub struct BrickField {
    pub brick: Brick,
    pub values: Vec<Option<Cdd>>,
}

impl BrickField {
    pub fn get(&self, p: &[i64]) -> Option<Cdd> {
        if self.brick.contains(p) {
            self.values[self.brick.index(p)]
        } else {
            None
        }
    }

    pub fn to_comparison(&self) -> ComparisonFunction {
        ComparisonFunction {
            values: self
                .values
                .iter()
                .enumerate()
                .filter_map(|(i, v)| v.map(|v| (self.brick.point(i), to_c64(v))))
                .collect(),
        }
    }

    /// Largest |Hirota residual| over all facets of all coordinate planes.
    pub fn max_residual(&self, directions: &[Complex64]) -> f64 {
        let units: Vec<Cdd> = directions.iter().map(|&a| unit_dd(a)).collect();
        brick_facets(&self.brick)
            .par_iter()
            .map(|f| {
                let (pts, (j, sj), (k, sk)) = facet_roles(f);
                let w = pts.clone().map(|p| self.get(&p));
                if w.iter().any(|v| v.is_none()) {
                    return 0.0;
                }
                let w = w.map(|v| v.unwrap());
                let a0 = units[j] * dd::dd(sj as f64);
                let a1 = units[k] * dd::dd(sk as f64);
                dd::abs(hirota_dd(&w, a0, a1))
            })
            .reduce(|| 0.0, f64::max)
    }

    /// Largest deviation from real-positive (white) or unimodular (black).
    pub fn max_type_deviation(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (i, to_c64(v))))
            .map(|(i, v)| {
                let p = self.brick.point(i);
                match QuadSurface::color(&p) {
                    Color::White => {
                        if v.re > 0.0 {
                            v.im.abs()
                        } else {
                            f64::INFINITY
                        }
                    }
                    Color::Black => (v.norm() - 1.0).abs(),
                }
            })
            .fold(0.0, f64::max)
    }
}

fn brick_facets(brick: &Brick) -> Vec<Facet> {
    let d = brick.d();
    let mut out = Vec::new();
    for i in 0..brick.num_points() {
        let p = brick.point(i);
        for j in 0..d {
            if p[j] >= brick.hi[j] {
                continue;
            }
            for k in j + 1..d {
                if p[k] < brick.hi[k] {
                    out.push(Facet { base: p.clone(), j, k });
                }
            }
        }
    }
    out
}

/// Facets of the brick containing point `p`.
fn facets_containing(brick: &Brick, p: &[i64]) -> Vec<Facet> {
    let d = brick.d();
    let mut out = Vec::new();
    for j in 0..d {
        for k in j + 1..d {
            for (sj, sk) in [(0, 0), (1, 0), (0, 1), (1, 1)] {
                let mut b = p.to_vec();
                b[j] -= sj;
                b[k] -= sk;
                if b[j] >= brick.lo[j] && b[j] < brick.hi[j] && b[k] >= brick.lo[k] && b[k] < brick.hi[k] {
                    out.push(Facet { base: b, j, k });
                }
            }
        }
    }
    out
}

/// Extends double-double data on part of a brick by repeatedly solving the
/// Hirota equation on facets with three known corners.
pub fn extend_dd(
    known: &HashMap<Point, Cdd>,
    directions: &[Complex64],
    brick: &Brick,
    order: FillOrder,
) -> Result<BrickField> {
    let units: Vec<Cdd> = directions.iter().map(|&a| unit_dd(a)).collect();
    extend_dd_units(known, &units, brick, order)
}

/// As [`extend_dd`] with unit directions given in double-double.
pub fn extend_dd_units(
    known: &HashMap<Point, Cdd>,
    units: &[Cdd],
    brick: &Brick,
    order: FillOrder,
) -> Result<BrickField> {
    if units.len() != brick.d() {
        return Err(Error::Input("one direction per axis required".into()));
    }
    let mut values: Vec<Option<Cdd>> = vec![None; brick.num_points()];
    for (p, v) in known {
        if !brick.contains(p) {
            return Err(Error::Input(format!("known point {p:?} outside the brick")));
        }
        values[brick.index(p)] = Some(*v);
    }
    let count = |values: &[Option<Cdd>], f: &Facet| {
        f.corners().iter().filter(|c| values[brick.index(c)].is_some()).count()
    };
    let solve = |values: &[Option<Cdd>], f: &Facet| -> Result<(usize, Cdd)> {
        let (pts, (j, sj), (k, sk)) = facet_roles(f);
        let kn = pts.clone().map(|p| values[brick.index(&p)]);
        let miss = (0..4).find(|&i| kn[i].is_none()).expect("one unknown");
        let a0 = units[j] * dd::dd(sj as f64);
        let a1 = units[k] * dd::dd(sk as f64);
        let v = solve_face_dd(kn, a0, a1)
            .map_err(|reason| Error::Extension { facet: format!("({:?}; {}, {})", f.base, f.j + 1, f.k + 1), reason })?;
        Ok((brick.index(&pts[miss]), v))
    };

    let mut ready: BTreeSet<Facet> =
        brick_facets(brick).into_iter().filter(|f| count(&values, f) == 3).collect();
    match order {
        FillOrder::Lexicographic => {
            while !ready.is_empty() {
                // one facet per target vertex: the smallest ready one
                let mut targets: BTreeMap<usize, Facet> = BTreeMap::new();
                for f in &ready {
                    let (pts, _, _) = facet_roles(f);
                    let t = pts.iter().map(|p| brick.index(p)).find(|&i| values[i].is_none()).unwrap();
                    targets.entry(t).or_insert_with(|| f.clone());
                }
                let solved: Vec<Result<(usize, Cdd)>> =
                    targets.values().collect::<Vec<_>>().par_iter().map(|f| solve(&values, f)).collect();
                let mut touched = Vec::new();
                for s in solved {
                    let (i, v) = s?;
                    values[i] = Some(v);
                    touched.push(i);
                }
                ready.clear();
                for i in touched {
                    for f in facets_containing(brick, &brick.point(i)) {
                        if count(&values, &f) == 3 {
                            ready.insert(f);
                        }
                    }
                }
            }
        }
        FillOrder::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut pool: Vec<Facet> = ready.into_iter().collect();
            pool.shuffle(&mut rng);
            while !pool.is_empty() {
                let i = rng.gen_range(0..pool.len());
                let f = pool.swap_remove(i);
                if count(&values, &f) != 3 {
                    continue;
                }
                let (idx, v) = solve(&values, &f)?;
                values[idx] = Some(v);
                for g in facets_containing(brick, &brick.point(idx)) {
                    if count(&values, &g) == 3 {
                        pool.push(g);
                    }
                }
            }
        }
    }
    let unfilled = values.iter().filter(|v| v.is_none()).count();
    if unfilled > 0 {
        return Err(Error::Reachability { unfilled });
    }
    Ok(BrickField { brick: brick.clone(), values })
}

/// Extends a comparison function given on (part of) a brick to the brick.
pub fn extend_to_brick(
    w: &ComparisonFunction,
    directions: &[Complex64],
    brick: &Brick,
    order: FillOrder,
) -> Result<ComparisonFunction> {
    let known: HashMap<Point, Cdd> = w.values.iter().map(|(p, v)| (p.clone(), cdd(*v))).collect();
    Ok(extend_dd(&known, directions, brick, order)?.to_comparison())
}

/// w on the coordinate semi-axes of Z^d_+ in double-double precision.
pub fn zgamma_axis_values_dd(gamma: f64, dirs: &EdgeDirectionSet, n_max: &[i64]) -> Result<HashMap<Point, Cdd>> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::Domain(format!("gamma = {gamma} not in (0, 2)")));
    }
    let d = dirs.d();
    if n_max.len() != d {
        return Err(Error::Input("one axis length per direction required".into()));
    }
    let g = dd::dd(gamma);
    let one = Complex::new(dd::dd(1.0), dd::dd(0.0));
    let mut out = HashMap::new();
    out.insert(vec![0; d], one);
    for k in 0..d {
        let odd = dd::expi((g - 1.0) * dirs.theta_dd(k));
        let mut even = dd::dd(1.0);
        for n in 1..=n_max[k] {
            let mut p = vec![0; d];
            p[k] = n;
            let v = if n % 2 == 1 {
                odd
            } else {
                let m = (n / 2) as f64;
                even = dd::div(even * (g / 2.0 + (m - 1.0)), -(g / 2.0) + m);
                Complex::new(even, dd::dd(0.0))
            };
            out.insert(p, v);
        }
    }
    Ok(out)
}

/// w on the coordinate semi-axes of Z^d_+ (f64 view).
pub fn zgamma_axis_values(gamma: f64, dirs: &EdgeDirectionSet, n_max: i64) -> Result<ComparisonFunction> {
    let m = zgamma_axis_values_dd(gamma, dirs, &vec![n_max; dirs.d()])?;
    Ok(ComparisonFunction { values: m.into_iter().map(|(p, v)| (p, to_c64(v))).collect() })
}

/// Radii of the square-grid Z^γ pattern from the d = 2 Hirota extension with
/// directions (1, e^{i(π−ψ)}), keyed by lattice point (n, m) with n + m even
/// and n + m < 2N.
pub fn zgamma_square_radii(gamma: f64, psi: f64, size: usize) -> Result<BTreeMap<(i64, i64), f64>> {
    if !(psi > 0.0 && psi < PI) {
        return Err(Error::Domain(format!("psi = {psi} not in (0, pi)")));
    }
    let l = 2 * size as i64;
    let dirs = [Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, PI - psi)];
    let edset = assign_arguments(&dirs, Some(0.0))?;
    let mut axis = zgamma_axis_values_dd(gamma, &edset, &[l, l])?;
    // the second argument is exactly π − ψ; recompute the odd axis value from it
    let odd = dd::expi((dd::dd(gamma) - 1.0) * (dd::pi() - dd::dd(psi)));
    for m in (1..=l).step_by(2) {
        axis.insert(vec![0, m], odd);
    }
    let brick = Brick { lo: vec![0, 0], hi: vec![l, l] };
    let units = [Complex::new(dd::dd(1.0), dd::dd(0.0)), dd::expi(dd::pi() - dd::dd(psi))];
    let field = extend_dd_units(&axis, &units, &brick, FillOrder::Lexicographic)?;
    let mut out = BTreeMap::new();
    for n in 0..l {
        for m in 0..l - n {
            if (n + m) % 2 == 0 {
                out.insert((n, m), dd::to_f64(field.get(&[n, m]).unwrap().re));
            }
        }
    }
    Ok(out)
}

/// Circle pattern of w on a quad-surface: radius w(y) at white y and kite
/// edges p(x) − p(y) = w(x) w(y) (x − y) with x − y the reference edge.
/// `anchor` is placed at the origin.
pub fn pattern_from_w(
    surface: &QuadSurface,
    directions: &[Complex64],
    w: &dyn Fn(&[i64]) -> Option<Complex64>,
    anchor: &[i64],
) -> Result<(CirclePattern, ProjectedSurface)> {
    let proj = project_surface(surface, directions)?;
    let g = &proj.graph;
    let n = g.num_vertices();
    let wv: Vec<Complex64> = proj
        .coords
        .iter()
        .map(|p| w(p).ok_or_else(|| Error::Input(format!("w missing at {p:?}"))))
        .collect::<Result<_>>()?;
    let start = proj.index_of(anchor).ok_or_else(|| Error::Input(format!("anchor {anchor:?} not on the surface")))?;
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (x, y) in g.edges() {
        adj[x].push(y);
        adj[y].push(x);
    }
    let scale = wv.iter().map(|v| v.norm()).fold(1.0, f64::max);
    let mut pts: Vec<Option<Complex64>> = vec![None; n];
    pts[start] = Some(Complex64::new(0.0, 0.0));
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        let pv = pts[v].unwrap();
        for &u in &adj[v] {
            let p = pv + wv[v] * wv[u] * (proj.positions[u] - proj.positions[v]);
            match pts[u] {
                Some(old) => {
                    if (old - p).norm() > 1e-8 * scale * (1.0 + p.norm()) {
                        return Err(Error::Layout { vertex: u, distance: (old - p).norm() });
                    }
                }
                None => {
                    pts[u] = Some(p);
                    queue.push_back(u);
                }
            }
        }
    }
    let points: Vec<Complex64> =
        pts.into_iter().enumerate().map(|(v, p)| p.ok_or_else(|| Error::Input(format!("vertex {v} unreachable")))).collect::<Result<_>>()?;
    let labelling = rhombic_labelling(g, &proj.positions);
    let mut pattern = CirclePattern::from_points(g.clone(), labelling, points)?;
    for v in g.white_vertices() {
        pattern.radii.0.insert(v, wv[v].re);
    }
    Ok((pattern, proj))
}

/// α(f) = π − (rhombus angle at the white vertex y0).
pub fn rhombic_labelling(g: &BQuadGraph, positions: &[Complex64]) -> Labelling {
    Labelling(
        g.faces()
            .iter()
            .map(|q| {
                let a0 = positions[q[1]] - positions[q[0]];
                let a1 = positions[q[3]] - positions[q[0]];
                PI - (a1 / a0).arg()
            })
            .collect(),
    )
}

/// Comparison function between two patterns with the same combinatorics,
/// one value per vertex.
pub fn comparison_function(reference: &CirclePattern, pattern: &CirclePattern) -> Result<Vec<Complex64>> {
    if reference.graph != pattern.graph {
        return Err(Error::Input("patterns have different combinatorics".into()));
    }
    let g = &reference.graph;
    let mut w = vec![Complex64::new(0.0, 0.0); g.num_vertices()];
    for v in g.white_vertices() {
        w[v] = Complex64::new(pattern.radii.get(v) / reference.radii.get(v), 0.0);
    }
    for x in g.black_vertices() {
        let c = g.star(x).first().ok_or_else(|| Error::Input(format!("isolated vertex {x}")))?;
        let y = c.next;
        let e2 = pattern.points[y] - pattern.points[x];
        let e1 = reference.points[y] - reference.points[x];
        let rot = e2 / e1 / w[y].re;
        w[x] = rot / rot.norm();
    }
    Ok(w)
}

/// Max Hirota residual over the faces of a graph for per-vertex values and
/// reference positions.
pub fn face_residuals(g: &BQuadGraph, reference_points: &[Complex64], w: &[Complex64]) -> f64 {
    g.faces()
        .iter()
        .map(|q| {
            let (y0, x0, y1, x1) = (q[0], q[1], q[2], q[3]);
            let a0 = reference_points[x0] - reference_points[y0];
            let a1 = reference_points[x1] - reference_points[y0];
            hirota_residual([w[x0], w[y0], w[x1], w[y1]], a0, a1).norm()
        })
        .fold(0.0, f64::max)
}

/// Quasicrystallic Z^γ pattern on the part of an embedding lying in one
/// octant.
#[derive(Debug, Clone)]
pub struct ZgammaQuasi {
    pub pattern: CirclePattern,
    pub projected: ProjectedSurface,
    pub surface: QuadSurface,
    /// Oriented directions s_k a_k used for the octant.
    pub directions: EdgeDirectionSet,
    /// Axis signs s_k applied to the lattice coordinates.
    pub signs: Vec<i64>,
    pub field: BrickField,
    pub max_brick_residual: f64,
    pub max_type_deviation: f64,
}

/// Pipeline: orient axes so all directions lie in [θ1, θ1 + π), lift from the
/// central white vertex, keep the facets in Z^d_+, compute the semi-axis
/// data, extend through the brick, restrict and lay out.
pub fn zgamma_pattern(embedding: &LiftedEmbedding, gamma: f64, theta1: Option<f64>) -> Result<ZgammaQuasi> {
    zgamma_pattern_with(embedding, gamma, theta1, FillOrder::Lexicographic)
}

/// [`zgamma_pattern`] with a chosen brick fill order.
pub fn zgamma_pattern_with(
    embedding: &LiftedEmbedding,
    gamma: f64,
    theta1: Option<f64>,
    order: FillOrder,
) -> Result<ZgammaQuasi> {
    if !(gamma > 0.0 && gamma < 2.0) {
        return Err(Error::Domain(format!("gamma = {gamma} not in (0, 2)")));
    }
    let seed = embedding.central_white();
    let (lifted, _) = lift_graph(&embedding.graph, &embedding.positions, &embedding.directions, seed)?;
    let d = lifted.d;
    let t1 = theta1.unwrap_or_else(|| embedding.directions[0].arg());
    let signs: Vec<i64> = embedding
        .directions
        .iter()
        .map(|a| if (a.arg() - t1).rem_euclid(2.0 * PI) < PI - 1e-12 { 1 } else { -1 })
        .collect();
    let dirs: Vec<Complex64> = embedding.directions.iter().zip(&signs).map(|(a, &s)| a * s as f64).collect();
    let edset = assign_arguments(&dirs, Some(t1)).or_else(|_| assign_arguments(&dirs, None))?;

    let flip = |p: &[i64]| -> Point { p.iter().zip(&signs).map(|(x, s)| x * s).collect() };
    let oriented: Vec<Facet> = lifted
        .facets
        .iter()
        .map(|f| {
            let cs = f.corners();
            let pts: Vec<Point> = cs.iter().map(|c| flip(c)).collect();
            let mut lo = pts[0].clone();
            for p in &pts {
                for i in 0..d {
                    lo[i] = lo[i].min(p[i]);
                }
            }
            Facet::new(lo, f.j, f.k)
        })
        .filter(|f| f.base.iter().all(|&x| x >= 0))
        .collect();
    let origin = vec![0; d];
    let sector = facet_component(&oriented, &origin)?;
    let surface = QuadSurface::new(d, sector)?;
    let brick = brick_of(&surface)?;
    let axis = zgamma_axis_values_dd(gamma, &edset, &brick.hi)?;
    let field = extend_dd(&axis, &dirs, &brick, order)?;
    let (pattern, projected) = pattern_from_w(&surface, &dirs, &|p| field.get(p).map(to_c64), &origin)?;
    let max_brick_residual = field.max_residual(&dirs);
    let max_type_deviation = field.max_type_deviation();
    Ok(ZgammaQuasi { pattern, projected, surface, directions: edset, signs, field, max_brick_residual, max_type_deviation })
}

fn facet_component(facets: &[Facet], origin: &[i64]) -> Result<Vec<Facet>> {
    let mut by_edge: HashMap<(Point, Point), Vec<usize>> = HashMap::new();
    for (i, f) in facets.iter().enumerate() {
        let c = f.corners();
        for e in 0..4 {
            let (p, q) = (c[e].clone(), c[(e + 1) % 4].clone());
            by_edge.entry(if p < q { (p, q) } else { (q, p) }).or_default().push(i);
        }
    }
    let start = facets
        .iter()
        .position(|f| f.contains(origin))
        .ok_or_else(|| Error::Input("no facet of the octant contains the seed vertex".into()))?;
    let mut adj = vec![Vec::new(); facets.len()];
    for fs in by_edge.values() {
        for &x in fs {
            for &y in fs {
                if x != y {
                    adj[x].push(y);
                }
            }
        }
    }
    let mut seen = vec![false; facets.len()];
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
    Ok(facets.iter().zip(seen).filter(|(_, s)| *s).map(|(f, _)| f.clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn solve_face_examples() {
        let one = Some(c(1.0, 0.0));
        let a0 = c(1.0, 0.0);
        let a1 = c(0.0, 1.0);
        let v = hirota_solve_face([one, one, one, None], a0, a1).unwrap();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        let v = hirota_solve_face([one, Some(c(2.5, 0.0)), one, None], a0, a1).unwrap();
        assert!((v - c(2.5, 0.0)).norm() < 1e-15);
        // w(x0) a1 = w(x1) a0 makes the coefficient of w(y1) vanish
        let r = hirota_solve_face([Some(c(1.0, 0.0)), one, Some(c(0.0, 1.0)), None], a0, a1);
        assert!(matches!(r, Err(Error::SingularFace(_))));
    }

    #[test]
    fn arguments() {
        let e = assign_arguments(&[c(1.0, 0.0), c(0.0, 1.0)], Some(0.0)).unwrap();
        assert_eq!(e.theta, vec![0.0, PI / 2.0]);
        let dirs: Vec<Complex64> = (0..5).map(|k| Complex64::from_polar(1.0, PI * k as f64 / 5.0)).collect();
        let e = assign_arguments(&dirs, Some(0.0)).unwrap();
        for k in 0..5 {
            assert!((e.theta[k] - PI * k as f64 / 5.0).abs() < 1e-14);
        }
        for m in -12..12 {
            assert!((e.theta_m(m + 5) - e.theta_m(m) - PI).abs() < 1e-12);
            assert!(e.theta_m(m + 1) - e.theta_m(m) > 0.0 && e.theta_m(m + 1) - e.theta_m(m) < PI);
        }
        assert!(assign_arguments(&[c(1.0, 0.0), c(-1.0, 0.0)], None).is_err());
        assert!(assign_arguments(&[c(1.0, 0.0), c(1.0, 0.0)], None).is_err());
    }

    #[test]
    fn axis_examples() {
        let e = assign_arguments(&[c(1.0, 0.0), Complex64::from_polar(1.0, PI / 5.0)], Some(0.0)).unwrap();
        let w = zgamma_axis_values(1.0, &e, 6).unwrap();
        for v in w.values.values() {
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
        let w = zgamma_axis_values(1.5, &e, 2).unwrap();
        assert!((w.get(&[2, 0]).unwrap() - c(3.0, 0.0)).norm() < 1e-15);
        let w = zgamma_axis_values(5.0 / 6.0, &e, 1).unwrap();
        let expect = Complex64::from_polar(1.0, -PI / 30.0);
        assert!((w.get(&[0, 1]).unwrap() - expect).norm() < 1e-15);
        assert!(zgamma_axis_values(2.0, &e, 1).is_err());
    }
}
