//! Measurements behind the uniqueness argument: ratios of neighbouring radii,
//! subharmonicity of radius quotients, shortened network resistance and the
//! rigidity experiment.

use crate::error::{Error, Result};
use crate::graph::{vertex_residual, BQuadGraph, Labelling, RadiusFunction};
use crate::pattern::CirclePattern;
use crate::projection::LiftedEmbedding;
use crate::sg::{convexity_admissible, map_to_pattern, zgamma_map};
use crate::solver::{solve_radii, RadiusProblem, SolveOptions, SolveReport};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, VecDeque};
use std::f64::consts::PI;

/// Combinatorial distance from `v0` in the white graph (None if unreachable).
pub fn white_generations(graph: &BQuadGraph, v0: usize) -> Vec<Option<usize>> {
    let mut gen = vec![None; graph.num_vertices()];
    gen[v0] = Some(0);
    let mut queue = VecDeque::from([v0]);
    while let Some(v) = queue.pop_front() {
        let g = gen[v].unwrap();
        for (w, _) in graph.white_star(v) {
            if gen[w].is_none() {
                gen[w] = Some(g + 1);
                queue.push_back(w);
            }
        }
    }
    gen
}

/// For each generation n (white-graph distance from `v0`), the largest
/// |r(w)/r(v) − 1| over interior white v of generation n and neighbours w.
/// Entry n is None when generation n has no interior vertex.
pub fn generation_ratio_stats(pattern: &CirclePattern, v0: usize) -> Result<Vec<Option<f64>>> {
    let g = &pattern.graph;
    if v0 >= g.num_vertices() || g.color(v0) != crate::graph::Color::White {
        return Err(Error::Input(format!("{v0} is not a white vertex")));
    }
    let gen = white_generations(g, v0);
    let depth = gen.iter().flatten().max().copied().unwrap_or(0);
    let mut out = vec![None; depth + 1];
    for v in g.white_vertices() {
        let Some(n) = gen[v] else { continue };
        if !g.is_interior(v) {
            continue;
        }
        let r0 = pattern.radii.get(v);
        for (w, _) in g.white_star(v) {
            let x = (pattern.radii.get(w) / r0 - 1.0).abs();
            out[n] = Some(out[n].map_or(x, |m: f64| m.max(x)));
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicViolation {
    pub vertex: usize,
    /// 0: Σ c_j r_j/ρ_j ≥ Σ c_j r_0/ρ_0; 1: Σ c_j ρ_j/r_j ≥ Σ c_j ρ_0/r_0.
    pub inequality: u8,
    pub lhs: f64,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubharmonicityReport {
    pub checked: usize,
    pub violations: Vec<SubharmonicViolation>,
    /// Vertices whose preconditions fail, with the reason.
    pub skipped: Vec<(usize, String)>,
}

/// Checks both quotient inequalities with conductances
/// c_j = sin α_j / (ρ_j/ρ_0 + ρ_0/ρ_j − 2 cos α_j) at every interior white
/// vertex where both radius functions close (residual < 1e−8) and
/// r_j ≥ r_0 cos α_j, ρ_j ≥ ρ_0 cos α_j.
pub fn subharmonicity_check(
    r: &RadiusFunction,
    rho: &RadiusFunction,
    graph: &BQuadGraph,
    labelling: &Labelling,
) -> Result<SubharmonicityReport> {
    if labelling.0.len() != graph.num_faces() {
        return Err(Error::Input("labelling length differs from the face count".into()));
    }
    let results: Vec<(usize, std::result::Result<Vec<SubharmonicViolation>, String>)> = graph
        .interior_whites()
        .into_par_iter()
        .map(|v| (v, check_vertex(r, rho, graph, labelling, v)))
        .collect();
    let mut report = SubharmonicityReport { checked: 0, violations: Vec::new(), skipped: Vec::new() };
    for (v, res) in results {
        match res {
            Ok(viol) => {
                report.checked += 1;
                report.violations.extend(viol);
            }
            Err(reason) => report.skipped.push((v, reason)),
        }
    }
    Ok(report)
}

fn check_vertex(
    r: &RadiusFunction,
    rho: &RadiusFunction,
    graph: &BQuadGraph,
    labelling: &Labelling,
    v: usize,
) -> std::result::Result<Vec<SubharmonicViolation>, String> {
    let star = graph.white_star(v);
    for &(w, _) in star.iter().chain(std::iter::once(&(v, 0))) {
        for (name, f) in [("r", r), ("rho", rho)] {
            match f.0.get(&w) {
                Some(&x) if x > 0.0 && x.is_finite() => {}
                _ => return Err(format!("{name} missing or nonpositive at {w}")),
            }
        }
    }
    for (name, f) in [("r", r), ("rho", rho)] {
        let res = vertex_residual(graph, labelling, f, v);
        if !(res.abs() < 1e-8) {
            return Err(format!("{name} does not close: residual {res:e}"));
        }
    }
    let (r0, p0) = (r.get(v), rho.get(v));
    let mut sums = [[0.0; 2]; 2];
    for &(w, f) in &star {
        let a = labelling.get(f);
        let (rj, pj) = (r.get(w), rho.get(w));
        if rj < r0 * a.cos() || pj < p0 * a.cos() {
            return Err(format!("convexity precondition fails towards {w}"));
        }
        let c = a.sin() / (pj / p0 + p0 / pj - 2.0 * a.cos());
        sums[0][0] += c * rj / pj;
        sums[0][1] += c * r0 / p0;
        sums[1][0] += c * pj / rj;
        sums[1][1] += c * p0 / r0;
    }
    let mut out = Vec::new();
    for (i, [lhs, rhs]) in sums.into_iter().enumerate() {
        if lhs - rhs < -1e-12 * rhs.abs().max(1.0) {
            out.push(SubharmonicViolation { vertex: v, inequality: i as u8, lhs, rhs });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResistanceReport {
    pub width: f64,
    /// |E_k| for k = 1..=K.
    pub edge_counts: Vec<usize>,
    /// S_k = Σ_{j ≤ k} 1/|E_j|.
    pub partial_sums: Vec<f64>,
    /// Minimum rhombus area C₁.
    pub min_area: f64,
    /// Whether S_k ≥ C₁/(32π) · ln k for every k.
    pub log_bound_holds: bool,
}

/// Smallest face area of an embedding.
pub fn min_rhombus_area(graph: &BQuadGraph, positions: &[num_complex::Complex64]) -> f64 {
    graph
        .faces()
        .iter()
        .map(|q| {
            let a = positions[q[1]] - positions[q[0]];
            let b = positions[q[3]] - positions[q[0]];
            (a.conj() * b).im.abs()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Groups the white vertices into annuli {w(k−1) ≤ |z − v0| < wk} and counts
/// the white-graph edges between consecutive annuli.
pub fn shortened_resistance(
    embedding: &LiftedEmbedding,
    v0: usize,
    k_max: usize,
    width: f64,
) -> Result<ResistanceReport> {
    let g = &embedding.graph;
    if v0 >= g.num_vertices() || g.color(v0) != crate::graph::Color::White {
        return Err(Error::Input(format!("{v0} is not a white vertex")));
    }
    if k_max == 0 || !(width > 0.0) {
        return Err(Error::Input("need K ≥ 1 and a positive annulus width".into()));
    }
    let c = embedding.positions[v0];
    let available = (0..g.num_vertices())
        .filter(|&v| !g.is_interior(v))
        .map(|v| (embedding.positions[v] - c).norm())
        .fold(f64::INFINITY, f64::min);
    // annulus K+1 and the edges into it must lie inside the window
    let required = width * (k_max + 1) as f64 + 2.0;
    if available < required {
        return Err(Error::WindowTooSmall { required, available });
    }
    let ring = |v: usize| ((embedding.positions[v] - c).norm() / width).floor() as usize + 1;
    let mut counts = vec![0usize; k_max + 1];
    for (a, b, _) in g.white_edges() {
        let (ka, kb) = (ring(a), ring(b));
        let k = ka.min(kb);
        if ka.abs_diff(kb) == 1 && k <= k_max {
            counts[k] += 1;
        }
    }
    let edge_counts = counts[1..].to_vec();
    if let Some(k) = edge_counts.iter().position(|&n| n == 0) {
        return Err(Error::Degenerate(format!("no edges between annuli {} and {}", k + 1, k + 2)));
    }
    let mut partial_sums = Vec::with_capacity(k_max);
    let mut s = 0.0;
    for &n in &edge_counts {
        s += 1.0 / n as f64;
        partial_sums.push(s);
    }
    let min_area = min_rhombus_area(g, &embedding.positions);
    let log_bound_holds =
        partial_sums.iter().enumerate().all(|(i, &s)| s >= min_area / (32.0 * PI) * ((i + 1) as f64).ln());
    Ok(ResistanceReport { width, edge_counts, partial_sums, min_area, log_bound_holds })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RigidityReport {
    pub gamma: f64,
    pub psi: f64,
    pub generations: usize,
    /// max |r/R − 1| over the interior white vertices.
    pub max_deviation: f64,
    /// M₁(k) = max r/R and M₂(k) = max R/r over white vertices of
    /// generation ≤ k (generation M of z = N + iM).
    pub m1: Vec<f64>,
    pub m2: Vec<f64>,
    pub solve: SolveReport,
}

/// Solves for the radii of the Z^γ pattern on a quadrant window from its
/// boundary radii, starting at r ≡ 1, and compares with the recursion.
pub fn rigidity_experiment(gamma: f64, psi: f64, generations: usize, options: SolveOptions) -> Result<RigidityReport> {
    if !convexity_admissible(gamma, psi) {
        return Err(Error::Domain(format!("(gamma, psi) = ({gamma}, {psi}) outside the convexity window")));
    }
    let sp = map_to_pattern(&zgamma_map(gamma, psi, generations)?)?;
    let g = &sp.pattern.graph;
    let exact = &sp.pattern.radii;
    let boundary: BTreeMap<usize, f64> =
        g.white_vertices().filter(|&v| !g.is_interior(v)).map(|v| (v, exact.get(v))).collect();
    let problem = RadiusProblem { graph: g.clone(), labelling: sp.pattern.labelling.clone(), boundary, initial: None };
    let (r, solve) = solve_radii(&problem, options)?;
    if !solve.converged {
        return Err(Error::Numeric(format!("radius solve did not converge (residual {:e})", solve.residual)));
    }
    let mut max_deviation: f64 = 0.0;
    let mut per_gen = vec![(1.0f64, 1.0f64); generations + 1];
    for v in g.white_vertices() {
        let q = r.get(v) / exact.get(v);
        if g.is_interior(v) {
            max_deviation = max_deviation.max((q - 1.0).abs());
        }
        let (n, m) = sp.coords[v];
        let k = ((n + m) / 2) as usize;
        if k <= generations {
            per_gen[k].0 = per_gen[k].0.max(q);
            per_gen[k].1 = per_gen[k].1.max(1.0 / q);
        }
    }
    let mut m1 = Vec::new();
    let mut m2 = Vec::new();
    let (mut a, mut b) = (1.0f64, 1.0f64);
    for (x, y) in per_gen {
        a = a.max(x);
        b = b.max(y);
        m1.push(a);
        m2.push(b);
    }
    Ok(RigidityReport { gamma, psi, generations, max_deviation, m1, m2, solve })
}
