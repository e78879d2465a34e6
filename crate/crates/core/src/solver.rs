//! Radii from Dirichlet boundary data: damped Newton on the closing
//! equations in u = log r.

use crate::angle::{f_theta, f_theta_prime};
use crate::error::{Error, Result};
use crate::graph::{check_admissible, BQuadGraph, Color, Labelling, RadiusFunction};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadiusProblem {
    pub graph: BQuadGraph,
    pub labelling: Labelling,
    /// Prescribed radii; must cover every white vertex that is not interior.
    #[serde(with = "crate::io::entries")]
    pub boundary: BTreeMap<usize, f64>,
    #[serde(default)]
    pub initial: Option<RadiusFunction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { tol: 1e-10, max_iter: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport {
    pub converged: bool,
    pub iterations: usize,
    /// Max |residual| over the free vertices.
    pub residual: f64,
    pub history: Vec<f64>,
    pub unknowns: usize,
}

/// Compressed sparse rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Csr {
    pub n: usize,
    pub row_ptr: Vec<usize>,
    pub cols: Vec<usize>,
    pub vals: Vec<f64>,
}

impl Csr {
    pub fn mul(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .into_par_iter()
            .map(|i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(|k| self.vals[k] * x[self.cols[k]]).sum())
            .collect()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        (self.row_ptr[i]..self.row_ptr[i + 1]).filter(|&k| self.cols[k] == j).map(|k| self.vals[k]).sum()
    }

    fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }
}

/// The closing equations restricted to the free white vertices.
#[derive(Debug, Clone)]
pub struct RadiusSystem {
    /// Free vertex of each unknown.
    pub free: Vec<usize>,
    /// Unknown index of each vertex, if free.
    slot: Vec<Option<usize>>,
    /// log of the prescribed radius, per vertex.
    fixed: Vec<f64>,
    /// (neighbour, α) for each free vertex.
    stars: Vec<Vec<(usize, f64)>>,
}

impl RadiusSystem {
    pub fn new(problem: &RadiusProblem) -> Result<Self> {
        let g = &problem.graph;
        if problem.labelling.0.len() != g.num_faces() {
            return Err(Error::Input("labelling length differs from the face count".into()));
        }
        if let Some(&(v, s)) = check_admissible(g, &problem.labelling)?.first() {
            return Err(Error::Input(format!("labelling not admissible at black vertex {v}: angle sum {s}")));
        }
        if problem.boundary.is_empty() {
            return Err(Error::Input("empty boundary condition".into()));
        }
        let mut fixed = vec![f64::NAN; g.num_vertices()];
        for (&v, &r) in &problem.boundary {
            if v >= g.num_vertices() || g.color(v) != Color::White {
                return Err(Error::Input(format!("boundary vertex {v} is not a white vertex")));
            }
            if !(r > 0.0 && r.is_finite()) {
                return Err(Error::Input(format!("boundary radius at {v} must be positive")));
            }
            fixed[v] = r.ln();
        }
        let mut free = Vec::new();
        let mut slot = vec![None; g.num_vertices()];
        for v in g.white_vertices() {
            if problem.boundary.contains_key(&v) {
                continue;
            }
            if !g.is_interior(v) {
                return Err(Error::Input(format!("boundary white vertex {v} has no prescribed radius")));
            }
            slot[v] = Some(free.len());
            free.push(v);
        }
        let stars = free
            .iter()
            .map(|&v| g.white_star(v).into_iter().map(|(w, f)| (w, problem.labelling.get(f))).collect())
            .collect();
        Ok(RadiusSystem { free, slot, fixed, stars })
    }

    pub fn len(&self) -> usize {
        self.free.len()
    }

    pub fn is_empty(&self) -> bool {
        self.free.is_empty()
    }

    fn value(&self, u: &[f64], v: usize) -> f64 {
        match self.slot[v] {
            Some(i) => u[i],
            None => self.fixed[v],
        }
    }

    /// Σ f_α(u_j − u_v) − π per free vertex.
    pub fn residual(&self, u: &[f64]) -> Vec<f64> {
        (0..self.len())
            .into_par_iter()
            .map(|i| {
                let u0 = u[i];
                self.stars[i].iter().map(|&(w, a)| f_theta(self.value(u, w) - u0, a)).sum::<f64>() - PI
            })
            .collect()
    }

    /// Jacobian of [`RadiusSystem::residual`].
    pub fn jacobian(&self, u: &[f64]) -> Csr {
        let rows: Vec<Vec<(usize, f64)>> = (0..self.len())
            .into_par_iter()
            .map(|i| {
                let u0 = u[i];
                let mut row: BTreeMap<usize, f64> = BTreeMap::new();
                let mut diag = 0.0;
                for &(w, a) in &self.stars[i] {
                    let d = f_theta_prime(self.value(u, w) - u0, a);
                    diag -= d;
                    if let Some(j) = self.slot[w] {
                        *row.entry(j).or_default() += d;
                    }
                }
                *row.entry(i).or_default() += diag;
                row.into_iter().collect()
            })
            .collect();
        let mut row_ptr = vec![0];
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        for r in rows {
            for (j, x) in r {
                cols.push(j);
                vals.push(x);
            }
            row_ptr.push(cols.len());
        }
        Csr { n: self.len(), row_ptr, cols, vals }
    }

    pub fn radii(&self, u: &[f64]) -> RadiusFunction {
        let mut r = BTreeMap::new();
        for (v, &x) in self.fixed.iter().enumerate() {
            if x.is_finite() {
                r.insert(v, x.exp());
            }
        }
        for (i, &v) in self.free.iter().enumerate() {
            r.insert(v, u[i].exp());
        }
        RadiusFunction(r)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Jacobi-preconditioned conjugate gradients for the SPD system A x = b.
pub fn conjugate_gradient(a: &Csr, b: &[f64], rel_tol: f64, max_iter: usize) -> Vec<f64> {
    let n = a.n;
    let inv: Vec<f64> = a.diagonal().iter().map(|&d| if d != 0.0 { 1.0 / d } else { 1.0 }).collect();
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return x;
    }
    let mut z: Vec<f64> = r.iter().zip(&inv).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    for _ in 0..max_iter {
        let ap = a.mul(&p);
        let alpha = rz / dot(&p, &ap);
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if dot(&r, &r).sqrt() <= rel_tol * bnorm {
            break;
        }
        z = r.iter().zip(&inv).map(|(r, d)| r * d).collect();
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    x
}

/// Damped Newton iteration. Steps are halved until the residual norm
/// decreases; the report says whether `tol` was reached.
pub fn solve_radii(problem: &RadiusProblem, options: SolveOptions) -> Result<(RadiusFunction, SolveReport)> {
    let sys = RadiusSystem::new(problem)?;
    let n = sys.len();
    let mut u: Vec<f64> = match &problem.initial {
        Some(r) => sys
            .free
            .iter()
            .map(|&v| {
                let x = r.0.get(&v).copied().unwrap_or(1.0);
                if x > 0.0 && x.is_finite() {
                    Ok(x.ln())
                } else {
                    Err(Error::Input(format!("initial radius at {v} must be positive")))
                }
            })
            .collect::<Result<_>>()?,
        None => vec![0.0; n],
    };
    let mut f = sys.residual(&u);
    let mut norm = dot(&f, &f).sqrt();
    let mut history = vec![max_abs(&f)];
    let mut iterations = 0;
    while max_abs(&f) >= options.tol && iterations < options.max_iter {
        iterations += 1;
        let mut a = sys.jacobian(&u);
        // −J is symmetric positive definite
        a.vals.iter_mut().for_each(|x| *x = -*x);
        let step = conjugate_gradient(&a, &f, 1e-14, 20 * n + 100);
        if step.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("non-finite Newton step".into()));
        }
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let trial: Vec<f64> = u.iter().zip(&step).map(|(x, s)| x + t * s).collect();
            let ft = sys.residual(&trial);
            let nt = dot(&ft, &ft).sqrt();
            if nt.is_finite() && nt < norm {
                u = trial;
                f = ft;
                norm = nt;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        history.push(max_abs(&f));
        if !accepted {
            log::warn!("line search stalled at residual {:e}", max_abs(&f));
            break;
        }
        log::debug!("newton {iterations}: step {t}, residual {:e}", max_abs(&f));
    }
    let residual = max_abs(&f);
    let converged = residual < options.tol;
    if !converged {
        log::warn!("radius solve did not converge: residual {residual:e} after {iterations} iterations");
    }
    Ok((sys.radii(&u), SolveReport { converged, iterations, residual, history, unknowns: n }))
}
