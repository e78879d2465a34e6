//! Square-grid Z^γ: the labelling α_ψ, the cross-ratio recursion with the
//! nonautonomous constraint, the induced circle pattern and its checks.

use crate::dd::{self, cdd, to_c64, Cdd, Dd};
use crate::error::{Error, Result};
use crate::graph::{BQuadGraph, Color, Labelling};
use crate::pattern::{check_pattern, CirclePattern, Checks};
use num_complex::{Complex, Complex64};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// α_ψ on the diagonal edge z1 → z2 of the square grid: ψ when both
/// coordinates increase together, π − ψ otherwise.
pub fn alpha_psi(z1: (i64, i64), z2: (i64, i64), psi: f64) -> Result<f64> {
    let (dx, dy) = (z2.0 - z1.0, z2.1 - z1.1);
    if dx.abs() != 1 || dy.abs() != 1 {
        return Err(Error::Input(format!("{z1:?} and {z2:?} are not diagonal neighbours")));
    }
    check_psi(psi)?;
    Ok(if dx * dy > 0 { psi } else { PI - psi })
}

fn check_psi(psi: f64) -> Result<()> {
    if psi > 0.0 && psi < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("psi = {psi} not in (0, pi)")))
    }
}

fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 2.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("gamma = {gamma} not in (0, 2)")))
    }
}

/// q(p1, p2, p3, p4) = (p1 − p2)(p3 − p4) / ((p2 − p3)(p4 − p1)).
pub fn cross_ratio(p1: Complex64, p2: Complex64, p3: Complex64, p4: Complex64) -> Complex64 {
    (p1 - p2) * (p3 - p4) / ((p2 - p3) * (p4 - p1))
}

fn solve_cr_dd(p1: Cdd, p2: Cdd, p3: Cdd, q: Cdd) -> Option<Cdd> {
    let a = p1 - p2;
    let b = q * (p2 - p3);
    let s = a + b;
    if dd::abs(s) <= 1e-14 * (dd::abs(a) + dd::abs(b)) {
        return None;
    }
    Some(dd::cdiv(a * p3 + b * p1, s))
}

/// The point p4 with q(p1, p2, p3, p4) = q.
pub fn solve_cross_ratio(p1: Complex64, p2: Complex64, p3: Complex64, q: Complex64) -> Result<Complex64> {
    let scale = p1.norm().max(p2.norm()).max(p3.norm()).max(1.0);
    if (p1 - p2).norm() <= 1e-14 * scale || (p2 - p3).norm() <= 1e-14 * scale || (p1 - p3).norm() <= 1e-14 * scale {
        return Err(Error::Degenerate("cross-ratio points must be distinct".into()));
    }
    if q.norm() == 0.0 || !q.re.is_finite() || !q.im.is_finite() {
        return Err(Error::Input("cross-ratio must be finite and nonzero".into()));
    }
    solve_cr_dd(cdd(p1), cdd(p2), cdd(p3), cdd(q))
        .map(to_c64)
        .ok_or_else(|| Error::Degenerate("singular cross-ratio solve".into()))
}

/// Z^γ on the staircase window {n, m ≥ 0, n + m ≤ 2N}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMap {
    pub gamma: f64,
    pub psi: f64,
    pub size: usize,
    /// `grid[n][m]` for m ≤ 2N − n.
    pub grid: Vec<Vec<Complex64>>,
}

impl DiscreteMap {
    pub fn get(&self, n: i64, m: i64) -> Option<Complex64> {
        if n < 0 || m < 0 {
            return None;
        }
        self.grid.get(n as usize).and_then(|row| row.get(m as usize)).copied()
    }

    fn at(&self, n: i64, m: i64) -> Complex64 {
        self.grid[n as usize][m as usize]
    }

    fn limit(&self) -> i64 {
        2 * self.size as i64
    }

    /// Largest |q(quad) − e^{2i(ψ−π)}| over elementary quadrilaterals.
    pub fn cross_ratio_residual(&self) -> f64 {
        let q = Complex64::from_polar(1.0, 2.0 * (self.psi - PI));
        let l = self.limit();
        let mut worst: f64 = 0.0;
        for n in 1..l {
            for m in 1..=l - n {
                let c = cross_ratio(self.at(n, m - 1), self.at(n - 1, m - 1), self.at(n - 1, m), self.at(n, m));
                worst = worst.max((c - q).norm());
            }
        }
        worst
    }

    /// Largest residual of the constraint
    /// γ f = 2n (f₊ₙ − f)(f − f₋ₙ)/(f₊ₙ − f₋ₙ) + 2m (f₊ₘ − f)(f − f₋ₘ)/(f₊ₘ − f₋ₘ)
    /// relative to max(1, |f|), over points with all four neighbours.
    pub fn constraint_residual(&self) -> f64 {
        let l = self.limit();
        let mut worst: f64 = 0.0;
        for n in 1..l {
            for m in 1..l - n {
                let v = self.at(n, m);
                let (np, nm, mp, mm) = (self.at(n + 1, m), self.at(n - 1, m), self.at(n, m + 1), self.at(n, m - 1));
                let r = 2.0 * n as f64 * (np - v) * (v - nm) / (np - nm) + 2.0 * m as f64 * (mp - v) * (v - mm) / (mp - mm)
                    - self.gamma * v;
                worst = worst.max(r.norm() / v.norm().max(1.0));
            }
        }
        worst
    }

    /// Largest distance of the boundary circle centers f(n, 0) and f(0, m)
    /// (n, m even) from the half lines R₊ and e^{iγ(π−ψ)} R₊.
    pub fn boundary_center_deviation(&self) -> f64 {
        let rot = Complex64::from_polar(1.0, -self.gamma * (PI - self.psi));
        let ray = |z: Complex64| if z.re >= 0.0 { z.im.abs() } else { z.norm() };
        let l = self.limit();
        let mut worst: f64 = 0.0;
        for k in (2..=l).step_by(2) {
            worst = worst.max(ray(self.at(k, 0))).max(ray(self.at(0, k) * rot));
        }
        worst
    }
}

fn axis_step(gamma: Dd, n: i64, a: Cdd, b: Cdd) -> Option<Cdd> {
    // γ a = 2n (x − a)(a − b)/(x − b), solved for x
    let two_n = dd::dd(2.0 * n as f64);
    let num = a * b * gamma - a * (a - b) * two_n;
    let den = a * gamma - (a - b) * two_n;
    if dd::abs(den) <= 1e-14 * (dd::abs(a) + dd::abs(b)) {
        return None;
    }
    Some(dd::cdiv(num, den))
}

/// The discrete map Z^γ with cross-ratios e^{2i(ψ−π)}, f(0,0) = 0,
/// f(1,0) = 1, f(0,1) = e^{iγ(π−ψ)}, computed in double-double arithmetic.
pub fn zgamma_map(gamma: f64, psi: f64, size: usize) -> Result<DiscreteMap> {
    check_gamma(gamma)?;
    check_psi(psi)?;
    if size == 0 {
        return Err(Error::Input("window size must be at least 1".into()));
    }
    let l = 2 * size as i64;
    let g = dd::dd(gamma);
    let zero = Complex::new(dd::dd(0.0), dd::dd(0.0));
    let mut f: Vec<Vec<Cdd>> = (0..=l).map(|n| vec![zero; (l - n + 1) as usize]).collect();
    f[1][0] = Complex::new(dd::dd(1.0), dd::dd(0.0));
    f[0][1] = dd::expi(g * (dd::pi() - dd::dd(psi)));
    for n in 1..l {
        let nu = n as usize;
        f[nu + 1][0] = axis_step(g, n, f[nu][0], f[nu - 1][0])
            .ok_or_else(|| Error::Recursion(format!("axis recursion degenerates at n = {n} on the real axis")))?;
        f[0][nu + 1] = axis_step(g, n, f[0][nu], f[0][nu - 1])
            .ok_or_else(|| Error::Recursion(format!("axis recursion degenerates at m = {n} on the second axis")))?;
    }
    let q = dd::expi((dd::dd(psi) - dd::pi()) * 2.0);
    for s in 2..=l {
        for n in 1..s {
            let m = s - n;
            let (nu, mu) = (n as usize, m as usize);
            f[nu][mu] = solve_cr_dd(f[nu][mu - 1], f[nu - 1][mu - 1], f[nu - 1][mu], q)
                .ok_or_else(|| Error::Recursion(format!("singular cross-ratio solve at ({n}, {m})")))?;
        }
    }
    let grid = f.into_iter().map(|row| row.into_iter().map(to_c64).collect()).collect();
    Ok(DiscreteMap { gamma, psi, size, grid })
}

/// Circle pattern of a discrete map, with lattice bookkeeping.
#[derive(Debug, Clone)]
pub struct SgPattern {
    pub pattern: CirclePattern,
    /// (n, m) of each vertex.
    pub coords: Vec<(i64, i64)>,
    pub index: BTreeMap<(i64, i64), usize>,
}

impl SgPattern {
    /// Vertex at z = N + iM of the quadrant {M ≥ |N|}, i.e. n = M + N,
    /// m = M − N.
    pub fn vertex_at(&self, big_n: i64, big_m: i64) -> Option<usize> {
        self.index.get(&(big_m + big_n, big_m - big_n)).copied()
    }

    /// Radii R(N + iM) keyed by (N, M).
    pub fn radii_by_z(&self) -> BTreeMap<(i64, i64), f64> {
        self.pattern
            .radii
            .0
            .iter()
            .map(|(&v, &r)| {
                let (n, m) = self.coords[v];
                (((n - m) / 2, (n + m) / 2), r)
            })
            .collect()
    }
}

/// Circles at f(n, m) for n + m even, intersection points at odd points,
/// one kite per elementary quadrilateral of the window.
pub fn map_to_pattern(map: &DiscreteMap) -> Result<SgPattern> {
    let l = map.limit();
    if l < 2 {
        return Err(Error::Input("window too small for a kite".into()));
    }
    let mut coords = Vec::new();
    for n in 0..=l {
        for m in 0..=l - n {
            // keep points that belong to some quadrilateral
            if n + m < l || (n > 0 && m > 0) {
                coords.push((n, m));
            }
        }
    }
    coords.retain(|&(n, m)| {
        let quad = |bn: i64, bm: i64| bn >= 0 && bm >= 0 && bn + bm + 2 <= l;
        quad(n, m) || quad(n - 1, m) || quad(n, m - 1) || quad(n - 1, m - 1)
    });
    let index: BTreeMap<(i64, i64), usize> = coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let colors: Vec<Color> =
        coords.iter().map(|&(n, m)| if (n + m) % 2 == 0 { Color::White } else { Color::Black }).collect();
    let mut faces = Vec::new();
    let mut alpha = Vec::new();
    for n in 0..l - 1 {
        for m in 0..l - 1 - n {
            let q = [index[&(n, m)], index[&(n + 1, m)], index[&(n + 1, m + 1)], index[&(n, m + 1)]];
            faces.push(q);
            // the white diagonal runs along 1+i when (n, m) is white
            alpha.push(if (n + m) % 2 == 0 { map.psi } else { PI - map.psi });
        }
    }
    let graph = BQuadGraph::new(colors, faces)?;
    // BQuadGraph rotates faces to start at a white vertex; labels stay per face
    let points: Vec<Complex64> = coords.iter().map(|&(n, m)| map.at(n, m)).collect();
    let mut pattern = CirclePattern::from_points(graph, Labelling(alpha), points)?;
    for (&v, r) in pattern.radii.0.iter_mut() {
        let (n, m) = coords[v];
        let lens: Vec<f64> = [(n + 1, m), (n - 1, m), (n, m + 1), (n, m - 1)]
            .iter()
            .filter_map(|&(a, b)| index.get(&(a, b)).map(|_| (map.at(a, b) - map.at(n, m)).norm()))
            .collect();
        let (lo, hi) = lens.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        if hi - lo > 1e-8 * hi.max(1.0) {
            return Err(Error::Inconsistent(format!("edge lengths at ({n}, {m}) range over [{lo}, {hi}]")));
        }
        *r = lens[0];
    }
    Ok(SgPattern { pattern, coords, index })
}

/// Range of γ giving convex kites at angle ψ:
/// [(π − 2ψ)/(π − ψ), π/(π − ψ)] clipped to (0, 2).
pub fn convexity_window(psi: f64) -> (f64, f64) {
    let lo = (PI - 2.0 * psi) / (PI - psi);
    let hi = PI / (PI - psi);
    (lo.max(0.0), hi.min(2.0))
}

pub fn convexity_admissible(gamma: f64, psi: f64) -> bool {
    let (lo, hi) = convexity_window(psi);
    gamma >= lo && gamma <= hi
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZgammaReport {
    pub gamma: f64,
    pub psi: f64,
    pub checked_vertices: usize,
    /// min over interior z of (γ−1)(R² − R(z−i)R(z+1) − cosψ R (R(z−i) − R(z+1))).
    pub sign_min: f64,
    /// (N, M, value) with value < −1e-9·R(z)².
    pub sign_violations: Vec<(i64, i64, f64)>,
    /// Largest |residual| of the radius identity, relative to (N+M+1)·R(z)³.
    pub identity_max: f64,
    pub convexity_window: (f64, f64),
    pub convexity_admissible: bool,
    pub nonconvex_kites: usize,
}

/// Sign check, radius identity, convexity window and per-kite convexity.
pub fn zgamma_checks(map: &DiscreteMap) -> Result<ZgammaReport> {
    let sp = map_to_pattern(map)?;
    let l = map.limit();
    let radius = |n: i64, m: i64| -> f64 {
        let v = sp.index[&(n, m)];
        sp.pattern.radii.get(v)
    };
    let c = map.psi.cos();
    let mut sign_min = f64::INFINITY;
    let mut sign_violations = Vec::new();
    let mut identity_max: f64 = 0.0;
    let mut checked = 0;
    for n in 1..l {
        for m in 1..l {
            if (n + m) % 2 != 0 || n + m + 2 > l {
                continue;
            }
            checked += 1;
            let big_n = (n - m) / 2;
            let big_m = (n + m) / 2;
            let rz = radius(n, m);
            let rmi = radius(n - 1, m - 1);
            let rp1 = radius(n + 1, m - 1);
            let rpi = radius(n + 1, m + 1);
            let s = (map.gamma - 1.0) * (rz * rz - rmi * rp1 - c * rz * (rmi - rp1));
            sign_min = sign_min.min(s);
            if s < -1e-9 * rz * rz {
                sign_violations.push((big_n, big_m, s));
            }
            let e = n as f64 * (rz * rz - rp1 * rmi - c * rz * (rmi - rp1)) * (rpi + rp1)
                + m as f64 * (rz * rz - rpi * rp1 - c * rz * (rpi - rp1)) * (rp1 + rmi);
            identity_max = identity_max.max(e.abs() / ((n + m) as f64 * rz.powi(3)));
        }
    }
    let report = check_pattern(&sp.pattern, Checks { immersed: false, embedded: false, convex: true });
    Ok(ZgammaReport {
        gamma: map.gamma,
        psi: map.psi,
        checked_vertices: checked,
        sign_min: if checked == 0 { 0.0 } else { sign_min },
        sign_violations,
        identity_max,
        convexity_window: convexity_window(map.psi),
        convexity_admissible: convexity_admissible(map.gamma, map.psi),
        nonconvex_kites: report.nonconvex.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn alpha_examples() {
        assert_eq!(alpha_psi((0, 0), (1, 1), PI / 3.0).unwrap(), PI / 3.0);
        assert!((alpha_psi((0, 0), (1, -1), PI / 3.0).unwrap() - 2.0 * PI / 3.0).abs() < 1e-15);
        assert_eq!(alpha_psi((2, 2), (1, 1), PI / 2.0).unwrap(), PI / 2.0);
        assert!(alpha_psi((0, 0), (2, 0), 1.0).is_err());
    }

    #[test]
    fn cross_ratio_examples() {
        let p = solve_cross_ratio(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 1.0), c(-1.0, 0.0)).unwrap();
        assert!((p - c(0.0, 1.0)).norm() < 1e-15);
        let w = Complex64::from_polar(1.0, 2.0 * PI / 3.0);
        let q = Complex64::from_polar(1.0, 2.0 * (PI / 3.0 - PI));
        let p = solve_cross_ratio(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0) + w, q).unwrap();
        assert!((p - w).norm() < 1e-15);
        let w = Complex64::from_polar(1.0, PI / 3.0);
        let q = Complex64::from_polar(1.0, -2.0 * PI / 3.0);
        let p = solve_cross_ratio(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0) + w, q).unwrap();
        assert!((p - w).norm() < 1e-15);
        assert!(solve_cross_ratio(c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), q).is_err());
    }

    #[test]
    fn identity_map() {
        let f = zgamma_map(1.0, PI / 2.0, 6).unwrap();
        for n in 0..=12i64 {
            for m in 0..=12 - n {
                assert!((f.get(n, m).unwrap() - c(n as f64, m as f64)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn first_axis_step() {
        for (g, psi) in [(1.5, PI / 2.0), (0.7, 2.0), (5.0 / 6.0, PI / 3.0)] {
            let f = zgamma_map(g, psi, 2).unwrap();
            assert!((f.get(2, 0).unwrap() - c(2.0 / (2.0 - g), 0.0)).norm() < 1e-14);
            let e = Complex64::from_polar(1.0, g * (PI - psi));
            assert!((f.get(0, 1).unwrap() - e).norm() < 1e-15);
        }
    }

    #[test]
    fn pattern_of_identity() {
        let sp = map_to_pattern(&zgamma_map(1.0, PI / 2.0, 4).unwrap()).unwrap();
        for (_, r) in sp.pattern.radii.0.iter() {
            assert!((r - 1.0).abs() < 1e-12);
        }
        assert_eq!(sp.pattern.graph.num_faces(), 7 * 8 / 2);
        assert!(sp.vertex_at(0, 0).is_some());
        let rep = zgamma_checks(&zgamma_map(1.0, PI / 2.0, 4).unwrap()).unwrap();
        assert_eq!(rep.sign_min, 0.0);
        assert!(rep.identity_max < 1e-14);
        assert_eq!(rep.nonconvex_kites, 0);
    }

    #[test]
    fn convexity_window_examples() {
        let (lo, hi) = convexity_window(PI / 3.0);
        assert!((lo - 0.5).abs() < 1e-15 && (hi - 1.5).abs() < 1e-15);
        let (lo, hi) = convexity_window(PI / 5.0);
        assert!((lo - 0.75).abs() < 1e-15 && (hi - 1.25).abs() < 1e-15);
        assert_eq!(convexity_window(2.0), (0.0, 2.0));
    }
}
