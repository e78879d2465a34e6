//! Deterministic SVG 1.1 rendering of kites and circles.

use crate::error::{Error, Result};
use crate::pattern::CirclePattern;
use std::fmt::Write;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SvgOptions {
    pub circles: bool,
    pub kites: bool,
    pub stroke_width: f64,
    pub scale: f64,
}

impl Default for SvgOptions {
    fn default() -> Self {
        SvgOptions { circles: true, kites: true, stroke_width: 0.02, scale: 100.0 }
    }
}

/// One `<path>` per kite in face order, then one `<circle>` per white vertex
/// in vertex order. The y axis points up in pattern coordinates.
pub fn export_svg(pattern: &CirclePattern, options: SvgOptions) -> Result<String> {
    if pattern.kites.is_empty() {
        return Err(Error::Input("nothing to draw".into()));
    }
    if !(options.scale > 0.0) || !(options.stroke_width >= 0.0) {
        return Err(Error::Input("scale must be positive and stroke width nonnegative".into()));
    }
    let s = options.scale;
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let mut include = |x: f64, y: f64| {
        x0 = x0.min(x);
        x1 = x1.max(x);
        y0 = y0.min(y);
        y1 = y1.max(y);
    };
    if options.kites {
        for k in &pattern.kites {
            for p in &k.points {
                include(p.re * s, -p.im * s);
            }
        }
    }
    let circles: Vec<(usize, f64)> = if options.circles {
        pattern.graph.white_vertices().filter_map(|v| pattern.radii.0.get(&v).map(|&r| (v, r))).collect()
    } else {
        Vec::new()
    };
    for &(v, r) in &circles {
        let c = pattern.points[v];
        include((c.re - r) * s, -(c.im + r) * s);
        include((c.re + r) * s, -(c.im - r) * s);
    }
    if !(x0.is_finite() && x1.is_finite() && y0.is_finite() && y1.is_finite()) {
        return Err(Error::Input("geometry is empty or not finite".into()));
    }
    let pad = 0.05 * (x1 - x0).max(y1 - y0).max(1e-9);
    let (vx, vy, vw, vh) = (x0 - pad, y0 - pad, x1 - x0 + 2.0 * pad, y1 - y0 + 2.0 * pad);
    let sw = options.stroke_width * s;
    let mut out = String::new();
    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#).unwrap();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{vx:.6} {vy:.6} {vw:.6} {vh:.6}">"#
    )
    .unwrap();
    if options.kites {
        writeln!(out, r##"<g fill="#e8eef7" stroke="#30507a" stroke-width="{sw:.6}">"##).unwrap();
        for k in &pattern.kites {
            let p = k.points;
            writeln!(
                out,
                r#"<path d="M {:.6} {:.6} L {:.6} {:.6} L {:.6} {:.6} L {:.6} {:.6} Z"/>"#,
                p[0].re * s,
                -p[0].im * s,
                p[1].re * s,
                -p[1].im * s,
                p[2].re * s,
                -p[2].im * s,
                p[3].re * s,
                -p[3].im * s
            )
            .unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    if options.circles {
        writeln!(out, r##"<g fill="none" stroke="#a03020" stroke-width="{sw:.6}">"##).unwrap();
        for (v, r) in circles {
            let c = pattern.points[v];
            writeln!(out, r#"<circle cx="{:.6}" cy="{:.6}" r="{:.6}"/>"#, c.re * s, -c.im * s, r * s).unwrap();
        }
        writeln!(out, "</g>").unwrap();
    }
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}
