//! The `qcp` command line.

use crate::analysis::{generation_ratio_stats, rigidity_experiment, shortened_resistance, subharmonicity_check};
use crate::error::{Error, Result};
use crate::graph::{vertex_residual, RadiusFunction};
use crate::hirota::{rhombic_labelling, zgamma_pattern_with, FillOrder};
use crate::io::{load, save, Document, Payload};
use crate::pattern::{check_pattern, CirclePattern, Checks};
use crate::projection::{generate_embedding, symmetric_plane, LiftedEmbedding, Offset, PlaneSpec};
use crate::sg::{map_to_pattern, zgamma_map};
use crate::solver::{solve_radii, SolveOptions};
use crate::surface::{lift_embedding, project_surface, simple_flip, strip_flip, Half, QuadSurface, SignedAxis};
use crate::svg::{export_svg, SvgOptions};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::io::Write;
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(name = "qcp", version, about = "Quasicrystallic circle patterns")]
pub struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized steps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Rhombic embedding by grid projection.
    Generate(GenerateArgs),
    /// Lift an embedding to a quad-surface in Z^d.
    Lift { input: PathBuf },
    /// Project a quad-surface to the plane (isoradial pattern).
    Project(DirectionArgs),
    /// Simple or strip flip of a quad-surface.
    Flip(FlipArgs),
    /// Square-grid Z^γ map or pattern.
    ZgammaSg(SgArgs),
    /// Quasicrystallic Z^γ pattern on an embedding.
    ZgammaQuasi(QuasiArgs),
    /// Solve for radii with Dirichlet boundary data.
    Solve(SolveArgs),
    /// Check a pattern.
    Check(CheckArgs),
    /// Empirical analyses.
    Analyze {
        #[command(subcommand)]
        which: AnalyzeCommand,
    },
    /// Render a pattern or embedding as SVG.
    Svg(SvgArgs),
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Rotational symmetry (odd, at least 5); ignored with --square.
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Offset t_k of every coordinate.
    #[arg(long, default_value_t = -0.2, allow_hyphen_values = true)]
    pub offset: f64,
    /// Window radius ρ.
    #[arg(long, default_value_t = 8.0)]
    pub window: f64,
    /// Square grid (d = 2) instead of a symmetric plane.
    #[arg(long)]
    pub square: bool,
}

#[derive(Debug, Args)]
pub struct DirectionArgs {
    pub input: PathBuf,
    /// Embedding providing the edge directions.
    #[arg(long)]
    pub directions: PathBuf,
}

#[derive(Debug, Args)]
pub struct FlipArgs {
    pub input: PathBuf,
    /// Pivot vertex, comma separated integers.
    #[arg(long, allow_hyphen_values = true)]
    pub vertex: String,
    /// Strip axes as three signed 1-based axes, e.g. "+1,+2,-3".
    #[arg(long, allow_hyphen_values = true)]
    pub strip: Option<String>,
    #[arg(long, value_enum, default_value_t = HalfArg::Plus)]
    pub half: HalfArg,
    /// Embedding providing the edge directions (strip flips only).
    #[arg(long)]
    pub directions: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum HalfArg {
    Plus,
    Minus,
    Both,
}

#[derive(Debug, Args)]
pub struct SgArgs {
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, default_value_t = PI / 2.0)]
    pub psi: f64,
    /// Window size N (generations).
    #[arg(long, default_value_t = 10)]
    pub window: usize,
    /// Emit the circle pattern instead of the map.
    #[arg(long)]
    pub pattern: bool,
}

#[derive(Debug, Args)]
pub struct QuasiArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub gamma: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub theta1: Option<f64>,
    /// Fill the brick in random order (uses --seed).
    #[arg(long)]
    pub random_order: bool,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub input: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long, default_value_t = 100)]
    pub max_iter: usize,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub immersed: bool,
    #[arg(long)]
    pub embedded: bool,
    #[arg(long)]
    pub convex: bool,
    /// Closing residual of the radii at interior white vertices.
    #[arg(long)]
    pub closing: bool,
    /// Exit with code 4 when violations are found.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Subharmonicity of r/ρ against an isoradial (or given) reference.
    Subharmonicity {
        input: PathBuf,
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Per-generation max |r(w)/r(v) − 1|.
    Ratios {
        input: PathBuf,
        /// Center vertex (default: first white vertex at the smallest |center|).
        #[arg(long)]
        vertex: Option<usize>,
    },
    /// Shortened network resistance of an embedding.
    Resistance {
        input: PathBuf,
        #[arg(long, default_value_t = 10)]
        annuli: usize,
        #[arg(long, default_value_t = 4.0)]
        width: f64,
    },
    /// Radius solve against the Z^γ recursion.
    Rigidity {
        #[arg(long)]
        gamma: f64,
        #[arg(long, default_value_t = PI / 2.0)]
        psi: f64,
        #[arg(long, default_value_t = 10)]
        window: usize,
        #[arg(long, default_value_t = 1e-10)]
        tol: f64,
        #[arg(long, default_value_t = 100)]
        max_iter: usize,
    },
}

#[derive(Debug, Args)]
pub struct SvgArgs {
    pub input: PathBuf,
    #[arg(long)]
    pub no_circles: bool,
    #[arg(long)]
    pub no_kites: bool,
    #[arg(long, default_value_t = 0.02)]
    pub stroke_width: f64,
    #[arg(long, default_value_t = 100.0)]
    pub scale: f64,
}

fn read_doc(path: &PathBuf) -> Result<Document> {
    load(&std::fs::read(path)?)
}

fn read_embedding(path: &PathBuf) -> Result<LiftedEmbedding> {
    match read_doc(path)?.payload {
        Payload::Embedding(e) => Ok(e),
        other => Err(Error::Input(format!("expected an embedding, got {}", other.kind()))),
    }
}

fn read_surface(path: &PathBuf) -> Result<QuadSurface> {
    match read_doc(path)?.payload {
        Payload::Surface(s) => Ok(s),
        other => Err(Error::Input(format!("expected a surface, got {}", other.kind()))),
    }
}

fn isoradial(graph: crate::graph::BQuadGraph, positions: Vec<Complex64>) -> Result<CirclePattern> {
    let labelling = rhombic_labelling(&graph, &positions);
    CirclePattern::from_points(graph, labelling, positions)
}

fn read_pattern(path: &PathBuf) -> Result<CirclePattern> {
    match read_doc(path)?.payload {
        Payload::Pattern(p) => Ok(p),
        Payload::Embedding(e) => isoradial(e.graph, e.positions),
        other => Err(Error::Input(format!("expected a pattern, got {}", other.kind()))),
    }
}

fn parse_point(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|x| x.trim().parse::<i64>().map_err(|_| Error::Input(format!("bad coordinate '{x}' in '{s}'"))))
        .collect()
}

fn parse_axes(s: &str) -> Result<(SignedAxis, SignedAxis, SignedAxis)> {
    let axes: Vec<SignedAxis> = s
        .split(',')
        .map(|x| {
            let v: i64 = x.trim().parse().map_err(|_| Error::Input(format!("bad axis '{x}'")))?;
            if v == 0 {
                return Err(Error::Input("axes are 1-based".into()));
            }
            Ok(SignedAxis::new(v.unsigned_abs() as usize - 1, v.signum()))
        })
        .collect::<Result<_>>()?;
    match axes[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(Error::Input("need exactly three strip axes".into())),
    }
}

fn report<T: serde::Serialize>(value: &T) -> Result<Payload> {
    Ok(Payload::Report(serde_json::to_value(value).map_err(|e| Error::Io(e.to_string()))?))
}

struct Outcome {
    payload: Option<Payload>,
    svg: Option<String>,
    code: i32,
}

fn doc(payload: Payload) -> Outcome {
    Outcome { payload: Some(payload), svg: None, code: 0 }
}

fn execute(cli: &Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Generate(a) => {
            let plane = if a.square { PlaneSpec::square() } else { symmetric_plane(a.folds, Offset::Diagonal(a.offset))? };
            Ok(doc(Payload::Embedding(generate_embedding(&plane, a.window)?)))
        }
        Command::Lift { input } => Ok(doc(Payload::Surface(lift_embedding(&read_embedding(input)?)?))),
        Command::Project(a) => {
            let s = read_surface(&a.input)?;
            let dirs = read_embedding(&a.directions)?.directions;
            let p = project_surface(&s, &dirs)?;
            Ok(doc(Payload::Pattern(isoradial(p.graph, p.positions)?)))
        }
        Command::Flip(a) => {
            let s = read_surface(&a.input)?;
            let z = parse_point(&a.vertex)?;
            let out = match &a.strip {
                None => simple_flip(&s, &z)?,
                Some(axes) => {
                    let path = a.directions.as_ref().ok_or_else(|| Error::Input("strip flips need --directions".into()))?;
                    let dirs = read_embedding(path)?.directions;
                    let half = match a.half {
                        HalfArg::Plus => Half::Plus,
                        HalfArg::Minus => Half::Minus,
                        HalfArg::Both => Half::Both,
                    };
                    strip_flip(&s, &dirs, &z, parse_axes(axes)?, half)?
                }
            };
            Ok(doc(Payload::Surface(out)))
        }
        Command::ZgammaSg(a) => {
            let m = zgamma_map(a.gamma, a.psi, a.window)?;
            if a.pattern {
                Ok(doc(Payload::Pattern(map_to_pattern(&m)?.pattern)))
            } else {
                Ok(doc(Payload::Map(m)))
            }
        }
        Command::ZgammaQuasi(a) => {
            let e = read_embedding(&a.input)?;
            let order = if a.random_order { FillOrder::Random(cli.seed) } else { FillOrder::Lexicographic };
            let z = zgamma_pattern_with(&e, a.gamma, a.theta1, order)?;
            log::info!("max Hirota residual on the brick: {:e}", z.max_brick_residual);
            Ok(doc(Payload::Pattern(z.pattern)))
        }
        Command::Solve(a) => {
            let problem = match read_doc(&a.input)?.payload {
                Payload::Problem(p) => p,
                other => return Err(Error::Input(format!("expected a problem, got {}", other.kind()))),
            };
            let (r, rep) = solve_radii(&problem, SolveOptions { tol: a.tol, max_iter: a.max_iter })?;
            if !rep.converged {
                return Err(Error::Numeric(format!(
                    "no convergence after {} iterations (residual {:e})",
                    rep.iterations, rep.residual
                )));
            }
            Ok(doc(Payload::Radii(r)))
        }
        Command::Check(a) => {
            let p = read_pattern(&a.input)?;
            let none = !(a.immersed || a.embedded || a.convex || a.closing);
            let checks = Checks { immersed: a.immersed || none, embedded: a.embedded || none, convex: a.convex || none };
            let rep = check_pattern(&p, checks);
            let mut closing = Vec::new();
            if a.closing || none {
                for v in p.graph.interior_whites() {
                    let res = vertex_residual(&p.graph, &p.labelling, &p.radii, v);
                    if !(res.abs() < 1e-8) {
                        closing.push((v, res));
                    }
                }
            }
            let clean = rep.is_clean() && closing.is_empty();
            let value = serde_json::json!({ "pattern": rep, "closing": closing, "clean": clean });
            Ok(Outcome { payload: Some(Payload::Report(value)), svg: None, code: if a.strict && !clean { 4 } else { 0 } })
        }
        Command::Analyze { which } => match which {
            AnalyzeCommand::Subharmonicity { input, reference } => {
                let p = read_pattern(input)?;
                let rho = match reference {
                    Some(path) => read_pattern(path)?.radii,
                    None => RadiusFunction::constant(&p.graph, 1.0),
                };
                Ok(doc(report(&subharmonicity_check(&p.radii, &rho, &p.graph, &p.labelling)?)?))
            }
            AnalyzeCommand::Ratios { input, vertex } => {
                let p = read_pattern(input)?;
                let v0 = match vertex {
                    Some(v) => *v,
                    None => p
                        .graph
                        .white_vertices()
                        .min_by(|&a, &b| p.points[a].norm().partial_cmp(&p.points[b].norm()).unwrap().then(a.cmp(&b)))
                        .ok_or_else(|| Error::Input("pattern has no white vertex".into()))?,
                };
                Ok(doc(report(&generation_ratio_stats(&p, v0)?)?))
            }
            AnalyzeCommand::Resistance { input, annuli, width } => {
                let e = read_embedding(input)?;
                let v0 = e.central_white();
                Ok(doc(report(&shortened_resistance(&e, v0, *annuli, *width)?)?))
            }
            AnalyzeCommand::Rigidity { gamma, psi, window, tol, max_iter } => Ok(doc(report(&rigidity_experiment(
                *gamma,
                *psi,
                *window,
                SolveOptions { tol: *tol, max_iter: *max_iter },
            )?)?)),
        },
        Command::Svg(a) => {
            let p = read_pattern(&a.input)?;
            let opts =
                SvgOptions { circles: !a.no_circles, kites: !a.no_kites, stroke_width: a.stroke_width, scale: a.scale };
            Ok(Outcome { payload: None, svg: Some(export_svg(&p, opts)?), code: 0 })
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Generate(_) => "generate",
        Command::Lift { .. } => "lift",
        Command::Project(_) => "project",
        Command::Flip(_) => "flip",
        Command::ZgammaSg(_) => "zgamma-sg",
        Command::ZgammaQuasi(_) => "zgamma-quasi",
        Command::Solve(_) => "solve",
        Command::Check(_) => "check",
        Command::Analyze { .. } => "analyze",
        Command::Svg(_) => "svg",
    }
}

/// Runs the command line and returns the exit code. Diagnostics go to
/// `stderr`, results to `--out` or `stdout`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let args: Vec<std::ffi::OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(stderr, "{e}");
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let work = || -> Result<(Vec<u8>, i32)> {
        let outcome = execute(&cli)?;
        let bytes = match (outcome.payload, outcome.svg) {
            (Some(payload), _) => {
                let params: Vec<(&str, String)> = vec![
                    ("args", args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect::<Vec<_>>().join(" ")),
                    ("seed", cli.seed.to_string()),
                ];
                save(&Document::new(payload, command_name(&cli.command), &params))?
            }
            (None, Some(svg)) => svg.into_bytes(),
            (None, None) => Vec::new(),
        };
        Ok((bytes, outcome.code))
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(Error::Input(format!("thread pool: {e}"))),
        },
        None => work(),
    }
    .and_then(|(bytes, code)| {
        match &cli.out {
            Some(path) => std::fs::write(path, bytes)?,
            None => stdout.write_all(&bytes)?,
        }
        Ok(code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "qcp: {e}");
            e.exit_code()
        }
    }
}
