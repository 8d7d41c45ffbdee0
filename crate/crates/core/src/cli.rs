//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on usage errors, 2 when a computation or file
//! access fails. Options given on the command line override `--config` values,
//! which override built-in defaults.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use crate::config::Config;
use crate::current::scm::{read_scm, to_scm_string};
use crate::decompose::{decompose_with, DecomposeOptions};
use crate::energy::{
    default_radii, dilation_sup, dirichlet_energy, estimate_apdil, integral, l2_norm_sq, minmax_spectrum,
    quadratic_energy, rayleigh_quotient, ApdilOptions, EigenMethod, SpectrumOptions,
};
use crate::error::{Error, Result};
use crate::experiments::cancellation::{run_cancellation_experiment, CancellationParams};
use crate::experiments::spline::{run_spline_experiment, SplineParams};
use crate::experiments::sweep::{run_semicontinuity_sweep, Family, SweepParams};
use crate::flat::{flat_distance, grid_complex, verify_certificate, FlatComplex, FlatOptions};
use crate::goodcuts::{good_cuts, GridSet};
use crate::john::{NormBall, NormRegistry};
use crate::poincare::poincare_ratio;
use crate::SimplicialCurrent;

#[derive(Debug, Parser)]
#[command(name = "currentlab", version, about = "Simplicial integral currents: mass, flat distance, spectra and experiments")]
pub struct Cli {
    /// `key = value` defaults for any long option.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for randomized solvers and samplers.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Input {
    /// Current in SCM format.
    #[arg(long = "in")]
    pub input: PathBuf,
}

#[derive(Debug, Args)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolverArgs {
    /// auto, dense or subspace.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    #[arg(long)]
    pub dense_threshold: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the mass.
    Mass(Input),
    /// Write the boundary current.
    Boundary {
        #[command(flatten)]
        input: Input,
        #[command(flatten)]
        out: Output,
    },
    /// Slice by a level set of an affine function or of a vertex function.
    Slice {
        #[command(flatten)]
        input: Input,
        /// Gradient of the affine function, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grad: Vec<f64>,
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<f64>,
        /// Vertex function as `vertex,value` CSV, used instead of `--grad`.
        #[arg(long = "fn")]
        function: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        level: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Flat distance inside a shared complex: a Freudenthal grid box or the cells of an SCM file.
    Flatdist {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Current whose cells are the (k+1)-cells of the complex.
        #[arg(long, conflicts_with_all = ["lo", "hi", "res"])]
        complex: Option<PathBuf>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        lo: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        hi: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        res: Vec<usize>,
        /// Solve in exact rational arithmetic.
        #[arg(long)]
        exact: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Decompose a 1-current into oriented curves.
    Decompose {
        #[command(flatten)]
        input: Input,
        /// Split into vertex-simple curves.
        #[arg(long)]
        simple: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Smallest min-max values as CSV `k,lambda,residual`.
    Spectrum {
        #[command(flatten)]
        input: Input,
        #[arg(short = 'k', long = "count")]
        count: Option<usize>,
        /// Norm registry JSON for tagged cells.
        #[arg(long)]
        norms: Option<PathBuf>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Dirichlet energy and Rayleigh quotient of a vertex function.
    Energy {
        #[command(flatten)]
        input: Input,
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long)]
        norms: Option<PathBuf>,
    },
    /// Approximate local dilatation of a vertex function at a point.
    Apdil {
        #[command(flatten)]
        input: Input,
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        /// Largest radius; radii halve eight times.
        #[arg(long)]
        r0: Option<f64>,
        /// Threshold grid, comma separated and increasing.
        #[arg(long, value_delimiter = ',')]
        t_grid: Vec<f64>,
        #[arg(long)]
        samples: Option<usize>,
        #[arg(long)]
        density_tol: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// John ellipsoid of a symmetric norm ball.
    John {
        /// Norm registry JSON.
        #[arg(long)]
        norms: Option<PathBuf>,
        /// Only this registry entry.
        #[arg(long)]
        id: Option<String>,
        /// Built-in ball: linf:<n>, l1:<n> or polygon:<m>.
        #[arg(long)]
        ball: Option<String>,
        #[command(flatten)]
        out: Output,
    },
    /// Good cuts of a grid set given as JSON `{n, m, cells}`.
    Goodcuts {
        /// Grid set JSON `{n, m, cells}`.
        #[arg(long = "in", alias = "grid")]
        input: PathBuf,
        #[arg(long)]
        delta: Option<f64>,
        #[command(flatten)]
        out: Output,
    },
    /// Local Poincaré ratio of a vertex function on a patch.
    Poincare {
        #[command(flatten)]
        input: Input,
        #[arg(long = "fn")]
        function: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        x: Vec<f64>,
        #[arg(long)]
        r: Option<f64>,
        #[arg(long)]
        norms: Option<PathBuf>,
    },
    /// Scripted experiments writing JSON reports.
    #[command(subcommand)]
    Experiment(Experiment),
}

#[derive(Debug, Subcommand)]
pub enum Experiment {
    /// Pinching spline surfaces against the round sphere.
    Spline {
        #[arg(long, value_delimiter = ',')]
        eps: Vec<f64>,
        #[arg(long)]
        profile_resolution: Option<usize>,
        #[arg(long)]
        angular_resolution: Option<usize>,
        #[arg(long)]
        sphere_level: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Two cubes joined by a perforated sheet.
    Cancellation {
        #[arg(long, value_delimiter = ',')]
        j: Vec<u32>,
        #[arg(long)]
        resolution: Option<usize>,
        #[arg(short = 'k', long = "count")]
        count: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: Output,
    },
    /// Semicontinuity sweep over a built-in family.
    Sweep {
        /// spline, refined-sphere, translated-chains-in-complex or cancellation.
        #[arg(long)]
        family: Option<String>,
        #[arg(short = 'k', long = "count")]
        count: Option<usize>,
        #[arg(long)]
        slack_rel: Option<f64>,
        #[arg(long)]
        slack_abs: Option<f64>,
        #[arg(long)]
        burn_in: Option<usize>,
        #[command(flatten)]
        solver: SolverArgs,
        #[command(flatten)]
        out: Output,
    },
}

/// Parses `argv` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            2
        }
    }
}

struct Ctx {
    cfg: Config,
    seed: u64,
}

impl Ctx {
    fn pick<T: FromStr>(&self, cli: Option<T>, key: &str, default: T) -> Result<T> {
        match cli {
            Some(v) => Ok(v),
            None => Ok(self.cfg.value(key)?.unwrap_or(default)),
        }
    }

    fn require<T: FromStr>(&self, cli: Option<T>, key: &str) -> Result<T> {
        match cli {
            Some(v) => Ok(v),
            None => self
                .cfg
                .value(key)?
                .ok_or_else(|| Error::InvalidArgument(format!("missing --{key}"))),
        }
    }

    fn list<T: FromStr>(&self, cli: Vec<T>, key: &str, default: Vec<T>) -> Result<Vec<T>> {
        if !cli.is_empty() {
            return Ok(cli);
        }
        Ok(self.cfg.list(key)?.unwrap_or(default))
    }

    fn spectrum(&self, s: SolverArgs) -> Result<SpectrumOptions> {
        let d = SpectrumOptions::default();
        let method = match self.pick(s.method, "method", "auto".to_string())?.as_str() {
            "auto" => EigenMethod::Auto,
            "dense" => EigenMethod::Dense,
            "subspace" => EigenMethod::Subspace,
            other => return Err(Error::InvalidArgument(format!("unknown eigen method '{other}'"))),
        };
        Ok(SpectrumOptions {
            method,
            dense_threshold: self.pick(s.dense_threshold, "dense-threshold", d.dense_threshold)?,
            tol: self.pick(s.tol, "tol", d.tol)?,
            max_iter: self.pick(s.max_iter, "max-iter", d.max_iter)?,
            seed: self.seed,
        })
    }
}

fn load(path: &Path) -> Result<SimplicialCurrent> {
    read_scm(path).map_err(|e| with_path(path, e))
}

fn with_path(path: &Path, e: Error) -> Error {
    match e {
        Error::Io { .. } => e,
        other => Error::InvalidArgument(format!("{}: {other}", path.display())),
    }
}

fn load_norms(path: Option<&Path>) -> Result<Option<NormRegistry>> {
    path.map(|p| NormRegistry::read(p).map_err(|e| with_path(p, e))).transpose()
}

/// `vertex,value` rows; a non-numeric first row is a header.
pub fn read_function(path: &Path, n: usize) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(file);
    let mut values = vec![None; n];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.display())))?;
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        if rec.len() != 2 {
            return Err(bad(format!("expected 'vertex,value', got {} fields", rec.len())));
        }
        let (v, x) = match (rec[0].parse::<usize>(), rec[1].parse::<f64>()) {
            (Ok(v), Ok(x)) => (v, x),
            _ if i == 0 => continue,
            _ => return Err(bad(format!("cannot parse '{},{}'", &rec[0], &rec[1]))),
        };
        if v >= n {
            return Err(bad(format!("vertex {v} out of range (current has {n} vertices)")));
        }
        values[v] = Some(x);
    }
    values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::InvalidArgument(format!("{}: no value for vertex {i}", path.display()))))
        .collect()
}

fn emit(out: &Output, text: &str) -> Result<()> {
    match &out.out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
        }
    }
}

fn emit_json<T: Serialize>(out: &Output, value: &T) -> Result<()> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    emit(out, &s)
}

fn stdout() -> Output {
    Output { out: None }
}

fn builtin_ball(spec: &str) -> Result<NormBall> {
    let (kind, n) = spec
        .split_once(':')
        .ok_or_else(|| Error::InvalidArgument(format!("ball '{spec}' is not kind:size")))?;
    let n: usize = n
        .parse()
        .map_err(|_| Error::InvalidArgument(format!("ball size '{n}' is not an integer")))?;
    match kind {
        "linf" => Ok(NormBall::linf(n)),
        "l1" => Ok(NormBall::l1(n)),
        "polygon" => NormBall::polygon(n),
        _ => Err(Error::InvalidArgument(format!("unknown ball kind '{kind}'"))),
    }
}

fn ball_json(id: &str, b: &NormBall) -> serde_json::Value {
    let rows = |m: &nalgebra::DMatrix<f64>| -> Vec<Vec<f64>> {
        (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
    };
    let vecs = |v: &[nalgebra::DVector<f64>]| -> Vec<Vec<f64>> { v.iter().map(|g| g.iter().map(|x| x + 0.0).collect()).collect() };
    json!({
        "id": id,
        "dim": b.dim(),
        "generators": vecs(b.generators()),
        "facets": vecs(b.dual_generators()),
        "john_matrix": rows(b.john_matrix()),
        "dual_john_matrix": rows(b.dual_john_matrix()),
    })
}

fn execute(cli: Cli) -> Result<()> {
    let cfg = match &cli.config {
        Some(p) => Config::read(p).map_err(|e| with_path(p, e))?,
        None => Config::default(),
    };
    let seed = match cli.seed {
        Some(s) => s,
        None => cfg.value("seed")?.unwrap_or(SpectrumOptions::default().seed),
    };
    let ctx = Ctx { cfg, seed };
    match cli.command {
        Command::Mass(i) => {
            let t = load(&i.input)?;
            emit(&stdout(), &format!("{}\n", t.mass()))
        }
        Command::Boundary { input, out } => {
            let t = load(&input.input)?;
            emit(&out, &to_scm_string(&t.boundary()?))
        }
        Command::Slice {
            input,
            grad,
            offset,
            function,
            level,
            out,
        } => {
            let t = load(&input.input)?;
            let s = match function {
                Some(f) => {
                    let values = read_function(&f, t.vertices().len())?;
                    t.slice_by_values(&values, level)?
                }
                None => {
                    let grad = ctx.list(grad, "grad", Vec::new())?;
                    if grad.is_empty() {
                        return Err(Error::InvalidArgument("slice needs --grad or --fn".into()));
                    }
                    t.slice_by_affine(&grad, ctx.pick(offset, "offset", 0.0)?, level)?
                }
            };
            emit(&out, &to_scm_string(&s))
        }
        Command::Flatdist {
            a,
            b,
            complex,
            lo,
            hi,
            res,
            exact,
            out,
        } => {
            let (ta, tb) = (load(&a)?, load(&b)?);
            let complex = match complex {
                Some(path) => {
                    let c = FlatComplex::from_current(&load(&path)?).map_err(|e| with_path(&path, e))?;
                    if c.k() != ta.dim() {
                        return Err(Error::DimensionMismatch(format!(
                            "complex in {} has k = {}, the currents have dimension {}",
                            path.display(),
                            c.k(),
                            ta.dim()
                        )));
                    }
                    c
                }
                None => {
                    let lo = ctx.list(lo, "lo", Vec::new())?;
                    let hi = ctx.list(hi, "hi", Vec::new())?;
                    let res = ctx.list(res, "res", Vec::new())?;
                    if lo.is_empty() || hi.is_empty() || res.is_empty() {
                        return Err(Error::InvalidArgument("flatdist needs --complex or --lo, --hi and --res".into()));
                    }
                    grid_complex(&lo, &hi, &res, ta.dim())?
                }
            };
            let opts = FlatOptions {
                exact: exact || ctx.cfg.value("exact")?.unwrap_or(false),
                max_pivots: ctx.cfg.value("max-pivots")?,
            };
            let cert = flat_distance(&ta, &tb, &complex, opts)?;
            let verified = verify_certificate(&cert, &ta, &tb, &complex);
            emit_json(
                &out,
                &json!({
                    "value": cert.value,
                    "exact": cert.exact,
                    "fractional": cert.fractional,
                    "pivots": cert.pivots,
                    "integral_rounding_value": cert.rounding.value,
                    "u": cert.u,
                    "v": cert.v,
                    "verified": verified,
                    "k_cells": complex.k_cells().len(),
                    "k1_cells": complex.k1_cells().len(),
                }),
            )
        }
        Command::Decompose { input, simple, out } => {
            let t = load(&input.input)?;
            let simple = simple || ctx.cfg.value("simple")?.unwrap_or(false);
            let d = decompose_with(&t, DecomposeOptions { simple })?;
            emit_json(
                &out,
                &json!({
                    "curves": d.curves,
                    "open_count": d.open_count(),
                    "total_length": d.total_length(),
                    "mass": t.mass(),
                }),
            )
        }
        Command::Spectrum {
            input,
            count,
            norms,
            solver,
            out,
        } => {
            let t = load(&input.input)?;
            let k = ctx.pick(count, "count", 4)?;
            let reg = load_norms(norms.as_deref())?;
            let r = minmax_spectrum(&t, k, reg.as_ref(), &ctx.spectrum(solver)?)?;
            let mut s = String::from("k,lambda,residual\n");
            for (i, (l, res)) in r.eigenvalues.iter().zip(&r.residuals).enumerate() {
                s.push_str(&format!("{},{l:.12e},{res:.3e}\n", i + 1));
            }
            emit(&out, &s)
        }
        Command::Energy { input, function, norms } => {
            let t = load(&input.input)?;
            let f = read_function(&function, t.vertices().len())?;
            let reg = load_norms(norms.as_deref())?;
            let rq = match rayleigh_quotient(&t, &f, reg.as_ref()) {
                Ok(v) => Some(v),
                Err(Error::ZeroDenominator) => None,
                Err(e) => return Err(e),
            };
            emit_json(
                &stdout(),
                &json!({
                    "dirichlet_energy": dirichlet_energy(&t, &f, reg.as_ref())?,
                    "quadratic_energy": quadratic_energy(&t, &f, reg.as_ref())?,
                    "integral": integral(&t, &f),
                    "l2_norm_sq": l2_norm_sq(&t, &f),
                    "rayleigh_quotient": rq,
                }),
            )
        }
        Command::Apdil {
            input,
            function,
            x,
            r0,
            t_grid,
            samples,
            density_tol,
            out,
        } => {
            let t = load(&input.input)?;
            let f = read_function(&function, t.vertices().len())?;
            let x = ctx.list(x, "x", Vec::new())?;
            let r0 = ctx.pick(r0, "r0", 0.1)?;
            let grid = ctx.list(t_grid, "t-grid", (0..=100).map(|i| i as f64 * 0.05).collect())?;
            let d = ApdilOptions::default();
            let opts = ApdilOptions {
                density_tol: ctx.pick(density_tol, "density-tol", d.density_tol)?,
                samples_per_cell: ctx.pick(samples, "samples", d.samples_per_cell)?,
                tail: ctx.cfg.value("tail")?.unwrap_or(d.tail),
                seed: ctx.seed,
            };
            let radii = default_radii(r0);
            let est = estimate_apdil(&t, &f, &x, &radii, &grid, &opts)?;
            let dil = dilation_sup(&t, &f, &x, r0, opts.samples_per_cell, ctx.seed)?;
            emit_json(
                &out,
                &json!({
                    "apdil": est.value,
                    "saturated": est.saturated,
                    "dilation_sup": dil,
                    "radii": radii,
                    "t_grid": grid,
                    "densities": est.densities,
                    "density_tol": opts.density_tol,
                    "samples_per_cell": opts.samples_per_cell,
                    "seed": ctx.seed,
                }),
            )
        }
        Command::John { norms, id, ball, out } => {
            let ball = ball.or(ctx.cfg.get("ball").map(str::to_string));
            let report = match (norms, ball) {
                (Some(p), _) => {
                    let reg = NormRegistry::read(&p).map_err(|e| with_path(&p, e))?;
                    match id {
                        Some(id) => vec![ball_json(&id, reg.get(&id)?)],
                        None => reg.ids().map(|i| Ok(ball_json(i, reg.get(i)?))).collect::<Result<_>>()?,
                    }
                }
                (None, Some(spec)) => vec![ball_json(&spec, &builtin_ball(&spec)?)],
                (None, None) => return Err(Error::InvalidArgument("john needs --norms or --ball".into())),
            };
            emit_json(&out, &report)
        }
        Command::Goodcuts { input, delta, out } => {
            let text = std::fs::read_to_string(&input).map_err(|e| Error::io(&input, e))?;
            let grid: GridSet = serde_json::from_str(&text).map_err(|e| with_path(&input, e.into()))?;
            let delta = ctx.require(delta, "delta")?;
            emit_json(&out, &good_cuts(&grid, delta)?)
        }
        Command::Poincare {
            input,
            function,
            x,
            r,
            norms,
        } => {
            let t = load(&input.input)?;
            let f = read_function(&function, t.vertices().len())?;
            let x = ctx.list(x, "x", Vec::new())?;
            let r = ctx.require(r, "r")?;
            let reg = load_norms(norms.as_deref())?;
            emit_json(&stdout(), &poincare_ratio(&t, &f, &x, r, reg.as_ref())?)
        }
        Command::Experiment(e) => experiment(&ctx, e),
    }
}

fn experiment(ctx: &Ctx, e: Experiment) -> Result<()> {
    match e {
        Experiment::Spline {
            eps,
            profile_resolution,
            angular_resolution,
            sphere_level,
            solver,
            out,
        } => {
            let p = spline_params(ctx, eps, profile_resolution, angular_resolution, sphere_level, solver)?;
            emit_json(&out, &run_spline_experiment(&p)?)
        }
        Experiment::Cancellation {
            j,
            resolution,
            count,
            solver,
            out,
        } => {
            let p = cancellation_params(ctx, j, resolution, count, solver)?;
            emit_json(&out, &run_cancellation_experiment(&p)?)
        }
        Experiment::Sweep {
            family,
            count,
            slack_rel,
            slack_abs,
            burn_in,
            solver,
            out,
        } => {
            let fam: Family = ctx.require(family, "family")?.parse()?;
            let d = SweepParams::new(fam);
            let spectrum = ctx.spectrum(solver)?;
            let p = SweepParams {
                count: ctx.pick(count, "count", d.count)?,
                slack_rel: ctx.pick(slack_rel, "slack-rel", d.slack_rel)?,
                slack_abs: ctx.pick(slack_abs, "slack-abs", d.slack_abs)?,
                burn_in: match burn_in {
                    Some(b) => Some(b),
                    None => ctx.cfg.value("burn-in")?,
                },
                spline: spline_params(ctx, Vec::new(), None, None, None, SolverArgs::none())?,
                sphere_levels: ctx.list(Vec::new(), "sphere-levels", d.sphere_levels)?,
                shifts: ctx.list(Vec::new(), "shifts", d.shifts)?,
                loop_resolution: ctx.pick(None, "loop-resolution", d.loop_resolution)?,
                cancellation: cancellation_params(ctx, Vec::new(), None, None, SolverArgs::none())?,
                spectrum,
                family: fam,
            };
            emit_json(&out, &run_semicontinuity_sweep(&p)?)
        }
    }
}

impl SolverArgs {
    fn none() -> Self {
        SolverArgs {
            method: None,
            tol: None,
            max_iter: None,
            dense_threshold: None,
        }
    }
}

fn spline_params(
    ctx: &Ctx,
    eps: Vec<f64>,
    profile: Option<usize>,
    angular: Option<usize>,
    level: Option<usize>,
    solver: SolverArgs,
) -> Result<SplineParams> {
    let d = SplineParams::default();
    Ok(SplineParams {
        eps: ctx.list(eps, "eps", d.eps)?,
        profile_resolution: ctx.pick(profile, "profile-resolution", d.profile_resolution)?,
        angular_resolution: ctx.pick(angular, "angular-resolution", d.angular_resolution)?,
        sphere_level: ctx.pick(level, "sphere-level", d.sphere_level)?,
        spectrum: ctx.spectrum(solver)?,
    })
}

fn cancellation_params(
    ctx: &Ctx,
    j: Vec<u32>,
    resolution: Option<usize>,
    count: Option<usize>,
    solver: SolverArgs,
) -> Result<CancellationParams> {
    let d = CancellationParams::default();
    Ok(CancellationParams {
        j: ctx.list(j, "j", d.j)?,
        resolution: ctx.pick(resolution, "resolution", d.resolution)?,
        count: ctx.pick(count, "count", d.count)?,
        lp_max_voxels: ctx.pick(None, "lp-max-voxels", d.lp_max_voxels)?,
        spectrum: ctx.spectrum(solver)?,
    })
}
