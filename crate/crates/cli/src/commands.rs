//! Subcommands. Each has a flag struct (all optional, overlaid on the TOML
//! section of the same name) and a resolved config echoed in the manifest.

use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use bifurc_core::angle::Angle;
use bifurc_core::goldberg::{geometric_schedule, stretch_ray, SEED_POTENTIAL};
use bifurc_core::kneading::{cylinder_cover, kneading, verify_counting_bound};
use bifurc_core::measure::{
    empirical_from_roots, h_value, laplacian_density, laplacian_measure, theorem_normalization, weak_laplacian_pairing, Bump, GridField,
    GridSpec, Rect, GREEN_GRID_ITER,
};
use bifurc_core::misiurewicz::{Classification, MisiurewiczKind};
use bifurc_core::per::{solve_per, strict_preper_roots, RootSet, SolveOptions};
use bifurc_core::portrait::{validate_portrait, Cb0Sampler, CriticalPortrait};
use bifurc_core::unicritical::green_locus;
use bifurc_core::Complex64;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::config::{self, GlobalConfig, Manifest};
use crate::error::{exit, CliError};
use crate::formats;

#[derive(Debug, Parser)]
#[command(name = "bifurc", version, about = "Bifurcation measures of polynomial families")]
pub struct Cli {
    /// TOML config; keys of section [<command>] are overridden by flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "BIFURC_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, global = true)]
    pub precision_bits: Option<u32>,
    /// Manifest path (default: <out>/manifest.toml, else stderr).
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots of p_n − p_k with multiplicities, and the associated measure.
    PerRoots(PerRootsFlags),
    /// Convergence of the root measures to the bifurcation measure.
    Equidist(EquidistFlags),
    /// Rasters of G, h_n or the Laplacian density.
    Render(RenderFlags),
    /// Stretching ray of a critical portrait.
    Stretch(StretchFlags),
    /// Sample or validate critical portraits.
    Portrait(PortraitFlags),
    /// Kneading digits, cylinder covers and the counting bound.
    Kneading(KneadingFlags),
}

struct Ctx {
    file: toml::Table,
    global: GlobalConfig,
    manifest: Option<PathBuf>,
}

impl Ctx {
    fn manifest<T: Serialize>(&self, command: &str, cfg: &T) -> Result<String, CliError> {
        Manifest {
            command,
            version: config::VERSION,
            precision_bits: self.global.precision_bits,
            threads: rayon::current_num_threads(),
            config: cfg,
        }
        .to_toml()
    }

    fn emit_to<T: Serialize>(&self, command: &str, cfg: &T, path: &Path) -> Result<(), CliError> {
        fs::write(path, self.manifest(command, cfg)?)?;
        Ok(())
    }

    fn emit<T: Serialize>(&self, command: &str, cfg: &T, out_dir: Option<&Path>) -> Result<(), CliError> {
        let m = self.manifest(command, cfg)?;
        match config::manifest_target(self.manifest.as_deref(), out_dir) {
            Some(path) => fs::write(path, m)?,
            None => eprint!("# manifest\n{m}"),
        }
        Ok(())
    }
}

/// Parses args, sets up the worker pool and runs; returns the exit code.
pub fn run(cli: Cli) -> Result<i32, CliError> {
    let file = config::load_file(cli.config.as_deref())?;
    let global = config::resolve_global(&file, cli.threads, cli.precision_bits)?;
    if let Some(t) = global.threads {
        // A pool may already exist when run is called repeatedly in one process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    let ctx = Ctx { file, global, manifest: cli.manifest };
    match &cli.command {
        Command::PerRoots(f) => per_roots(&ctx, f),
        Command::Equidist(f) => equidist(&ctx, f),
        Command::Render(f) => render(&ctx, f),
        Command::Stretch(f) => stretch(&ctx, f),
        Command::Portrait(f) => portrait(&ctx, f),
        Command::Kneading(f) => kneading_cmd(&ctx, f),
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    Ok(BufWriter::new(File::create(path)?))
}

fn out_dir(dir: Option<&Path>) -> Result<Option<&Path>, CliError> {
    if let Some(d) = dir {
        fs::create_dir_all(d)?;
    }
    Ok(dir)
}

fn c_json(z: Complex64) -> serde_json::Value {
    json!([z.re, z.im])
}

fn rect(b: &[f64]) -> Result<Rect, CliError> {
    match b {
        [a, b, c, d] => Ok(Rect::new(*a, *b, *c, *d)?),
        _ => Err(CliError::Usage("bounds need 4 values: re_min,re_max,im_min,im_max".into())),
    }
}

fn grid_spec(bounds: &[f64], res: usize) -> Result<GridSpec, CliError> {
    if res < 2 {
        return Err(CliError::Usage(format!("resolution {res} too small (need ≥ 2)")));
    }
    Ok(GridSpec::new(rect(bounds)?, res, res)?)
}

/// Samples `f` on the grid with rows computed in parallel; the result does
/// not depend on the thread count.
pub fn par_grid<F: Fn(Complex64) -> f64 + Sync>(spec: GridSpec, f: F) -> GridField {
    let rows: Vec<Vec<f64>> = (0..spec.ny).into_par_iter().map(|j| (0..spec.nx).map(|i| f(spec.point(i, j))).collect()).collect();
    GridField::from_values(spec, rows.concat()).expect("row sizes match the spec")
}

// ---------------------------------------------------------------- per-roots

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PerRootsFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Keep only strictly preperiodic parameters.
    #[arg(long)]
    #[serde(skip_serializing_if = "std::ops::Not::not")]
    pub strict: bool,
    /// Output directory (roots.csv, measure.jsonl, manifest.toml); else CSV on stdout.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PerRootsConfig {
    #[serde(default = "two")]
    pub d: usize,
    pub n: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default = "root_tol")]
    pub tol: f64,
    #[serde(default = "root_seed")]
    pub seed: u64,
    #[serde(default)]
    pub strict: bool,
    #[serde(default)]
    pub out: Option<PathBuf>,
    /// Filled in: total mass normalization of measure.jsonl.
    #[serde(default)]
    pub normalization: Option<f64>,
}

fn two() -> usize {
    2
}
fn root_tol() -> f64 {
    1e-10
}
fn root_seed() -> u64 {
    SolveOptions::new(1e-10).seed
}

fn solve(d: usize, n: usize, k: usize, tol: f64, seed: u64) -> Result<RootSet, CliError> {
    let mut opts = SolveOptions::new(tol);
    opts.seed = seed;
    Ok(solve_per(d, n, k, &opts)?)
}

fn per_roots(ctx: &Ctx, flags: &PerRootsFlags) -> Result<i32, CliError> {
    let mut cfg: PerRootsConfig = config::resolve(&ctx.file, "per-roots", flags)?;
    let roots =
        if cfg.strict { strict_preper_roots(cfg.d, cfg.n, cfg.k, cfg.tol)? } else { solve(cfg.d, cfg.n, cfg.k, cfg.tol, cfg.seed)? };
    let norm = theorem_normalization(cfg.d, cfg.n, cfg.k, 1);
    cfg.normalization = Some(norm);
    let dir = out_dir(cfg.out.as_deref())?;
    match dir {
        Some(d) => {
            let mut w = create(&d.join("roots.csv"))?;
            formats::write_roots_csv(&mut w, &roots)?;
            w.flush()?;
            let mut w = create(&d.join("measure.jsonl"))?;
            formats::write_measure_jsonl(&mut w, &empirical_from_roots(&roots, norm)?)?;
            w.flush()?;
        }
        None => formats::write_roots_csv(&mut io::stdout().lock(), &roots)?,
    }
    ctx.emit("per-roots", &cfg, dir)?;
    if !roots.converged {
        eprintln!("warning: root solve not certified converged (max residual {:e})", roots.max_residual());
        return Ok(exit::UNDECIDED);
    }
    Ok(exit::OK)
}

// ---------------------------------------------------------------- equidist

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquidistMode {
    /// sup |h_n| over a grid for a sweep of n.
    Gap,
    /// Test-function discrepancy against a reference, and its decay rate.
    Rate,
    /// Total discrete-Laplacian mass of G.
    Mass,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct EquidistFlags {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode: Option<EquidistMode>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Comma-separated list of n.
    #[arg(long, value_delimiter = ',')]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<f64>>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub res: Option<usize>,
    /// Rate reference: `weak` (pairing with G) or `per:N`.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Output directory (series.csv, verdict.json, manifest.toml); else stdout.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct EquidistConfig {
    pub mode: EquidistMode,
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default)]
    pub n: Option<Vec<usize>>,
    #[serde(default)]
    pub bounds: Option<Vec<f64>>,
    #[serde(default)]
    pub res: Option<usize>,
    #[serde(default)]
    pub reference: Option<String>,
    /// Bumps as [re, im, radius].
    #[serde(default)]
    pub bumps: Option<Vec<[f64; 3]>>,
    #[serde(default = "root_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

/// Thresholds of the equidistribution checks.
pub mod thresholds {
    pub const GAP_SLACK: f64 = 1.10;
    pub const GAP_FACTOR: f64 = 4.0;
    pub const RATE_SLOPE: f64 = -0.7;
    pub const MASS_TOL: f64 = 0.02;
}

/// Bump test functions used by the rate check: radius 0.5 at −1, −0.2+0.7i, 0.3.
pub const RATE_BUMPS: [[f64; 3]; 3] = [[-1.0, 0.0, 0.5], [-0.2, 0.7, 0.5], [0.3, 0.0, 0.5]];

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Monotone within the slack, and the last value at most first/factor.
pub fn gap_verdict(sups: &[f64]) -> bool {
    let mono = sups.windows(2).all(|w| w[1] <= thresholds::GAP_SLACK * w[0]);
    mono && sups.len() >= 2 && sups[sups.len() - 1] <= sups[0] / thresholds::GAP_FACTOR
}

struct Report {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
    verdict: serde_json::Value,
}

fn write_report(rep: &Report, dir: Option<&Path>) -> Result<(), CliError> {
    let write_csv = |w: &mut dyn Write| -> Result<(), CliError> {
        let mut out = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(w);
        out.write_record(&rep.header).map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;
        for r in &rep.rows {
            out.write_record(r).map_err(|e| CliError::Io(io::Error::other(e.to_string())))?;
        }
        out.flush()?;
        Ok(())
    };
    match dir {
        Some(d) => {
            let mut w = create(&d.join("series.csv"))?;
            write_csv(&mut w)?;
            w.flush()?;
            fs::write(d.join("verdict.json"), format!("{}\n", rep.verdict))?;
        }
        None => {
            let stdout = io::stdout();
            let mut lock = stdout.lock();
            write_csv(&mut lock)?;
            writeln!(lock, "{}", rep.verdict)?;
        }
    }
    Ok(())
}

fn equidist(ctx: &Ctx, flags: &EquidistFlags) -> Result<i32, CliError> {
    let mut cfg: EquidistConfig = config::resolve(&ctx.file, "equidist", flags)?;
    let report = match cfg.mode {
        EquidistMode::Gap => {
            let ns = cfg.n.get_or_insert_with(|| vec![6, 8, 10, 12, 14]).clone();
            let bounds = cfg.bounds.get_or_insert_with(|| vec![-2.5, 1.5, -2.0, 2.0]).clone();
            let spec = grid_spec(&bounds, *cfg.res.get_or_insert(512))?;
            let (d, k) = (cfg.d, cfg.k);
            let mut rows = Vec::new();
            let mut sups = Vec::new();
            for &n in &ns {
                if n <= k {
                    return Err(CliError::Usage("need n > k".into()));
                }
                let (sup, flagged) = par_grid(spec, |c| h_value(d, n, k, c)).sup_abs();
                sups.push(sup);
                rows.push(vec![n.to_string(), format!("{sup:?}"), flagged.to_string()]);
            }
            let pass = gap_verdict(&sups);
            Report {
                header: vec!["n".into(), "sup_abs_h".into(), "flagged".into()],
                rows,
                verdict: json!({ "mode": "gap", "sups": sups, "pass": pass }),
            }
        }
        EquidistMode::Rate => {
            let ns = cfg.n.get_or_insert_with(|| (8..=14).collect()).clone();
            let reference = cfg.reference.get_or_insert_with(|| "per:17".into()).clone();
            let bumps: Vec<Bump> = cfg
                .bumps
                .get_or_insert(RATE_BUMPS.to_vec())
                .iter()
                .map(|b| Bump::new(Complex64::new(b[0], b[1]), b[2]))
                .collect::<Result<_, _>>()?;
            let (d, k, tol) = (cfg.d, cfg.k, cfg.tol);
            if ns.len() < 2 {
                return Err(CliError::Usage("rate needs at least two values of n".into()));
            }
            let ref_values: Vec<f64> = if reference == "weak" {
                if k != 0 {
                    return Err(CliError::Usage("weak reference needs k = 0".into()));
                }
                bumps.par_iter().map(|b| weak_laplacian_pairing(|c| green_locus(d, c, GREEN_GRID_ITER), b, 400, 400)).collect()
            } else if let Some(m) = reference.strip_prefix("per:") {
                let m: usize = m.parse().map_err(|_| CliError::Usage(format!("bad reference '{reference}'")))?;
                let roots = solve(d, m, k, tol, root_seed())?;
                let mu = empirical_from_roots(&roots, roots.total_multiplicity() as f64)?;
                bumps.iter().map(|b| mu.integrate(|z| b.value(z))).collect()
            } else {
                return Err(CliError::Usage(format!("reference must be 'weak' or 'per:N', got '{reference}'")));
            };
            let per_n: Vec<Result<Vec<f64>, CliError>> = ns
                .par_iter()
                .map(|&n| {
                    let roots = solve(d, n, k, tol, root_seed())?;
                    let mu = empirical_from_roots(&roots, roots.total_multiplicity() as f64)?;
                    Ok(bumps.iter().map(|b| mu.integrate(|z| b.value(z))).collect())
                })
                .collect();
            let mut rows = Vec::new();
            let mut logs = vec![Vec::new(); bumps.len()];
            for (&n, vals) in ns.iter().zip(per_n) {
                for (j, v) in vals?.into_iter().enumerate() {
                    let disc = (v - ref_values[j]).abs();
                    logs[j].push(disc.ln());
                    rows.push(vec![n.to_string(), j.to_string(), format!("{v:?}"), format!("{disc:?}")]);
                }
            }
            let x: Vec<f64> = ns.iter().map(|&n| (n as f64 - 1.0) * (d as f64).ln()).collect();
            let slopes: Vec<f64> = logs.iter().map(|y| ls_slope(&x, y)).collect();
            let pass = slopes.iter().all(|&s| s <= thresholds::RATE_SLOPE);
            Report {
                header: vec!["n".into(), "bump".into(), "integral".into(), "discrepancy".into()],
                rows,
                verdict: json!({ "mode": "rate", "reference": ref_values, "slopes": slopes, "pass": pass }),
            }
        }
        EquidistMode::Mass => {
            let bounds = cfg.bounds.get_or_insert_with(|| vec![-3.0, 3.0, -3.0, 3.0]).clone();
            let res = *cfg.res.get_or_insert(1024);
            let d = cfg.d;
            let lap = laplacian_measure(&par_grid(grid_spec(&bounds, res)?, |c| green_locus(d, c, GREEN_GRID_ITER)))?;
            let signed = lap.signed_mass();
            let pass = (signed - 1.0).abs() <= thresholds::MASS_TOL;
            Report {
                header: vec!["res".into(), "signed_mass".into(), "clipped_mass".into(), "negative_mass".into()],
                rows: vec![vec![
                    res.to_string(),
                    format!("{signed:?}"),
                    format!("{:?}", lap.measure.total_mass),
                    format!("{:?}", lap.negative_mass),
                ]],
                verdict: json!({ "mode": "mass", "signed_mass": signed, "clipped_mass": lap.measure.total_mass, "pass": pass }),
            }
        }
    };
    let dir = out_dir(cfg.out.as_deref())?;
    write_report(&report, dir)?;
    ctx.emit("equidist", &cfg, dir)?;
    Ok(exit::OK)
}

// ---------------------------------------------------------------- render

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Field {
    /// G(c) of z^d + c.
    Green,
    /// h_n(c).
    Gap,
    /// Signed discrete Laplacian density of G.
    Laplacian,
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct RenderFlags {
    #[arg(long, value_enum)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<Field>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<Vec<f64>>,
    /// Nodes per axis.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub res: Option<usize>,
    /// PGM output path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// Binary grid output path.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub grid: Option<PathBuf>,
    /// CSV output path (re, im, value).
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct RenderConfig {
    #[serde(default = "green")]
    pub field: Field,
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default = "ten")]
    pub n: usize,
    #[serde(default)]
    pub k: usize,
    #[serde(default = "render_bounds")]
    pub bounds: Vec<f64>,
    #[serde(default = "render_res")]
    pub res: usize,
    pub out: PathBuf,
    #[serde(default)]
    pub grid: Option<PathBuf>,
    #[serde(default)]
    pub csv: Option<PathBuf>,
    /// Filled in: the gray map.
    #[serde(default)]
    pub value_map: Option<[f64; 2]>,
}

fn green() -> Field {
    Field::Green
}
fn ten() -> usize {
    10
}
fn render_bounds() -> Vec<f64> {
    vec![-2.5, 1.5, -2.0, 2.0]
}
fn render_res() -> usize {
    512
}

fn render(ctx: &Ctx, flags: &RenderFlags) -> Result<i32, CliError> {
    let mut cfg: RenderConfig = config::resolve(&ctx.file, "render", flags)?;
    let spec = grid_spec(&cfg.bounds, cfg.res)?;
    let (d, n, k) = (cfg.d, cfg.n, cfg.k);
    if d < 2 {
        return Err(CliError::Usage("degree must be at least 2".into()));
    }
    let field = match cfg.field {
        Field::Green => par_grid(spec, |c| green_locus(d, c, GREEN_GRID_ITER)),
        Field::Gap => {
            if n <= k {
                return Err(CliError::Usage("need n > k".into()));
            }
            par_grid(spec, |c| h_value(d, n, k, c))
        }
        Field::Laplacian => laplacian_density(&par_grid(spec, |c| green_locus(d, c, GREEN_GRID_ITER)))?,
    };
    let map = formats::GrayMap::fit(&field);
    cfg.value_map = Some([map.lo, map.hi]);
    let mut w = create(&cfg.out)?;
    formats::write_pgm(&mut w, &field, &map)?;
    w.flush()?;
    if let Some(p) = &cfg.grid {
        let mut w = create(p)?;
        formats::write_grid(&mut w, &field)?;
        w.flush()?;
    }
    if let Some(p) = &cfg.csv {
        let mut w = create(p)?;
        formats::write_grid_csv(&mut w, &field)?;
        w.flush()?;
    }
    if ctx.manifest.is_some() {
        ctx.emit("render", &cfg, None)?;
    } else {
        ctx.emit_to("render", &cfg, &cfg.out.with_extension("manifest.toml"))?;
    }
    Ok(exit::OK)
}

// ---------------------------------------------------------------- stretch

/// Parses "1/6,2/3" (one set) or "1/6,2/3;1/3,5/6" (sets separated by ';').
pub fn parse_portrait(text: &str) -> Result<CriticalPortrait, CliError> {
    let mut sets = Vec::new();
    for set in text.split(';') {
        let angles = set.split(',').map(|a| Angle::parse(a.trim())).collect::<Result<Vec<_>, _>>()?;
        if angles.is_empty() {
            return Err(CliError::Usage("empty angle set".into()));
        }
        sets.push(angles);
    }
    Ok(CriticalPortrait::new(sets))
}

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct StretchFlags {
    /// Critical portrait, e.g. "1/12,7/12".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub portrait: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_hi: Option<f64>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_lo: Option<f64>,
    /// Schedule points per factor 10 in r.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_decade: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    /// Output directory (path.csv, verdict.json, manifest.toml); else verdict on stdout.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct StretchConfig {
    pub portrait: String,
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default = "seed_potential")]
    pub r_hi: f64,
    #[serde(default = "stretch_r_lo")]
    pub r_lo: f64,
    #[serde(default = "per_decade")]
    pub per_decade: usize,
    #[serde(default = "stretch_tol")]
    pub tol: f64,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

fn seed_potential() -> f64 {
    SEED_POTENTIAL
}
fn stretch_r_lo() -> f64 {
    1e-7
}
fn per_decade() -> usize {
    20
}
fn stretch_tol() -> f64 {
    1e-6
}

pub fn classification_json(c: &Classification) -> serde_json::Value {
    let kind = match c.kind {
        MisiurewiczKind::Misiurewicz => "misiurewicz",
        MisiurewiczKind::CriticallyFiniteHyperbolic => "critically-finite-hyperbolic",
        MisiurewiczKind::NotDetected => "not-detected",
    };
    let orbits: Vec<_> = c
        .orbits
        .iter()
        .map(|o| {
            json!({
                "critical_point": c_json(o.critical_point),
                "preperiod": o.preperiod,
                "period": o.period,
                "multiplier": o.multiplier.map(c_json),
                "cycle_point": o.cycle_point.map(c_json),
            })
        })
        .collect();
    json!({ "kind": kind, "orbits": orbits })
}

fn stretch(ctx: &Ctx, flags: &StretchFlags) -> Result<i32, CliError> {
    let cfg: StretchConfig = config::resolve(&ctx.file, "stretch", flags)?;
    let theta = parse_portrait(&cfg.portrait)?;
    if !(cfg.r_hi > cfg.r_lo && cfg.r_lo > 0.0) || cfg.per_decade == 0 {
        return Err(CliError::Usage("need r-hi > r-lo > 0 and per-decade ≥ 1".into()));
    }
    let schedule = geometric_schedule(cfg.r_hi, cfg.r_lo, cfg.per_decade);
    let res = stretch_ray(&theta, cfg.d, &schedule, cfg.tol)?;
    let landing = res.landing.as_ref().map(|p| {
        let mut v = json!({ "c": p.c.iter().map(|&z| c_json(z)).collect::<Vec<_>>(), "a": c_json(p.a) });
        if p.d == 2 {
            v["unicritical_c"] = c_json(p.a * p.a / 2.0);
        }
        v
    });
    let misiurewicz = res.classification.as_ref().is_some_and(|c| c.kind == MisiurewiczKind::Misiurewicz);
    let last = res.path.last().map(|s| json!({ "r": s.r, "coords": s.coords.iter().map(|&z| c_json(z)).collect::<Vec<_>>() }));
    let verdict = json!({
        "portrait": formats::portrait_json(&theta),
        "landed": res.landed,
        "tail": if res.tail.is_finite() { json!(res.tail) } else { serde_json::Value::Null },
        "steps": res.path.len(),
        "scheduled": schedule.len(),
        "last": last,
        "landing": landing,
        "misiurewicz": misiurewicz,
        "classification": res.classification.as_ref().map(classification_json),
        "message": res.message,
    });
    let dir = out_dir(cfg.out.as_deref())?;
    match dir {
        Some(d) => {
            let path: Vec<(f64, Vec<Complex64>)> = res.path.iter().map(|s| (s.r, s.coords.clone())).collect();
            let mut w = create(&d.join("path.csv"))?;
            formats::write_path_csv(&mut w, &path)?;
            w.flush()?;
            fs::write(d.join("verdict.json"), format!("{verdict}\n"))?;
        }
        None => println!("{verdict}"),
    }
    ctx.emit("stretch", &cfg, dir)?;
    Ok(if res.landed { exit::OK } else { exit::UNDECIDED })
}

// ---------------------------------------------------------------- portrait

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct PortraitFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Number of portraits to sample.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub sample: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Portrait to validate, as JSON ([["1/6","2/3"]]) or "1/6,2/3;...".
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validate: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct PortraitConfig {
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default)]
    pub sample: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub validate: Option<String>,
}

fn portrait(ctx: &Ctx, flags: &PortraitFlags) -> Result<i32, CliError> {
    let cfg: PortraitConfig = config::resolve(&ctx.file, "portrait", flags)?;
    if cfg.d < 2 {
        return Err(CliError::Usage("degree must be at least 2".into()));
    }
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match (&cfg.validate, cfg.sample) {
        (Some(text), None) => {
            let theta = if text.trim_start().starts_with('[') {
                let v: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Usage(e.to_string()))?;
                formats::parse_portrait_json(&v).map_err(|e| CliError::Usage(e.to_string()))?
            } else {
                parse_portrait(text)?
            };
            let v = validate_portrait(&theta, cfg.d);
            let verdict = json!({
                "portrait": formats::portrait_json(&theta),
                "valid": v.valid,
                "in_cb0": v.in_cb0,
                "exact": v.exact,
                "cardinality": [v.cardinality.0, v.cardinality.1],
                "unlinked": v.unlinked,
                "messages": v.messages,
            });
            writeln!(out, "{verdict}")?;
        }
        (None, Some(count)) => {
            let mut sampler = Cb0Sampler::new(cfg.d, cfg.seed);
            for _ in 0..count {
                writeln!(out, "{}", formats::portrait_json(&sampler.sample()?))?;
            }
        }
        _ => return Err(CliError::Usage("give exactly one of --sample N or --validate PORTRAIT".into())),
    }
    drop(out);
    ctx.emit("portrait", &cfg, None)?;
    Ok(exit::OK)
}

// ---------------------------------------------------------------- kneading

#[derive(Debug, Args, Serialize)]
#[serde(rename_all = "kebab-case")]
pub struct KneadingFlags {
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    /// Exact angle p/q.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<String>,
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    /// Print the cylinder cover of this 0/1 word as CSV.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cover: Option<String>,
    /// Check the counting bound for all words up to this length.
    #[arg(long)]
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counting: Option<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct KneadingConfig {
    #[serde(default = "two")]
    pub d: usize,
    #[serde(default = "one_usize")]
    pub k: usize,
    #[serde(default)]
    pub alpha: Option<String>,
    #[serde(default = "steps")]
    pub steps: usize,
    #[serde(default)]
    pub cover: Option<String>,
    #[serde(default)]
    pub counting: Option<usize>,
}

fn one_usize() -> usize {
    1
}
fn steps() -> usize {
    16
}

fn kneading_cmd(ctx: &Ctx, flags: &KneadingFlags) -> Result<i32, CliError> {
    let cfg: KneadingConfig = config::resolve(&ctx.file, "kneading", flags)?;
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match (&cfg.alpha, &cfg.cover, cfg.counting) {
        (Some(alpha), None, None) => {
            let r = kneading(&Angle::parse(alpha)?, cfg.d, cfg.k, cfg.steps)?;
            writeln!(out, "{}", json!({ "alpha": alpha, "word": r.word(), "digits": r.digits, "boundary_hit_at": r.boundary_hit_at }))?;
        }
        (None, Some(word), None) => formats::write_cover_csv(&mut out, &cylinder_cover(word, cfg.d, cfg.k)?)?,
        (None, None, Some(n_max)) => {
            let r = verify_counting_bound(cfg.d, cfg.k, n_max)?;
            let levels: Vec<_> = r
                .levels
                .iter()
                .map(|l| {
                    json!({
                        "n": l.n, "max_count": l.max_count, "max_count_word": l.max_count_word,
                        "max_length": l.max_length, "total_length": l.total_length, "count_bound": l.count_bound,
                    })
                })
                .collect();
            writeln!(
                out,
                "{}",
                json!({
                    "d": r.d, "k": r.k, "n_max": r.n_max, "constant": r.constant,
                    "dimension_estimate": r.dimension_estimate, "dimension_bound": r.dimension_bound,
                    "levels": levels, "violations": r.violations, "passed": r.passed,
                })
            )?;
        }
        _ => return Err(CliError::Usage("give exactly one of --alpha, --cover or --counting".into())),
    }
    drop(out);
    ctx.emit("kneading", &cfg, None)?;
    Ok(exit::OK)
}
