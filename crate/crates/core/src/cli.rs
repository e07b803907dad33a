//! Command-line front end. Commands compute every artifact in memory first and
//! only then write files, each through a temporary file and an atomic rename.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bergman::{boundary_moments, orthonormal_basis, MomentReport, COND_CAP_DEFAULT};
use crate::bounds::{krushkal_value, validate_domain, BoundReport, BOUND_TOL_DEFAULT};
use crate::conformal::{convexity_certificate, trace_boundary, ConvexityCertificate, SCMapSpec};
use crate::error::{Error, Result};
use crate::geometry::{build_domain, parse_number, preset, BoundaryMesh, DomainSpec, MeshRule, MAX_NODES_DEFAULT};
use crate::pipeline::{bergman_spectrum, deviation_table, nystrom_spectrum, BergmanConfig, DeviationRow, NystromConfig};
use crate::spectrum::{SpectrumResult, SCHEMA};
use crate::C64;

pub const THREADS_ENV: &str = "NPSPECTRA_THREADS";

#[derive(Parser, Debug)]
#[command(name = "npspectra", version, about = "Neumann-Poincare spectra of planar domains with corners")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Eigenvalues of the double layer operator.
    Spectrum(RunConfig),
    /// Angle bounds checked against a computed spectrum.
    Bounds(RunConfig),
    /// Boundary moments and the orthonormal polynomial basis.
    Moments(RunConfig),
    /// Trace a Schwarz-Christoffel map and certify convexity of its image.
    Map(MapConfig),
    /// Spectral radius along a one-parameter family of domains.
    Sweep(SweepConfig),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Nystrom,
    Bergman,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
pub struct Resolution {
    #[arg(long, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..=256))]
    pub panels: u32,
    /// Dyadic refinement levels at each corner (default 8 for Nystrom, 10 for Bergman, 0 if smooth).
    #[arg(long, value_parser = clap::value_parser!(u32).range(0..=24))]
    pub grading: Option<u32>,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u32).range(2..=32))]
    pub quad_order: u32,
    #[arg(long, default_value_t = 30, value_parser = clap::value_parser!(u32).range(1..=60))]
    pub degree: u32,
    /// Radial Gauss order of the area rule (default degree + 4).
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=80))]
    pub radial_order: Option<u32>,
}

impl Resolution {
    pub fn nystrom(&self) -> NystromConfig {
        NystromConfig {
            panels: self.panels as usize,
            grading: self.grading.map(|g| g as usize),
            quad_order: self.quad_order as usize,
            ..NystromConfig::default()
        }
    }

    pub fn bergman(&self) -> BergmanConfig {
        BergmanConfig {
            panels: self.panels as usize,
            grading: self.grading.map(|g| g as usize),
            quad_order: self.quad_order as usize,
            radial_order: self.radial_order.map(|r| r as usize),
            ..BergmanConfig::with_degree(self.degree as usize)
        }
    }
}

#[derive(Args, Clone, Debug)]
pub struct Output {
    /// Output file; several artifacts get the method or role inserted before the extension.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Args, Clone, Debug)]
pub struct RunConfig {
    /// Preset string (`square`, `ellipse:2,1`, `lens:pi/4,pi/5`), inline JSON or a JSON file.
    #[arg(long)]
    pub domain: String,
    #[arg(long, value_enum, default_value_t = MethodChoice::Nystrom)]
    pub method: MethodChoice,
    #[command(flatten)]
    pub resolution: Resolution,
    #[command(flatten)]
    pub output: Output,
    #[arg(long, default_value_t = BOUND_TOL_DEFAULT)]
    pub tol: f64,
}

#[derive(Args, Clone, Debug)]
pub struct MapConfig {
    /// Prevertex arguments on the unit circle, counter-clockwise, comma separated; the last goes to infinity.
    #[arg(long, allow_hyphen_values = true)]
    pub prevertices: String,
    /// Interior angles, the last one at infinity.
    #[arg(long)]
    pub angles: String,
    /// Radius of the traced circle `|w| = r`.
    #[arg(long, default_value_t = 0.999)]
    pub radius: f64,
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, default_value_t = 1e-12)]
    pub tol: f64,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    /// Rectangle of the given aspect ratio.
    Rectangle,
    /// Regular polygon with the given number of sides.
    Ngon,
    /// Truncated wedge with the given opening (radians).
    Wedge,
    /// Symmetric lens with the given vertex angle (radians).
    Lens,
}

#[derive(Args, Clone, Debug)]
pub struct SweepConfig {
    #[arg(long, value_enum, default_value_t = Family::Rectangle)]
    pub family: Family,
    #[arg(long, default_value = "1")]
    pub from: String,
    #[arg(long, default_value = "3")]
    pub to: String,
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u32).range(1..=200))]
    pub steps: u32,
    #[arg(long, value_enum, default_value_t = MethodChoice::Nystrom)]
    pub method: MethodChoice,
    #[command(flatten)]
    pub resolution: Resolution,
    #[command(flatten)]
    pub output: Output,
}

/// A file to be written, or standard output when `path` is `None`.
#[derive(Clone, Debug, PartialEq)]
pub struct Artifact {
    pub path: Option<PathBuf>,
    pub content: String,
}

/// Exit status for a failed run: 2 for bad input, 3 for numerical failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::Accuracy(_) => 3,
        Error::Io(_) => 1,
        _ => 2,
    }
}

/// Reads a domain from a file path, inline JSON or a preset string.
pub fn load_domain(source: &str) -> Result<DomainSpec> {
    let p = Path::new(source);
    if !source.contains(':') && p.is_file() {
        return build_domain(&std::fs::read_to_string(p)?);
    }
    build_domain(source)
}

/// `out.json` with `role` becomes `out.role.json`.
pub fn role_path(out: &Path, role: &str, ext: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    out.with_file_name(format!("{stem}.{role}.{ext}"))
}

fn seed_line(seed: u64) -> String {
    format!("# schema={SCHEMA} seed={seed}\n")
}

fn render_spectrum(r: &SpectrumResult, f: Format) -> String {
    match f {
        Format::Json => r.to_json() + "\n",
        Format::Csv => seed_line(r.seed.unwrap_or(0)) + &r.to_csv(),
    }
}

fn deviation_csv(rows: &[DeviationRow], seed: u64) -> String {
    let mut s = seed_line(seed);
    s.push_str("rank,nystrom,bergman,deviation\n");
    for r in rows {
        s.push_str(&format!("{},{:.17e},{:.17e},{:.3e}\n", r.rank, r.nystrom, r.bergman, r.deviation));
    }
    s
}

fn spectra(d: &DomainSpec, method: MethodChoice, res: &Resolution, seed: u64) -> Result<Vec<SpectrumResult>> {
    let mut out = Vec::new();
    if method != MethodChoice::Bergman {
        let mut r = nystrom_spectrum(d, &res.nystrom())?.spectrum.result;
        r.seed = Some(seed);
        out.push(r);
    }
    if method != MethodChoice::Nystrom {
        let mut r = bergman_spectrum(d, &res.bergman())?.spectrum;
        r.seed = Some(seed);
        out.push(r);
    }
    Ok(out)
}

#[derive(Serialize)]
struct Comparison<'a> {
    schema: &'static str,
    nystrom: &'a SpectrumResult,
    bergman: &'a SpectrumResult,
    deviation: &'a [DeviationRow],
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let d = load_domain(&cfg.domain)?;
    let seed = cfg.output.seed;
    let results = spectra(&d, cfg.method, &cfg.resolution, seed)?;
    let fmt = cfg.output.format;
    let ext = if fmt == Format::Json { "json" } else { "csv" };
    if results.len() == 1 {
        return Ok(vec![Artifact {
            path: cfg.output.out.clone(),
            content: render_spectrum(&results[0], fmt),
        }]);
    }
    let rows = deviation_table(&results[0], &results[1], 10);
    match &cfg.output.out {
        None if fmt == Format::Json => {
            let c = Comparison {
                schema: SCHEMA,
                nystrom: &results[0],
                bergman: &results[1],
                deviation: &rows,
            };
            Ok(vec![Artifact {
                path: None,
                content: serde_json::to_string_pretty(&c)? + "\n",
            }])
        }
        None => Ok(vec![Artifact {
            path: None,
            content: results.iter().map(|r| render_spectrum(r, fmt)).collect::<String>() + &deviation_csv(&rows, seed),
        }]),
        Some(out) => Ok(vec![
            Artifact {
                path: Some(role_path(out, "nystrom", ext)),
                content: render_spectrum(&results[0], fmt),
            },
            Artifact {
                path: Some(role_path(out, "bergman", ext)),
                content: render_spectrum(&results[1], fmt),
            },
            Artifact {
                path: Some(role_path(out, "deviation", "csv")),
                content: deviation_csv(&rows, seed),
            },
        ]),
    }
}

fn bound_report_csv(r: &BoundReport) -> String {
    let mut s = seed_line(r.seed.unwrap_or(0));
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.17e}")).unwrap_or_default();
    s.push_str("quantity,value\n");
    s.push_str(&format!("kuhnau_lower,{:.17e}\n", r.kuhnau_lower));
    s.push_str(&format!("essbound_upper,{}\n", opt(r.essbound_upper)));
    s.push_str(&format!("condition_satisfied,{}\n", r.condition_satisfied));
    s.push_str(&format!("computed_radius,{}\n", opt(r.computed_radius)));
    for v in &r.verdicts {
        s.push_str(&format!("{}_passed,{}\n{}_margin,{:.6e}\n", v.name, v.passed, v.name, v.margin));
    }
    s
}

/// Computes the spectra requested by `cfg` and evaluates the angle bounds.
pub fn bound_report(cfg: &RunConfig) -> Result<BoundReport> {
    let d = load_domain(&cfg.domain)?;
    let results = spectra(&d, cfg.method, &cfg.resolution, cfg.output.seed)?;
    let refs: Vec<&SpectrumResult> = results.iter().collect();
    let mut rep = validate_domain(&d, &refs, cfg.tol)?;
    rep.seed = Some(cfg.output.seed);
    Ok(rep)
}

pub fn cmd_bounds(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let rep = bound_report(cfg)?;
    let content = match cfg.output.format {
        Format::Json => rep.to_json() + "\n",
        Format::Csv => bound_report_csv(&rep),
    };
    Ok(vec![Artifact {
        path: cfg.output.out.clone(),
        content,
    }])
}

pub fn cmd_moments(cfg: &RunConfig) -> Result<Vec<Artifact>> {
    let d = load_domain(&cfg.domain)?.centered();
    let bc = cfg.resolution.bergman();
    let grading = bc.grading.unwrap_or(if d.is_smooth() { 0 } else { 10 });
    let mesh = BoundaryMesh::build(&d, bc.panels, grading, bc.quad_order, MeshRule::Gauss, MAX_NODES_DEFAULT)?;
    let moments = boundary_moments(&mesh, bc.degree)?;
    let basis = orthonormal_basis(&moments, COND_CAP_DEFAULT)?;
    let rep = MomentReport::new(moments, basis);
    let content = match cfg.output.format {
        Format::Json => {
            let mut v = serde_json::to_value(&rep)?;
            v["seed"] = cfg.output.seed.into();
            serde_json::to_string_pretty(&v)? + "\n"
        }
        Format::Csv => {
            let mut s = seed_line(cfg.output.seed);
            s.push_str("m,n,re,im\n");
            for (m, row) in rep.moments.mu.iter().enumerate() {
                for (n, v) in row.iter().enumerate() {
                    s.push_str(&format!("{m},{n},{:.17e},{:.17e}\n", v.re, v.im));
                }
            }
            s
        }
    };
    Ok(vec![Artifact {
        path: cfg.output.out.clone(),
        content,
    }])
}

fn parse_list(field: &str, s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| parse_number(field, t)).collect()
}

#[derive(Serialize)]
pub struct MapReport {
    pub schema: &'static str,
    pub spec: SCMapSpec,
    pub certificate: ConvexityCertificate,
    /// Largest Fredholm eigenvalue `1 - theta_min / pi`, given only when convexity is certified.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub krushkal_value: Option<f64>,
    /// Pole of the inversion `z -> 1 / (z - z0)` used for the bounded image.
    pub inversion_centre: [f64; 2],
    pub seed: u64,
}

pub fn cmd_map(cfg: &MapConfig) -> Result<Vec<Artifact>> {
    let args = parse_list("prevertices", &cfg.prevertices)?;
    let angles = parse_list("angles", &cfg.angles)?;
    let spec = SCMapSpec::new(args.iter().map(|a| C64::from_polar(1.0, *a)).collect(), angles)?;
    let certificate = convexity_certificate(&spec, cfg.grid)?;
    let krushkal = if certificate.holds {
        Some(krushkal_value(&spec.angles)?)
    } else {
        None
    };
    let trace = trace_boundary(&spec, cfg.radius, cfg.points, cfg.tol)?;
    let z0 = spec.exterior_point(cfg.tol)?;
    let mut csv = seed_line(cfg.output.seed);
    csv.push_str("k,x,y,bounded_x,bounded_y\n");
    for (k, z) in trace.iter().enumerate() {
        let b = 1.0 / (z - z0);
        csv.push_str(&format!("{k},{:.17e},{:.17e},{:.17e},{:.17e}\n", z.re, z.im, b.re, b.im));
    }
    let rep = MapReport {
        schema: SCHEMA,
        spec,
        certificate,
        krushkal_value: krushkal,
        inversion_centre: [z0.re, z0.im],
        seed: cfg.output.seed,
    };
    let json = serde_json::to_string_pretty(&rep)? + "\n";
    Ok(match &cfg.output.out {
        None => vec![Artifact {
            path: None,
            content: if cfg.output.format == Format::Json { json } else { csv },
        }],
        Some(out) => vec![
            Artifact {
                path: Some(role_path(out, "trace", "csv")),
                content: csv,
            },
            Artifact {
                path: Some(role_path(out, "certificate", "json")),
                content: json,
            },
        ],
    })
}

/// Domain of `family` at parameter `t`.
pub fn family_member(family: Family, t: f64) -> Result<DomainSpec> {
    match family {
        Family::Rectangle => preset("rectangle", &[t, 1.0]),
        Family::Ngon => {
            if t.fract() != 0.0 {
                return Err(Error::Input(format!("polygon side count must be an integer, got {t}")));
            }
            preset("regular_ngon", &[t, 1.0])
        }
        Family::Wedge => preset("truncated_wedge", &[t, 0.5]),
        Family::Lens => preset("lens", &[t, t]),
    }
}

pub fn sweep_parameters(cfg: &SweepConfig) -> Result<Vec<f64>> {
    let a = parse_number("from", &cfg.from)?;
    let b = parse_number("to", &cfg.to)?;
    let n = cfg.steps as usize;
    if n == 1 {
        return Ok(vec![a]);
    }
    let mut ts: Vec<f64> = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
    if cfg.family == Family::Ngon {
        ts.iter_mut().for_each(|t| *t = t.round());
        ts.dedup();
    }
    Ok(ts)
}

pub fn cmd_sweep(cfg: &SweepConfig) -> Result<Vec<Artifact>> {
    let mut csv = seed_line(cfg.output.seed);
    csv.push_str("parameter,method,spectral_radius,kuhnau_lower,essbound_upper\n");
    for t in sweep_parameters(cfg)? {
        let d = family_member(cfg.family, t)?;
        let results = spectra(&d, cfg.method, &cfg.resolution, cfg.output.seed)?;
        for r in &results {
            let rep = validate_domain(&d, &[r], BOUND_TOL_DEFAULT)?;
            let ess = rep.essbound_upper.map(|v| format!("{v:.17e}")).unwrap_or_default();
            csv.push_str(&format!(
                "{t:.17e},{},{:.17e},{:.17e},{ess}\n",
                r.method, r.spectral_radius, rep.kuhnau_lower
            ));
        }
    }
    Ok(vec![Artifact {
        path: cfg.output.out.clone(),
        content: csv,
    }])
}

pub fn run(cli: &Cli) -> Result<Vec<Artifact>> {
    match &cli.command {
        Command::Spectrum(c) => cmd_spectrum(c),
        Command::Bounds(c) => cmd_bounds(c),
        Command::Moments(c) => cmd_moments(c),
        Command::Map(c) => cmd_map(c),
        Command::Sweep(c) => cmd_sweep(c),
    }
}

/// Writes `content` next to `path` and renames it into place.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(content.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn write_artifacts(artifacts: &[Artifact]) -> Result<()> {
    for a in artifacts {
        match &a.path {
            Some(p) => write_atomic(p, &a.content)?,
            None => std::io::stdout().write_all(a.content.as_bytes())?,
        }
    }
    Ok(())
}

/// Applies `NPSPECTRA_THREADS` to the global worker pool.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::Input(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::Input(e.to_string()))?;
    }
    Ok(())
}

/// Parses, runs and writes; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let outcome = configure_threads().and_then(|_| run(&cli)).and_then(|a| write_artifacts(&a));
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("npspectra: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("npspectra").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_parse() {
        let cli = parse(&["spectrum", "--domain", "ellipse:2,1", "--method", "both", "--panels", "12", "--quad-order", "8"]);
        match cli.command {
            Command::Spectrum(c) => {
                assert_eq!(c.method, MethodChoice::Both);
                assert_eq!(c.resolution.panels, 12);
                assert_eq!(c.resolution.quad_order, 8);
                assert_eq!(c.output.seed, 0);
            }
            _ => panic!("wrong subcommand"),
        }
        assert!(Cli::try_parse_from(["npspectra", "spectrum", "--domain", "disk", "--degree", "99"]).is_err());
    }

    #[test]
    fn role_paths() {
        assert_eq!(role_path(Path::new("a/b.json"), "nystrom", "json"), PathBuf::from("a/b.nystrom.json"));
        assert_eq!(role_path(Path::new("out"), "trace", "csv"), PathBuf::from("out.trace.csv"));
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::Input("x".into())), 2);
        assert_eq!(exit_code(&Error::parse("domain", "x")), 2);
        assert_eq!(exit_code(&Error::Numerical("x".into())), 3);
        assert_eq!(main_with_args(["npspectra", "spectrum", "--domain", "nonsense"]), 2);
    }

    #[test]
    fn disk_bounds_are_zero() {
        let cli = parse(&["bounds", "--domain", "disk", "--panels", "16"]);
        let Command::Bounds(c) = cli.command else { panic!() };
        let rep = bound_report(&c).unwrap();
        assert_eq!(rep.kuhnau_lower, 0.0);
        assert!(rep.essbound_upper.is_none());
        assert!(rep.computed_radius.unwrap() < 1e-6);
        assert!(rep.passed());
        assert_eq!(rep.seed, Some(0));
    }

    #[test]
    fn lens_bounds_report_essbound() {
        let cli = parse(&["bounds", "--domain", "lens:pi/4,pi/5", "--panels", "8", "--grading", "6"]);
        let Command::Bounds(c) = cli.command else { panic!() };
        let rep = bound_report(&c).unwrap();
        assert!(rep.condition_satisfied);
        assert!((rep.essbound_upper.unwrap() - 0.8).abs() < 1e-12);
    }

    #[test]
    fn map_reports_krushkal_for_convex_images() {
        let cli = parse(&["map", "--prevertices", "0,pi", "--angles", "pi/2,pi/2", "--points", "64", "--grid", "128"]);
        let Command::Map(c) = cli.command else { panic!() };
        let a = cmd_map(&c).unwrap();
        let v: serde_json::Value = serde_json::from_str(&a[0].content).unwrap();
        assert_eq!(v["certificate"]["holds"], true);
        assert!((v["krushkal_value"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn sweep_rows_per_parameter() {
        let cli = parse(&["sweep", "--family", "ngon", "--from", "4", "--to", "6", "--steps", "3", "--panels", "4", "--grading", "4"]);
        let Command::Sweep(c) = cli.command else { panic!() };
        assert_eq!(sweep_parameters(&c).unwrap(), vec![4.0, 5.0, 6.0]);
        let a = cmd_sweep(&c).unwrap();
        assert_eq!(a[0].content.lines().count(), 2 + 3);
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.json");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
