//! The `interface-lab` command line.
//!
//! Exit codes: 0 on success, 1 on a domain error (glancing covector, invalid
//! material, unreachable phase, failed selftest), 2 on a usage error (bad flags,
//! unreadable or unwritable paths).

pub mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use interface_lab::interface::{angle_scan, case_of, solve, Amplitude, AmplitudeSet, Case, Component, Direction, Incident};
use interface_lab::inverse::{
    estimate_interface_radius, forward_table, invert_direct_profile, invert_fluid_speed, KnownSolid, TravelTimeRecord,
};
use interface_lab::media::{Model, RadialModel};
use interface_lab::microlocal::{classify, BoundaryCovector, FluidRegion, SolidRegion, DEFAULT_EPS_G};
use interface_lab::rays::{trace_tree, Mode, Phase, TracerConfig};
use interface_lab::scholte::scholte_kernel_mode;
use interface_lab::symbols::{acoustic_dtn_symbol, potential_map_symbol, traction_map_symbol, Flavor, SymbolKind};
use interface_lab::C64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use output::{Recovery, Regions, ScholteOut, Solution, TableRow, TraceOut};

pub const THREADS_ENV: &str = "INTERFACE_LAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "interface-lab", version, about = "Solid-fluid interface waves: amplitudes, Scholte modes, rays and travel-time inversion")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Write results to this path instead of standard output.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write a JSON run manifest to this path.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Subcommand, Serialize)]
pub enum Command {
    /// Region of a boundary covector on each side of the interface.
    Classify(ClassifyArgs),
    /// Reflection and transmission amplitudes at one covector.
    Solve(SolveArgs),
    /// Amplitudes against incidence angle, as CSV.
    Scan(ScanArgs),
    /// Scholte speed and interface mode.
    Scholte(ModelArgs),
    /// Branching ray from the surface source.
    Trace(TraceArgs),
    /// Forward first-arrival travel-time table, as CSV.
    Table(TableArgs),
    /// Recover a speed profile from a travel-time table.
    Invert(InvertArgs),
    /// Run the invariant suite and print a pass/fail table.
    Selftest(SelftestArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// Model JSON file.
    #[arg(long)]
    pub model: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CovectorArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub xi1: f64,
    #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
    pub xi2: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub tau: f64,
}

impl CovectorArgs {
    fn covector(&self) -> BoundaryCovector {
        BoundaryCovector::new(self.xi1, self.xi2, self.tau)
    }
}

#[derive(Debug, Args, Serialize)]
pub struct ClassifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub covector: CovectorArgs,
    /// Relative width of the glancing sets.
    #[arg(long, default_value_t = DEFAULT_EPS_G)]
    pub eps_g: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub covector: CovectorArgs,
    /// `auto` or one of HH, MH, EH, HE, ME, EE; an explicit case must match the covector.
    #[arg(long, default_value = "auto")]
    pub case: String,
    /// Incoming amplitudes as `name=value`, e.g. `b2s=1+0i`; repeat or separate with commas.
    #[arg(long, value_delimiter = ',', value_parser = parse_incoming)]
    pub incoming: Vec<(Component, Complex)>,
    /// Write the principal symbol matrices at the covector to this CSV.
    #[arg(long)]
    pub dump_symbols: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct ScanArgs {
    /// Model JSON file; the canonical material when omitted.
    #[arg(long)]
    pub model: Option<PathBuf>,
    /// Incident wave: p, sv, sh or f.
    #[arg(long, value_parser = parse_incident)]
    pub mode: Incident,
    /// Incidence angles in degrees as `start:stop:step` or a comma list.
    #[arg(long, value_parser = parse_range)]
    pub angles: Grid,
    #[arg(long, allow_hyphen_values = true, default_value_t = -1.0)]
    pub tau: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct TraceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Initial mode: P, S (SV), SH.
    #[arg(long, value_parser = parse_mode)]
    pub mode: Mode,
    /// Takeoff angle from the inward normal, degrees.
    #[arg(long)]
    pub takeoff: f64,
    #[arg(long, default_value_t = 4)]
    pub max_events: usize,
    #[command(flatten)]
    pub tracer: TracerArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct TracerArgs {
    /// Local error tolerance of the ray integrator.
    #[arg(long, default_value_t = TracerConfig::default().tol)]
    pub tol: f64,
}

impl TracerArgs {
    fn config(&self) -> TracerConfig {
        TracerConfig { tol: self.tol, ..TracerConfig::default() }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct TableArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Phases, e.g. `S->F->S,S->S,P`.
    #[arg(long, value_delimiter = ',', default_value = "S->F->S,S->S")]
    pub phases: Vec<String>,
    /// Epicentral distances in degrees as `start:stop:step` or a comma list.
    #[arg(long, value_parser = parse_range, default_value = "2:178:2")]
    pub deltas: Grid,
    #[command(flatten)]
    pub tracer: TracerArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct InvertArgs {
    /// Model JSON file holding the known solid profiles.
    #[command(flatten)]
    pub model: ModelArgs,
    /// Travel-time CSV with columns delta_deg, phase, time, takeoff_deg.
    #[arg(long)]
    pub table: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SelftestArgs {
    /// Random draws per case.
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
}

/// Complex value parsed from forms like `1+0i`, `-2.5i` or `3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex> for C64 {
    fn from(c: Complex) -> Self {
        C64::new(c.re, c.im)
    }
}

/// Ordered list of grid values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Grid(pub Vec<f64>);

fn parse_incoming(s: &str) -> Result<(Component, Complex), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected name=value, got `{s}`"))?;
    let c = Component::parse(name.trim()).ok_or_else(|| format!("unknown amplitude `{name}` (b1s, b2s, bp, bf)"))?;
    let z: C64 = value.trim().parse().map_err(|_| format!("invalid complex number `{value}`"))?;
    Ok((c, Complex { re: z.re, im: z.im }))
}

fn parse_incident(s: &str) -> Result<Incident, String> {
    Incident::parse(s).ok_or_else(|| format!("unknown incident mode `{s}` (p, sv, sh, f)"))
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    Mode::parse(s).ok_or_else(|| format!("unknown mode `{s}` (P, S, SH)"))
}

/// `start:stop:step` (stop included when it lies on the grid) or `a,b,c`.
pub fn parse_range(s: &str) -> Result<Grid, String> {
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("invalid number `{t}`"));
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [a, b, h] => {
            let (a, b, h) = (num(a)?, num(b)?, num(h)?);
            if h.is_nan() || h <= 0.0 || b < a {
                return Err(format!("range `{s}` needs start <= stop and step > 0"));
            }
            let n = ((b - a) / h + 1e-9).floor() as usize;
            Ok(Grid((0..=n).map(|k| a + k as f64 * h).collect()))
        }
        [_] => Ok(Grid(s.split(',').map(num).collect::<Result<_, _>>()?)),
        _ => Err(format!("expected start:stop:step or a comma list, got `{s}`")),
    }
}

/// Provenance of one invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// SHA-256 of the parsed arguments and the contents of every input file.
    pub config_hash: String,
    pub version: String,
    pub seed: u64,
    pub started_unix: f64,
    pub finished_unix: f64,
}

/// Failure of a run, mapped onto the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Domain(anyhow::Error),
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Domain(_) => 1,
            Failure::Usage(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Usage(e) | Failure::Domain(e) => write!(f, "{e:#}"),
        }
    }
}

impl From<interface_lab::Error> for Failure {
    fn from(e: interface_lab::Error) -> Self {
        Failure::Domain(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn domain(msg: String) -> Failure {
    Failure::Domain(anyhow::anyhow!(msg))
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display())).map_err(usage)
}

fn load_model(path: &Path) -> Result<Model, Failure> {
    Ok(Model::from_json(&read(path)?)?)
}

fn radial(model: &Model) -> Result<&RadialModel, Failure> {
    model.radial.as_ref().ok_or_else(|| domain("invalid model: no radial section".into()))
}

fn json<T: Serialize>(x: &T) -> String {
    let mut s = serde_json::to_string_pretty(x).expect("output types serialize");
    s.push('\n');
    s
}

fn csv_string(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())).map_err(usage),
        None => std::io::stdout().write_all(text.as_bytes()).context("cannot write to stdout").map_err(usage),
    }
}

fn incoming_set(pairs: &[(Component, Complex)]) -> AmplitudeSet {
    let mut set = AmplitudeSet::default();
    for &(c, z) in pairs {
        set.set(c, Amplitude { value: z.into(), dir: Direction::In });
    }
    set
}

fn symbol_rows(cov: &BoundaryCovector, model: &Model) -> Result<Vec<Vec<String>>, Failure> {
    let mat = &model.material;
    let label = classify(cov, mat, DEFAULT_EPS_G)?;
    let solid_flavors: &[Flavor] = match label.solid {
        SolidRegion::Hyperbolic => &[Flavor::Outgoing, Flavor::Incoming],
        SolidRegion::Mixed => &[Flavor::MixedOutgoing, Flavor::MixedIncoming],
        _ => &[Flavor::Evanescent],
    };
    let fluid_flavors: &[Flavor] = match label.fluid {
        FluidRegion::Hyperbolic => &[Flavor::Outgoing, Flavor::Incoming],
        _ => &[Flavor::Evanescent],
    };
    let name = |f: Flavor| serde_json::to_value(f).expect("flavor serializes").as_str().unwrap_or_default().to_string();
    let mut rows = Vec::new();
    let mut push = |sym: &str, flavor: Flavor, i: usize, j: usize, z: C64| {
        rows.push(vec![sym.into(), name(flavor), i.to_string(), j.to_string(), z.re.to_string(), z.im.to_string()]);
    };
    for &f in solid_flavors {
        let u = potential_map_symbol(SymbolKind::solid(f), cov, mat)?;
        let m = traction_map_symbol(SymbolKind::solid(f), cov, mat)?;
        for (sym, s) in [("U", &u), ("M", &m)] {
            for i in 0..s.entries.nrows() {
                for j in 0..s.entries.ncols() {
                    push(sym, f, i, j, s.entries[(i, j)]);
                }
            }
        }
    }
    for &f in fluid_flavors {
        push("Lambda", f, 0, 0, acoustic_dtn_symbol(f, cov, mat)?);
    }
    Ok(rows)
}

fn records_from_csv(text: &str) -> Result<Vec<TravelTimeRecord>, Failure> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    rdr.deserialize::<TableRow>()
        .map(|r| {
            let r = r.context("malformed travel-time table").map_err(usage)?;
            Ok(TravelTimeRecord { src_deg: 0.0, rcv_deg: r.delta_deg, phase: r.phase, time: r.time, takeoff_deg: r.takeoff_deg })
        })
        .collect()
}

fn invert(args: &InvertArgs) -> Result<Recovery, Failure> {
    let model = load_model(&args.model.model)?;
    let rm = radial(&model)?;
    let records = records_from_csv(&read(&args.table)?)?;
    let solid = KnownSolid::from_model(rm);
    let refracted = |r: &&TravelTimeRecord| Phase::parse(&r.phase).is_ok_and(|p| p.enters_fluid());
    let n_fluid = records.iter().filter(refracted).count();
    if n_fluid > 0 {
        let rc = estimate_interface_radius(&records, &solid)?;
        let mut report = invert_fluid_speed(&records, &solid, rc)?;
        if let Some(truth) = &rm.c_f {
            report = report.with_truth(truth);
        }
        Ok(Recovery { method: "fluid".into(), records_used: n_fluid, report })
    } else {
        let n = records.iter().filter(|r| r.phase == "P").count();
        let report = invert_direct_profile(&records, "P", rm.r_outer, rm.c_p.value(rm.r_outer))?;
        Ok(Recovery { method: "direct".into(), records_used: n, report: report.with_truth(&rm.c_p) })
    }
}

/// Runs one command and returns the text written to the output.
pub fn execute(cli: &Cli) -> Result<String, Failure> {
    match &cli.command {
        Command::Classify(a) => {
            let model = load_model(&a.model.model)?;
            Ok(json(&Regions::from(classify(&a.covector.covector(), &model.material, a.eps_g)?)))
        }
        Command::Solve(a) => {
            let model = load_model(&a.model.model)?;
            let cov = a.covector.covector();
            if a.case != "auto" {
                let want = Case::parse(&a.case).ok_or_else(|| usage(anyhow::anyhow!("unknown case `{}`", a.case)))?;
                let got = case_of(&cov, &model.material)?.case;
                if got != want {
                    return Err(domain(format!("region mismatch: covector lies in {got}, not {want}")));
                }
            }
            if let Some(path) = &a.dump_symbols {
                let rows = symbol_rows(&cov, &model)?;
                emit(Some(path), &csv_string(&["symbol", "flavor", "row", "col", "re", "im"], rows))?;
            }
            let inc = incoming_set(&a.incoming);
            Ok(json(&Solution::new(&inc, &solve(&cov, &model.material, &inc)?)))
        }
        Command::Scan(a) => {
            let mat = match &a.model {
                Some(p) => load_model(p)?.material,
                None => interface_lab::canonical_material(),
            };
            let rows = angle_scan(&mat, a.mode, &a.angles.0, a.tau);
            Ok(csv_string(&output::SCAN_HEADER, rows.iter().map(output::scan_record)))
        }
        Command::Scholte(a) => {
            let model = load_model(&a.model)?;
            Ok(json(&ScholteOut::from(&scholte_kernel_mode(&model.material)?)))
        }
        Command::Trace(a) => {
            let model = load_model(&a.model.model)?;
            let tree = trace_tree(radial(&model)?, a.mode, a.takeoff.to_radians(), a.max_events, &a.tracer.config())?;
            Ok(json(&TraceOut::new(a.mode, a.takeoff, &tree)))
        }
        Command::Table(a) => {
            let model = load_model(&a.model.model)?;
            let phases: Vec<&str> = a.phases.iter().map(|p| p.trim()).collect();
            let table = forward_table(radial(&model)?, &a.deltas.0, &phases, &a.tracer.config())?;
            for o in &table.omitted {
                log::info!("omitted {} at {} deg: {}", o.phase, o.delta_deg, o.reason);
            }
            let rows = table.records.iter().map(|r| {
                vec![r.rcv_deg.to_string(), r.phase.clone(), r.time.to_string(), r.takeoff_deg.to_string()]
            });
            Ok(csv_string(&["delta_deg", "phase", "time", "takeoff_deg"], rows))
        }
        Command::Invert(a) => Ok(json(&invert(a)?)),
        Command::Selftest(a) => {
            let rows = interface_lab::selftest::run(cli.seed, a.samples);
            let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0);
            let mut text = String::new();
            for r in &rows {
                let tag = if r.passed { "PASS" } else { "FAIL" };
                text.push_str(&format!("{tag}  {:width$}  {}\n", r.name, r.detail));
            }
            let failed = rows.iter().filter(|r| !r.passed).count();
            text.push_str(&format!("{} checks, {} failed\n", rows.len(), failed));
            if failed > 0 {
                emit(cli.out.as_deref(), &text)?;
                return Err(domain(format!("{failed} selftest checks failed")));
            }
            Ok(text)
        }
    }
}

/// Hash of the parsed command and the contents of its input files.
pub fn config_hash(cli: &Cli) -> Result<String, Failure> {
    let mut h = Sha256::new();
    h.update(serde_json::to_vec(&cli.command).expect("arguments serialize"));
    h.update(cli.seed.to_le_bytes());
    let inputs: Vec<&Path> = match &cli.command {
        Command::Classify(a) => vec![&a.model.model],
        Command::Solve(a) => vec![&a.model.model],
        Command::Scan(a) => a.model.iter().map(|p| p.as_path()).collect(),
        Command::Scholte(a) => vec![&a.model],
        Command::Trace(a) => vec![&a.model.model],
        Command::Table(a) => vec![&a.model.model],
        Command::Invert(a) => vec![&a.model.model, &a.table],
        Command::Selftest(_) => vec![],
    };
    for p in inputs {
        h.update(read(p)?.as_bytes());
    }
    Ok(h.finalize().iter().map(|b| format!("{b:02x}")).collect())
}

fn unix_now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

/// Caps the global rayon pool at `INTERFACE_LAB_THREADS` when set.
pub fn configure_threads() -> Result<(), Failure> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        usage(anyhow::anyhow!("{THREADS_ENV} must be a positive integer, got `{v}`"))
    })?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(usage)
}

/// Runs a parsed command end to end, writing its output and the optional manifest.
pub fn run(cli: &Cli, argv: &[String]) -> Result<(), Failure> {
    configure_threads()?;
    let started = unix_now();
    let hash = config_hash(cli)?;
    let text = execute(cli)?;
    emit(cli.out.as_deref(), &text)?;
    if let Some(path) = &cli.manifest {
        let m = RunManifest {
            command: argv.join(" "),
            config_hash: hash,
            version: env!("CARGO_PKG_VERSION").into(),
            seed: cli.seed,
            started_unix: started,
            finished_unix: unix_now(),
        };
        emit(Some(path), &json(&m))?;
    }
    Ok(())
}
