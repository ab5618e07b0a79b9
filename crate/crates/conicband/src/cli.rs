//! Command-line surface: band structure, Dirac-point analysis, tight-binding
//! comparison, and the verification suite, with machine-readable CSV/JSON.
//!
//! Exit codes are a stable contract: 0 success, 1 verification failure,
//! 2 usage error, 3 numerical failure. Every output file is accompanied by a
//! manifest (embedded for JSON, sidecar `<path>.manifest.json` for CSV, or on
//! stderr when writing to stdout) from which the run reproduces bit-for-bit.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::bands::{band_structure, Band};
use crate::dirac::{analyze, DiracPoint};
use crate::dispersion::Lattice;
use crate::error::{Error, Result};
use crate::rootfind::SolverConfig;
use crate::tightbinding::{tb_compare, TB_STRENGTH_FLOOR};
use crate::verify::run_verification;

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

/// Map an error to its process exit code.
pub fn exit_code_for(err: &Error) -> i32 {
    match err {
        Error::Domain(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Optional cap on internal parallelism. The current implementation is
/// sequential, so the value only has to parse; it is accepted for forward
/// compatibility of the interface.
pub fn thread_cap() -> Option<usize> {
    let raw = std::env::var("CONICBAND_THREADS").ok()?;
    match raw.parse::<usize>() {
        Ok(n) if n >= 1 => Some(n),
        _ => {
            eprintln!("warning: ignoring invalid CONICBAND_THREADS value {raw:?}");
            None
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "conicband",
    version,
    about = "Band structure and conical points of the two-strength Kronig-Penney lattice"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the band structure over the Brillouin zone
    Bands(BandsArgs),
    /// Locate zone-edge conical points, slopes, and gaps
    Dirac(DiracArgs),
    /// Compare tight-binding closed forms against exact zeros
    Tb(TbArgs),
    /// Run the deterministic self-verification suite
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct LatticeArgs {
    /// Dimensionless strength m U a / hbar^2 of the even sublattice
    #[arg(long)]
    pub u: f64,
    /// Dimensionless strength m V a / hbar^2 of the odd sublattice
    #[arg(long)]
    pub v: f64,
}

impl LatticeArgs {
    fn lattice(&self) -> Result<Lattice> {
        Lattice::new(self.u, self.v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct BandsArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Number of bands, counted up from the bottom of the spectrum
    #[arg(long, default_value_t = 4)]
    pub bands: usize,
    /// Number of kappa grid points across [-pi/2, pi/2]
    #[arg(long, default_value_t = 201)]
    pub kpoints: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    /// Output path (stdout when omitted); CSV output gets a sidecar
    /// `<path>.manifest.json`
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override the root-refinement tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Override the rho search ceiling
    #[arg(long = "rho-max")]
    pub rho_max: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DiracArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Report candidates with dimensionless energy up to this value
    #[arg(long = "max-energy", default_value_t = 200.0)]
    pub max_energy: f64,
    /// Outer edge of the slope-fit window in Delta kappa
    #[arg(long = "fit-window", default_value_t = 1e-2)]
    pub fit_window: f64,
}

#[derive(Debug, Args)]
pub struct TbArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Highest level index to compare
    #[arg(long, default_value_t = 5, value_parser = clap::value_parser!(u64).range(1..))]
    pub nmax: u64,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub lattice: LatticeArgs,
    /// Random sample count for the transfer-matrix oracle
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    /// RNG seed; fixed seed gives byte-identical output
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LatticeParams {
    pub u: f64,
    pub v: f64,
}

/// Reproducibility record attached to every output: re-running the named
/// command with these parameters regenerates the data bit-for-bit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub lattice: LatticeParams,
    pub solver: SolverConfig,
    pub params: serde_json::Value,
    pub version: String,
    pub timestamp: String,
}

impl RunManifest {
    fn new(command: &str, lat: Lattice, solver: SolverConfig, params: serde_json::Value) -> Self {
        RunManifest {
            command: command.to_string(),
            lattice: LatticeParams {
                u: lat.u(),
                v: lat.v(),
            },
            solver,
            params,
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

/// 17 significant digits: enough to round-trip any f64 exactly.
fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_bands_csv(w: &mut impl Write, bands: &[Band]) -> io::Result<()> {
    writeln!(w, "band,kappa,rho,energy")?;
    for band in bands {
        for p in &band.points {
            writeln!(
                w,
                "{},{},{},{}",
                band.index,
                fmt_float(p.kappa),
                fmt_float(p.rho),
                fmt_float(p.energy)
            )?;
        }
    }
    Ok(())
}

fn emit_manifest_sidecar(out: &Path, manifest: &RunManifest) -> Result<()> {
    let path = sidecar_path(out);
    let file = File::create(&path).map_err(|e| {
        Error::domain(format!("cannot write manifest {}: {e}", path.display()))
    })?;
    serde_json::to_writer_pretty(BufWriter::new(file), manifest)
        .map_err(|e| Error::domain(format!("manifest serialization failed: {e}")))?;
    Ok(())
}

/// Manifest sidecar path for a CSV output file.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn open_sink(out: &Option<PathBuf>) -> Result<Box<dyn Write>> {
    match out {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Error::domain(format!("cannot write {}: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(io::stdout().lock())),
    }
}

pub fn cmd_bands(args: &BandsArgs) -> Result<i32> {
    let lat = args.lattice.lattice()?;
    let mut cfg = SolverConfig::default();
    if let Some(tol) = args.tol {
        cfg.abs_tol = tol;
    }
    if let Some(rho_max) = args.rho_max {
        cfg.rho_max = rho_max;
    }
    cfg.validate()?;

    let bands = band_structure(lat, args.bands, args.kpoints, &cfg)?;
    let manifest = RunManifest::new(
        "bands",
        lat,
        cfg,
        json!({
            "bands": args.bands,
            "kpoints": args.kpoints,
            "format": match args.format { OutputFormat::Csv => "csv", OutputFormat::Json => "json" },
        }),
    );

    match args.format {
        OutputFormat::Csv => {
            let mut sink = open_sink(&args.out)?;
            write_bands_csv(&mut sink, &bands)
                .map_err(|e| Error::domain(format!("write failed: {e}")))?;
            sink.flush().map_err(|e| Error::domain(format!("write failed: {e}")))?;
            match &args.out {
                Some(path) => emit_manifest_sidecar(path, &manifest)?,
                None => eprintln!("{}", serde_json::to_string(&manifest).unwrap()),
            }
        }
        OutputFormat::Json => {
            let doc = json!({ "manifest": manifest, "bands": bands });
            let mut sink = open_sink(&args.out)?;
            serde_json::to_writer_pretty(&mut sink, &doc)
                .map_err(|e| Error::domain(format!("serialization failed: {e}")))?;
            writeln!(sink).ok();
            sink.flush().map_err(|e| Error::domain(format!("write failed: {e}")))?;
        }
    }
    Ok(EXIT_OK)
}

pub fn cmd_dirac(args: &DiracArgs) -> Result<i32> {
    let lat = args.lattice.lattice()?;
    if args.max_energy.is_nan() || args.max_energy <= 0.0 {
        return Err(Error::domain(format!(
            "--max-energy must be positive, got {}",
            args.max_energy
        )));
    }
    let rho_max = args.max_energy.sqrt();
    let cfg = SolverConfig {
        rho_max: rho_max.max(SolverConfig::default().rho_max),
        ..SolverConfig::default()
    };
    let points: Vec<DiracPoint> = analyze(lat, rho_max, &cfg, args.fit_window)?;

    let manifest = RunManifest::new(
        "dirac",
        lat,
        cfg,
        json!({ "max_energy": args.max_energy, "fit_window": args.fit_window }),
    );
    eprintln!("{}", serde_json::to_string(&manifest).unwrap());

    let stdout = io::stdout();
    let mut sink = stdout.lock();
    serde_json::to_writer_pretty(&mut sink, &points)
        .map_err(|e| Error::domain(format!("serialization failed: {e}")))?;
    writeln!(sink).ok();
    Ok(EXIT_OK)
}

pub fn cmd_tb(args: &TbArgs) -> Result<i32> {
    let lat = args.lattice.lattice()?;
    if lat.u() < TB_STRENGTH_FLOOR || lat.v() < TB_STRENGTH_FLOOR {
        eprintln!(
            "warning: tight-binding forms assume strengths >= {TB_STRENGTH_FLOOR}; got u = {}, v = {}",
            lat.u(),
            lat.v()
        );
    }
    let cfg = SolverConfig::default();
    let cmp = tb_compare(lat, args.nmax as usize, &cfg)?;

    let manifest = RunManifest::new("tb", lat, cfg, json!({ "nmax": args.nmax }));
    eprintln!("{}", serde_json::to_string(&manifest).unwrap());

    let stdout = io::stdout();
    let mut w = stdout.lock();
    let werr = |e: io::Error| Error::domain(format!("write failed: {e}"));
    writeln!(w, "n,family,rho_exact,rho_tb,rel_err,energy_exact,energy_tb,delta_n").map_err(werr)?;
    for row in &cmp.rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            row.n,
            row.family,
            fmt_float(row.rho_exact),
            fmt_float(row.rho_tb),
            fmt_float(row.rel_err),
            fmt_float(row.energy_exact),
            fmt_float(row.energy_tb),
            fmt_float(row.delta_n)
        )
        .map_err(werr)?;
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<i32> {
    let lat = args.lattice.lattice()?;
    let cfg = SolverConfig::default();
    let report = run_verification(lat, args.samples, args.seed, &cfg)?;

    let stdout = io::stdout();
    let mut w = stdout.lock();
    for check in &report.checks {
        writeln!(w, "{}", check.render())
            .map_err(|e| Error::domain(format!("write failed: {e}")))?;
    }
    Ok(if report.all_pass() {
        EXIT_OK
    } else {
        EXIT_VERIFY_FAILED
    })
}

pub fn run(cli: &Cli) -> Result<i32> {
    let _threads = thread_cap();
    match &cli.command {
        Command::Bands(args) => cmd_bands(args),
        Command::Dirac(args) => cmd_dirac(args),
        Command::Tb(args) => cmd_tb(args),
        Command::Verify(args) => cmd_verify(args),
    }
}
