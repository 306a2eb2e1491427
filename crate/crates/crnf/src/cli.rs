//! Command dispatch. Every command returns an exit code; see [`crate::error::exit`].

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use crnf_core::conditions::{check_space, Space};
use crnf_core::conjugacy::{verify_conjugacy, ManifoldSpec};
use crnf_core::diagnostics::{crucial_residual, ProbeConfig};
use crnf_core::engine::{Engine, KernelPolicy, Mode};
use crnf_core::series::BigradedSeries;

use crate::error::{exit, CliError};
use crate::io::{self, ConditionSummary, ReportFile};
use crate::probe::{bigdenom_probe, norm_growth, ProbeOp};
use crate::regularity::{JetFile, RegularityTable};

/// Environment variable holding the worker-thread count for parallel probes.
pub const THREADS_ENV: &str = "CRNF_THREADS";

#[derive(Debug, Parser)]
#[command(name = "crnf", version, about = "Exact formal normal forms of perturbed hyperquadrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Parse and validate a spec file.
    Validate { spec: PathBuf },
    /// Normalize a spec and write phi.series, transform.series and report.json.
    Normalize {
        spec: PathBuf,
        /// Truncation degree; overrides the cap stored in the spec.
        #[arg(long)]
        degree: Option<u32>,
        #[arg(long, value_enum, default_value_t = ModeArg::Full)]
        mode: ModeArg,
        /// Series file with `f₀(w)` for weak normalization.
        #[arg(long)]
        f0: Option<PathBuf>,
        /// Output directory.
        #[arg(long, short, default_value = ".")]
        out: PathBuf,
    },
    /// Check the conjugacy identity for a spec, a normal form and a transform.
    Verify {
        spec: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long)]
        transform: PathBuf,
    },
    /// Check normal-form conditions of a phi.series against the spec's family.
    CheckNf {
        spec: PathBuf,
        #[arg(long)]
        phi: PathBuf,
        #[arg(long, value_enum)]
        space: SpaceArg,
        /// Print the JSON condition report instead of the table.
        #[arg(long)]
        json: bool,
    },
    /// Convergence criterion and numerical probes.
    Diagnose(DiagnoseArgs),
}

#[derive(Debug, Args)]
pub struct DiagnoseArgs {
    /// Spec file, or a jets file with --regularity.
    pub file: PathBuf,
    #[command(flatten)]
    pub what: DiagnoseKind,
    /// Transform file for --growth.
    #[arg(long, requires = "growth")]
    pub transform: Option<PathBuf>,
    /// Unknown orders for --bigdenom, comma-separated. Defaults to the operator's own.
    #[arg(long, value_delimiter = ',')]
    pub m: Option<Vec<u32>>,
    #[arg(long, default_value_t = 0)]
    pub q: u32,
    #[arg(long, default_value_t = 1)]
    pub from: u32,
    #[arg(long, default_value_t = 12)]
    pub to: u32,
    /// Also write the table as text and JSON into this directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DiagnoseKind {
    /// Evaluate the convergence criterion on a phi.series; exit 4 if it fails.
    #[arg(long, value_name = "PHI")]
    pub crucial: Option<PathBuf>,
    /// Per-degree normalized Fischer norms of a phi.series.
    #[arg(long, value_name = "PHI")]
    pub growth: Option<PathBuf>,
    /// Big-denominator probe of a built-in operator.
    #[arg(long, value_enum, value_name = "OP")]
    pub bigdenom: Option<OpArg>,
    /// Regularity probe; FILE is a jets file.
    #[arg(long)]
    pub regularity: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Full,
    Weak,
    Cm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SpaceArg {
    Full,
    Weak,
    Cm,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    DeltaCubed,
    L1Tilde,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.display().to_string(), source })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn load_spec(path: &Path) -> Result<ManifoldSpec, CliError> {
    io::parse_spec(&read(path)?)
}

fn load_phi(path: &Path, spec: &ManifoldSpec) -> Result<BigradedSeries, CliError> {
    let phi = io::parse_series(&read(path)?)?;
    if phi.n() != spec.n() || phi.d() != spec.d() || phi.s() != spec.d() {
        return Err(CliError::Validation("phi dimensions do not match the spec".into()));
    }
    Ok(phi)
}

fn core(e: crnf_core::Error) -> CliError {
    CliError::Validation(e.to_string())
}

/// Parses arguments, applies the thread setting and runs; returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { exit::PARSE } else { exit::OK };
        }
    };
    if let Err(e) = init_threads() {
        eprintln!("error: {e}");
        return e.exit_code();
    }
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var(THREADS_ENV) else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| CliError::Parse(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    // A second initialization in the same process keeps the first pool.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

pub fn run(cmd: Command) -> Result<i32, CliError> {
    match cmd {
        Command::Validate { spec } => {
            let s = load_spec(&spec)?;
            println!("ok: n={} d={} cap={} terms={}", s.n(), s.d(), s.cap(), s.perturbation().num_terms());
            Ok(exit::OK)
        }
        Command::Normalize { spec, degree, mode, f0, out } => normalize(&spec, degree, mode, f0.as_deref(), &out),
        Command::Verify { spec, phi, transform } => {
            let s = load_spec(&spec)?;
            let phi = load_phi(&phi, &s)?;
            let t = io::parse_transform(&read(&transform)?)?;
            let r = verify_conjugacy(&s, &t, &phi).map_err(core)?;
            println!("conjugacy residual terms: {}", r.num_terms());
            Ok(if r.is_zero() { exit::OK } else { exit::CONSISTENCY })
        }
        Command::CheckNf { spec, phi, space, json } => {
            let s = load_spec(&spec)?;
            let phi = load_phi(&phi, &s)?;
            let space = match space {
                SpaceArg::Full => Space::Full,
                SpaceArg::Weak => Space::Weak,
                SpaceArg::Cm => Space::ChernMoser,
            };
            let rep = ConditionSummary::from_report(&check_space(s.family(), &phi, space).map_err(core)?);
            print!("{}", if json { io::conditions_to_string(&rep) } else { rep.to_text() });
            Ok(if rep.pass { exit::OK } else { exit::CONSISTENCY })
        }
        Command::Diagnose(args) => diagnose(args),
    }
}

fn normalize(spec: &Path, degree: Option<u32>, mode: ModeArg, f0: Option<&Path>, out: &Path) -> Result<i32, CliError> {
    let mut s = load_spec(spec)?;
    if let Some(k) = degree {
        s = ManifoldSpec::new(s.family().clone(), s.perturbation().with_cap(k), k).map_err(core)?;
    }
    let f0 = match f0 {
        Some(p) if mode == ModeArg::Weak => Some(io::parse_holo(&read(p)?)?),
        Some(_) => return Err(CliError::Validation("--f0 is only accepted with --mode weak".into())),
        None if mode == ModeArg::Weak => Some(crnf_core::series::HoloSeries::zero(s.n(), s.d(), s.n(), s.cap())),
        None => None,
    };
    let (m, policy) = match mode {
        ModeArg::Full => (Mode::Full, KernelPolicy::Intrinsic),
        ModeArg::Weak => (Mode::Weak, KernelPolicy::ImageOfAdjoint),
        ModeArg::Cm => (Mode::ChernMoser, KernelPolicy::ImageOfAdjoint),
    };
    let engine = Engine::new(s.family(), m, s.cap()).map_err(core)?;
    let rep = engine.normalize(&s, f0.as_ref(), policy).map_err(core)?;
    let crucial = crucial_residual(s.family(), &rep.phi).map_err(core)?;
    let report = ReportFile::new(&rep, &crucial);

    fs::create_dir_all(out).map_err(|source| CliError::Write { path: out.display().to_string(), source })?;
    let (phi_p, t_p, r_p) = (out.join("phi.series"), out.join("transform.series"), out.join("report.json"));
    write(&phi_p, &io::series_to_string(&rep.phi))?;
    write(&t_p, &io::transform_to_string(&rep.transform))?;
    write(&r_p, &io::report_to_string(&report))?;

    // Re-check from the written artifacts, not from memory.
    let phi = io::parse_series(&read(&phi_p)?)?;
    let t = io::parse_transform(&read(&t_p)?)?;
    if phi != rep.phi || t != rep.transform {
        return Err(CliError::Consistency("written artifacts do not parse back to the computed result".into()));
    }
    let resid = verify_conjugacy(&s, &t, &phi).map_err(core)?;
    let conds = match m.space() {
        Some(space) => check_space(s.family(), &phi, space).map_err(core)?,
        None => unreachable!("normalization modes have a target space"),
    };
    print!("{}", ConditionSummary::from_report(&conds).to_text());
    println!("conjugacy residual terms: {}", resid.num_terms());
    if !resid.is_zero() {
        return Err(CliError::Consistency(format!("conjugacy residual has {} terms", resid.num_terms())));
    }
    if !conds.pass() {
        let names: Vec<&str> = conds.failing().map(|c| c.name.as_str()).collect();
        return Err(CliError::Consistency(format!("conditions fail: {}", names.join(", "))));
    }
    Ok(exit::OK)
}

fn emit(out: Option<&Path>, stem: &str, text: &str, json: &str) -> Result<(), CliError> {
    print!("{text}");
    if let Some(dir) = out {
        fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })?;
        write(&dir.join(format!("{stem}.txt")), text)?;
        write(&dir.join(format!("{stem}.json")), json)?;
    }
    Ok(())
}

fn diagnose(a: DiagnoseArgs) -> Result<i32, CliError> {
    let out = a.out.as_deref();
    if a.what.regularity {
        let jets = JetFile::parse(&read(&a.file)?)?;
        let table = RegularityTable::new(jets.q, &jets.run()?);
        emit(out, "regularity", &table.to_text(), &table.to_json())?;
        return Ok(exit::OK);
    }
    let s = load_spec(&a.file)?;
    if let Some(p) = &a.what.crucial {
        let phi = load_phi(p, &s)?;
        let r = crucial_residual(s.family(), &phi).map_err(core)?;
        println!(
            "phi11 terms: {}\nphi12 terms: {}\ncrucial residual terms: {}",
            phi.extract_pq(1, 1).num_terms(),
            phi.extract_pq(1, 2).num_terms(),
            r.num_terms()
        );
        if !r.is_zero() {
            if let Some(dir) = out {
                fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.display().to_string(), source })?;
                write(&dir.join("crucial.series"), &io::series_to_string(&r))?;
            }
            return Err(CliError::Crucial(r.num_terms()));
        }
        return Ok(exit::OK);
    }
    if let Some(p) = &a.what.growth {
        let phi = load_phi(p, &s)?;
        let t = match &a.transform {
            Some(tp) => io::parse_transform(&read(tp)?)?,
            None => crnf_core::conjugacy::Transform::identity(s.n(), s.d(), phi.cap()),
        };
        let g = norm_growth(&phi, &t);
        emit(out, "growth", &g.to_text(), &g.to_json())?;
        return Ok(exit::OK);
    }
    let op = match a.what.bigdenom {
        Some(OpArg::DeltaCubed) => ProbeOp::DeltaCubed,
        Some(OpArg::L1Tilde) => ProbeOp::L1Tilde,
        None => unreachable!("clap requires one diagnostic"),
    };
    let cfg = ProbeConfig { m: a.m.clone().unwrap_or_else(|| op.orders()), q: a.q, i_min: a.from, i_max: a.to };
    let table = bigdenom_probe(s.family(), op, &cfg)?;
    emit(out, "bigdenom", &table.to_text(), &table.to_json())?;
    Ok(exit::OK)
}
