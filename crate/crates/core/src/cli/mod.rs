//! The `qsm` command line.
//!
//! Exit codes: `0` success, `1` domain error (one line `error[Kind]: …` on
//! stderr, `Kind` being the [`Error`] variant), `2` usage error.

mod demo;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::coins::{self, CoinPreparation};
use crate::decomposition::{
    complete_from_vector, hjw_decomposition, park_qubit_example, spectral_decomposition, Decomposition,
    Isometry,
};
use crate::equilibrium::{canonical_state, von_neumann_entropy, Gibbs};
use crate::formats::{self, DecompositionJson, OperatorJson};
use crate::measure::{single_shot_experiment, single_shot_indistinguishable};
use crate::operator::{max_abs_diff, tol};
use crate::random::{self, tags};
use crate::sea::{asymptote_check, sea_evolve, SeaConfig};
use crate::{Error, Result};

pub use demo::{demo_all, DemoCheck, DemoGroup, DemoOptions, DemoReport, DemoStatus};

#[derive(Debug, Parser)]
#[command(name = "qsm", version, about = "Decompositions, preparations, canonical states and entropy-ascent relaxation")]
pub struct Cli {
    /// Seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Validation tolerance for operators read from files.
    #[arg(long, global = true, default_value_t = tol::PSD, value_parser = positive)]
    pub tol: f64,
    #[command(subcommand)]
    pub command: Command,
}

fn positive(s: &str) -> std::result::Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(x) => Err(format!("{x} is not a positive number")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Resolve a density operator into weighted pure states.
    Decompose(DecomposeArgs),
    /// The qubit example: spectral and alternative resolutions.
    ParkExample(ParkArgs),
    /// Check that a decomposition resolves a density operator.
    Verify(VerifyArgs),
    /// Prepare-then-measure simulation of a statistical-weight measure.
    Measure(MeasureArgs),
    /// Biased-coin preparation experiments.
    Coins(CoinsArgs),
    /// Canonical state at a given inverse temperature or energy.
    Equilibrium(EquilibriumArgs),
    /// Unitary plus entropy-ascent relaxation.
    Evolve(EvolveArgs),
    /// Run every worked example and print a pass/fail table.
    Demo(DemoArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Eigen-decomposition.
    Spectral,
    /// Completion from the vector given by `--vector`.
    Vector,
    /// Random isometry mixing of the spectral resolution.
    Random,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Density operator JSON.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Spectral)]
    pub method: Method,
    /// Range vector JSON for `--method vector`.
    #[arg(long)]
    pub vector: Option<PathBuf>,
    /// Number of components for `--method random` (default: the rank).
    #[arg(long)]
    pub components: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ParkArgs {
    #[arg(long, default_value_t = 0.25)]
    pub p: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Density operator JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Decomposition JSON or a `park-example` bundle.
    #[arg(long)]
    pub decomposition: PathBuf,
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Statistical-weight measure JSON.
    #[arg(long)]
    pub input: PathBuf,
    /// Second measure with the same barycenter; switches to a two-sample
    /// comparison.
    #[arg(long)]
    pub compare: Option<PathBuf>,
    #[arg(long, default_value_t = 20)]
    pub observables: usize,
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Per-outcome CSV report.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CoinsArgs {
    #[arg(long)]
    pub pa: f64,
    #[arg(long)]
    pub pb: f64,
    #[arg(long)]
    pub w: f64,
    /// Tosses per coin.
    #[arg(long, default_value_t = 1)]
    pub k: usize,
    #[arg(long, default_value_t = 100_000)]
    pub coins: usize,
    /// Per-coin classification CSV.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EquilibriumArgs {
    #[arg(long)]
    pub hamiltonian: PathBuf,
    #[arg(long, conflicts_with = "energy", required_unless_present = "energy")]
    pub beta: Option<f64>,
    #[arg(long)]
    pub energy: Option<f64>,
    /// Canonical state JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON with beta, energy and entropy.
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvolveArgs {
    #[arg(long)]
    pub rho0: PathBuf,
    #[arg(long)]
    pub hamiltonian: PathBuf,
    /// Dissipation time; `inf` for pure unitary evolution.
    #[arg(long, default_value_t = 1.0)]
    pub tau: f64,
    #[arg(long, default_value_t = 0.01)]
    pub dt: f64,
    #[arg(long, default_value_t = 50.0)]
    pub tfinal: f64,
    #[arg(long, default_value_t = 10)]
    pub record_every: usize,
    /// Trajectory CSV.
    #[arg(long)]
    pub out: PathBuf,
    /// Final state JSON.
    #[arg(long)]
    pub final_state: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DemoArgs {
    /// Check groups to skip.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub skip: Vec<DemoGroup>,
    /// Directory of extra density operators for the ambiguity witness.
    #[arg(long)]
    pub input_dir: Option<PathBuf>,
    /// Directory for the report and artifacts.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Both resolutions written by `park-example`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParkBundleJson {
    pub p: f64,
    pub a: f64,
    pub w: f64,
    pub spectral: DecompositionJson,
    pub alternative: DecompositionJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoinsSummaryJson {
    pub p_hat: f64,
    pub stderr: f64,
    pub accuracy: Option<f64>,
    pub log_lr: Option<f64>,
    pub decision: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumSummaryJson {
    pub beta: f64,
    pub energy: f64,
    pub entropy: f64,
}

/// Runs with process stdout/stderr and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &mut stdout.lock(), &mut stderr.lock())
}

/// Like [`run`], writing to the given streams.
pub fn run_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{text}");
                    0
                }
                _ => {
                    let _ = write!(err, "{text}");
                    2
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error[{}]: {e}", e.kind());
            1
        }
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io(e.to_string())
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Decompose(a) => decompose(cli, a, out),
        Command::ParkExample(a) => park(a, out),
        Command::Verify(a) => verify(cli, a, out),
        Command::Measure(a) => measure(cli, a, out),
        Command::Coins(a) => coins_cmd(cli, a, out),
        Command::Equilibrium(a) => equilibrium(cli, a, out),
        Command::Evolve(a) => evolve(cli, a, out),
        Command::Demo(a) => {
            let opts = DemoOptions {
                seed: cli.seed,
                skip: a.skip.clone(),
                input_dir: a.input_dir.clone(),
            };
            let report = demo_all(&opts)?;
            let table = report.table();
            out.write_all(table.as_bytes()).map_err(io_err)?;
            if let Some(dir) = &a.out {
                report.write_artifacts(dir)?;
            }
            Ok(if report.all_passed() { 0 } else { 1 })
        }
    }
}

fn decompose(cli: &Cli, a: &DecomposeArgs, out: &mut dyn Write) -> Result<i32> {
    let w = formats::load_state(&a.input, cli.tol)?;
    let d = match a.method {
        Method::Spectral => spectral_decomposition(&w),
        Method::Vector => {
            let path = a.vector.as_ref().ok_or_else(|| Error::InvalidParameter {
                name: "vector",
                reason: "--method vector needs --vector".into(),
            })?;
            complete_from_vector(&w, &formats::load_vector(path)?)?
        }
        Method::Random => {
            let rank = w.rank();
            let m = a.components.unwrap_or(rank);
            if m < rank {
                return Err(Error::InvalidParameter {
                    name: "components",
                    reason: format!("{m} is below the rank {rank}"),
                });
            }
            let mut rng = random::stream(cli.seed, tags::HAAR, 0);
            hjw_decomposition(&w, &Isometry::random(rank, m, &mut rng))?
        }
    };
    formats::write_json(&a.out, &DecompositionJson::from_decomposition(&d))?;
    writeln!(out, "components={}", d.len()).map_err(io_err)?;
    for (k, c) in d.components().iter().enumerate() {
        writeln!(out, "w[{k}]={}", c.weight).map_err(io_err)?;
    }
    Ok(0)
}

fn park(a: &ParkArgs, out: &mut dyn Write) -> Result<i32> {
    let ex = park_qubit_example(a.p)?;
    let bundle = ParkBundleJson {
        p: ex.p,
        a: ex.a,
        w: ex.w,
        spectral: DecompositionJson::from_decomposition(&ex.spectral),
        alternative: DecompositionJson::from_decomposition(&ex.alternative),
    };
    formats::write_json(&a.out, &bundle)?;
    writeln!(out, "p={} a={} w={}", ex.p, ex.a, ex.w).map_err(io_err)?;
    Ok(0)
}

fn load_decompositions(path: &Path) -> Result<Vec<(String, Decomposition)>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))?;
    match formats::from_json_str::<DecompositionJson>(&text, "decomposition") {
        Ok(d) => Ok(vec![("decomposition".into(), d.to_decomposition()?)]),
        Err(first) => match formats::from_json_str::<ParkBundleJson>(&text, "bundle") {
            Ok(b) => Ok(vec![
                ("spectral".into(), b.spectral.to_decomposition()?),
                ("alternative".into(), b.alternative.to_decomposition()?),
            ]),
            Err(_) => Err(first),
        },
    }
}

fn verify(cli: &Cli, a: &VerifyArgs, out: &mut dyn Write) -> Result<i32> {
    let w = formats::load_state(&a.input, cli.tol)?;
    for (name, d) in load_decompositions(&a.decomposition)? {
        if d.dim() != w.dim() {
            return Err(Error::DimensionMismatch {
                left: w.dim(),
                right: d.dim(),
            });
        }
        let residual = max_abs_diff(&d.mixture(), w.matrix());
        writeln!(out, "{name}: residual={residual:e}").map_err(io_err)?;
        if residual > crate::decomposition::RECONSTRUCT_TOL.max(cli.tol) {
            return Err(Error::DifferentTargets { gap: residual });
        }
    }
    Ok(0)
}

fn measure(cli: &Cli, a: &MeasureArgs, out: &mut dyn Write) -> Result<i32> {
    let mu = formats::load_measure(&a.input)?;
    let report = match &a.compare {
        Some(path) => {
            let other = formats::load_measure(path)?;
            single_shot_indistinguishable(&mu, &other, a.trials, a.observables, cli.seed)?
        }
        None => single_shot_experiment(&mu, a.trials, a.observables, cli.seed)?,
    };
    if let Some(path) = &a.out {
        let mut buf = Vec::new();
        report.write_csv(&mut buf).map_err(io_err)?;
        formats::write_text(path, &String::from_utf8(buf).expect("ascii"))?;
    }
    writeln!(
        out,
        "observables={} trials={} max_abs_z={} consistent={}",
        report.observables, report.trials, report.max_abs_z, report.consistent
    )
    .map_err(io_err)?;
    Ok(0)
}

fn coins_cmd(cli: &Cli, a: &CoinsArgs, out: &mut dyn Write) -> Result<i32> {
    let prep = CoinPreparation::new(a.pa, a.pb, a.w)?;
    let freq = coins::single_toss_frequency(&prep, a.coins, cli.seed)?;
    writeln!(out, "p_hat={} stderr={}", freq.p_hat, freq.stderr).map_err(io_err)?;
    let mut summary = CoinsSummaryJson {
        p_hat: freq.p_hat,
        stderr: freq.stderr,
        accuracy: None,
        log_lr: None,
        decision: None,
    };
    if prep.p_a != prep.p_b {
        let c = coins::repeated_toss_classify(&prep, a.k, a.coins, cli.seed)?;
        writeln!(out, "k={} accuracy={}", a.k, c.accuracy).map_err(io_err)?;
        summary.accuracy = Some(c.accuracy);
        if let Some(path) = &a.out {
            let mut buf = Vec::new();
            c.write_csv(&mut buf).map_err(io_err)?;
            formats::write_text(path, &String::from_utf8(buf).expect("ascii"))?;
        }
    }
    // compare with a box of coins that all share the single-toss marginal
    let q = prep.head_probability();
    let uniform = CoinPreparation::new(q, q, 0.5)?;
    let test = coins::distinguish_boxes(&prep, &uniform, a.k, a.coins, cli.seed)?;
    writeln!(
        out,
        "log_lr={} p_value_proxy={} decision={}",
        test.statistic,
        test.p_value_proxy,
        test.decision.label()
    )
    .map_err(io_err)?;
    summary.log_lr = Some(test.statistic);
    summary.decision = Some(test.decision.label().into());
    if let Some(path) = &a.summary {
        formats::write_json(path, &summary)?;
    }
    Ok(0)
}

fn equilibrium(cli: &Cli, a: &EquilibriumArgs, out: &mut dyn Write) -> Result<i32> {
    let h = formats::load_hermitian(&a.hamiltonian, cli.tol)?;
    let beta = match (a.beta, a.energy) {
        (Some(b), _) => b,
        (None, Some(e)) => Gibbs::new(&h)?.solve_beta(e)?,
        (None, None) => unreachable!("clap requires one of --beta and --energy"),
    };
    let rho = canonical_state(&h, beta)?;
    let summary = EquilibriumSummaryJson {
        beta,
        energy: rho.expectation(&h)?,
        entropy: von_neumann_entropy(&rho),
    };
    if let Some(path) = &a.out {
        formats::write_json(path, &OperatorJson::from_matrix(rho.matrix()))?;
    }
    if let Some(path) = &a.summary {
        formats::write_json(path, &summary)?;
    }
    writeln!(
        out,
        "beta={} energy={} entropy={}",
        summary.beta, summary.energy, summary.entropy
    )
    .map_err(io_err)?;
    Ok(0)
}

fn evolve(cli: &Cli, a: &EvolveArgs, out: &mut dyn Write) -> Result<i32> {
    let rho0 = formats::load_state(&a.rho0, cli.tol)?;
    let h = formats::load_hermitian(&a.hamiltonian, cli.tol)?;
    let cfg = SeaConfig::new(a.tau, a.dt, a.tfinal, a.record_every)?;
    let traj = sea_evolve(&rho0, &h, &cfg)?;
    let mut buf = Vec::new();
    traj.write_csv(&mut buf).map_err(io_err)?;
    formats::write_text(&a.out, &String::from_utf8(buf).expect("ascii"))?;
    if let Some(path) = &a.final_state {
        formats::write_json(path, &OperatorJson::from_matrix(traj.final_state().matrix()))?;
    }
    let report = asymptote_check(&traj, &h);
    let beta = report.beta_hat.map_or("none".to_string(), |b| b.to_string());
    writeln!(
        out,
        "steps={} t={} beta_hat={} distance={:e} partially_canonical={}",
        traj.steps,
        traj.times.last().expect("non-empty"),
        beta,
        report.distance,
        report.partially_canonical
    )
    .map_err(io_err)?;
    Ok(0)
}
