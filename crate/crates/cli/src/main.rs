//! `fracreach`: verified reachability runs, Mittag-Leffler queries,
//! Oustaloup sweeps and the Monte-Carlo containment check.

mod config;
mod output;
mod run;

use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracreach::model::Scenario;
use fracreach::oracles::{
    feedback_response, freq_ss, load_printed_ss, log_grid, max_deviation, ml_highprec, oustaloup, sweep,
    write_sweep_csv,
};
use fracreach::specfun::{ml_interval, MlQuery};
use fracreach::Interval;

use config::{default_run, parse_list, ConfigError, FileConfig, Overrides, ScenarioConfig, ScenarioName, SlicingSpec};
use run::RunError;

/// A comma-separated list parsed as one flag value.
#[derive(Clone, Debug)]
struct List(Vec<f64>);

fn list(s: &str) -> Result<List, String> {
    parse_list(s).map(List)
}

/// Environment variable with the worker count for `verify`.
const THREADS_VAR: &str = "FRACREACH_THREADS";

#[derive(Parser)]
#[command(name = "fracreach", version, about = "Verified reachability for fractional-order systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Computes a verified tube and writes it as CSV plus a JSON manifest.
    Simulate(SimulateArgs),
    /// Encloses E_{ν,β}(z) for point or interval order and argument.
    Mlf(MlfArgs),
    /// Frequency sweep of an Oustaloup approximation of 1/(1 + s^ν).
    Oustaloup(OustaloupArgs),
    /// Runs the Monte-Carlo containment check and prints a table.
    Verify(VerifyArgs),
}

#[derive(Args, Default)]
struct ScenarioFlags {
    /// TOML configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// cubic_a, cubic_b, battery_small, battery_large or custom.
    #[arg(long)]
    scenario: Option<ScenarioName>,
    /// Uniform slice length T.
    #[arg(long = "uniform-T", value_name = "T", conflicts_with_all = ["multi_horizon", "grid"])]
    uniform: Option<f64>,
    /// Comma-separated horizons for independent enclosures.
    #[arg(long, value_name = "LIST", value_parser = list, conflicts_with = "grid")]
    multi_horizon: Option<List>,
    /// Comma-separated slice end points.
    #[arg(long, value_name = "LIST", value_parser = list)]
    grid: Option<List>,
    #[arg(long)]
    t_end: Option<f64>,
    #[arg(long)]
    samples_per_slice: Option<usize>,
    /// Seed of the Monte-Carlo trajectories.
    #[arg(long)]
    seed: Option<u64>,
}

impl ScenarioFlags {
    fn overrides(&self) -> Overrides {
        let slicing = self
            .uniform
            .map(SlicingSpec::Uniform)
            .or_else(|| self.multi_horizon.clone().map(|l| SlicingSpec::MultiHorizon(l.0)))
            .or_else(|| self.grid.clone().map(|l| SlicingSpec::Grid(l.0)));
        Overrides {
            scenario: self.scenario,
            slicing,
            t_end: self.t_end,
            samples_per_slice: self.samples_per_slice,
            seed: self.seed,
            ..Overrides::default()
        }
    }

    fn file(&self) -> Result<FileConfig, ConfigError> {
        self.config.as_deref().map_or_else(|| Ok(FileConfig::default()), FileConfig::load)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    /// Also check this many sampled trajectories against the tube.
    #[arg(long = "mc")]
    mc_runs: Option<usize>,
    /// Tube CSV; standard output when omitted.
    #[arg(long, short)]
    output: Option<PathBuf>,
    /// Manifest path; defaults to the CSV path with a `.json` extension.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args)]
struct MlfArgs {
    #[arg(long, allow_negative_numbers = true)]
    nu: f64,
    /// Upper end of an interval order.
    #[arg(long)]
    nu_hi: Option<f64>,
    #[arg(long, default_value_t = 1.0)]
    beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    z: f64,
    /// Upper end of an interval argument.
    #[arg(long, allow_negative_numbers = true)]
    z_hi: Option<f64>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Also print the extended-precision series value with this many digits.
    #[arg(long)]
    digits: Option<u32>,
}

#[derive(Args)]
struct OustaloupArgs {
    #[arg(long, default_value_t = 0.5)]
    nu: f64,
    #[arg(long, default_value_t = 0.01)]
    wb: f64,
    #[arg(long, default_value_t = 100.0)]
    wh: f64,
    /// 2N+1 poles and zeros.
    #[arg(long = "N", default_value_t = 5)]
    n: usize,
    /// Number of log-spaced frequencies over [wb, wh].
    #[arg(long, default_value_t = 200)]
    sweep: usize,
    /// Sweep the printed 11th-order realization instead.
    #[arg(long)]
    printed: bool,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    scenario: ScenarioFlags,
    /// Trajectories per scenario.
    #[arg(long = "mc", default_value_t = 200)]
    mc_runs: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Mlf(a) => cmd_mlf(a),
        Command::Oustaloup(a) => cmd_oustaloup(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_simulate(a: SimulateArgs) -> Result<(), RunError> {
    let mut flags = a.scenario.overrides();
    flags.mc_runs = a.mc_runs;
    flags.output_path = a.output;
    let cfg = ScenarioConfig::resolve(a.scenario.file()?, flags)?;
    let outcome = run::execute(&cfg)?;
    run::emit(&cfg, &outcome, a.manifest.as_deref())?;
    if let Some(r) = &outcome.report {
        eprintln!("containment {}/{}", r.contained, r.runs);
        if !r.passed() {
            return Err(RunError::Soundness { contained: r.contained, runs: r.runs });
        }
    }
    Ok(())
}

fn domain(field: &'static str, e: impl std::fmt::Display) -> RunError {
    RunError::Config(ConfigError::Invalid { field, message: e.to_string() })
}

fn cmd_mlf(a: MlfArgs) -> Result<(), RunError> {
    let nu = Interval::new(a.nu, a.nu_hi.unwrap_or(a.nu)).map_err(|e| domain("nu", e))?;
    let z = Interval::new(a.z, a.z_hi.unwrap_or(a.z)).map_err(|e| domain("z", e))?;
    let q = MlQuery::new(nu, a.beta, z, a.tol).map_err(|e| domain("nu", e))?;
    let v = ml_interval(&q).map_err(|e| domain("z", e))?;
    println!("enclosure {}", v.enclosure);
    println!("width {:e}", v.enclosure.width());
    println!("terms {}", v.terms);
    println!("tolerance_reached {}", v.tol_reached);
    if let Some(d) = a.digits {
        if !nu.is_point() || !z.is_point() {
            return Err(domain("digits", "the series oracle needs a point order and argument"));
        }
        let s = ml_highprec(a.nu, a.beta, a.z, d).map_err(|e| domain("digits", e))?;
        println!("oracle {s}");
    }
    Ok(())
}

fn cmd_oustaloup(a: OustaloupArgs) -> Result<(), RunError> {
    let omegas = log_grid(a.wb, a.wh, a.sweep);
    let rows = if a.printed {
        let ss = load_printed_ss();
        sweep(&omegas, |w| freq_ss(&ss, w))
    } else {
        let h = oustaloup(a.nu, a.wb, a.wh, a.n).map_err(|e| domain("oustaloup", e))?;
        sweep(&omegas, |w| Ok(feedback_response(&h, w)))
    }
    .map_err(|e| domain("oustaloup", e))?;
    let (mag, phase) = max_deviation(&rows);
    eprintln!("max deviation {mag:.4} dB, {phase:.3} deg");
    let path = a.output.clone().unwrap_or_else(|| PathBuf::from("<stdout>"));
    let io_err = |source| RunError::Io { path: path.clone(), source };
    match &a.output {
        Some(p) => {
            let f = std::fs::File::create(p).map_err(io_err)?;
            let mut w = BufWriter::new(f);
            write_sweep_csv(&mut w, &rows).and_then(|_| w.flush()).map_err(io_err)
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            write_sweep_csv(&mut w, &rows).and_then(|_| w.flush()).map_err(io_err)
        }
    }
}

fn cmd_verify(a: VerifyArgs) -> Result<(), RunError> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v.parse().map_err(|_| domain("FRACREACH_THREADS", format!("not a count: '{v}'")))?;
        // a pool that is already initialised keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let file = a.scenario.file()?;
    let flags = a.scenario.overrides();
    let names: Vec<ScenarioName> = match flags.scenario.or(file.scenario) {
        Some(s) => vec![s],
        None => Scenario::ALL.into_iter().map(ScenarioName::from).collect(),
    };
    println!("{:<14} {:>7} {:>6} {:>12} {:>13}  result", "scenario", "slices", "rows", "containment", "worst_excess");
    let mut failure: Option<RunError> = None;
    for name in names {
        let flags = Overrides { scenario: Some(name), mc_runs: Some(a.mc_runs), ..flags.clone() };
        let mut file = file.clone();
        if file.scenario.is_some_and(|s| s != name) {
            // the file's run settings belong to its own scenario
            (file.t_end, file.slicing) = (Some(default_run(name).0), Some(default_run(name).1));
        }
        let cfg = ScenarioConfig::resolve(file, flags)?;
        match run::execute(&cfg) {
            Ok(out) => {
                let r = out.report.expect("runs requested");
                let ordered =
                    out.tube.rows.iter().all(|row| row.t.lo() <= row.t.hi() && row.x.iter().all(|x| x.lo() <= x.hi()));
                let pass = r.passed() && ordered;
                println!(
                    "{:<14} {:>7} {:>6} {:>12} {:>13.3e}  {}",
                    name.as_str(),
                    out.tube.slices.len().max(out.tube.x_slices.len()),
                    out.tube.rows.len(),
                    format!("{}/{}", r.contained, r.runs),
                    r.worst_excess,
                    if pass { "PASS" } else { "FAIL" }
                );
                println!("containment {}/{}", r.contained, r.runs);
                if !pass && failure.is_none() {
                    failure = Some(RunError::Soundness { contained: r.contained, runs: r.runs });
                }
            }
            Err(e) => {
                println!("{:<14} {:>7} {:>6} {:>12} {:>13}  FAIL ({e})", name.as_str(), "-", "-", "-", "-");
                if failure.as_ref().is_none_or(|f| f.exit_code() < e.exit_code()) {
                    failure = Some(e);
                }
            }
        }
    }
    failure.map_or(Ok(()), Err)
}
