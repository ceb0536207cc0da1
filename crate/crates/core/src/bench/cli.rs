//! Command-line front end. The binary is a one-line wrapper around [`run`].
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 on I/O failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use super::config::{parse_mode, parse_window, Overrides};
use super::emit::{csv_rows, emit, ExperimentOutput, ExperimentResult, Format};
use super::{
    calibrate_state_pair, generate_state_pair, run_bound_experiment, run_scaling_experiment, run_size_experiment,
    run_variance_experiment, ExperimentSpec, StatePair,
};
use crate::ansatz::{AnsatzKind, ArnnInit};
use crate::bounds::{
    epsilon_normalized, epsilon_prime_taylor, fidelity_halfwidth_normalized, required_samples_normalized,
    split_samples, variance_fidelity, BoundReport,
};
use crate::configspace::RandomStream;
use crate::error::{Error, Result};
use crate::estimator::{estimate_general, estimate_normalized, Mode};
use crate::sampling::ChainSettings;

#[derive(Debug, Parser)]
#[command(
    name = "nqs-overlap",
    version,
    about = "Monte Carlo overlap and fidelity of neural quantum states, checked against exact enumeration"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Empirical estimator variance against its prediction, per fidelity bin.
    Variance(ExperimentArgs),
    /// Observed errors and Chebyshev failure rates per fidelity bin.
    Bounds(ExperimentArgs),
    /// Mean error against sample count near F = 0.5, with a log-log fit.
    Scaling(ExperimentArgs),
    /// Mean error against system size near F = 0.5.
    Size(ExperimentArgs),
    /// Evaluate the error bounds for a fidelity, sample count and δ.
    Plan(PlanArgs),
    /// One pair, one estimate, compared with the exact oracle.
    Exact(ExactArgs),
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    /// rbm or arnn
    #[arg(long)]
    ansatz: Option<AnsatzKind>,
    /// positive or symmetric weight interval for ARNN states.
    #[arg(long)]
    arnn_init: Option<ArnnInit>,
    /// Number of spins L.
    #[arg(long)]
    length: Option<usize>,
    /// Total samples per estimate.
    #[arg(long)]
    samples: Option<usize>,
    /// Repetitions per state pair.
    #[arg(long)]
    reps: Option<usize>,
    /// Number of state pairs.
    #[arg(long)]
    pairs: Option<usize>,
    /// Failure probability δ.
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// Number of fidelity bins.
    #[arg(long)]
    bins: Option<usize>,
    /// Fidelity targets span lo,hi.
    #[arg(long, value_parser = parse_window)]
    window: Option<(f64, f64)>,
    /// normalized or general
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    /// Markov-chain burn-in sweeps.
    #[arg(long)]
    burn_in: Option<usize>,
    /// Comma-separated sample counts for `scaling`.
    #[arg(long, value_delimiter = ',')]
    n_grid: Option<Vec<usize>>,
    /// Comma-separated system sizes for `size`.
    #[arg(long, value_delimiter = ',')]
    length_grid: Option<Vec<usize>>,
    /// Evaluate networks directly instead of through a full-basis table.
    #[arg(long)]
    no_tabulate: bool,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// csv or json
    #[arg(long)]
    format: Option<Format>,
    /// key = value file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ExperimentArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            ansatz: self.ansatz,
            arnn_init: self.arnn_init,
            length: self.length,
            samples: self.samples,
            reps: self.reps,
            pairs: self.pairs,
            delta: self.delta,
            seed: self.seed,
            bins: self.bins,
            window: self.window,
            mode: self.mode,
            burn_in: self.burn_in,
            tabulate: self.no_tabulate.then_some(false),
            n_grid: self.n_grid.clone(),
            length_grid: self.length_grid.clone(),
            out: self.out.clone(),
            format: self.format,
            ..Overrides::default()
        }
    }
}

#[derive(Debug, Args)]
struct PlanArgs {
    #[arg(long, default_value_t = 0.5)]
    fidelity: f64,
    /// Total samples n.
    #[arg(long, default_value_t = 65536)]
    samples: u64,
    #[arg(long, default_value_t = 0.32)]
    delta: f64,
    /// Also report the samples needed for this overlap radius.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Debug, Args)]
struct ExactArgs {
    #[arg(long, default_value_t = AnsatzKind::Arnn)]
    ansatz: AnsatzKind,
    #[arg(long, default_value_t = ArnnInit::Symmetric)]
    arnn_init: ArnnInit,
    #[arg(long, default_value_t = 10)]
    length: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Interpolation distance; overrides --target.
    #[arg(long)]
    t: Option<f64>,
    /// Fidelity to calibrate the pair to.
    #[arg(long, default_value_t = 0.5)]
    target: f64,
    #[arg(long, default_value_t = 16384)]
    samples: usize,
    #[arg(long, default_value_t = 0.32)]
    delta: f64,
    /// normalized or general; defaults by ansatz.
    #[arg(long, value_parser = parse_mode)]
    mode: Option<Mode>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = Format::Json)]
    format: Format,
}

/// Every bound for one `(F, n, δ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PlanRow {
    pub fidelity: f64,
    pub samples: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub fidelity_halfwidth: f64,
    pub variance_fidelity: f64,
    pub epsilon_prime: f64,
    pub epsilon_prime_taylor: f64,
    pub delta_alpha: f64,
    pub magnitude_lo: f64,
    pub magnitude_hi: f64,
    pub median_epsilon: f64,
    pub chebyshev_tighter: bool,
    pub target_epsilon: Option<f64>,
    pub required_samples: Option<u64>,
}

/// One estimate beside the oracle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExactRow {
    pub ansatz: AnsatzKind,
    pub sites: usize,
    pub seed: u64,
    pub t: f64,
    pub mode: Mode,
    pub samples: usize,
    pub oracle_fidelity: f64,
    pub oracle_overlap_re: f64,
    pub oracle_overlap_im: f64,
    pub log_norm_ratio: f64,
    pub var_z: f64,
    pub var_w: f64,
    pub fidelity: f64,
    pub fidelity_residual: f64,
    pub overlap_re: f64,
    pub overlap_im: f64,
    pub fidelity_error: f64,
    pub fidelity_bound: f64,
    pub within_bound: bool,
}

fn plan(args: &PlanArgs) -> Result<PlanRow> {
    let b = BoundReport::new(args.fidelity, args.samples, args.delta)?;
    let (n1, n2) = split_samples(args.samples);
    let required = args
        .epsilon
        .map(|e| required_samples_normalized(e, args.delta))
        .transpose()?;
    Ok(PlanRow {
        fidelity: b.fidelity,
        samples: b.n,
        delta: b.delta,
        epsilon: b.epsilon,
        fidelity_halfwidth: b.fidelity_halfwidth,
        variance_fidelity: if n2 > 0 { variance_fidelity(args.fidelity, n1, n2)? } else { f64::INFINITY },
        epsilon_prime: b.epsilon_prime,
        epsilon_prime_taylor: epsilon_prime_taylor(args.fidelity, args.samples, args.delta)?,
        delta_alpha: b.delta_alpha,
        magnitude_lo: b.overlap_magnitude_interval.0,
        magnitude_hi: b.overlap_magnitude_interval.1,
        median_epsilon: b.median_epsilon,
        chebyshev_tighter: b.chebyshev_tighter,
        target_epsilon: args.epsilon,
        required_samples: required,
    })
}

fn exact(args: &ExactArgs) -> Result<ExactRow> {
    let pair: StatePair = match args.t {
        Some(t) => generate_state_pair(args.ansatz, args.arnn_init, args.length, t, args.seed)?,
        None => calibrate_state_pair(args.ansatz, args.arnn_init, args.length, args.target, (0.0, 1.0), args.seed)?,
    };
    let mode = args.mode.unwrap_or(super::default_mode(args.ansatz));
    let f = pair.fidelity();
    let settings = ChainSettings::default();
    let rng = RandomStream::new(args.seed).split(2);
    let (report, bound) = match mode {
        Mode::Normalized => {
            let r = estimate_normalized(&pair.psi, &pair.phi, args.samples, &settings, &mut rng.clone())?;
            let eps = epsilon_normalized(f, args.samples as u64, args.delta)?;
            (r, fidelity_halfwidth_normalized(f, eps)?)
        }
        Mode::General => {
            let (n1, n2) = split_samples(args.samples as u64);
            let r = estimate_general(&pair.psi, &pair.phi, n1 as usize, n2 as usize, &settings, &rng)?;
            (r, crate::bounds::epsilon_prime(f, args.samples as u64, args.delta)?)
        }
    };
    let err = (report.fidelity - f).abs();
    Ok(ExactRow {
        ansatz: args.ansatz,
        sites: args.length,
        seed: args.seed,
        t: pair.t,
        mode,
        samples: args.samples,
        oracle_fidelity: pair.exact.fidelity,
        oracle_overlap_re: pair.exact.overlap.re,
        oracle_overlap_im: pair.exact.overlap.im,
        log_norm_ratio: pair.exact.log_norm_psi - pair.exact.log_norm_phi,
        var_z: pair.exact.var_z,
        var_w: pair.exact.var_w,
        fidelity: report.fidelity,
        fidelity_residual: report.fidelity_residual,
        overlap_re: report.overlap.value.re,
        overlap_im: report.overlap.value.im,
        fidelity_error: err,
        fidelity_bound: bound,
        within_bound: !super::experiments::exceeds(err, bound),
    })
}

fn render_row<T: Serialize>(row: &T, format: Format) -> Result<String> {
    match format {
        Format::Csv => csv_rows(std::slice::from_ref(row)),
        Format::Json => serde_json::to_string_pretty(row)
            .map(|s| s + "\n")
            .map_err(|e| Error::Format(e.to_string())),
    }
}

fn write_text(text: &str, path: Option<&PathBuf>, stdout: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

fn experiment(name: &str, args: &ExperimentArgs, stdout: &mut dyn Write) -> Result<()> {
    let file = match &args.config {
        Some(path) => Overrides::load(path)?,
        None => Overrides::default(),
    };
    let settings = file.or(args.overrides());
    let kind = settings.ansatz.unwrap_or(AnsatzKind::Arnn);
    let mut spec = match name {
        "scaling" | "size" => ExperimentSpec::mid_fidelity(kind),
        _ => ExperimentSpec::new(kind),
    };
    settings.apply(&mut spec);
    spec.validate()?;
    let (pairs, records, result) = match name {
        "variance" => {
            let (p, r, t) = run_variance_experiment(&spec)?;
            (p, r, ExperimentResult::Variance(t))
        }
        "bounds" => {
            let (p, r, t) = run_bound_experiment(&spec)?;
            (p, r, ExperimentResult::Bounds(t))
        }
        "scaling" => {
            let (p, r, t) = run_scaling_experiment(&spec)?;
            (p, r, ExperimentResult::Scaling(t))
        }
        _ => {
            let (p, r, t) = run_size_experiment(&spec)?;
            (p, r, ExperimentResult::Size(t))
        }
    };
    let output = ExperimentOutput {
        spec,
        pairs,
        records,
        result,
    };
    let format = settings.format.unwrap_or(Format::Json);
    match &settings.out {
        Some(path) => emit(&output, path, format),
        None => write_text(&output.render(format)?, None, stdout),
    }
}

fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Variance(a) => experiment("variance", a, stdout),
        Command::Bounds(a) => experiment("bounds", a, stdout),
        Command::Scaling(a) => experiment("scaling", a, stdout),
        Command::Size(a) => experiment("size", a, stdout),
        Command::Plan(a) => write_text(&render_row(&plan(a)?, a.format)?, a.out.as_ref(), stdout),
        Command::Exact(a) => write_text(&render_row(&exact(a)?, a.format)?, a.out.as_ref(), stdout),
    }
}

/// Exit status for an error: 2 for I/O failures, 1 for everything else.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io { .. } => 2,
        _ => 1,
    }
}

/// Parses `args` (program name first) and runs the command, writing
/// results to `stdout` and diagnostics to `stderr`. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = stdout.write_all(text.as_bytes());
                    0
                }
                _ => {
                    let _ = stderr.write_all(text.as_bytes());
                    1
                }
            };
        }
    };
    match dispatch(&cli, stdout) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(std::iter::once("nqs-overlap").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn plan_reports_bounds() {
        let (code, out, _) = call(&["plan", "--fidelity", "0.5", "--samples", "65536", "--delta", "0.32"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["epsilon_prime"].as_f64().unwrap() - 6.906e-3).abs() < 1e-6);
        let (code, out, _) = call(&["plan", "--epsilon", "0.1", "--delta", "0.25", "--format", "csv"]);
        assert_eq!(code, 0);
        assert!(out.lines().next().unwrap().ends_with("target_epsilon,required_samples"));
        assert!(out.lines().nth(1).unwrap().ends_with(",0.1,400"));
    }

    #[test]
    fn validation_errors_exit_with_one() {
        assert_eq!(call(&["plan", "--delta", "1.5"]).0, 1);
        assert_eq!(call(&["bounds", "--length", "40"]).0, 1);
        assert_eq!(call(&["frobnicate"]).0, 1);
        assert_eq!(call(&["bounds", "--ansatz", "mps"]).0, 1);
    }

    #[test]
    fn io_errors_exit_with_two() {
        let (code, _, err) = call(&["plan", "--out", "/nonexistent-dir/plan.json"]);
        assert_eq!(code, 2);
        assert!(err.contains("/nonexistent-dir/plan.json"));
        assert_eq!(call(&["bounds", "--config", "/nonexistent-dir/cfg"]).0, 2);
    }

    #[test]
    fn help_exits_cleanly() {
        let (code, out, _) = call(&["--help"]);
        assert_eq!(code, 0);
        for sub in ["variance", "bounds", "scaling", "size", "plan", "exact"] {
            assert!(out.contains(sub));
        }
    }

    #[test]
    fn exact_compares_with_the_oracle() {
        let (code, out, _) = call(&["exact", "--ansatz", "rbm", "--length", "6", "--t", "0", "--samples", "100"]);
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert!((v["fidelity"].as_f64().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(v["within_bound"], true);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("run.cfg");
        std::fs::write(&cfg, "ansatz = rbm\nlength = 5\nsamples = 64\nreps = 3\npairs = 2\nseed = 1\n").unwrap();
        let (code, out, err) = call(&["bounds", "--config", cfg.to_str().unwrap(), "--seed", "9"]);
        assert_eq!(code, 0, "{err}");
        let o = ExperimentOutput::from_json(&out).unwrap();
        assert_eq!(o.spec.seed, 9);
        assert_eq!(o.spec.sites, 5);
        assert_eq!(o.spec.ansatz, AnsatzKind::Rbm);
    }
}
