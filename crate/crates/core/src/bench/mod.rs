//! Experiment harness: state pairs of known fidelity, repeated estimates
//! against the exact oracle, and the tables built from them.
//!
//! Every experiment follows the same pipeline. [`prepare_pairs`] draws
//! random initial states and moves each along a random parameter direction
//! until its exact fidelity with the original hits a target;
//! [`run_estimates`] then repeats the estimator on every pair with
//! independent random substreams. The experiment functions in
//! [`experiments`] reduce those records to tables, and [`emit`] writes
//! them out. Identical specs produce identical output, byte for byte.

pub mod cli;
pub mod config;
pub mod emit;
pub mod experiments;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{init_random_with, random_unit_direction, Ansatz, AnsatzKind, ArnnInit, Nqs};
use crate::configspace::{RandomStream, ENUMERATION_CEILING};
use crate::error::{Error, Result};
use crate::estimator::{estimate_general, estimate_normalized, EstimateReport, Mode};
use crate::oracle::{AmplitudeTable, ExactSummary};
use crate::sampling::ChainSettings;
use crate::tabulated::Tabulated;

pub use experiments::{
    run_bound_experiment, run_scaling_experiment, run_size_experiment, run_variance_experiment, BinRow,
    BinnedResult, ErrorRow, LogLogFit, ScalingResult, SizeResult, VariancePairRow, VarianceRow, VarianceTable,
};

/// Calibrated fidelities land within this distance of their target.
pub const CALIBRATION_TOLERANCE: f64 = 2e-3;

/// Errors below this are oracle roundoff, not estimation error.
pub const ROUNDOFF_FLOOR: f64 = 1e-12;

const PAIR_STREAM: u64 = 0;
const ESTIMATE_STREAM: u64 = 1;
const DIRECTION_STREAM: u64 = 1;
const MAX_DIRECTIONS: u64 = 8;
const SCAN_START: f64 = 0.05;
const SCAN_RATIO: f64 = 1.25;

/// Largest interpolation distance tried when calibrating a pair.
pub const MAX_INTERPOLATION: f64 = 1000.0;

/// Everything that determines an experiment's output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub ansatz: AnsatzKind,
    /// Weight interval for random ARNN states.
    pub arnn_init: ArnnInit,
    pub sites: usize,
    /// Total samples per estimate; split evenly between the two sides in
    /// general mode.
    pub samples: usize,
    pub repetitions: usize,
    pub pairs: usize,
    pub delta: f64,
    pub seed: u64,
    pub bin_count: usize,
    /// Targets for pair calibration are spread evenly over this interval.
    pub fidelity_window: (f64, f64),
    pub mode: Mode,
    pub chain: ChainSettings,
    /// Evaluate each state once on the full basis and sample from the table.
    pub tabulate: bool,
    /// Sample counts for the scaling experiment.
    pub sample_grid: Vec<usize>,
    /// System sizes for the size experiment.
    pub length_grid: Vec<usize>,
}

impl ExperimentSpec {
    /// Desk-scale defaults: L = 12, n = 16384, 100 repetitions over 10
    /// pairs, δ = 0.32, 50 fidelity bins. ARNN pairs use the normalized
    /// estimator and RBM pairs the two-sided one.
    ///
    /// Random ARNN states use the symmetric weight interval. The positive
    /// one concentrates most states on a handful of configurations, and
    /// perturbed pairs then carry much of `|ψ|²` where `|φ|²` is below any
    /// feasible sampling resolution.
    pub fn new(ansatz: AnsatzKind) -> Self {
        Self {
            ansatz,
            arnn_init: ArnnInit::Symmetric,
            sites: 12,
            samples: 16384,
            repetitions: 100,
            pairs: 10,
            delta: 0.32,
            seed: 0,
            bin_count: 50,
            fidelity_window: (0.02, 1.0),
            mode: default_mode(ansatz),
            chain: ChainSettings::default(),
            tabulate: true,
            sample_grid: (8..=16).map(|k| 1usize << k).collect(),
            length_grid: vec![8, 10, 12, 14],
        }
    }

    /// Defaults narrowed to the `[0.45, 0.55]` fidelity window used for the
    /// scaling and size experiments.
    pub fn mid_fidelity(ansatz: AnsatzKind) -> Self {
        Self {
            fidelity_window: (0.45, 0.55),
            ..Self::new(ansatz)
        }
    }

    pub fn bin_width(&self) -> f64 {
        1.0 / self.bin_count as f64
    }

    /// Bin holding fidelity `f`; the top edge belongs to the last bin.
    pub fn bin_of(&self, f: f64) -> usize {
        ((f.clamp(0.0, 1.0) * self.bin_count as f64) as usize).min(self.bin_count - 1)
    }

    pub fn validate(&self) -> Result<()> {
        check_sites(self.sites)?;
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        if self.mode == Mode::General && self.samples < 2 {
            return Err(Error::invalid("the two-sided estimator needs at least 2 samples"));
        }
        if self.mode == Mode::Normalized && self.ansatz != AnsatzKind::Arnn {
            return Err(Error::invalid("normalized mode requires the autoregressive ansatz"));
        }
        if self.repetitions < 2 {
            return Err(Error::invalid("repetitions must be at least 2"));
        }
        if self.pairs == 0 {
            return Err(Error::invalid("pairs must be at least 1"));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::invalid(format!("delta {} outside (0, 1)", self.delta)));
        }
        if self.bin_count == 0 {
            return Err(Error::invalid("bin count must be at least 1"));
        }
        let (lo, hi) = self.fidelity_window;
        if !(0.0 < lo && lo <= hi && hi <= 1.0) {
            return Err(Error::invalid(format!(
                "fidelity window [{lo}, {hi}] must satisfy 0 < lo <= hi <= 1"
            )));
        }
        if self.chain.sweeps_per_sample == 0 || self.chain.steps_per_sweep == Some(0) {
            return Err(Error::invalid("chain settings must take at least one step per sample"));
        }
        if self.sample_grid.is_empty() || self.sample_grid.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::invalid("sample grid must be nonempty and strictly ascending"));
        }
        let min_samples = if self.mode == Mode::General { 2 } else { 1 };
        if self.sample_grid[0] < min_samples {
            return Err(Error::invalid("sample grid entries are too small"));
        }
        if self.length_grid.is_empty() {
            return Err(Error::invalid("length grid must be nonempty"));
        }
        self.length_grid.iter().try_for_each(|&l| check_sites(l))
    }

    fn split(&self) -> (usize, usize) {
        match self.mode {
            Mode::Normalized => (self.samples, 0),
            Mode::General => (self.samples.div_ceil(2), self.samples / 2),
        }
    }
}

/// Normalized estimation for the autoregressive ansatz, two-sided otherwise.
pub fn default_mode(kind: AnsatzKind) -> Mode {
    match kind {
        AnsatzKind::Arnn => Mode::Normalized,
        AnsatzKind::Rbm => Mode::General,
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites == 0 || sites > ENUMERATION_CEILING {
        return Err(Error::invalid(format!(
            "system size {sites} outside 1..={ENUMERATION_CEILING} (experiments need the exact oracle)"
        )));
    }
    Ok(())
}

/// `ψ`, `φ = ψ + t·η` and their exact summary.
#[derive(Debug, Clone)]
pub struct StatePair {
    pub psi: Ansatz,
    pub phi: Ansatz,
    pub seed: u64,
    /// Which random direction was used; [`generate_state_pair`] uses 0.
    pub direction_attempt: u64,
    pub t: f64,
    pub exact: ExactSummary,
}

impl StatePair {
    /// Oracle fidelity clamped into `[0, 1]`.
    pub fn fidelity(&self) -> f64 {
        self.exact.fidelity.clamp(0.0, 1.0)
    }
}

fn pair_direction(psi: &Ansatz, seed: u64, attempt: u64) -> Vec<f64> {
    let mut rng = RandomStream::new(seed).split(DIRECTION_STREAM).split(attempt);
    random_unit_direction(psi.parameter_count(), &mut rng)
}

/// A random initial state from `seed`, moved a distance `t` along a random
/// unit direction in parameter space (also drawn from `seed`), with the
/// exact fidelity of the two.
pub fn generate_state_pair(
    kind: AnsatzKind,
    init: ArnnInit,
    sites: usize,
    t: f64,
    seed: u64,
) -> Result<StatePair> {
    check_sites(sites)?;
    if !t.is_finite() {
        return Err(Error::invalid(format!("interpolation magnitude {t} is not finite")));
    }
    let psi = init_random_with(kind, sites, seed, init)?;
    let phi = psi.perturb(&pair_direction(&psi, seed, 0), t)?;
    let exact = crate::oracle::exact_summary(&psi, &phi)?;
    Ok(StatePair {
        psi,
        phi,
        seed,
        direction_attempt: 0,
        t,
        exact,
    })
}

/// Like [`generate_state_pair`], with `t ≥ 0` chosen so that the fidelity
/// lies within [`CALIBRATION_TOLERANCE`] of `target` and inside `window`.
///
/// `t` is bracketed by a geometric scan up to [`MAX_INTERPOLATION`] and then
/// refined by bisection. If the fidelity never drops to the target along
/// the drawn direction, fresh directions are tried.
pub fn calibrate_state_pair(
    kind: AnsatzKind,
    init: ArnnInit,
    sites: usize,
    target: f64,
    window: (f64, f64),
    seed: u64,
) -> Result<StatePair> {
    check_sites(sites)?;
    let accept_lo = (target - CALIBRATION_TOLERANCE).max(window.0);
    let accept_hi = (target + CALIBRATION_TOLERANCE).min(window.1);
    if accept_lo > accept_hi {
        return Err(Error::invalid(format!("target fidelity {target} outside window {window:?}")));
    }
    let psi = init_random_with(kind, sites, seed, init)?;
    let psi_table = AmplitudeTable::new(&psi)?;
    for attempt in 0..MAX_DIRECTIONS {
        let direction = pair_direction(&psi, seed, attempt);
        let evaluate = |t: f64| -> Result<(Ansatz, ExactSummary)> {
            let phi = psi.perturb(&direction, t)?;
            let exact = psi_table.summary_with(&AmplitudeTable::new(&phi)?)?;
            Ok((phi, exact))
        };
        let done = |phi: Ansatz, exact: ExactSummary, t: f64| StatePair {
            psi: psi.clone(),
            phi,
            seed,
            direction_attempt: attempt,
            t,
            exact,
        };
        let accepted = |f: f64| (accept_lo..=accept_hi).contains(&f);

        let (phi, exact) = evaluate(0.0)?;
        if accepted(exact.fidelity) {
            return Ok(done(phi, exact, 0.0));
        }
        // scan for the first t with fidelity at or below the band
        let (mut lo, mut hi) = (0.0, SCAN_START);
        let mut bracketed = false;
        while hi <= MAX_INTERPOLATION {
            let (phi, exact) = evaluate(hi)?;
            if accepted(exact.fidelity) {
                return Ok(done(phi, exact, hi));
            }
            if exact.fidelity < accept_lo {
                bracketed = true;
                break;
            }
            lo = hi;
            hi *= SCAN_RATIO;
        }
        if !bracketed {
            continue;
        }
        // F(lo) > band > F(hi); continuity guarantees a crossing in between
        while hi - lo > f64::EPSILON * hi {
            let mid = 0.5 * (lo + hi);
            let (phi, exact) = evaluate(mid)?;
            if accepted(exact.fidelity) {
                return Ok(done(phi, exact, mid));
            }
            if exact.fidelity < accept_lo {
                hi = mid;
            } else {
                lo = mid;
            }
        }
    }
    Err(Error::invalid(format!(
        "fidelity {target} not reachable along {MAX_DIRECTIONS} random directions"
    )))
}

/// `count` targets spread evenly over `window`, endpoints included.
pub fn fidelity_targets(window: (f64, f64), count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![0.5 * (window.0 + window.1)],
        _ => (0..count)
            .map(|k| window.0 + (window.1 - window.0) * k as f64 / (count - 1) as f64)
            .collect(),
    }
}

/// Per-pair facts carried into every output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairInfo {
    pub index: usize,
    pub sites: usize,
    pub seed: u64,
    pub direction_attempt: u64,
    pub target_fidelity: f64,
    pub t: f64,
    pub oracle_fidelity: f64,
    pub exact: ExactSummary,
}

/// A calibrated pair ready for repeated estimation.
pub struct PreparedPair {
    pub info: PairInfo,
    pub psi: Box<dyn Nqs>,
    pub phi: Box<dyn Nqs>,
}

impl std::fmt::Debug for PreparedPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PreparedPair").field("info", &self.info).finish_non_exhaustive()
    }
}

fn pair_seed(spec: &ExperimentSpec, sites: usize, index: usize) -> u64 {
    RandomStream::new(spec.seed)
        .split(PAIR_STREAM)
        .split(sites as u64)
        .split(index as u64)
        .key()
}

/// Calibrates `spec.pairs` pairs at system size `sites`, targets spread
/// over the spec's fidelity window.
pub fn prepare_pairs(spec: &ExperimentSpec, sites: usize) -> Result<Vec<PreparedPair>> {
    spec.validate()?;
    check_sites(sites)?;
    fidelity_targets(spec.fidelity_window, spec.pairs)
        .into_iter()
        .enumerate()
        .map(|(index, target)| {
            let seed = pair_seed(spec, sites, index);
            let pair = calibrate_state_pair(spec.ansatz, spec.arnn_init, sites, target, spec.fidelity_window, seed)?;
            let info = PairInfo {
                index,
                sites,
                seed,
                direction_attempt: pair.direction_attempt,
                target_fidelity: target,
                t: pair.t,
                oracle_fidelity: pair.exact.fidelity,
                exact: pair.exact,
            };
            let (psi, phi): (Box<dyn Nqs>, Box<dyn Nqs>) = if spec.tabulate {
                (Box::new(Tabulated::new(&pair.psi)?), Box::new(Tabulated::new(&pair.phi)?))
            } else {
                (Box::new(pair.psi), Box::new(pair.phi))
            };
            Ok(PreparedPair { info, psi, phi })
        })
        .collect()
}

/// One estimate of one pair, with the oracle values it is judged against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub sites: usize,
    pub samples: usize,
    pub pair: usize,
    pub repetition: usize,
    /// Key of the random substream this estimate consumed.
    pub stream_key: u64,
    pub oracle_fidelity: f64,
    pub oracle_overlap: Complex64,
    pub y1: Complex64,
    pub y2: Option<Complex64>,
    pub fidelity: f64,
    pub fidelity_residual: f64,
    pub overlap: Complex64,
    pub n1: usize,
    pub n2: usize,
    pub acceptance_rate: Option<f64>,
    pub overflow_count: usize,
}

impl EstimateRecord {
    pub fn fidelity_error(&self) -> f64 {
        (self.fidelity - self.oracle_fidelity.clamp(0.0, 1.0)).abs()
    }

    pub fn overlap_error(&self) -> f64 {
        (self.overlap - self.oracle_overlap).norm()
    }

    /// `Y₁` in normalized mode, `Y₁Y₂` in general mode: the complex
    /// quantity whose variance the analytic predictions describe.
    pub fn statistic(&self) -> Complex64 {
        match self.y2 {
            None => self.y1,
            Some(y2) => self.y1 * y2,
        }
    }
}

/// `repetitions` independent estimates of every pair with `samples` total
/// samples each, ordered by (pair, repetition). Repetition `r` of pair `k`
/// uses substream `stream.split(k).split(r)` and fresh Markov chains.
pub fn run_estimates(
    spec: &ExperimentSpec,
    pairs: &[PreparedPair],
    samples: usize,
    stream: &RandomStream,
) -> Result<Vec<EstimateRecord>> {
    let spec = ExperimentSpec {
        samples,
        ..spec.clone()
    };
    spec.validate()?;
    let (n1, n2) = spec.split();
    let work: Vec<(usize, usize)> = (0..pairs.len())
        .flat_map(|k| (0..spec.repetitions).map(move |r| (k, r)))
        .collect();
    work.into_par_iter()
        .map(|(k, r)| {
            let pair = &pairs[k];
            let mut rng = stream.split(k as u64).split(r as u64);
            let stream_key = rng.key();
            let report: EstimateReport = match spec.mode {
                Mode::Normalized => estimate_normalized(&*pair.psi, &*pair.phi, n1, &spec.chain, &mut rng)?,
                Mode::General => estimate_general(&*pair.psi, &*pair.phi, n1, n2, &spec.chain, &rng)?,
            };
            Ok(EstimateRecord {
                sites: pair.info.sites,
                samples,
                pair: pair.info.index,
                repetition: r,
                stream_key,
                oracle_fidelity: pair.info.oracle_fidelity,
                oracle_overlap: pair.info.exact.overlap,
                y1: report.y1.value,
                y2: report.y2.map(|m| m.value),
                fidelity: report.fidelity,
                fidelity_residual: report.fidelity_residual,
                overlap: report.overlap.value,
                n1: report.samples.0,
                n2: report.samples.1,
                acceptance_rate: report.acceptance_rates.0,
                overflow_count: report.y1.overflow_count + report.y2.map_or(0, |m| m.overflow_count),
            })
        })
        .collect()
}

/// Root substream for the estimates of one experiment stage.
pub fn estimate_stream(spec: &ExperimentSpec, stage: u64) -> RandomStream {
    RandomStream::new(spec.seed).split(ESTIMATE_STREAM).split(stage)
}
