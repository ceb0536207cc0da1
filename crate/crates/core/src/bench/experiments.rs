//! The four experiments: estimator variance against its prediction,
//! Chebyshev coverage per fidelity bin, error scaling with the sample
//! count, and error against system size.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{estimate_stream, prepare_pairs, run_estimates, EstimateRecord, ExperimentSpec, PairInfo, ROUNDOFF_FLOOR};
use crate::bounds::{
    epsilon_normalized, epsilon_prime, fidelity_halfwidth_normalized, overlap_magnitude_interval,
    overlap_region_contains, phase_halfwidth, variance_fidelity,
};
use crate::error::{Error, Result};
use crate::estimator::Mode;
use crate::numeric::{complex_var, mean_var, variance_standard_error};

/// Whether an error counts as falling outside a bound of radius `radius`.
/// Errors at roundoff level never count.
pub fn exceeds(error: f64, radius: f64) -> bool {
    error >= radius && error > ROUNDOFF_FLOOR
}

/// Variance of the estimator statistic for one pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariancePairRow {
    pub pair: usize,
    pub oracle_fidelity: f64,
    pub repetitions: usize,
    /// Unbiased variance of `Y₁` (normalized) or `Y₁Y₂` (general) over
    /// repetitions, as `E|X - E X|²`.
    pub empirical_variance: f64,
    pub standard_error: f64,
    pub analytic_variance: f64,
    /// Variance of the real part alone.
    pub empirical_variance_real: f64,
    pub standard_error_real: f64,
    /// Exact variance of the real part from the pair's ratio moments.
    pub exact_variance_real: f64,
}

/// Pairs pooled by fidelity bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub bin_lower: f64,
    pub bin_upper: f64,
    pub bin_center: f64,
    pub pairs: usize,
    pub estimates: usize,
    pub mean_oracle_fidelity: f64,
    pub empirical_variance: f64,
    pub analytic_variance: f64,
    pub standard_error: f64,
    /// `(empirical - analytic) / standard_error`; absent when the standard
    /// error is zero.
    pub z_score: Option<f64>,
    pub empirical_variance_real: f64,
    pub exact_variance_real: f64,
    pub standard_error_real: f64,
    pub z_score_real: Option<f64>,
}

impl VarianceRow {
    /// `|empirical - analytic| ≤ k · standard_error`, with exact agreement
    /// required when the standard error vanishes.
    pub fn within(&self, k: f64) -> bool {
        (self.empirical_variance - self.analytic_variance).abs() <= k * self.standard_error + ROUNDOFF_FLOOR
    }

    /// The same check for the real part against its exact variance.
    pub fn within_real(&self, k: f64) -> bool {
        (self.empirical_variance_real - self.exact_variance_real).abs()
            <= k * self.standard_error_real + ROUNDOFF_FLOOR
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceTable {
    pub mode: Mode,
    pub samples: usize,
    pub rows: Vec<VarianceRow>,
    pub pair_rows: Vec<VariancePairRow>,
}

/// Bounds and observed errors pooled by fidelity bin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BinRow {
    pub bin_lower: f64,
    pub bin_upper: f64,
    pub bin_center: f64,
    pub count: usize,
    pub pairs: usize,
    pub mean_oracle_fidelity: f64,
    pub mean_abs_fidelity_error: f64,
    pub mean_abs_overlap_error: f64,
    /// Root mean square of `F̂ - F`: the spread of a single estimate.
    pub fidelity_error_rms: f64,
    /// Mean over the bin's pairs of the unbiased variance of `F̂`.
    pub empirical_variance: f64,
    /// Fraction of estimates with `|F̂ - F|` at or beyond the fidelity
    /// bound of the mode: `ε'` (general) or `2ε sqrt(F) + ε²` (normalized).
    pub fidelity_failure_rate: f64,
    /// Fraction of overlap estimates outside their region: the disk of
    /// radius `ε` (normalized) or the magnitude-phase sector (general).
    pub overlap_failure_rate: f64,
    /// `δ + 3 sqrt(δ(1 - δ)/count)`.
    pub coverage_tolerance: f64,
    /// `ε'` at the bin center.
    pub epsilon_prime: f64,
    /// `ε` at the bin center, with all samples on one side.
    pub epsilon: f64,
    /// `2ε sqrt(F) + ε²` at the bin center.
    pub normalized_fidelity_halfwidth: f64,
}

impl BinRow {
    /// Mode-appropriate coverage failure rate and the analytic curve the
    /// mean error is compared with.
    pub fn coverage(&self, mode: Mode) -> (f64, f64, f64) {
        match mode {
            Mode::General => (self.fidelity_failure_rate, self.mean_abs_fidelity_error, self.epsilon_prime),
            Mode::Normalized => (self.overlap_failure_rate, self.mean_abs_overlap_error, self.epsilon),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinnedResult {
    pub mode: Mode,
    pub samples: usize,
    pub delta: f64,
    pub bin_width: f64,
    pub rows: Vec<BinRow>,
}

impl BinnedResult {
    pub fn total_count(&self) -> usize {
        self.rows.iter().map(|r| r.count).sum()
    }
}

/// Mean fidelity error at one sample count or system size.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorRow {
    pub sites: usize,
    pub samples: usize,
    pub pairs: usize,
    pub estimates: usize,
    pub mean_oracle_fidelity: f64,
    pub mean_abs_fidelity_error: f64,
    /// Spread of the per-pair mean errors over `sqrt(pairs)`, so that
    /// differences between pairs count as noise; with one pair, the spread
    /// of single errors over `sqrt(estimates)`.
    pub standard_error: f64,
    /// `ε'` (general) or `2ε sqrt(F) + ε²` (normalized) at the mean fidelity.
    pub fidelity_bound: f64,
}

/// Least-squares line through `(ln n, ln error)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Absent with fewer than three points.
    pub slope_standard_error: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingResult {
    pub mode: Mode,
    pub rows: Vec<ErrorRow>,
    /// Absent for a single-point grid.
    pub fit: Option<LogLogFit>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizeResult {
    pub mode: Mode,
    pub rows: Vec<ErrorRow>,
    /// Largest `|e_i - e_j| / sqrt(se_i² + se_j²)` over pairs of sizes.
    pub max_pairwise_z: Option<f64>,
}

fn group_by_pair(records: &[EstimateRecord]) -> BTreeMap<usize, Vec<&EstimateRecord>> {
    let mut groups: BTreeMap<usize, Vec<&EstimateRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.pair).or_default().push(r);
    }
    groups
}

fn bin_edges(spec: &ExperimentSpec, bin: usize) -> (f64, f64, f64) {
    let w = spec.bin_width();
    let lo = bin as f64 * w;
    (lo, lo + w, lo + 0.5 * w)
}

fn mean(xs: impl IntoIterator<Item = f64>) -> f64 {
    let v: Vec<f64> = xs.into_iter().collect();
    mean_var(&v).0
}

/// Standard error of an unbiased variance from the squared deviations about
/// the sample mean.
fn unbiased_variance_error(sq_devs: &[f64]) -> f64 {
    let n = sq_devs.len() as f64;
    variance_standard_error(sq_devs).unwrap_or(0.0) * n / (n - 1.0)
}

/// Per-pair variance rows from a set of records.
pub fn variance_pair_rows(
    spec: &ExperimentSpec,
    pairs: &[PairInfo],
    records: &[EstimateRecord],
) -> Result<Vec<VariancePairRow>> {
    group_by_pair(records)
        .into_iter()
        .map(|(pair, rs)| {
            let info = pairs
                .iter()
                .find(|p| p.index == pair && p.sites == rs[0].sites)
                .ok_or_else(|| Error::invalid(format!("no pair info for pair {pair}")))?;
            let xs: Vec<Complex64> = rs.iter().map(|r| r.statistic()).collect();
            let m = xs.iter().sum::<Complex64>() / xs.len() as f64;
            let sq: Vec<f64> = xs.iter().map(|x| (x - m).norm_sqr()).collect();
            let reals: Vec<f64> = xs.iter().map(|x| x.re).collect();
            let mean_re = m.re;
            let sq_re: Vec<f64> = reals.iter().map(|x| (x - mean_re).powi(2)).collect();
            let f = rs[0].oracle_fidelity.clamp(0.0, 1.0);
            let (n1, n2) = (rs[0].n1, rs[0].n2);
            let (analytic, exact_real) = match spec.mode {
                Mode::Normalized => ((1.0 - f) / n1 as f64, info.exact.y1_real_variance(n1)),
                Mode::General => (
                    variance_fidelity(f, n1 as u64, n2 as u64)?,
                    info.exact.product_real_variance(n1, n2),
                ),
            };
            Ok(VariancePairRow {
                pair,
                oracle_fidelity: rs[0].oracle_fidelity,
                repetitions: xs.len(),
                empirical_variance: complex_var(&xs).unwrap_or(0.0),
                standard_error: unbiased_variance_error(&sq),
                analytic_variance: analytic,
                empirical_variance_real: mean_var(&reals).1.unwrap_or(0.0),
                standard_error_real: unbiased_variance_error(&sq_re),
                exact_variance_real: exact_real,
            })
        })
        .collect()
}

/// Empirical variance of `Y₁` (normalized mode) or of `Y₁Y₂` (general
/// mode) over repetitions, against `(1 - F)/n` and the two-sided formula.
pub fn run_variance_experiment(spec: &ExperimentSpec) -> Result<(Vec<PairInfo>, Vec<EstimateRecord>, VarianceTable)> {
    let pairs = prepare_pairs(spec, spec.sites)?;
    let records = run_estimates(spec, &pairs, spec.samples, &estimate_stream(spec, 0))?;
    let infos: Vec<PairInfo> = pairs.into_iter().map(|p| p.info).collect();
    let table = variance_table(spec, &infos, &records)?;
    Ok((infos, records, table))
}

/// Variance table from existing records.
pub fn variance_table(spec: &ExperimentSpec, pairs: &[PairInfo], records: &[EstimateRecord]) -> Result<VarianceTable> {
    let pair_rows = variance_pair_rows(spec, pairs, records)?;
    let mut bins: BTreeMap<usize, Vec<&VariancePairRow>> = BTreeMap::new();
    for row in &pair_rows {
        bins.entry(spec.bin_of(row.oracle_fidelity)).or_default().push(row);
    }
    let rows = bins
        .into_iter()
        .map(|(bin, rs)| {
            let (bin_lower, bin_upper, bin_center) = bin_edges(spec, bin);
            let k = rs.len() as f64;
            let empirical_variance = mean(rs.iter().map(|r| r.empirical_variance));
            let analytic_variance = mean(rs.iter().map(|r| r.analytic_variance));
            let pooled = |se: fn(&VariancePairRow) -> f64| rs.iter().map(|r| se(r).powi(2)).sum::<f64>().sqrt() / k;
            let standard_error = pooled(|r| r.standard_error);
            let standard_error_real = pooled(|r| r.standard_error_real);
            let empirical_variance_real = mean(rs.iter().map(|r| r.empirical_variance_real));
            let exact_variance_real = mean(rs.iter().map(|r| r.exact_variance_real));
            VarianceRow {
                bin_lower,
                bin_upper,
                bin_center,
                pairs: rs.len(),
                estimates: rs.iter().map(|r| r.repetitions).sum(),
                mean_oracle_fidelity: mean(rs.iter().map(|r| r.oracle_fidelity)),
                empirical_variance,
                analytic_variance,
                standard_error,
                z_score: (standard_error > 0.0).then(|| (empirical_variance - analytic_variance) / standard_error),
                empirical_variance_real,
                exact_variance_real,
                standard_error_real,
                z_score_real: (standard_error_real > 0.0)
                    .then(|| (empirical_variance_real - exact_variance_real) / standard_error_real),
            }
        })
        .collect();
    Ok(VarianceTable {
        mode: spec.mode,
        samples: spec.samples,
        rows,
        pair_rows,
    })
}

/// Observed errors and Chebyshev failure rates per fidelity bin, with the
/// analytic bound curves at each bin center.
pub fn run_bound_experiment(spec: &ExperimentSpec) -> Result<(Vec<PairInfo>, Vec<EstimateRecord>, BinnedResult)> {
    let pairs = prepare_pairs(spec, spec.sites)?;
    let records = run_estimates(spec, &pairs, spec.samples, &estimate_stream(spec, 0))?;
    let result = binned_result(spec, &records)?;
    Ok((pairs.into_iter().map(|p| p.info).collect(), records, result))
}

struct Judged {
    fidelity_error: f64,
    signed_error: f64,
    overlap_error: f64,
    fidelity_fail: bool,
    overlap_fail: bool,
}

fn judge(spec: &ExperimentSpec, r: &EstimateRecord) -> Result<Judged> {
    let f = r.oracle_fidelity.clamp(0.0, 1.0);
    let fidelity_error = r.fidelity_error();
    let overlap_error = r.overlap_error();
    let (fidelity_fail, overlap_fail) = match spec.mode {
        Mode::Normalized => {
            let eps = epsilon_normalized(f, r.n1 as u64, spec.delta)?;
            let half = fidelity_halfwidth_normalized(f, eps)?;
            (exceeds(fidelity_error, half), exceeds(overlap_error, eps))
        }
        Mode::General => {
            let n = (r.n1 + r.n2) as u64;
            let eps = epsilon_prime(f, n, spec.delta)?;
            let interval = overlap_magnitude_interval(f, eps)?;
            let alpha = phase_halfwidth(f, n, spec.delta)?;
            let inside = overlap_error <= ROUNDOFF_FLOOR
                || overlap_region_contains(r.oracle_overlap, interval, alpha, r.overlap);
            (exceeds(fidelity_error, eps), !inside)
        }
    };
    Ok(Judged {
        fidelity_error,
        signed_error: r.fidelity - f,
        overlap_error,
        fidelity_fail,
        overlap_fail,
    })
}

/// Binned coverage summary from existing records.
pub fn binned_result(spec: &ExperimentSpec, records: &[EstimateRecord]) -> Result<BinnedResult> {
    let mut bins: BTreeMap<usize, Vec<&EstimateRecord>> = BTreeMap::new();
    for r in records {
        bins.entry(spec.bin_of(r.oracle_fidelity)).or_default().push(r);
    }
    let (n1, n2) = spec.split();
    let total = (n1 + n2) as u64;
    let rows = bins
        .into_iter()
        .map(|(bin, rs)| {
            let (bin_lower, bin_upper, bin_center) = bin_edges(spec, bin);
            let judged = rs.iter().map(|r| judge(spec, r)).collect::<Result<Vec<_>>>()?;
            let count = rs.len();
            let c = count as f64;
            let pair_vars: Vec<f64> = group_by_pair(&rs.iter().map(|r| **r).collect::<Vec<_>>())
                .values()
                .map(|g| mean_var(&g.iter().map(|r| r.fidelity).collect::<Vec<_>>()).1.unwrap_or(0.0))
                .collect();
            let eps = epsilon_normalized(bin_center, total, spec.delta)?;
            Ok(BinRow {
                bin_lower,
                bin_upper,
                bin_center,
                count,
                pairs: pair_vars.len(),
                mean_oracle_fidelity: mean(rs.iter().map(|r| r.oracle_fidelity)),
                mean_abs_fidelity_error: mean(judged.iter().map(|j| j.fidelity_error)),
                mean_abs_overlap_error: mean(judged.iter().map(|j| j.overlap_error)),
                fidelity_error_rms: mean(judged.iter().map(|j| j.signed_error.powi(2))).sqrt(),
                empirical_variance: mean(pair_vars.iter().copied()),
                fidelity_failure_rate: judged.iter().filter(|j| j.fidelity_fail).count() as f64 / c,
                overlap_failure_rate: judged.iter().filter(|j| j.overlap_fail).count() as f64 / c,
                coverage_tolerance: spec.delta + 3.0 * (spec.delta * (1.0 - spec.delta) / c).sqrt(),
                epsilon_prime: epsilon_prime(bin_center, total, spec.delta)?,
                epsilon: eps,
                normalized_fidelity_halfwidth: fidelity_halfwidth_normalized(bin_center, eps)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BinnedResult {
        mode: spec.mode,
        samples: spec.samples,
        delta: spec.delta,
        bin_width: spec.bin_width(),
        rows,
    })
}

fn error_row(spec: &ExperimentSpec, sites: usize, samples: usize, records: &[EstimateRecord]) -> Result<ErrorRow> {
    let groups = group_by_pair(records);
    let errors: Vec<f64> = records.iter().map(|r| r.fidelity_error()).collect();
    let (mean_error, var) = mean_var(&errors);
    let pair_means: Vec<f64> = groups
        .values()
        .map(|g| mean(g.iter().map(|r| r.fidelity_error())))
        .collect();
    let standard_error = if pair_means.len() >= 2 {
        let (_, v) = mean_var(&pair_means);
        (v.unwrap_or(0.0) / pair_means.len() as f64).sqrt()
    } else {
        (var.unwrap_or(0.0) / errors.len() as f64).sqrt()
    };
    let f = mean(records.iter().map(|r| r.oracle_fidelity.clamp(0.0, 1.0)));
    let fidelity_bound = match spec.mode {
        Mode::General => epsilon_prime(f, samples as u64, spec.delta)?,
        Mode::Normalized => fidelity_halfwidth_normalized(f, epsilon_normalized(f, samples as u64, spec.delta)?)?,
    };
    Ok(ErrorRow {
        sites,
        samples,
        pairs: groups.len(),
        estimates: records.len(),
        mean_oracle_fidelity: f,
        mean_abs_fidelity_error: mean_error,
        standard_error,
        fidelity_bound,
    })
}

/// Ordinary least squares of `ln error` on `ln n`.
pub fn log_log_fit(points: &[(f64, f64)]) -> Option<LogLogFit> {
    if points.len() < 2 || points.iter().any(|&(x, y)| x <= 0.0 || y <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_standard_error = (xs.len() >= 3).then(|| {
        let rss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
        (rss / (m - 2.0) / sxx).sqrt()
    });
    Some(LogLogFit {
        slope,
        intercept,
        slope_standard_error,
    })
}

/// Mean fidelity error over the spec's pairs for every `n` in the sample
/// grid, and the slope of `ln error` against `ln n`. The same pairs are
/// used at every `n`, with independent random streams.
pub fn run_scaling_experiment(spec: &ExperimentSpec) -> Result<(Vec<PairInfo>, Vec<EstimateRecord>, ScalingResult)> {
    let pairs = prepare_pairs(spec, spec.sites)?;
    let mut all = Vec::new();
    let mut rows = Vec::new();
    for (stage, &n) in spec.sample_grid.iter().enumerate() {
        let records = run_estimates(spec, &pairs, n, &estimate_stream(spec, stage as u64))?;
        rows.push(error_row(spec, spec.sites, n, &records)?);
        all.extend(records);
    }
    let fit = if rows.len() > 1 {
        log_log_fit(&rows.iter().map(|r| (r.samples as f64, r.mean_abs_fidelity_error)).collect::<Vec<_>>())
    } else {
        None
    };
    Ok((
        pairs.into_iter().map(|p| p.info).collect(),
        all,
        ScalingResult {
            mode: spec.mode,
            rows,
            fit,
        },
    ))
}

/// Largest standardized difference between any two rows.
pub fn max_pairwise_z(rows: &[ErrorRow]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for (i, a) in rows.iter().enumerate() {
        for b in &rows[i + 1..] {
            let se = (a.standard_error.powi(2) + b.standard_error.powi(2)).sqrt();
            let d = (a.mean_abs_fidelity_error - b.mean_abs_fidelity_error).abs();
            let z = if se > 0.0 {
                d / se
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            };
            best = Some(best.map_or(z, |m: f64| m.max(z)));
        }
    }
    best
}

/// Mean fidelity error for every system size in the length grid, with
/// fresh pairs calibrated to the same fidelity targets at each size.
pub fn run_size_experiment(spec: &ExperimentSpec) -> Result<(Vec<PairInfo>, Vec<EstimateRecord>, SizeResult)> {
    spec.validate()?;
    let mut infos = Vec::new();
    let mut all = Vec::new();
    let mut rows = Vec::new();
    for &sites in &spec.length_grid {
        let pairs = prepare_pairs(spec, sites)?;
        let records = run_estimates(spec, &pairs, spec.samples, &estimate_stream(spec, sites as u64))?;
        rows.push(error_row(spec, sites, spec.samples, &records)?);
        infos.extend(pairs.into_iter().map(|p| p.info));
        all.extend(records);
    }
    let max_pairwise_z = max_pairwise_z(&rows);
    Ok((
        infos,
        all,
        SizeResult {
            mode: spec.mode,
            rows,
            max_pairwise_z,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::AnsatzKind;

    fn small(kind: AnsatzKind) -> ExperimentSpec {
        ExperimentSpec {
            sites: 6,
            samples: 512,
            repetitions: 40,
            pairs: 4,
            ..ExperimentSpec::new(kind)
        }
    }

    #[test]
    fn unit_fidelity_pair_has_zero_variance_and_error() {
        for kind in [AnsatzKind::Rbm, AnsatzKind::Arnn] {
            let spec = small(kind);
            let (_, records, table) = run_variance_experiment(&spec).unwrap();
            let top = table.pair_rows.iter().find(|r| r.pair == 3).unwrap();
            assert!((top.oracle_fidelity - 1.0).abs() < 1e-12);
            assert_eq!(top.empirical_variance, 0.0);
            assert!(top.analytic_variance < 1e-12);
            let binned = binned_result(&spec, &records).unwrap();
            let last = binned.rows.last().unwrap();
            assert!(last.mean_abs_fidelity_error < 1e-8);
            assert_eq!(last.fidelity_failure_rate, 0.0);
        }
    }

    #[test]
    fn counts_add_up_and_rates_are_fractions() {
        let spec = small(AnsatzKind::Rbm);
        let (_, records, binned) = run_bound_experiment(&spec).unwrap();
        assert_eq!(binned.total_count(), records.len());
        for row in &binned.rows {
            assert!((0.0..=1.0).contains(&row.fidelity_failure_rate));
            assert!((0.0..=1.0).contains(&row.overlap_failure_rate));
            assert!(row.bin_lower <= row.mean_oracle_fidelity && row.mean_oracle_fidelity <= row.bin_upper);
        }
    }

    #[test]
    fn bound_curves_do_not_depend_on_size() {
        let mut spec = small(AnsatzKind::Arnn);
        spec.pairs = 2;
        spec.repetitions = 2;
        let (_, r6, a) = run_bound_experiment(&spec).unwrap();
        spec.sites = 8;
        let (_, r8, b) = run_bound_experiment(&spec).unwrap();
        assert_eq!(r6.len(), r8.len());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.epsilon_prime, y.epsilon_prime);
            assert_eq!(x.epsilon, y.epsilon);
        }
    }

    #[test]
    fn fit_recovers_a_power_law() {
        let pts: Vec<(f64, f64)> = (8..=16).map(|k| (2f64.powi(k), 3.0 * 2f64.powi(k).powf(-0.5))).collect();
        let fit = log_log_fit(&pts).unwrap();
        assert!((fit.slope + 0.5).abs() < 1e-12);
        assert!((fit.intercept - 3f64.ln()).abs() < 1e-12);
        assert!(fit.slope_standard_error.unwrap() < 1e-10);
        assert!(log_log_fit(&pts[..1]).is_none());
    }

    #[test]
    fn single_point_grid_skips_the_fit() {
        let spec = ExperimentSpec {
            sample_grid: vec![256],
            fidelity_window: (0.45, 0.55),
            repetitions: 4,
            pairs: 2,
            ..small(AnsatzKind::Rbm)
        };
        let (_, _, res) = run_scaling_experiment(&spec).unwrap();
        assert_eq!(res.rows.len(), 1);
        assert!(res.fit.is_none());
    }

    #[test]
    fn pairwise_z_is_symmetric_and_zero_for_equal_rows() {
        let row = ErrorRow {
            sites: 4,
            samples: 10,
            pairs: 1,
            estimates: 10,
            mean_oracle_fidelity: 0.5,
            mean_abs_fidelity_error: 0.1,
            standard_error: 0.01,
            fidelity_bound: 0.3,
        };
        let other = ErrorRow {
            mean_abs_fidelity_error: 0.13,
            ..row
        };
        assert_eq!(max_pairwise_z(&[row, row]), Some(0.0));
        let z = max_pairwise_z(&[row, other]).unwrap();
        assert!((z - 0.03 / 2e-4f64.sqrt()).abs() < 1e-9);
        assert_eq!(max_pairwise_z(&[other, row]), Some(z));
        assert_eq!(max_pairwise_z(&[row]), None);
    }

    #[test]
    fn exceeds_ignores_roundoff() {
        assert!(!exceeds(1e-16, 0.0));
        assert!(exceeds(0.1, 0.1));
        assert!(!exceeds(0.05, 0.1));
    }
}
