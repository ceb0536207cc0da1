//! End-to-end acceptance checks. Every criterion prints one
//! `criterion N: PASS|FAIL ...` line before asserting, so
//! `cargo test --test acceptance -- --nocapture` gives a readable summary.

use std::sync::{Mutex, MutexGuard, OnceLock};
use std::time::Instant;

use num_complex::Complex64;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use nqs_overlap::ansatz::{init_random_with, AnsatzKind, ArnnInit, Nqs, Scaled};
use nqs_overlap::bench::experiments::{binned_result, variance_table};
use nqs_overlap::bench::{
    estimate_stream, generate_state_pair, prepare_pairs, run_estimates, run_scaling_experiment, run_size_experiment,
    EstimateRecord, ExperimentSpec, PairInfo,
};
use nqs_overlap::bounds::{epsilon_prime, median_delta_window, variance_fidelity};
use nqs_overlap::configspace::RandomStream;
use nqs_overlap::estimator::estimate_from_batches;
use nqs_overlap::oracle::exact_probabilities;
use nqs_overlap::sampling::{sample, sample_exact_autoregressive, sample_metropolis, ChainSettings};
use nqs_overlap::tabulated::Tabulated;

const KINDS: [AnsatzKind; 2] = [AnsatzKind::Arnn, AnsatzKind::Rbm];

/// Criteria run one at a time so that each runtime is measured alone.
fn serial() -> MutexGuard<'static, ()> {
    static LOCK: Mutex<()> = Mutex::new(());
    LOCK.lock().unwrap_or_else(|e| e.into_inner())
}

fn verdict(criterion: u32, pass: bool, detail: &str) {
    println!("criterion {criterion}: {} {detail}", if pass { "PASS" } else { "FAIL" });
}

#[test]
fn criterion_1_variance_identity() {
    let _serial = serial();
    let start = Instant::now();
    let mut worst_abs: f64 = 0.0;
    let mut worst_rel: f64 = 0.0;
    for seed in 0..20u64 {
        let t = 0.1 + 0.15 * seed as f64;
        for init in [ArnnInit::Positive, ArnnInit::Symmetric] {
            let pair = generate_state_pair(AnsatzKind::Arnn, init, 12, t, seed).unwrap();
            let e = pair.exact;
            worst_abs = worst_abs.max((e.var_z - (1.0 - e.fidelity)).abs());
        }
        let pair = generate_state_pair(AnsatzKind::Rbm, ArnnInit::Positive, 12, 2.0 * t, seed).unwrap();
        let e = pair.exact;
        let expected = e.norm_ratio() * (1.0 - e.fidelity);
        worst_rel = worst_rel.max((e.var_z - expected).abs() / expected.abs().max(f64::MIN_POSITIVE));
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst_abs <= 1e-10 && worst_rel <= 1e-10 && secs < 120.0;
    verdict(
        1,
        pass,
        &format!("ARNN max |Var Z - (1-F)| = {worst_abs:.2e}; RBM max relative error = {worst_rel:.2e}; {secs:.1}s"),
    );
    assert!(pass);
}

/// Desk-scale runs shared by the variance and coverage criteria.
struct DeskRun {
    spec: ExperimentSpec,
    pairs: Vec<PairInfo>,
    records: Vec<EstimateRecord>,
    seconds: f64,
}

fn desk_runs() -> &'static [DeskRun] {
    static RUNS: OnceLock<Vec<DeskRun>> = OnceLock::new();
    RUNS.get_or_init(|| {
        KINDS
            .iter()
            .map(|&kind| {
                let start = Instant::now();
                let spec = ExperimentSpec {
                    pairs: 25,
                    ..ExperimentSpec::new(kind)
                };
                let prepared = prepare_pairs(&spec, spec.sites).unwrap();
                let records = run_estimates(&spec, &prepared, spec.samples, &estimate_stream(&spec, 0)).unwrap();
                DeskRun {
                    pairs: prepared.into_iter().map(|p| p.info).collect(),
                    records,
                    seconds: start.elapsed().as_secs_f64(),
                    spec,
                }
            })
            .collect()
    })
}

#[test]
fn criterion_2_variance_matches_prediction() {
    let _serial = serial();
    let mut pass = true;
    let mut details = Vec::new();
    for run in desk_runs() {
        let table = variance_table(&run.spec, &run.pairs, &run.records).unwrap();
        let bins_ok = table.rows.iter().all(|r| r.within(5.0) && r.within_real(5.0));
        let worst = |z: fn(&nqs_overlap::bench::VarianceRow) -> Option<f64>| {
            table.rows.iter().filter_map(z).fold(0.0f64, |m, z| m.max(z.abs()))
        };
        pass &= bins_ok;
        details.push(format!(
            "{} ({:?}): {} bins, max |z| complex {:.2}, real {:.2}",
            run.spec.ansatz,
            table.mode,
            table.rows.len(),
            worst(|r| r.z_score),
            worst(|r| r.z_score_real),
        ));
    }
    let secs: f64 = desk_runs().iter().map(|r| r.seconds).sum();
    pass &= secs < 600.0;
    verdict(2, pass, &format!("{}; {secs:.0}s", details.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_3_chebyshev_coverage() {
    let _serial = serial();
    let mut pass = true;
    let mut details = Vec::new();
    for run in desk_runs() {
        let result = binned_result(&run.spec, &run.records).unwrap();
        let mut worst_rate: f64 = 0.0;
        let mut worst_ratio: f64 = 0.0;
        for row in &result.rows {
            let (rate, mean_error, curve) = row.coverage(result.mode);
            pass &= rate <= row.coverage_tolerance;
            pass &= mean_error <= curve || mean_error <= nqs_overlap::bench::ROUNDOFF_FLOOR;
            worst_rate = worst_rate.max(rate);
            if curve > 0.0 {
                worst_ratio = worst_ratio.max(mean_error / curve);
            }
        }
        details.push(format!(
            "{} ({:?}): {} bins, max failure rate {:.2}, max mean error / bound {:.2}",
            run.spec.ansatz,
            result.mode,
            result.rows.len(),
            worst_rate,
            worst_ratio
        ));
    }
    let secs: f64 = desk_runs().iter().map(|r| r.seconds).sum();
    pass &= secs < 600.0;
    verdict(3, pass, &format!("{}; {secs:.0}s shared with criterion 2", details.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_4_inverse_sqrt_scaling() {
    let _serial = serial();
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for kind in KINDS {
        let spec = ExperimentSpec::mid_fidelity(kind);
        let (_, _, result) = run_scaling_experiment(&spec).unwrap();
        let fit = result.fit.expect("grid has several points");
        pass &= (fit.slope + 0.5).abs() <= 0.1;
        details.push(format!(
            "{kind}: slope {:.3} ± {:.3}",
            fit.slope,
            fit.slope_standard_error.unwrap_or(f64::NAN)
        ));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 900.0;
    verdict(4, pass, &format!("{}; {secs:.0}s", details.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_5_size_independence() {
    let _serial = serial();
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    for kind in KINDS {
        let spec = ExperimentSpec::mid_fidelity(kind);
        let (_, _, result) = run_size_experiment(&spec).unwrap();
        let z = result.max_pairwise_z.expect("several sizes");
        pass &= z < 3.0;
        let errors: Vec<String> = result
            .rows
            .iter()
            .map(|r| format!("L={} {:.2e}", r.sites, r.mean_abs_fidelity_error))
            .collect();
        details.push(format!("{kind}: max pairwise z {z:.2} ({})", errors.join(", ")));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 900.0;
    verdict(5, pass, &format!("{}; {secs:.0}s", details.join("; ")));
    assert!(pass);
}

#[test]
fn criterion_6_bound_algebra() {
    let _serial = serial();
    let start = Instant::now();
    let eps = epsilon_prime(0.5, 65536, 0.32).unwrap();
    let eps_ok = (eps - 6.906e-3).abs() <= 1e-6;

    let (lo, hi) = median_delta_window(0.25).unwrap();
    let three_figures = |x: f64, target: f64| {
        let scale = 10f64.powi(2 - target.log10().floor() as i32);
        (x * scale).round() == (target * scale).round()
    };
    let roots_ok = three_figures(lo, 0.00263) && three_figures(hi, 0.984);

    let mut split_ok = true;
    for k in 0..100 {
        let f = k as f64 / 100.0;
        let best = (1..100u64)
            .min_by(|&a, &b| {
                let va = variance_fidelity(f, a, 100 - a).unwrap();
                let vb = variance_fidelity(f, b, 100 - b).unwrap();
                va.total_cmp(&vb)
            })
            .unwrap();
        split_ok &= best == 50;
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = eps_ok && roots_ok && split_ok && secs < 1.0;
    verdict(
        6,
        pass,
        &format!("eps' = {eps:.6e}; delta window [{lo:.5}, {hi:.4}]; even split optimal: {split_ok}; {secs:.3}s"),
    );
    assert!(pass);
}

#[test]
fn criterion_7_scale_invariance() {
    let _serial = serial();
    let start = Instant::now();
    let offsets = [
        Complex64::new(0.0, 1.0),
        Complex64::new(3.7, -2.2),
        Complex64::new(-45.0, 0.4),
        Complex64::new(120.0, 3.0),
    ];
    let mut worst: f64 = 0.0;
    for kind in KINDS {
        let pair = generate_state_pair(kind, ArnnInit::Symmetric, 10, 0.8, 3).unwrap();
        let (psi0, phi0) = (Tabulated::new(&pair.psi).unwrap(), Tabulated::new(&pair.phi).unwrap());
        let settings = ChainSettings::default();
        let from_phi = sample(&phi0, 4096, &settings, &mut RandomStream::new(1)).unwrap();
        let from_psi = sample(&psi0, 4096, &settings, &mut RandomStream::new(2)).unwrap();
        let base = estimate_from_batches(&psi0, &phi0, &from_phi, &from_psi).unwrap().fidelity;
        for c in offsets {
            let psi = Scaled::new(&psi0, c);
            let phi = Scaled::new(&phi0, c.conj());
            let cases: [(&dyn Nqs, &dyn Nqs); 3] = [(&psi, &phi0), (&psi0, &phi), (&psi, &phi)];
            for (a, b) in cases {
                let f = estimate_from_batches(a, b, &from_phi, &from_psi).unwrap().fidelity;
                worst = worst.max((f - base).abs() / base.abs());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let pass = worst <= 1e-12 && secs < 1.0;
    verdict(7, pass, &format!("max relative change of Re(Y1 Y2) = {worst:.2e}; {secs:.3}s"));
    assert!(pass);
}

/// Pearson statistic with cells of expected count below 5 pooled into one.
fn chi_square(counts: &[u64], probs: &[f64], n: u64) -> (f64, f64) {
    let (mut stat, mut cells) = (0.0, 0usize);
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&k, &p) in counts.iter().zip(probs) {
        let expected = p * n as f64;
        if expected < 5.0 {
            pooled_obs += k as f64;
            pooled_exp += expected;
        } else {
            stat += (k as f64 - expected).powi(2) / expected;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    let df = (cells - 1) as f64;
    (stat, ChiSquared::new(df).unwrap().inverse_cdf(1.0 - 0.001))
}

fn histogram(configs: &[nqs_overlap::configspace::SpinConfiguration], sites: usize) -> Vec<u64> {
    let mut counts = vec![0u64; 1 << sites];
    for c in configs {
        counts[c.pack() as usize] += 1;
    }
    counts
}

#[test]
fn criterion_8_sampler_fidelity() {
    let _serial = serial();
    let start = Instant::now();
    let mut pass = true;
    let mut details = Vec::new();
    let n = 1_000_000;
    for (init, seed) in [(ArnnInit::Positive, 1u64), (ArnnInit::Symmetric, 2)] {
        let arnn = init_random_with(AnsatzKind::Arnn, 10, seed, init).unwrap();
        let probs = exact_probabilities(&arnn).unwrap();
        let batch = sample_exact_autoregressive(&arnn, n, &mut RandomStream::new(seed + 100)).unwrap();
        let (stat, critical) = chi_square(&histogram(batch.configurations(), 10), &probs, n as u64);
        pass &= stat < critical;
        details.push(format!("ARNN {init} chi2 {stat:.1} < {critical:.1}"));
    }
    let settings = ChainSettings::default();
    let states = [
        init_random_with(AnsatzKind::Rbm, 8, 3, ArnnInit::Positive).unwrap(),
        generate_state_pair(AnsatzKind::Rbm, ArnnInit::Positive, 8, 4.0, 4).unwrap().phi,
        init_random_with(AnsatzKind::Arnn, 8, 5, ArnnInit::Symmetric).unwrap(),
    ];
    for (k, state) in states.iter().enumerate() {
        let probs = exact_probabilities(state).unwrap();
        let m = 200_000;
        let batch = sample_metropolis(state, m, &settings, &mut RandomStream::new(200 + k as u64)).unwrap();
        let tv = 0.5
            * histogram(batch.configurations(), 8)
                .iter()
                .zip(&probs)
                .map(|(&c, &p)| (c as f64 / m as f64 - p).abs())
                .sum::<f64>();
        pass &= tv < 0.02;
        details.push(format!("Metropolis {} TV {tv:.4}", state.kind()));
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 300.0;
    verdict(8, pass, &format!("{}; {secs:.0}s", details.join("; ")));
    assert!(pass);
}
