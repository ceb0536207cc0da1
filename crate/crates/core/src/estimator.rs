//! Monte Carlo estimators of overlap and fidelity.
//!
//! With `s ~ |φ|²/N_φ` the ratio `Z = ψ(s)/φ(s)` has mean `√(N_ψ/N_φ)⟨φ|ψ⟩`,
//! and with `s ~ |ψ|²/N_ψ` the ratio `W = φ(s)/ψ(s)` has mean
//! `√(N_φ/N_ψ)⟨ψ|φ⟩`. The product of the two sample means is an unbiased
//! estimate of the fidelity in which the unknown norms cancel.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ansatz::Nqs;
use crate::configspace::{RandomStream, SpinConfiguration};
use crate::error::{Error, Result};
use crate::numeric::ComplexSum;
use crate::sampling::{sample, ChainSettings, SampleBatch};

/// Log-ratios with real part above this are clamped before exponentiating.
pub const LOG_RATIO_CEILING: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioMean {
    pub value: Complex64,
    pub samples: usize,
    /// Terms whose log-ratio had to be clamped at [`LOG_RATIO_CEILING`].
    pub overflow_count: usize,
}

/// Sample mean of `num(s)/den(s)` over `batch`.
///
/// A zero numerator contributes zero. A zero denominator at a sampled
/// configuration cannot happen under the sampling distribution and is
/// reported as an error.
pub fn ratio_mean(num: &dyn Nqs, den: &dyn Nqs, batch: &SampleBatch) -> Result<RatioMean> {
    check_sites(num, den, batch)?;
    let mut sum = ComplexSum::new();
    let mut overflow_count = 0;
    for (i, s) in batch.configurations().iter().enumerate() {
        let (term, clamped) = ratio_term(num, den, s).ok_or(Error::ZeroDenominator(i))?;
        overflow_count += usize::from(clamped);
        sum.add(term);
    }
    let samples = batch.len();
    Ok(RatioMean {
        value: sum.value() / samples as f64,
        samples,
        overflow_count,
    })
}

fn ratio_term(num: &dyn Nqs, den: &dyn Nqs, s: &SpinConfiguration) -> Option<(Complex64, bool)> {
    let d = den.log_amplitude(s);
    if d.re == f64::NEG_INFINITY {
        return None;
    }
    let n = num.log_amplitude(s);
    if n.re == f64::NEG_INFINITY {
        return Some((Complex64::new(0.0, 0.0), false));
    }
    let delta = n - d;
    let clamped = delta.re > LOG_RATIO_CEILING;
    let re = delta.re.min(LOG_RATIO_CEILING);
    Some((Complex64::from_polar(re.exp(), delta.im), clamped))
}

fn check_sites(a: &dyn Nqs, b: &dyn Nqs, batch: &SampleBatch) -> Result<()> {
    if a.num_sites() != b.num_sites() {
        return Err(Error::SiteCount(a.num_sites(), b.num_sites()));
    }
    match batch.configurations().first() {
        None => Err(Error::EmptyBatch),
        Some(c) if c.len() != a.num_sites() => Err(Error::DimensionMismatch {
            expected: a.num_sites(),
            actual: c.len(),
        }),
        Some(_) => Ok(()),
    }
}

/// `Y₁`: mean of `ψ/φ` over samples drawn from `|φ|²`.
pub fn estimate_y1(psi: &dyn Nqs, phi: &dyn Nqs, from_phi: &SampleBatch) -> Result<RatioMean> {
    ratio_mean(psi, phi, from_phi)
}

/// `Y₂`: mean of `φ/ψ` over samples drawn from `|ψ|²`.
pub fn estimate_y2(psi: &dyn Nqs, phi: &dyn Nqs, from_psi: &SampleBatch) -> Result<RatioMean> {
    ratio_mean(phi, psi, from_psi)
}

/// `(Re Y₁Y₂, Im Y₁Y₂)`. The real part is the fidelity estimate; the
/// imaginary part is pure sampling noise and serves as a diagnostic.
pub fn estimate_fidelity(y1: Complex64, y2: Complex64) -> (f64, f64) {
    let p = y1 * y2;
    (p.re, p.im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OverlapEstimate {
    pub value: Complex64,
    /// False when `Y₁ = 0`, in which case the phase is arbitrary and set to 0.
    pub phase_defined: bool,
}

/// `√|Y₁Y₂| · e^{i arg Y₁}`.
pub fn estimate_overlap(y1: Complex64, y2: Complex64) -> OverlapEstimate {
    let magnitude = (y1 * y2).norm().sqrt();
    let phase_defined = y1.norm() > 0.0;
    let phase = if phase_defined { y1.arg() } else { 0.0 };
    OverlapEstimate {
        value: Complex64::from_polar(magnitude, phase),
        phase_defined,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Both states unnormalized: two batches, product estimator.
    General,
    /// Both states normalized: one batch from `|φ|²`, `F̂ = |Y₁|²`.
    Normalized,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub mode: Mode,
    pub y1: RatioMean,
    pub y2: Option<RatioMean>,
    pub fidelity: f64,
    /// `Im Y₁Y₂`; zero in normalized mode.
    pub fidelity_residual: f64,
    pub overlap: OverlapEstimate,
    /// Samples used for `Y₁` and `Y₂`.
    pub samples: (usize, usize),
    pub acceptance_rates: (Option<f64>, Option<f64>),
}

/// Normalized-state estimator using `n` samples from `|φ|²`.
pub fn estimate_normalized(
    psi: &dyn Nqs,
    phi: &dyn Nqs,
    n: usize,
    settings: &ChainSettings,
    rng: &mut RandomStream,
) -> Result<EstimateReport> {
    if !psi.is_normalized() || !phi.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let batch = sample(phi, n, settings, rng)?;
    let y1 = estimate_y1(psi, phi, &batch)?;
    Ok(EstimateReport {
        mode: Mode::Normalized,
        y1,
        y2: None,
        fidelity: y1.value.norm_sqr(),
        fidelity_residual: 0.0,
        overlap: OverlapEstimate {
            value: y1.value,
            phase_defined: y1.value.norm() > 0.0,
        },
        samples: (n, 0),
        acceptance_rates: (batch.acceptance_rate(), None),
    })
}

/// General estimator with `n₁` samples from `|φ|²` and `n₂` from `|ψ|²`.
/// The two batches are drawn on substreams 0 and 1 of `rng`.
pub fn estimate_general(
    psi: &dyn Nqs,
    phi: &dyn Nqs,
    n1: usize,
    n2: usize,
    settings: &ChainSettings,
    rng: &RandomStream,
) -> Result<EstimateReport> {
    let from_phi = sample(phi, n1, settings, &mut rng.split(0))?;
    let from_psi = sample(psi, n2, settings, &mut rng.split(1))?;
    estimate_from_batches(psi, phi, &from_phi, &from_psi)
}

/// General estimator from batches drawn elsewhere.
pub fn estimate_from_batches(
    psi: &dyn Nqs,
    phi: &dyn Nqs,
    from_phi: &SampleBatch,
    from_psi: &SampleBatch,
) -> Result<EstimateReport> {
    let y1 = estimate_y1(psi, phi, from_phi)?;
    let y2 = estimate_y2(psi, phi, from_psi)?;
    let (fidelity, fidelity_residual) = estimate_fidelity(y1.value, y2.value);
    Ok(EstimateReport {
        mode: Mode::General,
        y1,
        y2: Some(y2),
        fidelity,
        fidelity_residual,
        overlap: estimate_overlap(y1.value, y2.value),
        samples: (from_phi.len(), from_psi.len()),
        acceptance_rates: (from_phi.acceptance_rate(), from_psi.acceptance_rate()),
    })
}
