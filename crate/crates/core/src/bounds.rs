//! Closed-form error bounds for the overlap and fidelity estimators.
//!
//! All bounds come from Chebyshev's inequality with `k = 1/sqrt(δ)`:
//! an estimate lands farther than `sqrt(Var/δ)` from its mean with
//! probability at most `δ`. Inputs are validated and no function returns
//! NaN.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn check_fidelity(f: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&f) {
        return Err(Error::invalid(format!("fidelity {f} outside [0, 1]")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::invalid(format!("failure probability {delta} outside (0, 1)")));
    }
    Ok(())
}

fn check_count(name: &str, n: u64) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid(format!("{name} must be at least 1")));
    }
    Ok(())
}

/// Validated bound inputs: fidelity, per-side sample counts and failure
/// probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundInputs {
    fidelity: f64,
    n1: u64,
    n2: u64,
    delta: f64,
}

impl BoundInputs {
    pub fn new(fidelity: f64, n1: u64, n2: u64, delta: f64) -> Result<Self> {
        check_fidelity(fidelity)?;
        check_count("n1", n1)?;
        check_count("n2", n2)?;
        check_delta(delta)?;
        Ok(Self {
            fidelity,
            n1,
            n2,
            delta,
        })
    }

    /// Inputs for a total budget `n` split as `n1 = ⌈n/2⌉`, `n2 = ⌊n/2⌋`.
    pub fn with_total(fidelity: f64, n: u64, delta: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::invalid("total sample count must be at least 2"));
        }
        let (n1, n2) = split_samples(n);
        Self::new(fidelity, n1, n2, delta)
    }

    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }

    pub fn n1(&self) -> u64 {
        self.n1
    }

    pub fn n2(&self) -> u64 {
        self.n2
    }

    pub fn total(&self) -> u64 {
        self.n1 + self.n2
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Default split of `n` samples between the two sides: `(⌈n/2⌉, ⌊n/2⌋)`.
pub fn split_samples(n: u64) -> (u64, u64) {
    (n.div_ceil(2), n / 2)
}

/// Radius of the disk around `⟨φ|ψ⟩` containing `Y₁` with probability
/// `1 - δ` for normalized states: `sqrt((1 - F) / (n₁ δ))`.
pub fn epsilon_normalized(fidelity: f64, n1: u64, delta: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    check_count("n1", n1)?;
    check_delta(delta)?;
    Ok(((1.0 - fidelity) / (n1 as f64 * delta)).sqrt())
}

/// Worst-case (`F = 0`) sample count for radius `epsilon`: `⌈1/(ε² δ)⌉`,
/// ignoring relative excess below `1e-9`.
pub fn required_samples_normalized(epsilon: f64, delta: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(Error::invalid(format!("epsilon {epsilon} outside (0, 1]")));
    }
    check_delta(delta)?;
    let x = 1.0 / (epsilon * epsilon * delta);
    // values within rounding noise of an integer are not bumped up
    let n = if (x - x.round()).abs() <= 1e-9 * x {
        x.round()
    } else {
        x.ceil()
    };
    Ok((n as u64).max(1))
}

/// Half-width of the interval for `|Y₁|²` around `F`: `2ε sqrt(F) + ε²`.
pub fn fidelity_halfwidth_normalized(fidelity: f64, epsilon: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    if !(epsilon >= 0.0 && epsilon.is_finite()) {
        return Err(Error::invalid(format!("epsilon {epsilon} must be finite and nonnegative")));
    }
    Ok(2.0 * epsilon * fidelity.sqrt() + epsilon * epsilon)
}

/// `Var(Y₁Y₂) = F(1-F)(n₁+n₂)/(n₁n₂) + (1-F)²/(n₁n₂)`.
pub fn variance_fidelity(fidelity: f64, n1: u64, n2: u64) -> Result<f64> {
    check_fidelity(fidelity)?;
    check_count("n1", n1)?;
    check_count("n2", n2)?;
    let (a, b) = (n1 as f64, n2 as f64);
    let q = 1.0 - fidelity;
    Ok(fidelity * q * (a + b) / (a * b) + q * q / (a * b))
}

/// Fidelity error radius for the two-sided estimator with `n₁ = n₂ = n/2`:
/// `2 sqrt((F(1-F) + (1-F)²/n) / (n δ))`.
pub fn epsilon_prime(fidelity: f64, n: u64, delta: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    check_count("n", n)?;
    check_delta(delta)?;
    let nf = n as f64;
    let q = 1.0 - fidelity;
    Ok(2.0 * ((fidelity * q + q * q / nf) / (nf * delta)).sqrt())
}

/// First-order expansion of [`epsilon_prime`] in `1/n`:
/// `2 sqrt(F(1-F)/(nδ)) + (1-F)²/(n²δ)`. Poor near `F = 0`.
pub fn epsilon_prime_taylor(fidelity: f64, n: u64, delta: f64) -> Result<f64> {
    check_fidelity(fidelity)?;
    check_count("n", n)?;
    check_delta(delta)?;
    let nf = n as f64;
    let q = 1.0 - fidelity;
    Ok(2.0 * (fidelity * q / (nf * delta)).sqrt() + q * q / (nf * nf * delta))
}

/// Median-of-means error at the same budget and failure probability,
/// from `δ = exp(-n ε²/64)`: `8 sqrt(ln(1/δ)/n)`.
pub fn epsilon_median(n: u64, delta: f64) -> Result<f64> {
    check_count("n", n)?;
    check_delta(delta)?;
    Ok(8.0 * ((1.0 / delta).ln() / n as f64).sqrt())
}

/// Whether `F(1-F) + (1-F)²/n < -16 δ ln δ`, i.e. the Chebyshev radius
/// beats the median-of-means radius.
pub fn chebyshev_tighter_than_median(fidelity: f64, n: u64, delta: f64) -> Result<bool> {
    check_fidelity(fidelity)?;
    check_count("n", n)?;
    check_delta(delta)?;
    let q = 1.0 - fidelity;
    let lhs = fidelity * q + q * q / n as f64;
    Ok(lhs < -16.0 * delta * delta.ln())
}

/// The interval of `δ` on which `-16 δ ln δ > level`, by bisection on
/// either side of the maximum at `δ = 1/e`. With `level = 0.25`, the
/// largest value `F(1-F)` can take, this is the range of `δ` where the
/// Chebyshev radius beats median of means for every `F` once `n` is large.
pub fn median_delta_window(level: f64) -> Result<(f64, f64)> {
    let g = |d: f64| -16.0 * d * d.ln();
    let peak = (-1.0f64).exp();
    if !(level >= 0.0 && level < g(peak)) {
        return Err(Error::invalid(format!("level {level} outside [0, 16/e)")));
    }
    let root = |mut inside: f64, mut outside: f64| {
        for _ in 0..200 {
            let mid = 0.5 * (inside + outside);
            if mid == inside || mid == outside {
                break;
            }
            if g(mid) > level {
                inside = mid;
            } else {
                outside = mid;
            }
        }
        0.5 * (inside + outside)
    };
    Ok((root(peak, 0.0), root(peak, 1.0)))
}

/// Half-width of the phase cone of the overlap estimate. The disk of radius
/// `ε'` around a center at distance `sqrt(F)` subtends `arcsin(ε'/sqrt(F))`;
/// returns `π` when `F = 0` or the argument exceeds one.
pub fn phase_halfwidth(fidelity: f64, n: u64, delta: f64) -> Result<f64> {
    let eps = epsilon_prime(fidelity, n, delta)?;
    if fidelity == 0.0 {
        return Ok(PI);
    }
    let arg = eps / fidelity.sqrt();
    Ok(if arg > 1.0 { PI } else { arg.asin() })
}

/// Interval for `sqrt|Y₁Y₂|` given `|Y₁Y₂| ∈ [F - ε', F + ε']`, clamped
/// into `[0, 1]`.
pub fn overlap_magnitude_interval(fidelity: f64, epsilon_prime: f64) -> Result<(f64, f64)> {
    check_fidelity(fidelity)?;
    if !(epsilon_prime >= 0.0 && epsilon_prime.is_finite()) {
        return Err(Error::invalid(format!(
            "epsilon' {epsilon_prime} must be finite and nonnegative"
        )));
    }
    let lo = (fidelity - epsilon_prime).max(0.0).sqrt();
    let hi = (fidelity + epsilon_prime).min(1.0).sqrt();
    Ok((lo.min(1.0), hi.clamp(0.0, 1.0)))
}

/// Whether `estimate` lies in the region `|·| ∈ [lo, hi]` and
/// `|arg(·) - arg(center)| ≤ Δα`.
pub fn overlap_region_contains(
    center: num_complex::Complex64,
    interval: (f64, f64),
    delta_alpha: f64,
    estimate: num_complex::Complex64,
) -> bool {
    let r = estimate.norm();
    if r < interval.0 || r > interval.1 {
        return false;
    }
    if delta_alpha >= PI {
        return true;
    }
    let d = (estimate.arg() - center.arg() + PI).rem_euclid(2.0 * PI) - PI;
    d.abs() <= delta_alpha
}

/// Every bound for one `(F, n, δ)`, with the normalized radius using all
/// `n` samples on one side and the two-sided quantities using `n/2` each.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub fidelity: f64,
    pub n: u64,
    pub delta: f64,
    pub epsilon: f64,
    pub fidelity_halfwidth: f64,
    pub epsilon_prime: f64,
    pub delta_alpha: f64,
    pub overlap_magnitude_interval: (f64, f64),
    pub median_epsilon: f64,
    pub chebyshev_tighter: bool,
}

impl BoundReport {
    pub fn new(fidelity: f64, n: u64, delta: f64) -> Result<Self> {
        let epsilon = epsilon_normalized(fidelity, n, delta)?;
        let eps_p = epsilon_prime(fidelity, n, delta)?;
        Ok(Self {
            fidelity,
            n,
            delta,
            epsilon,
            fidelity_halfwidth: fidelity_halfwidth_normalized(fidelity, epsilon)?,
            epsilon_prime: eps_p,
            delta_alpha: phase_halfwidth(fidelity, n, delta)?,
            overlap_magnitude_interval: overlap_magnitude_interval(fidelity, eps_p)?,
            median_epsilon: epsilon_median(n, delta)?,
            chebyshev_tighter: chebyshev_tighter_than_median(fidelity, n, delta)?,
        })
    }
}
