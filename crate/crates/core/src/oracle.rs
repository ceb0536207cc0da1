//! Exact full-basis quantities used as ground truth: norms, overlap,
//! fidelity and the exact moments of the amplitude ratios.
//!
//! Every sum runs over fixed-size index chunks that are reduced in index
//! order, so results do not depend on the worker count. Norms are
//! accumulated as log-sum-exp against a running maximum.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::{LogAmplitude, Nqs};
use crate::configspace::{SpinConfiguration, ENUMERATION_CEILING};
use crate::error::{Error, Result};
use crate::numeric::{CompensatedSum, ComplexSum};

const CHUNK: u64 = 1 << 12;

/// Exact reference values for a pair `(ψ, φ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExactSummary {
    /// `ln N_ψ`.
    pub log_norm_psi: f64,
    /// `ln N_φ`.
    pub log_norm_phi: f64,
    /// `⟨φ|ψ⟩` of the normalized states.
    pub overlap: Complex64,
    pub fidelity: f64,
    /// `E_φ[Z]` with `Z = ψ/φ` and `s ~ |φ|²/N_φ`.
    pub mean_z: Complex64,
    /// `E_ψ[W]` with `W = φ/ψ` and `s ~ |ψ|²/N_ψ`.
    pub mean_w: Complex64,
    pub var_z: f64,
    pub var_w: f64,
    /// `E_φ[Z²]`, the complex square rather than `|Z|²`.
    pub mean_square_z: Complex64,
    /// `E_ψ[W²]`.
    pub mean_square_w: Complex64,
}

impl ExactSummary {
    pub fn norm_psi(&self) -> f64 {
        self.log_norm_psi.exp()
    }

    pub fn norm_phi(&self) -> f64 {
        self.log_norm_phi.exp()
    }

    /// `N_ψ / N_φ`.
    pub fn norm_ratio(&self) -> f64 {
        (self.log_norm_psi - self.log_norm_phi).exp()
    }

    /// Exact `Var(Re Y₁)` for `n` independent samples from `|φ|²`.
    pub fn y1_real_variance(&self, n: usize) -> f64 {
        // E[(Re Z)²] = (E|Z|² + Re E[Z²]) / 2
        let re_square = 0.5 * (self.var_z + self.mean_z.norm_sqr() + self.mean_square_z.re);
        (re_square - self.mean_z.re.powi(2)) / n as f64
    }

    /// Exact `E|Y₁Y₂ - E[Y₁Y₂]|²` for independent batches of `n1` samples
    /// from `|φ|²` and `n2` from `|ψ|²`.
    pub fn product_variance(&self, n1: usize, n2: usize) -> f64 {
        let (abs1, abs2, _, _) = self.product_moments(n1, n2);
        abs1 * abs2 - (self.mean_z * self.mean_w).norm_sqr()
    }

    /// Exact `Var(Re Y₁Y₂)` for the same batches.
    pub fn product_real_variance(&self, n1: usize, n2: usize) -> f64 {
        let (abs1, abs2, sq1, sq2) = self.product_moments(n1, n2);
        0.5 * (abs1 * abs2 + (sq1 * sq2).re) - (self.mean_z * self.mean_w).re.powi(2)
    }

    /// `E|Y₁|²`, `E|Y₂|²`, `E[Y₁²]`, `E[Y₂²]`.
    fn product_moments(&self, n1: usize, n2: usize) -> (f64, f64, Complex64, Complex64) {
        let (a, b) = (1.0 / n1 as f64, 1.0 / n2 as f64);
        (
            self.mean_z.norm_sqr() + a * self.var_z,
            self.mean_w.norm_sqr() + b * self.var_w,
            a * self.mean_square_z + (1.0 - a) * self.mean_z * self.mean_z,
            b * self.mean_square_w + (1.0 - b) * self.mean_w * self.mean_w,
        )
    }
}

/// Streaming `ln Σ e^{x}` with a running maximum offset.
#[derive(Debug, Clone, Copy)]
struct LogSumExp {
    max: f64,
    sum: CompensatedSum,
}

impl LogSumExp {
    fn new() -> Self {
        Self {
            max: f64::NEG_INFINITY,
            sum: CompensatedSum::new(),
        }
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.max {
            if self.max > f64::NEG_INFINITY {
                self.sum.scale((self.max - x).exp());
            }
            self.max = x;
        }
        self.sum.add((x - self.max).exp());
    }

    fn merge(&mut self, other: &LogSumExp) {
        if other.max == f64::NEG_INFINITY {
            return;
        }
        let mut o = other.sum;
        if other.max > self.max {
            if self.max > f64::NEG_INFINITY {
                self.sum.scale((self.max - other.max).exp());
            }
            self.max = other.max;
        } else {
            o.scale((other.max - self.max).exp());
        }
        self.sum.merge(&o);
    }

    fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + self.sum.value().ln()
        }
    }
}

fn check_sites(sites: usize) -> Result<()> {
    if sites > ENUMERATION_CEILING {
        return Err(Error::EnumerationCeiling {
            sites,
            ceiling: ENUMERATION_CEILING,
        });
    }
    if sites == 0 {
        return Err(Error::SiteCount(0, ENUMERATION_CEILING));
    }
    Ok(())
}

/// Maps `f` over fixed chunks of `[0, 2^sites)` and folds the partial
/// results in chunk order.
fn chunked<T, F, G>(sites: usize, init: T, per_index: F, merge: G) -> T
where
    T: Send + Clone + Sync,
    F: Fn(&mut T, u64) + Sync,
    G: Fn(&mut T, &T),
{
    let total = 1u64 << sites;
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init.clone();
            for i in c * CHUNK..((c + 1) * CHUNK).min(total) {
                per_index(&mut acc, i);
            }
            acc
        })
        .collect();
    let mut out = init;
    for p in &partials {
        merge(&mut out, p);
    }
    out
}

fn config(i: u64, sites: usize) -> SpinConfiguration {
    SpinConfiguration::unpack(i, sites).expect("index within basis")
}

/// Log-amplitudes of every basis state, in pack order.
#[derive(Debug, Clone)]
pub struct AmplitudeTable {
    sites: usize,
    log_amplitudes: Vec<LogAmplitude>,
}

impl AmplitudeTable {
    pub fn new(ansatz: &dyn Nqs) -> Result<Self> {
        let sites = ansatz.num_sites();
        check_sites(sites)?;
        let log_amplitudes = (0..1u64 << sites)
            .into_par_iter()
            .map(|i| ansatz.log_amplitude(&config(i, sites)))
            .collect();
        Ok(Self {
            sites,
            log_amplitudes,
        })
    }

    pub fn sites(&self) -> usize {
        self.sites
    }

    pub fn log_amplitudes(&self) -> &[LogAmplitude] {
        &self.log_amplitudes
    }

    pub fn log_norm(&self) -> Result<f64> {
        log_norm_with(self.sites, |i| self.log_amplitudes[i as usize])
    }

    /// Exact `|ψ(s)|² / N_ψ` in pack order.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let ln = self.log_norm()?;
        Ok(self
            .log_amplitudes
            .iter()
            .map(|a| (2.0 * a.re - ln).exp())
            .collect())
    }

    /// Summary with `self` as ψ and `phi` as φ.
    pub fn summary_with(&self, phi: &AmplitudeTable) -> Result<ExactSummary> {
        if phi.sites != self.sites {
            return Err(Error::DimensionMismatch {
                expected: self.sites,
                actual: phi.sites,
            });
        }
        summarize(
            self.sites,
            |i| self.log_amplitudes[i as usize],
            |i| phi.log_amplitudes[i as usize],
        )
    }
}

fn log_norm_with<F>(sites: usize, log_amp: F) -> Result<f64>
where
    F: Fn(u64) -> LogAmplitude + Sync,
{
    let lse = chunked(
        sites,
        LogSumExp::new(),
        |acc, i| acc.add(2.0 * log_amp(i).re),
        |a, b| a.merge(b),
    );
    let v = lse.value();
    if !v.is_finite() {
        return Err(Error::invalid("wavefunction has zero or non-finite norm"));
    }
    Ok(v)
}

/// Largest `2 Re log ψ(s)`. Sums are shifted by this exact value rather
/// than by a rounded log-norm, so the shifts cancel exactly in the fidelity.
fn max_log_weight<F>(sites: usize, log_amp: F) -> Result<f64>
where
    F: Fn(u64) -> LogAmplitude + Sync,
{
    let m = chunked(
        sites,
        f64::NEG_INFINITY,
        |acc, i| *acc = acc.max(2.0 * log_amp(i).re),
        |a, b| *a = a.max(*b),
    );
    if !m.is_finite() {
        return Err(Error::invalid("wavefunction has zero or non-finite norm"));
    }
    Ok(m)
}

#[derive(Clone, Copy, Default)]
struct ShiftedSums {
    psi: CompensatedSum,
    phi: CompensatedSum,
    cross: ComplexSum,
}

#[derive(Clone, Copy, Default)]
struct CenteredSums {
    var_z: CompensatedSum,
    var_w: CompensatedSum,
    square_z: ComplexSum,
    square_w: ComplexSum,
}

fn summarize<P, Q>(sites: usize, psi: P, phi: Q) -> Result<ExactSummary>
where
    P: Fn(u64) -> LogAmplitude + Sync,
    Q: Fn(u64) -> LogAmplitude + Sync,
{
    check_sites(sites)?;
    let m_psi = max_log_weight(sites, &psi)?;
    let m_phi = max_log_weight(sites, &phi)?;
    let half = 0.5 * (m_psi + m_phi);
    let shifted = chunked(
        sites,
        ShiftedSums::default(),
        |acc, i| {
            let (a, b) = (psi(i), phi(i));
            acc.psi.add((2.0 * a.re - m_psi).exp());
            acc.phi.add((2.0 * b.re - m_phi).exp());
            acc.cross.add((a + b.conj() - half).exp());
        },
        |x, y| {
            x.psi.merge(&y.psi);
            x.phi.merge(&y.phi);
            x.cross.merge(&y.cross);
        },
    );
    let (s_psi, s_phi, s_cross) = (shifted.psi.value(), shifted.phi.value(), shifted.cross.value());
    if !(s_psi.is_finite() && s_phi.is_finite()) {
        return Err(Error::invalid("wavefunction has zero or non-finite norm"));
    }
    let ln_psi = m_psi + s_psi.ln();
    let ln_phi = m_phi + s_phi.ln();
    let overlap = s_cross / (s_psi * s_phi).sqrt();
    // E_φ[Z] = Σ ψφ*/N_φ and E_ψ[W] = Σ φψ*/N_ψ
    let skew = 0.5 * (m_psi - m_phi);
    let mean_z = scaled(s_cross / s_phi, skew);
    let mean_w = scaled(s_cross.conj() / s_psi, -skew);
    // centered second pass: E|Z|² - |E Z|² loses everything when F ≈ 1
    let centered = chunked(
        sites,
        CenteredSums::default(),
        |acc, i| {
            let (a, b) = (psi(i), phi(i));
            if b.re > f64::NEG_INFINITY {
                let log_p = 2.0 * b.re - ln_phi;
                let log_z = a - b;
                acc.var_z.add(centered_term(log_z, log_p, mean_z));
                acc.square_z.add((2.0 * log_z + log_p).exp());
            }
            if a.re > f64::NEG_INFINITY {
                let log_p = 2.0 * a.re - ln_psi;
                let log_w = b - a;
                acc.var_w.add(centered_term(log_w, log_p, mean_w));
                acc.square_w.add((2.0 * log_w + log_p).exp());
            }
        },
        |x, y| {
            x.var_z.merge(&y.var_z);
            x.var_w.merge(&y.var_w);
            x.square_z.merge(&y.square_z);
            x.square_w.merge(&y.square_w);
        },
    );
    Ok(ExactSummary {
        log_norm_psi: ln_psi,
        log_norm_phi: ln_phi,
        overlap,
        fidelity: overlap.norm_sqr(),
        mean_z,
        mean_w,
        var_z: centered.var_z.value(),
        var_w: centered.var_w.value(),
        mean_square_z: centered.square_z.value(),
        mean_square_w: centered.square_w.value(),
    })
}

/// `p |X - μ|²` as `|√p X - √p μ|²`, finite even where `X` alone overflows.
fn centered_term(log_x: Complex64, log_p: f64, mean: Complex64) -> f64 {
    let root_p = 0.5 * log_p;
    ((log_x + root_p).exp() - root_p.exp() * mean).norm_sqr()
}

/// `z · e^{shift}` without overflowing in the intermediate factor.
fn scaled(z: Complex64, shift: f64) -> Complex64 {
    if z == Complex64::new(0.0, 0.0) {
        return z;
    }
    Complex64::from_polar((z.norm().ln() + shift).exp(), z.arg())
}

/// `ln Σ_s |ψ(s)|²`.
pub fn exact_log_norm(ansatz: &dyn Nqs) -> Result<f64> {
    let sites = ansatz.num_sites();
    check_sites(sites)?;
    log_norm_with(sites, |i| ansatz.log_amplitude(&config(i, sites)))
}

/// `N_ψ = Σ_s |ψ(s)|²`.
pub fn exact_norm(ansatz: &dyn Nqs) -> Result<f64> {
    exact_log_norm(ansatz).map(f64::exp)
}

/// Every exact quantity for the pair in two enumeration passes.
pub fn exact_summary(psi: &dyn Nqs, phi: &dyn Nqs) -> Result<ExactSummary> {
    let sites = psi.num_sites();
    if phi.num_sites() != sites {
        return Err(Error::DimensionMismatch {
            expected: sites,
            actual: phi.num_sites(),
        });
    }
    summarize(
        sites,
        |i| psi.log_amplitude(&config(i, sites)),
        |i| phi.log_amplitude(&config(i, sites)),
    )
}

/// `⟨φ|ψ⟩ = Σ_s ψ(s) φ*(s) / sqrt(N_ψ N_φ)`.
pub fn exact_overlap(psi: &dyn Nqs, phi: &dyn Nqs) -> Result<Complex64> {
    exact_summary(psi, phi).map(|s| s.overlap)
}

pub fn exact_fidelity(psi: &dyn Nqs, phi: &dyn Nqs) -> Result<f64> {
    exact_summary(psi, phi).map(|s| s.fidelity)
}

/// `(Var Z, Var W)` by direct summation over the basis.
pub fn exact_var_ratios(psi: &dyn Nqs, phi: &dyn Nqs) -> Result<(f64, f64)> {
    exact_summary(psi, phi).map(|s| (s.var_z, s.var_w))
}

/// Exact `|ψ(s)|² / N_ψ` in pack order.
pub fn exact_probabilities(ansatz: &dyn Nqs) -> Result<Vec<f64>> {
    AmplitudeTable::new(ansatz)?.probabilities()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{init_random, random_unit_direction, Ansatz, AnsatzKind, Rbm, Scaled};
    use crate::configspace::RandomStream;

    fn pair(kind: AnsatzKind, sites: usize, t: f64, seed: u64) -> (Ansatz, Ansatz) {
        let psi = init_random(kind, sites, seed).unwrap();
        let dir = random_unit_direction(psi.parameter_count(), &mut RandomStream::new(seed + 1000));
        let phi = psi.perturb(&dir, t).unwrap();
        (psi, phi)
    }

    #[test]
    fn normalized_arnn_has_unit_norm() {
        let a = init_random(AnsatzKind::Arnn, 10, 1).unwrap();
        assert!((exact_norm(&a).unwrap() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn zero_rbm_norm_is_closed_form() {
        let (m, l) = (3usize, 5usize);
        let rbm = Rbm::zeros(m, l).unwrap();
        let expected = 2f64.powi(l as i32) * 2f64.powi(2 * m as i32);
        assert!((exact_norm(&rbm).unwrap() / expected - 1.0).abs() < 1e-12);
    }

    #[test]
    fn norm_scales_with_offset() {
        let a = init_random(AnsatzKind::Rbm, 6, 2).unwrap();
        let c = Complex64::new(1.7, 0.4);
        let ratio = exact_norm(&Scaled::new(&a, c)).unwrap() / exact_norm(&a).unwrap();
        assert!((ratio / (2.0 * c.re).exp() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn huge_log_amplitudes_do_not_overflow() {
        let a = init_random(AnsatzKind::Rbm, 6, 2).unwrap();
        let big = Scaled::new(&a, Complex64::new(2000.0, 0.0));
        let ln = exact_log_norm(&big).unwrap();
        assert!((ln - exact_log_norm(&a).unwrap() - 4000.0).abs() < 1e-9);
        let s = exact_summary(&big, &a).unwrap();
        assert!((s.fidelity - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_overlap_is_one_and_variances_vanish() {
        let a = init_random(AnsatzKind::Rbm, 8, 3).unwrap();
        let s = exact_summary(&a, &a).unwrap();
        assert!((s.overlap - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        assert!(s.var_z.abs() < 1e-12 && s.var_w.abs() < 1e-12);
    }

    #[test]
    fn orthogonal_product_states_have_zero_overlap() {
        // all-up vs all-down product states with extreme single-site weights
        let up = Ansatz::Arnn({
            let mut p = crate::ansatz::Arnn::zeros(3, 2, 1).unwrap().parameters();
            let n = p.len();
            p[n - 4] = -50.0; // logit for down
            p[n - 3] = 50.0;
            crate::ansatz::Arnn::from_parameters(3, 2, 1, &p).unwrap()
        });
        let down = Ansatz::Arnn({
            let mut p = crate::ansatz::Arnn::zeros(3, 2, 1).unwrap().parameters();
            let n = p.len();
            p[n - 4] = 50.0;
            p[n - 3] = -50.0;
            crate::ansatz::Arnn::from_parameters(3, 2, 1, &p).unwrap()
        });
        assert!(exact_overlap(&up, &down).unwrap().norm() < 1e-40);
    }

    #[test]
    fn fidelity_is_squared_overlap_and_conjugate_symmetric() {
        let (psi, phi) = pair(AnsatzKind::Rbm, 8, 3.0, 4);
        let a = exact_summary(&psi, &phi).unwrap();
        let b = exact_summary(&phi, &psi).unwrap();
        assert!((a.fidelity - a.overlap.norm_sqr()).abs() < 1e-12);
        assert!((a.overlap - b.overlap.conj()).norm() < 1e-12);
        assert!(a.fidelity <= 1.0 + 1e-12);
    }

    #[test]
    fn var_z_identity_normalized_and_unnormalized() {
        let (psi, phi) = pair(AnsatzKind::Arnn, 8, 2.0, 5);
        let s = exact_summary(&psi, &phi).unwrap();
        assert!((s.var_z - (1.0 - s.fidelity)).abs() < 1e-10);
        assert!((s.var_w - (1.0 - s.fidelity)).abs() < 1e-10);

        let (psi, phi) = pair(AnsatzKind::Rbm, 10, 6.0, 6);
        let s = exact_summary(&psi, &phi).unwrap();
        let predicted = s.norm_ratio() * (1.0 - s.fidelity);
        assert!((s.var_z / predicted - 1.0).abs() < 1e-10);
        let predicted_w = (1.0 - s.fidelity) / s.norm_ratio();
        assert!((s.var_w / predicted_w - 1.0).abs() < 1e-10);
    }

    #[test]
    fn exact_means_match_overlap_scaling() {
        let (psi, phi) = pair(AnsatzKind::Rbm, 8, 4.0, 7);
        let s = exact_summary(&psi, &phi).unwrap();
        let expected = s.norm_ratio().sqrt() * s.overlap;
        assert!((s.mean_z - expected).norm() < 1e-10 * expected.norm().max(1.0));
        // normalized states: E[W] = conj(E[Z])
        let (psi, phi) = pair(AnsatzKind::Arnn, 8, 2.0, 8);
        let s = exact_summary(&psi, &phi).unwrap();
        assert!((s.mean_w - s.mean_z.conj()).norm() < 1e-12);
    }

    #[test]
    fn reversed_enumeration_order_agrees() {
        let (psi, phi) = pair(AnsatzKind::Rbm, 9, 3.0, 9);
        let fwd = exact_overlap(&psi, &phi).unwrap();
        let ln_psi = exact_log_norm(&psi).unwrap();
        let ln_phi = exact_log_norm(&phi).unwrap();
        let mut sum = ComplexSum::new();
        for s in crate::configspace::enumerate_basis(9).unwrap().rev() {
            sum.add((psi.log_amplitude(&s) + phi.log_amplitude(&s).conj() - 0.5 * (ln_psi + ln_phi)).exp());
        }
        assert!((sum.value() - fwd).norm() < 1e-12);
    }

    #[test]
    fn table_and_streaming_paths_agree() {
        let (psi, phi) = pair(AnsatzKind::Arnn, 7, 1.5, 10);
        let a = exact_summary(&psi, &phi).unwrap();
        let b = AmplitudeTable::new(&psi)
            .unwrap()
            .summary_with(&AmplitudeTable::new(&phi).unwrap())
            .unwrap();
        assert_eq!(a, b);
    }

    /// Every ordered batch of `n` configurations with its probability.
    fn all_batches(p: &[f64], n: usize) -> Vec<(Vec<usize>, f64)> {
        let mut out = vec![(Vec::new(), 1.0)];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|(b, w)| {
                    p.iter().enumerate().map(move |(i, &q)| {
                        let mut b = b.clone();
                        b.push(i);
                        (b, w * q)
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn product_moments_match_enumerated_batches() {
        let (psi, phi) = pair(AnsatzKind::Rbm, 2, 1.3, 6);
        let s = exact_summary(&psi, &phi).unwrap();
        let table = |a: &Ansatz| AmplitudeTable::new(a).unwrap();
        let (tp, tf) = (table(&psi), table(&phi));
        let (pp, pf) = (tp.probabilities().unwrap(), tf.probabilities().unwrap());
        let z: Vec<Complex64> = (0..4).map(|i| (tp.log_amplitudes[i] - tf.log_amplitudes[i]).exp()).collect();
        let mean_of = |b: &[usize], v: &dyn Fn(usize) -> Complex64| b.iter().map(|&i| v(i)).sum::<Complex64>() / b.len() as f64;
        let (n1, n2) = (2, 3);
        let (mut m, mut m_abs, mut m_re, mut m_re2) = (Complex64::new(0.0, 0.0), 0.0, 0.0, 0.0);
        for (b1, w1) in all_batches(&pf, n1) {
            let y1 = mean_of(&b1, &|i| z[i]);
            for (b2, w2) in all_batches(&pp, n2) {
                let y = y1 * mean_of(&b2, &|i| z[i].inv());
                m += w1 * w2 * y;
                m_abs += w1 * w2 * y.norm_sqr();
                m_re += w1 * w2 * y.re;
                m_re2 += w1 * w2 * y.re * y.re;
            }
        }
        assert!((s.product_variance(n1, n2) - (m_abs - m.norm_sqr())).abs() < 1e-12);
        assert!((s.product_real_variance(n1, n2) - (m_re2 - m_re * m_re)).abs() < 1e-12);
        let (mut e, mut e2) = (0.0, 0.0);
        for (b, w) in all_batches(&pf, 3) {
            let re = mean_of(&b, &|i| z[i]).re;
            e += w * re;
            e2 += w * re * re;
        }
        assert!((s.y1_real_variance(3) - (e2 - e * e)).abs() < 1e-12);
    }

    #[test]
    fn product_variance_matches_closed_form() {
        for (kind, seed) in [(AnsatzKind::Rbm, 3), (AnsatzKind::Arnn, 4)] {
            let (psi, phi) = pair(kind, 8, 0.8, seed);
            let s = exact_summary(&psi, &phi).unwrap();
            let f = s.fidelity;
            for (n1, n2) in [(1, 1), (10, 30), (512, 512)] {
                let closed = crate::bounds::variance_fidelity(f, n1 as u64, n2 as u64).unwrap();
                assert!((s.product_variance(n1, n2) - closed).abs() < 1e-10 * closed.max(1e-3), "{kind} {n1} {n2}");
                assert!(s.product_real_variance(n1, n2) <= s.product_variance(n1, n2) + 1e-15);
            }
        }
    }

    #[test]
    fn ceiling_is_enforced() {
        let a = Rbm::zeros(1, 25).unwrap();
        assert!(matches!(exact_norm(&a), Err(Error::EnumerationCeiling { .. })));
    }
}
