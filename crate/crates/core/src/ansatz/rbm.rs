//! Bias-free restricted Boltzmann machine with complex weights,
//! `ψ(s) = Π_j 2 cosh(Σ_i W_ji s_i)`.

use num_complex::Complex64;
use rand::Rng;

use super::{LogAmplitude, Nqs};
use crate::configspace::{RandomStream, SpinConfiguration, MAX_SITES};
use crate::error::{Error, Result};
use crate::numeric::{log_abs_two_cosh, log_two_cosh};

/// Hidden-unit count used by the benchmark preset.
pub const DEFAULT_HIDDEN: usize = 32;

/// Upper edge of the uniform interval for both real and imaginary parts of
/// freshly initialized weights.
pub const INIT_SCALE: f64 = 0.01;

#[derive(Debug, Clone, PartialEq)]
pub struct Rbm {
    sites: usize,
    hidden: usize,
    /// Row-major `hidden × sites`.
    weights: Vec<Complex64>,
}

impl Rbm {
    pub fn new(hidden: usize, sites: usize, weights: Vec<Complex64>) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::SiteCount(sites, MAX_SITES));
        }
        if hidden == 0 {
            return Err(Error::invalid("RBM needs at least one hidden unit"));
        }
        if weights.len() != hidden * sites {
            return Err(Error::DimensionMismatch {
                expected: hidden * sites,
                actual: weights.len(),
            });
        }
        if let Some(i) = weights.iter().position(|w| !w.is_finite()) {
            return Err(Error::NonFiniteParameter(i));
        }
        Ok(Self {
            sites,
            hidden,
            weights,
        })
    }

    pub fn zeros(hidden: usize, sites: usize) -> Result<Self> {
        Self::new(hidden, sites, vec![Complex64::new(0.0, 0.0); hidden * sites])
    }

    /// Weights with real and imaginary parts drawn from `U[0, 0.01]`.
    pub fn random(hidden: usize, sites: usize, rng: &mut RandomStream) -> Result<Self> {
        let weights = (0..hidden * sites)
            .map(|_| {
                let re = rng.random::<f64>() * INIT_SCALE;
                let im = rng.random::<f64>() * INIT_SCALE;
                Complex64::new(re, im)
            })
            .collect();
        Self::new(hidden, sites, weights)
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn weights(&self) -> &[Complex64] {
        &self.weights
    }

    /// Weight connecting hidden unit `j` to site `i`.
    pub fn weight(&self, j: usize, i: usize) -> Complex64 {
        self.weights[j * self.sites + i]
    }

    /// Flat real view: `[Re W_00, Im W_00, Re W_01, …]`.
    pub fn parameters(&self) -> Vec<f64> {
        self.weights.iter().flat_map(|w| [w.re, w.im]).collect()
    }

    pub fn with_parameters(&self, params: &[f64]) -> Result<Self> {
        if params.len() != 2 * self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: 2 * self.weights.len(),
                actual: params.len(),
            });
        }
        let weights = params
            .chunks_exact(2)
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Self::new(self.hidden, self.sites, weights)
    }

    #[inline]
    fn preactivation(&self, row: &[Complex64], spins: &[f64]) -> Complex64 {
        let mut theta = Complex64::new(0.0, 0.0);
        for (w, &s) in row.iter().zip(spins) {
            theta += w * s;
        }
        theta
    }

    fn spin_buffer(&self, s: &SpinConfiguration) -> [f64; MAX_SITES] {
        debug_assert_eq!(s.len(), self.sites);
        let mut buf = [0.0; MAX_SITES];
        for (i, v) in buf.iter_mut().take(self.sites).enumerate() {
            *v = s.spin(i);
        }
        buf
    }
}

impl Nqs for Rbm {
    fn num_sites(&self) -> usize {
        self.sites
    }

    fn is_normalized(&self) -> bool {
        false
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmplitude {
        let buf = self.spin_buffer(s);
        let spins = &buf[..self.sites];
        self.weights
            .chunks_exact(self.sites)
            .map(|row| log_two_cosh(self.preactivation(row, spins)))
            .sum()
    }

    fn log_magnitude(&self, s: &SpinConfiguration) -> f64 {
        let buf = self.spin_buffer(s);
        let spins = &buf[..self.sites];
        self.weights
            .chunks_exact(self.sites)
            .map(|row| log_abs_two_cosh(self.preactivation(row, spins)))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::enumerate_basis;

    /// Product of `2 cosh` evaluated from the exponential definition.
    fn direct_amplitude(rbm: &Rbm, s: &SpinConfiguration) -> Complex64 {
        let mut prod = Complex64::new(1.0, 0.0);
        for j in 0..rbm.hidden() {
            let theta: Complex64 = (0..s.len()).map(|i| rbm.weight(j, i) * s.spin(i)).sum();
            prod *= theta.exp() + (-theta).exp();
        }
        prod
    }

    #[test]
    fn zero_weights_give_constant_amplitude() {
        let rbm = Rbm::zeros(32, 5).unwrap();
        for s in enumerate_basis(5).unwrap() {
            let la = rbm.log_amplitude(&s);
            assert!((la.re - 32.0 * std::f64::consts::LN_2).abs() < 1e-12);
            assert_eq!(la.im, 0.0);
        }
    }

    #[test]
    fn single_unit_single_site() {
        let w = Complex64::new(0.3, 0.4);
        let rbm = Rbm::new(1, 1, vec![w]).unwrap();
        let up = SpinConfiguration::all_up(1).unwrap();
        // 2cosh(z) = e^z + e^{-z}
        let expected = (w.exp() + (-w).exp()).ln();
        let got = rbm.log_amplitude(&up);
        assert!((got - expected).norm() < 1e-14);
    }

    #[test]
    fn global_flip_with_negated_weights_is_invariant() {
        let mut rng = RandomStream::new(11);
        let rbm = Rbm::random(4, 6, &mut rng).unwrap();
        let neg = rbm
            .with_parameters(&rbm.parameters().iter().map(|p| -p).collect::<Vec<_>>())
            .unwrap();
        for s in enumerate_basis(6).unwrap() {
            let a = rbm.log_amplitude(&s);
            let b = neg.log_amplitude(&s.flip_all());
            assert!((a.exp() - b.exp()).norm() < 1e-12 * a.exp().norm());
        }
    }

    #[test]
    fn matches_product_of_cosh_for_random_weights() {
        let mut rng = RandomStream::new(5);
        for sites in [1usize, 4, 10] {
            let base = Rbm::random(8, sites, &mut rng).unwrap();
            // stretch weights so the check is not dominated by tiny arguments
            let p: Vec<f64> = base.parameters().iter().map(|x| 60.0 * (x - 0.005)).collect();
            let rbm = base.with_parameters(&p).unwrap();
            for s in enumerate_basis(sites).unwrap() {
                let direct = direct_amplitude(&rbm, &s);
                let via_log = rbm.log_amplitude(&s).exp();
                assert!((direct - via_log).norm() <= 1e-10 * direct.norm());
                assert!((rbm.log_magnitude(&s) - direct.norm().ln()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn random_init_is_within_bounds_and_deterministic() {
        let a = Rbm::random(32, 9, &mut RandomStream::new(3)).unwrap();
        let b = Rbm::random(32, 9, &mut RandomStream::new(3)).unwrap();
        assert_eq!(a, b);
        assert!(a
            .weights()
            .iter()
            .all(|w| (0.0..=INIT_SCALE).contains(&w.re) && (0.0..=INIT_SCALE).contains(&w.im)));
    }

    #[test]
    fn rejects_bad_shapes_and_non_finite() {
        assert!(Rbm::new(2, 3, vec![Complex64::new(0.0, 0.0); 5]).is_err());
        let mut w = vec![Complex64::new(0.0, 0.0); 6];
        w[4].im = f64::NAN;
        assert!(matches!(Rbm::new(2, 3, w), Err(Error::NonFiniteParameter(4))));
    }
}
