//! Neural quantum state families behind a common amplitude interface.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::configspace::{RandomStream, SpinConfiguration};
use crate::error::{Error, Result};

pub mod arnn;
pub mod io;
pub mod rbm;

pub use arnn::{Arnn, ArnnInit};
pub use rbm::Rbm;

/// `log ψ(s)`: real part is the log-magnitude, imaginary part the phase.
/// A zero amplitude is represented by a real part of `-∞`.
pub type LogAmplitude = Complex64;

/// A wavefunction that can evaluate (possibly unnormalized) amplitudes.
pub trait Nqs: Send + Sync {
    fn num_sites(&self) -> usize;

    /// Whether `Σ_s |ψ(s)|² = 1` holds by construction.
    fn is_normalized(&self) -> bool;

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmplitude;

    /// `Re log ψ(s)`. Implementations may override with a cheaper path.
    fn log_magnitude(&self, s: &SpinConfiguration) -> f64 {
        self.log_amplitude(s).re
    }

    fn as_autoregressive(&self) -> Option<&dyn Autoregressive> {
        None
    }
}

/// Conditional distribution of one site given the sites before it.
/// Index 0 is spin down, index 1 spin up.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Conditionals {
    pub log_probabilities: [f64; 2],
    pub phases: [f64; 2],
}

impl Conditionals {
    pub fn probabilities(&self) -> [f64; 2] {
        [self.log_probabilities[0].exp(), self.log_probabilities[1].exp()]
    }
}

/// Site-by-site access to an autoregressive state.
pub trait ConditionalCursor {
    /// Index of the site whose conditionals are currently exposed.
    fn position(&self) -> usize;
    fn conditionals(&self) -> Conditionals;
    /// Fixes the current site and moves to the next one.
    fn push(&mut self, up: bool);
}

/// Wavefunctions of the form `P(s) = Π_i P(s_i | s_{<i})`.
pub trait Autoregressive: Nqs {
    /// Conditionals for site `prefix.len()` given the prefix values.
    fn conditionals(&self, prefix: &[bool]) -> Result<Conditionals>;

    fn start(&self) -> Box<dyn ConditionalCursor + '_>;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnsatzKind {
    Rbm,
    Arnn,
}

impl fmt::Display for AnsatzKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AnsatzKind::Rbm => "rbm",
            AnsatzKind::Arnn => "arnn",
        })
    }
}

impl FromStr for AnsatzKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rbm" => Ok(AnsatzKind::Rbm),
            "arnn" => Ok(AnsatzKind::Arnn),
            other => Err(Error::invalid(format!("unknown ansatz kind `{other}`"))),
        }
    }
}

/// Either supported ansatz, with a flat real parameter vector.
#[derive(Debug, Clone, PartialEq)]
pub enum Ansatz {
    Rbm(Rbm),
    Arnn(Arnn),
}

impl Ansatz {
    pub fn kind(&self) -> AnsatzKind {
        match self {
            Ansatz::Rbm(_) => AnsatzKind::Rbm,
            Ansatz::Arnn(_) => AnsatzKind::Arnn,
        }
    }

    pub fn parameters(&self) -> Vec<f64> {
        match self {
            Ansatz::Rbm(r) => r.parameters(),
            Ansatz::Arnn(a) => a.parameters(),
        }
    }

    pub fn parameter_count(&self) -> usize {
        match self {
            Ansatz::Rbm(r) => 2 * r.weights().len(),
            Ansatz::Arnn(a) => a.parameter_count(),
        }
    }

    /// Same architecture with a replacement parameter vector.
    pub fn with_parameters(&self, params: &[f64]) -> Result<Self> {
        Ok(match self {
            Ansatz::Rbm(r) => Ansatz::Rbm(r.with_parameters(params)?),
            Ansatz::Arnn(a) => Ansatz::Arnn(a.with_parameters(params)?),
        })
    }

    /// `params + t·direction`. `t = 0` returns an exact copy.
    pub fn perturb(&self, direction: &[f64], t: f64) -> Result<Self> {
        let params = self.parameters();
        if direction.len() != params.len() {
            return Err(Error::DimensionMismatch {
                expected: params.len(),
                actual: direction.len(),
            });
        }
        if t == 0.0 {
            return Ok(self.clone());
        }
        let moved: Vec<f64> = params.iter().zip(direction).map(|(p, d)| p + t * d).collect();
        self.with_parameters(&moved)
    }

    fn inner(&self) -> &dyn Nqs {
        match self {
            Ansatz::Rbm(r) => r,
            Ansatz::Arnn(a) => a,
        }
    }
}

impl Nqs for Ansatz {
    fn num_sites(&self) -> usize {
        self.inner().num_sites()
    }

    fn is_normalized(&self) -> bool {
        self.inner().is_normalized()
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmplitude {
        self.inner().log_amplitude(s)
    }

    fn log_magnitude(&self, s: &SpinConfiguration) -> f64 {
        self.inner().log_magnitude(s)
    }

    fn as_autoregressive(&self) -> Option<&dyn Autoregressive> {
        match self {
            Ansatz::Rbm(_) => None,
            Ansatz::Arnn(a) => Some(a),
        }
    }
}

/// Random parameters for the benchmark architectures: an RBM with
/// [`rbm::DEFAULT_HIDDEN`] hidden units or an ARNN of hidden size
/// [`arnn::DEFAULT_HIDDEN`] and depth [`arnn::DEFAULT_DEPTH`].
pub fn init_random(kind: AnsatzKind, sites: usize, seed: u64) -> Result<Ansatz> {
    init_random_with(kind, sites, seed, ArnnInit::Positive)
}

/// [`init_random`] with a choice of ARNN weight interval. RBMs ignore `init`.
pub fn init_random_with(kind: AnsatzKind, sites: usize, seed: u64, init: ArnnInit) -> Result<Ansatz> {
    let mut rng = RandomStream::new(seed);
    Ok(match kind {
        AnsatzKind::Rbm => Ansatz::Rbm(Rbm::random(rbm::DEFAULT_HIDDEN, sites, &mut rng)?),
        AnsatzKind::Arnn => Ansatz::Arnn(Arnn::random_with(
            sites,
            arnn::DEFAULT_HIDDEN,
            arnn::DEFAULT_DEPTH,
            init,
            &mut rng,
        )?),
    })
}

/// Gaussian direction normalized to unit Euclidean length.
pub fn random_unit_direction(dim: usize, rng: &mut RandomStream) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            return v.into_iter().map(|x| x / norm).collect();
        }
    }
}

/// Wraps an ansatz and adds a constant to every log-amplitude, multiplying
/// each amplitude by `e^c`.
#[derive(Debug, Clone)]
pub struct Scaled<A> {
    inner: A,
    offset: Complex64,
}

impl<A: Nqs> Scaled<A> {
    pub fn new(inner: A, offset: Complex64) -> Self {
        Self { inner, offset }
    }

    pub fn offset(&self) -> Complex64 {
        self.offset
    }
}

impl<A: Nqs> Nqs for Scaled<A> {
    fn num_sites(&self) -> usize {
        self.inner.num_sites()
    }

    fn is_normalized(&self) -> bool {
        self.inner.is_normalized() && self.offset.re == 0.0
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmplitude {
        self.inner.log_amplitude(s) + self.offset
    }

    fn log_magnitude(&self, s: &SpinConfiguration) -> f64 {
        self.inner.log_magnitude(s) + self.offset.re
    }
}

impl<A: Nqs + ?Sized> Nqs for &A {
    fn num_sites(&self) -> usize {
        (**self).num_sites()
    }

    fn is_normalized(&self) -> bool {
        (**self).is_normalized()
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmplitude {
        (**self).log_amplitude(s)
    }

    fn log_magnitude(&self, s: &SpinConfiguration) -> f64 {
        (**self).log_magnitude(s)
    }

    fn as_autoregressive(&self) -> Option<&dyn Autoregressive> {
        (**self).as_autoregressive()
    }
}
