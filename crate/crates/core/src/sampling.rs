//! Drawing configurations from `|ψ(s)|² / N_ψ`.
//!
//! Autoregressive states are sampled exactly, site by site. Anything else
//! goes through single-flip Metropolis–Hastings: `steps_per_sweep` uniform
//! random flip proposals make one sweep, `burn_in_sweeps` sweeps are
//! discarded, and one configuration is recorded every
//! `sweeps_per_sample` sweeps afterwards.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ansatz::Nqs;
use crate::configspace::{RandomStream, SpinConfiguration};
use crate::error::{Error, Result};

/// Redraws allowed when a random chain start has zero amplitude.
const MAX_START_ATTEMPTS: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSettings {
    /// Proposals per sweep; `None` means one per site.
    pub steps_per_sweep: Option<usize>,
    pub burn_in_sweeps: usize,
    /// Sweeps between recorded configurations.
    pub sweeps_per_sample: usize,
}

impl Default for ChainSettings {
    fn default() -> Self {
        Self {
            steps_per_sweep: None,
            burn_in_sweeps: 25,
            sweeps_per_sample: 1,
        }
    }
}

impl ChainSettings {
    pub fn steps_for(&self, sites: usize) -> usize {
        self.steps_per_sweep.unwrap_or(sites)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Exact,
    MarkovChain,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    configurations: Vec<SpinConfiguration>,
    provenance: Provenance,
    accepted: u64,
    proposed: u64,
}

impl SampleBatch {
    pub fn from_configurations(configurations: Vec<SpinConfiguration>, provenance: Provenance) -> Result<Self> {
        let first = configurations.first().ok_or(Error::EmptyBatch)?;
        let sites = first.len();
        if let Some(bad) = configurations.iter().find(|c| c.len() != sites) {
            return Err(Error::DimensionMismatch {
                expected: sites,
                actual: bad.len(),
            });
        }
        Ok(Self {
            configurations,
            provenance,
            accepted: 0,
            proposed: 0,
        })
    }

    pub fn configurations(&self) -> &[SpinConfiguration] {
        &self.configurations
    }

    pub fn len(&self) -> usize {
        self.configurations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configurations.is_empty()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Accepted over proposed steps, burn-in included. `None` for exact batches.
    pub fn acceptance_rate(&self) -> Option<f64> {
        match self.provenance {
            Provenance::Exact => None,
            Provenance::MarkovChain if self.proposed == 0 => Some(0.0),
            Provenance::MarkovChain => Some(self.accepted as f64 / self.proposed as f64),
        }
    }

    pub fn accepted_steps(&self) -> u64 {
        self.accepted
    }

    pub fn proposed_steps(&self) -> u64 {
        self.proposed
    }

    /// Concatenates batches in order. All must share provenance and length.
    pub fn concat(batches: Vec<SampleBatch>) -> Result<SampleBatch> {
        let mut iter = batches.into_iter();
        let mut out = iter.next().ok_or(Error::EmptyBatch)?;
        for b in iter {
            if b.provenance != out.provenance {
                return Err(Error::invalid("cannot merge batches of different provenance"));
            }
            if b.configurations[0].len() != out.configurations[0].len() {
                return Err(Error::DimensionMismatch {
                    expected: out.configurations[0].len(),
                    actual: b.configurations[0].len(),
                });
            }
            out.configurations.extend(b.configurations);
            out.accepted += b.accepted;
            out.proposed += b.proposed;
        }
        Ok(out)
    }
}

/// `n` independent draws from a normalized autoregressive state.
pub fn sample_exact_autoregressive(ansatz: &dyn Nqs, n: usize, rng: &mut RandomStream) -> Result<SampleBatch> {
    if !ansatz.is_normalized() {
        return Err(Error::NotNormalized);
    }
    let ar = ansatz.as_autoregressive().ok_or(Error::NotAutoregressive)?;
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    let sites = ansatz.num_sites();
    let mut configurations = Vec::with_capacity(n);
    let mut ups = vec![false; sites];
    for _ in 0..n {
        let mut cursor = ar.start();
        for up in ups.iter_mut() {
            let p_up = cursor.conditionals().log_probabilities[1].exp();
            *up = rng.random::<f64>() < p_up;
            cursor.push(*up);
        }
        configurations.push(SpinConfiguration::from_ups(&ups)?);
    }
    SampleBatch::from_configurations(configurations, Provenance::Exact)
}

/// A single Metropolis–Hastings chain producing `n` recorded configurations.
///
/// The acceptance probability of a flip `s → s'` is
/// `min(1, exp(2 (ln|ψ(s')| - ln|ψ(s)|)))`; proposals into zero-amplitude
/// configurations are always rejected.
pub fn sample_metropolis(
    ansatz: &dyn Nqs,
    n: usize,
    settings: &ChainSettings,
    rng: &mut RandomStream,
) -> Result<SampleBatch> {
    if n == 0 {
        return Err(Error::EmptyBatch);
    }
    if settings.sweeps_per_sample == 0 {
        return Err(Error::invalid("sweeps_per_sample must be at least 1"));
    }
    let sites = ansatz.num_sites();
    let steps = settings.steps_for(sites);

    let (mut current, mut log_mag) = {
        let mut attempt = 0;
        loop {
            let s = SpinConfiguration::random(sites, rng)?;
            let lm = ansatz.log_magnitude(&s);
            if lm > f64::NEG_INFINITY {
                break (s, lm);
            }
            attempt += 1;
            if attempt == MAX_START_ATTEMPTS {
                return Err(Error::invalid("could not find a nonzero-amplitude chain start"));
            }
        }
    };

    let (mut accepted, mut proposed) = (0u64, 0u64);
    let mut sweep = |current: &mut SpinConfiguration, log_mag: &mut f64, rng: &mut RandomStream| {
        for _ in 0..steps {
            let site = rng.random_range(0..sites as u32) as usize;
            let candidate = current.flip_unchecked(site);
            let cand_mag = ansatz.log_magnitude(&candidate);
            let ratio = (2.0 * (cand_mag - *log_mag)).exp().min(1.0);
            proposed += 1;
            if rng.random::<f64>() < ratio {
                *current = candidate;
                *log_mag = cand_mag;
                accepted += 1;
            }
        }
    };

    for _ in 0..settings.burn_in_sweeps {
        sweep(&mut current, &mut log_mag, rng);
    }
    let mut configurations = Vec::with_capacity(n);
    for _ in 0..n {
        for _ in 0..settings.sweeps_per_sample {
            sweep(&mut current, &mut log_mag, rng);
        }
        configurations.push(current);
    }
    Ok(SampleBatch {
        configurations,
        provenance: Provenance::MarkovChain,
        accepted,
        proposed,
    })
}

/// `chains` independent Metropolis chains of `n_per_chain` samples each, run
/// concurrently on substreams `rng.split(0..chains)` and concatenated in
/// chain order.
pub fn sample_metropolis_chains(
    ansatz: &dyn Nqs,
    n_per_chain: usize,
    chains: usize,
    settings: &ChainSettings,
    rng: &RandomStream,
) -> Result<SampleBatch> {
    if chains == 0 {
        return Err(Error::EmptyBatch);
    }
    let batches = (0..chains as u64)
        .into_par_iter()
        .map(|c| sample_metropolis(ansatz, n_per_chain, settings, &mut rng.split(c)))
        .collect::<Result<Vec<_>>>()?;
    SampleBatch::concat(batches)
}

/// Exact sampling when the ansatz supports it, otherwise one Metropolis chain.
pub fn sample(ansatz: &dyn Nqs, n: usize, settings: &ChainSettings, rng: &mut RandomStream) -> Result<SampleBatch> {
    if ansatz.is_normalized() && ansatz.as_autoregressive().is_some() {
        sample_exact_autoregressive(ansatz, n, rng)
    } else {
        sample_metropolis(ansatz, n, settings, rng)
    }
}
