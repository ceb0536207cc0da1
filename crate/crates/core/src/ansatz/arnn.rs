//! Densely connected recurrent autoregressive network.
//!
//! Each of the `depth` stacked layers updates its hidden vector per site as
//! `h_i = ELU(A h_{i-1} + B x_i + c)`, where `x_i` is the one-hot encoding of
//! the previous spin for the first layer and the hidden vector of the layer
//! below otherwise. A dense head maps the top hidden vector to two logits and
//! two raw phases. Conditional probabilities are a softmax over the logits,
//! so the wavefunction is normalized by construction; phases are
//! `π·tanh(raw)` and carry no magnitude.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Autoregressive, ConditionalCursor, Conditionals, LogAmplitude, Nqs};
use crate::configspace::{RandomStream, SpinConfiguration, MAX_SITES};
use crate::error::{Error, Result};

pub const DEFAULT_HIDDEN: usize = 16;
pub const DEFAULT_DEPTH: usize = 4;

const HEAD_OUTPUTS: usize = 4;
const ONE_HOT: usize = 2;

/// Interval for the random weights of each dense map, in units of
/// [`init_bound`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArnnInit {
    /// `U[0, b]`.
    #[default]
    Positive,
    /// `U[-b, b]`. Keeps the conditionals near one half, which avoids the
    /// nearly deterministic states the positive scheme often produces.
    Symmetric,
}

impl fmt::Display for ArnnInit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ArnnInit::Positive => "positive",
            ArnnInit::Symmetric => "symmetric",
        })
    }
}

impl FromStr for ArnnInit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "positive" => Ok(ArnnInit::Positive),
            "symmetric" => Ok(ArnnInit::Symmetric),
            other => Err(Error::invalid(format!("unknown init scheme `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Layer {
    /// `hidden × hidden`, row-major.
    recurrent: Vec<f64>,
    /// `hidden × inputs`, row-major.
    input: Vec<f64>,
    bias: Vec<f64>,
    inputs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Arnn {
    sites: usize,
    hidden: usize,
    layers: Vec<Layer>,
    /// `4 × hidden`, rows: logit↓, logit↑, phase↓, phase↑.
    head: Vec<f64>,
    head_bias: [f64; HEAD_OUTPUTS],
}

#[inline]
fn elu(x: f64) -> f64 {
    if x > 0.0 {
        x
    } else {
        x.exp_m1()
    }
}

/// Upper edge of the uniform init interval for a dense map with the given
/// fan-in and fan-out: `1 / sqrt((fan_in + fan_out) / 2)`.
pub fn init_bound(fan_in: usize, fan_out: usize) -> f64 {
    1.0 / ((fan_in + fan_out) as f64 / 2.0).sqrt()
}

impl Arnn {
    fn layer_inputs(hidden: usize, index: usize) -> usize {
        if index == 0 {
            ONE_HOT
        } else {
            hidden
        }
    }

    /// Network with every weight and bias zero (uniform conditionals, zero phases).
    pub fn zeros(sites: usize, hidden: usize, depth: usize) -> Result<Self> {
        let n = Self::parameter_count_for(hidden, depth);
        Self::from_parameters(sites, hidden, depth, &vec![0.0; n])
    }

    /// Weights drawn from `U[0, 1]` scaled by [`init_bound`] for each dense
    /// map; biases start at zero.
    pub fn random(sites: usize, hidden: usize, depth: usize, rng: &mut RandomStream) -> Result<Self> {
        Self::random_with(sites, hidden, depth, ArnnInit::Positive, rng)
    }

    pub fn random_with(
        sites: usize,
        hidden: usize,
        depth: usize,
        init: ArnnInit,
        rng: &mut RandomStream,
    ) -> Result<Self> {
        let mut net = Self::zeros(sites, hidden, depth)?;
        let mut draw = |bound: f64| match init {
            ArnnInit::Positive => rng.random::<f64>() * bound,
            ArnnInit::Symmetric => (2.0 * rng.random::<f64>() - 1.0) * bound,
        };
        for layer in &mut net.layers {
            let rb = init_bound(hidden, hidden);
            layer.recurrent.iter_mut().for_each(|w| *w = draw(rb));
            let ib = init_bound(layer.inputs, hidden);
            layer.input.iter_mut().for_each(|w| *w = draw(ib));
        }
        let hb = init_bound(hidden, HEAD_OUTPUTS);
        net.head.iter_mut().for_each(|w| *w = draw(hb));
        Ok(net)
    }

    pub fn parameter_count_for(hidden: usize, depth: usize) -> usize {
        let layers: usize = (0..depth)
            .map(|l| hidden * hidden + hidden * Self::layer_inputs(hidden, l) + hidden)
            .sum();
        layers + HEAD_OUTPUTS * hidden + HEAD_OUTPUTS
    }

    pub fn from_parameters(sites: usize, hidden: usize, depth: usize, params: &[f64]) -> Result<Self> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::SiteCount(sites, MAX_SITES));
        }
        if hidden == 0 || depth == 0 {
            return Err(Error::invalid("ARNN needs nonzero hidden size and depth"));
        }
        let expected = Self::parameter_count_for(hidden, depth);
        if params.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                actual: params.len(),
            });
        }
        if let Some(i) = params.iter().position(|p| !p.is_finite()) {
            return Err(Error::NonFiniteParameter(i));
        }
        let mut rest = params;
        let mut take = |n: usize| {
            let (a, b) = rest.split_at(n);
            rest = b;
            a.to_vec()
        };
        let layers = (0..depth)
            .map(|l| {
                let inputs = Self::layer_inputs(hidden, l);
                Layer {
                    recurrent: take(hidden * hidden),
                    input: take(hidden * inputs),
                    bias: take(hidden),
                    inputs,
                }
            })
            .collect();
        let head = take(HEAD_OUTPUTS * hidden);
        let hb = take(HEAD_OUTPUTS);
        Ok(Self {
            sites,
            hidden,
            layers,
            head,
            head_bias: [hb[0], hb[1], hb[2], hb[3]],
        })
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn parameter_count(&self) -> usize {
        Self::parameter_count_for(self.hidden, self.depth())
    }

    /// Flat parameters: per layer `recurrent, input, bias`, then head weights
    /// and head bias.
    pub fn parameters(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend_from_slice(&l.recurrent);
            out.extend_from_slice(&l.input);
            out.extend_from_slice(&l.bias);
        }
        out.extend_from_slice(&self.head);
        out.extend_from_slice(&self.head_bias);
        out
    }

    pub fn with_parameters(&self, params: &[f64]) -> Result<Self> {
        Self::from_parameters(self.sites, self.hidden, self.depth(), params)
    }

    /// Per-site bounds used by [`random`](Self::random), in flat parameter
    /// order; biases report `0.0`.
    pub fn init_bounds(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.parameter_count());
        for l in &self.layers {
            out.extend(std::iter::repeat_n(init_bound(self.hidden, self.hidden), l.recurrent.len()));
            out.extend(std::iter::repeat_n(init_bound(l.inputs, self.hidden), l.input.len()));
            out.extend(std::iter::repeat_n(0.0, l.bias.len()));
        }
        out.extend(std::iter::repeat_n(init_bound(self.hidden, HEAD_OUTPUTS), self.head.len()));
        out.extend([0.0; HEAD_OUTPUTS]);
        out
    }

    fn initial_state(&self) -> Vec<f64> {
        vec![0.0; self.hidden * self.layers.len()]
    }

    /// Advances every layer by one site. `prev` is the previous spin, `None`
    /// at site 0 (zero input).
    fn step(&self, state: &mut [f64], prev: Option<bool>, scratch: &mut Vec<f64>) {
        let h = self.hidden;
        scratch.clear();
        scratch.resize(h, 0.0);
        for (l, layer) in self.layers.iter().enumerate() {
            {
                let old = &state[l * h..(l + 1) * h];
                // layers above the first read the freshly updated layer below
                let below = (l > 0).then(|| &state[(l - 1) * h..l * h]);
                for r in 0..h {
                    let mut acc = layer.bias[r];
                    let row = &layer.recurrent[r * h..(r + 1) * h];
                    acc += row.iter().zip(old).map(|(a, b)| a * b).sum::<f64>();
                    let irow = &layer.input[r * layer.inputs..(r + 1) * layer.inputs];
                    match below {
                        None => {
                            if let Some(up) = prev {
                                acc += irow[up as usize];
                            }
                        }
                        Some(x) => acc += irow.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
                    }
                    scratch[r] = elu(acc);
                }
            }
            state[l * h..(l + 1) * h].copy_from_slice(scratch);
        }
    }

    fn head_outputs(&self, state: &[f64]) -> [f64; HEAD_OUTPUTS] {
        let h = self.hidden;
        let top = &state[(self.layers.len() - 1) * h..];
        let mut out = self.head_bias;
        for (k, o) in out.iter_mut().enumerate() {
            *o += self.head[k * h..(k + 1) * h]
                .iter()
                .zip(top)
                .map(|(a, b)| a * b)
                .sum::<f64>();
        }
        out
    }

    fn conditionals_from_head(out: [f64; HEAD_OUTPUTS]) -> Conditionals {
        // log-softmax over two logits
        let (ld, lu) = (out[0], out[1]);
        let m = ld.max(lu);
        let lse = m + ((ld - m).exp() + (lu - m).exp()).ln();
        Conditionals {
            log_probabilities: [ld - lse, lu - lse],
            phases: [PI * out[2].tanh(), PI * out[3].tanh()],
        }
    }

    /// Straight pass over `s`, returning the realized conditionals per site.
    pub fn realized_conditionals(&self, s: &SpinConfiguration) -> Vec<Conditionals> {
        let mut cursor = self.cursor();
        let mut out = Vec::with_capacity(self.sites);
        for i in 0..self.sites {
            out.push(cursor.conditionals());
            cursor.push(s.is_up(i));
        }
        out
    }

    pub fn cursor(&self) -> ArnnCursor<'_> {
        let mut state = self.initial_state();
        let mut scratch = Vec::with_capacity(self.hidden);
        self.step(&mut state, None, &mut scratch);
        ArnnCursor {
            net: self,
            state,
            scratch,
            position: 0,
        }
    }
}

/// Incremental evaluator positioned at some site of an [`Arnn`].
pub struct ArnnCursor<'a> {
    net: &'a Arnn,
    state: Vec<f64>,
    scratch: Vec<f64>,
    position: usize,
}

impl ConditionalCursor for ArnnCursor<'_> {
    fn position(&self) -> usize {
        self.position
    }

    fn conditionals(&self) -> Conditionals {
        Arnn::conditionals_from_head(self.net.head_outputs(&self.state))
    }

    fn push(&mut self, up: bool) {
        debug_assert!(self.position < self.net.sites);
        self.position += 1;
        if self.position < self.net.sites {
            self.net.step(&mut self.state, Some(up), &mut self.scratch);
        }
    }
}

impl Nqs for Arnn {
    fn num_sites(&self) -> usize {
        self.sites
    }

    fn is_normalized(&self) -> bool {
        true
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmplitude {
        debug_assert_eq!(s.len(), self.sites);
        let mut cursor = self.cursor();
        let (mut log_p, mut phase) = (0.0, 0.0);
        for i in 0..self.sites {
            let up = s.is_up(i);
            let c = cursor.conditionals();
            log_p += c.log_probabilities[up as usize];
            phase += c.phases[up as usize];
            cursor.push(up);
        }
        LogAmplitude::new(0.5 * log_p, phase)
    }

    fn as_autoregressive(&self) -> Option<&dyn Autoregressive> {
        Some(self)
    }
}

impl Autoregressive for Arnn {
    fn conditionals(&self, prefix: &[bool]) -> Result<Conditionals> {
        if prefix.len() >= self.sites {
            return Err(Error::invalid(format!(
                "prefix of length {} for {} sites",
                prefix.len(),
                self.sites
            )));
        }
        let mut cursor = self.cursor();
        for &up in prefix {
            cursor.push(up);
        }
        Ok(cursor.conditionals())
    }

    fn start(&self) -> Box<dyn ConditionalCursor + '_> {
        Box::new(self.cursor())
    }
}
