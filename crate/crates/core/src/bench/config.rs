//! `key = value` experiment configuration files.
//!
//! Keys mirror the command-line flags (`length`, `samples`, `reps`, ...).
//! Blank lines and `#` comments are ignored; underscores and dashes in keys
//! are interchangeable. Lists are comma separated.

use std::path::{Path, PathBuf};

use super::emit::Format;
use super::{default_mode, ExperimentSpec};
use crate::ansatz::{AnsatzKind, ArnnInit};
use crate::error::{Error, Result};
use crate::estimator::Mode;

/// Optional settings from a config file or the command line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub ansatz: Option<AnsatzKind>,
    pub arnn_init: Option<ArnnInit>,
    pub length: Option<usize>,
    pub samples: Option<usize>,
    pub reps: Option<usize>,
    pub pairs: Option<usize>,
    pub delta: Option<f64>,
    pub seed: Option<u64>,
    pub bins: Option<usize>,
    pub window: Option<(f64, f64)>,
    pub mode: Option<Mode>,
    pub burn_in: Option<usize>,
    pub steps_per_sweep: Option<usize>,
    pub sweeps_per_sample: Option<usize>,
    pub tabulate: Option<bool>,
    pub n_grid: Option<Vec<usize>>,
    pub length_grid: Option<Vec<usize>>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::invalid(format!("bad value {value:?} for {key}")))
}

fn parse_list<T: std::str::FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value.split(',').map(|v| parse_value(key, v.trim())).collect()
}

pub fn parse_window(value: &str) -> Result<(f64, f64)> {
    match parse_list::<f64>("window", value)?.as_slice() {
        &[lo, hi] => Ok((lo, hi)),
        _ => Err(Error::invalid(format!("window {value:?} needs two numbers: lo,hi"))),
    }
}

pub fn parse_mode(value: &str) -> Result<Mode> {
    match value {
        "normalized" => Ok(Mode::Normalized),
        "general" => Ok(Mode::General),
        other => Err(Error::invalid(format!("unknown mode {other:?} (expected normalized or general)"))),
    }
}

impl Overrides {
    pub fn parse(text: &str) -> Result<Self> {
        let mut o = Overrides::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::invalid(format!("line {}: expected key = value", lineno + 1)))?;
            let key = key.trim().replace('_', "-");
            let value = value.trim();
            match key.as_str() {
                "ansatz" => o.ansatz = Some(value.parse()?),
                "arnn-init" => o.arnn_init = Some(value.parse()?),
                "length" => o.length = Some(parse_value(&key, value)?),
                "samples" => o.samples = Some(parse_value(&key, value)?),
                "reps" => o.reps = Some(parse_value(&key, value)?),
                "pairs" => o.pairs = Some(parse_value(&key, value)?),
                "delta" => o.delta = Some(parse_value(&key, value)?),
                "seed" => o.seed = Some(parse_value(&key, value)?),
                "bins" => o.bins = Some(parse_value(&key, value)?),
                "window" => o.window = Some(parse_window(value)?),
                "mode" => o.mode = Some(parse_mode(value)?),
                "burn-in" => o.burn_in = Some(parse_value(&key, value)?),
                "steps-per-sweep" => o.steps_per_sweep = Some(parse_value(&key, value)?),
                "sweeps-per-sample" => o.sweeps_per_sample = Some(parse_value(&key, value)?),
                "tabulate" => o.tabulate = Some(parse_value(&key, value)?),
                "n-grid" => o.n_grid = Some(parse_list(&key, value)?),
                "length-grid" => o.length_grid = Some(parse_list(&key, value)?),
                "out" => o.out = Some(PathBuf::from(value)),
                "format" => o.format = Some(value.parse()?),
                other => return Err(Error::invalid(format!("line {}: unknown key {other:?}", lineno + 1))),
            }
        }
        Ok(o)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Field-wise `other` where set, `self` otherwise.
    pub fn or(self, other: Overrides) -> Overrides {
        Overrides {
            ansatz: other.ansatz.or(self.ansatz),
            arnn_init: other.arnn_init.or(self.arnn_init),
            length: other.length.or(self.length),
            samples: other.samples.or(self.samples),
            reps: other.reps.or(self.reps),
            pairs: other.pairs.or(self.pairs),
            delta: other.delta.or(self.delta),
            seed: other.seed.or(self.seed),
            bins: other.bins.or(self.bins),
            window: other.window.or(self.window),
            mode: other.mode.or(self.mode),
            burn_in: other.burn_in.or(self.burn_in),
            steps_per_sweep: other.steps_per_sweep.or(self.steps_per_sweep),
            sweeps_per_sample: other.sweeps_per_sample.or(self.sweeps_per_sample),
            tabulate: other.tabulate.or(self.tabulate),
            n_grid: other.n_grid.or(self.n_grid),
            length_grid: other.length_grid.or(self.length_grid),
            out: other.out.or(self.out),
            format: other.format.or(self.format),
        }
    }

    /// Applies every set field to `spec`. Changing the ansatz resets the
    /// estimator mode to that ansatz's default unless a mode is given.
    pub fn apply(&self, spec: &mut ExperimentSpec) {
        if let Some(a) = self.ansatz {
            spec.ansatz = a;
            spec.mode = default_mode(a);
        }
        if let Some(i) = self.arnn_init {
            spec.arnn_init = i;
        }
        let set = |dst: &mut usize, v: Option<usize>| {
            if let Some(v) = v {
                *dst = v;
            }
        };
        set(&mut spec.sites, self.length);
        set(&mut spec.samples, self.samples);
        set(&mut spec.repetitions, self.reps);
        set(&mut spec.pairs, self.pairs);
        set(&mut spec.bin_count, self.bins);
        set(&mut spec.chain.burn_in_sweeps, self.burn_in);
        set(&mut spec.chain.sweeps_per_sample, self.sweeps_per_sample);
        if let Some(v) = self.steps_per_sweep {
            spec.chain.steps_per_sweep = Some(v);
        }
        if let Some(v) = self.delta {
            spec.delta = v;
        }
        if let Some(v) = self.seed {
            spec.seed = v;
        }
        if let Some(v) = self.window {
            spec.fidelity_window = v;
        }
        if let Some(v) = self.mode {
            spec.mode = v;
        }
        if let Some(v) = self.tabulate {
            spec.tabulate = v;
        }
        if let Some(v) = &self.n_grid {
            spec.sample_grid = v.clone();
        }
        if let Some(v) = &self.length_grid {
            spec.length_grid = v.clone();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_key() {
        let text = "
            # desk preset
            ansatz = arnn
            length = 10
            samples = 4096   # per estimate
            reps = 50
            pairs = 4
            delta = 0.1
            seed = 12
            bins = 25
            window = 0.4, 0.6
            mode = general
            burn_in = 30
            steps-per-sweep = 20
            sweeps-per-sample = 2
            tabulate = false
            n-grid = 256,512
            length-grid = 6,8
            out = results.json
            format = json
        ";
        let o = Overrides::parse(text).unwrap();
        let mut spec = ExperimentSpec::new(AnsatzKind::Rbm);
        o.apply(&mut spec);
        assert_eq!(spec.ansatz, AnsatzKind::Arnn);
        assert_eq!(spec.sites, 10);
        assert_eq!(spec.samples, 4096);
        assert_eq!(spec.repetitions, 50);
        assert_eq!(spec.pairs, 4);
        assert_eq!(spec.delta, 0.1);
        assert_eq!(spec.seed, 12);
        assert_eq!(spec.bin_count, 25);
        assert_eq!(spec.fidelity_window, (0.4, 0.6));
        assert_eq!(spec.mode, Mode::General);
        assert_eq!(spec.chain.burn_in_sweeps, 30);
        assert_eq!(spec.chain.steps_per_sweep, Some(20));
        assert_eq!(spec.chain.sweeps_per_sample, 2);
        assert!(!spec.tabulate);
        assert_eq!(spec.sample_grid, vec![256, 512]);
        assert_eq!(spec.length_grid, vec![6, 8]);
        assert_eq!(o.out, Some(PathBuf::from("results.json")));
        assert_eq!(o.format, Some(Format::Json));
    }

    #[test]
    fn later_layer_wins() {
        let file = Overrides::parse("length = 8\nseed = 3").unwrap();
        let flags = Overrides {
            seed: Some(5),
            ..Overrides::default()
        };
        let merged = file.or(flags);
        assert_eq!(merged.length, Some(8));
        assert_eq!(merged.seed, Some(5));
    }

    #[test]
    fn switching_ansatz_resets_mode() {
        let mut spec = ExperimentSpec::new(AnsatzKind::Arnn);
        Overrides::parse("ansatz = rbm").unwrap().apply(&mut spec);
        assert_eq!(spec.mode, Mode::General);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Overrides::parse("length").is_err());
        assert!(Overrides::parse("colour = red").is_err());
        assert!(Overrides::parse("samples = many").is_err());
        assert!(Overrides::parse("window = 0.5").is_err());
    }
}
