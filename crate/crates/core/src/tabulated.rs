//! Memoized wavefunctions for desk-scale system sizes.
//!
//! A [`Tabulated`] state evaluates its source once on every basis state and
//! answers later amplitude queries by lookup. When the source is
//! autoregressive, the conditionals at every prefix are tabulated as well,
//! so exact sampling walks the same numbers the network would produce, at
//! O(L) cost per draw. Samplers and estimators treat a tabulated state like
//! any other [`Nqs`].

use rayon::prelude::*;

use crate::ansatz::{Autoregressive, ConditionalCursor, Conditionals, LogAmplitude, Nqs};
use crate::configspace::SpinConfiguration;
use crate::error::{Error, Result};
use crate::oracle::AmplitudeTable;

#[derive(Debug, Clone)]
pub struct Tabulated {
    table: AmplitudeTable,
    normalized: bool,
    /// Conditionals for prefix `p` of length `i` at index `2^i - 1 + pack(p)`.
    conditionals: Option<Vec<Conditionals>>,
}

impl Tabulated {
    /// Enumerates `source` over the full basis. Fails above the oracle ceiling.
    pub fn new(source: &dyn Nqs) -> Result<Self> {
        let table = AmplitudeTable::new(source)?;
        let sites = table.sites();
        let conditionals = match source.as_autoregressive() {
            None => None,
            Some(ar) => {
                let nodes = (1usize << sites) - 1;
                let tree = (0..nodes)
                    .into_par_iter()
                    .map(|node| {
                        let level = usize::BITS - 1 - (node + 1).leading_zeros();
                        let prefix = (node + 1) - (1 << level);
                        let bits: Vec<bool> = (0..level).map(|i| prefix >> i & 1 == 1).collect();
                        ar.conditionals(&bits)
                    })
                    .collect::<Result<Vec<_>>>()?;
                Some(tree)
            }
        };
        Ok(Self {
            table,
            normalized: source.is_normalized(),
            conditionals,
        })
    }

    pub fn table(&self) -> &AmplitudeTable {
        &self.table
    }

    fn node(&self, level: usize, prefix: u64) -> Conditionals {
        let tree = self.conditionals.as_ref().expect("autoregressive table");
        tree[(1usize << level) - 1 + prefix as usize]
    }
}

impl Nqs for Tabulated {
    fn num_sites(&self) -> usize {
        self.table.sites()
    }

    fn is_normalized(&self) -> bool {
        self.normalized
    }

    fn log_amplitude(&self, s: &SpinConfiguration) -> LogAmplitude {
        self.table.log_amplitudes()[s.pack() as usize]
    }

    fn log_magnitude(&self, s: &SpinConfiguration) -> f64 {
        self.table.log_amplitudes()[s.pack() as usize].re
    }

    fn as_autoregressive(&self) -> Option<&dyn Autoregressive> {
        self.conditionals.as_ref().map(|_| self as &dyn Autoregressive)
    }
}

impl Autoregressive for Tabulated {
    fn conditionals(&self, prefix: &[bool]) -> Result<Conditionals> {
        if prefix.len() >= self.num_sites() {
            return Err(Error::invalid(format!(
                "prefix of length {} for {} sites",
                prefix.len(),
                self.num_sites()
            )));
        }
        if self.conditionals.is_none() {
            return Err(Error::NotAutoregressive);
        }
        let packed = prefix
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &up)| acc | (u64::from(up) << i));
        Ok(self.node(prefix.len(), packed))
    }

    fn start(&self) -> Box<dyn ConditionalCursor + '_> {
        Box::new(TabulatedCursor {
            state: self,
            position: 0,
            prefix: 0,
        })
    }
}

struct TabulatedCursor<'a> {
    state: &'a Tabulated,
    position: usize,
    prefix: u64,
}

impl ConditionalCursor for TabulatedCursor<'_> {
    fn position(&self) -> usize {
        self.position
    }

    fn conditionals(&self) -> Conditionals {
        self.state.node(self.position, self.prefix)
    }

    fn push(&mut self, up: bool) {
        self.prefix |= u64::from(up) << self.position;
        self.position += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ansatz::{init_random, AnsatzKind};
    use crate::configspace::{enumerate_basis, RandomStream};
    use crate::sampling::{sample, sample_exact_autoregressive, ChainSettings};

    #[test]
    fn lookups_match_the_source() {
        for kind in [AnsatzKind::Rbm, AnsatzKind::Arnn] {
            let a = init_random(kind, 7, 3).unwrap();
            let t = Tabulated::new(&a).unwrap();
            assert_eq!(t.is_normalized(), a.is_normalized());
            assert_eq!(t.as_autoregressive().is_some(), a.as_autoregressive().is_some());
            for s in enumerate_basis(7).unwrap() {
                assert_eq!(t.log_amplitude(&s), a.log_amplitude(&s));
            }
        }
    }

    #[test]
    fn tabulated_conditionals_are_the_network_conditionals() {
        let a = init_random(AnsatzKind::Arnn, 6, 4).unwrap();
        let t = Tabulated::new(&a).unwrap();
        let ar = a.as_autoregressive().unwrap();
        for s in enumerate_basis(6).unwrap() {
            let bits: Vec<bool> = (0..6).map(|i| s.is_up(i)).collect();
            let mut cursor = t.start();
            for (i, &up) in bits.iter().enumerate() {
                assert_eq!(cursor.position(), i);
                let expected = ar.conditionals(&bits[..i]).unwrap();
                assert_eq!(cursor.conditionals(), expected);
                assert_eq!(t.conditionals(&bits[..i]).unwrap(), expected);
                cursor.push(up);
            }
        }
        assert!(t.conditionals(&[false; 6]).is_err());
    }

    #[test]
    fn exact_sampling_through_the_table_reproduces_direct_sampling() {
        let a = init_random(AnsatzKind::Arnn, 8, 5).unwrap();
        let t = Tabulated::new(&a).unwrap();
        let direct = sample_exact_autoregressive(&a, 2000, &mut RandomStream::new(12)).unwrap();
        let tab = sample_exact_autoregressive(&t, 2000, &mut RandomStream::new(12)).unwrap();
        assert_eq!(direct, tab);
    }

    #[test]
    fn metropolis_through_the_table_reproduces_direct_chains() {
        let a = init_random(AnsatzKind::Rbm, 8, 5).unwrap();
        let t = Tabulated::new(&a).unwrap();
        let s = ChainSettings::default();
        let direct = sample(&a, 500, &s, &mut RandomStream::new(2)).unwrap();
        let tab = sample(&t, 500, &s, &mut RandomStream::new(2)).unwrap();
        assert_eq!(direct, tab);
    }
}
