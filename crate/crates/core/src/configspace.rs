//! Spin-1/2 configurations, full-basis enumeration and seeded random streams.
//!
//! A configuration of `L` sites is stored bit-packed with site 0 in the
//! least-significant bit; a set bit is spin up. In arithmetic contexts up
//! maps to `+1` and down to `-1`.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest site count a packed configuration can hold.
pub const MAX_SITES: usize = 63;

/// Largest site count for which full-basis enumeration is allowed.
pub const ENUMERATION_CEILING: usize = 24;

/// A basis configuration `s = s_0 … s_{L-1}` of `L` two-valued sites.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinConfiguration {
    bits: u64,
    sites: u8,
}

impl SpinConfiguration {
    fn check_sites(sites: usize) -> Result<()> {
        if sites == 0 || sites > MAX_SITES {
            return Err(Error::SiteCount(sites, MAX_SITES));
        }
        Ok(())
    }

    /// All sites down.
    pub fn all_down(sites: usize) -> Result<Self> {
        Self::check_sites(sites)?;
        Ok(Self {
            bits: 0,
            sites: sites as u8,
        })
    }

    /// All sites up.
    pub fn all_up(sites: usize) -> Result<Self> {
        Self::check_sites(sites)?;
        Ok(Self {
            bits: (1u64 << sites) - 1,
            sites: sites as u8,
        })
    }

    /// Builds a configuration from per-site values, `true` meaning up.
    pub fn from_ups(ups: &[bool]) -> Result<Self> {
        Self::check_sites(ups.len())?;
        let bits = ups
            .iter()
            .enumerate()
            .fold(0u64, |acc, (i, &up)| acc | ((up as u64) << i));
        Ok(Self {
            bits,
            sites: ups.len() as u8,
        })
    }

    /// Inverse of [`pack`](Self::pack).
    pub fn unpack(index: u64, sites: usize) -> Result<Self> {
        Self::check_sites(sites)?;
        if index >> sites != 0 {
            return Err(Error::BasisIndex { index, sites });
        }
        Ok(Self {
            bits: index,
            sites: sites as u8,
        })
    }

    /// Basis index `Σ b_i 2^i` with `b_i = 1` iff site `i` is up.
    #[inline]
    pub fn pack(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.sites as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.sites == 0
    }

    #[inline]
    pub fn is_up(&self, site: usize) -> bool {
        debug_assert!(site < self.len());
        (self.bits >> site) & 1 == 1
    }

    /// Arithmetic spin value, `+1.0` for up and `-1.0` for down.
    #[inline]
    pub fn spin(&self, site: usize) -> f64 {
        if self.is_up(site) {
            1.0
        } else {
            -1.0
        }
    }

    /// Iterator over the `±1` spin values in site order.
    pub fn spins(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.len()).map(move |i| self.spin(i))
    }

    /// Copy with site `site` flipped.
    pub fn flip(&self, site: usize) -> Result<Self> {
        if site >= self.len() {
            return Err(Error::SiteIndex {
                index: site,
                sites: self.len(),
            });
        }
        Ok(self.flip_unchecked(site))
    }

    #[inline]
    pub(crate) fn flip_unchecked(&self, site: usize) -> Self {
        Self {
            bits: self.bits ^ (1u64 << site),
            sites: self.sites,
        }
    }

    /// Copy with every site flipped.
    pub fn flip_all(&self) -> Self {
        Self {
            bits: !self.bits & ((1u64 << self.sites) - 1),
            sites: self.sites,
        }
    }

    /// Number of sites at which `self` and `other` differ.
    pub fn hamming_distance(&self, other: &Self) -> u32 {
        (self.bits ^ other.bits).count_ones()
    }

    /// Uniformly random configuration.
    pub fn random(sites: usize, rng: &mut RandomStream) -> Result<Self> {
        Self::check_sites(sites)?;
        let bits = rng.next_u64() & ((1u64 << sites) - 1);
        Ok(Self {
            bits,
            sites: sites as u8,
        })
    }
}

impl fmt::Debug for SpinConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SpinConfiguration(")?;
        for i in 0..self.len() {
            f.write_str(if self.is_up(i) { "↑" } else { "↓" })?;
        }
        write!(f, ")")
    }
}

/// Enumerates all `2^sites` configurations in pack order.
///
/// Refuses site counts above [`ENUMERATION_CEILING`].
pub fn enumerate_basis(sites: usize) -> Result<BasisIter> {
    if sites > ENUMERATION_CEILING {
        return Err(Error::EnumerationCeiling {
            sites,
            ceiling: ENUMERATION_CEILING,
        });
    }
    SpinConfiguration::check_sites(sites)?;
    Ok(BasisIter {
        next: 0,
        end: 1u64 << sites,
        sites: sites as u8,
    })
}

/// Iterator returned by [`enumerate_basis`].
#[derive(Debug, Clone)]
pub struct BasisIter {
    next: u64,
    end: u64,
    sites: u8,
}

impl Iterator for BasisIter {
    type Item = SpinConfiguration;

    fn next(&mut self) -> Option<SpinConfiguration> {
        if self.next >= self.end {
            return None;
        }
        let c = SpinConfiguration {
            bits: self.next,
            sites: self.sites,
        };
        self.next += 1;
        Some(c)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = (self.end - self.next) as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for BasisIter {}

impl DoubleEndedIterator for BasisIter {
    fn next_back(&mut self) -> Option<SpinConfiguration> {
        if self.next >= self.end {
            return None;
        }
        self.end -= 1;
        Some(SpinConfiguration {
            bits: self.end,
            sites: self.sites,
        })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seeded, splittable random stream.
///
/// The generator is ChaCha8 keyed by a 64-bit value derived from the root
/// seed and the split path, so a `(seed, path)` pair names the same draw
/// sequence on every platform. Substreams never share state with their
/// parent.
#[derive(Clone)]
pub struct RandomStream {
    seed: u64,
    key: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        let key = splitmix64(seed);
        Self {
            seed,
            key,
            rng: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Independent substream number `index`. Depends only on this stream's
    /// identity and `index`, never on how many draws were consumed.
    pub fn split(&self, index: u64) -> Self {
        let key = splitmix64(self.key ^ splitmix64(index.wrapping_add(0x5851_f42d_4c95_7f2d)));
        Self {
            seed: self.seed,
            key,
            rng: ChaCha8Rng::seed_from_u64(key),
        }
    }

    /// Root seed this stream descends from.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Key identifying this position in the split tree.
    pub fn key(&self) -> u64 {
        self.key
    }
}

impl fmt::Debug for RandomStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RandomStream")
            .field("seed", &self.seed)
            .field("key", &self.key)
            .finish_non_exhaustive()
    }
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}
