//! Bloom, counting Bloom and exact membership filters over k-mers or phrase IDs.
//!
//! Probe positions use double hashing, `g_i = h1 + i * h2 mod m`, from two
//! base hashes of the item's bytes. Counting filters saturate instead of
//! wrapping and report a saturated minimum as `u32::MAX`, so a reported count
//! is never below the true multiplicity.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::hashing::{hash_bytes, mix64};

pub const MIN_BITS: u64 = 8;
pub const MAX_HASHES: u32 = 16;
pub const DEFAULT_COUNTER_WIDTH: u8 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FilterError {
    #[error("invalid filter parameters: {0}")]
    InvalidParams(String),
    #[error("filter holds {expected:?} items, got {got:?}")]
    ItemKindMismatch { expected: ItemKind, got: ItemKind },
    #[error("a plain Bloom filter does not keep counts")]
    NotCounting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterKind {
    Bloom,
    Counting,
    /// Backed by a real multiset; no false positives.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemKind {
    Kmer(usize),
    PhraseId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Item<'a> {
    Kmer(&'a [u8]),
    Phrase(u32),
}

impl Item<'_> {
    fn kind(&self) -> ItemKind {
        match self {
            Item::Kmer(k) => ItemKind::Kmer(k.len()),
            Item::Phrase(_) => ItemKind::PhraseId,
        }
    }

    fn key(&self) -> Vec<u8> {
        match self {
            Item::Kmer(k) => k.to_vec(),
            Item::Phrase(id) => id.to_le_bytes().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FilterParams {
    pub bits: u64,
    pub hash_count: u32,
    pub seed: u64,
    pub counter_width: u8,
}

impl FilterParams {
    pub fn new(bits: u64, hash_count: u32, seed: u64) -> Result<Self, FilterError> {
        let p = Self {
            bits,
            hash_count,
            seed,
            counter_width: DEFAULT_COUNTER_WIDTH,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_counter_width(self, counter_width: u8) -> Result<Self, FilterError> {
        let p = Self { counter_width, ..self };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), FilterError> {
        if self.bits < MIN_BITS {
            return Err(FilterError::InvalidParams(format!(
                "need at least {MIN_BITS} bits, got {}",
                self.bits
            )));
        }
        if !(1..=MAX_HASHES).contains(&self.hash_count) {
            return Err(FilterError::InvalidParams(format!(
                "hash count {} outside 1..={MAX_HASHES}",
                self.hash_count
            )));
        }
        if !(1..=8).contains(&self.counter_width) {
            return Err(FilterError::InvalidParams(format!(
                "counter width {} outside 1..=8",
                self.counter_width
            )));
        }
        Ok(())
    }

    /// `(1 - e^(-h n / m))^h` for `n` distinct items.
    pub fn expected_fpr(&self, n: u64) -> f64 {
        let h = self.hash_count as f64;
        (1.0 - (-h * n as f64 / self.bits as f64).exp()).powf(h)
    }
}

/// Standard sizing `m = ceil(-n ln p / ln(2)^2)`, `h = ceil((m / n) ln 2)`,
/// clamped to the legal minimum of bits and range of hash counts.
pub fn size_for(n_items: u64, target_fpr: f64) -> Result<FilterParams, FilterError> {
    if n_items == 0 {
        return Err(FilterError::InvalidParams("cannot size a filter for zero items".into()));
    }
    if !(target_fpr > 0.0 && target_fpr < 1.0) {
        return Err(FilterError::InvalidParams(format!(
            "target rate {target_fpr} outside (0, 1)"
        )));
    }
    let ln2 = std::f64::consts::LN_2;
    let n = n_items as f64;
    let m = (-n * target_fpr.ln() / (ln2 * ln2)).ceil();
    let h = ((m / n) * ln2).ceil();
    Ok(FilterParams {
        bits: (m as u64).max(MIN_BITS),
        hash_count: (h as u32).clamp(1, MAX_HASHES),
        seed: 0,
        counter_width: DEFAULT_COUNTER_WIDTH,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Storage {
    Bits(Vec<u64>),
    Counters(Vec<u8>),
    Exact(BTreeMap<Vec<u8>, u32>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MembershipFilter {
    kind: FilterKind,
    item_kind: ItemKind,
    params: FilterParams,
    storage: Storage,
}

impl MembershipFilter {
    pub fn new(kind: FilterKind, item_kind: ItemKind, params: FilterParams) -> Result<Self, FilterError> {
        params.validate()?;
        let m = params.bits as usize;
        let storage = match kind {
            FilterKind::Bloom => Storage::Bits(vec![0; m.div_ceil(64)]),
            FilterKind::Counting => Storage::Counters(vec![0; m]),
            FilterKind::Exact => Storage::Exact(BTreeMap::new()),
        };
        Ok(Self {
            kind,
            item_kind,
            params,
            storage,
        })
    }

    /// Builds a filter from `(item, multiplicity)` pairs.
    pub fn build<'a>(
        items: impl IntoIterator<Item = (Item<'a>, u32)>,
        params: FilterParams,
        kind: FilterKind,
        item_kind: ItemKind,
    ) -> Result<Self, FilterError> {
        let mut filter = Self::new(kind, item_kind, params)?;
        for (item, mult) in items {
            filter.insert(item, mult)?;
        }
        Ok(filter)
    }

    pub(crate) fn from_parts(
        kind: FilterKind,
        item_kind: ItemKind,
        params: FilterParams,
        storage: Storage,
    ) -> Result<Self, FilterError> {
        params.validate()?;
        let m = params.bits as usize;
        let ok = match (&kind, &storage) {
            (FilterKind::Bloom, Storage::Bits(b)) => b.len() == m.div_ceil(64),
            (FilterKind::Counting, Storage::Counters(c)) => c.len() == m,
            (FilterKind::Exact, Storage::Exact(_)) => true,
            _ => false,
        };
        if !ok {
            return Err(FilterError::InvalidParams("storage does not match filter kind".into()));
        }
        Ok(Self {
            kind,
            item_kind,
            params,
            storage,
        })
    }

    pub fn kind(&self) -> FilterKind {
        self.kind
    }

    pub fn item_kind(&self) -> ItemKind {
        self.item_kind
    }

    pub fn params(&self) -> &FilterParams {
        &self.params
    }

    pub(crate) fn storage(&self) -> &Storage {
        &self.storage
    }

    fn max_counter(&self) -> u8 {
        (((1u16 << self.params.counter_width) - 1) & 0xff) as u8
    }

    fn check(&self, item: &Item<'_>) -> Result<(), FilterError> {
        if item.kind() != self.item_kind {
            return Err(FilterError::ItemKindMismatch {
                expected: self.item_kind,
                got: item.kind(),
            });
        }
        Ok(())
    }

    fn probes(&self, key: &[u8]) -> impl Iterator<Item = usize> {
        let h1 = hash_bytes(key, self.params.seed);
        let h2 = mix64(h1 ^ 0x5851_f42d_4c95_7f2d) | 1;
        let m = self.params.bits;
        (0..self.params.hash_count as u64).map(move |i| (h1.wrapping_add(i.wrapping_mul(h2)) % m) as usize)
    }

    pub fn insert(&mut self, item: Item<'_>, multiplicity: u32) -> Result<(), FilterError> {
        self.check(&item)?;
        if multiplicity == 0 {
            return Ok(());
        }
        let key = item.key();
        let max = self.max_counter();
        let probes: Vec<usize> = self.probes(&key).collect();
        match &mut self.storage {
            Storage::Bits(bits) => {
                for p in probes {
                    bits[p / 64] |= 1 << (p % 64);
                }
            }
            Storage::Counters(counters) => {
                let add = multiplicity.min(max as u32) as u8;
                for p in probes {
                    counters[p] = counters[p].saturating_add(add).min(max);
                }
            }
            Storage::Exact(map) => {
                let slot = map.entry(key).or_insert(0);
                *slot = slot.saturating_add(multiplicity);
            }
        }
        Ok(())
    }

    /// Membership: no false negatives for Bloom and counting filters.
    pub fn contains(&self, item: Item<'_>) -> Result<bool, FilterError> {
        self.check(&item)?;
        let key = item.key();
        Ok(match &self.storage {
            Storage::Bits(bits) => self.probes(&key).all(|p| bits[p / 64] >> (p % 64) & 1 == 1),
            Storage::Counters(counters) => self.probes(&key).all(|p| counters[p] > 0),
            Storage::Exact(map) => map.contains_key(&key),
        })
    }

    /// Smallest probed counter, never below the true multiplicity.
    /// Saturated counters read as `u32::MAX`.
    pub fn min_count(&self, item: Item<'_>) -> Result<u32, FilterError> {
        self.check(&item)?;
        let key = item.key();
        match &self.storage {
            Storage::Bits(_) => Err(FilterError::NotCounting),
            Storage::Counters(counters) => {
                let min = self.probes(&key).map(|p| counters[p]).min().unwrap_or(0);
                Ok(if min == self.max_counter() {
                    u32::MAX
                } else {
                    min as u32
                })
            }
            Storage::Exact(map) => Ok(map.get(&key).copied().unwrap_or(0)),
        }
    }

    /// Whether the filter allows that `item` occurs at least `f` times.
    /// A plain Bloom filter can only speak to presence.
    pub fn reports_at_least(&self, item: Item<'_>, f: usize) -> Result<bool, FilterError> {
        match self.kind {
            FilterKind::Bloom => self.contains(item),
            _ => Ok(self.min_count(item)? as usize >= f),
        }
    }
}
