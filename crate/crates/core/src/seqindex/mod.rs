//! Occurrence counting and f-MEM search over sequences of integer symbols.
//!
//! The same code serves character texts (bytes widened to `u32`) and parses
//! (phrase IDs). An [`OccurrenceIndex`] keeps one suffix structure over the
//! text for extending matches to the right and one over the reversed text for
//! extending them to the left, which is all forward-backward search needs.

mod mems;
mod suffix_array;

use std::ops::Deref;

use thiserror::Error;

pub use mems::{bml_mems, bml_top_t, find_f_mems, keep_top_ties, Mem, SearchStats};
pub use suffix_array::{suffix_array, SaInterval, SuffixIndex};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum IndexError {
    #[error("cannot index an empty sequence")]
    EmptySequence,
    #[error("cannot count an empty query")]
    EmptyQuery,
    #[error("frequency threshold must be at least 1")]
    ZeroFrequency,
    #[error("length threshold must be at least 1")]
    ZeroLength,
    #[error("symbol {symbol} outside alphabet of size {alphabet_size}")]
    SymbolOutOfRange { symbol: u32, alphabet_size: u32 },
    #[error("stored index is inconsistent")]
    Corrupt,
}

/// A sequence tagged with the size of the alphabet it is drawn from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolSequence {
    symbols: Vec<u32>,
    alphabet_size: u32,
}

impl SymbolSequence {
    pub fn new(symbols: Vec<u32>, alphabet_size: u32) -> Result<Self, IndexError> {
        if let Some(&symbol) = symbols.iter().find(|&&s| s >= alphabet_size) {
            return Err(IndexError::SymbolOutOfRange { symbol, alphabet_size });
        }
        Ok(Self { symbols, alphabet_size })
    }

    pub fn from_bytes(bytes: &[u8]) -> Self {
        Self {
            symbols: bytes.iter().map(|&b| b as u32).collect(),
            alphabet_size: 256,
        }
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn into_symbols(self) -> Vec<u32> {
        self.symbols
    }
}

impl Deref for SymbolSequence {
    type Target = [u32];

    fn deref(&self) -> &[u32] {
        &self.symbols
    }
}

/// Match of a query `Q`, extendable on the right.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RightMatch(SaInterval);

/// Match of a query `Q` held as `Q` reversed in the backward structure,
/// extendable on the left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeftMatch(SaInterval);

impl RightMatch {
    pub fn count(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.depth
    }

    pub fn is_empty(&self) -> bool {
        self.0.depth == 0
    }
}

impl LeftMatch {
    pub fn count(&self) -> usize {
        self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.depth
    }

    pub fn is_empty(&self) -> bool {
        self.0.depth == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OccurrenceIndex {
    forward: SuffixIndex,
    backward: SuffixIndex,
    alphabet_size: u32,
}

impl OccurrenceIndex {
    pub fn build(seq: &SymbolSequence) -> Result<Self, IndexError> {
        if seq.is_empty() {
            return Err(IndexError::EmptySequence);
        }
        let forward = SuffixIndex::new(seq.to_vec());
        let backward = SuffixIndex::new(seq.iter().rev().copied().collect());
        Ok(Self {
            forward,
            backward,
            alphabet_size: seq.alphabet_size,
        })
    }

    /// Reassemble from a text and its two stored suffix arrays.
    pub fn from_parts(
        text: Vec<u32>,
        alphabet_size: u32,
        forward_sa: Vec<u32>,
        backward_sa: Vec<u32>,
    ) -> Result<Self, IndexError> {
        if text.is_empty() {
            return Err(IndexError::EmptySequence);
        }
        let reversed = text.iter().rev().copied().collect();
        let forward = SuffixIndex::from_parts(text, forward_sa).ok_or(IndexError::Corrupt)?;
        let backward = SuffixIndex::from_parts(reversed, backward_sa).ok_or(IndexError::Corrupt)?;
        Ok(Self {
            forward,
            backward,
            alphabet_size,
        })
    }

    pub fn text(&self) -> &[u32] {
        self.forward.text()
    }

    pub fn len(&self) -> usize {
        self.forward.text().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn alphabet_size(&self) -> u32 {
        self.alphabet_size
    }

    pub fn forward(&self) -> &SuffixIndex {
        &self.forward
    }

    pub fn backward(&self) -> &SuffixIndex {
        &self.backward
    }

    /// Number of (possibly overlapping) occurrences of `query`.
    pub fn count(&self, query: &[u32]) -> Result<usize, IndexError> {
        if query.is_empty() {
            return Err(IndexError::EmptyQuery);
        }
        Ok(self.forward.interval(query).len())
    }

    pub fn empty_right(&self) -> RightMatch {
        RightMatch(self.forward.full())
    }

    pub fn empty_left(&self) -> LeftMatch {
        LeftMatch(self.backward.full())
    }

    /// `Q` to `Q·sym`.
    pub fn extend_right(&self, m: RightMatch, sym: u32) -> RightMatch {
        RightMatch(self.forward.extend(m.0, sym))
    }

    /// `Q` to `sym·Q`.
    pub fn extend_left(&self, m: LeftMatch, sym: u32) -> LeftMatch {
        LeftMatch(self.backward.extend(m.0, sym))
    }
}
