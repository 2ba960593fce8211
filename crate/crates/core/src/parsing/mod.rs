//! Prefix-free and minimizer parses over a shared phrase dictionary.
//!
//! All positions here are 0-based and intervals are half-open, so phrase `q`
//! covers `phrase_range(q)` of the source string.

mod dictionary;
mod hash;
mod minimizer;
mod pfp;

use std::ops::Range;

use thiserror::Error;

pub use dictionary::{DictionaryOverlay, PhraseDictionary, PhraseRegistry};
pub use hash::{is_prime, RollingHasher, WindowHasher, MERSENNE_61};
pub use minimizer::{minimizer_parse, minimizer_positions, KmerOrder, MinimizerParams};
pub use pfp::{pfp_parse, trigger_breaks};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("input is empty")]
    EmptyInput,
    #[error("text shorter than window ({len} < {width})")]
    TextShorterThanWindow { len: usize, width: usize },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("phrase interval {first}..={last} out of range for a parse of {len} phrases")]
    OutOfRange { first: usize, last: usize, len: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Pfp,
    Minimizer,
}

/// A string rewritten as a sequence of phrase IDs.
///
/// Consecutive phrases share `overlap` characters (the window width for a
/// prefix-free parse, zero for a minimizer parse).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParsedString {
    source_len: usize,
    symbols: Vec<u32>,
    starts: Vec<usize>,
    overlap: usize,
    scheme: Scheme,
}

impl ParsedString {
    pub(crate) fn new(
        source_len: usize,
        symbols: Vec<u32>,
        starts: Vec<usize>,
        overlap: usize,
        scheme: Scheme,
    ) -> Self {
        debug_assert_eq!(symbols.len(), starts.len());
        debug_assert_eq!(starts.first(), Some(&0));
        debug_assert!(starts.windows(2).all(|w| w[0] < w[1]));
        Self {
            source_len,
            symbols,
            starts,
            overlap,
            scheme,
        }
    }

    /// Rebuild from stored parts, checking the offset invariants.
    pub fn from_parts(
        source_len: usize,
        symbols: Vec<u32>,
        starts: Vec<usize>,
        overlap: usize,
        scheme: Scheme,
    ) -> Result<Self, ParseError> {
        let ok = !symbols.is_empty()
            && symbols.len() == starts.len()
            && starts[0] == 0
            && starts.windows(2).all(|w| w[0] < w[1] && w[1] + overlap <= source_len)
            && *starts.last().unwrap() < source_len;
        if !ok {
            return Err(ParseError::InvalidParams("inconsistent parse offsets".into()));
        }
        Ok(Self {
            source_len,
            symbols,
            starts,
            overlap,
            scheme,
        })
    }

    pub fn source_len(&self) -> usize {
        self.source_len
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn phrase_starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn overlap(&self) -> usize {
        self.overlap
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn phrase_end(&self, q: usize) -> usize {
        if q + 1 < self.starts.len() {
            self.starts[q + 1] + self.overlap
        } else {
            self.source_len
        }
    }

    pub fn phrase_range(&self, q: usize) -> Range<usize> {
        self.starts[q]..self.phrase_end(q)
    }

    /// Character interval covered by phrases `first..=last`.
    pub fn char_span(&self, first: usize, last: usize) -> Result<Range<usize>, ParseError> {
        if first > last || last >= self.len() {
            return Err(ParseError::OutOfRange {
                first,
                last,
                len: self.len(),
            });
        }
        Ok(self.starts[first]..self.phrase_end(last))
    }

    /// Overlap-aware concatenation of the phrase contents.
    pub fn reconstruct(&self, dict: &PhraseDictionary) -> Option<Vec<u8>> {
        let mut out = Vec::with_capacity(self.source_len);
        for (q, &id) in self.symbols.iter().enumerate() {
            let phrase = dict.phrase(id)?;
            let skip = if q == 0 { 0 } else { self.overlap };
            out.extend_from_slice(phrase.get(skip..)?);
        }
        Some(out)
    }
}

/// Registers each phrase range of `text` and assembles the parse.
pub(crate) fn assemble(
    text: &[u8],
    starts: Vec<usize>,
    overlap: usize,
    scheme: Scheme,
    dict: &mut impl PhraseRegistry,
) -> ParsedString {
    let n = text.len();
    let symbols = (0..starts.len())
        .map(|q| {
            let end = if q + 1 < starts.len() {
                starts[q + 1] + overlap
            } else {
                n
            };
            dict.id_for(&text[starts[q]..end])
        })
        .collect();
    ParsedString::new(n, symbols, starts, overlap, scheme)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn char_span_bounds() {
        let mut d = PhraseDictionary::new();
        let p = assemble(b"ABCDEFGH", vec![0, 3, 5], 1, Scheme::Pfp, &mut d);
        assert_eq!(p.char_span(0, 2).unwrap(), 0..8);
        assert_eq!(p.char_span(1, 1).unwrap(), 3..6);
        assert!(p.char_span(2, 1).is_err());
        assert!(p.char_span(0, 3).is_err());
        assert_eq!(p.reconstruct(&d).unwrap(), b"ABCDEFGH");
    }

    #[test]
    fn from_parts_validates() {
        assert!(ParsedString::from_parts(5, vec![0, 1], vec![0, 2], 1, Scheme::Pfp).is_ok());
        assert!(ParsedString::from_parts(5, vec![0, 1], vec![1, 2], 1, Scheme::Pfp).is_err());
        assert!(ParsedString::from_parts(5, vec![0, 1], vec![0, 5], 0, Scheme::Minimizer).is_err());
        assert!(ParsedString::from_parts(5, vec![], vec![], 0, Scheme::Minimizer).is_err());
    }
}
