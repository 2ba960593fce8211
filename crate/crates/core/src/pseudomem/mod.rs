//! Pseudo-MEMs: substrings of the pattern that together contain the MEMs we
//! are after, produced from a k-mer filter, from the parse index, or from a
//! phrase filter refined by the parse index.
//!
//! Phrase-derived pseudo-MEMs carry a lower bound on the length of an f-MEM
//! they are guaranteed to contain, which is what makes discarding short
//! pseudo-MEMs safe.

mod kebab;
mod parse;
mod search;

use std::ops::Range;

use thiserror::Error;

use crate::filters::FilterError;
use crate::parsing::ParsedString;
use crate::seqindex::IndexError;

pub use kebab::kebab_pseudo_mems;
pub use parse::{coarse_sets, parse_pseudo_mems, refine, CoarseSets};
pub use search::{find_long_mems, Selection};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PseudoMemError {
    #[error("pattern of length {len} has no {k}-mers")]
    PatternTooShort { len: usize, k: usize },
    #[error("k-mer filter required, got {0:?}")]
    WrongFilter(crate::filters::ItemKind),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    /// One-phrase-each-way extension of a parse f-MEM.
    S1,
    /// Adjacent phrases both occurring fewer than f times in the text parse.
    S2,
    /// The pattern parses to a single phrase.
    Whole,
    /// Maximal run of filter-positive k-mers.
    Kebab,
}

impl Origin {
    pub fn as_str(&self) -> &'static str {
        match self {
            Origin::S1 => "S1",
            Origin::S2 => "S2",
            Origin::Whole => "WHOLE",
            Origin::Kebab => "KEBAB",
        }
    }
}

/// Where a phrase-derived pseudo-MEM came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhraseInterval {
    /// First and last phrase, inclusive.
    pub first: usize,
    pub last: usize,
    /// For S1: the parse f-MEM that was extended, inclusive, and its count
    /// in the text parse.
    pub core: Option<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoMem {
    pub chars: Range<usize>,
    pub phrases: Option<PhraseInterval>,
    pub origin: Origin,
    pub lower_bound: usize,
}

impl PseudoMem {
    pub fn len(&self) -> usize {
        self.chars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.chars.is_empty()
    }

    pub fn contains(&self, r: &Range<usize>) -> bool {
        self.chars.start <= r.start && r.end <= self.chars.end
    }

    /// True when the S1 extension added a phrase on both sides.
    pub fn is_unclipped_s1(&self) -> bool {
        match (self.origin, self.phrases) {
            (
                Origin::S1,
                Some(PhraseInterval {
                    first,
                    last,
                    core: Some((i, j, _)),
                }),
            ) => first + 1 == i && j + 1 == last,
            _ => false,
        }
    }
}

/// Length of the stretch left after dropping one phrase from each end, when
/// that stretch is certified to lie inside an f-MEM which itself lies inside
/// the pseudo-MEM; 0 otherwise.
///
/// The certificate needs the extension to be unclipped. A phrase at either
/// end of the pattern does not start (or end) at a trigger, so the text may
/// contain its contents only inside a longer phrase. When the extension is
/// clipped at one end, the f-MEM through the inner phrases can then reach
/// past the pseudo-MEM's other end, and two clipped pseudo-MEMs can certify
/// the same f-MEM; both would make the bound unsafe for discarding.
pub fn compute_lower_bound(pm: &PseudoMem, parsed: &ParsedString) -> usize {
    if !pm.is_unclipped_s1() {
        return 0;
    }
    let iv = pm.phrases.expect("S1 pseudo-MEMs are phrase-derived");
    parsed
        .char_span(iv.first + 1, iv.last - 1)
        .map(|r| r.len())
        .unwrap_or(0)
}

/// Discard threshold: the t-th largest lower bound, duplicates counted, or 0
/// when fewer than t pseudo-MEMs have a nonzero bound.
pub fn discard_threshold(pms: &[PseudoMem], t: usize) -> usize {
    let mut bounds: Vec<usize> = pms.iter().map(|p| p.lower_bound).filter(|&b| b > 0).collect();
    if t == 0 || bounds.len() < t {
        return 0;
    }
    bounds.sort_unstable_by(|a, b| b.cmp(a));
    bounds[t - 1]
}

/// Keep the pseudo-MEMs at least as long as [`discard_threshold`]. The t
/// longest f-MEMs of the pattern all survive.
pub fn safe_discard(pms: &[PseudoMem], t: usize) -> Vec<PseudoMem> {
    let ell = discard_threshold(pms, t);
    pms.iter().filter(|p| p.len() >= ell).cloned().collect()
}
