//! Brute-force ground truth, written for obviousness rather than speed.
//!
//! Everything is driven by a table of longest common extensions between
//! each pattern position and each text position, so counts of `P[i..i+len]`
//! are just "how many text positions extend at least `len` symbols".

use thiserror::Error;

use crate::seqindex::Mem;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("cannot count an empty query")]
    EmptyQuery,
    #[error("frequency threshold must be at least 1")]
    ZeroFrequency,
}

/// Size limits for brute-force instances.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleConfig {
    pub max_text_len: usize,
    pub max_pattern_len: usize,
    pub alphabet: Vec<u8>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            max_text_len: 2000,
            max_pattern_len: 200,
            alphabet: b"ACGT".to_vec(),
        }
    }
}

/// Starting positions of `query` in `text`, overlaps counted.
pub fn brute_force_count<S: PartialEq>(text: &[S], query: &[S]) -> Result<usize, OracleError> {
    if query.is_empty() {
        return Err(OracleError::EmptyQuery);
    }
    if query.len() > text.len() {
        return Ok(0);
    }
    Ok((0..=text.len() - query.len())
        .filter(|&i| &text[i..i + query.len()] == query)
        .count())
}

/// `lce[i][j]` = length of the longest common prefix of `pattern[i..]` and `text[j..]`.
struct ExtensionTable {
    m: usize,
    n: usize,
    lce: Vec<u32>,
}

impl ExtensionTable {
    fn new<S: PartialEq>(text: &[S], pattern: &[S]) -> Self {
        let (m, n) = (pattern.len(), text.len());
        let mut lce = vec![0u32; (m + 1) * (n + 1)];
        for i in (0..m).rev() {
            for j in (0..n).rev() {
                if pattern[i] == text[j] {
                    lce[i * (n + 1) + j] = lce[(i + 1) * (n + 1) + j + 1] + 1;
                }
            }
        }
        Self { m, n, lce }
    }

    /// Occurrences of `pattern[i..i+len]`.
    fn count(&self, i: usize, len: usize) -> usize {
        let row = &self.lce[i * (self.n + 1)..i * (self.n + 1) + self.n];
        row.iter().filter(|&&l| l as usize >= len).count()
    }
}

/// Every f-MEM of `pattern` against `text`, sorted by start: for each start
/// the longest match occurring at least `f` times, kept when extending it
/// one symbol to the left drops below `f`.
pub fn brute_force_f_mems<S: PartialEq>(text: &[S], pattern: &[S], f: usize) -> Result<Vec<Mem>, OracleError> {
    if f == 0 {
        return Err(OracleError::ZeroFrequency);
    }
    let table = ExtensionTable::new(text, pattern);
    let m = table.m;
    let mut out = Vec::new();
    for i in 0..m {
        let mut len = 0;
        while i + len < m && table.count(i, len + 1) >= f {
            len += 1;
        }
        if len == 0 {
            continue;
        }
        let left_maximal = i == 0 || table.count(i - 1, len + 1) < f;
        let right_maximal = i + len == m || table.count(i, len + 1) < f;
        if left_maximal && right_maximal {
            out.push(Mem {
                start: i,
                end: i + len,
                freq: table.count(i, len),
                f,
            });
        }
    }
    Ok(out)
}

/// Parse-level f-MEMs; phrase-ID sequences are just another alphabet.
pub fn brute_force_parse_f_mems(parse_text: &[u32], parse_pattern: &[u32], f: usize) -> Result<Vec<Mem>, OracleError> {
    brute_force_f_mems(parse_text, parse_pattern, f)
}

/// Second route, for tiny inputs only: enumerate all substrings, count each
/// by scanning, and keep those whose one-symbol extensions fall below `f`.
pub fn enumerate_f_mems<S: PartialEq>(text: &[S], pattern: &[S], f: usize) -> Vec<(usize, usize)> {
    let count = |a: usize, b: usize| brute_force_count(text, &pattern[a..b]).unwrap();
    let m = pattern.len();
    let mut out = Vec::new();
    for a in 0..m {
        for b in a + 1..=m {
            if count(a, b) < f {
                continue;
            }
            let left = a == 0 || count(a - 1, b) < f;
            let right = b == m || count(a, b + 1) < f;
            if left && right {
                out.push((a, b));
            }
        }
    }
    out
}

/// Lengths of the `t` longest MEMs, longest first.
pub fn top_lengths(mems: &[Mem], t: usize) -> Vec<usize> {
    let mut lens: Vec<usize> = mems.iter().map(Mem::len).collect();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    lens.truncate(t);
    lens
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spans(mems: &[Mem]) -> Vec<(usize, usize)> {
        mems.iter().map(|m| (m.start, m.end)).collect()
    }

    #[test]
    fn counting() {
        assert_eq!(brute_force_count(b"BANANA", b"ANA"), Ok(2));
        assert_eq!(brute_force_count(b"BAN", b"BANANA"), Ok(0));
        assert_eq!(brute_force_count(b"BANANA", b"BANANA"), Ok(1));
        assert_eq!(brute_force_count(b"BANANA", b""), Err(OracleError::EmptyQuery));
    }

    #[test]
    fn banana_anas() {
        let mems = brute_force_f_mems(b"BANANA", b"ANAS", 1).unwrap();
        assert_eq!(
            mems,
            vec![Mem {
                start: 0,
                end: 3,
                freq: 2,
                f: 1
            }]
        );
        assert_eq!(spans(&brute_force_f_mems(b"BANANA", b"ANAS", 2).unwrap()), vec![(0, 3)]);
        assert!(brute_force_f_mems(b"BANANA", b"ANAS", 4).unwrap().is_empty());
    }

    #[test]
    fn pattern_equal_to_text() {
        let t = b"GATTACA";
        assert_eq!(spans(&brute_force_f_mems(t, t, 1).unwrap()), vec![(0, 7)]);
        let parse = [4u32, 9, 4, 1];
        assert_eq!(
            spans(&brute_force_parse_f_mems(&parse, &parse, 1).unwrap()),
            vec![(0, 4)]
        );
        assert!(brute_force_parse_f_mems(&parse, &[7, 8], 1).unwrap().is_empty());
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(
            t in proptest::collection::vec(0u8..3, 1..25),
            p in proptest::collection::vec(0u8..3, 1..12),
            f in 1usize..4,
        ) {
            prop_assert_eq!(spans(&brute_force_f_mems(&t, &p, f).unwrap()), enumerate_f_mems(&t, &p, f));
        }
    }
}
