use std::ops::Range;

/// Suffix array by prefix doubling. The end of the text sorts before every
/// symbol, so a suffix precedes all its extensions.
pub fn suffix_array(text: &[u32]) -> Vec<u32> {
    let n = text.len();
    assert!(n < u32::MAX as usize, "text too long for 32-bit suffix array");
    if n == 0 {
        return Vec::new();
    }
    let mut sa: Vec<u32> = (0..n as u32).collect();
    // ranks start at 1 so that 0 can mean "past the end"
    let mut rank: Vec<u64> = text.iter().map(|&c| c as u64 + 1).collect();
    let mut tmp = vec![0u64; n];
    let mut h = 1;
    loop {
        let key = |i: u32| {
            let i = i as usize;
            (rank[i], if i + h < n { rank[i + h] } else { 0 })
        };
        sa.sort_unstable_by_key(|&i| key(i));
        tmp[sa[0] as usize] = 1;
        for w in 1..n {
            let bump = (key(sa[w - 1]) != key(sa[w])) as u64;
            tmp[sa[w] as usize] = tmp[sa[w - 1] as usize] + bump;
        }
        std::mem::swap(&mut rank, &mut tmp);
        if rank[sa[n - 1] as usize] == n as u64 || h >= n {
            break;
        }
        h *= 2;
    }
    sa
}

/// Half-open range of suffix-array rows whose suffixes all start with the
/// same `depth` symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SaInterval {
    pub lo: usize,
    pub hi: usize,
    pub depth: usize,
}

impl SaInterval {
    pub fn len(&self) -> usize {
        self.hi - self.lo
    }

    pub fn is_empty(&self) -> bool {
        self.hi == self.lo
    }
}

/// A text with its suffix array; supports right-extension of matches.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixIndex {
    text: Vec<u32>,
    sa: Vec<u32>,
}

impl SuffixIndex {
    pub fn new(text: Vec<u32>) -> Self {
        let sa = suffix_array(&text);
        Self { text, sa }
    }

    pub(crate) fn from_parts(text: Vec<u32>, sa: Vec<u32>) -> Option<Self> {
        if text.len() != sa.len() || sa.iter().any(|&i| i as usize >= text.len()) {
            return None;
        }
        Some(Self { text, sa })
    }

    pub fn text(&self) -> &[u32] {
        &self.text
    }

    pub fn sa(&self) -> &[u32] {
        &self.sa
    }

    pub fn full(&self) -> SaInterval {
        SaInterval {
            lo: 0,
            hi: self.sa.len(),
            depth: 0,
        }
    }

    fn symbol_at(&self, row: usize, depth: usize) -> Option<u32> {
        self.text.get(self.sa[row] as usize + depth).copied()
    }

    /// Narrow `iv` to the rows whose next symbol is `sym`.
    pub fn extend(&self, iv: SaInterval, sym: u32) -> SaInterval {
        let rows = &self.sa[iv.lo..iv.hi];
        let offset = |pred: &dyn Fn(Option<u32>) -> bool| {
            rows.partition_point(|&i| pred(self.text.get(i as usize + iv.depth).copied()))
        };
        let lo = iv.lo + offset(&|c| c < Some(sym));
        let hi = iv.lo + offset(&|c| c <= Some(sym));
        debug_assert!(lo == hi || self.symbol_at(lo, iv.depth) == Some(sym));
        SaInterval {
            lo,
            hi,
            depth: iv.depth + 1,
        }
    }

    /// Rows matching `query` from scratch.
    pub fn interval(&self, query: &[u32]) -> SaInterval {
        let mut iv = self.full();
        for &c in query {
            iv = self.extend(iv, c);
            if iv.is_empty() {
                break;
            }
        }
        iv
    }

    pub fn positions(&self, iv: SaInterval) -> impl Iterator<Item = usize> + '_ {
        self.sa[Range {
            start: iv.lo,
            end: iv.hi,
        }]
        .iter()
        .map(|&i| i as usize)
    }
}
