use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

use super::{IndexError, OccurrenceIndex};

/// A maximal exact match `pattern[start..end]` occurring `freq >= f` times.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Mem {
    pub start: usize,
    pub end: usize,
    pub freq: usize,
    pub f: usize,
}

impl Mem {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn range(&self) -> Range<usize> {
        self.start..self.end
    }

    pub fn contains(&self, r: &Range<usize>) -> bool {
        self.start <= r.start && r.end <= self.end
    }
}

/// Algorithmic event counters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SearchStats {
    /// Left extensions in the backward structure.
    pub backward_steps: u64,
    /// Right extensions in the forward structure.
    pub forward_steps: u64,
}

impl SearchStats {
    pub fn add(&mut self, other: &SearchStats) {
        self.backward_steps += other.backward_steps;
        self.forward_steps += other.forward_steps;
    }
}

/// Largest `t` lengths seen so far, for the adaptive threshold.
struct TopLengths {
    t: usize,
    heap: BinaryHeap<Reverse<usize>>,
}

impl TopLengths {
    fn push(&mut self, len: usize) {
        self.heap.push(Reverse(len));
        if self.heap.len() > self.t {
            self.heap.pop();
        }
    }

    /// Length of the t-th longest, once t have been seen.
    fn cutoff(&self) -> Option<usize> {
        (self.heap.len() == self.t).then(|| self.heap.peek().unwrap().0)
    }
}

/// Forward-backward scan with a skip threshold.
///
/// Invariant between rounds: every f-MEM not yet reported that is long
/// enough starts at or after `lo` and ends after `done`. Such a MEM must
/// contain position `c = max(done, lo + min_len - 1)`. A backward search from
/// `c` either fails before covering `min_len` symbols, which moves `lo` past
/// the failure point, or finds the leftmost start `s` reaching `c`; a forward
/// search from `s` then gives the MEM's end.
fn scan(
    index: &OccurrenceIndex,
    pattern: &[u32],
    f: usize,
    mut min_len: usize,
    mut top: Option<TopLengths>,
    stats: &mut SearchStats,
) -> Vec<Mem> {
    let m = pattern.len();
    let mut out = Vec::new();
    let mut done = 0;
    let mut lo = 0;
    loop {
        let c = done.max(lo + min_len - 1);
        if c >= m {
            break;
        }
        let mut left = index.empty_left();
        let mut s = c + 1;
        while s > lo {
            let next = index.extend_left(left, pattern[s - 1]);
            stats.backward_steps += 1;
            if next.count() < f {
                break;
            }
            left = next;
            s -= 1;
        }
        if c + 1 - s < min_len {
            // no long MEM can start before s; c moves right next round
            lo = s;
            continue;
        }
        let mut right = index.empty_right();
        let mut e = s;
        while e < m {
            let next = index.extend_right(right, pattern[e]);
            stats.forward_steps += 1;
            if next.count() < f {
                break;
            }
            right = next;
            e += 1;
        }
        debug_assert!(e > c);
        out.push(Mem {
            start: s,
            end: e,
            freq: right.count(),
            f,
        });
        done = e;
        lo = s + 1;
        if let Some(top) = top.as_mut() {
            top.push(e - s);
            if let Some(cut) = top.cutoff() {
                min_len = min_len.max(cut + 1);
            }
        }
    }
    out
}

fn check(f: usize) -> Result<(), IndexError> {
    if f == 0 {
        Err(IndexError::ZeroFrequency)
    } else {
        Ok(())
    }
}

/// All f-MEMs of `pattern` against the indexed text, sorted by start.
pub fn find_f_mems(
    index: &OccurrenceIndex,
    pattern: &[u32],
    f: usize,
    stats: &mut SearchStats,
) -> Result<Vec<Mem>, IndexError> {
    check(f)?;
    Ok(scan(index, pattern, f, 1, None, stats))
}

/// The f-MEMs of length at least `min_len`, found with skipping.
pub fn bml_mems(
    index: &OccurrenceIndex,
    pattern: &[u32],
    min_len: usize,
    f: usize,
    stats: &mut SearchStats,
) -> Result<Vec<Mem>, IndexError> {
    check(f)?;
    if min_len == 0 {
        return Err(IndexError::ZeroLength);
    }
    Ok(scan(index, pattern, f, min_len, None, stats))
}

/// f-MEMs including the `t` longest. The threshold starts at 1 and is reset
/// to one more than the t-th longest length found so far, so MEMs tying the
/// final cutoff may be missing; MEMs shorter than it are dropped.
pub fn bml_top_t(
    index: &OccurrenceIndex,
    pattern: &[u32],
    t: usize,
    f: usize,
    stats: &mut SearchStats,
) -> Result<Vec<Mem>, IndexError> {
    check(f)?;
    if t == 0 {
        return Err(IndexError::ZeroLength);
    }
    let top = TopLengths {
        t,
        heap: BinaryHeap::new(),
    };
    let found = scan(index, pattern, f, 1, Some(top), stats);
    Ok(keep_top_ties(found, t))
}

/// Keep every MEM at least as long as the t-th longest.
pub fn keep_top_ties(mems: Vec<Mem>, t: usize) -> Vec<Mem> {
    if mems.len() <= t {
        return mems;
    }
    let mut lens: Vec<usize> = mems.iter().map(Mem::len).collect();
    lens.sort_unstable_by(|a, b| b.cmp(a));
    let cut = lens[t - 1];
    mems.into_iter().filter(|m| m.len() >= cut).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seqindex::SymbolSequence;
    use proptest::prelude::*;

    fn idx(t: &[u8]) -> OccurrenceIndex {
        OccurrenceIndex::build(&SymbolSequence::from_bytes(t)).unwrap()
    }

    fn sym(s: &[u8]) -> Vec<u32> {
        s.iter().map(|&c| c as u32).collect()
    }

    fn st() -> SearchStats {
        SearchStats::default()
    }

    // Direct use of the definition: for each start take the longest match
    // with >= f occurrences, keep it if it cannot be extended left.
    fn naive(t: &[u32], p: &[u32], f: usize) -> Vec<(usize, usize, usize)> {
        let count = |q: &[u32]| t.windows(q.len()).filter(|w| *w == q).count();
        let reach: Vec<usize> = (0..p.len())
            .map(|i| {
                let mut j = i;
                while j < p.len() && count(&p[i..=j]) >= f {
                    j += 1;
                }
                j
            })
            .collect();
        (0..p.len())
            .filter(|&i| reach[i] > i && (i == 0 || count(&p[i - 1..reach[i]]) < f))
            .map(|i| (i, reach[i], count(&p[i..reach[i]])))
            .collect()
    }

    fn triples(mems: &[Mem]) -> Vec<(usize, usize, usize)> {
        mems.iter().map(|m| (m.start, m.end, m.freq)).collect()
    }

    #[test]
    fn banana_anas() {
        let i = idx(b"BANANA");
        let p = sym(b"ANAS");
        let one = find_f_mems(&i, &p, 1, &mut st()).unwrap();
        assert_eq!(triples(&one), vec![(0, 3, 2)]);
        let two = find_f_mems(&i, &p, 2, &mut st()).unwrap();
        assert_eq!(triples(&two), vec![(0, 3, 2)]);
        assert!(bml_mems(&i, &p, 4, 1, &mut st()).unwrap().is_empty());
        assert_eq!(triples(&bml_mems(&i, &p, 3, 1, &mut st()).unwrap()), vec![(0, 3, 2)]);
        assert!(bml_top_t(&i, &p, 1, 1, &mut st())
            .unwrap()
            .iter()
            .any(|m| (m.start, m.end) == (0, 3)));
    }

    #[test]
    fn disjoint_alphabet_is_empty() {
        let i = idx(b"ACGTACGT");
        assert!(find_f_mems(&i, &sym(b"XYZ"), 1, &mut st()).unwrap().is_empty());
        assert_eq!(
            find_f_mems(&i, &sym(b"ACG"), 0, &mut st()),
            Err(IndexError::ZeroFrequency)
        );
    }

    #[test]
    fn top_t_with_large_t_is_everything() {
        let i = idx(b"ACGTTGCAACGGT");
        let p = sym(b"TTGCAGGACGTAC");
        let all = find_f_mems(&i, &p, 1, &mut st()).unwrap();
        assert_eq!(bml_top_t(&i, &p, all.len() + 3, 1, &mut st()).unwrap(), all);
    }

    #[test]
    fn stats_are_counted() {
        let i = idx(b"BANANA");
        let mut s = st();
        find_f_mems(&i, &sym(b"ANAS"), 1, &mut s).unwrap();
        assert!(s.backward_steps > 0 && s.forward_steps >= 3);
    }

    fn instance() -> impl Strategy<Value = (Vec<u32>, Vec<u32>, usize)> {
        (
            proptest::collection::vec(0u32..4, 1..120),
            proptest::collection::vec(0u32..4, 1..40),
            prop_oneof![Just(1usize), Just(2), Just(3), Just(5)],
        )
    }

    proptest! {
        #[test]
        fn fmems_match_definition((t, p, f) in instance()) {
            let i = OccurrenceIndex::build(&SymbolSequence::new(t.clone(), 4).unwrap()).unwrap();
            let got = find_f_mems(&i, &p, f, &mut st()).unwrap();
            prop_assert_eq!(triples(&got), naive(&t, &p, f));
            // staircase
            for w in got.windows(2) {
                prop_assert!(w[0].start < w[1].start && w[0].end < w[1].end);
            }
        }

        #[test]
        fn bml_is_length_filter((t, p, f) in instance(), l in 1usize..8) {
            let i = OccurrenceIndex::build(&SymbolSequence::new(t, 4).unwrap()).unwrap();
            let all = find_f_mems(&i, &p, f, &mut st()).unwrap();
            let long: Vec<Mem> = all.iter().copied().filter(|m| m.len() >= l).collect();
            prop_assert_eq!(bml_mems(&i, &p, l, f, &mut st()).unwrap(), long);
            prop_assert_eq!(bml_mems(&i, &p, 1, f, &mut st()).unwrap(), all);
        }

        #[test]
        fn top_t_lengths_exact((t, p, f) in instance(), k in 1usize..6) {
            let i = OccurrenceIndex::build(&SymbolSequence::new(t, 4).unwrap()).unwrap();
            let all = find_f_mems(&i, &p, f, &mut st()).unwrap();
            let top = bml_top_t(&i, &p, k, f, &mut st()).unwrap();
            let mut want: Vec<usize> = all.iter().map(Mem::len).collect();
            want.sort_unstable_by(|a, b| b.cmp(a));
            want.truncate(k);
            let mut got: Vec<usize> = top.iter().map(Mem::len).collect();
            got.sort_unstable_by(|a, b| b.cmp(a));
            got.truncate(k);
            prop_assert_eq!(got, want);
            for m in &top {
                prop_assert!(all.contains(m));
            }
        }
    }
}
