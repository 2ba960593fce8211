use std::collections::BTreeSet;

use super::{PseudoMem, PseudoMemError};
use crate::seqindex::{bml_mems, Mem, OccurrenceIndex, SearchStats};

/// Which MEMs the final search reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selection {
    /// The `t` longest, plus anything tying the t-th.
    Top(usize),
    /// Everything of at least this length.
    MinLen(usize),
}

/// Is `pattern[s..e]` still maximal when the pattern is not cut at a
/// pseudo-MEM boundary?
fn maximal_in_pattern(
    index: &OccurrenceIndex,
    pattern: &[u32],
    s: usize,
    e: usize,
    f: usize,
    stats: &mut SearchStats,
) -> bool {
    let mut extends = |q: &[u32]| {
        stats.forward_steps += q.len() as u64;
        index.count(q).expect("nonempty") >= f
    };
    !(s > 0 && extends(&pattern[s - 1..e])) && !(e < pattern.len() && extends(&pattern[s..e + 1]))
}

/// Character-level f-MEM search inside pseudo-MEMs.
///
/// MEMs of a pseudo-MEM's substring that touch its boundary are kept only if
/// they are maximal in the full pattern; the true MEM is found in another
/// pseudo-MEM. In `Top` mode pseudo-MEMs are visited longest first and the
/// length floor rises to the current t-th longest, so pseudo-MEMs shorter
/// than that are never searched.
pub fn find_long_mems(
    text_index: &OccurrenceIndex,
    pms: &[PseudoMem],
    pattern: &[u32],
    f: usize,
    selection: Selection,
    stats: &mut SearchStats,
) -> Result<Vec<Mem>, PseudoMemError> {
    let mut order: Vec<&PseudoMem> = pms.iter().collect();
    if let Selection::Top(_) = selection {
        order.sort_by_key(|p| std::cmp::Reverse(p.len()));
    }
    let mut found: BTreeSet<Mem> = BTreeSet::new();
    let mut lengths: Vec<usize> = Vec::new();
    let floor = |lengths: &mut Vec<usize>| -> usize {
        match selection {
            Selection::MinLen(l) => l.max(1),
            Selection::Top(t) if t > 0 && lengths.len() >= t => {
                lengths.sort_unstable_by(|a, b| b.cmp(a));
                lengths[t - 1]
            }
            Selection::Top(_) => 1,
        }
    };
    for pm in order {
        let min_len = floor(&mut lengths);
        if pm.len() < min_len {
            if let Selection::Top(_) = selection {
                break;
            }
            continue;
        }
        let slice = &pattern[pm.chars.clone()];
        for m in bml_mems(text_index, slice, min_len, f, stats)? {
            let (s, e) = (m.start + pm.chars.start, m.end + pm.chars.start);
            let at_edge = m.start == 0 || m.end == slice.len();
            if at_edge && !maximal_in_pattern(text_index, pattern, s, e, f, stats) {
                continue;
            }
            if found.insert(Mem { start: s, end: e, ..m }) {
                lengths.push(e - s);
            }
        }
    }
    let mems: Vec<Mem> = found.into_iter().collect();
    Ok(match selection {
        Selection::Top(t) => crate::seqindex::keep_top_ties(mems, t),
        Selection::MinLen(l) => mems.into_iter().filter(|m| m.len() >= l).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pseudomem::Origin;
    use crate::seqindex::{find_f_mems, keep_top_ties, SymbolSequence};
    use crate::verify::Instance;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn whole(len: usize) -> PseudoMem {
        PseudoMem {
            chars: 0..len,
            phrases: None,
            origin: Origin::Kebab,
            lower_bound: 0,
        }
    }

    #[test]
    fn whole_pattern_pseudo_mem_is_plain_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let inst = Instance::generate(&mut rng, 500, 120);
            let p = inst.pattern_symbols();
            let all = find_f_mems(&inst.text_index, &p, inst.f, &mut SearchStats::default()).unwrap();
            let pms = [whole(p.len())];
            let got = find_long_mems(
                &inst.text_index,
                &pms,
                &p,
                inst.f,
                Selection::MinLen(1),
                &mut SearchStats::default(),
            )
            .unwrap();
            assert_eq!(got, all);
            let top = find_long_mems(
                &inst.text_index,
                &pms,
                &p,
                inst.f,
                Selection::Top(3),
                &mut SearchStats::default(),
            )
            .unwrap();
            assert_eq!(top, keep_top_ties(all, 3));
        }
    }

    #[test]
    fn top_ten_after_safe_discard_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(19);
        for _ in 0..60 {
            let inst = Instance::generate(&mut rng, 1500, 200);
            let kept = crate::pseudomem::safe_discard(&inst.pseudo_mems(), 10);
            let p = inst.pattern_symbols();
            let got = find_long_mems(
                &inst.text_index,
                &kept,
                &p,
                inst.f,
                Selection::Top(10),
                &mut SearchStats::default(),
            )
            .unwrap();
            let mut lens: Vec<usize> = got.iter().map(Mem::len).collect();
            lens.sort_unstable_by(|a, b| b.cmp(a));
            lens.truncate(10);
            assert_eq!(lens, crate::oracle::top_lengths(&inst.oracle, 10));
        }
    }

    #[test]
    fn edge_mems_of_a_slice_need_pattern_maximality() {
        let text: Vec<u32> = b"ACGTACGT".iter().map(|&c| c as u32).collect();
        let index = OccurrenceIndex::build(&SymbolSequence::new(text, 256).unwrap()).unwrap();
        let p: Vec<u32> = b"TTACGTT".iter().map(|&c| c as u32).collect();
        // "ACG" alone is cut off from the "ACGT" MEM
        let pms = [PseudoMem {
            chars: 2..5,
            phrases: None,
            origin: Origin::Kebab,
            lower_bound: 0,
        }];
        let got = find_long_mems(&index, &pms, &p, 1, Selection::MinLen(1), &mut SearchStats::default()).unwrap();
        assert!(got.is_empty());
        let pms = [whole(p.len())];
        let got = find_long_mems(&index, &pms, &p, 1, Selection::MinLen(4), &mut SearchStats::default()).unwrap();
        assert_eq!(got.iter().map(|m| (m.start, m.end)).collect::<Vec<_>>(), vec![(1, 6)]);
    }
}
