use std::collections::{BTreeMap, BTreeSet};

use super::{compute_lower_bound, Origin, PhraseInterval, PseudoMem, PseudoMemError};
use crate::filters::{Item, MembershipFilter};
use crate::parsing::ParsedString;
use crate::seqindex::{find_f_mems, Mem, OccurrenceIndex, SearchStats};

/// Inclusive phrase intervals selected by a phrase filter.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoarseSets {
    /// One-phrase-each-way extensions of maximal filter-positive runs.
    pub s3: Vec<(usize, usize)>,
    /// Adjacent pairs `(q, q + 1)` with both phrases filter-negative.
    pub s4: Vec<(usize, usize)>,
}

fn whole(parsed: &ParsedString) -> Vec<PseudoMem> {
    vec![PseudoMem {
        chars: 0..parsed.source_len(),
        phrases: Some(PhraseInterval {
            first: 0,
            last: 0,
            core: None,
        }),
        origin: Origin::Whole,
        lower_bound: 0,
    }]
}

/// Turns parse f-MEMs and S2 pair starts into sorted, deduplicated pseudo-MEMs.
fn assemble(parsed: &ParsedString, parse_mems: &[Mem], s2: &BTreeSet<usize>) -> Vec<PseudoMem> {
    let n = parsed.len();
    let mut intervals: BTreeMap<(usize, usize, Origin), PseudoMem> = BTreeMap::new();
    for m in parse_mems {
        let (i, j) = (m.start, m.end - 1);
        let (first, last) = (i.saturating_sub(1), (j + 1).min(n - 1));
        let mut pm = PseudoMem {
            chars: parsed.char_span(first, last).expect("parse MEM within parse"),
            phrases: Some(PhraseInterval {
                first,
                last,
                core: Some((i, j, m.freq)),
            }),
            origin: Origin::S1,
            lower_bound: 0,
        };
        pm.lower_bound = compute_lower_bound(&pm, parsed);
        intervals
            .entry((first, last, Origin::S1))
            .and_modify(|kept| {
                if pm.lower_bound > kept.lower_bound {
                    *kept = pm.clone();
                }
            })
            .or_insert(pm);
    }
    for &q in s2 {
        intervals.entry((q, q + 1, Origin::S2)).or_insert_with(|| PseudoMem {
            chars: parsed.char_span(q, q + 1).expect("pair within parse"),
            phrases: Some(PhraseInterval {
                first: q,
                last: q + 1,
                core: None,
            }),
            origin: Origin::S2,
            lower_bound: 0,
        });
    }
    intervals.into_values().collect()
}

struct PhraseCounts<'a> {
    symbols: &'a [u32],
    index: &'a OccurrenceIndex,
    cache: BTreeMap<usize, usize>,
}

impl PhraseCounts<'_> {
    fn below(&mut self, q: usize, f: usize, stats: &mut SearchStats) -> bool {
        let (symbols, index) = (self.symbols, self.index);
        let c = *self.cache.entry(q).or_insert_with(|| {
            stats.forward_steps += 1;
            index.count(&symbols[q..=q]).expect("single symbol")
        });
        c < f
    }
}

/// S1 ∪ S2 pseudo-MEMs from the parse index, or the whole pattern when it
/// parses to one phrase.
pub fn parse_pseudo_mems(
    parsed: &ParsedString,
    parse_index: &OccurrenceIndex,
    f: usize,
    stats: &mut SearchStats,
) -> Result<Vec<PseudoMem>, PseudoMemError> {
    if parsed.len() == 1 {
        return Ok(whole(parsed));
    }
    let symbols = parsed.symbols();
    let parse_mems = find_f_mems(parse_index, symbols, f, stats)?;
    let mut counts = PhraseCounts {
        symbols,
        index: parse_index,
        cache: BTreeMap::new(),
    };
    let s2 = (0..symbols.len() - 1)
        .filter(|&q| counts.below(q, f, stats) && counts.below(q + 1, f, stats))
        .collect();
    Ok(assemble(parsed, &parse_mems, &s2))
}

/// Coarse S3/S4 sets from a phrase filter. With no false negatives, every
/// parse f-MEM lies inside a positive run and every S2 pair lies in S4 or
/// inside an S3 interval.
pub fn coarse_sets(
    parsed: &ParsedString,
    phrase_filter: &MembershipFilter,
    f: usize,
    probes: &mut u64,
) -> Result<CoarseSets, PseudoMemError> {
    let n = parsed.len();
    let positive = parsed
        .symbols()
        .iter()
        .map(|&id| {
            *probes += 1;
            phrase_filter.reports_at_least(Item::Phrase(id), f)
        })
        .collect::<Result<Vec<bool>, _>>()?;
    let mut sets = CoarseSets::default();
    let mut q = 0;
    while q < n {
        if !positive[q] {
            q += 1;
            continue;
        }
        let i = q;
        while q < n && positive[q] {
            q += 1;
        }
        sets.s3.push((i.saturating_sub(1), q.min(n - 1)));
    }
    sets.s4 = (0..n.saturating_sub(1))
        .filter(|&q| !positive[q] && !positive[q + 1])
        .map(|q| (q, q + 1))
        .collect();
    Ok(sets)
}

/// Recovers exactly the [`parse_pseudo_mems`] output by searching only the
/// S3 intervals and testing only pairs inside S3 intervals or in S4.
///
/// A false positive can pull an S2 pair into an S3 interval instead of S4,
/// so pairs inside S3 intervals are tested too.
pub fn refine(
    coarse: &CoarseSets,
    parsed: &ParsedString,
    parse_index: &OccurrenceIndex,
    f: usize,
    stats: &mut SearchStats,
) -> Result<Vec<PseudoMem>, PseudoMemError> {
    if parsed.len() == 1 {
        return Ok(whole(parsed));
    }
    let symbols = parsed.symbols();
    let mut parse_mems = BTreeSet::new();
    let mut candidates = BTreeSet::new();
    for &(a, b) in &coarse.s3 {
        // the phrases just outside a positive run are true negatives (or the
        // pattern's end), so f-MEMs of the slice are f-MEMs of the whole parse
        for m in find_f_mems(parse_index, &symbols[a..=b], f, stats)? {
            parse_mems.insert(Mem {
                start: m.start + a,
                end: m.end + a,
                ..m
            });
        }
        candidates.extend(a..b);
    }
    candidates.extend(coarse.s4.iter().map(|&(q, _)| q));
    let mut counts = PhraseCounts {
        symbols,
        index: parse_index,
        cache: BTreeMap::new(),
    };
    let s2 = candidates
        .into_iter()
        .filter(|&q| counts.below(q, f, stats) && counts.below(q + 1, f, stats))
        .collect();
    let parse_mems: Vec<Mem> = parse_mems.into_iter().collect();
    Ok(assemble(parsed, &parse_mems, &s2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::filters::{FilterKind, FilterParams, ItemKind};
    use crate::parsing::{pfp_parse, PhraseDictionary, RollingHasher, Scheme};
    use crate::seqindex::SymbolSequence;
    use crate::verify::Instance;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn parse_index(symbols: &[u32], alphabet: u32) -> OccurrenceIndex {
        OccurrenceIndex::build(&SymbolSequence::new(symbols.to_vec(), alphabet).unwrap()).unwrap()
    }

    /// Four-character phrases overlapping by one.
    fn parsed(symbols: Vec<u32>) -> ParsedString {
        let n = symbols.len();
        let starts = (0..n).map(|q| 3 * q).collect();
        ParsedString::from_parts(3 * n + 1, symbols, starts, 1, Scheme::Pfp).unwrap()
    }

    fn phrase_filter(present: &[u32]) -> MembershipFilter {
        MembershipFilter::build(
            present.iter().map(|&id| (Item::Phrase(id), 1)),
            FilterParams::new(64, 2, 0).unwrap(),
            FilterKind::Exact,
            ItemKind::PhraseId,
        )
        .unwrap()
    }

    #[test]
    fn single_phrase_is_whole() {
        let p = parsed(vec![7]);
        let pms = parse_pseudo_mems(&p, &parse_index(&[0, 1, 2], 8), 1, &mut SearchStats::default()).unwrap();
        assert_eq!(pms.len(), 1);
        assert_eq!(
            (pms[0].origin, pms[0].chars.clone(), pms[0].lower_bound),
            (Origin::Whole, 0..4, 0)
        );
    }

    #[test]
    fn two_unseen_phrases_are_one_pair() {
        let p = parsed(vec![5, 6]);
        let pms = parse_pseudo_mems(&p, &parse_index(&[0, 1, 2], 8), 1, &mut SearchStats::default()).unwrap();
        assert_eq!(pms.len(), 1);
        assert_eq!(
            (pms[0].origin, pms[0].chars.clone(), pms[0].lower_bound),
            (Origin::S2, 0..7, 0)
        );
    }

    #[test]
    fn interior_match_gets_a_bound() {
        // phrases 1..=2 occur in the text parse; both extensions are unclipped
        let p = parsed(vec![5, 1, 2, 6]);
        let pms = parse_pseudo_mems(&p, &parse_index(&[0, 1, 2, 3], 8), 1, &mut SearchStats::default()).unwrap();
        let s1: Vec<_> = pms.iter().filter(|p| p.origin == Origin::S1).collect();
        assert_eq!(s1.len(), 1);
        assert_eq!(s1[0].chars, 0..13);
        assert_eq!(s1[0].lower_bound, 7);
        assert!(s1[0].is_unclipped_s1());
    }

    #[test]
    fn clipped_match_has_no_bound() {
        let p = parsed(vec![1, 2, 6]);
        let pms = parse_pseudo_mems(&p, &parse_index(&[0, 1, 2, 3], 8), 1, &mut SearchStats::default()).unwrap();
        assert!(pms.iter().all(|p| p.lower_bound == 0));
    }

    #[test]
    fn coarse_runs_and_pairs() {
        let p = parsed(vec![1, 2, 3, 4]);
        let all = coarse_sets(&p, &phrase_filter(&[1, 2, 3, 4]), 1, &mut 0).unwrap();
        assert_eq!(
            all,
            CoarseSets {
                s3: vec![(0, 3)],
                s4: vec![]
            }
        );
        let split = coarse_sets(&p, &phrase_filter(&[1, 2, 4]), 1, &mut 0).unwrap();
        assert_eq!(split.s3, vec![(0, 2), (2, 3)]);
        assert!(split.s4.is_empty());
        let mut probes = 0;
        let sparse = coarse_sets(&p, &phrase_filter(&[4]), 1, &mut probes).unwrap();
        assert_eq!(
            sparse,
            CoarseSets {
                s3: vec![(2, 3)],
                s4: vec![(0, 1), (1, 2)]
            }
        );
        assert_eq!(probes, 4);
    }

    #[test]
    fn refine_matches_direct_search() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let inst = Instance::generate(&mut rng, 600, 150);
            let direct = inst.pseudo_mems();
            let present: Vec<u32> = inst.text_parse.symbols().to_vec();
            let coarse = coarse_sets(&inst.pattern_parse, &phrase_filter(&present), inst.f, &mut 0);
            // an exact filter holding each phrase once answers presence only for f = 1
            if inst.f == 1 {
                let refined = refine(
                    &coarse.unwrap(),
                    &inst.pattern_parse,
                    &inst.parse_index,
                    1,
                    &mut SearchStats::default(),
                )
                .unwrap();
                assert_eq!(refined, direct);
            }
        }
    }

    #[test]
    fn staircase_and_coverage() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..150 {
            let inst = Instance::generate(&mut rng, 800, 200);
            let pms = inst.pseudo_mems();
            let mut s1: Vec<PhraseInterval> = pms
                .iter()
                .filter(|p| p.origin == Origin::S1)
                .map(|p| p.phrases.unwrap())
                .collect();
            s1.sort();
            assert!(s1
                .windows(2)
                .all(|w| w[0].first <= w[1].first && w[0].last <= w[1].last));
            let unclipped: Vec<_> = pms
                .iter()
                .filter(|p| p.is_unclipped_s1())
                .map(|p| p.phrases.unwrap())
                .collect();
            assert!(unclipped
                .windows(2)
                .all(|w| w[0].first < w[1].first && w[0].last < w[1].last));

            let n = inst.pattern_parse.len();
            if n < 2 {
                continue;
            }
            let present: Vec<u32> = inst.text_parse.symbols().to_vec();
            let coarse = coarse_sets(&inst.pattern_parse, &phrase_filter(&present), 1, &mut 0).unwrap();
            let covered = |q: usize| coarse.s3.iter().chain(&coarse.s4).any(|&(a, b)| a <= q && q <= b);
            assert!((0..n).all(covered));
        }
    }

    /// The first phrase of a pattern does not start at a trigger, so the text
    /// can hold its contents only inside a longer phrase.
    #[test]
    fn boundary_phrase_can_miss_the_text_parse() {
        let hasher = RollingHasher::with_defaults(3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let found = (0..200).any(|_| {
            let text: Vec<u8> = (0..120).map(|_| b"ACGT"[rng.gen_range(0..4)]).collect();
            let pattern = &text[1..60];
            let mut dict = PhraseDictionary::new();
            let tp = pfp_parse(&text, &hasher, &mut dict).unwrap();
            let pp = pfp_parse(pattern, &hasher, &mut dict.overlay()).unwrap();
            let index = parse_index(tp.symbols(), dict.len() as u32);
            pp.len() >= 2 && index.count(&pp.symbols()[..1]).unwrap() == 0
        });
        assert!(found);
    }
}
