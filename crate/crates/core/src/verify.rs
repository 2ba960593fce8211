//! Seeded property suites run by `parsemem verify`. Every suite compares the
//! fast paths against the brute-force oracle on random instances with planted
//! shared substrings.

use std::collections::BTreeSet;

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::bundle::{BundleError, IndexBundle};
use crate::filters::{size_for, FilterKind, Item, ItemKind, MembershipFilter};
use crate::oracle::{brute_force_f_mems, enumerate_f_mems};
use crate::parsing::{
    minimizer_parse, pfp_parse, KmerOrder, MinimizerParams, ParsedString, PhraseDictionary, RollingHasher,
};
use crate::pseudomem::{coarse_sets, kebab_pseudo_mems, parse_pseudo_mems, refine, safe_discard, PseudoMem};
use crate::seqindex::{find_f_mems, Mem, OccurrenceIndex, SearchStats, SymbolSequence};

const DNA: &[u8] = b"ACGT";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub instances: usize,
    pub max_text_len: usize,
    pub max_pattern_len: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            instances: 1000,
            max_text_len: 2000,
            max_pattern_len: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PropertyOutcome {
    pub name: &'static str,
    pub checked: usize,
    pub passed: usize,
    pub first_failure: Option<String>,
}

impl PropertyOutcome {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            checked: 0,
            passed: 0,
            first_failure: None,
        }
    }

    fn record(&mut self, instance: usize, r: Result<(), String>) {
        self.checked += 1;
        match r {
            Ok(()) => self.passed += 1,
            Err(e) => {
                self.first_failure
                    .get_or_insert_with(|| format!("instance {instance}: {e}"));
            }
        }
    }

    pub fn ok(&self) -> bool {
        self.passed == self.checked
    }
}

fn random_dna(rng: &mut impl Rng, len: usize) -> Vec<u8> {
    (0..len).map(|_| DNA[rng.gen_range(0..4)]).collect()
}

fn mutate(rng: &mut impl Rng, s: &mut [u8], rate: f64) {
    for c in s.iter_mut() {
        if rng.gen_bool(rate) {
            *c = DNA[rng.gen_range(0..4)];
        }
    }
}

/// Random DNA text (uniform, or mutated copies of a base string) and a
/// pattern built around substrings planted from it.
pub fn random_pair(rng: &mut impl Rng, max_text: usize, max_pattern: usize) -> (Vec<u8>, Vec<u8>) {
    let n = rng.gen_range(max_text.min(200)..=max_text);
    let text = if rng.gen_bool(0.5) {
        random_dna(rng, n)
    } else {
        let base_len = rng.gen_range(50..=400).min(n);
        let base = random_dna(rng, base_len);
        let mut t = Vec::with_capacity(n + base.len());
        while t.len() < n {
            let mut copy = base.clone();
            let rate = rng.gen_range(0.0..0.03);
            mutate(rng, &mut copy, rate);
            t.extend_from_slice(&copy);
        }
        t.truncate(n);
        t
    };
    let m = rng.gen_range(max_pattern.min(20)..=max_pattern);
    let mut pattern = Vec::with_capacity(m);
    while pattern.len() < m {
        if rng.gen_bool(0.7) {
            let len = rng.gen_range(50..=150).min(n).min(m - pattern.len()).max(1);
            let at = rng.gen_range(0..=n - len);
            let mut piece = text[at..at + len].to_vec();
            let rate = rng.gen_range(0.0..0.02);
            mutate(rng, &mut piece, rate);
            pattern.extend_from_slice(&piece);
        } else {
            let len = rng.gen_range(1..=20).min(m - pattern.len());
            pattern.extend(random_dna(rng, len));
        }
    }
    (text, pattern)
}

/// One random instance with everything the parse-level suites need.
pub struct Instance {
    pub text: Vec<u8>,
    pub pattern: Vec<u8>,
    pub f: usize,
    pub text_parse: ParsedString,
    pub pattern_parse: ParsedString,
    pub text_index: OccurrenceIndex,
    pub parse_index: OccurrenceIndex,
    pub oracle: Vec<Mem>,
}

impl Instance {
    pub fn generate(rng: &mut impl Rng, max_text: usize, max_pattern: usize) -> Self {
        let (text, pattern) = random_pair(rng, max_text, max_pattern);
        let f = [1, 2, 3, 5][rng.gen_range(0..4)];
        let hasher = RollingHasher::with_defaults(rng.gen_range(3..=5), rng.gen_range(6..=12)).expect("valid");
        Self::from_parts(text, pattern, f, &hasher)
    }

    pub fn from_parts(text: Vec<u8>, pattern: Vec<u8>, f: usize, hasher: &RollingHasher) -> Self {
        let mut dict = PhraseDictionary::new();
        let text_parse = pfp_parse(&text, hasher, &mut dict).expect("nonempty text");
        let pattern_parse = pfp_parse(&pattern, hasher, &mut dict.overlay()).expect("nonempty pattern");
        let text_index = OccurrenceIndex::build(&SymbolSequence::from_bytes(&text)).expect("nonempty");
        let parse_seq = SymbolSequence::new(text_parse.symbols().to_vec(), dict.len() as u32).expect("dense IDs");
        let parse_index = OccurrenceIndex::build(&parse_seq).expect("nonempty");
        let oracle = brute_force_f_mems(&text, &pattern, f).expect("f >= 1");
        Self {
            text,
            pattern,
            f,
            text_parse,
            pattern_parse,
            text_index,
            parse_index,
            oracle,
        }
    }

    pub fn pattern_symbols(&self) -> Vec<u32> {
        self.pattern.iter().map(|&c| c as u32).collect()
    }

    pub fn pseudo_mems(&self) -> Vec<PseudoMem> {
        parse_pseudo_mems(
            &self.pattern_parse,
            &self.parse_index,
            self.f,
            &mut SearchStats::default(),
        )
        .expect("valid instance")
    }

    fn char_count(&self, r: std::ops::Range<usize>) -> usize {
        self.text_index.count(&self.pattern_symbols()[r]).expect("nonempty")
    }
}

fn check_oracle(inst: &Instance) -> Result<(), String> {
    let got = find_f_mems(
        &inst.text_index,
        &inst.pattern_symbols(),
        inst.f,
        &mut SearchStats::default(),
    )
    .map_err(|e| e.to_string())?;
    if got != inst.oracle {
        return Err(format!(
            "index search found {} f-MEMs, oracle {}",
            got.len(),
            inst.oracle.len()
        ));
    }
    Ok(())
}

fn check_oracle_paths(rng: &mut impl Rng) -> Result<(), String> {
    let (n, m) = (rng.gen_range(1..=40), rng.gen_range(1..=15));
    let text = random_dna(rng, n);
    let pattern = random_dna(rng, m);
    let f = rng.gen_range(1..=3);
    let a: Vec<(usize, usize)> = brute_force_f_mems(&text, &pattern, f)
        .unwrap()
        .iter()
        .map(|m| (m.start, m.end))
        .collect();
    let b = enumerate_f_mems(&text, &pattern, f);
    if a != b {
        return Err(format!("LCE oracle {a:?} vs enumeration {b:?}"));
    }
    Ok(())
}

/// Parse count of a phrase interval against the character count of its span.
/// Both directions on intervals of internal phrases, the forward direction
/// on every interval.
fn check_parse_consistency(inst: &Instance) -> Result<(), String> {
    let pp = &inst.pattern_parse;
    let n = pp.len();
    for i in 0..n {
        for j in i..n {
            let span = pp.char_span(i, j).expect("in range");
            let parse_ok = inst.parse_index.count(&pp.symbols()[i..=j]).expect("nonempty") >= inst.f;
            let chars_ok = inst.char_count(span.clone()) >= inst.f;
            let internal = i >= 1 && j + 2 <= n;
            if parse_ok && !chars_ok {
                return Err(format!(
                    "phrases {i}..={j} occur in the parse but {span:?} is rare in the text"
                ));
            }
            if internal && chars_ok && !parse_ok {
                return Err(format!(
                    "{span:?} occurs in the text but phrases {i}..={j} are rare in the parse"
                ));
            }
        }
    }
    Ok(())
}

fn check_containment(inst: &Instance, pms: &[PseudoMem]) -> Result<(), String> {
    for m in &inst.oracle {
        if !pms.iter().any(|p| p.contains(&m.range())) {
            return Err(format!("f-MEM {:?} lies in no pseudo-MEM", m.range()));
        }
    }
    Ok(())
}

fn check_lower_bounds(inst: &Instance, pms: &[PseudoMem]) -> Result<(), String> {
    for p in pms.iter().filter(|p| p.lower_bound > 0) {
        if !inst
            .oracle
            .iter()
            .any(|m| p.contains(&m.range()) && m.len() >= p.lower_bound)
        {
            return Err(format!(
                "pseudo-MEM {:?} with bound {} holds no such f-MEM",
                p.chars, p.lower_bound
            ));
        }
    }
    Ok(())
}

fn check_parsimony(inst: &Instance, pms: &[PseudoMem]) -> Result<(), String> {
    let pp = &inst.pattern_parse;
    for p in pms.iter().filter(|p| p.is_unclipped_s1()) {
        let iv = p.phrases.expect("phrase derived");
        if iv.last - iv.first + 1 < 4 {
            continue;
        }
        for (a, b) in [(iv.first + 2, iv.last - 1), (iv.first + 1, iv.last - 2)] {
            let r = pp.char_span(a, b).expect("in range");
            if !inst.oracle.iter().any(|m| m.contains(&r) && m.len() > r.len()) {
                return Err(format!(
                    "trimmed {r:?} of {:?} is not a proper substring of an f-MEM",
                    p.chars
                ));
            }
        }
    }
    Ok(())
}

fn check_safe_discard(inst: &Instance, pms: &[PseudoMem]) -> Result<(), String> {
    for t in [1, 3, 10] {
        let kept = safe_discard(pms, t);
        let mut lens: Vec<usize> = inst.oracle.iter().map(Mem::len).collect();
        lens.sort_unstable_by(|a, b| b.cmp(a));
        let Some(&cut) = lens.get(t - 1).or(lens.last()) else {
            continue;
        };
        for m in inst.oracle.iter().filter(|m| m.len() >= cut) {
            if !kept.iter().any(|p| p.contains(&m.range())) {
                return Err(format!("t={t}: f-MEM {:?} discarded", m.range()));
            }
        }
    }
    Ok(())
}

fn check_refine(inst: &Instance, pms: &[PseudoMem], kind: FilterKind, seed: u64) -> Result<(), String> {
    let n_ids = inst.parse_index.alphabet_size() as usize;
    let mut counts = vec![0u32; n_ids];
    for &id in inst.text_parse.symbols() {
        counts[id as usize] += 1;
    }
    let params = size_for(n_ids.max(1) as u64, 0.01).expect("valid").with_seed(seed);
    let filter = MembershipFilter::build(
        counts.iter().enumerate().map(|(id, &c)| (Item::Phrase(id as u32), c)),
        params,
        kind,
        ItemKind::PhraseId,
    )
    .map_err(|e| e.to_string())?;
    let coarse = coarse_sets(&inst.pattern_parse, &filter, inst.f, &mut 0).map_err(|e| e.to_string())?;
    let refined = refine(
        &coarse,
        &inst.pattern_parse,
        &inst.parse_index,
        inst.f,
        &mut SearchStats::default(),
    )
    .map_err(|e| e.to_string())?;
    if refined != pms {
        return Err(format!(
            "{kind:?} filter: refine gave {} pseudo-MEMs, direct {}",
            refined.len(),
            pms.len()
        ));
    }
    Ok(())
}

fn check_kebab(inst: &Instance, k: usize, kind: FilterKind, seed: u64) -> Result<(), String> {
    if inst.pattern.len() < k {
        return Ok(());
    }
    let mut kmers = std::collections::BTreeMap::new();
    for km in inst.text.windows(k) {
        *kmers.entry(km).or_insert(0u32) += 1;
    }
    let params = size_for(kmers.len().max(1) as u64, 0.01)
        .expect("valid")
        .with_seed(seed);
    let filter = MembershipFilter::build(
        kmers.iter().map(|(&km, &c)| (Item::Kmer(km), c)),
        params,
        kind,
        ItemKind::Kmer(k),
    )
    .map_err(|e| e.to_string())?;
    let pms = kebab_pseudo_mems(&inst.pattern, &filter, inst.f, &mut 0).map_err(|e| e.to_string())?;
    for m in inst.oracle.iter().filter(|m| m.len() >= k) {
        if !pms.iter().any(|p| p.contains(&m.range())) {
            return Err(format!("k={k} {kind:?}: MEM {:?} missed", m.range()));
        }
    }
    Ok(())
}

/// Drops isolated k-mers from an exact filter and checks that the
/// neighbouring pseudo-MEMs overlap by k - 2.
fn check_kebab_overlap(rng: &mut impl Rng, k: usize) -> Result<(), String> {
    let m = rng.gen_range(3 * k..=8 * k);
    let pattern = random_dna(rng, m);
    let n_kmers = pattern.len() - k + 1;
    let absent: BTreeSet<usize> = (1..n_kmers - 1).filter(|x| x % 3 == 1 && rng.gen_bool(0.3)).collect();
    let present: Vec<&[u8]> = (0..n_kmers)
        .filter(|x| !absent.contains(x))
        .map(|x| &pattern[x..x + k])
        .filter(|km| !absent.iter().any(|&a| &pattern[a..a + k] == *km))
        .collect();
    let filter = MembershipFilter::build(
        present.iter().map(|&km| (Item::Kmer(km), 1)),
        size_for(n_kmers as u64, 0.01).expect("valid"),
        FilterKind::Exact,
        ItemKind::Kmer(k),
    )
    .map_err(|e| e.to_string())?;
    let pms = kebab_pseudo_mems(&pattern, &filter, 1, &mut 0).map_err(|e| e.to_string())?;
    for w in pms.windows(2) {
        let gap = w[1].chars.start - (w[0].chars.end - k + 1);
        if gap == 1 && w[0].chars.end - w[1].chars.start != k - 2 {
            return Err(format!(
                "neighbours {:?} and {:?} overlap wrongly",
                w[0].chars, w[1].chars
            ));
        }
    }
    Ok(())
}

fn check_minimizer(rng: &mut impl Rng) -> Result<(), String> {
    let k = rng.gen_range(2..=6);
    let w = rng.gen_range(k + 1..=k + 12);
    let order = if rng.gen_bool(0.5) {
        KmerOrder::Lexicographic
    } else {
        KmerOrder::Hashed { seed: rng.gen() }
    };
    let params = MinimizerParams::new(k, w, order).map_err(|e| e.to_string())?;
    let n = rng.gen_range(w..=300);
    let s = random_dna(rng, n);
    let parsed = minimizer_parse(&s, &params, &mut PhraseDictionary::new()).map_err(|e| e.to_string())?;
    for q in 1..parsed.len() {
        if parsed.phrase_range(q).len() > params.max_phrase_len() {
            return Err(format!("phrase {q} longer than {}", params.max_phrase_len()));
        }
    }
    // shared substring in two different contexts
    let ell = rng.gen_range(2 * w - 1..=2 * w + 60);
    let shared = random_dna(rng, ell);
    let (la, lb) = (rng.gen_range(w..=3 * w), rng.gen_range(w..=3 * w));
    let embed = |rng: &mut ChaCha8Rng, left: usize| {
        let mut v = random_dna(rng, left);
        v.extend_from_slice(&shared);
        let right = w + rng.gen_range(0..w);
        v.extend(random_dna(rng, right));
        v
    };
    let mut local = ChaCha8Rng::seed_from_u64(rng.gen());
    let (a, b) = (embed(&mut local, la), embed(&mut local, lb));
    let cuts = |text: &[u8], off: usize| -> Result<Vec<usize>, String> {
        let p = minimizer_parse(text, &params, &mut PhraseDictionary::new()).map_err(|e| e.to_string())?;
        Ok(p.phrase_starts()
            .iter()
            .filter(|&&c| c > off + w - 1 && c < off + ell - w + 1)
            .map(|&c| c - off)
            .collect())
    };
    let (ca, cb) = (cuts(&a, la)?, cuts(&b, lb)?);
    if ca != cb {
        return Err(format!("central cuts differ: {ca:?} vs {cb:?}"));
    }
    Ok(())
}

/// Runs every suite. Instances are drawn from a ChaCha8 stream seeded by
/// `cfg.seed`, so a fixed seed reproduces the summary exactly.
pub fn run_suites(cfg: &VerifyConfig) -> Vec<PropertyOutcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let names = [
        "oracle_equivalence",
        "oracle_second_path",
        "parse_consistency",
        "containment",
        "lower_bound",
        "parsimony",
        "safe_discard",
        "refine_exact",
        "refine_bloom",
        "kebab_containment",
        "kebab_overlap",
        "minimizer_parse",
    ];
    let mut out: Vec<PropertyOutcome> = names.iter().map(|n| PropertyOutcome::new(n)).collect();
    for i in 0..cfg.instances {
        let inst = Instance::generate(&mut rng, cfg.max_text_len, cfg.max_pattern_len);
        let pms = inst.pseudo_mems();
        let seed = rng.gen();
        out[0].record(i, check_oracle(&inst));
        out[1].record(i, check_oracle_paths(&mut rng));
        if inst.pattern_parse.len() <= 30 {
            out[2].record(i, check_parse_consistency(&inst));
        }
        out[3].record(i, check_containment(&inst, &pms));
        out[4].record(i, check_lower_bounds(&inst, &pms));
        out[5].record(i, check_parsimony(&inst, &pms));
        out[6].record(i, check_safe_discard(&inst, &pms));
        out[7].record(i, check_refine(&inst, &pms, FilterKind::Exact, seed));
        out[8].record(i, check_refine(&inst, &pms, FilterKind::Bloom, seed));
        let k = [8, 20][i % 2];
        let kind = if i % 4 < 2 {
            FilterKind::Exact
        } else {
            FilterKind::Bloom
        };
        out[9].record(i, check_kebab(&inst, k, kind, seed));
        out[10].record(i, check_kebab_overlap(&mut rng, k));
        out[11].record(i, check_minimizer(&mut rng));
    }
    out
}

/// Loads an index and checks every stored structure against a rebuild.
pub fn check_index_file(bytes: &[u8]) -> Result<(), BundleError> {
    IndexBundle::from_bytes(bytes)?.check_integrity()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_run_passes_and_is_deterministic() {
        let cfg = VerifyConfig {
            seed: 7,
            instances: 30,
            max_text_len: 400,
            max_pattern_len: 120,
        };
        let a = run_suites(&cfg);
        for o in &a {
            assert!(o.ok(), "{}: {:?}", o.name, o.first_failure);
        }
        assert_eq!(a, run_suites(&cfg));
    }
}
