//! On-disk index: text, phrase dictionary, text parse, occurrence indexes over
//! the text and its parse, and the k-mer and phrase filters.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic "PMEMIDX\0" | format_version u32 | section count u32
//! per section: tag u32 | payload length u64 | checksum [u8; 8] | payload
//! ```
//!
//! The checksum is the first eight bytes of the payload's SHA-256. The first
//! section is always the parameter block, so a query can reject mismatching
//! parse parameters before touching anything else.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::fasta::RECORD_SEPARATOR;
use crate::filters::{size_for, FilterError, FilterKind, FilterParams, Item, ItemKind, MembershipFilter, Storage};
use crate::hashing::mix64;
use crate::parsing::{
    pfp_parse, KmerOrder, MinimizerParams, ParseError, ParsedString, PhraseDictionary, RollingHasher, Scheme,
};
use crate::seqindex::{IndexError, OccurrenceIndex, SymbolSequence};

pub const MAGIC: &[u8; 8] = b"PMEMIDX\0";
pub const FORMAT_VERSION: u32 = 1;

pub const DEFAULT_WINDOW: usize = 10;
pub const DEFAULT_TRIGGER_MODULUS: u64 = 50;
pub const DEFAULT_KMER_LEN: usize = 20;
pub const DEFAULT_MINIMIZER_K: usize = 4;
pub const DEFAULT_MINIMIZER_W: usize = 12;
pub const DEFAULT_FILTER_FPR: f64 = 0.01;

#[derive(Debug, Error)]
pub enum BundleError {
    #[error("not an index file")]
    BadMagic,
    #[error("index format version {found}, this build reads version {expected}")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("checksum mismatch in {0} section")]
    Checksum(Section),
    #[error("index file truncated")]
    Truncated,
    #[error("malformed index: {0}")]
    Malformed(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Filter(#[from] FilterError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Section {
    Params = 1,
    Text = 2,
    Dictionary = 3,
    TextParse = 4,
    TextIndex = 5,
    ParseIndex = 6,
    KmerFilter = 7,
    PhraseFilter = 8,
}

const SECTIONS: [Section; 8] = [
    Section::Params,
    Section::Text,
    Section::Dictionary,
    Section::TextParse,
    Section::TextIndex,
    Section::ParseIndex,
    Section::KmerFilter,
    Section::PhraseFilter,
];

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Section::Params => "parameter",
            Section::Text => "text",
            Section::Dictionary => "dictionary",
            Section::TextParse => "text parse",
            Section::TextIndex => "text index",
            Section::ParseIndex => "parse index",
            Section::KmerFilter => "k-mer filter",
            Section::PhraseFilter => "phrase filter",
        };
        f.write_str(name)
    }
}

/// Everything a query must agree with the build on.
#[derive(Debug, Clone, PartialEq)]
pub struct BuildParams {
    pub window: usize,
    pub trigger_modulus: u64,
    pub hash_base: u64,
    pub hash_prime: u64,
    pub kmer_len: usize,
    pub minimizer: MinimizerParams,
    /// `Counting` or `Exact`; both filters use the same kind.
    pub filter_kind: FilterKind,
    pub filter_fpr: f64,
    pub seed: u64,
    pub dna: bool,
}

impl Default for BuildParams {
    fn default() -> Self {
        let hasher = RollingHasher::with_defaults(DEFAULT_WINDOW, DEFAULT_TRIGGER_MODULUS).expect("valid defaults");
        Self {
            window: DEFAULT_WINDOW,
            trigger_modulus: DEFAULT_TRIGGER_MODULUS,
            hash_base: hasher.base(),
            hash_prime: hasher.modulus(),
            kmer_len: DEFAULT_KMER_LEN,
            minimizer: MinimizerParams::new(DEFAULT_MINIMIZER_K, DEFAULT_MINIMIZER_W, KmerOrder::Lexicographic)
                .expect("valid defaults"),
            filter_kind: FilterKind::Counting,
            filter_fpr: DEFAULT_FILTER_FPR,
            seed: 0,
            dna: false,
        }
    }
}

impl BuildParams {
    pub fn hasher(&self) -> Result<RollingHasher, ParseError> {
        RollingHasher::new(self.hash_base, self.hash_prime, self.window, self.trigger_modulus)
    }

    pub fn kmer_seed(&self) -> u64 {
        mix64(self.seed ^ 0x6b6d_6572)
    }

    pub fn phrase_seed(&self) -> u64 {
        mix64(self.seed ^ 0x7068_7261)
    }

    fn validate(&self) -> Result<(), BundleError> {
        self.hasher()?;
        if self.kmer_len == 0 {
            return Err(BundleError::Malformed("k-mer length must be at least 1".into()));
        }
        if self.filter_kind == FilterKind::Bloom {
            return Err(BundleError::Malformed("index filters must keep counts".into()));
        }
        if !(self.filter_fpr > 0.0 && self.filter_fpr < 1.0) {
            return Err(BundleError::Malformed(format!(
                "filter rate {} outside (0, 1)",
                self.filter_fpr
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IndexBundle {
    params: BuildParams,
    text: Vec<u8>,
    dictionary: PhraseDictionary,
    text_parse: ParsedString,
    text_index: OccurrenceIndex,
    parse_index: OccurrenceIndex,
    kmer_filter: MembershipFilter,
    phrase_filter: MembershipFilter,
}

fn filter_params(distinct: usize, fpr: f64, seed: u64) -> Result<FilterParams, FilterError> {
    Ok(size_for(distinct.max(1) as u64, fpr)?.with_seed(seed))
}

impl IndexBundle {
    pub fn build(text: Vec<u8>, params: BuildParams) -> Result<Self, BundleError> {
        params.validate()?;
        let hasher = params.hasher()?;
        let mut dictionary = PhraseDictionary::new();
        let text_parse = pfp_parse(&text, &hasher, &mut dictionary)?;
        let text_index = OccurrenceIndex::build(&SymbolSequence::from_bytes(&text))?;
        let parse_seq = SymbolSequence::new(text_parse.symbols().to_vec(), dictionary.len() as u32)?;
        let parse_index = OccurrenceIndex::build(&parse_seq)?;

        let k = params.kmer_len;
        let mut kmers: BTreeMap<&[u8], u32> = BTreeMap::new();
        if text.len() >= k {
            for km in text.windows(k).filter(|km| !km.contains(&RECORD_SEPARATOR)) {
                *kmers.entry(km).or_insert(0) += 1;
            }
        }
        let kmer_filter = MembershipFilter::build(
            kmers.iter().map(|(&km, &c)| (Item::Kmer(km), c)),
            filter_params(kmers.len(), params.filter_fpr, params.kmer_seed())?,
            params.filter_kind,
            ItemKind::Kmer(k),
        )?;

        let mut phrase_counts: HashMap<u32, u32> = HashMap::new();
        for &id in text_parse.symbols() {
            *phrase_counts.entry(id).or_insert(0) += 1;
        }
        let phrase_filter = MembershipFilter::build(
            (0..dictionary.len() as u32).map(|id| (Item::Phrase(id), phrase_counts[&id])),
            filter_params(dictionary.len(), params.filter_fpr, params.phrase_seed())?,
            params.filter_kind,
            ItemKind::PhraseId,
        )?;

        Ok(Self {
            params,
            text,
            dictionary,
            text_parse,
            text_index,
            parse_index,
            kmer_filter,
            phrase_filter,
        })
    }

    pub fn params(&self) -> &BuildParams {
        &self.params
    }

    pub fn text(&self) -> &[u8] {
        &self.text
    }

    pub fn dictionary(&self) -> &PhraseDictionary {
        &self.dictionary
    }

    pub fn text_parse(&self) -> &ParsedString {
        &self.text_parse
    }

    pub fn text_index(&self) -> &OccurrenceIndex {
        &self.text_index
    }

    pub fn parse_index(&self) -> &OccurrenceIndex {
        &self.parse_index
    }

    pub fn kmer_filter(&self) -> &MembershipFilter {
        &self.kmer_filter
    }

    pub fn phrase_filter(&self) -> &MembershipFilter {
        &self.phrase_filter
    }

    /// Rebuilds everything from the stored text and parameters and compares.
    pub fn check_integrity(&self) -> Result<(), BundleError> {
        let fresh = Self::build(self.text.clone(), self.params.clone())?;
        for (name, ok) in [
            ("dictionary", fresh.dictionary == self.dictionary),
            ("text parse", fresh.text_parse == self.text_parse),
            ("text index", fresh.text_index == self.text_index),
            ("parse index", fresh.parse_index == self.parse_index),
            ("k-mer filter", fresh.kmer_filter == self.kmer_filter),
            ("phrase filter", fresh.phrase_filter == self.phrase_filter),
        ] {
            if !ok {
                return Err(BundleError::Malformed(format!("{name} does not match a rebuild")));
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        put_u32(&mut out, FORMAT_VERSION);
        put_u32(&mut out, SECTIONS.len() as u32);
        for section in SECTIONS {
            let payload = self.section_payload(section);
            put_u32(&mut out, section as u32);
            put_u64(&mut out, payload.len() as u64);
            out.extend_from_slice(&checksum(&payload));
            out.extend_from_slice(&payload);
        }
        out
    }

    fn section_payload(&self, section: Section) -> Vec<u8> {
        let mut b = Vec::new();
        match section {
            Section::Params => write_params(&mut b, &self.params),
            Section::Text => put_bytes(&mut b, &self.text),
            Section::Dictionary => {
                put_u64(&mut b, self.dictionary.len() as u64);
                for p in self.dictionary.iter() {
                    put_bytes(&mut b, p);
                }
            }
            Section::TextParse => {
                let tp = &self.text_parse;
                put_u64(&mut b, tp.source_len() as u64);
                put_u64(&mut b, tp.overlap() as u64);
                put_u32s(&mut b, tp.symbols());
                put_u64(&mut b, tp.phrase_starts().len() as u64);
                for &s in tp.phrase_starts() {
                    put_u64(&mut b, s as u64);
                }
            }
            Section::TextIndex => write_index_sas(&mut b, &self.text_index),
            Section::ParseIndex => write_index_sas(&mut b, &self.parse_index),
            Section::KmerFilter => write_filter(&mut b, &self.kmer_filter),
            Section::PhraseFilter => write_filter(&mut b, &self.phrase_filter),
        }
        b
    }

    pub fn from_bytes(data: &[u8]) -> Result<Self, BundleError> {
        let mut r = Reader { data, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(BundleError::BadMagic);
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(BundleError::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        let count = r.u32()?;
        if count as usize != SECTIONS.len() {
            return Err(BundleError::Malformed(format!(
                "expected {} sections, found {count}",
                SECTIONS.len()
            )));
        }
        let mut payloads = Vec::with_capacity(SECTIONS.len());
        for section in SECTIONS {
            let tag = r.u32()?;
            if tag != section as u32 {
                return Err(BundleError::Malformed(format!("unexpected section tag {tag}")));
            }
            let len = r.len()?;
            let sum = r.take(8)?;
            let payload = r.take(len)?;
            if checksum(payload) != sum {
                return Err(BundleError::Checksum(section));
            }
            payloads.push(Reader { data: payload, pos: 0 });
        }
        if r.pos != data.len() {
            return Err(BundleError::Malformed("trailing bytes".into()));
        }
        let [mut pr, mut tr, mut dr, mut tpr, mut tir, mut pir, mut kr, mut phr]: [Reader; 8] =
            payloads.try_into().map_err(|_| BundleError::Truncated)?;

        let params = read_params(&mut pr)?;
        params.validate()?;
        let text = tr.bytes()?.to_vec();
        let n_phrases = dr.len()?;
        let mut dictionary = PhraseDictionary::new();
        for _ in 0..n_phrases {
            dictionary.insert(dr.bytes()?);
        }
        if dictionary.len() != n_phrases {
            return Err(BundleError::Malformed("duplicate dictionary phrase".into()));
        }
        let source_len = tpr.len()?;
        let overlap = tpr.len()?;
        let symbols = tpr.u32s()?;
        let n_starts = tpr.len()?;
        let starts = (0..n_starts).map(|_| tpr.len()).collect::<Result<Vec<_>, _>>()?;
        if source_len != text.len() || symbols.iter().any(|&s| s as usize >= n_phrases) {
            return Err(BundleError::Malformed("text parse does not fit the text".into()));
        }
        let text_parse = ParsedString::from_parts(source_len, symbols, starts, overlap, Scheme::Pfp)?;
        let text_index = read_index(&mut tir, text.iter().map(|&c| c as u32).collect(), 256)?;
        let parse_index = read_index(&mut pir, text_parse.symbols().to_vec(), n_phrases as u32)?;
        let kmer_filter = read_filter(&mut kr)?;
        let phrase_filter = read_filter(&mut phr)?;
        if kmer_filter.item_kind() != ItemKind::Kmer(params.kmer_len) || phrase_filter.item_kind() != ItemKind::PhraseId
        {
            return Err(BundleError::Malformed(
                "filter item kinds do not match parameters".into(),
            ));
        }
        for r in [&pr, &tr, &dr, &tpr, &tir, &pir, &kr, &phr] {
            if r.pos != r.data.len() {
                return Err(BundleError::Malformed("section has trailing bytes".into()));
            }
        }
        Ok(Self {
            params,
            text,
            dictionary,
            text_parse,
            text_index,
            parse_index,
            kmer_filter,
            phrase_filter,
        })
    }

    /// Reads only the parameter block.
    pub fn read_params(data: &[u8]) -> Result<BuildParams, BundleError> {
        let mut r = Reader { data, pos: 0 };
        if r.take(MAGIC.len())? != MAGIC {
            return Err(BundleError::BadMagic);
        }
        let version = r.u32()?;
        if version != FORMAT_VERSION {
            return Err(BundleError::VersionMismatch {
                found: version,
                expected: FORMAT_VERSION,
            });
        }
        r.u32()?;
        if r.u32()? != Section::Params as u32 {
            return Err(BundleError::Malformed("parameter block missing".into()));
        }
        let len = r.len()?;
        let sum = r.take(8)?;
        let payload = r.take(len)?;
        if checksum(payload) != sum {
            return Err(BundleError::Checksum(Section::Params));
        }
        read_params(&mut Reader { data: payload, pos: 0 })
    }
}

fn checksum(payload: &[u8]) -> [u8; 8] {
    let digest = Sha256::digest(payload);
    digest[..8].try_into().expect("digest is 32 bytes")
}

fn put_u8(b: &mut Vec<u8>, v: u8) {
    b.push(v);
}

fn put_u32(b: &mut Vec<u8>, v: u32) {
    b.extend_from_slice(&v.to_le_bytes());
}

fn put_u64(b: &mut Vec<u8>, v: u64) {
    b.extend_from_slice(&v.to_le_bytes());
}

fn put_bytes(b: &mut Vec<u8>, v: &[u8]) {
    put_u64(b, v.len() as u64);
    b.extend_from_slice(v);
}

fn put_u32s(b: &mut Vec<u8>, v: &[u32]) {
    put_u64(b, v.len() as u64);
    for &x in v {
        put_u32(b, x);
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8], BundleError> {
        let end = self
            .pos
            .checked_add(n)
            .filter(|&e| e <= self.data.len())
            .ok_or(BundleError::Truncated)?;
        let s = &self.data[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u8(&mut self) -> Result<u8, BundleError> {
        Ok(self.take(1)?[0])
    }

    fn u32(&mut self) -> Result<u32, BundleError> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().expect("4 bytes")))
    }

    fn u64(&mut self) -> Result<u64, BundleError> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn len(&mut self) -> Result<usize, BundleError> {
        usize::try_from(self.u64()?).map_err(|_| BundleError::Truncated)
    }

    fn bytes(&mut self) -> Result<&'a [u8], BundleError> {
        let n = self.len()?;
        self.take(n)
    }

    fn u32s(&mut self) -> Result<Vec<u32>, BundleError> {
        let n = self.len()?;
        let raw = self.take(n.checked_mul(4).ok_or(BundleError::Truncated)?)?;
        Ok(raw
            .chunks_exact(4)
            .map(|c| u32::from_le_bytes(c.try_into().expect("4 bytes")))
            .collect())
    }
}

fn write_params(b: &mut Vec<u8>, p: &BuildParams) {
    put_u64(b, p.window as u64);
    put_u64(b, p.trigger_modulus);
    put_u64(b, p.hash_base);
    put_u64(b, p.hash_prime);
    put_u64(b, p.kmer_len as u64);
    put_u64(b, p.minimizer.k() as u64);
    put_u64(b, p.minimizer.w() as u64);
    match p.minimizer.order() {
        KmerOrder::Lexicographic => {
            put_u8(b, 0);
            put_u64(b, 0);
        }
        KmerOrder::Hashed { seed } => {
            put_u8(b, 1);
            put_u64(b, seed);
        }
    }
    put_u8(b, filter_kind_tag(p.filter_kind));
    put_u64(b, p.filter_fpr.to_bits());
    put_u64(b, p.seed);
    put_u8(b, p.dna as u8);
    put_u8(b, RECORD_SEPARATOR);
}

fn read_params(r: &mut Reader<'_>) -> Result<BuildParams, BundleError> {
    let window = r.len()?;
    let trigger_modulus = r.u64()?;
    let hash_base = r.u64()?;
    let hash_prime = r.u64()?;
    let kmer_len = r.len()?;
    let mk = r.len()?;
    let mw = r.len()?;
    let order = match (r.u8()?, r.u64()?) {
        (0, _) => KmerOrder::Lexicographic,
        (1, seed) => KmerOrder::Hashed { seed },
        (t, _) => return Err(BundleError::Malformed(format!("unknown k-mer order {t}"))),
    };
    let filter_kind = filter_kind_from_tag(r.u8()?)?;
    let filter_fpr = f64::from_bits(r.u64()?);
    let seed = r.u64()?;
    let dna = match r.u8()? {
        0 => false,
        1 => true,
        t => return Err(BundleError::Malformed(format!("bad alphabet flag {t}"))),
    };
    if r.u8()? != RECORD_SEPARATOR {
        return Err(BundleError::Malformed("unknown record separator".into()));
    }
    Ok(BuildParams {
        window,
        trigger_modulus,
        hash_base,
        hash_prime,
        kmer_len,
        minimizer: MinimizerParams::new(mk, mw, order)?,
        filter_kind,
        filter_fpr,
        seed,
        dna,
    })
}

fn filter_kind_tag(kind: FilterKind) -> u8 {
    match kind {
        FilterKind::Bloom => 0,
        FilterKind::Counting => 1,
        FilterKind::Exact => 2,
    }
}

fn filter_kind_from_tag(tag: u8) -> Result<FilterKind, BundleError> {
    Ok(match tag {
        0 => FilterKind::Bloom,
        1 => FilterKind::Counting,
        2 => FilterKind::Exact,
        t => return Err(BundleError::Malformed(format!("unknown filter kind {t}"))),
    })
}

fn write_index_sas(b: &mut Vec<u8>, index: &OccurrenceIndex) {
    put_u32s(b, index.forward().sa());
    put_u32s(b, index.backward().sa());
}

fn read_index(r: &mut Reader<'_>, text: Vec<u32>, alphabet_size: u32) -> Result<OccurrenceIndex, BundleError> {
    let forward = r.u32s()?;
    let backward = r.u32s()?;
    Ok(OccurrenceIndex::from_parts(text, alphabet_size, forward, backward)?)
}

fn write_filter(b: &mut Vec<u8>, filter: &MembershipFilter) {
    put_u8(b, filter_kind_tag(filter.kind()));
    match filter.item_kind() {
        ItemKind::Kmer(k) => {
            put_u8(b, 0);
            put_u64(b, k as u64);
        }
        ItemKind::PhraseId => {
            put_u8(b, 1);
            put_u64(b, 0);
        }
    }
    let p = filter.params();
    put_u64(b, p.bits);
    put_u32(b, p.hash_count);
    put_u64(b, p.seed);
    put_u8(b, p.counter_width);
    match filter.storage() {
        Storage::Bits(words) => {
            put_u64(b, words.len() as u64);
            for &w in words {
                put_u64(b, w);
            }
        }
        Storage::Counters(c) => put_bytes(b, c),
        Storage::Exact(map) => {
            put_u64(b, map.len() as u64);
            for (key, &count) in map {
                put_bytes(b, key);
                put_u32(b, count);
            }
        }
    }
}

fn read_filter(r: &mut Reader<'_>) -> Result<MembershipFilter, BundleError> {
    let kind = filter_kind_from_tag(r.u8()?)?;
    let item_kind = match (r.u8()?, r.len()?) {
        (0, k) => ItemKind::Kmer(k),
        (1, _) => ItemKind::PhraseId,
        (t, _) => return Err(BundleError::Malformed(format!("unknown item kind {t}"))),
    };
    let params = FilterParams {
        bits: r.u64()?,
        hash_count: r.u32()?,
        seed: r.u64()?,
        counter_width: r.u8()?,
    };
    let storage = match kind {
        FilterKind::Bloom => {
            let n = r.len()?;
            Storage::Bits((0..n).map(|_| r.u64()).collect::<Result<_, _>>()?)
        }
        FilterKind::Counting => Storage::Counters(r.bytes()?.to_vec()),
        FilterKind::Exact => {
            let n = r.len()?;
            let mut map = BTreeMap::new();
            for _ in 0..n {
                let key = r.bytes()?.to_vec();
                map.insert(key, r.u32()?);
            }
            if map.len() != n {
                return Err(BundleError::Malformed("duplicate filter key".into()));
            }
            Storage::Exact(map)
        }
    };
    Ok(MembershipFilter::from_parts(kind, item_kind, params, storage)?)
}
