//! Per-pattern query pipelines over an [`IndexBundle`] and their TSV output.

use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::bundle::IndexBundle;
use crate::fasta::Record;
use crate::parsing::{pfp_parse, ParseError};
use crate::pseudomem::{
    coarse_sets, discard_threshold, find_long_mems, kebab_pseudo_mems, parse_pseudo_mems, refine, PseudoMem,
    PseudoMemError, Selection,
};
use crate::seqindex::{bml_mems, bml_top_t, IndexError, Mem, SearchStats};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Search the whole pattern directly.
    Exact,
    /// k-mer filter pseudo-MEMs.
    Kebab,
    /// Parse-index pseudo-MEMs with safe discard.
    Parse,
    /// Phrase filter, refined by the parse index.
    Combined,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Kebab => "kebab",
            Mode::Parse => "parse",
            Mode::Combined => "combined",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(Mode::Exact),
            "kebab" => Ok(Mode::Kebab),
            "parse" => Ok(Mode::Parse),
            "combined" => Ok(Mode::Combined),
            _ => Err(format!("unknown mode {s:?} (expected exact, kebab, parse or combined)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error(transparent)]
    PseudoMem(#[from] PseudoMemError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryParams {
    pub mode: Mode,
    pub f: usize,
    pub selection: Selection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    /// Empty record; nothing was searched.
    EmptyPattern,
    /// Shorter than the k-mer length, so the k-mer filter cannot speak to it.
    ShorterThanK,
}

/// Algorithmic event counts; deterministic for a given index and pattern.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    pub parse_steps: SearchStats,
    pub char_steps: SearchStats,
    pub filter_probes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryReport {
    pub pattern_id: String,
    pub pattern_len: usize,
    pub mode: Mode,
    pub status: Status,
    pub pseudo_mems: Vec<PseudoMem>,
    /// Parallel to `pseudo_mems`.
    pub retained: Vec<bool>,
    pub mems: Vec<Mem>,
    /// Phrases in the pattern's parse; 0 when the mode does not parse.
    pub parse_len: usize,
    pub counters: Counters,
}

impl QueryReport {
    fn empty(id: &str, len: usize, mode: Mode, status: Status) -> Self {
        Self {
            pattern_id: id.to_string(),
            pattern_len: len,
            mode,
            status,
            pseudo_mems: Vec::new(),
            retained: Vec::new(),
            mems: Vec::new(),
            parse_len: 0,
            counters: Counters::default(),
        }
    }

    pub fn pseudo_mem_total(&self) -> usize {
        match self.mode {
            Mode::Exact => self.pattern_len,
            _ => self.pseudo_mems.iter().map(PseudoMem::len).sum(),
        }
    }

    pub fn retained_total(&self) -> usize {
        match self.mode {
            Mode::Exact => self.pattern_len,
            _ => self
                .pseudo_mems
                .iter()
                .zip(&self.retained)
                .filter(|(_, &r)| r)
                .map(|(p, _)| p.len())
                .sum(),
        }
    }
}

fn exact_mems(
    bundle: &IndexBundle,
    pattern: &[u32],
    f: usize,
    selection: Selection,
    stats: &mut SearchStats,
) -> Result<Vec<Mem>, IndexError> {
    let index = bundle.text_index();
    match selection {
        Selection::MinLen(l) => bml_mems(index, pattern, l, f, stats),
        Selection::Top(t) => {
            let top = bml_top_t(index, pattern, t, f, stats)?;
            if top.len() < t {
                return Ok(top);
            }
            // a second pass at the cutoff picks up MEMs tying the t-th
            let cutoff = top.iter().map(Mem::len).min().unwrap_or(1);
            bml_mems(index, pattern, cutoff, f, stats)
        }
    }
}

/// Pseudo-MEMs kept for the character-level search.
fn retain(pms: &[PseudoMem], selection: Selection) -> Vec<bool> {
    let floor = match selection {
        Selection::Top(t) => discard_threshold(pms, t),
        Selection::MinLen(l) => l,
    };
    pms.iter().map(|p| p.len() >= floor).collect()
}

pub fn run_query(
    bundle: &IndexBundle,
    pattern_id: &str,
    pattern: &[u8],
    params: &QueryParams,
) -> Result<QueryReport, QueryError> {
    let QueryParams { mode, f, selection } = *params;
    if pattern.is_empty() {
        return Ok(QueryReport::empty(pattern_id, 0, mode, Status::EmptyPattern));
    }
    let mut report = QueryReport::empty(pattern_id, pattern.len(), mode, Status::Ok);
    let symbols: Vec<u32> = pattern.iter().map(|&c| c as u32).collect();
    let mut c = Counters::default();

    let pms = match mode {
        Mode::Exact => {
            report.mems = exact_mems(bundle, &symbols, f, selection, &mut c.char_steps)?;
            report.counters = c;
            return Ok(report);
        }
        Mode::Kebab => {
            if pattern.len() < bundle.params().kmer_len {
                report.status = Status::ShorterThanK;
                return Ok(report);
            }
            kebab_pseudo_mems(pattern, bundle.kmer_filter(), f, &mut c.filter_probes)?
        }
        Mode::Parse | Mode::Combined => {
            let hasher = bundle.params().hasher()?;
            let parsed = pfp_parse(pattern, &hasher, &mut bundle.dictionary().overlay())?;
            report.parse_len = parsed.len();
            if mode == Mode::Parse {
                parse_pseudo_mems(&parsed, bundle.parse_index(), f, &mut c.parse_steps)?
            } else {
                let coarse = coarse_sets(&parsed, bundle.phrase_filter(), f, &mut c.filter_probes)?;
                refine(&coarse, &parsed, bundle.parse_index(), f, &mut c.parse_steps)?
            }
        }
    };

    // k-mer pseudo-MEMs carry no lower bounds, so only a length floor applies
    let retained = retain(&pms, selection);
    let kept: Vec<PseudoMem> = pms
        .iter()
        .zip(&retained)
        .filter(|(_, &r)| r)
        .map(|(p, _)| p.clone())
        .collect();
    report.mems = find_long_mems(bundle.text_index(), &kept, &symbols, f, selection, &mut c.char_steps)?;
    report.pseudo_mems = pms;
    report.retained = retained;
    report.counters = c;
    Ok(report)
}

/// Runs every record in parallel; results keep input order.
pub fn run_all(bundle: &IndexBundle, records: &[Record], params: &QueryParams) -> Vec<Result<QueryReport, QueryError>> {
    records
        .par_iter()
        .map(|r| run_query(bundle, &r.id, &r.seq, params))
        .collect()
}

pub const MEM_HEADER: &str = "pattern_id\tmode\tstart\tend\tlength\tfreq";
pub const PSEUDO_MEM_HEADER: &str = "pattern_id\torigin\tchar_start\tchar_end\tlower_bound\tretained";
pub const STATS_HEADER: &str = "pattern_id\tmode\tm\tpseudo_mem_total\tretained_total\tparse_len\tparse_backward_steps\tchar_backward_steps\tfilter_probes";

/// MEM rows, 1-based inclusive coordinates. An empty record gets one
/// placeholder row with `.` coordinates.
pub fn write_mems(out: &mut impl Write, report: &QueryReport) -> io::Result<()> {
    let (id, mode) = (&report.pattern_id, report.mode);
    if report.status == Status::EmptyPattern {
        return writeln!(out, "{id}\t{mode}\t.\t.\t0\t0");
    }
    for m in &report.mems {
        writeln!(out, "{id}\t{mode}\t{}\t{}\t{}\t{}", m.start + 1, m.end, m.len(), m.freq)?;
    }
    Ok(())
}

pub fn write_pseudo_mems(out: &mut impl Write, report: &QueryReport) -> io::Result<()> {
    for (p, &kept) in report.pseudo_mems.iter().zip(&report.retained) {
        writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}",
            report.pattern_id,
            p.origin.as_str(),
            p.chars.start + 1,
            p.chars.end,
            p.lower_bound,
            kept as u8
        )?;
    }
    Ok(())
}

pub fn write_stats(out: &mut impl Write, report: &QueryReport) -> io::Result<()> {
    let c = &report.counters;
    writeln!(
        out,
        "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
        report.pattern_id,
        report.mode,
        report.pattern_len,
        report.pseudo_mem_total(),
        report.retained_total(),
        report.parse_len,
        c.parse_steps.backward_steps,
        c.char_steps.backward_steps,
        c.filter_probes
    )
}
