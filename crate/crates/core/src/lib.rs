//! Maximal exact match search with pseudo-MEM prefiltering.
//!
//! A pattern is cut into pseudo-MEMs, substrings guaranteed to contain its
//! (f-)maximal exact matches against an indexed text, before the
//! character-level search runs inside them. Pseudo-MEMs come from a k-mer
//! filter ([`pseudomem::kebab_pseudo_mems`]), from an index over the
//! prefix-free parse of the text ([`pseudomem::parse_pseudo_mems`]), or from
//! a phrase filter refined by that index ([`pseudomem::refine`]). The
//! parse-derived ones carry lower bounds that let short pseudo-MEMs be
//! discarded without losing the longest MEMs.
//!
//! Positions are 0-based and intervals half-open throughout the library;
//! the command-line tool prints 1-based inclusive coordinates.

pub mod bundle;
pub mod fasta;
pub mod filters;
mod hashing;
pub mod oracle;
pub mod parsing;
pub mod pseudomem;
pub mod query;
pub mod seqindex;
pub mod verify;

pub use hashing::{hash_bytes, mix64};
