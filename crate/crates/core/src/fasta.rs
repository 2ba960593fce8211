//! Text and pattern input: FASTA records or raw bytes.

use thiserror::Error;

/// Joins FASTA records of the text so no match can span two of them.
pub const RECORD_SEPARATOR: u8 = 0;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("record {record}: byte {byte:#04x} is not A, C, G or T")]
    NotDna { record: String, byte: u8 },
    #[error("record {record}: contains the reserved separator byte")]
    ContainsSeparator { record: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlphabetMode {
    /// Keep every byte.
    #[default]
    Raw,
    /// Reject anything but ACGT after uppercasing.
    Dna,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Record {
    pub id: String,
    pub seq: Vec<u8>,
}

pub fn is_fasta(data: &[u8]) -> bool {
    data.iter().find(|b| !b.is_ascii_whitespace()) == Some(&b'>')
}

/// FASTA records, uppercased, sequence lines joined.
pub fn parse_fasta(data: &[u8]) -> Vec<Record> {
    let mut records = Vec::new();
    let mut current: Option<Record> = None;
    for line in data.split(|&b| b == b'\n') {
        let line = line.strip_suffix(b"\r").unwrap_or(line);
        if let Some(header) = line.strip_prefix(b">") {
            records.extend(current.take());
            let id = String::from_utf8_lossy(header)
                .split_whitespace()
                .next()
                .unwrap_or("")
                .to_string();
            current = Some(Record { id, seq: Vec::new() });
        } else if let Some(rec) = current.as_mut() {
            rec.seq.extend(
                line.iter()
                    .filter(|b| !b.is_ascii_whitespace())
                    .map(u8::to_ascii_uppercase),
            );
        }
    }
    records.extend(current);
    for (i, r) in records.iter_mut().enumerate() {
        if r.id.is_empty() {
            r.id = format!("record{}", i + 1);
        }
    }
    records
}

fn check(records: &[Record], mode: AlphabetMode) -> Result<(), InputError> {
    for r in records {
        if r.seq.contains(&RECORD_SEPARATOR) {
            return Err(InputError::ContainsSeparator { record: r.id.clone() });
        }
        if mode == AlphabetMode::Dna {
            if let Some(&byte) = r.seq.iter().find(|b| !matches!(b, b'A' | b'C' | b'G' | b'T')) {
                return Err(InputError::NotDna {
                    record: r.id.clone(),
                    byte,
                });
            }
        }
    }
    Ok(())
}

/// The text to index: FASTA records joined by [`RECORD_SEPARATOR`], or the
/// raw bytes minus a trailing line break.
pub fn read_text(data: &[u8], mode: AlphabetMode) -> Result<Vec<u8>, InputError> {
    let records = if is_fasta(data) {
        parse_fasta(data)
    } else {
        let raw = data.strip_suffix(b"\n").unwrap_or(data);
        let raw = raw.strip_suffix(b"\r").unwrap_or(raw);
        vec![Record {
            id: "text".into(),
            seq: raw.to_vec(),
        }]
    };
    check(&records, mode)?;
    Ok(records
        .into_iter()
        .map(|r| r.seq)
        .collect::<Vec<_>>()
        .join(&RECORD_SEPARATOR))
}

/// Patterns: FASTA records, or one pattern per line (empty lines give empty
/// patterns).
pub fn read_patterns(data: &[u8], mode: AlphabetMode) -> Result<Vec<Record>, InputError> {
    let records = if is_fasta(data) {
        parse_fasta(data)
    } else {
        let body = data.strip_suffix(b"\n").unwrap_or(data);
        if body.is_empty() && data.is_empty() {
            Vec::new()
        } else {
            body.split(|&b| b == b'\n')
                .enumerate()
                .map(|(i, line)| Record {
                    id: format!("pattern{}", i + 1),
                    seq: line.strip_suffix(b"\r").unwrap_or(line).to_vec(),
                })
                .collect()
        }
    };
    check(&records, mode)?;
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fasta_records_join_with_separator() {
        let data = b">a desc\nacg\nTT\n>b\nGGA\n";
        assert_eq!(read_text(data, AlphabetMode::Dna).unwrap(), b"ACGTT\0GGA");
        let recs = read_patterns(data, AlphabetMode::Raw).unwrap();
        assert_eq!(recs[0].id, "a");
        assert_eq!(recs[1].seq, b"GGA");
    }

    #[test]
    fn dna_mode_rejects() {
        assert!(matches!(
            read_text(b">x\nACGN\n", AlphabetMode::Dna),
            Err(InputError::NotDna { byte: b'N', .. })
        ));
        assert_eq!(read_text(b">x\nACGN\n", AlphabetMode::Raw).unwrap(), b"ACGN");
    }

    #[test]
    fn raw_lines() {
        let recs = read_patterns(b"ACGT\n\nGG\n", AlphabetMode::Raw).unwrap();
        assert_eq!(recs.len(), 3);
        assert!(recs[1].seq.is_empty());
        assert_eq!(read_text(b"hello world\n", AlphabetMode::Raw).unwrap(), b"hello world");
        assert!(read_patterns(b"", AlphabetMode::Raw).unwrap().is_empty());
    }
}
