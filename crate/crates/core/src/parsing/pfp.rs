use super::{assemble, ParseError, ParsedString, PhraseRegistry, Scheme, WindowHasher};

/// Starts of the trigger windows that open a new phrase.
///
/// Only complete windows are tested. A trigger at position 0 opens nothing
/// (the first phrase already starts there) and a trigger in the last window
/// would only open a phrase made of the window itself, so both are skipped.
pub fn trigger_breaks<H: WindowHasher>(text: &[u8], hasher: &H) -> Result<Vec<usize>, ParseError> {
    let w = hasher.width();
    if text.len() <= w {
        return Ok(Vec::new());
    }
    let hashes = hasher.roll_windows(text)?;
    let last = hashes.len() - 1;
    Ok(hashes
        .iter()
        .enumerate()
        .filter(|&(s, &h)| s != 0 && s != last && hasher.is_trigger(h))
        .map(|(s, _)| s)
        .collect())
}

/// Prefix-free parse: a phrase ends at the end of every trigger window and
/// the next phrase starts with that window, so neighbours share `w` characters.
pub fn pfp_parse<H: WindowHasher>(
    text: &[u8],
    hasher: &H,
    dict: &mut impl PhraseRegistry,
) -> Result<ParsedString, ParseError> {
    if text.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let mut starts = vec![0];
    starts.extend(trigger_breaks(text, hasher)?);
    Ok(assemble(text, starts, hasher.width(), Scheme::Pfp, dict))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parsing::{PhraseDictionary, RollingHasher};
    use proptest::prelude::*;

    /// Sum of the window's bytes; every width-2 window of "ABAB..." sums to 131.
    struct SumHasher {
        width: usize,
        p: u64,
    }

    impl WindowHasher for SumHasher {
        fn width(&self) -> usize {
            self.width
        }
        fn trigger_modulus(&self) -> u64 {
            self.p
        }
        fn roll_windows(&self, text: &[u8]) -> Result<Vec<u64>, ParseError> {
            if text.len() < self.width {
                return Err(ParseError::TextShorterThanWindow {
                    len: text.len(),
                    width: self.width,
                });
            }
            Ok(text
                .windows(self.width)
                .map(|w| w.iter().map(|&c| c as u64).sum())
                .collect())
        }
    }

    fn phrases(p: &ParsedString, text: &[u8]) -> Vec<Vec<u8>> {
        (0..p.len()).map(|q| text[p.phrase_range(q)].to_vec()).collect()
    }

    #[test]
    fn ababab_hand_scan() {
        let text = b"ABABABAB";
        let hasher = SumHasher { width: 2, p: 131 };
        // Hand scan: windows start at 0..=6 and all sum to 131. Window 0 and
        // the final window 6 open nothing, so phrases start at 0..=5, each
        // running to the end of the next trigger window.
        let mut d = PhraseDictionary::new();
        let p = pfp_parse(text, &hasher, &mut d).unwrap();
        assert_eq!(p.phrase_starts(), &[0, 1, 2, 3, 4, 5]);
        assert_eq!(
            phrases(&p, text),
            vec![
                b"ABA".to_vec(),
                b"BAB".to_vec(),
                b"ABA".to_vec(),
                b"BAB".to_vec(),
                b"ABA".to_vec(),
                b"BAB".to_vec()
            ]
        );
        assert_eq!(p.symbols(), &[0, 1, 0, 1, 0, 1]);
        assert_eq!(p.overlap(), 2);
        // phrase index 1 in 0-based terms is the second phrase
        assert_eq!(p.char_span(1, 1).unwrap(), 1..4);
        assert_eq!(p.char_span(0, 5).unwrap(), 0..8);
        assert_eq!(p.reconstruct(&d).unwrap(), text);
    }

    #[test]
    fn no_complete_window_gives_one_phrase() {
        let hasher = RollingHasher::with_defaults(10, 2).unwrap();
        let mut d = PhraseDictionary::new();
        let p = pfp_parse(b"ACGT", &hasher, &mut d).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.char_span(0, 0).unwrap(), 0..4);
    }

    #[test]
    fn no_trigger_gives_one_phrase() {
        let hasher = SumHasher { width: 2, p: 1000 };
        let mut d = PhraseDictionary::new();
        let p = pfp_parse(b"ACGTACGTTT", &hasher, &mut d).unwrap();
        assert_eq!(p.len(), 1);
        assert_eq!(p.phrase_range(0), 0..10);
    }

    #[test]
    fn empty_rejected() {
        let hasher = RollingHasher::with_defaults(4, 3).unwrap();
        let mut d = PhraseDictionary::new();
        assert_eq!(pfp_parse(b"", &hasher, &mut d), Err(ParseError::EmptyInput));
    }

    #[test]
    fn text_and_pattern_share_ids() {
        let hasher = RollingHasher::with_defaults(3, 4).unwrap();
        let mut d = PhraseDictionary::new();
        let t = b"GATTACAGATTACACCGGTTAGATTACAGG";
        let pt = pfp_parse(t, &hasher, &mut d).unwrap();
        let before = d.len();
        let pp = pfp_parse(&t[..], &hasher, &mut d).unwrap();
        assert_eq!(pt.symbols(), pp.symbols());
        assert_eq!(d.len(), before);
    }

    fn dna(max: usize) -> impl Strategy<Value = Vec<u8>> {
        proptest::collection::vec(prop_oneof![Just(b'A'), Just(b'C'), Just(b'G'), Just(b'T')], 1..max)
    }

    proptest! {
        #[test]
        fn reconstructs_source(text in dna(300), w in 1usize..8, p in 2u64..12) {
            let hasher = RollingHasher::with_defaults(w, p).unwrap();
            let mut d = PhraseDictionary::new();
            let parsed = pfp_parse(&text, &hasher, &mut d).unwrap();
            prop_assert_eq!(parsed.reconstruct(&d).unwrap(), text.clone());
            prop_assert_eq!(parsed.phrase_starts()[0], 0);
            prop_assert_eq!(parsed.phrase_end(parsed.len() - 1), text.len());
            // a phrase boundary sits exactly at each trigger window
            let hashes = if text.len() >= w { hasher.roll_windows(&text).unwrap() } else { vec![] };
            for &s in &parsed.phrase_starts()[1..] {
                prop_assert!(hashes[s] % p == 0);
            }
        }

        #[test]
        fn breaks_inside_shared_substring_agree(
            shared in dna(120),
            xl in dna(30), xr in dna(30), yl in dna(30), yr in dna(30),
            w in 2usize..6, p in 2u64..8,
        ) {
            let hasher = RollingHasher::with_defaults(w, p).unwrap();
            let x = [xl.clone(), shared.clone(), xr].concat();
            let y = [yl.clone(), shared.clone(), yr].concat();
            let bx = trigger_breaks(&x, &hasher).unwrap();
            let by = trigger_breaks(&y, &hasher).unwrap();
            let inside = |breaks: &[usize], off: usize| -> Vec<usize> {
                breaks
                    .iter()
                    .filter(|&&s| s >= off && s + w <= off + shared.len())
                    .map(|&s| s - off)
                    .collect()
            };
            prop_assert_eq!(inside(&bx, xl.len()), inside(&by, yl.len()));
        }
    }
}
