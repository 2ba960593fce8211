use std::collections::VecDeque;

use super::{assemble, ParseError, ParsedString, PhraseRegistry, Scheme};
use crate::hashing::hash_bytes;

/// Total order used to rank k-mers inside a window.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KmerOrder {
    Lexicographic,
    Hashed { seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinimizerParams {
    k: usize,
    w: usize,
    order: KmerOrder,
}

impl MinimizerParams {
    pub fn new(k: usize, w: usize, order: KmerOrder) -> Result<Self, ParseError> {
        if k == 0 || w <= k {
            return Err(ParseError::InvalidParams(format!(
                "minimizer parameters need w > k >= 1 (got k={k}, w={w})"
            )));
        }
        Ok(Self { k, w, order })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn w(&self) -> usize {
        self.w
    }

    pub fn order(&self) -> KmerOrder {
        self.order
    }

    /// Longest possible phrase after the first one.
    pub fn max_phrase_len(&self) -> usize {
        self.w - self.k + 1
    }
}

/// Marks positions whose key equals the minimum of at least one sliding
/// window of `span` keys. Ties all count.
fn window_minima<K: Ord>(keys: &[K], span: usize) -> Vec<bool> {
    let n = keys.len();
    if n < span {
        return vec![false; n];
    }
    // minimum of each window
    let mut win_min: Vec<&K> = Vec::with_capacity(n - span + 1);
    let mut dq: VecDeque<usize> = VecDeque::new();
    for i in 0..n {
        while dq.back().is_some_and(|&j| keys[j] > keys[i]) {
            dq.pop_back();
        }
        dq.push_back(i);
        if dq[0] + span <= i {
            dq.pop_front();
        }
        if i + 1 >= span {
            win_min.push(&keys[dq[0]]);
        }
    }
    // A key is a minimizer iff it equals the largest of the minima of the
    // windows covering it (it is >= every one of them).
    let mut marks = vec![false; n];
    let mut dq: VecDeque<usize> = VecDeque::new();
    let mut next_window = 0;
    for (x, mark) in marks.iter_mut().enumerate() {
        // windows a with x + 1 - span <= a <= x
        while next_window <= x && next_window < win_min.len() {
            while dq.back().is_some_and(|&a| win_min[a] <= win_min[next_window]) {
                dq.pop_back();
            }
            dq.push_back(next_window);
            next_window += 1;
        }
        while dq.front().is_some_and(|&a| a + span <= x) {
            dq.pop_front();
        }
        *mark = dq.front().is_some_and(|&a| *win_min[a] == keys[x]);
    }
    marks
}

/// Start positions of all minimizer occurrences in `text`, ascending.
pub fn minimizer_positions(text: &[u8], params: &MinimizerParams) -> Vec<usize> {
    let (k, w) = (params.k, params.w);
    if text.len() < w {
        return Vec::new();
    }
    let span = w - k + 1;
    let marks = match params.order {
        KmerOrder::Lexicographic => {
            let keys: Vec<&[u8]> = text.windows(k).collect();
            window_minima(&keys, span)
        }
        KmerOrder::Hashed { seed } => {
            let keys: Vec<u64> = text.windows(k).map(|km| hash_bytes(km, seed)).collect();
            window_minima(&keys, span)
        }
    };
    marks.iter().enumerate().filter(|(_, &m)| m).map(|(x, _)| x).collect()
}

/// Parse that cuts after the last character of every minimizer occurrence.
/// Phrases partition the text.
pub fn minimizer_parse(
    text: &[u8],
    params: &MinimizerParams,
    dict: &mut impl PhraseRegistry,
) -> Result<ParsedString, ParseError> {
    if text.is_empty() {
        return Err(ParseError::EmptyInput);
    }
    let mut starts = vec![0];
    starts.extend(
        minimizer_positions(text, params)
            .into_iter()
            .map(|x| x + params.k)
            .filter(|&cut| cut < text.len()),
    );
    Ok(assemble(text, starts, 0, Scheme::Minimizer, dict))
}
