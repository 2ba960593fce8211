use super::{Origin, PseudoMem, PseudoMemError};
use crate::filters::{Item, ItemKind, MembershipFilter};

/// Maximal runs of k-mers the filter reports as occurring at least `f` times.
/// A run of k-mer starts `a..=b` becomes characters `a..b + k`. Neighbours
/// separated by a single negative k-mer overlap by `k - 2` characters.
pub fn kebab_pseudo_mems(
    pattern: &[u8],
    filter: &MembershipFilter,
    f: usize,
    probes: &mut u64,
) -> Result<Vec<PseudoMem>, PseudoMemError> {
    let k = match filter.item_kind() {
        ItemKind::Kmer(k) => k,
        other => return Err(PseudoMemError::WrongFilter(other)),
    };
    if pattern.len() < k {
        return Err(PseudoMemError::PatternTooShort { len: pattern.len(), k });
    }
    let mut out = Vec::new();
    let mut run_start = None;
    let n_kmers = pattern.len() - k + 1;
    for x in 0..=n_kmers {
        let positive = x < n_kmers && {
            *probes += 1;
            filter.reports_at_least(Item::Kmer(&pattern[x..x + k]), f)?
        };
        match (positive, run_start) {
            (true, None) => run_start = Some(x),
            (false, Some(a)) => {
                out.push(PseudoMem {
                    chars: a..x - 1 + k,
                    phrases: None,
                    origin: Origin::Kebab,
                    lower_bound: 0,
                });
                run_start = None;
            }
            _ => {}
        }
    }
    Ok(out)
}
