use super::BoundEvent;
use crate::bits::{Configuration, EdgeSet};
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Most open edges a split search will enumerate subsets of.
pub const SPLIT_OPEN_LIMIT: usize = 24;

/// Whether `a` and `b` occur disjointly in `c`: some split of the open edges
/// into `W` and its complement has `a` on `W` and `b` on the rest.
pub fn disjoint_occurrence(
    a: &BoundEvent,
    b: &BoundEvent,
    g: &Graph,
    c: &Configuration,
) -> Result<bool> {
    sq_s_occurrence(a, b, g, c, c, &EdgeSet::full(g.edge_count()))
}

/// Disjoint occurrence relative to `s`: witnesses may share edges only
/// outside `s`. `a` is checked on `W` plus the open edges of `c1` outside
/// `s`; `b` on the rest of `s ∩ open(c1)` plus the open edges of `c2`
/// outside `s`.
pub fn sq_s_occurrence(
    a: &BoundEvent,
    b: &BoundEvent,
    g: &Graph,
    c1: &Configuration,
    c2: &Configuration,
    s: &EdgeSet,
) -> Result<bool> {
    g.check_config(c1)?;
    g.check_config(c2)?;
    if s.len() != g.edge_count() {
        return Err(Error::IndexMismatch {
            expected: g.edge_count(),
            got: s.len(),
        });
    }
    a.require_increasing(g)?;
    b.require_increasing(g)?;
    split_search(a, b, g, c1, c2, s)
}

/// The split search behind [`sq_s_occurrence`], for callers that have
/// already checked both events are increasing.
pub(crate) fn split_search(
    a: &BoundEvent,
    b: &BoundEvent,
    g: &Graph,
    c1: &Configuration,
    c2: &Configuration,
    s: &EdgeSet,
) -> Result<bool> {
    let split: Vec<usize> = c1.open_edges().intersection(s).iter().collect();
    Error::guard("open edges to split", split.len(), SPLIT_OPEN_LIMIT)?;
    let outside = s.complement();
    let base_a = c1.open_edges().intersection(&outside);
    let base_b = c2.open_edges().intersection(&outside);
    for w in 0..1u64 << split.len() {
        let mut on_a = base_a.clone();
        let mut on_b = base_b.clone();
        for (i, &e) in split.iter().enumerate() {
            if w >> i & 1 == 1 {
                on_a.insert(e);
            } else {
                on_b.insert(e);
            }
        }
        if a.eval_open(g, &on_a) && b.eval_open(g, &on_b) {
            return Ok(true);
        }
    }
    Ok(false)
}
