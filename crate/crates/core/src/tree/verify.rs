//! Exhaustive structural checks on strategies: continuation, adaptedness,
//! deciding an event, and the shape of event pairs.

use super::{BoundStrategy, Ctx, Cursor, Move, Side, Step};
use crate::bits::{Configuration, EdgeSet};
use crate::error::{Error, Result};
use crate::event::{BoundEvent, Monotonicity};
use crate::graph::Graph;
use std::collections::HashMap;

/// Largest graph for continuation and decision checks.
pub const CONTINUATION_EDGES: usize = 16;
/// Largest graph for the pairwise adaptedness check.
pub const ADAPTED_EDGES: usize = 10;

const OUTCOMES: [(bool, bool); 4] = [(false, false), (false, true), (true, false), (true, true)];

fn check_query(g: &Graph, queried: &EdgeSet, e: usize) -> Result<()> {
    if e >= g.edge_count() {
        return Err(Error::UnknownEdge(format!("index {e}")));
    }
    if queried.contains(e) {
        return Err(Error::Policy(format!(
            "strategy queries edge `{}` twice",
            g.edge(e).id
        )));
    }
    Ok(())
}

/// Walks every branch of the strategy's tree, calling `leaf` with the trace
/// of each leaf. Stops early and returns false as soon as `leaf` does.
pub fn explore(
    t: &BoundStrategy,
    g: &Graph,
    leaf: &mut dyn FnMut(&[Step]) -> bool,
) -> Result<bool> {
    Error::guard("edges for tree exploration", g.edge_count(), CONTINUATION_EDGES)?;
    fn rec(
        cur: &mut Box<dyn Cursor>,
        g: &Graph,
        steps: &mut Vec<Step>,
        queried: &mut EdgeSet,
        leaf: &mut dyn FnMut(&[Step]) -> bool,
    ) -> Result<bool> {
        let mv = cur.next_move(&Ctx {
            g,
            queried,
            steps,
        });
        let Move::Query(e, side) = mv else {
            return Ok(leaf(steps));
        };
        check_query(g, queried, e)?;
        queried.insert(e);
        for (c1, c2) in OUTCOMES {
            let mut branch = cur.clone();
            steps.push(Step { edge: e, side, c1, c2 });
            let ok = rec(&mut branch, g, steps, queried, leaf)?;
            steps.pop();
            if !ok {
                queried.remove(e);
                return Ok(false);
            }
        }
        queried.remove(e);
        Ok(true)
    }
    let mut cur = t.cursor(g);
    rec(
        &mut cur,
        g,
        &mut Vec::new(),
        &mut EdgeSet::empty(g.edge_count()),
        leaf,
    )
}

/// Whether `t2` continues `t1`: on every configuration pair the trace of
/// `t1` is a prefix of the trace of `t2`, with the same decisions.
pub fn verify_continuation(t1: &BoundStrategy, t2: &BoundStrategy, g: &Graph) -> Result<bool> {
    Error::guard("edges for a continuation check", g.edge_count(), CONTINUATION_EDGES)?;
    fn rec(
        a: &mut Box<dyn Cursor>,
        b: &mut Box<dyn Cursor>,
        g: &Graph,
        steps: &mut Vec<Step>,
        queried: &mut EdgeSet,
    ) -> Result<bool> {
        let ctx = Ctx {
            g,
            queried,
            steps,
        };
        let (ma, mb) = (a.next_move(&ctx), b.next_move(&ctx));
        let Move::Query(e, side) = ma else {
            return Ok(true);
        };
        if ma != mb {
            return Ok(false);
        }
        check_query(g, queried, e)?;
        queried.insert(e);
        let mut ok = true;
        for (c1, c2) in OUTCOMES {
            let (mut a2, mut b2) = (a.clone(), b.clone());
            steps.push(Step { edge: e, side, c1, c2 });
            ok = rec(&mut a2, &mut b2, g, steps, queried)?;
            steps.pop();
            if !ok {
                break;
            }
        }
        queried.remove(e);
        Ok(ok)
    }
    rec(
        &mut t1.cursor(g),
        &mut t2.cursor(g),
        g,
        &mut Vec::new(),
        &mut EdgeSet::empty(g.edge_count()),
    )
}

/// Runs the strategy on every configuration pair and checks that runs whose
/// traces agree so far always make the same next move.
pub fn verify_adapted(t: &BoundStrategy, g: &Graph) -> Result<bool> {
    let m = g.edge_count();
    Error::guard("edges for an adaptedness check", m, ADAPTED_EDGES)?;
    let mut next: HashMap<Vec<Step>, Move> = HashMap::new();
    for c1 in 0..1u64 << m {
        for c2 in 0..1u64 << m {
            let tr = t.run(g, &Configuration::from_mask(m, c1), &Configuration::from_mask(m, c2))?;
            for k in 0..=tr.steps.len() {
                let mv = tr
                    .steps
                    .get(k)
                    .map_or(Move::Stop, |s| Move::Query(s.edge, s.side));
                let prev = *next.entry(tr.steps[..k].to_vec()).or_insert(mv);
                if prev != mv {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Whether every node of the tree sends its edge to `S`.
pub fn sends_all_to_s(t: &BoundStrategy, g: &Graph) -> Result<bool> {
    explore(t, g, &mut |steps| steps.iter().all(|s| s.side == Side::S))
}

/// Whether the edges revealed on every branch of `t` settle the event `a`
/// for the first configuration.
pub fn decides(t: &BoundStrategy, a: &BoundEvent, g: &Graph) -> Result<bool> {
    let m = g.edge_count();
    let full = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let table = a.truth_table(g)?;
    let mono = a.monotonicity(g);
    let mut memo: HashMap<(u64, u64), bool> = HashMap::new();
    explore(t, g, &mut |steps| {
        let mut known = 0u64;
        let mut value = 0u64;
        for s in steps {
            known |= 1 << s.edge;
            if s.c1 {
                value |= 1 << s.edge;
            }
        }
        *memo.entry((known, value)).or_insert_with(|| {
            let free = full & !known;
            match mono {
                Monotonicity::Increasing | Monotonicity::Decreasing => {
                    table[value as usize] == table[(value | free) as usize]
                }
                Monotonicity::None => {
                    let first = table[value as usize];
                    let mut sub = free;
                    loop {
                        if table[(value | sub) as usize] != first {
                            return false;
                        }
                        if sub == 0 {
                            return true;
                        }
                        sub = (sub - 1) & free;
                    }
                }
            }
        })
    })
}

/// Upward closure of a truth table over `n` edges.
pub(crate) fn up_closure(table: &[bool], n: usize) -> Vec<bool> {
    let mut up = table.to_vec();
    for i in 0..n {
        for m in 0..up.len() {
            if m >> i & 1 == 1 && up[m ^ (1 << i)] {
                up[m] = true;
            }
        }
    }
    up
}

/// Downward closure of a truth table over `n` edges.
pub(crate) fn down_closure(table: &[bool], n: usize) -> Vec<bool> {
    let mut down = table.to_vec();
    for i in 0..n {
        for m in (0..down.len()).rev() {
            if m >> i & 1 == 0 && down[m | (1 << i)] {
                down[m] = true;
            }
        }
    }
    down
}

/// If `b` is the intersection of `a` with some increasing or decreasing
/// event, returns that direction.
pub fn is_intersection_with_monotone(
    a: &BoundEvent,
    b: &BoundEvent,
    g: &Graph,
) -> Result<Option<Monotonicity>> {
    let ta = a.truth_table(g)?;
    let tb = b.truth_table(g)?;
    if tb.iter().zip(&ta).any(|(&y, &x)| y && !x) {
        return Ok(None);
    }
    let n = g.edge_count();
    // b = a ∩ M for monotone M exactly when b = a ∩ closure(b)
    let same = |closure: Vec<bool>| {
        (0..ta.len()).all(|m| tb[m] == (ta[m] && closure[m]))
    };
    Ok(if same(up_closure(&tb, n)) {
        Some(Monotonicity::Increasing)
    } else if same(down_closure(&tb, n)) {
        Some(Monotonicity::Decreasing)
    } else {
        None
    })
}
