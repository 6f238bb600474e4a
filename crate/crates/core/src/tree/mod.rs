//! Adaptive edge-revealing strategies that build a set `S` from a pair of
//! configurations, and the splice of two configurations along `S`.

mod cursor;
mod spec;
mod verify;

pub use cursor::Cursor;
pub use spec::parse_strategy;
pub use verify::{
    decides, explore, is_intersection_with_monotone, sends_all_to_s, verify_adapted,
    verify_continuation, ADAPTED_EDGES, CONTINUATION_EDGES,
};

use crate::bits::{Configuration, EdgeSet};
use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::Serialize;
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Side {
    S,
    Sbar,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Stop,
    Query(usize, Side),
}

/// One revealed edge: where it was sent and its state in both configurations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Step {
    pub edge: usize,
    pub side: Side,
    pub c1: bool,
    pub c2: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunTrace {
    pub steps: Vec<Step>,
    /// Edges sent to `S`; everything else, queried or not, is in the complement.
    pub s: EdgeSet,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Order {
    /// Incident edges by index.
    Id,
    /// Clockwise from just after the arrival edge.
    RightHand,
    /// Counterclockwise from just before the arrival edge.
    LeftHand,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Decision<V> {
    AlwaysS,
    AlwaysSbar,
    /// `S` until the vertex has been reached, then the complement.
    UntilVisited(V),
    /// `S` until any of the vertices has been reached.
    UntilAny(Vec<V>),
}

/// Depth-first search that crosses only edges open in the first
/// configuration. Every candidate edge not yet revealed by any earlier phase
/// is queried, open or not; already revealed edges are skipped and not
/// crossed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfsPlan<V> {
    pub start: V,
    pub order: Order,
    pub decision: Decision<V>,
    /// Stop the search as soon as one of these vertices is reached.
    pub stop_at: Vec<V>,
}

pub type PolicyFn = dyn Fn(&Graph, &[Step]) -> Move + Send + Sync;

/// A deterministic revealing policy. `V` is a vertex or edge reference:
/// names in [`Strategy`], indices once bound to a graph.
#[derive(Clone)]
pub enum StrategyOf<V> {
    /// Reveals nothing.
    Stop,
    /// Queries the listed edges in order, then stops.
    Fixed(Vec<(V, Side)>),
    /// Queries every not yet revealed edge in index order.
    Rest(Side),
    /// Reveals every edge touching the open cluster of the root, breadth
    /// first, all into `S`.
    Bfs(V),
    Dfs(DfsPlan<V>),
    /// Runs each part after the previous one stops; parts share the set of
    /// revealed edges.
    Seq(Vec<StrategyOf<V>>),
    /// Arbitrary adapted policy.
    Policy(Arc<PolicyFn>),
}

pub type Strategy = StrategyOf<String>;
pub type BoundStrategy = StrategyOf<usize>;

impl<V: fmt::Debug> fmt::Debug for StrategyOf<V> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyOf::Stop => write!(f, "Stop"),
            StrategyOf::Fixed(xs) => f.debug_tuple("Fixed").field(xs).finish(),
            StrategyOf::Rest(s) => f.debug_tuple("Rest").field(s).finish(),
            StrategyOf::Bfs(v) => f.debug_tuple("Bfs").field(v).finish(),
            StrategyOf::Dfs(p) => f.debug_tuple("Dfs").field(p).finish(),
            StrategyOf::Seq(xs) => f.debug_tuple("Seq").field(xs).finish(),
            StrategyOf::Policy(_) => write!(f, "Policy(..)"),
        }
    }
}

impl Strategy {
    pub fn policy(f: impl Fn(&Graph, &[Step]) -> Move + Send + Sync + 'static) -> Self {
        StrategyOf::Policy(Arc::new(f))
    }

    pub fn bfs(root: &str) -> Self {
        StrategyOf::Bfs(root.into())
    }

    pub fn dfs(start: &str, order: Order, decision: Decision<String>) -> Self {
        StrategyOf::Dfs(DfsPlan {
            start: start.into(),
            order,
            decision,
            stop_at: Vec::new(),
        })
    }

    /// `k` successive right-hand walks from `a`, each stopping on reaching
    /// `b` and avoiding edges revealed by the earlier walks; all into `S`.
    pub fn rhw_walks(a: &str, b: &str, k: usize) -> Self {
        StrategyOf::Seq(
            (0..k)
                .map(|_| {
                    StrategyOf::Dfs(DfsPlan {
                        start: a.into(),
                        order: Order::RightHand,
                        decision: Decision::AlwaysS,
                        stop_at: vec![b.into()],
                    })
                })
                .collect(),
        )
    }

    /// Depth-first search from `a` into `S`, stopping once any target is reached.
    pub fn dfs_stop_at(a: &str, targets: &[&str]) -> Self {
        StrategyOf::Dfs(DfsPlan {
            start: a.into(),
            order: Order::Id,
            decision: Decision::AlwaysS,
            stop_at: targets.iter().map(|t| t.to_string()).collect(),
        })
    }

    /// Resolves names against `g` and checks embedding requirements.
    pub fn bind(&self, g: &Graph) -> Result<BoundStrategy> {
        let v = |name: &String| g.vertex(name);
        Ok(match self {
            StrategyOf::Stop => StrategyOf::Stop,
            StrategyOf::Fixed(xs) => StrategyOf::Fixed(
                xs.iter()
                    .map(|(e, side)| Ok((g.edge_by_id(e)?, *side)))
                    .collect::<Result<_>>()?,
            ),
            StrategyOf::Rest(side) => StrategyOf::Rest(*side),
            StrategyOf::Bfs(r) => StrategyOf::Bfs(v(r)?),
            StrategyOf::Dfs(p) => {
                if p.order != Order::Id && !g.has_rotation() {
                    return Err(Error::MissingRotation);
                }
                StrategyOf::Dfs(DfsPlan {
                    start: v(&p.start)?,
                    order: p.order,
                    decision: match &p.decision {
                        Decision::AlwaysS => Decision::AlwaysS,
                        Decision::AlwaysSbar => Decision::AlwaysSbar,
                        Decision::UntilVisited(t) => Decision::UntilVisited(v(t)?),
                        Decision::UntilAny(ts) => {
                            Decision::UntilAny(ts.iter().map(v).collect::<Result<_>>()?)
                        }
                    },
                    stop_at: p.stop_at.iter().map(v).collect::<Result<_>>()?,
                })
            }
            StrategyOf::Seq(xs) => {
                StrategyOf::Seq(xs.iter().map(|x| x.bind(g)).collect::<Result<_>>()?)
            }
            StrategyOf::Policy(f) => StrategyOf::Policy(f.clone()),
        })
    }
}

/// Read-only view a cursor gets when asked for its next move.
pub struct Ctx<'a> {
    pub g: &'a Graph,
    pub queried: &'a EdgeSet,
    pub steps: &'a [Step],
}

impl BoundStrategy {
    pub fn cursor(&self, g: &Graph) -> Box<dyn Cursor> {
        cursor::make(self, g)
    }

    /// Builds `S` from a configuration pair.
    pub fn run(&self, g: &Graph, c1: &Configuration, c2: &Configuration) -> Result<RunTrace> {
        g.check_config(c1)?;
        g.check_config(c2)?;
        let m = g.edge_count();
        let mut cur = self.cursor(g);
        let mut queried = EdgeSet::empty(m);
        let mut s = EdgeSet::empty(m);
        let mut steps = Vec::new();
        loop {
            let mv = cur.next_move(&Ctx {
                g,
                queried: &queried,
                steps: &steps,
            });
            match mv {
                Move::Stop => break,
                Move::Query(e, side) => {
                    if e >= m {
                        return Err(Error::UnknownEdge(format!("index {e}")));
                    }
                    if queried.contains(e) {
                        return Err(Error::Policy(format!(
                            "strategy queries edge `{}` twice",
                            g.edge(e).id
                        )));
                    }
                    queried.insert(e);
                    if side == Side::S {
                        s.insert(e);
                    }
                    steps.push(Step {
                        edge: e,
                        side,
                        c1: c1.is_open(e),
                        c2: c2.is_open(e),
                    });
                }
            }
        }
        Ok(RunTrace { steps, s })
    }
}

/// The configuration equal to `c1` on `s` and to `c2` elsewhere.
pub fn splice(c1: &Configuration, c2: &Configuration, s: &EdgeSet) -> Result<Configuration> {
    for got in [c2.len(), s.len()] {
        if got != c1.len() {
            return Err(Error::IndexMismatch {
                expected: c1.len(),
                got,
            });
        }
    }
    let inside = c1.open_edges().intersection(s);
    let outside = c2.open_edges().difference(s);
    Ok(Configuration::from_open(inside.union(&outside)))
}

/// Mask form of [`splice`].
#[inline]
pub fn splice_mask(c1: u64, c2: u64, s: u64) -> u64 {
    (c1 & s) | (c2 & !s)
}
