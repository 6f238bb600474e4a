use super::EventExpr;
use crate::bits::{Configuration, EdgeSet};
use crate::error::{Error, Result};
use crate::flow::edge_disjoint_paths;
use crate::graph::{Graph, UnionFind};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Monotonicity {
    Increasing,
    Decreasing,
    None,
}

impl Monotonicity {
    fn flip(self) -> Self {
        match self {
            Monotonicity::Increasing => Monotonicity::Decreasing,
            Monotonicity::Decreasing => Monotonicity::Increasing,
            Monotonicity::None => Monotonicity::None,
        }
    }
}

/// Largest graph on which monotonicity is settled by checking every
/// configuration.
pub const BRUTE_FORCE_EDGES: usize = 16;

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Partition(Vec<Vec<usize>>),
    NPaths(usize, usize, usize),
    Union(Vec<Node>),
    Intersect(Vec<Node>),
    Not(Box<Node>),
}

/// An event with vertex names resolved against one graph.
#[derive(Clone, Debug)]
pub struct BoundEvent {
    expr: EventExpr,
    root: Node,
    needs_clusters: bool,
}

impl EventExpr {
    pub fn bind(&self, g: &Graph) -> Result<BoundEvent> {
        fn go(e: &EventExpr, g: &Graph, clusters: &mut bool) -> Result<Node> {
            Ok(match e {
                EventExpr::Partition(groups) => {
                    *clusters = true;
                    Node::Partition(
                        groups
                            .iter()
                            .map(|grp| grp.iter().map(|v| g.vertex(v)).collect())
                            .collect::<Result<_>>()?,
                    )
                }
                EventExpr::NPaths(u, v, n) => {
                    if *n == 0 {
                        return Err(Error::InvalidParam("npaths count must be at least 1".into()));
                    }
                    Node::NPaths(g.vertex(u)?, g.vertex(v)?, *n)
                }
                EventExpr::Union(xs) => {
                    Node::Union(xs.iter().map(|x| go(x, g, clusters)).collect::<Result<_>>()?)
                }
                EventExpr::Intersect(xs) => Node::Intersect(
                    xs.iter().map(|x| go(x, g, clusters)).collect::<Result<_>>()?,
                ),
                EventExpr::Not(x) => Node::Not(Box::new(go(x, g, clusters)?)),
            })
        }
        let mut needs_clusters = false;
        let root = go(self, g, &mut needs_clusters)?;
        Ok(BoundEvent {
            expr: self.clone(),
            root,
            needs_clusters,
        })
    }

    /// Direction read off the syntax alone.
    pub fn monotonicity(&self) -> Monotonicity {
        match self {
            EventExpr::Partition(groups) => {
                if groups.len() == 1 {
                    Monotonicity::Increasing
                } else if groups.iter().all(|g| g.len() == 1) {
                    Monotonicity::Decreasing
                } else {
                    Monotonicity::None
                }
            }
            EventExpr::NPaths(..) => Monotonicity::Increasing,
            EventExpr::Union(xs) | EventExpr::Intersect(xs) => {
                let first = xs.first().map_or(Monotonicity::None, |x| x.monotonicity());
                if xs.iter().all(|x| x.monotonicity() == first) {
                    first
                } else {
                    Monotonicity::None
                }
            }
            EventExpr::Not(x) => x.monotonicity().flip(),
        }
    }
}

fn cluster_labels(g: &Graph, open: &EdgeSet) -> Vec<usize> {
    let mut uf = UnionFind::new(g.vertex_count());
    for e in open.iter() {
        let edge = g.edge(e);
        uf.union(edge.u, edge.v);
    }
    (0..g.vertex_count()).map(|v| uf.find(v)).collect()
}

impl BoundEvent {
    pub fn expr(&self) -> &EventExpr {
        &self.expr
    }

    pub fn eval(&self, g: &Graph, c: &Configuration) -> Result<bool> {
        g.check_config(c)?;
        Ok(self.eval_open(g, c.open_edges()))
    }

    /// Evaluates on the configuration whose open edges are `open`.
    pub fn eval_open(&self, g: &Graph, open: &EdgeSet) -> bool {
        let labels = if self.needs_clusters {
            cluster_labels(g, open)
        } else {
            Vec::new()
        };
        eval_node(&self.root, g, open, &labels)
    }

    pub fn eval_mask(&self, g: &Graph, mask: u64) -> bool {
        self.eval_open(g, &EdgeSet::from_mask(g.edge_count(), mask))
    }

    /// Indicator of the event for every configuration of a graph with at
    /// most 24 edges, indexed by open-edge mask.
    pub fn truth_table(&self, g: &Graph) -> Result<Vec<bool>> {
        Error::guard("edges for a truth table", g.edge_count(), 24)?;
        use rayon::prelude::*;
        let n = g.edge_count();
        Ok((0..1u64 << n)
            .into_par_iter()
            .map(|m| self.eval_mask(g, m))
            .collect())
    }

    /// Syntactic direction, settled by brute force over all configurations
    /// when the syntax is inconclusive and the graph is small enough.
    pub fn monotonicity(&self, g: &Graph) -> Monotonicity {
        let syntactic = self.expr.monotonicity();
        if syntactic != Monotonicity::None || g.edge_count() > BRUTE_FORCE_EDGES {
            return syntactic;
        }
        self.brute_force_monotonicity(g)
    }

    pub fn brute_force_monotonicity(&self, g: &Graph) -> Monotonicity {
        let n = g.edge_count();
        assert!(n <= BRUTE_FORCE_EDGES);
        let table: Vec<bool> = (0..1u64 << n).map(|m| self.eval_mask(g, m)).collect();
        let (mut up, mut down) = (true, true);
        for m in 0..1usize << n {
            for e in 0..n {
                if m & (1 << e) == 0 {
                    let (lo, hi) = (table[m], table[m | 1 << e]);
                    up &= !lo || hi;
                    down &= lo || !hi;
                }
            }
        }
        match (up, down) {
            (true, _) => Monotonicity::Increasing,
            (false, true) => Monotonicity::Decreasing,
            _ => Monotonicity::None,
        }
    }

    /// Errors unless the event is increasing on `g`.
    pub fn require_increasing(&self, g: &Graph) -> Result<()> {
        if self.monotonicity(g) == Monotonicity::Increasing {
            Ok(())
        } else {
            Err(Error::NotIncreasing(self.expr.to_string()))
        }
    }
}

fn eval_node(node: &Node, g: &Graph, open: &EdgeSet, labels: &[usize]) -> bool {
    match node {
        Node::Partition(groups) => {
            let mut reps = Vec::with_capacity(groups.len());
            for grp in groups {
                let l = labels[grp[0]];
                if grp[1..].iter().any(|&v| labels[v] != l) {
                    return false;
                }
                if reps.contains(&l) {
                    return false;
                }
                reps.push(l);
            }
            true
        }
        Node::NPaths(u, v, n) => edge_disjoint_paths(g, |e| open.contains(e), *u, *v, *n) >= *n,
        Node::Union(xs) => xs.iter().any(|x| eval_node(x, g, open, labels)),
        Node::Intersect(xs) => xs.iter().all(|x| eval_node(x, g, open, labels)),
        Node::Not(x) => !eval_node(x, g, open, labels),
    }
}
