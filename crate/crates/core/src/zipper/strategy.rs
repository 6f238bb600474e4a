use super::{check_spaces, Cell, DualSpace, GeneralConfig};
use crate::bits::EdgeSet;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::tree::{BoundStrategy, Ctx, Cursor, Move, Side, Step};
use std::fmt;
use std::sync::Arc;

/// Most leaves [`gen_enumerate`] will visit.
pub const GEN_LEAF_LIMIT: usize = 1_000_000;

/// One generated edge: which space it came from and the symbol index drawn.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GenStep {
    pub edge: usize,
    pub choice: u8,
    pub symbol: usize,
}

/// Picks the next edge and its space from what has been generated so far;
/// `None` ends the tree.
pub type GenPolicyFn = dyn Fn(&Graph, &[DualSpace], &[GenStep]) -> Option<(usize, u8)> + Send + Sync;

#[derive(Clone)]
pub enum GenStrategy {
    /// Every edge from the same space, in index order.
    All(u8),
    /// Edge `e` from space `choices[e]`, in index order.
    PerEdge(Vec<u8>),
    /// Adaptive: the next edge and space are a hash of the seed and
    /// everything generated so far.
    Hashed(u64),
    /// Runs a set-building strategy: edges it sends to `S` come from space
    /// `on_s`, everything else from the other space. The cursor sees the
    /// first digit of a symbol as the `c1` bit and the second digit (or the
    /// first again) as the `c2` bit.
    Tree { tree: BoundStrategy, on_s: u8 },
    Policy(Arc<GenPolicyFn>),
}

impl fmt::Debug for GenStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenStrategy::All(c) => write!(f, "All({c})"),
            GenStrategy::PerEdge(cs) => write!(f, "PerEdge({cs:?})"),
            GenStrategy::Hashed(s) => write!(f, "Hashed({s})"),
            GenStrategy::Tree { tree, on_s } => write!(f, "Tree({tree:?}, S -> {on_s})"),
            GenStrategy::Policy(_) => write!(f, "Policy(..)"),
        }
    }
}

impl GenStrategy {
    pub fn policy(
        f: impl Fn(&Graph, &[DualSpace], &[GenStep]) -> Option<(usize, u8)> + Send + Sync + 'static,
    ) -> Self {
        GenStrategy::Policy(Arc::new(f))
    }

    fn cursor(&self, g: &Graph) -> Box<dyn GenCursor> {
        match self {
            GenStrategy::All(c) => Box::new(InOrder(vec![*c; g.edge_count()])),
            GenStrategy::PerEdge(cs) => Box::new(InOrder(cs.clone())),
            GenStrategy::Hashed(seed) => Box::new(HashedCursor(*seed)),
            GenStrategy::Tree { tree, on_s } => Box::new(TreeCursor {
                cur: tree.cursor(g),
                queried: EdgeSet::empty(g.edge_count()),
                steps: Vec::new(),
                pending: None,
                done: false,
                on_s: *on_s,
            }),
            GenStrategy::Policy(f) => Box::new(PolicyCursor(f.clone())),
        }
    }
}

trait GenCursor: Send {
    fn next(&mut self, g: &Graph, spaces: &[DualSpace], steps: &[GenStep]) -> Option<(usize, u8)>;
    fn clone_box(&self) -> Box<dyn GenCursor>;
}

impl Clone for Box<dyn GenCursor> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

#[derive(Clone)]
struct InOrder(Vec<u8>);

impl GenCursor for InOrder {
    fn next(&mut self, _: &Graph, _: &[DualSpace], steps: &[GenStep]) -> Option<(usize, u8)> {
        let e = steps.len();
        self.0.get(e).map(|&c| (e, c))
    }

    fn clone_box(&self) -> Box<dyn GenCursor> {
        Box::new(self.clone())
    }
}

fn splitmix(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

#[derive(Clone)]
struct HashedCursor(u64);

impl GenCursor for HashedCursor {
    fn next(&mut self, g: &Graph, _: &[DualSpace], steps: &[GenStep]) -> Option<(usize, u8)> {
        let mut h = splitmix(self.0);
        let mut done = vec![false; g.edge_count()];
        for s in steps {
            done[s.edge] = true;
            h = splitmix(h ^ (s.edge as u64) << 32 ^ (s.choice as u64) << 24 ^ s.symbol as u64);
        }
        let left: Vec<usize> = (0..done.len()).filter(|&e| !done[e]).collect();
        if left.is_empty() {
            return None;
        }
        let e = left[(h % left.len() as u64) as usize];
        Some((e, 1 + (h >> 40 & 1) as u8))
    }

    fn clone_box(&self) -> Box<dyn GenCursor> {
        Box::new(self.clone())
    }
}

#[derive(Clone)]
struct PolicyCursor(Arc<GenPolicyFn>);

impl GenCursor for PolicyCursor {
    fn next(&mut self, g: &Graph, spaces: &[DualSpace], steps: &[GenStep]) -> Option<(usize, u8)> {
        (self.0)(g, spaces, steps)
    }

    fn clone_box(&self) -> Box<dyn GenCursor> {
        Box::new(self.clone())
    }
}

struct TreeCursor {
    cur: Box<dyn Cursor>,
    queried: EdgeSet,
    steps: Vec<Step>,
    pending: Option<(usize, Side)>,
    done: bool,
    on_s: u8,
}

impl Clone for TreeCursor {
    fn clone(&self) -> Self {
        TreeCursor {
            cur: self.cur.clone(),
            queried: self.queried.clone(),
            steps: self.steps.clone(),
            pending: self.pending,
            done: self.done,
            on_s: self.on_s,
        }
    }
}

fn digit_bits(label: &str) -> (bool, bool) {
    let mut it = label.chars().map(|ch| ch != '0');
    let first = it.next().unwrap_or(false);
    (first, it.next().unwrap_or(first))
}

impl GenCursor for TreeCursor {
    fn next(&mut self, g: &Graph, spaces: &[DualSpace], steps: &[GenStep]) -> Option<(usize, u8)> {
        let off = 3 - self.on_s;
        if let Some((edge, side)) = self.pending.take() {
            let last = steps.last().expect("a pending query was generated");
            let label = &spaces[edge].space(last.choice).labels[last.symbol];
            let (c1, c2) = digit_bits(label);
            self.steps.push(Step { edge, side, c1, c2 });
        }
        if !self.done {
            let mv = self.cur.next_move(&Ctx {
                g,
                queried: &self.queried,
                steps: &self.steps,
            });
            match mv {
                Move::Query(e, side) => {
                    if e < g.edge_count() {
                        self.queried.insert(e);
                    }
                    self.pending = Some((e, side));
                    return Some((e, if side == Side::S { self.on_s } else { off }));
                }
                Move::Stop => self.done = true,
            }
        }
        let mut done = vec![false; g.edge_count()];
        for s in steps {
            done[s.edge] = true;
        }
        done.iter().position(|d| !d).map(|e| (e, off))
    }

    fn clone_box(&self) -> Box<dyn GenCursor> {
        Box::new(self.clone())
    }
}

/// Calls `f` with every leaf configuration of the tree and its probability.
/// Zero-probability symbols are skipped.
pub fn gen_fold(
    g: &Graph,
    spaces: &[DualSpace],
    t: &GenStrategy,
    f: &mut dyn FnMut(&GeneralConfig, f64),
) -> Result<()> {
    check_spaces(g, spaces)?;
    let m = g.edge_count();
    let support = |s: &super::Space| s.probs.iter().filter(|&&p| p > 0.0).count() as f64;
    let fewest: f64 = spaces
        .iter()
        .map(|ds| support(&ds.omega1).min(support(&ds.omega2)))
        .product();
    if fewest > GEN_LEAF_LIMIT as f64 {
        return Err(Error::SizeGuard {
            what: "generated configurations",
            actual: fewest.min(usize::MAX as f64) as usize,
            limit: GEN_LEAF_LIMIT,
        });
    }

    struct Walk<'a> {
        g: &'a Graph,
        spaces: &'a [DualSpace],
        cells: Vec<Cell>,
        steps: Vec<GenStep>,
        leaves: usize,
        f: &'a mut dyn FnMut(&GeneralConfig, f64),
    }

    impl Walk<'_> {
        fn rec(&mut self, cur: &mut Box<dyn GenCursor>, weight: f64) -> Result<()> {
            let m = self.g.edge_count();
            if self.steps.len() == m {
                self.leaves += 1;
                Error::guard("generated configurations", self.leaves, GEN_LEAF_LIMIT)?;
                (self.f)(&GeneralConfig(self.cells.clone()), weight);
                return Ok(());
            }
            let Some((e, choice)) = cur.next(self.g, self.spaces, &self.steps) else {
                let missing = (0..m).find(|&e| self.steps.iter().all(|s| s.edge != e)).unwrap_or(0);
                return Err(Error::Policy(format!(
                    "generalized strategy stops before generating edge `{}`",
                    self.g.edge(missing).id
                )));
            };
            if e >= m {
                return Err(Error::UnknownEdge(format!("index {e}")));
            }
            if self.steps.iter().any(|s| s.edge == e) {
                return Err(Error::Policy(format!(
                    "generalized strategy generates edge `{}` twice",
                    self.g.edge(e).id
                )));
            }
            if choice != 1 && choice != 2 {
                return Err(Error::Policy(format!("space choice {choice} is not 1 or 2")));
            }
            let space = self.spaces[e].space(choice);
            for (symbol, &p) in space.probs.iter().enumerate() {
                if p == 0.0 {
                    continue;
                }
                let mut branch = cur.clone();
                self.steps.push(GenStep { edge: e, choice, symbol });
                self.cells[e] = Cell { choice, symbol };
                let r = self.rec(&mut branch, weight * p);
                self.steps.pop();
                r?;
            }
            Ok(())
        }
    }

    let mut walk = Walk {
        g,
        spaces,
        cells: vec![Cell { choice: 1, symbol: 0 }; m],
        steps: Vec::with_capacity(m),
        leaves: 0,
        f,
    };
    walk.rec(&mut t.cursor(g), 1.0)
}

/// The exact law of the configuration the tree builds.
pub fn gen_enumerate(
    g: &Graph,
    spaces: &[DualSpace],
    t: &GenStrategy,
) -> Result<Vec<(GeneralConfig, f64)>> {
    let mut out = Vec::new();
    gen_fold(g, spaces, t, &mut |c, w| out.push((c.clone(), w)))?;
    Ok(out)
}
