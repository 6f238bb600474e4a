use super::{BoundStrategy, Ctx, Decision, DfsPlan, Move, Order, PolicyFn, Side, StrategyOf};
use crate::graph::Graph;
use std::collections::VecDeque;
use std::sync::Arc;

/// The running state of a strategy. A cursor only ever sees the graph, the
/// set of revealed edges and the trace so far, so every strategy is adapted
/// by construction.
pub trait Cursor: Send {
    fn next_move(&mut self, ctx: &Ctx<'_>) -> Move;
    fn clone_box(&self) -> Box<dyn Cursor>;
}

impl Clone for Box<dyn Cursor> {
    fn clone(&self) -> Self {
        self.clone_box()
    }
}

pub(super) fn make(t: &BoundStrategy, g: &Graph) -> Box<dyn Cursor> {
    match t {
        StrategyOf::Stop => Box::new(StopCursor),
        StrategyOf::Fixed(xs) => Box::new(FixedCursor {
            items: xs.clone(),
            at: 0,
        }),
        StrategyOf::Rest(side) => Box::new(RestCursor { side: *side, at: 0 }),
        StrategyOf::Bfs(root) => Box::new(BfsCursor::new(*root, g)),
        StrategyOf::Dfs(plan) => Box::new(DfsCursor::new(plan.clone(), g)),
        StrategyOf::Seq(parts) => Box::new(SeqCursor {
            parts: parts.iter().map(|p| make(p, g)).collect(),
            at: 0,
        }),
        StrategyOf::Policy(f) => Box::new(PolicyCursor(f.clone())),
    }
}

#[derive(Clone)]
struct StopCursor;

impl Cursor for StopCursor {
    fn next_move(&mut self, _: &Ctx<'_>) -> Move {
        Move::Stop
    }
    fn clone_box(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }
}

#[derive(Clone)]
struct FixedCursor {
    items: Vec<(usize, Side)>,
    at: usize,
}

impl Cursor for FixedCursor {
    fn next_move(&mut self, _: &Ctx<'_>) -> Move {
        match self.items.get(self.at) {
            Some(&(e, side)) => {
                self.at += 1;
                Move::Query(e, side)
            }
            None => Move::Stop,
        }
    }
    fn clone_box(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }
}

#[derive(Clone)]
struct RestCursor {
    side: Side,
    at: usize,
}

impl Cursor for RestCursor {
    fn next_move(&mut self, ctx: &Ctx<'_>) -> Move {
        while self.at < ctx.g.edge_count() {
            let e = self.at;
            self.at += 1;
            if !ctx.queried.contains(e) {
                return Move::Query(e, self.side);
            }
        }
        Move::Stop
    }
    fn clone_box(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }
}

#[derive(Clone)]
struct PolicyCursor(Arc<PolicyFn>);

impl Cursor for PolicyCursor {
    fn next_move(&mut self, ctx: &Ctx<'_>) -> Move {
        (self.0)(ctx.g, ctx.steps)
    }
    fn clone_box(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }
}

struct SeqCursor {
    parts: Vec<Box<dyn Cursor>>,
    at: usize,
}

impl Cursor for SeqCursor {
    fn next_move(&mut self, ctx: &Ctx<'_>) -> Move {
        while self.at < self.parts.len() {
            match self.parts[self.at].next_move(ctx) {
                Move::Stop => self.at += 1,
                mv => return mv,
            }
        }
        Move::Stop
    }
    fn clone_box(&self) -> Box<dyn Cursor> {
        Box::new(SeqCursor {
            parts: self.parts.clone(),
            at: self.at,
        })
    }
}

/// Result of this cursor's last query, read back from the trace.
fn last_open(ctx: &Ctx<'_>, e: usize) -> bool {
    let step = ctx.steps.last().expect("pending query must be on the trace");
    debug_assert_eq!(step.edge, e);
    step.c1
}

#[derive(Clone)]
struct BfsCursor {
    visited: Vec<bool>,
    queue: VecDeque<usize>,
    current: Option<(usize, usize)>,
    pending: Option<usize>,
}

impl BfsCursor {
    fn new(root: usize, g: &Graph) -> Self {
        let mut visited = vec![false; g.vertex_count()];
        visited[root] = true;
        BfsCursor {
            visited,
            queue: VecDeque::from([root]),
            current: None,
            pending: None,
        }
    }
}

impl Cursor for BfsCursor {
    fn next_move(&mut self, ctx: &Ctx<'_>) -> Move {
        if let Some(e) = self.pending.take() {
            if last_open(ctx, e) {
                let (v, _) = self.current.expect("query came from a current vertex");
                let u = ctx.g.edge(e).other(v);
                if !self.visited[u] {
                    self.visited[u] = true;
                    self.queue.push_back(u);
                }
            }
        }
        loop {
            if self.current.is_none() {
                match self.queue.pop_front() {
                    Some(v) => self.current = Some((v, 0)),
                    None => return Move::Stop,
                }
            }
            let (v, i) = self.current.unwrap();
            let inc = ctx.g.incident(v);
            if i >= inc.len() {
                self.current = None;
                continue;
            }
            self.current = Some((v, i + 1));
            let e = inc[i];
            if !ctx.queried.contains(e) {
                self.pending = Some(e);
                return Move::Query(e, Side::S);
            }
        }
    }
    fn clone_box(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }
}

#[derive(Clone)]
struct Frame {
    v: usize,
    candidates: Vec<usize>,
    at: usize,
}

#[derive(Clone)]
struct DfsCursor {
    plan: DfsPlan<usize>,
    visited: Vec<bool>,
    frames: Vec<Frame>,
    started: bool,
    stopped: bool,
    pending: Option<usize>,
}

impl DfsCursor {
    fn new(plan: DfsPlan<usize>, g: &Graph) -> Self {
        DfsCursor {
            plan,
            visited: vec![false; g.vertex_count()],
            frames: Vec::new(),
            started: false,
            stopped: false,
            pending: None,
        }
    }

    fn side(&self) -> Side {
        let s = match &self.plan.decision {
            Decision::AlwaysS => true,
            Decision::AlwaysSbar => false,
            Decision::UntilVisited(t) => !self.visited[*t],
            Decision::UntilAny(ts) => !ts.iter().any(|&t| self.visited[t]),
        };
        if s {
            Side::S
        } else {
            Side::Sbar
        }
    }

    fn enter(&mut self, g: &Graph, v: usize, via: Option<usize>) {
        self.visited[v] = true;
        if self.plan.stop_at.contains(&v) {
            self.stopped = true;
            return;
        }
        self.frames.push(Frame {
            v,
            candidates: candidate_order(g, self.plan.order, v, via),
            at: 0,
        });
    }
}

/// Order in which the edges at `v` are examined after arriving along `via`
/// (`None` at the start vertex).
pub(crate) fn candidate_order(g: &Graph, order: Order, v: usize, via: Option<usize>) -> Vec<usize> {
    let rot = match order {
        Order::Id => return g.incident(v).to_vec(),
        _ => g.rotation(v).expect("hand rules require a rotation"),
    };
    let k = rot.len();
    // reference edge: the arrival edge, or at the start the edge along which
    // the outer face enters v
    let reference = via.or_else(|| {
        g.faces()
            .ok()
            .filter(|fs| fs.on_outer(v))
            .and_then(|fs| fs.outer_entry(g, v))
    });
    match (order, reference) {
        (Order::RightHand, Some(r)) => {
            let i = rot.iter().position(|&e| e == r).unwrap();
            (1..=k).map(|j| rot[(i + j) % k]).collect()
        }
        (Order::LeftHand, Some(r)) => {
            let i = rot.iter().position(|&e| e == r).unwrap();
            (0..k).map(|j| rot[(i + k - j) % k]).collect()
        }
        (Order::RightHand, None) => rot.to_vec(),
        (_, None) => (0..k).map(|j| rot[(k - j) % k]).collect(),
        (Order::Id, _) => unreachable!(),
    }
}

impl Cursor for DfsCursor {
    fn next_move(&mut self, ctx: &Ctx<'_>) -> Move {
        if self.stopped {
            return Move::Stop;
        }
        if !self.started {
            self.started = true;
            self.enter(ctx.g, self.plan.start, None);
        }
        if let Some(e) = self.pending.take() {
            if last_open(ctx, e) {
                let v = self.frames.last().expect("pending edge has a frame").v;
                let u = ctx.g.edge(e).other(v);
                if !self.visited[u] {
                    self.enter(ctx.g, u, Some(e));
                }
            }
        }
        while !self.stopped {
            let Some(top) = self.frames.last_mut() else {
                break;
            };
            if top.at >= top.candidates.len() {
                self.frames.pop();
                continue;
            }
            let e = top.candidates[top.at];
            top.at += 1;
            if !ctx.queried.contains(e) {
                self.pending = Some(e);
                return Move::Query(e, self.side());
            }
        }
        self.stopped = true;
        Move::Stop
    }
    fn clone_box(&self) -> Box<dyn Cursor> {
        Box::new(self.clone())
    }
}
