//! Exact probabilities by enumerating every configuration, or every pair of
//! configurations, of a small graph.
//!
//! Sums use compensated addition over fixed index chunks that are combined
//! in order, so results do not depend on the number of threads.

use crate::error::{Error, Result};
use crate::event::{BoundEvent, EventExpr};
use crate::graph::Graph;
use crate::tree::{splice_mask, BoundStrategy};
use crate::bits::Configuration;
use rayon::prelude::*;
use serde::Serialize;

/// Size caps and the verdict tolerance shared by the exact checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Limits {
    /// Most edges for single-configuration enumeration.
    pub exact_edges: usize,
    /// Most edges for configuration-pair enumeration.
    pub pair_edges: usize,
    /// Most edges for the joint-law check of spliced pairs.
    pub splice_edges: usize,
    pub tolerance: f64,
}

pub const TOLERANCE: f64 = 1e-12;

impl Default for Limits {
    fn default() -> Self {
        Limits {
            exact_edges: 24,
            pair_edges: 12,
            splice_edges: 10,
            tolerance: TOLERANCE,
        }
    }
}

/// Neumaier's compensated sum.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const CHUNK_BITS: u32 = 10;

/// Sums `f(i)` for `i < 2^bits` per output slot, in fixed chunks.
fn chunked_sums(bits: usize, slots: usize, f: impl Fn(u64, &mut [f64]) + Sync) -> Vec<f64> {
    let total = 1u64 << bits;
    let chunk = 1u64 << CHUNK_BITS.min(bits as u32);
    let parts: Vec<Vec<CompensatedSum>> = (0..total / chunk)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![CompensatedSum::default(); slots];
            let mut buf = vec![0.0; slots];
            for i in c * chunk..(c + 1) * chunk {
                buf.iter_mut().for_each(|x| *x = 0.0);
                f(i, &mut buf);
                for (a, &x) in acc.iter_mut().zip(&buf) {
                    if x != 0.0 {
                        a.add(x);
                    }
                }
            }
            acc
        })
        .collect();
    let mut out = vec![CompensatedSum::default(); slots];
    for part in parts {
        for (o, p) in out.iter_mut().zip(part) {
            o.add(p.value());
        }
    }
    out.iter().map(|s| s.value()).collect()
}

/// Product-measure weight of each configuration mask, from two half tables.
pub struct Weights {
    low_bits: usize,
    low: Vec<f64>,
    high: Vec<f64>,
}

impl Weights {
    pub fn new(g: &Graph) -> Self {
        let m = g.edge_count();
        let low_bits = m / 2;
        let table = |edges: std::ops::Range<usize>| -> Vec<f64> {
            let k = edges.len();
            (0..1u64 << k)
                .map(|mask| {
                    edges
                        .clone()
                        .enumerate()
                        .map(|(i, e)| {
                            let p = g.prob(e);
                            if mask >> i & 1 == 1 {
                                p
                            } else {
                                1.0 - p
                            }
                        })
                        .product()
                })
                .collect()
        };
        Weights {
            low_bits,
            low: table(0..low_bits),
            high: table(low_bits..m),
        }
    }

    #[inline]
    pub fn get(&self, mask: u64) -> f64 {
        self.low[(mask & ((1 << self.low_bits) - 1)) as usize] * self.high[(mask >> self.low_bits) as usize]
    }
}

/// Query on a configuration pair and the set `S` built from it.
#[derive(Clone, Copy, Debug)]
pub enum PairQuery<'a> {
    /// `A` on the first configuration and `B` on the splice.
    Joint(&'a BoundEvent, &'a BoundEvent),
    /// `A` and `B` occur with witnesses overlapping only outside `S`.
    SqS(&'a BoundEvent, &'a BoundEvent),
}

/// Truth tables of the events a pair query needs, by mask.
pub(crate) struct PairTables {
    tables: Vec<(bool, Vec<bool>, Vec<bool>)>,
}

impl PairTables {
    pub(crate) fn new(g: &Graph, queries: &[PairQuery<'_>]) -> Result<Self> {
        let tables = queries
            .iter()
            .map(|q| {
                Ok(match q {
                    PairQuery::Joint(a, b) => (false, a.truth_table(g)?, b.truth_table(g)?),
                    PairQuery::SqS(a, b) => {
                        a.require_increasing(g)?;
                        b.require_increasing(g)?;
                        (true, a.truth_table(g)?, b.truth_table(g)?)
                    }
                })
            })
            .collect::<Result<_>>()?;
        Ok(PairTables { tables })
    }

    /// Indicator of query `k` on the pair `(c1, c2)` with tree-built set `s`.
    #[inline]
    pub(crate) fn hit(&self, k: usize, c1: u64, c2: u64, s: u64) -> bool {
        let (sq, ta, tb) = &self.tables[k];
        if !sq {
            return ta[c1 as usize] && tb[splice_mask(c1, c2, s) as usize];
        }
        let x = c1 & s;
        let base_a = c1 & !s;
        let base_b = c2 & !s;
        let mut w = x;
        loop {
            if ta[(w | base_a) as usize] && tb[((x ^ w) | base_b) as usize] {
                return true;
            }
            if w == 0 {
                return false;
            }
            w = (w - 1) & x;
        }
    }

    pub(crate) fn len(&self) -> usize {
        self.tables.len()
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExactEngine {
    pub limits: Limits,
}

impl ExactEngine {
    pub fn new(limits: Limits) -> Self {
        ExactEngine { limits }
    }

    /// Probabilities of several events in one pass over the configurations.
    pub fn probs(&self, g: &Graph, events: &[&BoundEvent]) -> Result<Vec<f64>> {
        let m = g.edge_count();
        Error::guard("edges for exact enumeration", m, self.limits.exact_edges)?;
        let w = Weights::new(g);
        Ok(chunked_sums(m, events.len(), |mask, out| {
            let wt = w.get(mask);
            if wt == 0.0 {
                return;
            }
            for (o, e) in out.iter_mut().zip(events) {
                if e.eval_mask(g, mask) {
                    *o = wt;
                }
            }
        }))
    }

    pub fn prob(&self, g: &Graph, e: &BoundEvent) -> Result<f64> {
        Ok(self.probs(g, &[e])?[0])
    }

    /// Probability that at least `n` edge-disjoint open paths join `u` and `v`.
    pub fn npaths(&self, g: &Graph, u: &str, v: &str, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::InvalidParam("npaths count must be at least 1".into()));
        }
        let e = EventExpr::NPaths(u.into(), v.into(), n).bind(g)?;
        self.prob(g, &e)
    }

    /// Pair probabilities for several queries, sharing one strategy run per pair.
    pub fn pairs(&self, g: &Graph, t: &BoundStrategy, queries: &[PairQuery<'_>]) -> Result<Vec<f64>> {
        let m = g.edge_count();
        Error::guard("edges for pair enumeration", m, self.limits.pair_edges)?;
        let tables = PairTables::new(g, queries)?;
        let w = Weights::new(g);
        // surface strategy errors before the parallel sweep
        let zero = Configuration::all_closed(m);
        t.run(g, &zero, &zero)?;
        let failed = std::sync::Mutex::new(None);
        let sums = chunked_sums(2 * m, tables.len(), |idx, out| {
            let (c1, c2) = (idx >> m, idx & ((1u64 << m) - 1));
            let wt = w.get(c1) * w.get(c2);
            if wt == 0.0 {
                return;
            }
            let s = match t.run(g, &Configuration::from_mask(m, c1), &Configuration::from_mask(m, c2)) {
                Ok(tr) => tr.s.to_mask(),
                Err(e) => {
                    failed.lock().unwrap().get_or_insert(e);
                    return;
                }
            };
            for (k, o) in out.iter_mut().enumerate() {
                if tables.hit(k, c1, c2, s) {
                    *o = wt;
                }
            }
        });
        if let Some(e) = failed.into_inner().unwrap() {
            return Err(e);
        }
        Ok(sums)
    }

    pub fn pair(&self, g: &Graph, t: &BoundStrategy, q: PairQuery<'_>) -> Result<f64> {
        Ok(self.pairs(g, t, &[q])?[0])
    }

    /// Largest gap between the joint law of the two splices of an
    /// independent pair and the product law.
    pub fn splice_independence(&self, g: &Graph, t: &BoundStrategy) -> Result<f64> {
        let m = g.edge_count();
        Error::guard("edges for the splice joint law", m, self.limits.splice_edges)?;
        let w = Weights::new(g);
        let size = 1usize << m;
        let cells: Vec<Vec<(usize, f64)>> = (0..size as u64)
            .into_par_iter()
            .map(|c1| {
                (0..size as u64)
                    .map(|c2| {
                        let tr = t.run(g, &Configuration::from_mask(m, c1), &Configuration::from_mask(m, c2))?;
                        let s = tr.s.to_mask();
                        let x = splice_mask(c1, c2, s);
                        let y = splice_mask(c2, c1, s);
                        Ok(((x as usize) << m | y as usize, w.get(c1) * w.get(c2)))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let mut joint = vec![CompensatedSum::default(); size * size];
        for row in cells {
            for (cell, wt) in row {
                joint[cell].add(wt);
            }
        }
        let mut worst: f64 = 0.0;
        for x in 0..size {
            for y in 0..size {
                let want = w.get(x as u64) * w.get(y as u64);
                worst = worst.max((joint[x << m | y].value() - want).abs());
            }
        }
        Ok(worst)
    }
}

pub fn exact_prob(g: &Graph, e: &BoundEvent) -> Result<f64> {
    ExactEngine::default().prob(g, e)
}

pub fn exact_pair(g: &Graph, t: &BoundStrategy, q: PairQuery<'_>) -> Result<f64> {
    ExactEngine::default().pair(g, t, q)
}

pub fn exact_npaths(g: &Graph, u: &str, v: &str, n: usize) -> Result<f64> {
    ExactEngine::default().npaths(g, u, v, n)
}

pub fn verify_splice_independence(g: &Graph, t: &BoundStrategy) -> Result<f64> {
    ExactEngine::default().splice_independence(g, t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::parse_event;
    use crate::graph::{generate, parse_graph, EdgeProb, Family};
    use crate::tree::parse_strategy;

    fn ev(s: &str, g: &Graph) -> BoundEvent {
        parse_event(s).unwrap().bind(g).unwrap()
    }

    fn strat(s: &str, g: &Graph) -> BoundStrategy {
        parse_strategy(s).unwrap().bind(g).unwrap()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }

    #[test]
    fn single_edge_and_triangle() {
        let g = parse_graph("vertex a\nvertex b\nedge e a b 0.3\nmark a b\n").unwrap();
        close(exact_prob(&g, &ev("a,b", &g)).unwrap(), 0.3);
        let t = generate(Family::Cycle(3), EdgeProb::Uniform(0.5)).unwrap();
        close(exact_prob(&t, &ev("a,b,c", &t)).unwrap(), 0.5);
        close(exact_prob(&t, &ev("a|b|c", &t)).unwrap(), 0.125);
        close(exact_prob(&t, &ev("a,b", &t)).unwrap(), 0.625);
    }

    #[test]
    fn npaths_tails() {
        let g = generate(Family::Parallel(3), EdgeProb::Route(0.5)).unwrap();
        close(exact_npaths(&g, "a", "b", 2).unwrap(), 0.5);
        close(exact_npaths(&g, "a", "b", 3).unwrap(), 0.125);
        let g1 = g.with_uniform_prob(1.0).unwrap();
        close(exact_npaths(&g1, "a", "b", 3).unwrap(), 1.0);
        let g2 = generate(Family::Parallel(2), EdgeProb::Uniform(0.6)).unwrap();
        close(exact_npaths(&g2, "a", "b", 2).unwrap(), 0.36f64.powi(2));
    }

    #[test]
    fn pair_extremes() {
        let g = generate(Family::Cycle(3), EdgeProb::Uniform(0.5)).unwrap();
        let (ab, bc) = (ev("a,b", &g), ev("b,c", &g));
        let none = strat("none", &g);
        close(exact_pair(&g, &none, PairQuery::Joint(&ab, &bc)).unwrap(), 0.625 * 0.625);
        let all = strat("all:S", &g);
        close(exact_pair(&g, &all, PairQuery::Joint(&ab, &ab)).unwrap(), 0.625);
        let bfs = strat("bfs_cluster:a", &g);
        let j = exact_pair(&g, &bfs, PairQuery::Joint(&ab, &bc)).unwrap();
        assert!(j >= 0.625 * 0.625 - 1e-12);
    }

    #[test]
    fn sq_s_with_full_s_is_disjoint_occurrence() {
        let g = generate(Family::Parallel(2), EdgeProb::Uniform(0.5)).unwrap();
        let ab = ev("a,b", &g);
        let all = strat("all:S", &g);
        // both routes open: 1/16
        close(exact_pair(&g, &all, PairQuery::SqS(&ab, &ab)).unwrap(), 1.0 / 16.0);
        let a_or_b = ev("a|b", &g);
        assert!(exact_pair(&g, &all, PairQuery::SqS(&a_or_b, &ab)).is_err());
    }

    #[test]
    fn splice_law_is_product() {
        let g = parse_graph("vertex a\nvertex x\nvertex b\nedge e1 a x 0.5\nedge e2 x b 0.5\nmark a b\n")
            .unwrap();
        assert!(verify_splice_independence(&g, &strat("bfs_cluster:a", &g)).unwrap() <= 1e-12);
        let t = generate(Family::Cycle(3), EdgeProb::Uniform(0.5)).unwrap();
        assert!(verify_splice_independence(&t, &strat("dfs:a,id,S", &t)).unwrap() <= 1e-12);
        // a policy that looks at the second configuration breaks independence
        let peek = crate::tree::Strategy::policy(|_, steps| match steps {
            [] => crate::tree::Move::Query(0, crate::tree::Side::S),
            [s] if s.c2 => crate::tree::Move::Query(1, crate::tree::Side::S),
            _ => crate::tree::Move::Stop,
        })
        .bind(&t)
        .unwrap();
        assert!(verify_splice_independence(&t, &peek).unwrap() <= 1e-12);
    }

    #[test]
    fn size_guards() {
        let g = generate(Family::Grid(4, 4), EdgeProb::Uniform(0.5)).unwrap();
        let err = exact_pair(&g, &strat("none", &g), PairQuery::Joint(&ev("a,b", &g), &ev("a,b", &g)))
            .unwrap_err();
        assert!(err.is_size_guard());
        let big = generate(Family::Grid(5, 5), EdgeProb::Uniform(0.5)).unwrap();
        assert!(exact_prob(&big, &ev("a,b", &big)).unwrap_err().is_size_guard());
    }
}
