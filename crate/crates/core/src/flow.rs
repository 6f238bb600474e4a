//! Edge-disjoint path counting on the open subgraph.

use crate::graph::Graph;
use std::collections::VecDeque;

/// Maximum number of pairwise edge-disjoint open `s`–`t` paths, capped at
/// `limit` (the search stops once `limit` paths are found).
///
/// Each undirected open edge carries unit capacity in either direction;
/// augmenting paths are found by BFS in the residual graph.
pub fn edge_disjoint_paths(
    g: &Graph,
    open: impl Fn(usize) -> bool,
    s: usize,
    t: usize,
    limit: usize,
) -> usize {
    if s == t {
        return limit;
    }
    let m = g.edge_count();
    let n = g.vertex_count();
    // residual[2e] is capacity u->v, residual[2e+1] is v->u
    let mut residual = vec![0u8; 2 * m];
    for e in 0..m {
        if open(e) {
            residual[2 * e] = 1;
            residual[2 * e + 1] = 1;
        }
    }
    let arc = |e: usize, from: usize| 2 * e + usize::from(g.edge(e).u != from);
    let mut flow = 0;
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; n];
    let mut queue = VecDeque::new();
    while flow < limit {
        pred.iter_mut().for_each(|p| *p = None);
        queue.clear();
        queue.push_back(s);
        let mut reached = false;
        'bfs: while let Some(x) = queue.pop_front() {
            for &e in g.incident(x) {
                let y = g.edge(e).other(x);
                if y == s || pred[y].is_some() || residual[arc(e, x)] == 0 {
                    continue;
                }
                pred[y] = Some((e, x));
                if y == t {
                    reached = true;
                    break 'bfs;
                }
                queue.push_back(y);
            }
        }
        if !reached {
            break;
        }
        let mut y = t;
        while let Some((e, x)) = pred[y] {
            residual[arc(e, x)] -= 1;
            residual[arc(e, y)] += 1;
            y = x;
            if y == s {
                break;
            }
        }
        flow += 1;
    }
    flow
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, EdgeProb, Family};

    #[test]
    fn parallel_routes() {
        let g = generate(Family::Parallel(3), EdgeProb::Uniform(0.5)).unwrap();
        let (a, b) = (g.marks()[0], g.marks()[1]);
        assert_eq!(edge_disjoint_paths(&g, |_| true, a, b, 10), 3);
        assert_eq!(edge_disjoint_paths(&g, |_| true, a, b, 2), 2);
        // close one edge of the first route
        assert_eq!(edge_disjoint_paths(&g, |e| e != 0, a, b, 10), 2);
    }

    #[test]
    fn grid_corner_degree_bounds_flow() {
        let g = generate(Family::Grid(3, 3), EdgeProb::Uniform(0.5)).unwrap();
        let (a, b) = (g.marks()[0], g.marks()[1]);
        assert_eq!(edge_disjoint_paths(&g, |_| true, a, b, 10), 2);
    }
}
