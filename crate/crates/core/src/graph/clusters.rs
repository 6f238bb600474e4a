use super::Graph;
use crate::bits::Configuration;
use crate::error::Result;

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns false if `a` and `b` were already joined.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Partition of the vertex set into open clusters.
///
/// `label[v]` is the smallest vertex index in the cluster of `v`, so two
/// equal partitions compare equal regardless of how they were computed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clusters {
    label: Vec<usize>,
}

impl Clusters {
    pub(crate) fn from_open(g: &Graph, c: &Configuration) -> Clusters {
        let n = g.vertex_count();
        let mut uf = UnionFind::new(n);
        for e in c.open_edges().iter() {
            let edge = g.edge(e);
            uf.union(edge.u, edge.v);
        }
        let mut min_of_root = vec![usize::MAX; n];
        let roots: Vec<usize> = (0..n).map(|v| uf.find(v)).collect();
        for (v, &r) in roots.iter().enumerate() {
            if min_of_root[r] == usize::MAX {
                min_of_root[r] = v;
            }
        }
        Clusters {
            label: roots.iter().map(|&r| min_of_root[r]).collect(),
        }
    }

    #[inline]
    pub fn same(&self, u: usize, v: usize) -> bool {
        self.label[u] == self.label[v]
    }

    #[inline]
    pub fn label(&self, v: usize) -> usize {
        self.label[v]
    }

    /// Clusters as sorted vertex lists, ordered by smallest member.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut slot = vec![usize::MAX; self.label.len()];
        for (v, &l) in self.label.iter().enumerate() {
            if slot[l] == usize::MAX {
                slot[l] = out.len();
                out.push(Vec::new());
            }
            out[slot[l]].push(v);
        }
        out
    }
}

/// Connected components of the open subgraph of `c`.
pub fn clusters(g: &Graph, c: &Configuration) -> Result<Clusters> {
    g.check_config(c)?;
    Ok(Clusters::from_open(g, c))
}
