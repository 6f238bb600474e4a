//! Finite marked graphs with per-edge open probabilities and optional planar
//! rotation systems.

mod clusters;
mod faces;
mod generate;
mod parse;

pub use clusters::{clusters, Clusters, UnionFind};
pub use faces::{same_face, Dart, FaceSet, Which};
pub use generate::{generate, load_family, parse_family, EdgeProb, Family};
pub use parse::parse_graph;

use crate::bits::Configuration;
use crate::error::{Error, Result};
use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

#[derive(Clone, Debug, PartialEq)]
pub struct Edge {
    pub id: String,
    pub u: usize,
    pub v: usize,
}

impl Edge {
    /// The endpoint opposite to `x`.
    #[inline]
    pub fn other(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            debug_assert_eq!(x, self.v);
            self.u
        }
    }
}

/// A validated finite simple connected graph.
///
/// Vertex and edge indices are assigned in declaration order; everything that
/// enumerates configurations uses that edge order.
#[derive(Clone, Debug)]
pub struct Graph {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<String, usize>,
    probs: Vec<f64>,
    marks: Vec<usize>,
    rotation: Option<Vec<Vec<usize>>>,
    outer: Option<Dart>,
    incident: Vec<Vec<usize>>,
    faces: Option<FaceSet>,
}

impl Graph {
    pub fn vertex_count(&self) -> usize {
        self.names.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> &Edge {
        &self.edges[e]
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, e: usize) -> f64 {
        self.probs[e]
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn vertex(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    pub fn edge_by_id(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    /// Marked vertices `a, b[, c]`.
    pub fn marks(&self) -> &[usize] {
        &self.marks
    }

    pub fn mark_names(&self) -> Vec<&str> {
        self.marks.iter().map(|&v| self.name(v)).collect()
    }

    /// Incident edges of `v` in edge-index order.
    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    /// Clockwise rotation of `v`, if the graph carries an embedding.
    pub fn rotation(&self, v: usize) -> Option<&[usize]> {
        self.rotation.as_ref().map(|r| r[v].as_slice())
    }

    pub fn has_rotation(&self) -> bool {
        self.rotation.is_some()
    }

    pub fn outer_anchor(&self) -> Option<Dart> {
        self.outer
    }

    /// Face structure of the embedding.
    pub fn faces(&self) -> Result<&FaceSet> {
        if self.rotation.is_none() {
            return Err(Error::MissingRotation);
        }
        self.faces.as_ref().ok_or(Error::MissingOuterFace)
    }

    pub fn check_config(&self, c: &Configuration) -> Result<()> {
        if c.len() != self.edge_count() {
            return Err(Error::IndexMismatch {
                expected: self.edge_count(),
                got: c.len(),
            });
        }
        Ok(())
    }

    /// Same graph with different edge probabilities.
    pub fn with_probs(&self, probs: Vec<f64>) -> Result<Graph> {
        if probs.len() != self.edge_count() {
            return Err(Error::InvalidParam(format!(
                "{} probabilities for {} edges",
                probs.len(),
                self.edge_count()
            )));
        }
        for &p in &probs {
            check_prob(p)?;
        }
        let mut g = self.clone();
        g.probs = probs;
        Ok(g)
    }

    pub fn with_uniform_prob(&self, p: f64) -> Result<Graph> {
        self.with_probs(vec![p; self.edge_count()])
    }

    /// Same graph with a different list of marked vertices.
    pub fn with_marks(&self, marks: &[&str]) -> Result<Graph> {
        let idx = marks
            .iter()
            .map(|m| self.vertex(m))
            .collect::<Result<Vec<_>>>()?;
        validate_marks(&idx)?;
        let mut g = self.clone();
        g.marks = idx;
        Ok(g)
    }

    /// Serializes to the line-based graph file format.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for n in &self.names {
            let _ = writeln!(out, "vertex {n}");
        }
        for (e, edge) in self.edges.iter().enumerate() {
            let _ = writeln!(
                out,
                "edge {} {} {} {}",
                edge.id, self.names[edge.u], self.names[edge.v], self.probs[e]
            );
        }
        if let Some(rot) = &self.rotation {
            for (v, cyc) in rot.iter().enumerate() {
                let ids: Vec<&str> = cyc.iter().map(|&e| self.edges[e].id.as_str()).collect();
                let _ = writeln!(out, "rotation {} {}", self.names[v], ids.join(" "));
            }
        }
        if let Some(d) = self.outer {
            let _ = writeln!(out, "outerface {} {}", self.edges[d.edge].id, self.names[d.tail]);
        }
        let marks: Vec<&str> = self.mark_names();
        let _ = writeln!(out, "mark {}", marks.join(" "));
        out
    }
}

fn check_prob(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidGraph(format!("probability {p} outside [0, 1]")))
    }
}

fn validate_marks(marks: &[usize]) -> Result<()> {
    if !(2..=3).contains(&marks.len()) {
        return Err(Error::InvalidGraph(format!(
            "expected 2 or 3 marks, got {}",
            marks.len()
        )));
    }
    let distinct: HashSet<_> = marks.iter().collect();
    if distinct.len() != marks.len() {
        return Err(Error::InvalidGraph("marks must be distinct".into()));
    }
    Ok(())
}

/// Incremental constructor shared by the file parser and the family generators.
#[derive(Default, Debug)]
pub struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<Edge>,
    edge_index: HashMap<String, usize>,
    probs: Vec<f64>,
    marks: Vec<usize>,
    rotation: HashMap<usize, Vec<usize>>,
    outer: Option<Dart>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn vertex(&mut self, name: &str) -> Result<usize> {
        if self.index.contains_key(name) {
            return Err(Error::InvalidGraph(format!("duplicate vertex `{name}`")));
        }
        let v = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), v);
        Ok(v)
    }

    fn lookup(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownVertex(name.to_string()))
    }

    fn lookup_edge(&self, id: &str) -> Result<usize> {
        self.edge_index
            .get(id)
            .copied()
            .ok_or_else(|| Error::UnknownEdge(id.to_string()))
    }

    pub fn edge(&mut self, id: &str, u: &str, v: &str, p: f64) -> Result<usize> {
        if self.edge_index.contains_key(id) {
            return Err(Error::InvalidGraph(format!("duplicate edge id `{id}`")));
        }
        let (u, v) = (self.lookup(u)?, self.lookup(v)?);
        if u == v {
            return Err(Error::InvalidGraph(format!("loop edge `{id}`")));
        }
        if self
            .edges
            .iter()
            .any(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
        {
            return Err(Error::InvalidGraph(format!("parallel edge `{id}`")));
        }
        check_prob(p)?;
        let e = self.edges.len();
        self.edges.push(Edge {
            id: id.to_string(),
            u,
            v,
        });
        self.edge_index.insert(id.to_string(), e);
        self.probs.push(p);
        Ok(e)
    }

    pub fn rotation(&mut self, v: &str, cycle: &[&str]) -> Result<()> {
        let v = self.lookup(v)?;
        let ids = cycle
            .iter()
            .map(|id| self.lookup_edge(id))
            .collect::<Result<Vec<_>>>()?;
        if self.rotation.insert(v, ids).is_some() {
            return Err(Error::InvalidGraph(format!(
                "duplicate rotation for `{}`",
                self.names[v]
            )));
        }
        Ok(())
    }

    pub fn rotation_idx(&mut self, v: usize, cycle: Vec<usize>) {
        self.rotation.insert(v, cycle);
    }

    pub fn outer_face(&mut self, edge: &str, tail: &str) -> Result<()> {
        let edge = self.lookup_edge(edge)?;
        let tail = self.lookup(tail)?;
        self.outer = Some(Dart { edge, tail });
        Ok(())
    }

    pub fn outer_face_idx(&mut self, edge: usize, tail: usize) {
        self.outer = Some(Dart { edge, tail });
    }

    pub fn marks(&mut self, names: &[&str]) -> Result<()> {
        self.marks = names
            .iter()
            .map(|n| self.lookup(n))
            .collect::<Result<Vec<_>>>()?;
        Ok(())
    }

    pub fn build(self) -> Result<Graph> {
        let n = self.names.len();
        let mut incident = vec![Vec::new(); n];
        for (e, edge) in self.edges.iter().enumerate() {
            incident[edge.u].push(e);
            incident[edge.v].push(e);
        }
        validate_marks(&self.marks)?;

        // connectivity
        let mut uf = UnionFind::new(n);
        for edge in &self.edges {
            uf.union(edge.u, edge.v);
        }
        if n == 0 || (0..n).any(|v| uf.find(v) != uf.find(0)) {
            return Err(Error::InvalidGraph("graph is disconnected".into()));
        }

        let rotation = if self.rotation.is_empty() {
            if self.outer.is_some() {
                return Err(Error::InvalidGraph("outerface given without rotation".into()));
            }
            None
        } else {
            let mut rot = vec![Vec::new(); n];
            for v in 0..n {
                let cyc = self.rotation.get(&v).ok_or_else(|| {
                    Error::InvalidGraph(format!("rotation missing for `{}`", self.names[v]))
                })?;
                let mut got = cyc.clone();
                got.sort_unstable();
                if got != incident[v] {
                    return Err(Error::InvalidGraph(format!(
                        "rotation of `{}` must list each incident edge exactly once",
                        self.names[v]
                    )));
                }
                rot[v] = cyc.clone();
            }
            Some(rot)
        };

        if let Some(d) = self.outer {
            let edge = &self.edges[d.edge];
            if edge.u != d.tail && edge.v != d.tail {
                return Err(Error::InvalidGraph(format!(
                    "outerface vertex `{}` is not an endpoint of `{}`",
                    self.names[d.tail], edge.id
                )));
            }
        }

        let mut g = Graph {
            names: self.names,
            index: self.index,
            edges: self.edges,
            edge_index: self.edge_index,
            probs: self.probs,
            marks: self.marks,
            rotation,
            outer: self.outer,
            incident,
            faces: None,
        };
        if g.rotation.is_some() {
            let faces = FaceSet::trace(&g);
            let euler = g.vertex_count() as i64 - g.edge_count() as i64 + faces.faces.len() as i64;
            if euler != 2 {
                return Err(Error::InvalidGraph(format!(
                    "rotation system is not planar (V - E + F = {euler})"
                )));
            }
            g.faces = g.outer.map(|d| faces.with_outer(d));
        }
        Ok(g)
    }
}
