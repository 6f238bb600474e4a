use super::Graph;
use crate::error::{Error, Result};

/// A directed edge: `edge` traversed away from `tail`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Dart {
    pub edge: usize,
    pub tail: usize,
}

impl Dart {
    pub fn head(&self, g: &Graph) -> usize {
        g.edge(self.edge).other(self.tail)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Which {
    Outer,
    Any,
}

/// Face cycles of a rotation system.
///
/// Arriving at `v` along `e`, a face continues along the clockwise successor
/// of `e` in the rotation of `v`. Every dart lies on exactly one face.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceSet {
    pub faces: Vec<Vec<Dart>>,
    pub outer_index: usize,
}

fn dart_slot(g: &Graph, d: Dart) -> usize {
    2 * d.edge + usize::from(g.edge(d.edge).u != d.tail)
}

impl FaceSet {
    pub(super) fn trace(g: &Graph) -> FaceSet {
        let m = g.edge_count();
        let rot = g.rotation.as_ref().expect("trace requires a rotation");
        // position of each edge in the rotation of each endpoint
        let mut pos = vec![0usize; 2 * m];
        for (v, cyc) in rot.iter().enumerate() {
            for (i, &e) in cyc.iter().enumerate() {
                pos[dart_slot(g, Dart { edge: e, tail: v })] = i;
            }
        }
        let mut seen = vec![false; 2 * m];
        let mut faces = Vec::new();
        for e in 0..m {
            for tail in [g.edge(e).u, g.edge(e).v] {
                let start = Dart { edge: e, tail };
                if seen[dart_slot(g, start)] {
                    continue;
                }
                let mut face = Vec::new();
                let mut d = start;
                while !seen[dart_slot(g, d)] {
                    seen[dart_slot(g, d)] = true;
                    face.push(d);
                    let head = d.head(g);
                    let cyc = &rot[head];
                    let i = pos[dart_slot(g, Dart { edge: d.edge, tail: head })];
                    d = Dart {
                        edge: cyc[(i + 1) % cyc.len()],
                        tail: head,
                    };
                }
                faces.push(face);
            }
        }
        FaceSet {
            faces,
            outer_index: 0,
        }
    }

    pub(super) fn with_outer(mut self, anchor: Dart) -> FaceSet {
        self.outer_index = self
            .faces
            .iter()
            .position(|f| f.contains(&anchor))
            .expect("every dart lies on a face");
        self
    }

    pub fn len(&self) -> usize {
        self.faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    pub fn outer(&self) -> &[Dart] {
        &self.faces[self.outer_index]
    }

    /// Vertices on a face boundary (tails of its darts), in traversal order,
    /// possibly with repeats at cut vertices.
    pub fn face_vertices(&self, f: usize) -> Vec<usize> {
        self.faces[f].iter().map(|d| d.tail).collect()
    }

    pub fn on_outer(&self, v: usize) -> bool {
        self.outer().iter().any(|d| d.tail == v)
    }

    /// The edge along which the outer face boundary first enters `v`,
    /// scanning from the anchor dart. Right-hand walks started at `v`
    /// examine candidates clockwise from just after this edge.
    pub fn outer_entry(&self, g: &Graph, v: usize) -> Option<usize> {
        self.outer()
            .iter()
            .find(|d| d.head(g) == v)
            .map(|d| d.edge)
    }
}

/// Whether all of `vs` lie on one common face (the outer face for
/// [`Which::Outer`]).
pub fn same_face(g: &Graph, vs: &[usize], which: Which) -> Result<bool> {
    let fs = g.faces()?;
    for &v in vs {
        if v >= g.vertex_count() {
            return Err(Error::InvalidParam(format!("vertex index {v} out of range")));
        }
    }
    let on = |f: usize| {
        let verts = fs.face_vertices(f);
        vs.iter().all(|v| verts.contains(v))
    };
    Ok(match which {
        Which::Outer => on(fs.outer_index),
        Which::Any => (0..fs.len()).any(on),
    })
}
