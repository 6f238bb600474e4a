//! Built-in graph families with canonical marks and planar embeddings.

use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// `n` edges in series; marks `a`, `b` at the ends and `c` in the middle for `n >= 2`.
    Path(usize),
    /// `n`-cycle with `a, b, c` spread around it.
    Cycle(usize),
    /// `w x h` grid; `a` bottom-left, `b` top-right, `c` bottom-right.
    Grid(usize, usize),
    /// `k` internally disjoint `a`–`b` paths of length 3; `c` on the first.
    Theta(usize),
    /// `n` internally disjoint `a`–`b` paths of length 2.
    Parallel(usize),
    /// Complete graph; no embedding.
    Complete(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EdgeProb {
    /// Every edge open with probability `p`.
    Uniform(f64),
    /// Each `a`–`b` route of a theta/parallel family open with probability
    /// `q`; route edges get `q^(1/len)`.
    Route(f64),
}

impl Family {
    pub fn name(&self) -> String {
        match *self {
            Family::Path(n) => format!("path:{n}"),
            Family::Cycle(n) => format!("cycle:{n}"),
            Family::Grid(w, h) => format!("grid:{w},{h}"),
            Family::Theta(k) => format!("theta:{k}"),
            Family::Parallel(n) => format!("parallel:{n}"),
            Family::Complete(n) => format!("complete:{n}"),
        }
    }

    fn route_len(&self) -> Option<usize> {
        match self {
            Family::Theta(_) => Some(3),
            Family::Parallel(_) => Some(2),
            _ => None,
        }
    }
}

/// Parses `name:params` such as `grid:5,5,p=0.5` or `parallel:3,q=0.5`.
/// Probability defaults to `p=0.5`.
pub fn parse_family(spec: &str) -> Result<(Family, EdgeProb)> {
    let bad = |msg: &str| Error::InvalidParam(format!("family `{spec}`: {msg}"));
    let (name, rest) = spec.split_once(':').unwrap_or((spec, ""));
    let mut nums = Vec::new();
    let mut prob = EdgeProb::Uniform(0.5);
    for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        if let Some((k, v)) = tok.split_once('=') {
            let x: f64 = v.parse().map_err(|_| bad("bad probability"))?;
            prob = match k {
                "p" => EdgeProb::Uniform(x),
                "q" => EdgeProb::Route(x),
                _ => return Err(bad("expected p= or q=")),
            };
        } else {
            nums.push(tok.parse::<usize>().map_err(|_| bad("bad size"))?);
        }
    }
    let one = |nums: &[usize]| -> Result<usize> {
        match nums {
            [n] => Ok(*n),
            _ => Err(bad("expected one size parameter")),
        }
    };
    let fam = match name {
        "path" => Family::Path(one(&nums)?),
        "cycle" => Family::Cycle(one(&nums)?),
        "theta" => Family::Theta(one(&nums)?),
        "parallel" => Family::Parallel(one(&nums)?),
        "complete" => Family::Complete(one(&nums)?),
        "grid" => match nums[..] {
            [w, h] => Family::Grid(w, h),
            _ => return Err(bad("expected width,height")),
        },
        _ => return Err(bad("unknown family")),
    };
    Ok((fam, prob))
}

/// Builds the graph named by `family:name:params` (the prefix is optional).
pub fn load_family(desc: &str) -> Result<Graph> {
    let spec = desc.strip_prefix("family:").unwrap_or(desc);
    let (family, prob) = parse_family(spec)?;
    generate(family, prob)
}

/// Builds a family member. Planar families carry a clockwise rotation and an
/// outer-face anchor.
pub fn generate(family: Family, prob: EdgeProb) -> Result<Graph> {
    let p = match (prob, family.route_len()) {
        (EdgeProb::Uniform(p), _) => p,
        (EdgeProb::Route(q), Some(len)) => {
            if !(0.0..=1.0).contains(&q) {
                return Err(Error::InvalidParam(format!("route probability {q}")));
            }
            q.powf(1.0 / len as f64)
        }
        (EdgeProb::Route(_), None) => {
            return Err(Error::InvalidParam(format!(
                "q= only applies to theta/parallel, not {}",
                family.name()
            )))
        }
    };
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidParam(format!("probability {p} outside [0, 1]")));
    }
    let mut b = Builder::new(p);
    match family {
        Family::Path(n) => {
            if n < 1 {
                return Err(Error::InvalidParam("path needs n >= 1".into()));
            }
            let mid = (n >= 2).then_some(n / 2);
            let names: Vec<String> = (0..=n)
                .map(|i| match i {
                    0 => "a".into(),
                    i if i == n => "b".into(),
                    i if Some(i) == mid => "c".into(),
                    i => format!("v{i}"),
                })
                .collect();
            let vs = b.vertices(&names)?;
            let es: Vec<usize> = (0..n).map(|i| b.edge(vs[i], vs[i + 1])).collect::<Result<_>>()?;
            for i in 0..=n {
                let mut rot = Vec::new();
                if i > 0 {
                    rot.push(es[i - 1]);
                }
                if i < n {
                    rot.push(es[i]);
                }
                b.g.rotation_idx(vs[i], rot);
            }
            b.g.outer_face_idx(es[0], vs[0]);
            let marks: Vec<&str> = match mid {
                Some(_) => vec!["a", "b", "c"],
                None => vec!["a", "b"],
            };
            b.g.marks(&marks)?;
        }
        Family::Cycle(n) => {
            if n < 3 {
                return Err(Error::InvalidParam("cycle needs n >= 3".into()));
            }
            let (ib, ic) = (n / 3, 2 * n / 3);
            let names: Vec<String> = (0..n)
                .map(|i| match i {
                    0 => "a".into(),
                    i if i == ib => "b".into(),
                    i if i == ic => "c".into(),
                    i => format!("v{i}"),
                })
                .collect();
            let vs = b.vertices(&names)?;
            // vertices laid out counterclockwise; edge i joins i and i+1
            let es: Vec<usize> = (0..n).map(|i| b.edge(vs[i], vs[(i + 1) % n])).collect::<Result<_>>()?;
            for i in 0..n {
                b.g.rotation_idx(vs[i], vec![es[(i + n - 1) % n], es[i]]);
            }
            // walking from 1 back to 0 keeps the unbounded region on the left
            b.g.outer_face_idx(es[0], vs[1]);
            b.g.marks(&["a", "b", "c"])?;
        }
        Family::Grid(w, h) => {
            if w < 2 || h < 2 {
                return Err(Error::InvalidParam("grid needs width, height >= 2".into()));
            }
            let at = |x: usize, y: usize| y * w + x;
            let names: Vec<String> = (0..w * h)
                .map(|i| {
                    let (x, y) = (i % w, i / w);
                    match (x, y) {
                        (0, 0) => "a".into(),
                        (x, y) if x == w - 1 && y == h - 1 => "b".into(),
                        (x, 0) if x == w - 1 => "c".into(),
                        (x, y) => format!("v{x}_{y}"),
                    }
                })
                .collect();
            let vs = b.vertices(&names)?;
            let mut horiz = vec![usize::MAX; w * h];
            let mut vert = vec![usize::MAX; w * h];
            for y in 0..h {
                for x in 0..w - 1 {
                    horiz[at(x, y)] = b.edge(vs[at(x, y)], vs[at(x + 1, y)])?;
                }
            }
            for y in 0..h - 1 {
                for x in 0..w {
                    vert[at(x, y)] = b.edge(vs[at(x, y)], vs[at(x, y + 1)])?;
                }
            }
            for y in 0..h {
                for x in 0..w {
                    // clockwise with y pointing up: north, east, south, west
                    let mut rot = Vec::new();
                    if y + 1 < h {
                        rot.push(vert[at(x, y)]);
                    }
                    if x + 1 < w {
                        rot.push(horiz[at(x, y)]);
                    }
                    if y > 0 {
                        rot.push(vert[at(x, y - 1)]);
                    }
                    if x > 0 {
                        rot.push(horiz[at(x - 1, y)]);
                    }
                    b.g.rotation_idx(vs[at(x, y)], rot);
                }
            }
            // bottom row walked westward has the unbounded region on its left
            b.g.outer_face_idx(horiz[at(0, 0)], vs[at(1, 0)]);
            b.g.marks(&["a", "b", "c"])?;
        }
        Family::Theta(k) | Family::Parallel(k) => {
            if k < 1 {
                return Err(Error::InvalidParam("need at least one route".into()));
            }
            let inner = family.route_len().unwrap() - 1;
            let a = b.vertex("a")?;
            let bb = b.vertex("b")?;
            let mut first = Vec::new();
            let mut last = Vec::new();
            let mut c_name = None;
            for i in 0..k {
                let mut prev = a;
                let mut route_edges = Vec::new();
                for j in 0..inner {
                    let name = if matches!(family, Family::Theta(_)) && i == 0 && j == 0 {
                        c_name = Some("c");
                        "c".to_string()
                    } else {
                        format!("m{i}_{j}")
                    };
                    let v = b.vertex(&name)?;
                    route_edges.push(b.edge(prev, v)?);
                    prev = v;
                }
                route_edges.push(b.edge(prev, bb)?);
                // internal vertices: previous edge then next edge
                for j in 0..inner {
                    let v = b.shared_endpoint(route_edges[j], route_edges[j + 1]);
                    b.g.rotation_idx(v, vec![route_edges[j], route_edges[j + 1]]);
                }
                first.push(route_edges[0]);
                last.push(*route_edges.last().unwrap());
            }
            // route 0 drawn on top: clockwise at a runs top to bottom,
            // at b bottom to top
            b.g.rotation_idx(a, first.clone());
            b.g.rotation_idx(bb, last.iter().rev().copied().collect());
            b.g.outer_face_idx(first[0], a);
            match c_name {
                Some(c) => b.g.marks(&["a", "b", c])?,
                None => b.g.marks(&["a", "b"])?,
            }
        }
        Family::Complete(n) => {
            if n < 2 {
                return Err(Error::InvalidParam("complete needs n >= 2".into()));
            }
            let names: Vec<String> = (0..n)
                .map(|i| match i {
                    0 => "a".into(),
                    1 => "b".into(),
                    2 => "c".into(),
                    i => format!("v{i}"),
                })
                .collect();
            let vs = b.vertices(&names)?;
            for i in 0..n {
                for j in i + 1..n {
                    b.edge(vs[i], vs[j])?;
                }
            }
            if n >= 3 {
                b.g.marks(&["a", "b", "c"])?;
            } else {
                b.g.marks(&["a", "b"])?;
            }
        }
    }
    b.finish()
}

struct Builder {
    g: GraphBuilder,
    p: f64,
    names: Vec<String>,
    ends: Vec<(usize, usize)>,
}

impl Builder {
    fn new(p: f64) -> Self {
        Builder {
            g: GraphBuilder::new(),
            p,
            names: Vec::new(),
            ends: Vec::new(),
        }
    }

    fn vertex(&mut self, name: &str) -> Result<usize> {
        let v = self.g.vertex(name)?;
        self.names.push(name.to_string());
        Ok(v)
    }

    fn vertices(&mut self, names: &[String]) -> Result<Vec<usize>> {
        names.iter().map(|n| self.vertex(n)).collect()
    }

    fn edge(&mut self, u: usize, v: usize) -> Result<usize> {
        let id = format!("e{}", self.ends.len());
        let e = self.g.edge(&id, &self.names[u], &self.names[v], self.p)?;
        self.ends.push((u, v));
        Ok(e)
    }

    /// The vertex two consecutive route edges share.
    fn shared_endpoint(&self, e1: usize, e2: usize) -> usize {
        let (a, b) = self.ends[e1];
        let (c, d) = self.ends[e2];
        if a == c || a == d {
            a
        } else {
            debug_assert!(b == c || b == d);
            b
        }
    }

    fn finish(self) -> Result<Graph> {
        self.g.build()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{same_face, Which};

    fn euler(g: &Graph) -> i64 {
        g.vertex_count() as i64 - g.edge_count() as i64 + g.faces().unwrap().len() as i64
    }

    #[test]
    fn family_sizes() {
        let u = EdgeProb::Uniform(0.5);
        let g = generate(Family::Parallel(3), u).unwrap();
        assert_eq!(g.edge_count(), 6);
        assert_eq!(g.mark_names(), vec!["a", "b"]);
        assert!(same_face(&g, g.marks(), Which::Outer).unwrap());

        let tri = generate(Family::Cycle(3), u).unwrap();
        assert_eq!((tri.vertex_count(), tri.edge_count()), (3, 3));
        assert_eq!(tri.mark_names(), vec!["a", "b", "c"]);

        assert_eq!(generate(Family::Grid(3, 3), u).unwrap().edge_count(), 12);
        assert_eq!(generate(Family::Theta(3), u).unwrap().edge_count(), 9);
        assert_eq!(generate(Family::Complete(5), u).unwrap().edge_count(), 10);
        assert_eq!(generate(Family::Path(2), u).unwrap().mark_names(), vec!["a", "b", "c"]);
    }

    #[test]
    fn euler_formula_holds_for_planar_families() {
        let u = EdgeProb::Uniform(0.5);
        for fam in [
            Family::Path(1),
            Family::Path(4),
            Family::Cycle(3),
            Family::Cycle(7),
            Family::Grid(2, 2),
            Family::Grid(3, 3),
            Family::Grid(5, 4),
            Family::Theta(1),
            Family::Theta(4),
            Family::Parallel(5),
        ] {
            let g = generate(fam, u).unwrap();
            assert_eq!(euler(&g), 2, "{fam:?}");
        }
    }

    #[test]
    fn grid_faces() {
        let g = generate(Family::Grid(3, 3), EdgeProb::Uniform(0.5)).unwrap();
        let fs = g.faces().unwrap();
        assert_eq!(fs.len(), 5);
        assert_eq!(fs.outer().len(), 8);
        let center = g.vertex("v1_1").unwrap();
        let a = g.vertex("a").unwrap();
        let c = g.vertex("c").unwrap();
        assert!(!same_face(&g, &[center, a], Which::Outer).unwrap());
        assert!(same_face(&g, &[center, a], Which::Any).unwrap());
        assert!(same_face(&g, &[a, c], Which::Outer).unwrap());
    }

    #[test]
    fn path_has_one_face() {
        let g = generate(Family::Path(2), EdgeProb::Uniform(0.3)).unwrap();
        assert_eq!(g.faces().unwrap().len(), 1);
    }

    #[test]
    fn theta_outer_face_is_first_and_last_route() {
        let g = generate(Family::Theta(3), EdgeProb::Uniform(0.5)).unwrap();
        let fs = g.faces().unwrap();
        assert_eq!(fs.outer().len(), 6);
        let mid = g.vertex("m1_0").unwrap();
        assert!(!fs.on_outer(mid));
        assert!(fs.on_outer(g.vertex("c").unwrap()));
    }

    #[test]
    fn route_probability() {
        let g = generate(Family::Parallel(2), EdgeProb::Route(0.25)).unwrap();
        assert!((g.prob(0) - 0.5).abs() < 1e-15);
        assert!(generate(Family::Grid(2, 2), EdgeProb::Route(0.5)).is_err());
    }

    #[test]
    fn parse_family_strings() {
        assert_eq!(
            parse_family("grid:5,5,p=0.25").unwrap(),
            (Family::Grid(5, 5), EdgeProb::Uniform(0.25))
        );
        assert_eq!(
            parse_family("parallel:3,q=0.5").unwrap(),
            (Family::Parallel(3), EdgeProb::Route(0.5))
        );
        assert_eq!(parse_family("cycle:3").unwrap().1, EdgeProb::Uniform(0.5));
        assert!(parse_family("grid:5").is_err());
        assert!(parse_family("blob:3").is_err());
        assert!(generate(Family::Cycle(2), EdgeProb::Uniform(0.5)).is_err());
    }
}
