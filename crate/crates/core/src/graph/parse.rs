use super::{Graph, GraphBuilder};
use crate::error::{Error, Result};

/// Parses the line-based graph format:
///
/// ```text
/// vertex <name>
/// edge <edge-id> <vertex> <vertex> <p>
/// rotation <vertex> <edge-id> ...     # clockwise
/// outerface <edge-id> <vertex>        # dart leaving <vertex>
/// mark <vertex> <vertex> [<vertex>]
/// ```
pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut b = GraphBuilder::new();
    let mut saw_marks = false;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let Some((&directive, args)) = tokens.split_first() else {
            continue;
        };
        let at = |e: Error| Error::GraphFormat {
            line,
            msg: e.to_string(),
        };
        let arity = |want: &str, ok: bool| {
            if ok {
                Ok(())
            } else {
                Err(Error::GraphFormat {
                    line,
                    msg: format!("`{directive}` expects {want}"),
                })
            }
        };
        match directive {
            "vertex" => {
                arity("1 argument", args.len() == 1)?;
                b.vertex(args[0]).map_err(at)?;
            }
            "edge" => {
                arity("4 arguments", args.len() == 4)?;
                let p: f64 = args[3].parse().map_err(|_| Error::GraphFormat {
                    line,
                    msg: format!("bad probability `{}`", args[3]),
                })?;
                b.edge(args[0], args[1], args[2], p).map_err(at)?;
            }
            "rotation" => {
                arity("a vertex and its edges", !args.is_empty())?;
                b.rotation(args[0], &args[1..]).map_err(at)?;
            }
            "outerface" => {
                arity("2 arguments", args.len() == 2)?;
                b.outer_face(args[0], args[1]).map_err(at)?;
            }
            "mark" => {
                arity("2 or 3 vertices", (2..=3).contains(&args.len()))?;
                if saw_marks {
                    return Err(Error::GraphFormat {
                        line,
                        msg: "duplicate mark line".into(),
                    });
                }
                saw_marks = true;
                b.marks(args).map_err(at)?;
            }
            other => {
                return Err(Error::GraphFormat {
                    line,
                    msg: format!("unknown directive `{other}`"),
                })
            }
        }
    }
    if !saw_marks {
        return Err(Error::InvalidGraph("fewer than 2 marks".into()));
    }
    b.build()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{same_face, Which};

    pub(crate) const TRIANGLE: &str = "\
# triangle
vertex a
vertex b
vertex c
edge ab a b 0.5
edge bc b c 0.5
edge ca c a 0.5
mark a b c
";

    #[test]
    fn parses_triangle() {
        let g = parse_graph(TRIANGLE).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 3);
        assert!(g.probs().iter().all(|&p| p == 0.5));
        assert_eq!(g.mark_names(), vec!["a", "b", "c"]);
        assert!(!g.has_rotation());
        assert!(matches!(g.faces(), Err(Error::MissingRotation)));
    }

    #[test]
    fn rejects_loop() {
        let err = parse_graph("vertex a\nvertex b\nedge e1 a a 0.5\nmark a b\n").unwrap_err();
        assert!(err.to_string().contains("loop"), "{err}");
    }

    #[test]
    fn error_paths() {
        let cases = [
            ("vertex a\nvertex b\nedge e a b 0.5\nedge e b a 0.5\nmark a b", "duplicate edge id"),
            ("vertex a\nvertex b\nedge e a z 0.5\nmark a b", "unknown vertex"),
            ("vertex a\nvertex b\nedge e a b 1.5\nmark a b", "outside [0, 1]"),
            ("vertex a\nvertex b\nedge e a b 0.5\nmark a", "expects 2 or 3"),
            ("vertex a\nvertex b\nedge e a b 0.5", "fewer than 2 marks"),
            ("vertex a\nvertex b\nvertex c\nedge e a b 0.5\nmark a b", "disconnected"),
            ("vertex a\nvertex b\nedge e a b 0.5\nfoo x\nmark a b", "unknown directive"),
            (
                "vertex a\nvertex b\nvertex c\nedge x a b 0.5\nedge y b c 0.5\n\
                 rotation a x\nrotation b x\nrotation c y\nmark a c",
                "exactly once",
            ),
            (
                "vertex a\nvertex b\nvertex c\nedge x a b 0.5\nedge y b c 0.5\n\
                 rotation a x\nrotation b x y\nmark a c",
                "rotation missing",
            ),
        ];
        for (text, needle) in cases {
            let err = parse_graph(text).unwrap_err().to_string();
            assert!(err.contains(needle), "`{needle}` not in `{err}`");
        }
    }

    #[test]
    fn triangle_with_rotation_has_two_faces() {
        let text = format!(
            "{TRIANGLE}rotation a ab ca\nrotation b bc ab\nrotation c ca bc\nouterface ab b\n"
        );
        let g = parse_graph(&text).unwrap();
        let fs = g.faces().unwrap();
        assert_eq!(fs.len(), 2);
        for f in 0..2 {
            let mut vs = fs.face_vertices(f);
            vs.sort();
            assert_eq!(vs, vec![0, 1, 2]);
        }
        assert!(same_face(&g, &[0, 1, 2], Which::Outer).unwrap());
        // text form round-trips
        let again = parse_graph(&g.to_text()).unwrap();
        assert_eq!(again.to_text(), g.to_text());
    }

    #[test]
    fn nonplanar_rotation_rejected() {
        // K4 with a rotation that embeds it on the torus
        let text = "vertex a\nvertex b\nvertex c\nvertex d\n\
            edge ab a b 0.5\nedge ac a c 0.5\nedge ad a d 0.5\n\
            edge bc b c 0.5\nedge bd b d 0.5\nedge cd c d 0.5\n\
            rotation a ab ac ad\nrotation b ab bc bd\nrotation c ac bc cd\nrotation d ad bd cd\n\
            mark a b c\n";
        let err = parse_graph(text).unwrap_err().to_string();
        assert!(err.contains("not planar"), "{err}");
    }
}
