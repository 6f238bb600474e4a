//! The built-in corpus: every check over small graph families.

use super::{run_check, scan_conjectures, CheckReport, Method, Params, SCAN_IDS};
use crate::error::{Error, Result};
use crate::graph::load_family;
use rayon::prelude::*;

/// Seed of every Monte Carlo instance in the corpus.
pub const CORPUS_SEED: u64 = 20240607;

#[derive(Clone, Debug, PartialEq)]
pub struct Instance {
    pub check_id: String,
    /// `family:...` descriptor.
    pub graph: String,
    pub params: Params,
    pub method: Method,
    /// Position among instances with the same check and graph.
    pub variant: usize,
}

impl Instance {
    pub fn is_scan(&self) -> bool {
        SCAN_IDS.contains(&self.check_id.as_str())
    }

    /// File name stem: `<check-id>__<graph>`, with `__v<k>` for repeats.
    pub fn stem(&self) -> String {
        let mut s = format!("{}__{}", self.check_id, slug(&self.graph));
        if self.variant > 0 {
            s.push_str(&format!("__v{}", self.variant));
        }
        s
    }

    pub fn run(&self) -> Result<Vec<CheckReport>> {
        let g = load_family(&self.graph)?;
        if self.is_scan() {
            scan_conjectures(&self.check_id, &g, &self.graph, &self.params, self.method)
        } else {
            Ok(vec![run_check(&self.check_id, &g, &self.graph, &self.params, self.method)?])
        }
    }
}

/// Graph descriptor as a file-name fragment.
pub fn slug(graph: &str) -> String {
    let body = graph.strip_prefix("family:").unwrap_or(graph);
    let mut out = String::new();
    for c in body.chars() {
        let c = if c.is_ascii_alphanumeric() || c == '.' { c } else { '-' };
        if !(c == '-' && out.ends_with('-')) {
            out.push(c);
        }
    }
    out.trim_matches('-').to_string()
}

/// Three-marked graphs with at most eight edges.
const SMALL3: &[&str] = &[
    "cycle:3,p=0.25",
    "cycle:3,p=0.5",
    "cycle:3,p=0.75",
    "cycle:4,p=0.5",
    "cycle:5,p=0.5",
    "path:3,p=0.5",
    "grid:2,2,p=0.5",
    "grid:2,3,p=0.5",
    "theta:2,p=0.5",
    "complete:4,p=0.5",
];

/// Planar families with `a`, `b`, `c` on the outer face.
const OUTER3: &[&str] = &[
    "cycle:3,p=0.25",
    "cycle:3,p=0.5",
    "cycle:3,p=0.75",
    "cycle:5,p=0.25",
    "cycle:5,p=0.5",
    "cycle:5,p=0.75",
    "theta:2,p=0.25",
    "theta:2,p=0.5",
    "theta:2,p=0.75",
    "theta:3,p=0.5",
    "grid:2,3,p=0.5",
    "grid:3,3,p=0.5",
];

/// Planar two-terminal families with `a`, `b` on the outer face.
const ARMS: &[&str] = &[
    "parallel:1,q=0.5",
    "parallel:2,q=0.5",
    "parallel:3,q=0.3",
    "parallel:3,q=0.5",
    "parallel:3,q=0.8",
    "parallel:4,q=0.5",
    "parallel:5,q=0.5",
    "theta:1,q=0.5",
    "theta:2,q=0.5",
    "theta:3,q=0.6",
    "grid:2,3,p=0.5",
    "grid:2,4,p=0.6",
];

/// Graphs for the path-count scans.
const SCANS: &[&str] = &[
    "parallel:3,q=0.3",
    "parallel:3,q=0.5",
    "parallel:4,q=0.5",
    "parallel:5,q=0.3",
    "parallel:5,q=0.5",
    "parallel:5,q=0.8",
    "theta:3,q=0.5",
    "theta:3,p=0.7",
    "grid:2,4,p=0.6",
];

const EVENT_PAIRS: &[(&str, &str)] = &[
    ("a,b", "b,c"),
    ("a,c", "a,b,c"),
    ("npaths(a,b,2)", "a,b"),
];

/// The q2 trees.
const S1: &str = "seq:[dfs:c,id,S;dfs:a,id,Sbar;dfs:b,id,S]";
const S2: &str = "seq:[dfs:b,id,S;dfs:a,id,Sbar;dfs:c,id,S]";
const S3: &str = "seq:[dfs:a,id,Sbar;dfs:b,id,S;dfs:c,id,S]";

fn planar(graph: &str) -> bool {
    !graph.starts_with("complete")
}

struct Collector(Vec<Instance>);

impl Collector {
    fn push(&mut self, id: &str, graph: &str, params: Params, method: Method) {
        let graph = format!("family:{graph}");
        let variant = self
            .0
            .iter()
            .filter(|i| i.check_id == id && i.graph == graph)
            .count();
        self.0.push(Instance {
            check_id: id.to_string(),
            graph,
            params,
            method,
            variant,
        });
    }

    fn exact(&mut self, id: &str, graph: &str, params: Params) {
        self.push(id, graph, params, Method::Exact);
    }

    fn mc(&mut self, id: &str, graph: &str, params: Params, samples: u64) {
        self.push(id, graph, params, Method::mc(samples, CORPUS_SEED));
    }
}

fn with_strategy(s: &str) -> Params {
    Params {
        strategy: Some(s.to_string()),
        ..Params::default()
    }
}

fn cs(prefix: &str, strategy: &str, a: &str, b: &str) -> Params {
    Params {
        prefix: Some(prefix.to_string()),
        strategy: Some(strategy.to_string()),
        events: vec![a.to_string(), b.to_string()],
        ..Params::default()
    }
}

/// Every corpus instance, grouped by check in a fixed order.
pub fn builtin() -> Vec<Instance> {
    let mut c = Collector(Vec::new());
    for id in ["hk_tree", "vdbk_tree"] {
        for g in SMALL3 {
            let mut trees = vec!["bfs_cluster:a", "dfs:a,id,S", "dfs:b,id,Sbar", S1, S2, S3];
            if planar(g) {
                trees.push("dfs:a,right_hand,until:c");
                trees.push("dfs:c,left_hand,S");
            }
            for t in trees {
                for (a, b) in EVENT_PAIRS {
                    let mut p = with_strategy(t);
                    p.events = vec![a.to_string(), b.to_string()];
                    c.exact(id, g, p);
                }
            }
        }
    }
    for g in SMALL3 {
        c.exact("cs_bound", g, Params::default());
        c.exact("cs_bound", g, cs("dfs:c,id,S", S1, "a|c U b|c", "a|b|c"));
        c.exact("cs_bound", g, cs("dfs:b,id,S", S2, "a|b U b|c", "a|b|c"));
        c.exact("cs_bound", g, cs("dfs:a,id,S,stop:c", "seq:[dfs:a,id,S,stop:c;rest:Sbar]", "a,c", "a,b,c"));
        if planar(g) {
            c.exact(
                "cs_bound",
                g,
                cs("dfs:a,right_hand,S,stop:c", "seq:[dfs:a,right_hand,S,stop:c;rest:Sbar]", "a,c", "a,b,c"),
            );
        }
    }
    for g in ["parallel:3,q=0.5", "theta:2,q=0.5", "grid:2,3,p=0.5"] {
        c.exact(
            "cs_bound",
            g,
            cs("rhw_walks:a,b,2", "rhw_walks:a,b,3", "npaths(a,b,2)", "npaths(a,b,3)"),
        );
    }
    for id in ["frac1", "frac2"] {
        for g in SMALL3 {
            for t in ["bfs_cluster:a", "seq:[bfs_cluster:a;rest:Sbar]", "seq:[bfs_cluster:a;dfs:b,id,S;rest:Sbar]"] {
                c.exact(id, g, with_strategy(t));
            }
        }
    }
    for id in ["planar_dv2", "planar_dv2_strong"] {
        for g in OUTER3 {
            c.exact(id, g, Params::default());
        }
    }
    c.mc("planar_dv2", "grid:5,5,p=0.5", Params::default(), 1_000_000);
    for id in ["dv8", "dv_union"] {
        for g in SMALL3 {
            c.exact(id, g, Params::default());
        }
        c.mc(id, "grid:5,5,p=0.5", Params::default(), 200_000);
        c.mc(id, "complete:5,p=0.5", Params::default(), 200_000);
    }
    let conj_graphs: Vec<&str> = SMALL3
        .iter()
        .copied()
        .chain(["cycle:3,p=0.95", "complete:4,p=0.9", "theta:2,p=0.9"])
        .collect();
    for id in ["q2", "q2_swapped"] {
        for g in &conj_graphs {
            c.exact(id, g, Params::default());
        }
    }
    for g in &conj_graphs {
        for eps in [0.2, 0.3] {
            let p = Params {
                epsilon: Some(eps),
                ..Params::default()
            };
            c.exact("conj2_demo", g, p);
        }
    }
    for g in ARMS {
        c.exact("arms23", g, Params::default());
        for nklm in [[3, 2, 2, 2], [3, 3, 2, 1]] {
            let p = Params {
                nklm: Some(nklm),
                ..Params::default()
            };
            c.exact("arms_klm", g, p);
        }
    }
    for g in ARMS {
        for nm in [[1, 1], [1, 2], [2, 2]] {
            let p = Params {
                nm: Some(nm),
                ..Params::default()
            };
            c.exact("submult", g, p);
        }
    }
    for g in &conj_graphs {
        c.exact("conj3_scan", g, Params::default());
    }
    c.mc("conj3_scan", "grid:5,5,p=0.5", Params::default(), 200_000);
    for id in ["logconcave", "lambda_monotone"] {
        for g in SCANS {
            c.exact(id, g, Params::default());
        }
        c.mc(id, "grid:2,6,p=0.7", Params::default(), 1_000_000);
        c.mc(id, "grid:3,3,p=0.6", Params::default(), 200_000);
    }
    c.0
}

/// Instances whose check id matches a shell-style pattern (`*`, `?`).
pub fn filter(instances: Vec<Instance>, pattern: &str) -> Result<Vec<Instance>> {
    let pat = glob::Pattern::new(pattern)
        .map_err(|e| Error::InvalidParam(format!("filter `{pattern}`: {e}")))?;
    Ok(instances
        .into_iter()
        .filter(|i| pat.matches(&i.check_id))
        .collect())
}

/// Runs instances in parallel; results keep the input order.
pub fn run_all(instances: &[Instance]) -> Vec<Result<Vec<CheckReport>>> {
    instances.par_iter().map(Instance::run).collect()
}
