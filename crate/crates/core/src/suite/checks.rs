use super::numeric::implied_lambda;
use super::{evaluate, ratio, CheckReport, Kind, Method, Params, Plan, Quantity, Row, Sides};
use crate::error::{Error, Result};
use crate::event::{parse_event, BoundEvent};
use crate::graph::{same_face, Graph, Which};
use crate::tree::{decides, is_intersection_with_monotone, sends_all_to_s, verify_continuation, CONTINUATION_EDGES};
use crate::tree::{parse_strategy, BoundStrategy};

pub const CHECK_IDS: &[&str] = &[
    "hk_tree",
    "vdbk_tree",
    "cs_bound",
    "frac1",
    "frac2",
    "planar_dv2",
    "planar_dv2_strong",
    "dv8",
    "dv_union",
    "q2",
    "q2_swapped",
    "conj2_demo",
    "arms23",
    "arms_klm",
    "submult",
    "conj3_scan",
];

pub const SCAN_IDS: &[&str] = &["logconcave", "lambda_monotone", "conj3"];

fn hypothesis(msg: impl Into<String>) -> Error {
    Error::Hypothesis(msg.into())
}

/// Names of the first `n` marked vertices.
fn marks(g: &Graph, n: usize) -> Result<Vec<String>> {
    let names = g.mark_names();
    if names.len() < n {
        return Err(hypothesis(format!(
            "needs {n} marked vertices, graph has {}",
            names.len()
        )));
    }
    Ok(names[..n].iter().map(|s| s.to_string()).collect())
}

fn require_planar_face(g: &Graph, names: &[String], which: Which) -> Result<()> {
    if !g.has_rotation() {
        return Err(hypothesis("needs a planar rotation system"));
    }
    let vs = names.iter().map(|n| g.vertex(n)).collect::<Result<Vec<_>>>()?;
    if !same_face(g, &vs, which)? {
        let face = match which {
            Which::Outer => "the outer face",
            Which::Any => "a common face",
        };
        return Err(hypothesis(format!("{} do not lie on {face}", names.join(", "))));
    }
    Ok(())
}

struct PlanBuilder<'g> {
    g: &'g Graph,
    plan: Plan,
}

impl<'g> PlanBuilder<'g> {
    fn new(g: &'g Graph) -> Self {
        PlanBuilder {
            g,
            plan: Plan {
                strategies: Vec::new(),
                quantities: Vec::new(),
                rows: Vec::new(),
                note: None,
                degenerate: Vec::new(),
            },
        }
    }

    fn event(&self, text: &str) -> Result<BoundEvent> {
        parse_event(text)?.bind(self.g)
    }

    fn push(&mut self, q: Quantity) -> usize {
        self.plan.quantities.push(q);
        self.plan.quantities.len() - 1
    }

    fn prob(&mut self, text: &str) -> Result<usize> {
        let e = self.event(text)?;
        Ok(self.push(Quantity::Prob(e)))
    }

    fn npaths(&mut self, a: &str, b: &str, n: usize) -> Result<usize> {
        if n == 0 {
            return Ok(self.push(Quantity::Sure));
        }
        self.prob(&format!("npaths({a},{b},{n})"))
    }

    fn strategy(&mut self, text: &str) -> Result<usize> {
        let t = parse_strategy(text)?.bind(self.g)?;
        self.plan.strategies.push(t);
        Ok(self.plan.strategies.len() - 1)
    }

    fn row(&mut self, id: &str, kind: Kind, params: String, sides: impl Fn(&[f64]) -> Sides + Send + Sync + 'static) {
        self.plan.rows.push(Row {
            check_id: id.to_string(),
            kind,
            params,
            sides: Box::new(sides),
        });
    }
}

fn two_events(params: &Params, a: String, b: String) -> Result<(String, String)> {
    match params.events.as_slice() {
        [] => Ok((a, b)),
        [x, y] => Ok((x.clone(), y.clone())),
        other => Err(Error::InvalidParam(format!(
            "expected two events, got {}",
            other.len()
        ))),
    }
}

fn epsilon(params: &Params) -> Result<f64> {
    let eps = params.epsilon.unwrap_or(0.2);
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidParam(format!("epsilon {eps} outside (0, 1]")));
    }
    Ok(eps)
}

/// Hypotheses of the CS bound. Returns a note when the graph is too large
/// to verify them.
fn cs_hypotheses(g: &Graph, t1: &BoundStrategy, t2: &BoundStrategy, a: &BoundEvent, b: &BoundEvent) -> Result<Option<String>> {
    if g.edge_count() > CONTINUATION_EDGES {
        return Ok(Some(format!(
            "tree hypotheses not verified above {CONTINUATION_EDGES} edges"
        )));
    }
    if !sends_all_to_s(t1, g)? {
        return Err(hypothesis("the first tree sends an edge to Sbar"));
    }
    if !verify_continuation(t1, t2, g)? {
        return Err(hypothesis("the second tree does not continue the first"));
    }
    if !decides(t1, a, g)? {
        return Err(hypothesis("the first tree does not decide A"));
    }
    if is_intersection_with_monotone(a, b, g)?.is_none() {
        return Err(hypothesis("B is not A intersected with a monotone event"));
    }
    Ok(None)
}

/// `P(B)^2 / P(A) <= P(C1 in B, splice in B)` for `t2` continuing `t1`.
fn cs_plan(g: &Graph, id: &str, params: &Params, t1: &str, t2: &str, a: &str, b: &str) -> Result<Plan> {
    let mut pb = PlanBuilder::new(g);
    let t1 = parse_strategy(t1)?.bind(g)?;
    let t = pb.strategy(t2)?;
    let (ea, eb) = (pb.event(a)?, pb.event(b)?);
    pb.plan.note = cs_hypotheses(g, &t1, &pb.plan.strategies[t], &ea, &eb)?;
    let pa = pb.push(Quantity::Prob(ea));
    let pbb = pb.push(Quantity::Prob(eb.clone()));
    let joint = pb.push(Quantity::Joint(t, eb.clone(), eb));
    pb.row(id, Kind::Theorem, params.describe(), move |v| {
        Sides::new(ratio(v[pbb] * v[pbb], v[pa]), v[joint])
    });
    Ok(pb.plan)
}

/// Implication `premise < delta => value < epsilon`. When the premise
/// fails the row compares `delta <= premise` instead.
fn implication(premise: f64, delta: f64, value: f64, eps: f64) -> Sides {
    if premise < delta {
        Sides {
            lhs: value,
            rhs: eps,
            note: Some("premise met"),
        }
    } else {
        Sides {
            lhs: delta,
            rhs: premise,
            note: Some("premise not met"),
        }
    }
}

fn plan_check(id: &str, g: &Graph, params: &Params) -> Result<Plan> {
    let desc = params.describe();
    match id {
        "hk_tree" | "vdbk_tree" => {
            let m = marks(g, 2)?;
            let second = if g.marks().len() >= 3 {
                format!("{},{}", m[1], g.mark_names()[2])
            } else {
                format!("{},{}", m[0], m[1])
            };
            let (a, b) = two_events(params, format!("{},{}", m[0], m[1]), second)?;
            let default = format!("bfs_cluster:{}", m[0]);
            let mut pb = PlanBuilder::new(g);
            let t = pb.strategy(params.strategy.as_deref().unwrap_or(&default))?;
            let (ea, eb) = (pb.event(&a)?, pb.event(&b)?);
            ea.require_increasing(g)?;
            eb.require_increasing(g)?;
            let pa = pb.push(Quantity::Prob(ea.clone()));
            let pbb = pb.push(Quantity::Prob(eb.clone()));
            if id == "hk_tree" {
                let j = pb.push(Quantity::Joint(t, ea, eb));
                pb.row(id, Kind::Theorem, desc, move |v| Sides::new(v[pa] * v[pbb], v[j]));
            } else {
                let j = pb.push(Quantity::SqS(t, ea, eb));
                pb.row(id, Kind::Theorem, desc, move |v| Sides::new(v[j], v[pa] * v[pbb]));
            }
            Ok(pb.plan)
        }
        "cs_bound" => {
            if let (Some(t1), Some(t2), [ea, eb]) = (&params.prefix, &params.strategy, params.events.as_slice()) {
                return cs_plan(g, id, params, t1, t2, ea, eb);
            }
            let m = marks(g, 3)?;
            let (a, b, c) = (&m[0], &m[1], &m[2]);
            let prefix = format!("dfs_stop_at:{a},{b},{c}");
            let t1 = params.prefix.clone().unwrap_or(prefix.clone());
            let t2 = params
                .strategy
                .clone()
                .unwrap_or(format!("seq:[{prefix};rest:Sbar]"));
            let (ea, eb) = two_events(params, format!("{a},{b} U {a},{c}"), format!("{a},{b},{c}"))?;
            cs_plan(g, id, params, &t1, &t2, &ea, &eb)
        }
        "frac1" | "frac2" => {
            let m = marks(g, 3)?;
            let (a, b, c) = (&m[0], &m[1], &m[2]);
            let t1 = format!("bfs_cluster:{a}");
            let t2 = params.strategy.clone().unwrap_or(t1.clone());
            let ea = format!("{a}|{b} U {a}|{c}");
            let eb = if id == "frac1" {
                format!("{a}|{b}|{c}")
            } else {
                format!("{a}|{b},{c}")
            };
            cs_plan(g, id, params, &t1, &t2, &ea, &eb)
        }
        "planar_dv2" | "planar_dv2_strong" | "dv8" | "dv_union" => {
            let m = marks(g, 3)?;
            let (a, b, c) = (&m[0], &m[1], &m[2]);
            if id.starts_with("planar") {
                require_planar_face(g, &m, Which::Outer)?;
            }
            let mut pb = PlanBuilder::new(g);
            let abc = pb.prob(&format!("{a},{b},{c}"))?;
            let ab = pb.prob(&format!("{a},{b}"))?;
            let bc = pb.prob(&format!("{b},{c}"))?;
            let ac = pb.prob(&format!("{a},{c}"))?;
            match id {
                "planar_dv2" => pb.row(id, Kind::Theorem, desc, move |v| {
                    Sides::new(v[abc] * v[abc], 2.0 * v[ab] * v[bc] * v[ac])
                }),
                "planar_dv2_strong" => pb.row(id, Kind::Report, desc, move |v| {
                    Sides::new(v[abc] * v[abc], v[ac] * (2.0 * v[ab] * v[bc] - v[abc] * v[abc]))
                }),
                "dv8" => pb.row(id, Kind::Theorem, desc, move |v| {
                    Sides::new(v[abc] * v[abc], 8.0 * v[ab] * v[ac] * v[bc])
                }),
                _ => {
                    let u = pb.prob(&format!("{a},{b} U {a},{c}"))?;
                    pb.row(id, Kind::Theorem, desc, move |v| {
                        Sides::new(v[abc] * v[abc], 2.0 * v[u] * v[u] * v[bc])
                    })
                }
            }
            Ok(pb.plan)
        }
        "q2" | "q2_swapped" => {
            let m = marks(g, 3)?;
            let (a, b, c) = (&m[0], &m[1], &m[2]);
            let mut pb = PlanBuilder::new(g);
            let x = pb.prob(&format!("{a}|{b}|{c}"))?;
            let u_ab_ac = pb.prob(&format!("{a}|{b} U {a}|{c}"))?;
            let u_ab_bc = pb.prob(&format!("{a}|{b} U {b}|{c}"))?;
            let u_ac_bc = pb.prob(&format!("{a}|{c} U {b}|{c}"))?;
            // the union squared on the right is the one left out of the fractions
            let (sq, f1, f2) = if id == "q2" {
                (u_ab_ac, u_ab_bc, u_ac_bc)
            } else {
                (u_ab_bc, u_ab_ac, u_ac_bc)
            };
            pb.row(id, Kind::Theorem, desc, move |v| {
                let x2 = v[x] * v[x];
                Sides::new(ratio(x2, v[f1]) + ratio(x2, v[f2]), v[x] + v[sq] * v[sq])
            });
            Ok(pb.plan)
        }
        "conj2_demo" => {
            let m = marks(g, 3)?;
            let (a, b, c) = (&m[0], &m[1], &m[2]);
            let eps = epsilon(params)?;
            let delta = eps.powi(3) / 4.0;
            let mut pb = PlanBuilder::new(g);
            let ab_c = pb.prob(&format!("{a},{b}|{c}"))?;
            let ac_b = pb.prob(&format!("{a},{c}|{b}"))?;
            let abc = pb.prob(&format!("{a},{b},{c}"))?;
            let sep = pb.prob(&format!("{a}|{b}|{c}"))?;
            pb.row(id, Kind::Theorem, desc, move |v| {
                implication(v[ab_c].max(v[ac_b]), delta, v[abc].min(v[sep]), eps)
            });
            Ok(pb.plan)
        }
        "conj3_scan" => {
            let m = marks(g, 3)?;
            let (a, b, c) = (&m[0], &m[1], &m[2]);
            let eps = epsilon(params)?;
            let delta = eps.powi(3) / 4.0;
            let mut pb = PlanBuilder::new(g);
            let abc = pb.prob(&format!("{a},{b},{c}"))?;
            let sep = pb.prob(&format!("{a}|{b}|{c}"))?;
            let ac_b = pb.prob(&format!("{a},{c}|{b}"))?;
            let a_bc = pb.prob(&format!("{a}|{b},{c}"))?;
            let ab_c = pb.prob(&format!("{a},{b}|{c}"))?;
            pb.row(id, Kind::Conjecture, desc, move |v| {
                let q = v[abc] * v[sep] - v[ac_b] * v[a_bc];
                implication(v[ab_c], delta, q, eps)
            });
            Ok(pb.plan)
        }
        "arms23" | "arms_klm" => {
            let m = marks(g, 2)?;
            require_planar_face(g, &m, Which::Any)?;
            let [n, k, l, mm] = if id == "arms23" {
                [3, 2, 2, 2]
            } else {
                params.nklm.unwrap_or([3, 2, 2, 2])
            };
            if n == 0 || k > n || l > n || mm > n || k + l + mm != 2 * n {
                return Err(Error::InvalidParam(format!(
                    "(n, k, l, m) = ({n}, {k}, {l}, {mm}) needs k, l, m <= n and k + l + m = 2n"
                )));
            }
            let mut pb = PlanBuilder::new(g);
            let f = [n, k, l, mm]
                .iter()
                .map(|&i| pb.npaths(&m[0], &m[1], i))
                .collect::<Result<Vec<_>>>()?;
            pb.row(id, Kind::Theorem, desc, move |v| {
                Sides::new(v[f[0]] * v[f[0]], v[f[1]] * v[f[2]] * v[f[3]])
            });
            Ok(pb.plan)
        }
        "submult" => {
            let m = marks(g, 2)?;
            let [n, k] = params.nm.unwrap_or([1, 1]);
            let mut pb = PlanBuilder::new(g);
            let sum = pb.npaths(&m[0], &m[1], n + k)?;
            let fn_ = pb.npaths(&m[0], &m[1], n)?;
            let fk = pb.npaths(&m[0], &m[1], k)?;
            pb.row(id, Kind::Theorem, desc, move |v| Sides::new(v[sum], v[fn_] * v[fk]));
            Ok(pb.plan)
        }
        _ => Err(Error::InvalidParam(format!("unknown check `{id}`"))),
    }
}

pub fn run_check(id: &str, g: &Graph, graph: &str, params: &Params, method: Method) -> Result<CheckReport> {
    let plan = plan_check(id, g, params)?;
    Ok(evaluate(g, graph, &plan, method)?.remove(0))
}

fn scan_plan(id: &str, g: &Graph, params: &Params) -> Result<Plan> {
    if id == "conj3" {
        return plan_check("conj3_scan", g, params);
    }
    let m = marks(g, 2)?;
    let (a, b) = (g.vertex(&m[0])?, g.vertex(&m[1])?);
    let max_n = params
        .max_n
        .unwrap_or_else(|| g.incident(a).len().min(g.incident(b).len()));
    let mut pb = PlanBuilder::new(g);
    // f[i] is the index of f(i + 1)
    let f = (1..=max_n)
        .map(|n| pb.npaths(&m[0], &m[1], n))
        .collect::<Result<Vec<_>>>()?;
    pb.plan.degenerate = f.clone();
    let base = params.describe();
    let at = |n: usize| {
        if base.is_empty() {
            format!("n={n}")
        } else {
            format!("{base} n={n}")
        }
    };
    match id {
        "logconcave" => {
            for n in 2..max_n {
                let (lo, mid, hi) = (f[n - 2], f[n - 1], f[n]);
                pb.row("logconcave", Kind::Conjecture, at(n), move |v| {
                    Sides::new(v[lo] * v[hi], v[mid] * v[mid])
                });
            }
            for n in 1..max_n {
                let (cur, next) = (f[n - 1], f[n]);
                pb.row("log_rate", Kind::Conjecture, at(n), move |v| {
                    Sides::new(v[next].ln() / (n + 1) as f64, v[cur].ln() / n as f64)
                });
            }
        }
        "lambda_monotone" => {
            for k in 1..max_n {
                let (cur, next) = (f[k - 1], f[k]);
                pb.row("lambda_monotone", Kind::Conjecture, at(k), move |v| {
                    let lam = |k: usize, x: f64| implied_lambda(k as u32, x).unwrap_or(f64::NAN);
                    Sides::new(lam(k + 1, v[next]), lam(k, v[cur]))
                });
            }
        }
        _ => return Err(Error::InvalidParam(format!("unknown scan `{id}`"))),
    }
    if pb.plan.rows.is_empty() {
        return Err(Error::InvalidParam(format!(
            "scan range 1..={max_n} is too short for `{id}`"
        )));
    }
    Ok(pb.plan)
}

/// Runs a conjecture scan; one report per scanned index.
pub fn scan_conjectures(id: &str, g: &Graph, graph: &str, params: &Params, method: Method) -> Result<Vec<CheckReport>> {
    let plan = scan_plan(id, g, params)?;
    evaluate(g, graph, &plan, method)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{generate, EdgeProb, Family};
    use crate::suite::Verdict;

    fn family(f: Family, p: EdgeProb) -> Graph {
        generate(f, p).unwrap()
    }

    fn exact(id: &str, g: &Graph) -> CheckReport {
        run_check(id, g, "g", &Params::default(), Method::Exact).unwrap()
    }

    fn close(x: f64, y: f64) -> bool {
        (x - y).abs() < 1e-12
    }

    #[test]
    fn triangle_values() {
        let g = family(Family::Cycle(3), EdgeProb::Uniform(0.5));
        let r = exact("planar_dv2", &g);
        assert!(close(r.lhs, 0.25) && close(r.rhs, 2.0 * 0.625f64.powi(3)));
        assert_eq!(r.verdict, Verdict::Holds);
        let r = exact("dv8", &g);
        assert!(close(r.rhs, 8.0 * 0.625f64.powi(3)));
        assert!(close(r.slack, 8.0 * 0.625f64.powi(3) - 0.25));
        let r = exact("q2", &g);
        assert!(close(r.lhs, 0.0625) && close(r.rhs, 0.375), "{r:?}");
        let r = exact("q2_swapped", &g);
        assert!(close(r.lhs, 0.0625) && close(r.rhs, 0.375));
    }

    #[test]
    fn arms_on_three_routes() {
        let g = family(Family::Parallel(3), EdgeProb::Route(0.5));
        let r = exact("arms23", &g);
        assert!(close(r.lhs, 0.015625) && close(r.rhs, 0.125), "{r:?}");
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn arms_klm_validation() {
        let g = family(Family::Parallel(3), EdgeProb::Route(0.5));
        let mut p = Params {
            nklm: Some([3, 3, 2, 1]),
            ..Params::default()
        };
        let r = run_check("arms_klm", &g, "g", &p, Method::Exact).unwrap();
        // f(3)^2 <= f(3) f(2) f(1): 1/64 <= 1/8 * 1/2 * 7/8
        assert!(close(r.lhs, 1.0 / 64.0) && close(r.rhs, 7.0 / 128.0));
        p.nklm = Some([3, 4, 1, 1]);
        assert!(run_check("arms_klm", &g, "g", &p, Method::Exact).is_err());
        p.nklm = Some([3, 2, 2, 1]);
        assert!(run_check("arms_klm", &g, "g", &p, Method::Exact).is_err());
    }

    #[test]
    fn logconcave_on_four_routes() {
        let g = family(Family::Parallel(4), EdgeProb::Route(0.5));
        let rs = scan_conjectures("logconcave", &g, "g", &Params::default(), Method::Exact).unwrap();
        let lc: Vec<_> = rs.iter().filter(|r| r.check_id == "logconcave").collect();
        assert_eq!(lc.len(), 2);
        assert!(close(lc[0].lhs, 75.0 / 256.0) && close(lc[0].rhs, 121.0 / 256.0));
        assert!(close(lc[1].lhs, 11.0 / 256.0) && close(lc[1].rhs, 25.0 / 256.0));
        assert!(rs.iter().all(|r| r.verdict == Verdict::Holds));
        let ls = scan_conjectures("lambda_monotone", &g, "g", &Params::default(), Method::Exact).unwrap();
        assert_eq!(ls.len(), 3);
        assert!(ls.iter().all(|r| r.verdict == Verdict::Holds), "{ls:?}");
    }

    #[test]
    fn degenerate_scan_is_an_error() {
        let g = family(Family::Parallel(3), EdgeProb::Route(1.0));
        let e = scan_conjectures("lambda_monotone", &g, "g", &Params::default(), Method::Exact);
        assert!(matches!(e, Err(Error::Hypothesis(_))), "{e:?}");
    }

    #[test]
    fn planar_needs_outer_face() {
        let g = family(Family::Complete(4), EdgeProb::Uniform(0.5));
        assert!(matches!(
            run_check("planar_dv2", &g, "g", &Params::default(), Method::Exact),
            Err(Error::Hypothesis(_))
        ));
        assert_eq!(exact("dv8", &g).verdict, Verdict::Holds);
    }

    #[test]
    fn cs_family_holds_on_small_graphs() {
        for f in [Family::Cycle(3), Family::Cycle(4), Family::Theta(2)] {
            let g = family(f, EdgeProb::Uniform(0.5));
            for id in ["cs_bound", "frac1", "frac2", "hk_tree", "vdbk_tree"] {
                let r = exact(id, &g);
                assert_eq!(r.verdict, Verdict::Holds, "{id}: {r:?}");
                assert!(r.note.is_none());
            }
        }
    }

    #[test]
    fn cs_rejects_a_prefix_with_sbar() {
        let g = family(Family::Cycle(3), EdgeProb::Uniform(0.5));
        let p = Params {
            prefix: Some("dfs:a,id,Sbar".into()),
            strategy: Some("seq:[dfs:a,id,Sbar;rest:S]".into()),
            ..Params::default()
        };
        let e = run_check("cs_bound", &g, "g", &p, Method::Exact);
        assert!(matches!(e, Err(Error::Hypothesis(_))), "{e:?}");
    }

    #[test]
    fn conj2_branches() {
        let g = family(Family::Cycle(3), EdgeProb::Uniform(0.5));
        let r = exact("conj2_demo", &g);
        assert_eq!(r.note.as_deref(), Some("premise not met"));
        assert_eq!(r.verdict, Verdict::Holds);
        let g = family(Family::Cycle(3), EdgeProb::Uniform(0.99));
        let r = exact("conj2_demo", &g);
        assert_eq!(r.note.as_deref(), Some("premise met"));
        assert_eq!(r.verdict, Verdict::Holds);
    }

    #[test]
    fn mc_agrees_with_exact() {
        let g = family(Family::Theta(2), EdgeProb::Uniform(0.5));
        for id in ["dv8", "hk_tree", "vdbk_tree", "q2"] {
            let e = exact(id, &g);
            let m = run_check(id, &g, "g", &Params::default(), Method::mc(100_000, 3)).unwrap();
            let se = m.std_err.unwrap();
            assert!((e.slack - m.slack).abs() <= 4.0 * se.max(1e-9), "{id}: {e:?} {m:?}");
            assert_ne!(m.verdict, Verdict::Violated);
        }
    }

    #[test]
    fn unknown_ids() {
        let g = family(Family::Cycle(3), EdgeProb::Uniform(0.5));
        assert!(run_check("nope", &g, "g", &Params::default(), Method::Exact).is_err());
        assert!(scan_conjectures("nope", &g, "g", &Params::default(), Method::Exact).is_err());
    }
}
