//! Named checks of correlation inequalities with uniform reports.
//!
//! Every check is stored as `lhs <= rhs`; `slack = rhs - lhs`.

mod checks;
pub mod corpus;
mod numeric;

pub use checks::{run_check, scan_conjectures, CHECK_IDS, SCAN_IDS};
pub use numeric::{alpha3_cubic, alpha3_root, implied_lambda, poisson_tail};

use crate::bits::EdgeSet;
use crate::error::{Error, Result};
use crate::event::BoundEvent;
use crate::exact::{ExactEngine, Limits, PairQuery, TOLERANCE};
use crate::graph::Graph;
use crate::mc::{mc_counts, pair_hit};
use crate::tree::BoundStrategy;
use serde::Serialize;
use std::time::Instant;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Violated,
    Inconclusive,
}

/// What a violation would mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// A proven inequality: a violation is a bug.
    Theorem,
    /// An open conjecture: a violation is a finding.
    Conjecture,
    /// Printed only; never affects the exit status.
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Exact,
    Mc { samples: u64, seed: u64, sigma: f64 },
}

impl Method {
    pub fn mc(samples: u64, seed: u64) -> Self {
        Method::Mc {
            samples,
            seed,
            sigma: 3.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub check_id: String,
    pub graph: String,
    pub kind: Kind,
    pub method: String,
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    pub verdict: Verdict,
    pub tolerance: Option<f64>,
    pub sigma: Option<f64>,
    /// Standard error of the slack (Monte Carlo only).
    pub std_err: Option<f64>,
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    pub runtime_ms: Option<f64>,
    pub params: String,
    pub note: Option<String>,
}

impl CheckReport {
    /// A violated theorem or conjecture.
    pub fn is_failure(&self) -> bool {
        self.verdict == Verdict::Violated && self.kind != Kind::Report
    }
}

pub fn exact_verdict(slack: f64, tolerance: f64) -> Verdict {
    if slack >= -tolerance {
        Verdict::Holds
    } else {
        Verdict::Violated
    }
}

pub fn mc_verdict(slack: f64, std_err: f64, sigma: f64) -> Verdict {
    if slack - sigma * std_err >= 0.0 {
        Verdict::Holds
    } else if slack + sigma * std_err < 0.0 {
        Verdict::Violated
    } else {
        Verdict::Inconclusive
    }
}

/// Check parameters. Unset fields take per-check defaults.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Params {
    pub strategy: Option<String>,
    /// First tree of the CS bound.
    pub prefix: Option<String>,
    pub events: Vec<String>,
    pub epsilon: Option<f64>,
    /// `(n, k, l, m)` for `arms_klm`.
    pub nklm: Option<[usize; 4]>,
    /// `(n, m)` for `submult`.
    pub nm: Option<[usize; 2]>,
    /// Largest path count in scans.
    pub max_n: Option<usize>,
}

impl Params {
    pub fn describe(&self) -> String {
        let mut parts = Vec::new();
        if let Some(s) = &self.prefix {
            parts.push(format!("prefix={s}"));
        }
        if let Some(s) = &self.strategy {
            parts.push(format!("strategy={s}"));
        }
        if !self.events.is_empty() {
            parts.push(format!("events={}", self.events.join(" ; ")));
        }
        if let Some(e) = self.epsilon {
            parts.push(format!("epsilon={e}"));
        }
        if let Some(x) = self.nklm {
            parts.push(format!("nklm={},{},{},{}", x[0], x[1], x[2], x[3]));
        }
        if let Some(x) = self.nm {
            parts.push(format!("nm={},{}", x[0], x[1]));
        }
        if let Some(n) = self.max_n {
            parts.push(format!("max_n={n}"));
        }
        parts.join(" ")
    }
}

/// One probability the checks are built from.
pub(crate) enum Quantity {
    /// Constant one.
    Sure,
    Prob(BoundEvent),
    /// `P(C1 in A, splice in B)` under strategy `t`.
    Joint(usize, BoundEvent, BoundEvent),
    /// `P(A box_S B)` under strategy `t`.
    SqS(usize, BoundEvent, BoundEvent),
}

pub(crate) struct Sides {
    pub lhs: f64,
    pub rhs: f64,
    pub note: Option<&'static str>,
}

impl Sides {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        Sides { lhs, rhs, note: None }
    }
}

pub(crate) type SidesFn = Box<dyn Fn(&[f64]) -> Sides + Send + Sync>;

/// One inequality over the plan's quantities.
pub(crate) struct Row {
    pub check_id: String,
    pub kind: Kind,
    pub params: String,
    pub sides: SidesFn,
}

/// Quantities shared by one or more inequalities.
pub(crate) struct Plan {
    pub strategies: Vec<BoundStrategy>,
    pub quantities: Vec<Quantity>,
    pub rows: Vec<Row>,
    pub note: Option<String>,
    /// Quantities that must lie strictly inside (0, 1).
    pub degenerate: Vec<usize>,
}

/// `x / y`, with `0 / 0 = 0`.
pub(crate) fn ratio(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x / y
    }
}

fn exact_values(g: &Graph, plan: &Plan) -> Result<Vec<f64>> {
    let engine = ExactEngine::new(Limits::default());
    let mut values = vec![1.0; plan.quantities.len()];
    let singles: Vec<(usize, &BoundEvent)> = plan
        .quantities
        .iter()
        .enumerate()
        .filter_map(|(i, q)| match q {
            Quantity::Prob(e) => Some((i, e)),
            _ => None,
        })
        .collect();
    if !singles.is_empty() {
        let events: Vec<&BoundEvent> = singles.iter().map(|&(_, e)| e).collect();
        for ((i, _), p) in singles.iter().zip(engine.probs(g, &events)?) {
            values[*i] = p;
        }
    }
    for (t, strategy) in plan.strategies.iter().enumerate() {
        let mut slots = Vec::new();
        let mut queries = Vec::new();
        for (i, q) in plan.quantities.iter().enumerate() {
            match q {
                Quantity::Joint(s, a, b) if *s == t => queries.push(PairQuery::Joint(a, b)),
                Quantity::SqS(s, a, b) if *s == t => queries.push(PairQuery::SqS(a, b)),
                _ => continue,
            }
            slots.push(i);
        }
        if !queries.is_empty() {
            for (i, p) in slots.into_iter().zip(engine.pairs(g, strategy, &queries)?) {
                values[i] = p;
            }
        }
    }
    Ok(values)
}

fn mc_run(g: &Graph, plan: &Plan, samples: u64, seed: u64) -> Result<crate::mc::JointCounts> {
    let pairs = plan
        .quantities
        .iter()
        .any(|q| matches!(q, Quantity::Joint(..) | Quantity::SqS(..)));
    let draws = if pairs { 2 } else { 1 };
    let k = plan.quantities.len();
    mc_counts(g, samples, seed, draws, k, |cs, out| {
        let mut sets: Vec<Option<EdgeSet>> = vec![None; plan.strategies.len()];
        for (i, q) in plan.quantities.iter().enumerate() {
            out[i] = match q {
                Quantity::Sure => true,
                Quantity::Prob(e) => e.eval_open(g, cs[0].open_edges()),
                Quantity::Joint(t, a, b) | Quantity::SqS(t, a, b) => {
                    if sets[*t].is_none() {
                        sets[*t] = Some(plan.strategies[*t].run(g, &cs[0], &cs[1])?.s);
                    }
                    let s = sets[*t].as_ref().expect("set above");
                    let query = match q {
                        Quantity::Joint(..) => PairQuery::Joint(a, b),
                        _ => PairQuery::SqS(a, b),
                    };
                    pair_hit(g, &query, &cs[0], &cs[1], s)?
                }
            };
        }
        Ok(())
    })
}

/// Evaluates every row of a plan.
pub(crate) fn evaluate(g: &Graph, graph: &str, plan: &Plan, method: Method) -> Result<Vec<CheckReport>> {
    let start = Instant::now();
    let mut reports = Vec::with_capacity(plan.rows.len());
    let base = |row: &Row, sides: &Sides| CheckReport {
        check_id: row.check_id.clone(),
        graph: graph.to_string(),
        kind: row.kind,
        method: String::new(),
        lhs: sides.lhs,
        rhs: sides.rhs,
        slack: sides.rhs - sides.lhs,
        verdict: Verdict::Holds,
        tolerance: None,
        sigma: None,
        std_err: None,
        samples: None,
        seed: None,
        runtime_ms: None,
        params: row.params.clone(),
        note: join_notes(plan.note.as_deref(), sides.note),
    };
    match method {
        Method::Exact => {
            let values = exact_values(g, plan)?;
            check_degenerate(plan, &values)?;
            for row in &plan.rows {
                let sides = (row.sides)(&values);
                let mut r = base(row, &sides);
                r.method = "exact".into();
                r.verdict = exact_verdict(r.slack, TOLERANCE);
                r.tolerance = Some(TOLERANCE);
                reports.push(r);
            }
        }
        Method::Mc { samples, seed, sigma } => {
            if !(sigma > 0.0 && sigma.is_finite()) {
                return Err(Error::InvalidParam(format!("sigma level {sigma}")));
            }
            let counts = mc_run(g, plan, samples, seed)?;
            let means = counts.means();
            check_degenerate(plan, &means)?;
            for row in &plan.rows {
                let sides = (row.sides)(&means);
                let slack_of = |x: &[f64]| {
                    let s = (row.sides)(x);
                    s.rhs - s.lhs
                };
                let se = counts.delta_std_err(&slack_of);
                let mut r = base(row, &sides);
                r.method = "mc".into();
                r.verdict = mc_verdict(r.slack, se, sigma);
                r.sigma = Some(sigma);
                r.std_err = Some(se);
                r.samples = Some(samples);
                r.seed = Some(seed);
                reports.push(r);
            }
        }
    }
    let ms = start.elapsed().as_secs_f64() * 1e3;
    for r in &mut reports {
        r.runtime_ms = Some(ms);
    }
    Ok(reports)
}

fn check_degenerate(plan: &Plan, values: &[f64]) -> Result<()> {
    for &i in &plan.degenerate {
        let x = values[i];
        if !(x > 0.0 && x < 1.0) {
            return Err(Error::Hypothesis(format!(
                "scanned probability {x} is not strictly between 0 and 1"
            )));
        }
    }
    Ok(())
}

fn join_notes(a: Option<&str>, b: Option<&str>) -> Option<String> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.to_string()),
        (Some(x), Some(y)) => Some(format!("{x}; {y}")),
    }
}
