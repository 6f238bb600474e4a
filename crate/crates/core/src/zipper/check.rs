use super::predicate::SymbolInfo;
use super::strategy::gen_fold;
use super::{check_spaces, Direction, DualSpace, GenEvent, GenStrategy};
use crate::error::{Error, Result};
use crate::exact::{CompensatedSum, TOLERANCE};
use crate::graph::Graph;
use serde::Serialize;
use std::collections::BTreeSet;

/// Most event evaluations the condition check will do.
pub const CONDITION_LIMIT: usize = 1_000_000;

/// One local situation at an edge: the symbols of each space that make the
/// event hold, and their masses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Case {
    pub x1: Vec<String>,
    pub x2: Vec<String>,
    pub mu1: f64,
    pub mu2: f64,
}

impl Case {
    fn new(ds: &DualSpace, member: impl Fn(&str) -> bool) -> Self {
        let pick = |labels: &[String]| labels.iter().filter(|l| member(l)).cloned().collect();
        Case {
            x1: pick(&ds.omega1.labels),
            x2: pick(&ds.omega2.labels),
            mu1: ds.omega1.measure(&member),
            mu2: ds.omega2.measure(&member),
        }
    }

    /// How far the case is from satisfying the condition; positive means
    /// it fails.
    pub fn gap(&self, direction: Direction) -> f64 {
        match direction {
            Direction::Forward => self.mu1 - self.mu2,
            Direction::Reverse => self.mu2 - self.mu1,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct WorstCase {
    pub edge: String,
    /// Symbols on the other edges, by edge index (the checked edge is `*`).
    pub context: Vec<String>,
    pub case: Case,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConditionReport {
    pub direction: Direction,
    pub cases: usize,
    /// Largest gap seen; the condition holds iff it is at most the tolerance.
    pub worst_gap: f64,
    pub holds: bool,
    pub worst: Option<WorstCase>,
    /// Every distinct local situation met, in first-seen order.
    pub observed: Vec<Case>,
}

fn info_table(event: &GenEvent, labels: &[String]) -> Result<Vec<SymbolInfo>> {
    labels.iter().map(|l| event.info(l)).collect()
}

/// Checks `mu1(X1) <= mu2(X2)` (or the reverse, per the spaces' direction)
/// for every edge and every assignment of symbols to the other edges.
pub fn check_zipper_condition(
    g: &Graph,
    spaces: &[DualSpace],
    event: &GenEvent,
) -> Result<ConditionReport> {
    check_spaces(g, spaces)?;
    event.validate(g, spaces)?;
    let direction = shared_direction(spaces)?;
    let m = g.edge_count();
    let universes: Vec<Vec<String>> = spaces.iter().map(|ds| ds.universe()).collect();
    let infos: Vec<Vec<SymbolInfo>> = universes
        .iter()
        .map(|u| info_table(event, u))
        .collect::<Result<_>>()?;
    let mut work = 0f64;
    for e in 0..m {
        let others: f64 = (0..m).filter(|&f| f != e).map(|f| universes[f].len() as f64).product();
        work += others * universes[e].len() as f64;
    }
    if work > CONDITION_LIMIT as f64 {
        return Err(Error::SizeGuard {
            what: "evaluations for the coupling condition",
            actual: work.min(usize::MAX as f64) as usize,
            limit: CONDITION_LIMIT,
        });
    }

    let mut report = ConditionReport {
        direction,
        cases: 0,
        worst_gap: f64::NEG_INFINITY,
        holds: true,
        worst: None,
        observed: Vec::new(),
    };
    let mut seen = BTreeSet::new();
    let mut current = vec![infos[0][0]; m];
    let mut idx = vec![0usize; m];
    for e in 0..m {
        let others: Vec<usize> = (0..m).filter(|&f| f != e).collect();
        idx.iter_mut().for_each(|i| *i = 0);
        loop {
            for &f in &others {
                current[f] = infos[f][idx[f]];
            }
            let mut hits = Vec::new();
            for (k, &info) in infos[e].iter().enumerate() {
                current[e] = info;
                if event.holds(g, &current) {
                    hits.push(universes[e][k].as_str());
                }
            }
            let case = Case::new(&spaces[e], |l| hits.contains(&l));
            report.cases += 1;
            let gap = case.gap(direction);
            if gap > report.worst_gap {
                report.worst_gap = gap;
                let context = (0..m)
                    .map(|f| if f == e { "*".to_string() } else { universes[f][idx[f]].clone() })
                    .collect();
                report.worst = Some(WorstCase {
                    edge: g.edge(e).id.clone(),
                    context,
                    case: case.clone(),
                });
            }
            let key = (case.x1.clone(), case.x2.clone(), case.mu1.to_bits(), case.mu2.to_bits());
            if seen.insert(key) {
                report.observed.push(case);
            }
            // advance the odometer over the other edges
            let mut k = 0;
            while k < others.len() {
                let f = others[k];
                idx[f] += 1;
                if idx[f] < universes[f].len() {
                    break;
                }
                idx[f] = 0;
                k += 1;
            }
            if k == others.len() {
                break;
            }
        }
    }
    report.holds = report.worst_gap <= TOLERANCE;
    Ok(report)
}

fn shared_direction(spaces: &[DualSpace]) -> Result<Direction> {
    let d = spaces.first().map_or(Direction::Forward, |ds| ds.direction);
    if spaces.iter().any(|ds| ds.direction != d) {
        return Err(Error::InvalidParam("edges disagree on the condition direction".into()));
    }
    Ok(d)
}

#[derive(Clone, Debug, Serialize)]
pub struct GenInequalityReport {
    pub direction: Direction,
    /// Probability under the tree generating everything from the first space.
    pub p_first: f64,
    pub p_mixed: f64,
    /// Probability under the tree generating everything from the second space.
    pub p_second: f64,
    /// `p_mixed - p_first`, sign flipped for the reverse direction.
    pub lower_slack: f64,
    /// `p_second - p_mixed`, sign flipped for the reverse direction.
    pub upper_slack: f64,
    pub holds: bool,
    /// For the colored spaces with at most two factors: whether the three
    /// probabilities agree.
    pub equalities: Option<bool>,
}

fn gen_prob(g: &Graph, spaces: &[DualSpace], t: &GenStrategy, event: &GenEvent) -> Result<f64> {
    let tables: Vec<[Vec<SymbolInfo>; 2]> = spaces
        .iter()
        .map(|ds| Ok([info_table(event, &ds.omega1.labels)?, info_table(event, &ds.omega2.labels)?]))
        .collect::<Result<_>>()?;
    let mut sum = CompensatedSum::default();
    let mut infos = Vec::with_capacity(g.edge_count());
    gen_fold(g, spaces, t, &mut |c, w| {
        infos.clear();
        infos.extend(
            c.0.iter()
                .enumerate()
                .map(|(e, cell)| tables[e][cell.choice as usize - 1][cell.symbol]),
        );
        if event.holds(g, &infos) {
            sum.add(w);
        }
    })?;
    Ok(sum.value())
}

/// Exact probabilities of the event under the all-first tree, `t`, and the
/// all-second tree, with the two signed slacks of the sandwich.
pub fn check_gen_inequality(
    g: &Graph,
    spaces: &[DualSpace],
    t: &GenStrategy,
    event: &GenEvent,
) -> Result<GenInequalityReport> {
    check_spaces(g, spaces)?;
    event.validate(g, spaces)?;
    let direction = shared_direction(spaces)?;
    let p_first = gen_prob(g, spaces, &GenStrategy::All(1), event)?;
    let p_mixed = gen_prob(g, spaces, t, event)?;
    let p_second = gen_prob(g, spaces, &GenStrategy::All(2), event)?;
    let (lower_slack, upper_slack) = match direction {
        Direction::Forward => (p_mixed - p_first, p_second - p_mixed),
        Direction::Reverse => (p_first - p_mixed, p_mixed - p_second),
    };
    let two_factor = matches!(event, GenEvent::Product(es) if es.len() <= 2);
    let colored = spaces.iter().all(|ds| ds.name == "colored");
    let equalities = (two_factor && colored).then(|| {
        (p_mixed - p_first).abs() <= TOLERANCE && (p_second - p_mixed).abs() <= TOLERANCE
    });
    Ok(GenInequalityReport {
        direction,
        p_first,
        p_mixed,
        p_second,
        lower_slack,
        upper_slack,
        holds: lower_slack >= -TOLERANCE && upper_slack >= -TOLERANCE,
        equalities,
    })
}

/// Shape of the local situations to tabulate.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CaseKind {
    /// Bowtie events: the set of witness claims on the edge that can be
    /// completed is any up-closed family of subsets of `{A, B}`.
    Bowtie,
    /// Product events over `k` digits: each digit contributes no value,
    /// `{1}` or `{0, 1}`.
    Product(usize),
}

/// Every local situation an event of the given shape can produce at one
/// edge, deduplicated by the pair of symbol sets.
pub fn case_table(ds: &DualSpace, kind: CaseKind) -> Result<Vec<Case>> {
    let universe = ds.universe();
    let mut out: Vec<Case> = Vec::new();
    let mut push = |case: Case| {
        if !out.iter().any(|c| c.x1 == case.x1 && c.x2 == case.x2) {
            out.push(case);
        }
    };
    match kind {
        CaseKind::Bowtie => {
            let probe = GenEvent::Bowtie(Vec::new());
            let claims: Vec<u8> = universe
                .iter()
                .map(|l| probe.info(l).map(|i| i.claims))
                .collect::<Result<_>>()?;
            // patterns: bit 0 none, 1 A only, 2 B only, 3 both
            let allowed = |c: u8| 1u8 | (c & 1) << 1 | (c & 2) << 1 | (c & 4) << 1;
            let up_closed = |f: u8| {
                let sup = [0b1111u8, 0b1010, 0b1100, 0b1000];
                (0..4).all(|p| f >> p & 1 == 0 || f & sup[p] == sup[p])
            };
            for fam in (0u8..16).filter(|&f| up_closed(f)) {
                push(Case::new(ds, |l| {
                    let k = universe.iter().position(|u| u == l).unwrap();
                    allowed(claims[k]) & fam != 0
                }));
            }
        }
        CaseKind::Product(k) => {
            let probe = GenEvent::Product(Vec::new());
            let digits: Vec<Option<u32>> = universe
                .iter()
                .map(|l| probe.info(l).ok().filter(|_| l.len() >= k).map(|i| i.digits))
                .collect();
            for code in 0..3usize.pow(k as u32) {
                let kinds: Vec<usize> = (0..k).map(|i| code / 3usize.pow(i as u32) % 3).collect();
                push(Case::new(ds, |l| {
                    let j = universe.iter().position(|u| u == l).unwrap();
                    digits[j].is_some_and(|d| {
                        kinds.iter().enumerate().all(|(i, &t)| t == 2 || (t == 1 && d >> i & 1 == 1))
                    })
                }));
            }
        }
    }
    Ok(out)
}

/// The distinct `(mu1, mu2)` pairs of a case list, sorted, merging pairs
/// closer than `tol`.
pub fn distinct_values(cases: &[Case], tol: f64) -> Vec<(f64, f64)> {
    let mut v: Vec<(f64, f64)> = cases.iter().map(|c| (c.mu1, c.mu2)).collect();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut out: Vec<(f64, f64)> = Vec::new();
    for x in v {
        if !out.iter().any(|y| (x.0 - y.0).abs() <= tol && (x.1 - y.1).abs() <= tol) {
            out.push(x);
        }
    }
    out
}
