//! Generalized trees: every edge is generated from one of two finite sample
//! spaces, the tree choosing which one as it goes. Presets, exact
//! enumeration of the built configuration, the per-edge coupling condition
//! and the resulting sandwich of probabilities.

mod check;
mod predicate;
mod strategy;

pub use check::{
    case_table, check_gen_inequality, check_zipper_condition, distinct_values, Case, CaseKind,
    ConditionReport, GenInequalityReport,
};
pub use predicate::GenEvent;
pub use strategy::{gen_enumerate, gen_fold, GenPolicyFn, GenStep, GenStrategy, GEN_LEAF_LIMIT};

use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};

const MEASURE_TOLERANCE: f64 = 1e-12;

/// A finite symbol set with a probability measure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Space {
    pub labels: Vec<String>,
    pub probs: Vec<f64>,
}

impl Space {
    pub fn new(labels: &[&str], probs: &[f64]) -> Result<Self> {
        let s = Space {
            labels: labels.iter().map(|l| l.to_string()).collect(),
            probs: probs.to_vec(),
        };
        s.validate()?;
        Ok(s)
    }

    fn uniform(labels: &[&str]) -> Self {
        let w = 1.0 / labels.len() as f64;
        Space {
            labels: labels.iter().map(|l| l.to_string()).collect(),
            probs: vec![w; labels.len()],
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidParam(m));
        if self.labels.is_empty() || self.labels.len() != self.probs.len() {
            return bad("a space needs one probability per symbol".into());
        }
        for (i, l) in self.labels.iter().enumerate() {
            if l.is_empty() || self.labels[..i].contains(l) {
                return bad(format!("bad or repeated symbol `{l}`"));
            }
        }
        if self.probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return bad("symbol probabilities must lie in [0,1]".into());
        }
        let total: f64 = self.probs.iter().sum();
        if (total - 1.0).abs() > MEASURE_TOLERANCE {
            return bad(format!("measure sums to {total}, not 1"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn prob_of(&self, label: &str) -> f64 {
        self.index(label).map_or(0.0, |i| self.probs[i])
    }

    /// Mass of the symbols for which `member` holds, summed in label order.
    pub fn measure(&self, member: impl Fn(&str) -> bool) -> f64 {
        self.labels
            .iter()
            .zip(&self.probs)
            .filter(|(l, _)| member(l))
            .fold(0.0, |s, (_, p)| s + p)
    }
}

/// Which way the coupling condition and the sandwich point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `mu1(X1) <= mu2(X2)` and `P(C1) <= P(C) <= P(C2)`.
    Forward,
    /// `mu1(X1) >= mu2(X2)` and `P(C1) >= P(C) >= P(C2)`.
    Reverse,
}

/// The two sample spaces one edge can be generated from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualSpace {
    pub name: String,
    pub omega1: Space,
    pub omega2: Space,
    pub direction: Direction,
}

impl DualSpace {
    pub fn new(name: &str, omega1: Space, omega2: Space, direction: Direction) -> Result<Self> {
        omega1.validate()?;
        omega2.validate()?;
        Ok(DualSpace {
            name: name.into(),
            omega1,
            omega2,
            direction,
        })
    }

    pub fn space(&self, choice: u8) -> &Space {
        if choice == 1 {
            &self.omega1
        } else {
            &self.omega2
        }
    }

    /// Every symbol of either space, first-space order first.
    pub fn universe(&self) -> Vec<String> {
        let mut out = self.omega1.labels.clone();
        for l in &self.omega2.labels {
            if !out.contains(l) {
                out.push(l.clone());
            }
        }
        out
    }

    pub fn hk(p: f64) -> Result<Self> {
        check_p(p)?;
        let q = 1.0 - p;
        DualSpace::new(
            "hk",
            Space::new(&["00", "01", "10", "11"], &[q * q, p * q, p * q, p * p])?,
            Space::new(&["00", "11"], &[q, p])?,
            Direction::Forward,
        )
    }

    pub fn vdbk(p: f64) -> Result<Self> {
        check_p(p)?;
        let q = 1.0 - p;
        DualSpace::new(
            "vdbk",
            Space::new(&["0", "1"], &[q, p])?,
            Space::new(&["00", "01", "10", "11"], &[q * q, p * q, p * q, p * p])?,
            Direction::Forward,
        )
    }

    /// Unary symbols `0, 1, 2` with masses `1-p, p(1-p), p^2`: the edge is
    /// usable with probability `p`, and by both witnesses with probability `p^2`.
    pub fn strongbk(p: f64) -> Result<Self> {
        check_p(p)?;
        let q = 1.0 - p;
        DualSpace::new(
            "strongbk",
            Space::new(&["0", "1", "2"], &[q, p * q, p * p])?,
            Space::new(&["00", "01", "10", "11"], &[q * q, p * q, p * q, p * p])?,
            Direction::Forward,
        )
    }

    /// Unary symbols weighted by the number of open edges in two
    /// independent copies, `((1-p)^2, 2p(1-p), p^2)`. Breaks the coupling
    /// condition whenever `0 < p < 1`.
    pub fn strongbk_binomial(p: f64) -> Result<Self> {
        check_p(p)?;
        let q = 1.0 - p;
        DualSpace::new(
            "strongbk_binomial",
            Space::new(&["0", "1", "2"], &[q * q, 2.0 * p * q, p * p])?,
            Space::new(&["00", "01", "10", "11"], &[q * q, p * q, p * q, p * p])?,
            Direction::Forward,
        )
    }

    pub fn colored() -> Self {
        DualSpace {
            name: "colored".into(),
            omega1: Space::uniform(&["000", "011", "101", "110"]),
            omega2: Space::uniform(&TRIPLETS),
            direction: Direction::Forward,
        }
    }

    pub fn richards() -> Self {
        let mix = |parts: &[(f64, &[&str])]| {
            let probs = TRIPLETS
                .iter()
                .map(|t| {
                    parts
                        .iter()
                        .filter(|(_, set)| set.contains(t))
                        .map(|(w, set)| w / set.len() as f64)
                        .sum()
                })
                .collect();
            Space {
                labels: TRIPLETS.iter().map(|t| t.to_string()).collect(),
                probs,
            }
        };
        let third = 1.0 / 3.0;
        DualSpace {
            name: "richards".into(),
            omega1: mix(&[(2.0 * third, &["000", "111"]), (third, &TRIPLETS)]),
            omega2: mix(&[
                (third, &["000", "011", "100", "111"]),
                (third, &["000", "010", "101", "111"]),
                (third, &["000", "001", "110", "111"]),
            ]),
            direction: Direction::Reverse,
        }
    }
}

const TRIPLETS: [&str; 8] = ["000", "001", "010", "011", "100", "101", "110", "111"];

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidParam(format!("p = {p} is outside [0,1]")))
    }
}

/// Preset names accepted by [`build_preset`].
pub const PRESETS: [&str; 5] = ["hk", "vdbk", "strongbk", "colored", "richards"];

pub fn build_preset(name: &str, p: Option<f64>) -> Result<DualSpace> {
    let need = || p.ok_or_else(|| Error::InvalidParam(format!("preset `{name}` needs p")));
    match name {
        "hk" => DualSpace::hk(need()?),
        "vdbk" => DualSpace::vdbk(need()?),
        "strongbk" => DualSpace::strongbk(need()?),
        "colored" | "richards" => {
            if p.is_some() {
                return Err(Error::InvalidParam(format!("preset `{name}` takes no p")));
            }
            Ok(if name == "colored" {
                DualSpace::colored()
            } else {
                DualSpace::richards()
            })
        }
        _ => Err(Error::InvalidParam(format!(
            "unknown preset `{name}` (expected one of {})",
            PRESETS.join(", ")
        ))),
    }
}

/// One dual space per edge: the `p`-parametrized presets take each edge's
/// own probability, the others are shared.
pub fn preset_for_graph(name: &str, g: &Graph) -> Result<Vec<DualSpace>> {
    match name {
        "colored" | "richards" => Ok(vec![build_preset(name, None)?; g.edge_count()]),
        _ => g.probs().iter().map(|&p| build_preset(name, Some(p))).collect(),
    }
}

/// Per-edge choice of space and the symbol drawn from it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Cell {
    pub choice: u8,
    pub symbol: usize,
}

/// A fully generated configuration, indexed by edge.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GeneralConfig(pub Vec<Cell>);

impl GeneralConfig {
    pub fn label<'a>(&self, spaces: &'a [DualSpace], e: usize) -> &'a str {
        let c = self.0[e];
        &spaces[e].space(c.choice).labels[c.symbol]
    }

    pub fn labels<'a>(&self, spaces: &'a [DualSpace]) -> Vec<&'a str> {
        (0..self.0.len()).map(|e| self.label(spaces, e)).collect()
    }
}

pub(crate) fn check_spaces(g: &Graph, spaces: &[DualSpace]) -> Result<()> {
    if spaces.len() != g.edge_count() {
        return Err(Error::IndexMismatch {
            expected: g.edge_count(),
            got: spaces.len(),
        });
    }
    for ds in spaces {
        ds.omega1.validate()?;
        ds.omega2.validate()?;
    }
    Ok(())
}
