use super::DualSpace;
use crate::error::{Error, Result};
use crate::event::BoundEvent;
use crate::graph::Graph;

const A_ONLY: u8 = 1;
const B_ONLY: u8 = 2;
const BOTH: u8 = 4;

/// Events on generated configurations.
#[derive(Clone, Debug)]
pub enum GenEvent {
    /// Union of `A ⋈ B` over the pairs: witnesses `w1` of `A` and `w2` of
    /// `B` where an edge in `w1` only needs a symbol in `{1, 2, 10, 11}`,
    /// in `w2` only `{1, 2, 01, 11}`, and in both `{2, 11}`.
    Bowtie(Vec<(BoundEvent, BoundEvent)>),
    /// Digit `i` of every symbol, read as a configuration, lies in event `i`.
    Product(Vec<BoundEvent>),
}

/// What one symbol allows, precomputed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct SymbolInfo {
    /// Witness claims allowed on the edge (`A_ONLY`, `B_ONLY`, `BOTH`).
    pub(crate) claims: u8,
    /// Bit `i` is digit `i`.
    pub(crate) digits: u32,
}

impl GenEvent {
    pub fn bowtie(a: BoundEvent, b: BoundEvent) -> Self {
        GenEvent::Bowtie(vec![(a, b)])
    }

    fn events(&self) -> Vec<&BoundEvent> {
        match self {
            GenEvent::Bowtie(pairs) => pairs.iter().flat_map(|(a, b)| [a, b]).collect(),
            GenEvent::Product(es) => es.iter().collect(),
        }
    }

    /// Checks the events are increasing and every symbol is readable.
    pub fn validate(&self, g: &Graph, spaces: &[DualSpace]) -> Result<()> {
        if let GenEvent::Bowtie(pairs) = self {
            if pairs.is_empty() {
                return Err(Error::InvalidParam("empty union of bowtie events".into()));
            }
        }
        if let GenEvent::Product(es) = self {
            if es.is_empty() {
                return Err(Error::InvalidParam("product event needs a factor".into()));
            }
        }
        for e in self.events() {
            e.require_increasing(g)?;
        }
        for ds in spaces {
            for l in ds.universe() {
                self.info(&l)?;
            }
        }
        Ok(())
    }

    pub(crate) fn info(&self, label: &str) -> Result<SymbolInfo> {
        let bad = |what: &str| {
            Err(Error::InvalidParam(format!(
                "symbol `{label}` cannot be read {what}"
            )))
        };
        let binary = label.chars().all(|c| c == '0' || c == '1');
        let digits = if binary {
            label
                .chars()
                .enumerate()
                .filter(|(_, c)| *c == '1')
                .fold(0u32, |m, (i, _)| m | 1 << i)
        } else {
            0
        };
        let claims = match self {
            GenEvent::Bowtie(_) => match label {
                "0" => 0,
                "1" => A_ONLY | B_ONLY,
                "2" => A_ONLY | B_ONLY | BOTH,
                _ if binary && label.len() == 2 => {
                    let (x, y) = (digits & 1 != 0, digits & 2 != 0);
                    (if x { A_ONLY } else { 0 })
                        | (if y { B_ONLY } else { 0 })
                        | (if x && y { BOTH } else { 0 })
                }
                _ => return bad("by a bowtie event"),
            },
            GenEvent::Product(es) => {
                if !binary || label.len() < es.len() {
                    return bad(&format!("as {} binary digits", es.len()));
                }
                0
            }
        };
        Ok(SymbolInfo { claims, digits })
    }

    pub(crate) fn holds(&self, g: &Graph, infos: &[SymbolInfo]) -> bool {
        match self {
            GenEvent::Bowtie(pairs) => {
                let (mut both, mut flex, mut only_a, mut only_b) = (0u64, Vec::new(), 0u64, 0u64);
                for (e, s) in infos.iter().enumerate() {
                    let bit = 1u64 << e;
                    let (a, b) = (s.claims & A_ONLY != 0, s.claims & B_ONLY != 0);
                    if s.claims & BOTH != 0 {
                        both |= bit;
                    } else if a && b {
                        flex.push(bit);
                    } else if a {
                        only_a |= bit;
                    } else if b {
                        only_b |= bit;
                    }
                }
                pairs.iter().any(|(ea, eb)| {
                    (0..1u64 << flex.len()).any(|w| {
                        let (mut wa, mut wb) = (both | only_a, both | only_b);
                        for (i, &bit) in flex.iter().enumerate() {
                            if w >> i & 1 == 1 {
                                wa |= bit;
                            } else {
                                wb |= bit;
                            }
                        }
                        ea.eval_mask(g, wa) && eb.eval_mask(g, wb)
                    })
                })
            }
            GenEvent::Product(es) => es.iter().enumerate().all(|(i, ev)| {
                let mask = infos
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| s.digits >> i & 1 == 1)
                    .fold(0u64, |m, (e, _)| m | 1 << e);
                ev.eval_mask(g, mask)
            }),
        }
    }

    /// Evaluates on per-edge symbol labels.
    pub fn holds_on(&self, g: &Graph, labels: &[&str]) -> Result<bool> {
        if labels.len() != g.edge_count() {
            return Err(Error::IndexMismatch {
                expected: g.edge_count(),
                got: labels.len(),
            });
        }
        let infos = labels.iter().map(|l| self.info(l)).collect::<Result<Vec<_>>>()?;
        Ok(self.holds(g, &infos))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::parse_event;
    use crate::graph::{generate, EdgeProb, Family};

    fn ev(s: &str, g: &Graph) -> BoundEvent {
        parse_event(s).unwrap().bind(g).unwrap()
    }

    #[test]
    fn bowtie_on_a_single_edge() {
        let g = generate(Family::Path(1), EdgeProb::Uniform(0.5)).unwrap();
        let t = GenEvent::bowtie(ev("a,b", &g), ev("a,b", &g));
        let got: Vec<bool> = ["0", "1", "2", "00", "01", "10", "11"]
            .iter()
            .map(|l| t.holds_on(&g, &[l]).unwrap())
            .collect();
        assert_eq!(got, [false, false, true, false, false, false, true]);
    }

    #[test]
    fn bowtie_on_two_routes() {
        let g = generate(Family::Parallel(2), EdgeProb::Uniform(0.5)).unwrap();
        let t = GenEvent::bowtie(ev("a,b", &g), ev("a,b", &g));
        // one route for each witness
        assert!(t.holds_on(&g, &["1", "1", "1", "1"]).unwrap());
        assert!(t.holds_on(&g, &["10", "10", "01", "01"]).unwrap());
        assert!(!t.holds_on(&g, &["10", "10", "10", "10"]).unwrap());
        // a route shared by both needs double symbols
        assert!(t.holds_on(&g, &["2", "11", "0", "00"]).unwrap());
        assert!(!t.holds_on(&g, &["2", "1", "0", "0"]).unwrap());
    }

    #[test]
    fn product_reads_digits() {
        let g = generate(Family::Path(2), EdgeProb::Uniform(0.5)).unwrap();
        let ab = ev("a,b", &g);
        let t = GenEvent::Product(vec![ab.clone(), ab.clone(), ab]);
        assert!(t.holds_on(&g, &["111", "111"]).unwrap());
        assert!(!t.holds_on(&g, &["110", "111"]).unwrap());
        assert!(t.holds_on(&g, &["0", "1"]).is_err());
    }
}
