//! Connection events: a small expression language over cluster partitions
//! and edge-disjoint path counts.
//!
//! ```text
//! expr      := term ('U' term)*
//! term      := factor ('&' factor)*
//! factor    := '!' factor | '(' expr ')' | atom
//! atom      := partition | 'npaths(' name ',' name ',' int ')'
//! partition := group ('|' group)*
//! group     := name (',' name)*
//! ```

mod eval;
mod parse;
mod witness;

pub use eval::{BoundEvent, Monotonicity};
pub use parse::parse_event;
pub use witness::{disjoint_occurrence, sq_s_occurrence, SPLIT_OPEN_LIMIT};
pub(crate) use witness::split_search;

use std::fmt;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EventExpr {
    /// Each group lies in one cluster; distinct groups in distinct clusters.
    Partition(Vec<Vec<String>>),
    /// At least `n` edge-disjoint open paths between two vertices.
    NPaths(String, String, usize),
    Union(Vec<EventExpr>),
    Intersect(Vec<EventExpr>),
    Not(Box<EventExpr>),
}

impl EventExpr {
    pub fn partition(groups: &[&[&str]]) -> Self {
        EventExpr::Partition(
            groups
                .iter()
                .map(|g| g.iter().map(|s| s.to_string()).collect())
                .collect(),
        )
    }

    pub fn union(parts: Vec<EventExpr>) -> Self {
        EventExpr::Union(parts)
    }

    pub fn intersect(parts: Vec<EventExpr>) -> Self {
        EventExpr::Intersect(parts)
    }

    pub fn negate(self) -> Self {
        EventExpr::Not(Box::new(self))
    }

    fn precedence(&self) -> u8 {
        match self {
            EventExpr::Union(_) => 0,
            EventExpr::Intersect(_) => 1,
            _ => 2,
        }
    }
}

impl fmt::Display for EventExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // A nested operand of the same binary operator keeps its parentheses
        // so that printing and re-parsing preserve the tree shape.
        let operand = |f: &mut fmt::Formatter<'_>, child: &EventExpr, parent: u8| {
            if child.precedence() <= parent {
                write!(f, "({child})")
            } else {
                write!(f, "{child}")
            }
        };
        match self {
            EventExpr::Partition(groups) => {
                let parts: Vec<String> = groups.iter().map(|g| g.join(",")).collect();
                write!(f, "{}", parts.join("|"))
            }
            EventExpr::NPaths(u, v, n) => write!(f, "npaths({u},{v},{n})"),
            EventExpr::Union(xs) | EventExpr::Intersect(xs) => {
                let (sep, prec) = match self {
                    EventExpr::Union(_) => (" U ", 0),
                    _ => (" & ", 1),
                };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        f.write_str(sep)?;
                    }
                    operand(f, x, prec)?;
                }
                Ok(())
            }
            EventExpr::Not(x) => {
                f.write_str("!")?;
                operand(f, x, 1)
            }
        }
    }
}
