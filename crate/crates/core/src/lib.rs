//! Bond percolation on finite graphs: decision-tree splices, exact and
//! Monte Carlo evaluation of correlation inequalities.

pub mod bits;
pub mod error;
pub mod event;
pub mod exact;
pub mod flow;
pub mod graph;
pub mod mc;
pub mod suite;
pub mod tree;
pub mod zipper;

pub use bits::{Configuration, EdgeSet};
pub use error::{Error, Result};
pub use event::{parse_event, BoundEvent, EventExpr, Monotonicity};
pub use graph::{Graph, GraphBuilder};
pub use tree::{parse_strategy, splice, BoundStrategy, RunTrace, Side, Strategy};
