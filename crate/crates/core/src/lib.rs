//! Self-similar Steiner trees: the attractor of the two-map system
//! `f_j(z) = 1 + theta_j z`, its tree, an exact small-instance Steiner
//! solver, and numerical checks of the quantitative claims about them.

pub mod error;
pub mod exec;
pub mod geom;
pub mod ifs;
pub mod lemmas;
pub mod smt;
pub mod svg;
pub mod tol;
pub mod tree;

pub use error::{Error, Result};
pub use exec::Exec;
pub use geom::{OrientedLine, Point, Segment};
pub use ifs::{IfsParams, LeafSet};
pub use lemmas::LemmaReport;
pub use smt::{SteinerTopology, SteinerTree, TerminalSpec};
pub use tree::TruncatedTree;
