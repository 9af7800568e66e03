//! Tolerances shared across modules.

/// Predicate tolerance for incidence and containment tests.
pub const GEOM: f64 = 1e-9;

/// Tolerance for identities that hold exactly in real arithmetic.
pub const ALGEBRAIC: f64 = 1e-12;

/// Allowed deviation from 120 degrees at a Steiner point of a solver output.
pub const ANGLE: f64 = 1e-6;

/// Allowed deviation from 120 degrees in the constructed self-similar tree.
pub const TREE_ANGLE: f64 = 1e-9;

/// Slack on report margins: `passed <=> margin >= -REPORT`.
pub const REPORT: f64 = 1e-9;

/// Relative length window inside which two candidate trees count as tied.
pub const TIE: f64 = 1e-9;

/// Iteration cap of the fixed-topology refinement.
pub const MAX_REFINE_STEPS: usize = 10_000;
