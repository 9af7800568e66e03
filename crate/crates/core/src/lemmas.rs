//! Closed-form evaluators and empirical checks for the quantitative
//! statements about `A` and `Sigma`.
//!
//! Each check produces a [`LemmaReport`]. A report is *claimed* when the
//! parameter lies in the range where the statement is asserted; unclaimed
//! reports are informative only.

use std::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geom::{signed_distance, OrientedLine, Point, Segment};
use crate::ifs::{containment_margin, containment_radius_bound, generate_leaves_with, osc_holds, osc_threshold, IfsParams, MAX_DEPTH};
use crate::smt::{solve_with, SolveOptions, SteinerTree, TerminalSpec, HARD_MAX_TERMINALS};
use crate::tol;
use crate::tree::{build_tree, tree_length, Depth};

/// Largest `lambda` covered by the uniqueness theorem.
pub const THEOREM_LAMBDA: f64 = 1.0 / 25.0;
/// Accepted deviation of solver Steiner points from tree nodes.
pub const SOLVER_TOL: f64 = 1e-7;
/// Accepted variation of the tripod sum.
pub const TRIPOD_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaReport {
    pub name: String,
    pub formula_value: f64,
    pub empirical_value: Option<f64>,
    pub margin: f64,
    pub passed: bool,
    /// Whether the parameter is in the range where the statement is asserted.
    pub claimed: bool,
    pub detail: String,
}

impl LemmaReport {
    /// Passes iff `margin >= -tol::REPORT`, or `margin > 0` when `strict`.
    pub fn new(
        name: &str,
        formula_value: f64,
        empirical_value: Option<f64>,
        margin: f64,
        strict: bool,
        claimed: bool,
        detail: String,
    ) -> Self {
        let passed = if strict { margin > 0.0 } else { margin >= -tol::REPORT };
        LemmaReport { name: name.into(), formula_value, empirical_value, margin, passed, claimed, detail }
    }

    /// A failure of a claimed check.
    pub fn is_violation(&self) -> bool {
        self.claimed && !self.passed
    }
}

/// Lower bound for `dist(Y, A)` with `Y = {x = 0}`:
/// `1 + lambda/2 - lambda^2 (1 + 2 lambda) / (2 (1 - lambda^2))`.
pub fn dist_root_line(params: &IfsParams) -> f64 {
    let l = params.lambda();
    1.0 + l / 2.0 - l * l * (1.0 + 2.0 * l) / (2.0 * (1.0 - l * l))
}

/// Lower bound for `dist(f_1(A), f_2(A))`: `sqrt3 lambda - sqrt3 lambda^3 / (1 - lambda)`.
pub fn dist_between_branches(params: &IfsParams) -> f64 {
    let l = params.lambda();
    let s3 = 3f64.sqrt();
    s3 * l - s3 * l.powi(3) / (1.0 - l)
}

/// Difference between the shortest competitor through `f_1(A)` first and
/// the length of the tree, for the line `{x = d}`:
/// `(dist_root_line - d) + dist_between_branches - (1 / (1 - 2 lambda) - d)`.
///
/// The competitor must be longer for the tree to win, so the gap has to be
/// positive. `d` cancels; it is kept so callers can check that.
pub fn branching_gap(params: &IfsParams, d: f64) -> Result<f64> {
    if !d.is_finite() || d >= 1.0 {
        return Err(Error::InvalidSpec(format!("line offset {d} must be finite and below 1")));
    }
    let competitor = (dist_root_line(params) - d) + dist_between_branches(params);
    let tree = tree_length(params, Depth::Infinite)? - d;
    Ok(competitor - tree)
}

/// The root of `branching_gap(., 0)` in `(0.04, 0.05)`, by bisection to `1e-10`.
pub fn critical_lambda() -> f64 {
    let gap = |l: f64| branching_gap(&IfsParams::new(l).expect("bracket inside (0, 1/2)"), 0.0).expect("d = 0");
    let (mut lo, mut hi) = (0.04, 0.05);
    debug_assert!(gap(lo) > 0.0 && gap(hi) < 0.0);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sum of the signed distances of `t` from three lines whose unit normals
/// sum to zero. The sum does not depend on `t`.
pub fn tripod_sum(lines: &[OrientedLine; 3], t: Point) -> Result<f64> {
    let total = lines.iter().fold(Point::ORIGIN, |acc, l| acc + l.normal());
    if total.norm() > tol::ALGEBRAIC {
        return Err(Error::UnbalancedNormals(total.norm()));
    }
    Ok(lines.iter().map(|l| signed_distance(t, l)).sum())
}

/// Three lines with normals at 120 degrees (rotated by `phi`) and the given offsets.
pub fn tripod_lines(phi: f64, offsets: [f64; 3]) -> [OrientedLine; 3] {
    let third = 2.0 * std::f64::consts::FRAC_PI_3;
    [0, 1, 2].map(|k| OrientedLine::new(Point::polar(phi + third * k as f64), offsets[k]).expect("unit normal"))
}

/// Largest variation of the tripod sum over `trials` random line triples
/// and point pairs.
pub fn tripod_constancy(trials: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = 0.0f64;
    for _ in 0..trials {
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let offsets = [0; 3].map(|_| rng.gen_range(-5.0..5.0));
        let lines = tripod_lines(phi, offsets);
        let mut pt = || Point::new(rng.gen_range(-10.0..10.0), rng.gen_range(-10.0..10.0));
        let (a, b) = (pt(), pt());
        worst = worst.max((tripod_sum(&lines, a)? - tripod_sum(&lines, b)?).abs());
    }
    Ok(worst)
}

/// `min x` over `A_N`, the distance from `A_N` to `{x = 0}`.
pub fn empirical_dist_root_line(params: &IfsParams, n: usize, exec: Exec) -> Result<f64> {
    let a = generate_leaves_with(params, n, MAX_DEPTH, exec)?;
    Ok(exec.min_by(&a.points, |p| p.x))
}

/// Brute-force `min |p - q|` over `p` in `f_1(A_{N-1})`, `q` in `f_2(A_{N-1})`
/// (the two halves of `A_N`).
pub fn empirical_dist_between_branches(params: &IfsParams, n: usize, exec: Exec) -> Result<f64> {
    if n < 2 {
        return Err(Error::DepthOutOfRange { depth: n, max: MAX_DEPTH });
    }
    let a = generate_leaves_with(params, n, MAX_DEPTH, exec)?;
    let (left, right) = a.points.split_at(a.points.len() / 2);
    Ok(exec.min_by(left, |p| right.iter().map(|q| p.dist(*q)).fold(f64::INFINITY, f64::min)))
}

/// `max |a - P|` over `A_N`.
pub fn empirical_containment_radius(params: &IfsParams, n: usize, exec: Exec) -> Result<f64> {
    let a = generate_leaves_with(params, n, MAX_DEPTH, exec)?;
    let p = params.p();
    Ok(exec.max_by(&a.points, |q| q.dist(p)))
}

fn solver_options(exec: Exec) -> SolveOptions {
    SolveOptions { max_terminals: HARD_MAX_TERMINALS, exec, topology: None }
}

const SOLVER_DEPTHS: std::ops::RangeInclusive<usize> = 2..=4;

fn check_solver_depth(n: usize) -> Result<()> {
    if SOLVER_DEPTHS.contains(&n) {
        Ok(())
    } else {
        Err(Error::DepthOutOfRange { depth: n, max: *SOLVER_DEPTHS.end() })
    }
}

/// Solves the problem for `{x = 0}` and `A_N` and checks that the junction
/// next to the line lies within `lambda^2` of `T0` and the foot within
/// `lambda^2` of the axis.
pub fn branch_confinement(params: &IfsParams, n: usize, exec: Exec) -> Result<LemmaReport> {
    check_solver_depth(n)?;
    let leaves = generate_leaves_with(params, n, MAX_DEPTH, exec)?.points;
    branch_confinement_for(params, leaves, exec)
}

/// [`branch_confinement`] for an explicit leaf set (e.g. a perturbed one).
pub fn branch_confinement_for(params: &IfsParams, leaves: Vec<Point>, exec: Exec) -> Result<LemmaReport> {
    let spec = TerminalSpec::with_line(leaves, OrientedLine::vertical(0.0));
    let (t, _) = solve_with(&spec, &solver_options(exec))?;
    let l2 = params.lambda().powi(2);
    let foot = t.foot.expect("line terminal has a foot");
    let f = t.topology.foot_id().expect("line terminal has a foot");
    let (a, b) = t.topology.edges.iter().copied().find(|&(a, b)| a == f || b == f).expect("foot edge");
    let junction = t.node(if a == f { b } else { a });
    let offset = junction.dist(params.t0());
    let worst = offset.max(foot.y.abs());
    Ok(LemmaReport::new(
        "branch_confinement",
        l2,
        Some(worst),
        l2 - worst,
        false,
        params.lambda() <= THEOREM_LAMBDA,
        format!(
            "junction ({}, {}) at {offset:.3e} from T0, foot y = {:.3e}, bound lambda^2 = {l2}, length {}",
            junction.x, junction.y, foot.y, t.length
        ),
    ))
}

/// Outcome of matching a solver tree against `Sigma_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionOutcome {
    /// Largest distance between a solver Steiner point and its tree node.
    pub max_deviation: f64,
    /// Whether every solver edge coincides with a tree edge and vice versa.
    pub same_topology: bool,
    pub length: f64,
    pub tree_length: f64,
}

/// Compares a solved tree with the truncated tree of the same depth.
pub fn compare_with_tree(t: &SteinerTree, params: &IfsParams, n: usize) -> Result<ContractionOutcome> {
    let sigma = build_tree(params, n)?;
    let nodes: Vec<Point> = sigma.branch_points().into_iter().map(|(_, p)| p).collect();
    let found = t.proper_steiner_points();
    let mut max_deviation = 0.0f64;
    let mut matched = vec![false; nodes.len()];
    for p in &found {
        let (i, d) = nodes
            .iter()
            .enumerate()
            .map(|(i, q)| (i, p.dist(*q)))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap_or((usize::MAX, f64::INFINITY));
        max_deviation = max_deviation.max(d);
        if i != usize::MAX {
            matched[i] = true;
        }
    }
    let segs = t.visible_segments();
    let tree_segs: Vec<Segment> = sigma.edges.iter().map(|e| e.segment.canonical()).collect();
    let same_topology = found.len() == nodes.len()
        && matched.iter().all(|&m| m)
        && segs.len() == tree_segs.len()
        && segs.iter().all(|s| tree_segs.iter().any(|e| e.close_to(s, SOLVER_TOL)));
    Ok(ContractionOutcome { max_deviation, same_topology, length: t.length, tree_length: sigma.length() })
}

/// Solves the problem for `{0}` and `A_N` and measures how far the optimal
/// Steiner points are from the branch points of `Sigma_N`; the uniqueness
/// argument predicts they coincide.
pub fn contraction_experiment(params: &IfsParams, n: usize, exec: Exec) -> Result<LemmaReport> {
    check_solver_depth(n)?;
    let mut pts = vec![Point::ORIGIN];
    pts.extend(generate_leaves_with(params, n, MAX_DEPTH, exec)?.points);
    let (t, _) = solve_with(&TerminalSpec::points(pts), &solver_options(exec))?;
    let out = compare_with_tree(&t, params, n)?;
    let margin = if out.same_topology { SOLVER_TOL - out.max_deviation } else { f64::NEG_INFINITY };
    Ok(LemmaReport::new(
        "contraction_experiment",
        0.0,
        Some(out.max_deviation),
        margin,
        false,
        params.lambda() <= THEOREM_LAMBDA,
        format!(
            "N = {n}: {} topology, max deviation {:.3e}, length {} vs tree {}",
            if out.same_topology { "same" } else { "different" },
            out.max_deviation,
            out.length,
            out.tree_length
        ),
    ))
}

/// Settings for [`verify_all`].
#[derive(Debug, Clone, Copy)]
pub struct VerifyConfig {
    pub params: IfsParams,
    /// Depth of the brute-force leaf checks.
    pub leaf_depth: usize,
    /// Depth of the solver experiments (2 to 4).
    pub solver_depth: usize,
    pub seed: u64,
    pub exec: Exec,
}

/// Runs every check. A check that errors out becomes a failed report, so
/// the remaining results are still produced.
pub fn verify_all(cfg: &VerifyConfig) -> Vec<LemmaReport> {
    let p = &cfg.params;
    let l = p.lambda();
    let mut out = Vec::new();

    let osc = osc_holds(p);
    out.push(LemmaReport::new(
        "open_set_condition",
        osc_threshold(),
        None,
        if osc.holds { osc.disjoint_margin } else { osc.disjoint_margin.min(osc.nesting_margin) },
        true,
        l < osc_threshold(),
        format!(
            "U = B_R(T0), R = {}; images disjoint by {:.3e}, nesting slack {:.1e}; threshold 2 sqrt3 - 3",
            p.r_osc(),
            osc.disjoint_margin,
            osc.nesting_margin
        ),
    ));

    let run = |name: &str, f: &dyn Fn() -> Result<LemmaReport>| -> LemmaReport {
        f().unwrap_or_else(|e| LemmaReport::new(name, f64::NAN, None, f64::NEG_INFINITY, false, l <= THEOREM_LAMBDA, format!("error: {e}")))
    };

    out.push(run("containment", &|| {
        let emp = empirical_containment_radius(p, cfg.leaf_depth, cfg.exec)?;
        Ok(LemmaReport::new(
            "containment",
            containment_radius_bound(p),
            Some(emp),
            containment_margin(p).min(l - emp),
            true,
            l < 0.1,
            format!("A_{} in B_lambda(P): max |a - P| = {emp}, bound {}", cfg.leaf_depth, containment_radius_bound(p)),
        ))
    }));

    out.push(run("dist_root_line", &|| {
        let f = dist_root_line(p);
        let emp = empirical_dist_root_line(p, cfg.leaf_depth, cfg.exec)?;
        Ok(LemmaReport::new("dist_root_line", f, Some(emp), emp - f, false, true, format!("min x over A_{} exceeds the bound by {:.3e}", cfg.leaf_depth, emp - f)))
    }));

    out.push(run("dist_between_branches", &|| {
        let f = dist_between_branches(p);
        let emp = empirical_dist_between_branches(p, cfg.leaf_depth, cfg.exec)?;
        Ok(LemmaReport::new(
            "dist_between_branches",
            f,
            Some(emp),
            emp - f,
            false,
            true,
            format!("min distance between halves of A_{} exceeds the bound by {:.3e}", cfg.leaf_depth, emp - f),
        ))
    }));

    out.push(run("branching_gap", &|| {
        let g = branching_gap(p, 0.0)?;
        Ok(LemmaReport::new("branching_gap", g, None, g, true, l <= THEOREM_LAMBDA, format!("gap at lambda = {l}, d = 0")))
    }));

    let crit = critical_lambda();
    out.push(LemmaReport::new(
        "critical_lambda",
        crit,
        None,
        crit - THEOREM_LAMBDA,
        true,
        true,
        format!("gap changes sign at lambda = {crit:.10}; 1/25 is sufficient, not sharp"),
    ));

    out.push(run("tripod", &|| {
        let worst = tripod_constancy(1000, cfg.seed)?;
        Ok(LemmaReport::new("tripod", 0.0, Some(worst), TRIPOD_TOL - worst, false, true, format!("1000 random configurations, seed {}", cfg.seed)))
    }));

    out.push(run("branch_confinement", &|| branch_confinement(p, cfg.solver_depth.min(3), cfg.exec)));
    out.push(run("contraction_experiment", &|| contraction_experiment(p, cfg.solver_depth, cfg.exec)));

    out
}

/// Fixed-width table, one report per line.
pub fn render_table(reports: &[LemmaReport]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<24} {:>8} {:>8} {:>22} {:>22} {:>12}  detail", "check", "status", "claimed", "formula", "empirical", "margin");
    for r in reports {
        let emp = r.empirical_value.map_or("-".to_string(), |v| format!("{v:.15}"));
        let _ = writeln!(
            s,
            "{:<24} {:>8} {:>8} {:>22.15} {:>22} {:>12.3e}  {}",
            r.name,
            if r.passed { "pass" } else { "FAIL" },
            if r.claimed { "yes" } else { "no" },
            r.formula_value,
            emp,
            r.margin,
            r.detail
        );
    }
    s
}
