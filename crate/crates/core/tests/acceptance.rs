//! Acceptance suite: one PASS/FAIL line per criterion, with its runtime
//! against the budget. Exits nonzero if any criterion fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use selfsim_steiner::ifs::{containment_margin, hausdorff_dimension, osc_holds, osc_threshold};
use selfsim_steiner::lemmas::{
    branching_gap, compare_with_tree, critical_lambda, dist_between_branches, dist_root_line,
    empirical_containment_radius, empirical_dist_between_branches, empirical_dist_root_line,
    tripod_constancy, tripod_lines, tripod_sum,
};
use selfsim_steiner::smt::{solve, solve_with, solve_with_line, validate_minimizer, SolveOptions, HARD_MAX_TERMINALS};
use selfsim_steiner::tree::{build_tree, tree_length, Depth};
use selfsim_steiner::{Exec, IfsParams, OrientedLine, Point, SteinerTree, TerminalSpec};

const LAMBDA: f64 = 0.04;

type Outcome = Result<String, String>;
type Criterion = (&'static str, u64, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn params(l: f64) -> IfsParams {
    IfsParams::new(l).expect("lambda in range")
}

fn leaves(n: usize) -> Vec<Point> {
    selfsim_steiner::ifs::generate_leaves(&params(LAMBDA), n).expect("depth in range").points
}

fn origin_and_leaves(n: usize) -> TerminalSpec {
    let mut pts = vec![Point::ORIGIN];
    pts.extend(leaves(n));
    TerminalSpec::points(pts)
}

fn solve_big(spec: &TerminalSpec) -> SteinerTree {
    let opts = SolveOptions { max_terminals: HARD_MAX_TERMINALS, ..SolveOptions::default() };
    solve_with(spec, &opts).expect("solvable").0
}

fn length_formula() -> Outcome {
    let p = params(LAMBDA);
    let exact = 1.0 / (1.0 - 2.0 * LAMBDA);
    let inf = tree_length(&p, Depth::Infinite).map_err(|e| e.to_string())?;
    ensure((inf - 1.0869565217).abs() < 1e-9, || format!("tree_length(inf) = {inf}"))?;
    ensure((inf - exact).abs() < 1e-9, || format!("tree_length(inf) = {inf}, 1/(1-2l) = {exact}"))?;

    // edge sums of the built trees, then Aitken's delta-squared on the tail
    let sums: Vec<f64> = (1..=12).map(|n| build_tree(&p, n).map(|t| t.length())).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
    for (n, s) in sums.iter().enumerate() {
        let direct = common::sigma_length(LAMBDA, n + 1);
        ensure((s - direct).abs() < 1e-12, || format!("edge sum at N = {} is {s}, series {direct}", n + 1))?;
    }
    let k = sums.len();
    let (a, b, c) = (sums[k - 3], sums[k - 2], sums[k - 1]);
    let limit = c - (c - b).powi(2) / ((c - b) - (b - a));
    ensure((limit - inf).abs() < 1e-9, || format!("extrapolated {limit} vs {inf}"))?;
    Ok(format!("L = {inf:.10}, extrapolated {limit:.10}"))
}

fn dimension_and_osc() -> Outcome {
    for l in [0.01, 0.04, 0.1] {
        let d = hausdorff_dimension(&params(l));
        let expect = -(2f64.ln()) / l.ln();
        ensure((d - expect).abs() < 1e-12, || format!("dimension at {l}: {d} vs {expect}"))?;
    }
    let c = osc_threshold();
    ensure((c - (2.0 * 3f64.sqrt() - 3.0)).abs() < 1e-15, || format!("threshold {c}"))?;
    let below = osc_holds(&params(c - 0.005));
    let above = osc_holds(&params(c + 0.005));
    ensure(below.holds && !above.holds, || format!("below {below:?}, above {above:?}"))?;
    Ok(format!("OSC flips at {c:.6}"))
}

fn containment() -> Outcome {
    let p = params(LAMBDA);
    let floor = containment_margin(&p) - LAMBDA.powi(10);
    let mut worst = f64::INFINITY;
    for n in 1..=12 {
        let r = empirical_containment_radius(&p, n, Exec::default()).map_err(|e| e.to_string())?;
        let margin = LAMBDA - r;
        worst = worst.min(margin);
        ensure(margin >= floor, || format!("N = {n}: margin {margin} below {floor}"))?;
    }
    Ok(format!("smallest margin {worst:.3e} >= {floor:.3e}"))
}

fn distance_formulas() -> Outcome {
    let p = params(LAMBDA);
    let root = empirical_dist_root_line(&p, 14, Exec::default()).map_err(|e| e.to_string())?;
    let branches = empirical_dist_between_branches(&p, 14, Exec::default()).map_err(|e| e.to_string())?;
    // reference values, rounded to 8 decimals
    ensure((root - 1.01913462).abs() < 1e-7, || format!("min x over A_14 = {root}"))?;
    ensure((branches - 0.06916656).abs() < 1e-7, || format!("branch distance over A_14 = {branches}"))?;
    ensure((dist_root_line(&p) - 1.01913462).abs() < 1e-7, || "dist_root_line formula".into())?;
    ensure((dist_between_branches(&p) - 0.06916656).abs() < 1e-7, || "dist_between_branches formula".into())?;
    Ok(format!("empirical {root:.9} / {branches:.9}"))
}

fn threshold() -> Outcome {
    let gap = |l: f64| branching_gap(&params(l), 0.0).expect("d = 0");
    let (g04, g05) = (gap(1.0 / 25.0), gap(0.05));
    ensure(g04 > 0.0, || format!("gap(1/25) = {g04}"))?;
    ensure(g05 < 0.0, || format!("gap(0.05) = {g05}"))?;
    let c = critical_lambda();
    ensure(c > 0.045 && c < 0.047, || format!("critical lambda {c}"))?;
    ensure(gap(c).abs() < 1e-9, || format!("gap at the root is {}", gap(c)))?;
    ensure(gap(c - 1e-10) > 0.0 && gap(c + 1e-10) < 0.0, || "no sign change across the root".into())?;
    // d cancels
    let shifted = branching_gap(&params(1.0 / 25.0), -2.5).map_err(|e| e.to_string())?;
    ensure((shifted - g04).abs() < 1e-12, || format!("gap depends on d: {shifted} vs {g04}"))?;
    Ok(format!("gap(1/25) = {g04:.10}, gap(0.05) = {g05:.10}, root {c:.10}"))
}

fn tripod() -> Outcome {
    let worst = tripod_constancy(1000, 7).map_err(|e| e.to_string())?;
    ensure(worst < 1e-10, || format!("variation {worst}"))?;
    // lines through the sides of an equilateral triangle, normals inward
    let side = 2.5;
    let h = side * 3f64.sqrt() / 2.0;
    let centroid_to_side = h / 3.0;
    let lines = tripod_lines(0.3, [-centroid_to_side; 3]);
    let at_center = tripod_sum(&lines, Point::ORIGIN).map_err(|e| e.to_string())?;
    let at_vertex = tripod_sum(&lines, Point::polar(0.3) * (2.0 * centroid_to_side)).map_err(|e| e.to_string())?;
    ensure((at_center.abs() - h).abs() < 1e-12, || format!("center sum {at_center} vs {h}"))?;
    ensure((at_vertex.abs() - h).abs() < 1e-12, || format!("vertex sum {at_vertex} vs {h}"))?;
    let skew = [OrientedLine::vertical(0.0), OrientedLine::vertical(1.0), OrientedLine::horizontal(0.0)];
    ensure(tripod_sum(&skew, Point::ORIGIN).is_err(), || "unbalanced normals accepted".into())?;
    Ok(format!("variation {worst:.1e}, equilateral {h}"))
}

fn solver_oracles() -> Outcome {
    let mut rng = common::rng(2024);
    let mut worst3 = 0.0f64;
    for _ in 0..500 {
        let p = common::random_points(&mut rng, 3, 1e-3);
        let t = solve(&TerminalSpec::points(p.clone())).map_err(|e| e.to_string())?;
        let oracle = common::three_point_length(p[0], p[1], p[2]);
        worst3 = worst3.max((t.length - oracle).abs());
        ensure((t.length - oracle).abs() < 1e-8, || format!("{p:?}: {} vs {oracle}", t.length))?;
    }
    let mut worst4 = 0.0f64;
    for _ in 0..50 {
        let p = common::random_points(&mut rng, 4, 0.02);
        let t = solve(&TerminalSpec::points(p.clone())).map_err(|e| e.to_string())?;
        let oracle = common::four_point_length(&p);
        worst4 = worst4.max((t.length - oracle).abs());
        ensure((t.length - oracle).abs() < 1e-6, || format!("{p:?}: {} vs {oracle}", t.length))?;
    }
    Ok(format!("n = 3 worst {worst3:.1e}, n = 4 worst {worst4:.1e}"))
}

fn truncated_tree_is_minimizer() -> Outcome {
    let p = params(LAMBDA);
    let mut out = Vec::new();
    for (n, expected) in [(2, 1.08), (3, 1.0864), (4, 1.086912)] {
        let t = solve_big(&origin_and_leaves(n));
        let cmp = compare_with_tree(&t, &p, n).map_err(|e| e.to_string())?;
        ensure(cmp.same_topology, || format!("N = {n}: topology differs from the truncated tree"))?;
        ensure(cmp.max_deviation < 1e-7, || format!("N = {n}: Steiner points off by {}", cmp.max_deviation))?;
        ensure((t.length - expected).abs() < 1e-7, || format!("N = {n}: length {} vs {expected}", t.length))?;
        ensure((t.length - cmp.tree_length).abs() < 1e-7, || format!("N = {n}: length {} vs tree {}", t.length, cmp.tree_length))?;
        out.push(format!("N={n} L={:.9} dev={:.0e}", t.length, cmp.max_deviation));
    }
    Ok(out.join(", "))
}

fn line_variant() -> Outcome {
    let mut out = Vec::new();
    for n in [2, 3] {
        let spec = TerminalSpec::with_line(leaves(n), OrientedLine::vertical(0.0));
        let t = solve_with_line(&spec).map_err(|e| e.to_string())?;
        let foot = t.foot.ok_or("no foot")?;
        ensure(foot.norm() < 1e-9, || format!("N = {n}: foot at {foot:?}"))?;
        let r = validate_minimizer(&t, &spec);
        let dev = r.trunk_deviation.ok_or("no trunk")?;
        ensure(dev < 1e-9, || format!("N = {n}: trunk off perpendicular by {dev}"))?;
        let with_origin = solve(&origin_and_leaves(n)).map_err(|e| e.to_string())?;
        ensure((t.length - with_origin.length).abs() < 1e-9, || format!("N = {n}: {} vs {}", t.length, with_origin.length))?;
        out.push(format!("N={n} foot=({:.1e},{:.1e}) sin={dev:.1e}", foot.x, foot.y));
    }
    Ok(out.join(", "))
}

fn structural_validation() -> Outcome {
    let mut specs = vec![origin_and_leaves(2), origin_and_leaves(3)];
    for n in [2, 3] {
        specs.push(TerminalSpec::with_line(leaves(n), OrientedLine::vertical(0.0)));
    }
    let mut rng = common::rng(99);
    for m in [3, 4, 5, 6] {
        for _ in 0..5 {
            specs.push(TerminalSpec::points(common::random_points(&mut rng, m, 0.02)));
        }
    }
    specs.push(TerminalSpec::with_line(common::random_points(&mut rng, 4, 0.02), OrientedLine::horizontal(-0.5)));
    for spec in &specs {
        let t = solve(spec).map_err(|e| e.to_string())?;
        let r = validate_minimizer(&t, spec);
        ensure(r.passed, || format!("{:?} failed: {:?}", spec.points, r.failures))?;
    }

    // injected faults
    let spec = origin_and_leaves(2);
    let good = solve(&spec).map_err(|e| e.to_string())?;
    let faulty = |f: &dyn Fn(&mut SteinerTree)| {
        let mut t = good.clone();
        f(&mut t);
        validate_minimizer(&t, &spec)
    };
    let nudged = faulty(&|t| {
        t.steiner_points[0] += Point::new(-0.01, 0.005);
        t.length = t.edge_length_sum();
    });
    ensure(nudged.failed("angle"), || format!("nudged Steiner point: {:?}", nudged.failures))?;
    let outside = faulty(&|t| {
        t.steiner_points[0] = Point::new(2.0, 1.0);
        t.length = t.edge_length_sum();
    });
    ensure(outside.failed("hull"), || format!("outside point: {:?}", outside.failures))?;
    let stale = faulty(&|t| t.length += 1e-6);
    ensure(stale.failed("length_consistency"), || format!("stale length: {:?}", stale.failures))?;

    let spec = TerminalSpec::with_line(leaves(2), OrientedLine::vertical(0.0));
    let mut slanted = solve(&spec).map_err(|e| e.to_string())?;
    slanted.foot = slanted.foot.map(|f| f + Point::new(0.0, 0.05));
    slanted.length = slanted.edge_length_sum();
    let r = validate_minimizer(&slanted, &spec);
    ensure(r.failed("trunk_perpendicular"), || format!("slanted trunk: {:?}", r.failures))?;

    Ok(format!("{} solutions valid, 4 faults caught", specs.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("length formula", 1, length_formula),
        ("dimension and open set condition", 1, dimension_and_osc),
        ("containment in B_lambda(P)", 5, containment),
        ("distance formulas on A_14", 10, distance_formulas),
        ("branching threshold", 1, threshold),
        ("tripod identity", 1, tripod),
        ("solver against oracles", 60, solver_oracles),
        ("truncated tree is the minimizer, N = 2..4", 300, truncated_tree_is_minimizer),
        ("line variant", 60, line_variant),
        ("structural validation", 10, structural_validation),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let took = start.elapsed();
        let over = took > Duration::from_secs(*budget);
        let (status, detail) = match (&outcome, over) {
            (Ok(d), false) => ("PASS", d.clone()),
            (Ok(d), true) => ("FAIL", format!("{d}; over budget")),
            (Err(e), _) => ("FAIL", e.clone()),
        };
        if status == "FAIL" {
            failed += 1;
        }
        println!("criterion {:>2} {status}: {name} [{:.2}s / {budget}s] {detail}", i + 1, took.as_secs_f64());
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
