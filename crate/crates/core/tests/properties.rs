mod common;

use proptest::prelude::*;
use selfsim_steiner::geom::{convex_hull, hull_contains, torricelli_point};
use selfsim_steiner::lemmas::{tripod_lines, tripod_sum};
use selfsim_steiner::smt::{solve, validate_minimizer};
use selfsim_steiner::{OrientedLine, Point, TerminalSpec};

fn point() -> impl Strategy<Value = Point> {
    (-1.0..1.0f64, -1.0..1.0f64).prop_map(|(x, y)| Point::new(x, y))
}

fn separated(n: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(point(), n).prop_filter("points too close", |pts| {
        pts.iter().enumerate().all(|(i, a)| pts[i + 1..].iter().all(|b| a.dist(*b) > 0.05))
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn tripod_sum_is_constant(phi in 0.0..std::f64::consts::TAU, c in prop::array::uniform3(-3.0..3.0f64), a in point(), b in point()) {
        let lines = tripod_lines(phi, c);
        let (sa, sb) = (tripod_sum(&lines, a).unwrap(), tripod_sum(&lines, b).unwrap());
        prop_assert!((sa - sb).abs() < 1e-12);
        prop_assert!((sa + c.iter().sum::<f64>()).abs() < 1e-12);
    }

    #[test]
    fn torricelli_point_beats_perturbations(p in separated(3), dirs in prop::collection::vec((0.0..std::f64::consts::TAU, 1e-6..1e-2f64), 100)) {
        let t = torricelli_point(p[0], p[1], p[2]).unwrap();
        let len = |x: Point| p.iter().map(|q| q.dist(x)).sum::<f64>();
        let best = len(t);
        for (phi, r) in dirs {
            prop_assert!(len(t + Point::polar(phi) * r) >= best - 1e-12);
        }
    }

    #[test]
    fn steiner_points_lie_in_the_hull(p in (3usize..=6).prop_flat_map(separated)) {
        let spec = TerminalSpec::points(p.clone());
        let t = solve(&spec).unwrap();
        let hull = convex_hull(&p);
        for s in &t.steiner_points {
            prop_assert!(hull_contains(&hull, *s, 1e-9));
        }
        prop_assert!(validate_minimizer(&t, &spec).passed);
    }

    #[test]
    fn length_is_between_steiner_ratio_and_spanning_tree(p in (3usize..=6).prop_flat_map(separated)) {
        let t = solve(&TerminalSpec::points(p.clone())).unwrap();
        let mst = common::mst_length(&p);
        prop_assert!(t.length <= mst + 1e-12);
        prop_assert!(t.length >= 3f64.sqrt() / 2.0 * mst - 1e-12);
    }

    #[test]
    fn length_is_invariant_under_isometries(p in (3usize..=5).prop_flat_map(separated), phi in 0.0..std::f64::consts::TAU, shift in point()) {
        let moved: Vec<Point> = p.iter().map(|q| q.rotate(phi) + shift).collect();
        let mirrored: Vec<Point> = p.iter().map(|q| q.mirror()).collect();
        let base = solve(&TerminalSpec::points(p)).unwrap().length;
        prop_assert!((solve(&TerminalSpec::points(moved)).unwrap().length - base).abs() < 1e-9);
        prop_assert!((solve(&TerminalSpec::points(mirrored)).unwrap().length - base).abs() < 1e-9);
    }

    #[test]
    fn line_solutions_are_symmetric_under_reflection(p in (2usize..=4).prop_flat_map(separated), c in -2.0..-1.1f64) {
        let spec = TerminalSpec::with_line(p, OrientedLine::horizontal(c));
        let t = solve(&spec).unwrap();
        let r = validate_minimizer(&t, &spec);
        prop_assert!(r.passed, "{:?}", r.failures);
        let flipped = spec.reflect_y();
        let tf = solve(&flipped).unwrap();
        prop_assert!((t.length - tf.length).abs() < 1e-9);
    }
}
