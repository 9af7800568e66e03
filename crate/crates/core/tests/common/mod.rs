//! Independent oracles shared by the integration tests. Nothing here calls
//! the solver.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selfsim_steiner::Point;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `n` points in the unit square, pairwise at least `min_sep` apart.
pub fn random_points(rng: &mut ChaCha8Rng, n: usize, min_sep: f64) -> Vec<Point> {
    let mut pts: Vec<Point> = Vec::with_capacity(n);
    while pts.len() < n {
        let p = Point::new(rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
        if pts.iter().all(|q| q.dist(p) >= min_sep) {
            pts.push(p);
        }
    }
    pts
}

fn sum_dist(x: Point, pts: &[Point]) -> f64 {
    pts.iter().map(|p| p.dist(x)).sum()
}

/// Minimizer of `sum |x - p_i|` by Weiszfeld's iteration, after checking
/// whether some `p_i` is optimal (the unit vectors from the other points
/// sum to length at most one).
pub fn weiszfeld(pts: &[Point]) -> Point {
    for (i, v) in pts.iter().enumerate() {
        let pull = pts
            .iter()
            .enumerate()
            .filter(|(j, _)| *j != i)
            .fold(Point::ORIGIN, |acc, (_, p)| acc + (*p - *v) / p.dist(*v));
        if pull.norm() <= 1.0 {
            return *v;
        }
    }
    let mut x = pts.iter().fold(Point::ORIGIN, |a, p| a + *p) / pts.len() as f64;
    for _ in 0..100_000 {
        let (mut num, mut den) = (Point::ORIGIN, 0.0);
        for p in pts {
            let d = p.dist(x).max(1e-300);
            num += *p / d;
            den += 1.0 / d;
        }
        let next = num / den;
        if next.dist(x) < 1e-15 {
            return next;
        }
        x = next;
    }
    x
}

/// Length of the Steiner minimal tree of three points.
pub fn three_point_length(a: Point, b: Point, c: Point) -> f64 {
    let pts = [a, b, c];
    sum_dist(weiszfeld(&pts), &pts)
}

/// Length of the tree `a, b - s1 - s2 - c, d`.
fn pair_length(q: [Point; 4], s1: Point, s2: Point) -> f64 {
    q[0].dist(s1) + q[1].dist(s1) + s1.dist(s2) + s2.dist(q[2]) + s2.dist(q[3])
}

/// Minimum of [`pair_length`] over both Steiner points: a grid search over
/// the bounding box, then alternating single-point minimization and a
/// shrinking compass search (moving either point or both together).
fn pair_minimum(q: [Point; 4], grid: usize) -> f64 {
    let (mut lo, mut hi) = (q[0], q[0]);
    for p in &q {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    let at = |i: usize, j: usize| Point::new(lo.x + (hi.x - lo.x) * i as f64 / (grid - 1) as f64, lo.y + (hi.y - lo.y) * j as f64 / (grid - 1) as f64);
    let mut best = (f64::INFINITY, Point::ORIGIN, Point::ORIGIN);
    for i1 in 0..grid {
        for j1 in 0..grid {
            let s1 = at(i1, j1);
            for i2 in 0..grid {
                for j2 in 0..grid {
                    let s2 = at(i2, j2);
                    let l = pair_length(q, s1, s2);
                    if l < best.0 {
                        best = (l, s1, s2);
                    }
                }
            }
        }
    }
    let (_, mut s1, mut s2) = best;
    let mut step = (hi.x - lo.x).max(hi.y - lo.y) / grid as f64;
    let dirs = [Point::new(1.0, 0.0), Point::new(-1.0, 0.0), Point::new(0.0, 1.0), Point::new(0.0, -1.0)];
    while step > 1e-12 {
        for _ in 0..5 {
            s1 = weiszfeld(&[q[0], q[1], s2]);
            s2 = weiszfeld(&[q[2], q[3], s1]);
        }
        let mut improved = false;
        let cur = pair_length(q, s1, s2);
        'search: for d in dirs {
            for (m1, m2) in [(1.0, 0.0), (0.0, 1.0), (1.0, 1.0), (1.0, -1.0)] {
                let (t1, t2) = (s1 + d * (step * m1), s2 + d * (step * m2));
                if pair_length(q, t1, t2) < cur - 1e-15 {
                    (s1, s2) = (t1, t2);
                    improved = true;
                    break 'search;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    pair_length(q, s1, s2)
}

/// Length of the Steiner minimal tree of four points: every tree on four
/// terminals is a (possibly degenerate) realization of one of the three
/// pairings.
pub fn four_point_length(p: &[Point]) -> f64 {
    assert_eq!(p.len(), 4);
    [[0, 1, 2, 3], [0, 2, 1, 3], [0, 3, 1, 2]]
        .iter()
        .map(|ix| pair_minimum(ix.map(|i| p[i]), 14))
        .fold(f64::INFINITY, f64::min)
}

/// Prim's algorithm, written independently of the library's.
pub fn mst_length(p: &[Point]) -> f64 {
    let n = p.len();
    let mut in_tree = vec![false; n];
    let mut d = vec![f64::INFINITY; n];
    d[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..n {
        let mut v = usize::MAX;
        for i in 0..n {
            if !in_tree[i] && (v == usize::MAX || d[i] < d[v]) {
                v = i;
            }
        }
        in_tree[v] = true;
        total += d[v];
        for i in 0..n {
            d[i] = d[i].min(p[v].dist(p[i]));
        }
    }
    total
}

/// `sum_{k < n} (2 lambda)^k` by direct summation.
pub fn sigma_length(lambda: f64, n: usize) -> f64 {
    (0..n).map(|k| (2.0 * lambda).powi(k as i32)).sum()
}
