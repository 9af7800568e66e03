//! Necessary conditions for a Steiner minimal tree, checked on a realized tree.

use serde::Serialize;

use crate::geom::{convex_hull, hull_contains, point_segment_distance, signed_distance, Point};
use crate::tol;
use crate::tree::UnionFind;

use super::{SteinerTree, TerminalSpec};

/// One failed check; `at` names the node or edge involved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportFailure {
    pub check: &'static str,
    pub at: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimizerReport {
    pub passed: bool,
    /// Smallest angle between edges meeting at a node, radians.
    pub min_angle: Option<f64>,
    /// Largest distance of a tree node outside the terminals' hull.
    pub hull_excess: f64,
    /// Sine of the angle between the trunk and the line normal.
    pub trunk_deviation: Option<f64>,
    pub failures: Vec<ReportFailure>,
}

impl MinimizerReport {
    pub fn failed(&self, check: &str) -> bool {
        self.failures.iter().any(|f| f.check == check)
    }
}

/// Checks:
/// - `length_consistency`: stored length equals the edge sum;
/// - `spec`: the tree's terminals are the spec's;
/// - `degree`: terminals are leaves of the topology, and after contracting
///   zero-length edges no junction has more than three edges;
/// - `angle`: edges at a junction meet at no less than 120 degrees;
/// - `hull`: every node lies in the convex hull of the terminals and foot;
/// - `foot`, `trunk_perpendicular`: with a line, one foot on the line whose
///   edge is normal to it;
/// - `strip`: for every edge, the part of the tree beyond it lies in the
///   narrowest strip parallel to the edge containing that part's
///   terminals, and so does the edge's near endpoint.
pub fn validate_minimizer(t: &SteinerTree, spec: &TerminalSpec) -> MinimizerReport {
    let mut failures = Vec::new();
    let mut fail = |check: &'static str, at: String, deviation: f64| failures.push(ReportFailure { check, at, deviation });
    let topo = &t.topology;
    let n = topo.terminals;
    let nodes: Vec<Point> = (0..topo.node_count()).map(|v| t.node(v)).collect();
    let scale = {
        let mut s = 0.0f64;
        for a in &nodes {
            for b in &nodes {
                s = s.max(a.dist(*b));
            }
        }
        s.max(f64::MIN_POSITIVE)
    };
    let eps = tol::GEOM * scale;

    let sum = t.edge_length_sum();
    if (sum - t.length).abs() > tol::ALGEBRAIC * sum.max(1.0) {
        fail("length_consistency", "tree".into(), (sum - t.length).abs());
    }

    if t.terminals.len() != spec.points.len()
        || t.terminals.iter().zip(&spec.points).any(|(a, b)| a.dist(*b) > eps)
        || t.line.is_some() != spec.line.is_some()
    {
        fail("spec", "terminals".into(), f64::INFINITY);
    }

    if let Err(e) = topo.check_tree() {
        fail("degree", e.to_string(), f64::INFINITY);
        return MinimizerReport { passed: false, min_angle: None, hull_excess: f64::NAN, trunk_deviation: None, failures };
    }
    let deg = topo.degrees();
    for (v, &d) in deg.iter().enumerate().take(n) {
        if d != 1 {
            fail("degree", format!("terminal {v}"), d as f64);
        }
    }

    // clusters of nodes joined by zero-length edges
    let mut uf = UnionFind::new(nodes.len());
    let visible: Vec<(usize, usize)> = topo
        .edges
        .iter()
        .enumerate()
        .filter(|&(i, &(a, b))| {
            let zero = t.collapsed.contains(&i) || nodes[a].dist(nodes[b]) <= eps;
            if zero {
                uf.union(a, b);
            }
            !zero
        })
        .map(|(_, &e)| e)
        .collect();
    let mut dirs: Vec<Vec<(f64, usize)>> = vec![Vec::new(); nodes.len()];
    for &(a, b) in &visible {
        let (ra, rb) = (uf.find(a), uf.find(b));
        let d = nodes[b] - nodes[a];
        dirs[ra].push((d.y.atan2(d.x), b));
        dirs[rb].push(((-d.y).atan2(-d.x), a));
    }
    let mut min_angle: Option<f64> = None;
    for (r, ds) in dirs.iter_mut().enumerate() {
        if ds.len() > 3 {
            fail("degree", format!("junction at node {r}"), ds.len() as f64);
        }
        if ds.len() < 2 {
            continue;
        }
        ds.sort_by(|a, b| a.0.total_cmp(&b.0));
        for i in 0..ds.len() {
            let next = if i + 1 < ds.len() { ds[i + 1].0 } else { ds[0].0 + std::f64::consts::TAU };
            let gap = next - ds[i].0;
            min_angle = Some(min_angle.map_or(gap, |m| m.min(gap)));
            if gap < 2.0 * std::f64::consts::FRAC_PI_3 - tol::ANGLE {
                fail("angle", format!("node {r}"), 2.0 * std::f64::consts::FRAC_PI_3 - gap);
            }
        }
    }

    let mut hull_pts = t.terminals.clone();
    hull_pts.extend(t.foot);
    let hull = convex_hull(&hull_pts);
    let mut hull_excess = 0.0f64;
    for (v, p) in nodes.iter().enumerate().skip(n) {
        if !hull_contains(&hull, *p, eps) {
            let d = hull
                .iter()
                .zip(hull.iter().cycle().skip(1))
                .map(|(a, b)| point_segment_distance(*p, *a, *b))
                .fold(f64::INFINITY, f64::min);
            hull_excess = hull_excess.max(d);
            fail("hull", format!("node {v}"), d);
        }
    }

    let mut trunk_deviation = None;
    match (spec.line, topo.foot_id(), t.foot) {
        (Some(line), Some(f), Some(h)) => {
            let off = signed_distance(h, &line).abs();
            if off > eps {
                fail("foot", "foot off the line".into(), off);
            }
            if deg[f] != 1 {
                fail("foot", "foot degree".into(), deg[f] as f64);
            }
            let q = topo.neighbours()[f][0];
            let trunk = nodes[q] - h;
            if trunk.norm() > eps {
                let s = (trunk / trunk.norm()).cross(line.normal()).abs();
                trunk_deviation = Some(s);
                if s > tol::TREE_ANGLE {
                    fail("trunk_perpendicular", format!("edge {q}-{f}"), s);
                }
            }
        }
        (None, None, None) => {}
        _ => fail("foot", "foot does not match the line terminal".into(), f64::INFINITY),
    }

    // strip containment beyond each edge
    let adj = topo.neighbours();
    let foot = topo.foot_id();
    for &(a, b) in &visible {
        for (near, far) in [(a, b), (b, a)] {
            let dir = (nodes[far] - nodes[near]) / nodes[far].dist(nodes[near]);
            let across = dir.perp();
            let mut branch = Vec::new();
            let mut stack = vec![(far, near)];
            let mut has_foot = false;
            while let Some((v, from)) = stack.pop() {
                branch.push(v);
                has_foot |= Some(v) == foot;
                for &w in &adj[v] {
                    if w != from {
                        stack.push((w, v));
                    }
                }
            }
            let terms: Vec<f64> = branch.iter().filter(|&&v| v < n).map(|&v| nodes[v].dot(across)).collect();
            if has_foot || terms.is_empty() {
                continue;
            }
            let lo = terms.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let worst = branch
                .iter()
                .chain(std::iter::once(&near))
                .map(|&v| {
                    let y = nodes[v].dot(across);
                    (lo - y).max(y - hi)
                })
                .fold(f64::NEG_INFINITY, f64::max);
            if worst > eps {
                fail("strip", format!("beyond edge {near}-{far}"), worst);
            }
        }
    }

    MinimizerReport { passed: failures.is_empty(), min_angle, hull_excess, trunk_deviation, failures }
}
