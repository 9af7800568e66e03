//! Branch-and-bound over full topologies.
//!
//! Leaves (terminals, plus the foot when a line is present) are inserted one
//! at a time; each partial topology is realized and its dual lower bound
//! compared with the incumbent. Removing a leaf from a tree never increases
//! its minimum length, so a partial topology whose bound exceeds the
//! incumbent cannot lead to a better full tree. Children are explored in
//! order of their partial length.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geom::{convex_hull, perimeter, perpendicular_foot, signed_distance, torricelli_point, OrientedLine, Point};
use crate::tol;

use super::network::{Network, RefineOpts};
use super::topology::Growing;
use super::{SteinerTopology, SteinerTree, TerminalSpec};

/// Default cap on point terminals for exhaustive solving.
pub const DEFAULT_MAX_TERMINALS: usize = 8;
/// The cap can be raised this far through [`SolveOptions`].
pub const HARD_MAX_TERMINALS: usize = 10;

/// Edges shorter than this fraction of the instance size are snapped shut.
const COLLAPSE: f64 = 1e-8;
/// Relative accuracy of partial realizations (only used for pruning).
const PARTIAL_GAP: f64 = 1e-9;
/// Relative accuracy of complete realizations.
const FULL_GAP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub max_terminals: usize,
    pub exec: Exec,
    /// Conjectured-topology mode: realize only this topology (any size).
    pub topology: Option<SteinerTopology>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { max_terminals: DEFAULT_MAX_TERMINALS, exec: Exec::default(), topology: None }
    }
}

#[derive(Debug, Clone, Default, PartialEq, serde::Serialize)]
pub struct SolveStats {
    pub partial_nodes: usize,
    pub pruned: usize,
    pub complete: usize,
    pub upper_bound: f64,
    pub lower_bound: f64,
    pub not_converged: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Leaf {
    Terminal(usize),
    Foot,
}

/// Leaf positions in insertion order plus the line, with the line's normal
/// pointing towards the terminals.
struct Instance {
    order: Vec<Leaf>,
    fixed: Vec<Point>,
    line: Option<OrientedLine>,
    n_terminals: usize,
}

impl Instance {
    fn new(spec: &TerminalSpec) -> Instance {
        let pts = &spec.points;
        let line = spec.line.map(|l| {
            if signed_distance(pts[0], &l) < 0.0 {
                OrientedLine::new(-l.normal(), -l.offset()).expect("unit normal")
            } else {
                l
            }
        });
        // Farthest-first insertion: early partial trees are long, which
        // makes their lower bounds bite.
        let mut order = Vec::with_capacity(pts.len() + 1);
        let mut left: Vec<usize> = (0..pts.len()).collect();
        let mut reach = vec![f64::INFINITY; pts.len()];
        match &line {
            Some(l) => {
                order.push(Leaf::Foot);
                for (i, r) in reach.iter_mut().enumerate() {
                    *r = signed_distance(pts[i], l);
                }
            }
            None => {
                order.push(Leaf::Terminal(0));
                left.retain(|&i| i != 0);
                for (i, r) in reach.iter_mut().enumerate() {
                    *r = pts[i].dist(pts[0]);
                }
            }
        }
        while !left.is_empty() {
            let (pos, &next) = left
                .iter()
                .enumerate()
                .max_by(|(_, &a), (_, &b)| reach[a].total_cmp(&reach[b]).then(b.cmp(&a)))
                .unwrap();
            left.remove(pos);
            order.push(Leaf::Terminal(next));
            for &i in &left {
                reach[i] = reach[i].min(pts[i].dist(pts[next]));
            }
        }
        let fixed = order
            .iter()
            .map(|l| match l {
                Leaf::Terminal(i) => pts[*i],
                Leaf::Foot => line.unwrap().anchor(),
            })
            .collect();
        Instance { order, fixed, line, n_terminals: pts.len() }
    }

    fn foot(&self) -> Option<(usize, OrientedLine)> {
        self.line.map(|l| (0, l))
    }

    fn network(&self, edges: Vec<(usize, usize)>, n_steiner: usize) -> Network {
        Network::new(self.fixed.clone(), self.foot(), n_steiner, edges)
    }

    /// Upper bound: minimum spanning tree, plus the shortest drop to the line.
    fn spanning_bound(&self) -> f64 {
        let pts: Vec<Point> = self
            .order
            .iter()
            .zip(&self.fixed)
            .filter(|(l, _)| **l != Leaf::Foot)
            .map(|(_, p)| *p)
            .collect();
        let drop = self
            .line
            .map_or(0.0, |l| pts.iter().map(|p| signed_distance(*p, &l)).fold(f64::INFINITY, f64::min));
        minimum_spanning_length(&pts) + drop
    }
}

/// Length of the Euclidean minimum spanning tree (Prim, `O(n^2)`).
pub fn minimum_spanning_length(pts: &[Point]) -> f64 {
    if pts.len() < 2 {
        return 0.0;
    }
    let mut best = vec![f64::INFINITY; pts.len()];
    let mut used = vec![false; pts.len()];
    best[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..pts.len() {
        let v = (0..pts.len()).filter(|&i| !used[i]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        used[v] = true;
        total += best[v];
        for w in 0..pts.len() {
            if !used[w] {
                best[w] = best[w].min(pts[v].dist(pts[w]));
            }
        }
    }
    total
}

#[derive(Debug, Clone)]
struct Candidate {
    code: Vec<usize>,
    edges: Vec<(usize, usize)>,
    coords: Vec<Point>,
    length: f64,
    lower_bound: f64,
}

struct Search<'a> {
    inst: &'a Instance,
    exec: Exec,
    incumbent: AtomicU64,
    partial_nodes: AtomicUsize,
    pruned: AtomicUsize,
    complete: AtomicUsize,
    not_converged: AtomicUsize,
}

impl Search<'_> {
    fn incumbent(&self) -> f64 {
        f64::from_bits(self.incumbent.load(Ordering::Acquire))
    }

    fn offer(&self, length: f64) {
        let _ = self.incumbent.fetch_update(Ordering::AcqRel, Ordering::Acquire, |cur| {
            (length < f64::from_bits(cur)).then(|| length.to_bits())
        });
    }

    fn slack(&self, length: f64) -> f64 {
        tol::TIE * length.abs().max(1e-300)
    }

    /// Expands a realized partial topology; returns surviving full trees.
    fn expand(&self, g: &Growing, coords: &[Point], code: &[usize]) -> Vec<Candidate> {
        let m = self.inst.fixed.len();
        let parent = self.inst.network(g.edges.clone(), g.steiner_count());
        let leaf_pos = self.inst.fixed[g.leaves];
        let children: Vec<(usize, Growing, Vec<Point>, f64, f64)> = self
            .exec
            .map_range(g.edges.len(), |e| {
                let child = g.insert(e);
                let (a, b) = g.edges[e];
                let mut x = coords.to_vec();
                x.push((parent.pos(coords, a) + parent.pos(coords, b) + leaf_pos) / 3.0);
                let net = self.inst.network(child.edges.clone(), child.steiner_count());
                let full = child.leaves == m;
                let gap = if full { FULL_GAP } else { PARTIAL_GAP } * net.magnitude;
                let inc = self.incumbent();
                let out = net.refine(&mut x, &RefineOpts { gap_tol: gap, max_iter: tol::MAX_REFINE_STEPS, prune_above: inc + self.slack(inc), snap: true });
                self.partial_nodes.fetch_add(1, Ordering::Relaxed);
                if out.pruned {
                    self.pruned.fetch_add(1, Ordering::Relaxed);
                    return None;
                }
                if !out.converged {
                    self.not_converged.fetch_add(1, Ordering::Relaxed);
                }
                Some((e, child, x, out.length, out.lower_bound))
            })
            .into_iter()
            .flatten()
            .collect();

        if g.leaves + 1 == m {
            let mut out = Vec::new();
            for (e, child, x, length, lower_bound) in children {
                self.complete.fetch_add(1, Ordering::Relaxed);
                self.offer(length);
                let inc = self.incumbent();
                if length <= inc + self.slack(inc) {
                    let mut c = code.to_vec();
                    c.push(e);
                    out.push(Candidate { code: c, edges: child.edges, coords: x, length, lower_bound });
                }
            }
            return out;
        }

        let mut children = children;
        children.sort_by(|a, b| a.3.total_cmp(&b.3).then(a.0.cmp(&b.0)));
        let prefix = code.to_vec();
        self.exec
            .map(&children, |(e, child, x, _, lb)| {
                let inc = self.incumbent();
                if *lb > inc + self.slack(inc) {
                    self.pruned.fetch_add(1, Ordering::Relaxed);
                    return Vec::new();
                }
                let mut c = prefix.clone();
                c.push(*e);
                self.expand(child, x, &c)
            })
            .into_iter()
            .flatten()
            .collect()
    }
}

/// Snaps edges shorter than the collapse threshold shut and re-optimizes
/// the contracted tree; keeps the unsnapped coordinates if that is longer.
fn finish(net: &Network, coords: &[Point]) -> (Vec<Point>, Vec<usize>) {
    match net.snap(coords, COLLAPSE * net.scale) {
        Some((snapped, short)) if net.length(&snapped) <= net.length(coords) + 1e-13 * net.magnitude => (snapped, short),
        _ => (coords.to_vec(), Vec::new()),
    }
}

/// Converts a realized network (internal leaf order) into a public tree.
fn assemble(inst: &Instance, edges: &[(usize, usize)], coords: &[Point], collapsed: Vec<usize>, spec: &TerminalSpec) -> SteinerTree {
    let m = inst.fixed.len();
    let n = inst.n_terminals;
    let s = coords.len();
    let id = |v: usize| -> usize {
        if v < m {
            match inst.order[v] {
                Leaf::Terminal(t) => t,
                Leaf::Foot => n + s,
            }
        } else {
            n + (v - m)
        }
    };
    let net = inst.network(edges.to_vec(), s);
    let foot = inst.line.map(|_| net.pos(coords, 0));
    let topology = SteinerTopology {
        terminals: n,
        steiner: s,
        foot: inst.line.is_some(),
        edges: edges.iter().map(|&(a, b)| (id(a), id(b))).collect(),
    };
    let mut t = SteinerTree {
        topology,
        terminals: spec.points.clone(),
        steiner_points: coords.to_vec(),
        length: 0.0,
        line: spec.line,
        foot,
        collapsed,
        multiplicity: 1,
    };
    t.length = t.edge_length_sum();
    t
}

/// Solves the Steiner problem for `spec` (point terminals and optionally a
/// line) with default options.
pub fn solve(spec: &TerminalSpec) -> Result<SteinerTree> {
    solve_with(spec, &SolveOptions::default()).map(|(t, _)| t)
}

/// Solves with a line terminal; the spec must carry a line.
pub fn solve_with_line(spec: &TerminalSpec) -> Result<SteinerTree> {
    if spec.line.is_none() {
        return Err(Error::InvalidSpec("no line terminal given".into()));
    }
    solve(spec)
}

pub fn solve_with(spec: &TerminalSpec, opts: &SolveOptions) -> Result<(SteinerTree, SolveStats)> {
    spec.validate()?;
    if let Some(topo) = &opts.topology {
        let t = realize_topology(topo, spec, 1e-12, None)?
            .ok_or_else(|| Error::NoConvergence("topology realization pruned".into()))?;
        let stats = SolveStats { complete: 1, upper_bound: t.length, lower_bound: t.length, ..Default::default() };
        return Ok((t, stats));
    }
    let n = spec.points.len();
    let cap = opts.max_terminals.min(HARD_MAX_TERMINALS);
    if n > cap {
        return Err(Error::TerminalCap { n, min: 1, max: cap });
    }
    let inst = Instance::new(spec);
    let m = inst.fixed.len();

    if m == 2 {
        // a single edge: two points, or one point dropped onto the line
        let net = inst.network(vec![(0, 1)], 0);
        let t = assemble(&inst, &[(0, 1)], &[], Vec::new(), spec);
        let stats = SolveStats { complete: 1, upper_bound: net.length(&[]), lower_bound: net.length(&[]), ..Default::default() };
        return Ok((t, stats));
    }

    let star = Growing::star(m);
    let mut x0 = vec![(inst.fixed[1] + inst.fixed[2] + inst.fixed[0]) / 3.0];
    if let Some(l) = inst.line {
        let mid = (inst.fixed[1] + inst.fixed[2]) * 0.5;
        x0[0] = (inst.fixed[1] + inst.fixed[2] + perpendicular_foot(mid, &l)) / 3.0;
    }
    let star_net = inst.network(star.edges.clone(), 1);
    if m == 3 && inst.line.is_none() {
        x0[0] = torricelli_point(inst.fixed[0], inst.fixed[1], inst.fixed[2])?;
    } else {
        star_net.refine(&mut x0, &RefineOpts { gap_tol: PARTIAL_GAP * star_net.magnitude, max_iter: tol::MAX_REFINE_STEPS, prune_above: f64::INFINITY, snap: true });
    }

    let search = Search {
        inst: &inst,
        exec: opts.exec,
        incumbent: AtomicU64::new(inst.spanning_bound().to_bits()),
        partial_nodes: AtomicUsize::new(1),
        pruned: AtomicUsize::new(0),
        complete: AtomicUsize::new(0),
        not_converged: AtomicUsize::new(0),
    };
    let candidates = if m == 3 {
        search.complete.fetch_add(1, Ordering::Relaxed);
        let len = star_net.length(&x0);
        let lower_bound = star_net.lower_bound(&x0).min(len);
        vec![Candidate { code: vec![], edges: star.edges.clone(), coords: x0, length: len, lower_bound }]
    } else {
        search.expand(&star, &x0, &[])
    };

    let best_len = candidates.iter().map(|c| c.length).fold(f64::INFINITY, f64::min);
    if !best_len.is_finite() {
        // Only possible if the spanning bound was not beaten within the
        // tie window by any topology, which the spanning tree itself
        // realizes; retry without pruning would be the fix.
        return Err(Error::NoConvergence("no topology realized below the spanning-tree bound".into()));
    }
    let window = best_len + search.slack(best_len);
    let mut tied: Vec<&Candidate> = candidates.iter().filter(|c| c.length <= window).collect();
    tied.sort_by(|a, b| a.code.cmp(&b.code));
    let winner = tied[0];

    let net = inst.network(winner.edges.clone(), winner.coords.len());
    let mut coords = winner.coords.clone();
    net.refine(&mut coords, &RefineOpts { gap_tol: 1e-14 * net.magnitude, max_iter: tol::MAX_REFINE_STEPS, prune_above: f64::INFINITY, snap: true });
    let (coords, collapsed) = finish(&net, &coords);
    let mut tree = assemble(&inst, &winner.edges, &coords, collapsed, spec);

    let mut shapes = BTreeSet::new();
    for c in &tied {
        let net = inst.network(c.edges.clone(), c.coords.len());
        let eps = COLLAPSE * net.scale;
        let grid = 1e-6 * net.scale;
        let mut segs: Vec<[i64; 4]> = c
            .edges
            .iter()
            .filter(|&&e| net.edge_length(&c.coords, e) >= eps)
            .map(|&(a, b)| {
                let s = crate::geom::Segment::new(net.pos(&c.coords, a), net.pos(&c.coords, b)).canonical();
                [s.a.x, s.a.y, s.b.x, s.b.y].map(|v| (v / grid).round() as i64)
            })
            .collect();
        segs.sort_unstable();
        shapes.insert(segs);
    }
    tree.multiplicity = shapes.len();

    let mut hull_pts = tree.terminals.clone();
    hull_pts.extend(tree.foot);
    let hull_lb = hull_lower_bound(&hull_pts);
    if tree.length < hull_lb * (1.0 - 1e-12) {
        return Err(Error::NoConvergence(format!("length {} below the hull bound {hull_lb}", tree.length)));
    }
    let stats = SolveStats {
        partial_nodes: search.partial_nodes.load(Ordering::Relaxed),
        pruned: search.pruned.load(Ordering::Relaxed),
        complete: search.complete.load(Ordering::Relaxed),
        upper_bound: tree.length,
        lower_bound: candidates
            .iter()
            .map(|c| c.lower_bound)
            .fold(f64::INFINITY, f64::min)
            .min(tree.length)
            .max(hull_lb),
        not_converged: search.not_converged.load(Ordering::Relaxed),
    };
    Ok((tree, stats))
}

/// Half the hull perimeter: no connected set through the points is shorter.
pub(crate) fn hull_lower_bound(pts: &[Point]) -> f64 {
    perimeter(&convex_hull(pts)) / 2.0
}

/// Minimizes the length of one topology.
///
/// Returns `Ok(None)` when the topology's lower bound already exceeds
/// `incumbent`, and an error if refinement hits its iteration cap. `tol`
/// is the accepted length gap relative to the instance size.
pub fn realize_topology(
    topo: &SteinerTopology,
    spec: &TerminalSpec,
    tol: f64,
    incumbent: Option<f64>,
) -> Result<Option<SteinerTree>> {
    spec.validate()?;
    topo.check_tree()?;
    let n = spec.points.len();
    if topo.terminals != n || topo.foot != spec.line.is_some() {
        return Err(Error::InvalidSpec(format!(
            "topology has {} terminals (foot: {}), spec has {n} (line: {})",
            topo.terminals,
            topo.foot,
            spec.line.is_some()
        )));
    }
    // internal ids: terminals 0..n, foot n, Steiner after
    let s = topo.steiner;
    let foot_id = topo.foot_id();
    let map = |v: usize| -> usize {
        if v < n {
            v
        } else if Some(v) == foot_id {
            n
        } else {
            v + usize::from(topo.foot)
        }
    };
    let line = spec.line.map(|l| {
        if signed_distance(spec.points[0], &l) < 0.0 {
            OrientedLine::new(-l.normal(), -l.offset()).expect("unit normal")
        } else {
            l
        }
    });
    let mut fixed = spec.points.clone();
    if let Some(l) = line {
        fixed.push(l.anchor());
    }
    let m = fixed.len();
    let edges: Vec<(usize, usize)> = topo.edges.iter().map(|&(a, b)| (map(a), map(b))).collect();
    let net = Network::new(fixed, line.map(|l| (n, l)), s, edges.clone());

    let mut x = if s == 1 && m == 3 && line.is_none() && topo.degrees()[n] == 3 {
        vec![torricelli_point(spec.points[0], spec.points[1], spec.points[2])?]
    } else {
        uniform_init(&net)
    };
    let exact = s == 1 && m == 3 && line.is_none();
    if !exact {
        let out = net.refine(&mut x, &RefineOpts {
            gap_tol: tol * net.magnitude,
            max_iter: tol::MAX_REFINE_STEPS,
            prune_above: incumbent.unwrap_or(f64::INFINITY),
            snap: true,
        });
        if out.pruned {
            return Ok(None);
        }
        if !out.converged {
            return Err(Error::NoConvergence(format!(
                "gap {:.3e} after {} steps (length {}, bound {})",
                out.length - out.lower_bound,
                out.iterations,
                out.length,
                out.lower_bound
            )));
        }
    }
    let (x, collapsed) = if exact {
        let short = (0..edges.len()).filter(|&i| net.edge_length(&x, edges[i]) < COLLAPSE * net.scale).collect();
        (x, short)
    } else {
        finish(&net, &x)
    };
    let length = net.length(&x);
    if incumbent.is_some_and(|inc| length > inc) {
        return Ok(None);
    }
    let foot = line.map(|_| net.pos(&x, n));
    let mut t = SteinerTree {
        topology: topo.clone(),
        terminals: spec.points.clone(),
        steiner_points: x,
        length,
        line: spec.line,
        foot,
        collapsed,
        multiplicity: 1,
    };
    t.length = t.edge_length_sum();
    Ok(Some(t))
}

/// Tutte-style start: every Steiner point at the average of its neighbours
/// (unit weights), foot edges ignored.
fn uniform_init(net: &Network) -> Vec<Point> {
    let m = net.fixed.len();
    let s = net.n_steiner;
    let foot = net.foot.map(|(f, _)| f);
    let mut a = vec![0.0; s * s];
    let mut b = vec![Point::ORIGIN; s];
    let centroid = net.fixed.iter().enumerate().filter(|(i, _)| Some(*i) != foot).fold(Point::ORIGIN, |acc, (_, p)| acc + *p)
        / (m - usize::from(foot.is_some())) as f64;
    for &(u, v) in &net.edges {
        if Some(u) == foot || Some(v) == foot {
            // keeps the system definite when a Steiner point only touches the foot
            let q = if Some(u) == foot { v } else { u };
            if q >= m {
                a[(q - m) * (s + 1)] += 1e-3;
                b[q - m] += centroid * 1e-3;
            }
            continue;
        }
        match (u >= m, v >= m) {
            (true, true) => {
                let (i, j) = (u - m, v - m);
                a[i * s + i] += 1.0;
                a[j * s + j] += 1.0;
                a[i * s + j] -= 1.0;
                a[j * s + i] -= 1.0;
            }
            (true, false) => {
                a[(u - m) * (s + 1)] += 1.0;
                b[u - m] += net.fixed[v];
            }
            (false, true) => {
                a[(v - m) * (s + 1)] += 1.0;
                b[v - m] += net.fixed[u];
            }
            (false, false) => {}
        }
    }
    // tiny deterministic offsets keep coincident starts apart
    for (i, bi) in b.iter_mut().enumerate() {
        let jitter = Point::polar(i as f64 * 2.399_963) * (1e-3 * net.scale);
        *bi += jitter * a[i * (s + 1)];
    }
    let mut l = a.clone();
    let mut x = b.clone();
    if !super::network::cholesky_solve(&mut l, &mut x, s) {
        return vec![centroid; s];
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spanning_length_of_square() {
        let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        assert!((minimum_spanning_length(&sq) - 3.0).abs() < 1e-15);
        assert_eq!(minimum_spanning_length(&sq[..1]), 0.0);
    }

    #[test]
    fn hull_bound_of_square() {
        let sq = [Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        assert!((hull_lower_bound(&sq) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn square_has_two_tied_minimizers() {
        let sq = vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(1.0, 1.0), Point::new(0.0, 1.0)];
        let (t, _) = solve_with(&TerminalSpec::points(sq), &SolveOptions::default()).unwrap();
        assert!((t.length - (1.0 + 3f64.sqrt())).abs() < 1e-10);
        assert_eq!(t.multiplicity, 2);
    }

    #[test]
    fn farthest_first_order() {
        let pts = vec![Point::new(0.0, 0.0), Point::new(0.1, 0.0), Point::new(5.0, 0.0), Point::new(2.0, 1.0)];
        let inst = Instance::new(&TerminalSpec::points(pts));
        assert_eq!(inst.order, vec![Leaf::Terminal(0), Leaf::Terminal(2), Leaf::Terminal(3), Leaf::Terminal(1)]);
    }

    #[test]
    fn cap_is_enforced() {
        let pts: Vec<Point> = (0..9).map(|i| Point::polar(i as f64)).collect();
        let err = solve(&TerminalSpec::points(pts)).unwrap_err();
        assert!(matches!(err, Error::TerminalCap { n: 9, .. }));
    }
}
