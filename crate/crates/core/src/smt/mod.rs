//! Exact Euclidean Steiner minimal trees for small terminal sets.
//!
//! Terminals are points, optionally together with one line; a tree reaches
//! the line through a single foot point. The solver is exhaustive over full
//! topologies (see [`topology`]) with branch-and-bound pruning, so its
//! output is a global minimizer up to the refinement tolerance.

mod network;
mod solve;
pub mod topology;
mod validate;

use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{signed_distance, OrientedLine, Point, Segment};
use crate::svg::SvgCanvas;
use crate::tol;

pub use solve::{
    minimum_spanning_length, realize_topology, solve, solve_with, solve_with_line, SolveOptions,
    SolveStats, DEFAULT_MAX_TERMINALS, HARD_MAX_TERMINALS,
};
pub use topology::{enumerate_topologies, full_topology_count, topology_from_code};
pub use validate::{validate_minimizer, MinimizerReport, ReportFailure};

/// Input of the Steiner problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TerminalSpec {
    pub points: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<OrientedLine>,
}

impl TerminalSpec {
    pub fn points(points: Vec<Point>) -> Self {
        TerminalSpec { points, line: None }
    }

    pub fn with_line(points: Vec<Point>, line: OrientedLine) -> Self {
        TerminalSpec { points, line: Some(line) }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let mut spec: TerminalSpec =
            serde_json::from_str(s).map_err(|e| Error::InvalidSpec(e.to_string()))?;
        if let Some(l) = spec.line {
            spec.line = Some(l.normalize()?);
        }
        spec.validate()?;
        Ok(spec)
    }

    /// Finite, pairwise distinct points (at least two, or one with a line)
    /// lying strictly on one side of the line.
    pub fn validate(&self) -> Result<()> {
        let min = if self.line.is_some() { 1 } else { 2 };
        if self.points.len() < min {
            return Err(Error::InvalidSpec(format!("need at least {min} point terminals")));
        }
        for p in &self.points {
            p.check_finite("terminal")?;
        }
        for (i, a) in self.points.iter().enumerate() {
            for b in &self.points[i + 1..] {
                if a.dist(*b) <= tol::GEOM {
                    return Err(Error::InvalidSpec(format!("coincident terminals near ({}, {})", a.x, a.y)));
                }
            }
        }
        if let Some(line) = &self.line {
            line.validate()?;
            let sides: Vec<f64> = self.points.iter().map(|p| signed_distance(*p, line)).collect();
            if sides.iter().any(|d| d.abs() <= tol::GEOM) {
                return Err(Error::InvalidSpec("a terminal lies on the line".into()));
            }
            if !(sides.iter().all(|&d| d > 0.0) || sides.iter().all(|&d| d < 0.0)) {
                return Err(Error::InvalidSpec("terminals on both sides of the line".into()));
            }
        }
        Ok(())
    }

    pub fn reflect_y(&self) -> TerminalSpec {
        TerminalSpec {
            points: self.points.iter().map(|p| p.mirror()).collect(),
            line: self.line.map(|l| {
                OrientedLine::new(l.normal().mirror(), l.offset()).expect("unit normal")
            }),
        }
    }
}

/// Combinatorial tree: terminals are nodes `0..terminals`, Steiner points
/// `terminals..terminals + steiner`, and the foot (if any) is the last node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SteinerTopology {
    pub terminals: usize,
    pub steiner: usize,
    pub foot: bool,
    pub edges: Vec<(usize, usize)>,
}

impl SteinerTopology {
    pub fn node_count(&self) -> usize {
        self.terminals + self.steiner + usize::from(self.foot)
    }

    pub fn foot_id(&self) -> Option<usize> {
        self.foot.then(|| self.terminals + self.steiner)
    }

    pub fn is_steiner(&self, v: usize) -> bool {
        (self.terminals..self.terminals + self.steiner).contains(&v)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.node_count()];
        for &(a, b) in &self.edges {
            d[a] += 1;
            d[b] += 1;
        }
        d
    }

    pub fn neighbours(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Connected and acyclic on all nodes.
    pub fn check_tree(&self) -> Result<()> {
        let n = self.node_count();
        if self.edges.iter().any(|&(a, b)| a >= n || b >= n || a == b) {
            return Err(Error::InvalidSpec("edge endpoint out of range".into()));
        }
        if self.edges.len() + 1 != n {
            return Err(Error::InvalidSpec(format!("{} edges on {n} nodes is not a tree", self.edges.len())));
        }
        let adj = self.neighbours();
        let mut seen = vec![false; n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        if seen.iter().all(|&s| s) {
            Ok(())
        } else {
            Err(Error::InvalidSpec("topology is disconnected".into()))
        }
    }

    /// Tree whose leaves are exactly the terminals (and foot) and whose
    /// Steiner nodes all have degree three.
    pub fn check_full(&self) -> Result<()> {
        self.check_tree()?;
        let leaves = self.terminals + usize::from(self.foot);
        if leaves >= 3 && self.steiner + 2 != leaves {
            return Err(Error::InvalidSpec("full topology needs leaves - 2 Steiner points".into()));
        }
        for (v, d) in self.degrees().into_iter().enumerate() {
            let want = if self.is_steiner(v) { 3 } else { 1 };
            if d != want {
                return Err(Error::InvalidSpec(format!("node {v} has degree {d}, expected {want}")));
            }
        }
        Ok(())
    }

    /// Labelled-topology invariant: for each edge, the set of terminals on
    /// the side away from terminal 0.
    pub fn splits(&self) -> BTreeSet<Vec<usize>> {
        let adj = self.neighbours();
        let leaves = self.terminals + usize::from(self.foot);
        let is_leaf = |v: usize| v < self.terminals || Some(v) == self.foot_id();
        let mut out = BTreeSet::new();
        for &(a, b) in &self.edges {
            let mut side = Vec::new();
            let mut stack = vec![(b, a)];
            while let Some((v, from)) = stack.pop() {
                if is_leaf(v) {
                    side.push(v);
                }
                for &w in &adj[v] {
                    if w != from {
                        stack.push((w, v));
                    }
                }
            }
            side.sort_unstable();
            if side.contains(&0) {
                let all: BTreeSet<usize> = (0..self.node_count()).filter(|&v| is_leaf(v)).collect();
                side = all.into_iter().filter(|v| !side.contains(v)).collect();
            }
            debug_assert!(side.len() < leaves);
            out.insert(side);
        }
        out
    }
}

/// A realized tree: a topology plus coordinates for its Steiner points.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SteinerTree {
    pub topology: SteinerTopology,
    pub terminals: Vec<Point>,
    pub steiner_points: Vec<Point>,
    pub length: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub line: Option<OrientedLine>,
    pub foot: Option<Point>,
    /// Indices into `topology.edges` of zero-length edges.
    pub collapsed: Vec<usize>,
    /// Number of geometrically distinct minimizers found within the tie window.
    pub multiplicity: usize,
}

impl SteinerTree {
    pub fn node(&self, v: usize) -> Point {
        let t = &self.topology;
        if v < t.terminals {
            self.terminals[v]
        } else if t.is_steiner(v) {
            self.steiner_points[v - t.terminals]
        } else {
            self.foot.expect("foot node without foot point")
        }
    }

    pub fn segments(&self) -> Vec<Segment> {
        self.topology.edges.iter().map(|&(a, b)| Segment::new(self.node(a), self.node(b))).collect()
    }

    pub fn edge_length_sum(&self) -> f64 {
        self.segments().iter().map(Segment::length).sum()
    }

    /// Non-collapsed edges as canonical segments.
    pub fn visible_segments(&self) -> Vec<Segment> {
        self.segments()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !self.collapsed.contains(i))
            .map(|(_, s)| s.canonical())
            .collect()
    }

    /// Steiner points that do not sit on a terminal.
    pub fn proper_steiner_points(&self) -> Vec<Point> {
        let n = self.topology.terminals;
        let mut merged = vec![false; self.topology.steiner];
        for &e in &self.collapsed {
            let (a, b) = self.topology.edges[e];
            for (s, o) in [(a, b), (b, a)] {
                if self.topology.is_steiner(s) && o < n {
                    merged[s - n] = true;
                }
            }
        }
        self.steiner_points.iter().zip(merged).filter(|(_, m)| !m).map(|(p, _)| *p).collect()
    }

    pub fn map_points(&self, f: impl Fn(Point) -> Point) -> SteinerTree {
        let mut t = self.clone();
        t.terminals.iter_mut().for_each(|p| *p = f(*p));
        t.steiner_points.iter_mut().for_each(|p| *p = f(*p));
        t.foot = t.foot.map(&f);
        t.line = t.line.map(|l| {
            let a = f(l.anchor());
            let b = f(l.anchor() + l.normal().perp());
            let n = (b - a).perp();
            let side = f(l.anchor() + l.normal()) - a;
            let n = if n.dot(side) < 0.0 { -n } else { n };
            OrientedLine::through(a, n).expect("isometry keeps lines")
        });
        t
    }

    pub fn to_json(&self, report: Option<&MinimizerReport>) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("tree serializes");
        if let Some(r) = report {
            v["report"] = serde_json::to_value(r).expect("report serializes");
        }
        v
    }

    /// Terminals in black, Steiner points in red, foot and line in blue.
    pub fn to_svg(&self) -> String {
        let mut pts = self.terminals.clone();
        pts.extend(&self.steiner_points);
        pts.extend(self.foot);
        let mut canvas = SvgCanvas::fit(&pts, 800.0);
        let u = canvas.stroke_unit();
        if let (Some(line), Some(h)) = (self.line, self.foot) {
            let dir = line.normal().perp();
            let reach = pts.iter().map(|p| p.dist(h)).fold(0.0, f64::max);
            canvas.line(h - dir * reach, h + dir * reach, u, "steelblue");
        }
        for s in self.visible_segments() {
            canvas.line(s.a, s.b, 2.0 * u, "black");
        }
        for p in self.proper_steiner_points() {
            canvas.dot(p, 3.0, "crimson");
        }
        for p in &self.terminals {
            canvas.dot(*p, 4.0, "black");
        }
        if let Some(h) = self.foot {
            canvas.dot(h, 4.0, "steelblue");
        }
        canvas.finish(&format!("Steiner tree, {} terminals, length {}", self.terminals.len(), self.length))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        let ok = TerminalSpec::points(vec![Point::ORIGIN, Point::new(1.0, 0.0)]);
        assert!(ok.validate().is_ok());
        assert!(TerminalSpec::points(vec![Point::ORIGIN]).validate().is_err());
        assert!(TerminalSpec::points(vec![Point::ORIGIN, Point::ORIGIN]).validate().is_err());
        let y = OrientedLine::vertical(0.0);
        assert!(TerminalSpec::with_line(vec![Point::new(3.0, 4.0)], y).validate().is_ok());
        assert!(TerminalSpec::with_line(vec![Point::new(0.0, 4.0)], y).validate().is_err());
        assert!(TerminalSpec::with_line(vec![Point::new(1.0, 0.0), Point::new(-1.0, 0.0)], y)
            .validate()
            .is_err());
    }

    #[test]
    fn spec_json() {
        let s = TerminalSpec::from_json(r#"{"points": [[0,0],[1,0],[0,2]]}"#).unwrap();
        assert_eq!(s.points.len(), 3);
        assert!(s.line.is_none());
        let s = TerminalSpec::from_json(r#"{"points": [[1,1]], "line": {"normal": [2,0], "offset": 0}}"#).unwrap();
        assert_eq!(s.line.unwrap().normal(), Point::new(1.0, 0.0));
        assert!(TerminalSpec::from_json(r#"{"points": [[0,0]]}"#).is_err());
        assert!(TerminalSpec::from_json("not json").is_err());
    }
}
