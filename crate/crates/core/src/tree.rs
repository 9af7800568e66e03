//! The truncated self-similar tree `Sigma_N`.
//!
//! `Sigma = [0,1] u f_1(Sigma) u f_2(Sigma)`; its truncation `Sigma_N` is the
//! union of `f_w([0,1])` over all words with `|w| < N`. The edge for word
//! `w` runs from `f_w(0)` to `f_w(1)`, has length `lambda^|w|`, and its two
//! children are the edges `w1` and `w2`. Nodes are keyed by words, never
//! by coordinates.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{angle_of, Point, Segment};
use crate::ifs::{IfsParams, Letter, Similarity, Word, MAX_DEPTH};
use crate::svg::SvgCanvas;
use crate::tol;

/// A node of `Sigma_N`: the root at the origin, or the far end `f_w(1)` of
/// the edge labelled `w`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeKey {
    Root,
    Tip(Word),
}

impl std::fmt::Display for NodeKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NodeKey::Root => f.write_str("root"),
            NodeKey::Tip(w) => write!(f, "tip[{w}]"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TreeEdge {
    pub word: Word,
    pub level: usize,
    #[serde(flatten)]
    pub segment: Segment,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedTree {
    pub params: IfsParams,
    pub depth: usize,
    /// Ordered by level, then lexicographically by word.
    pub edges: Vec<TreeEdge>,
    pub nodes: BTreeMap<NodeKey, Point>,
}

/// Depth argument of [`tree_length`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Depth {
    Finite(usize),
    Infinite,
}

/// Builds `Sigma_N` for `1 <= N <= MAX_DEPTH`.
pub fn build_tree(params: &IfsParams, depth: usize) -> Result<TruncatedTree> {
    if depth == 0 || depth > MAX_DEPTH {
        return Err(Error::DepthOutOfRange { depth, max: MAX_DEPTH });
    }
    let mut edges = Vec::with_capacity((1usize << depth) - 1);
    let mut nodes = BTreeMap::new();
    nodes.insert(NodeKey::Root, Point::ORIGIN);
    let mut level: Vec<(Word, Similarity)> = vec![(Word::empty(), Similarity::IDENTITY)];
    for k in 0..depth {
        for (w, sim) in &level {
            let seg = Segment::new(sim.apply(Point::ORIGIN), sim.apply(Point::new(1.0, 0.0)));
            nodes.insert(NodeKey::Tip(w.clone()), seg.b);
            edges.push(TreeEdge { word: w.clone(), level: k, segment: seg });
        }
        if k + 1 < depth {
            level = level
                .iter()
                .flat_map(|(w, sim)| Letter::BOTH.map(|j| (w.child(j), sim.then(j, params))))
                .collect();
        }
    }
    Ok(TruncatedTree { params: *params, depth, edges, nodes })
}

/// `sum_{k<N} (2 lambda)^k`, or `1 / (1 - 2 lambda)` for the full tree.
pub fn tree_length(params: &IfsParams, depth: Depth) -> Result<f64> {
    let q = 2.0 * params.lambda();
    match depth {
        Depth::Finite(n) => Ok((1.0 - q.powi(n as i32)) / (1.0 - q)),
        Depth::Infinite if q < 1.0 => Ok(1.0 / (1.0 - q)),
        Depth::Infinite => Err(Error::Divergent(params.lambda())),
    }
}

impl TruncatedTree {
    pub fn length(&self) -> f64 {
        self.edges.iter().map(|e| e.segment.length()).sum()
    }

    /// The tips of the deepest level, i.e. `A_N`, in word order.
    pub fn leaves(&self) -> Vec<Point> {
        self.edges
            .iter()
            .filter(|e| e.level + 1 == self.depth)
            .map(|e| e.segment.b)
            .collect()
    }

    /// Branch points `f_w(1)` for `|w| < N - 1`.
    pub fn branch_points(&self) -> Vec<(Word, Point)> {
        self.edges
            .iter()
            .filter(|e| e.level + 1 < self.depth)
            .map(|e| (e.word.clone(), e.segment.b))
            .collect()
    }

    pub fn node(&self, key: &NodeKey) -> Option<Point> {
        self.nodes.get(key).copied()
    }

    fn start_key(w: &Word) -> NodeKey {
        match w.parent() {
            None => NodeKey::Root,
            Some(p) => NodeKey::Tip(p),
        }
    }

    /// Moves a node together with every edge endpoint attached to it.
    pub fn perturb_node(&mut self, key: &NodeKey, delta: Point) {
        let Some(old) = self.nodes.get_mut(key) else { return };
        *old += delta;
        for e in &mut self.edges {
            if Self::start_key(&e.word) == *key {
                e.segment.a += delta;
            }
            if NodeKey::Tip(e.word.clone()) == *key {
                e.segment.b += delta;
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "lambda": self.params.lambda(),
            "depth": self.depth,
            "length": self.length(),
            "closed_form_length": tree_length(&self.params, Depth::Finite(self.depth)).ok(),
            "edges": self.edges,
        })
    }

    /// Figure of the tree, stroke width shrinking with the level.
    pub fn to_svg(&self) -> String {
        let pts: Vec<Point> = self.edges.iter().flat_map(|e| [e.segment.a, e.segment.b]).collect();
        let mut canvas = SvgCanvas::fit(&pts, 800.0);
        let base = canvas.stroke_unit() * 4.0;
        for e in &self.edges {
            let w = (base * 0.6f64.powi(e.level as i32)).max(canvas.stroke_unit() * 0.2);
            canvas.line(e.segment.a, e.segment.b, w, "black");
        }
        canvas.finish(&format!(
            "self-similar tree, lambda = {}, depth = {}, {} edges",
            self.params.lambda(),
            self.depth,
            self.edges.len()
        ))
    }
}

/// One failed structural check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureFailure {
    pub check: &'static str,
    pub at: String,
    pub deviation: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Default)]
pub struct StructureReport {
    pub worst_angle_deviation: f64,
    pub worst_length_deviation: f64,
    pub worst_incidence: f64,
    pub trunk_tilt: f64,
    pub failures: Vec<StructureFailure>,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn failed(&self, check: &str) -> bool {
        self.failures.iter().any(|f| f.check == check)
    }
}

/// Checks the tree invariants: every edge is attached to the nodes its word
/// names (so the edge set is a connected tree), internal nodes have degree
/// three with all angles 120 degrees, edge lengths are `lambda^k`, and the
/// trunk is perpendicular to the y-axis. Never aborts; failures are listed.
pub fn validate_structure(t: &TruncatedTree) -> StructureReport {
    let mut rep = StructureReport::default();
    let fail = |rep: &mut StructureReport, check, at: String, deviation| {
        rep.failures.push(StructureFailure { check, at, deviation })
    };

    // incidence, connectivity, acyclicity
    let mut adjacency: BTreeMap<NodeKey, Vec<Point>> = BTreeMap::new();
    let mut index: BTreeMap<&NodeKey, usize> = BTreeMap::new();
    for (i, k) in t.nodes.keys().enumerate() {
        index.insert(k, i);
    }
    let mut uf = UnionFind::new(t.nodes.len());
    let mut cycle = false;
    for e in &t.edges {
        let from = TruncatedTree::start_key(&e.word);
        let to = NodeKey::Tip(e.word.clone());
        let (Some(pa), Some(pb)) = (t.node(&from), t.node(&to)) else {
            fail(&mut rep, "connected", format!("edge[{}]", e.word), f64::INFINITY);
            continue;
        };
        let off = pa.dist(e.segment.a).max(pb.dist(e.segment.b));
        rep.worst_incidence = rep.worst_incidence.max(off);
        if off > tol::GEOM {
            fail(&mut rep, "connected", format!("edge[{}]", e.word), off);
        }
        cycle |= !uf.union(index[&from], index[&to]);
        adjacency.entry(from).or_default().push(pb - pa);
        adjacency.entry(to).or_default().push(pa - pb);
    }
    if cycle || t.edges.len() + 1 != t.nodes.len() {
        fail(&mut rep, "acyclic", "graph".into(), (t.edges.len() + 1) as f64 - t.nodes.len() as f64);
    }
    let roots = (0..t.nodes.len()).filter(|&i| uf.find(i) == i).count();
    if roots != 1 {
        fail(&mut rep, "connected", "graph".into(), roots as f64);
    }

    // degrees and angles
    for (key, arms) in &adjacency {
        let internal = match key {
            NodeKey::Root => false,
            NodeKey::Tip(w) => w.len() + 1 < t.depth,
        };
        let expected = if internal { 3 } else { 1 };
        if arms.len() != expected {
            fail(&mut rep, "degree", key.to_string(), arms.len() as f64);
            continue;
        }
        if internal {
            for (i, j) in [(0, 1), (0, 2), (1, 2)] {
                let dev = (angle_of(arms[i], arms[j]) - 2.0 * PI / 3.0).abs();
                rep.worst_angle_deviation = rep.worst_angle_deviation.max(dev);
                if dev > tol::TREE_ANGLE {
                    fail(&mut rep, "angle", key.to_string(), dev);
                }
            }
        }
    }

    for e in &t.edges {
        let expected = t.params.lambda().powi(e.level as i32);
        // absolute: endpoints are O(1), so short edges lose relative accuracy
        let dev = (e.segment.length() - expected).abs();
        rep.worst_length_deviation = rep.worst_length_deviation.max(dev);
        if dev > tol::ALGEBRAIC {
            fail(&mut rep, "edge_length", format!("edge[{}]", e.word), dev);
        }
    }

    if let (Some(root), Some(t0)) = (t.node(&NodeKey::Root), t.node(&NodeKey::Tip(Word::empty()))) {
        let d = t0 - root;
        rep.trunk_tilt = (d.y / d.norm()).abs();
        if rep.trunk_tilt > tol::TREE_ANGLE {
            let tilt = rep.trunk_tilt;
            fail(&mut rep, "trunk_perpendicular", "trunk".into(), tilt);
        }
    }
    rep
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut i: usize) -> usize {
        while self.parent[i] != i {
            self.parent[i] = self.parent[self.parent[i]];
            i = self.parent[i];
        }
        i
    }

    /// False if already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra] = rb;
        true
    }
}
