//! Fixed-topology length minimization.
//!
//! A [`Network`] is a tree whose fixed nodes are terminals and whose
//! variable nodes are Steiner points; at most one fixed node may instead be
//! a foot sliding on a line, in which case its edge costs the distance from
//! its neighbour to the line. The total length is convex in the variable
//! coordinates.
//!
//! Minimization alternates two steps:
//! - reweighted least squares (each edge weighted by its inverse length,
//!   which majorizes the length), monotone and robust to edges shrinking
//!   to zero;
//! - a dual lower bound from edge flows. Any assignment of vectors `u_e`
//!   with `|u_e| <= 1` that balances at every variable node gives
//!   `L(x) >= sum_e u_e . (x_child - x_parent)`, which is constant in the
//!   variables. At a minimizer the bound is tight, so `L - LB` is a
//!   certificate of accuracy and a safe pruning test.
//!
//! A Newton polish on networks without zero-length edges takes the
//! coordinates the rest of the way to machine precision.

use crate::geom::{perpendicular_foot, signed_distance, OrientedLine, Point};
use crate::tree::UnionFind;

const NONE: usize = usize::MAX;

#[derive(Debug, Clone)]
pub(crate) struct Network {
    /// Positions of fixed nodes `0..fixed.len()`; the foot's entry is unused.
    pub fixed: Vec<Point>,
    pub foot: Option<(usize, OrientedLine)>,
    pub n_steiner: usize,
    pub edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    root: usize,
    parent: Vec<usize>,
    /// Reachable nodes, parents before children.
    preorder: Vec<usize>,
    /// Typical length of the instance.
    pub scale: f64,
    /// Typical coordinate magnitude (for rounding-aware tolerances).
    pub magnitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Outcome {
    pub length: f64,
    pub lower_bound: f64,
    pub iterations: usize,
    pub converged: bool,
    pub pruned: bool,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct RefineOpts {
    /// Stop once `length - lower_bound` drops below this.
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Give up as soon as the lower bound exceeds this.
    pub prune_above: f64,
    /// Periodically try contracting short edges (see [`Network::snap`]).
    pub snap: bool,
}

/// Iterations after which a contraction is attempted.
const SNAP_AT: [usize; 4] = [100, 400, 1500, 5000];
/// Contraction thresholds, as fractions of the instance size.
const SNAP_FRACTIONS: [f64; 3] = [1e-3, 1e-5, 1e-7];

impl Network {
    pub fn new(
        fixed: Vec<Point>,
        foot: Option<(usize, OrientedLine)>,
        n_steiner: usize,
        edges: Vec<(usize, usize)>,
    ) -> Self {
        let n = fixed.len() + n_steiner;
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let root = foot.map(|(f, _)| f).unwrap_or_else(|| {
            (0..fixed.len()).find(|&i| !adj[i].is_empty()).unwrap_or(0)
        });
        let mut parent = vec![NONE; n];
        let mut preorder = Vec::with_capacity(n);
        let mut stack = vec![root];
        parent[root] = root;
        while let Some(v) = stack.pop() {
            preorder.push(v);
            for &w in adj[v].iter().rev() {
                if parent[w] == NONE {
                    parent[w] = v;
                    stack.push(w);
                }
            }
        }
        let active: Vec<Point> = (0..fixed.len())
            .filter(|&i| !adj[i].is_empty() && foot.is_none_or(|(f, _)| f != i))
            .map(|i| fixed[i])
            .collect();
        let mut scale = 0.0f64;
        for (i, a) in active.iter().enumerate() {
            for b in &active[i + 1..] {
                scale = scale.max(a.dist(*b));
            }
        }
        if let Some((_, line)) = &foot {
            for a in &active {
                scale = scale.max(signed_distance(*a, line).abs());
            }
        }
        let magnitude = active.iter().map(|p| p.norm()).fold(scale, f64::max);
        Network { fixed, foot, n_steiner, edges, adj, root, parent, preorder, scale: scale.max(1e-300), magnitude: magnitude.max(1e-300) }
    }

    fn is_fixed(&self, v: usize) -> bool {
        v < self.fixed.len()
    }

    fn is_foot(&self, v: usize) -> bool {
        self.foot.is_some_and(|(f, _)| f == v)
    }

    fn line(&self) -> Option<&OrientedLine> {
        self.foot.as_ref().map(|(_, l)| l)
    }

    /// Position of node `v` given the variable coordinates `x`.
    pub fn pos(&self, x: &[Point], v: usize) -> Point {
        if self.is_foot(v) {
            let nb = self.adj[v][0];
            perpendicular_foot(self.pos(x, nb), self.line().unwrap())
        } else if self.is_fixed(v) {
            self.fixed[v]
        } else {
            x[v - self.fixed.len()]
        }
    }

    pub fn edge_length(&self, x: &[Point], (a, b): (usize, usize)) -> f64 {
        if self.is_foot(a) || self.is_foot(b) {
            let q = if self.is_foot(a) { b } else { a };
            signed_distance(self.pos(x, q), self.line().unwrap()).abs()
        } else {
            self.pos(x, a).dist(self.pos(x, b))
        }
    }

    pub fn length(&self, x: &[Point]) -> f64 {
        self.edges.iter().map(|&e| self.edge_length(x, e)).sum()
    }

    /// Edges shorter than this are treated as collapsed by the dual bound.
    fn collapse_eps(&self) -> f64 {
        1e-10 * self.scale
    }

    /// Dual lower bound on the minimum length for this topology.
    pub fn lower_bound(&self, x: &[Point]) -> f64 {
        self.lower_bound_with(x, 0.0)
    }

    /// The dual bound with terminal-edge flows `e / sqrt(|e|^2 + mu^2)`.
    /// At a minimizer of the smoothed length these balance exactly, so
    /// the bound is tight there even when edges have collapsed. With
    /// `mu = 0`, collapsed terminal edges take whatever flow balances
    /// their Steiner point instead.
    pub fn lower_bound_with(&self, x: &[Point], mu: f64) -> f64 {
        let n = self.fixed.len() + self.n_steiner;
        let mut flow = vec![Point::ORIGIN; n];
        let mut pending = vec![NONE; n];
        let eps = if mu > 0.0 { 0.0 } else { self.collapse_eps() };
        for &v in self.preorder.iter().rev() {
            if v == self.root {
                continue;
            }
            let p = self.parent[v];
            let up = self.pos(x, v) - self.pos(x, p);
            let len = if self.is_foot(p) { self.edge_length(x, (v, p)) } else { up.norm() };
            let collapsed = len < eps;
            if self.is_fixed(v) {
                if collapsed {
                    pending[v] = v;
                } else {
                    flow[v] = up / (len * len + mu * mu).sqrt();
                }
            } else {
                let mut sum = Point::ORIGIN;
                let mut pend = NONE;
                for &c in &self.adj[v] {
                    if c != p {
                        sum += flow[c];
                        if pend == NONE {
                            pend = pending[c];
                        }
                    }
                }
                flow[v] = sum;
                if pend != NONE && !collapsed {
                    let target = if self.is_foot(p) {
                        self.line().unwrap().normal() * signed_distance(self.pos(x, v), self.line().unwrap()).signum()
                    } else {
                        up / len
                    };
                    self.add_along_path(&mut flow, pend, v, target - sum);
                } else {
                    pending[v] = pend;
                }
            }
        }

        let children: Vec<usize> = self.adj[self.root].clone();
        if let Some((_, line)) = self.foot {
            // The foot edge only carries flow normal to the line.
            let q = children[0];
            let nu = line.normal();
            let u = flow[q];
            let perp = u - nu * u.dot(nu);
            if let Some(&f) = self.preorder.iter().rev().find(|&&v| v != self.root && self.is_fixed(v)) {
                self.add_along_path(&mut flow, f, q, -perp);
            } else if perp.norm() > 0.0 {
                // a lone Steiner chain with no other terminal cannot happen
                return f64::NEG_INFINITY;
            }
        }

        let max_flow = (0..n).filter(|&v| v != self.root && self.parent[v] != NONE).map(|v| flow[v].norm()).fold(0.0, f64::max);
        let s = if max_flow > 1.0 { 1.0 / max_flow } else { 1.0 };

        let mut lb = 0.0;
        for &v in &self.preorder {
            if !self.is_fixed(v) {
                continue;
            }
            let mut coef = if v == self.root { Point::ORIGIN } else { flow[v] };
            for &c in &self.adj[v] {
                if c != self.parent[v] || v == self.root {
                    coef -= flow[c];
                }
            }
            let anchor = if self.is_foot(v) { self.foot.unwrap().1.anchor() } else { self.fixed[v] };
            lb += anchor.dot(coef);
        }
        lb * s
    }

    fn add_along_path(&self, flow: &mut [Point], from: usize, to: usize, delta: Point) {
        let mut v = from;
        loop {
            flow[v] += delta;
            if v == to || v == self.root {
                break;
            }
            v = self.parent[v];
        }
    }

    /// One reweighted least-squares step; returns the largest coordinate move.
    fn smith_step(&self, x: &mut [Point], a: &mut Vec<f64>, b: &mut Vec<Point>) -> f64 {
        let s = self.n_steiner;
        let m = self.fixed.len();
        a.clear();
        a.resize(s * s, 0.0);
        b.clear();
        b.resize(s, Point::ORIGIN);
        let floor = 1e-15 * self.scale;
        for &(u, v) in &self.edges {
            if self.is_foot(u) || self.is_foot(v) {
                let q = if self.is_foot(u) { v } else { u };
                if q >= m {
                    let line = self.line().unwrap();
                    b[q - m] -= line.normal() * signed_distance(x[q - m], line).signum();
                }
                continue;
            }
            let w = 1.0 / self.pos(x, u).dist(self.pos(x, v)).max(floor);
            match (u >= m, v >= m) {
                (true, true) => {
                    let (i, j) = (u - m, v - m);
                    a[i * s + i] += w;
                    a[j * s + j] += w;
                    a[i * s + j] -= w;
                    a[j * s + i] -= w;
                }
                (true, false) => {
                    a[(u - m) * (s + 1)] += w;
                    b[u - m] += self.fixed[v] * w;
                }
                (false, true) => {
                    a[(v - m) * (s + 1)] += w;
                    b[v - m] += self.fixed[u] * w;
                }
                (false, false) => {}
            }
        }
        if !cholesky_solve(a, b, s) {
            return 0.0;
        }
        let mut moved = 0.0f64;
        for (xi, bi) in x.iter_mut().zip(b.iter()) {
            moved = moved.max(xi.dist(*bi));
            *xi = *bi;
        }
        moved
    }

    /// Minimizes the length from the starting coordinates in `x`.
    pub fn refine(&self, x: &mut [Point], opts: &RefineOpts) -> Outcome {
        let mut a = Vec::new();
        let mut b = Vec::new();
        let mut out = Outcome { length: self.length(x), lower_bound: f64::NEG_INFINITY, iterations: 0, converged: false, pruned: false };
        if self.n_steiner == 0 {
            out.lower_bound = out.length;
            out.converged = true;
            return out;
        }
        for it in 0..=opts.max_iter {
            out.length = self.length(x);
            out.lower_bound = out.lower_bound.max(self.lower_bound(x));
            out.iterations = it;
            if out.lower_bound > opts.prune_above {
                out.pruned = true;
                return out;
            }
            if out.length - out.lower_bound <= opts.gap_tol {
                out.converged = true;
                return out;
            }
            if it == opts.max_iter {
                break;
            }
            if opts.snap && SNAP_AT.contains(&it) {
                if let Some(done) = self.accelerate(x, &mut out, opts.gap_tol) {
                    return done;
                }
            }
            self.smith_step(x, &mut a, &mut b);
        }
        out
    }

    /// Reweighting crawls on badly scaled trees and when a Steiner point
    /// should sit on a terminal or merge with another, and can stick to a
    /// terminal it should leave. Try smoothed and exact Newton,
    /// then contractions at decreasing thresholds; adopt any result that is
    /// shorter, and stop if one is certified.
    fn accelerate(&self, x: &mut [Point], out: &mut Outcome, gap_tol: f64) -> Option<Outcome> {
        let mut y = x.to_vec();
        let mu = self.smoothed_descent(&mut y);
        out.lower_bound = out.lower_bound.max(self.lower_bound_with(&y, mu));
        self.newton_polish(&mut y, 30);
        let ly = self.length(&y);
        if ly < out.length {
            x.copy_from_slice(&y);
            out.length = ly;
            out.lower_bound = out.lower_bound.max(self.lower_bound(x));
        }
        if out.length - out.lower_bound <= gap_tol {
            out.converged = true;
            return Some(*out);
        }
        for frac in SNAP_FRACTIONS {
            if let Some((y, _)) = self.snap(x, frac * self.scale) {
                let (ly, lby) = (self.length(&y), self.lower_bound(&y));
                if ly <= out.length && ly - lby <= gap_tol {
                    x.copy_from_slice(&y);
                    out.length = ly;
                    out.lower_bound = out.lower_bound.max(lby);
                    out.converged = true;
                    return Some(*out);
                }
            }
        }
        None
    }

    /// Contracts every edge shorter than `eps` (foot edges excepted), so that
    /// merged Steiner points coincide with the fixed node of their cluster or
    /// with each other, then minimizes the contracted tree. Returns the new
    /// coordinates and the contracted edge indices, or `None` if no edge is
    /// short.
    pub fn snap(&self, x: &[Point], eps: f64) -> Option<(Vec<Point>, Vec<usize>)> {
        let m = self.fixed.len();
        let short: Vec<usize> = (0..self.edges.len())
            .filter(|&i| {
                let (a, b) = self.edges[i];
                !self.is_foot(a) && !self.is_foot(b) && self.edge_length(x, (a, b)) < eps
            })
            .collect();
        if short.is_empty() {
            return None;
        }
        let n_nodes = m + self.n_steiner;
        let mut uf = UnionFind::new(n_nodes);
        for &i in &short {
            let (a, b) = self.edges[i];
            if self.is_fixed(a) && self.is_fixed(b) {
                return None;
            }
            if self.is_fixed(uf.find(a)) && self.is_fixed(uf.find(b)) {
                // would merge two terminals
                return None;
            }
            // keep fixed nodes as representatives
            let (ra, rb) = (uf.find(a), uf.find(b));
            if self.is_fixed(rb) {
                uf.union(ra, rb);
            } else {
                uf.union(rb, ra);
            }
        }
        let mut rep = vec![NONE; n_nodes];
        let mut n_var = 0;
        let mut sum: Vec<(Point, f64)> = Vec::new();
        for v in m..n_nodes {
            let r = uf.find(v);
            if self.is_fixed(r) {
                rep[v] = r;
            } else if rep[r] != NONE {
                rep[v] = rep[r];
                sum[rep[r] - m].0 += x[v - m];
                sum[rep[r] - m].1 += 1.0;
            } else {
                rep[r] = m + n_var;
                rep[v] = m + n_var;
                sum.push((x[v - m], 1.0));
                n_var += 1;
            }
        }
        for (v, r) in rep.iter_mut().enumerate().take(m) {
            *r = v;
        }
        let mut y: Vec<Point> = sum.iter().map(|(p, c)| *p / *c).collect();
        let edges: Vec<(usize, usize)> = self
            .edges
            .iter()
            .enumerate()
            .filter(|(i, _)| !short.contains(i))
            .map(|(_, &(a, b))| (rep[a], rep[b]))
            .collect();
        let reduced = Network::new(self.fixed.clone(), self.foot, n_var, edges);
        reduced.refine(&mut y, &RefineOpts { gap_tol: 1e-14 * self.magnitude, max_iter: 2000, prune_above: f64::INFINITY, snap: false });
        reduced.smoothed_descent(&mut y);
        reduced.newton_polish(&mut y, 50);
        let out = (m..n_nodes)
            .map(|v| if rep[v] < m { self.pos(x, rep[v]) } else { y[rep[v] - m] })
            .collect();
        Some((out, short))
    }

    /// Newton's method on the smoothed length `sum sqrt(|e|^2 + mu^2)`, with
    /// `mu` shrinking from `1e-2` to `1e-14` times the instance size. The
    /// smoothed length is strictly convex, so points stuck on a terminal or
    /// on each other by the reweighting step can leave.
    /// Returns the final `mu`.
    pub fn smoothed_descent(&self, x: &mut [Point]) -> f64 {
        let mut mu = 0.0;
        if self.n_steiner == 0 {
            return mu;
        }
        for k in 2..=14 {
            mu = self.scale * 10f64.powi(-k);
            for _ in 0..50 {
                if !self.smoothed_newton_step(x, mu) {
                    break;
                }
            }
        }
        mu
    }

    fn smoothed_length(&self, x: &[Point], mu2: f64) -> f64 {
        self.edges
            .iter()
            .map(|&(u, v)| {
                if self.is_foot(u) || self.is_foot(v) {
                    let q = if self.is_foot(u) { v } else { u };
                    let s = signed_distance(self.pos(x, q), self.line().unwrap());
                    (s * s + mu2).sqrt()
                } else {
                    let d = self.pos(x, u) - self.pos(x, v);
                    (d.dot(d) + mu2).sqrt()
                }
            })
            .sum()
    }

    /// Gradient and Hessian of the smoothed length in the variable coordinates.
    fn smoothed_derivatives(&self, x: &[Point], mu: f64) -> (Vec<f64>, Vec<f64>) {
        let m = self.fixed.len();
        let dim = 2 * self.n_steiner;
        let mu2 = mu * mu;
        let mut h = vec![0.0; dim * dim];
        let mut g = vec![0.0; dim];
        for &(u, v) in &self.edges {
            // gradient with respect to `u` (`v` gets the negative) and the 2x2 block
            let (u, v, d, k) = if self.is_foot(u) || self.is_foot(v) {
                let q = if self.is_foot(u) { v } else { u };
                let line = self.line().unwrap();
                let nu = line.normal();
                let sd = signed_distance(self.pos(x, q), line);
                let r = (sd * sd + mu2).sqrt();
                let c = mu2 / (r * r * r);
                (q, NONE, nu * (sd / r), [c * nu.x * nu.x, c * nu.x * nu.y, c * nu.y * nu.y])
            } else {
                let d = self.pos(x, u) - self.pos(x, v);
                let r2 = d.dot(d) + mu2;
                let c = 1.0 / (r2 * r2.sqrt());
                (u, v, d / r2.sqrt(), [c * (r2 - d.x * d.x), -c * d.x * d.y, c * (r2 - d.y * d.y)])
            };
            let mut add = |i: usize, j: usize, sign: f64| {
                h[(2 * i) * dim + 2 * j] += sign * k[0];
                h[(2 * i) * dim + 2 * j + 1] += sign * k[1];
                h[(2 * i + 1) * dim + 2 * j] += sign * k[1];
                h[(2 * i + 1) * dim + 2 * j + 1] += sign * k[2];
            };
            let (vu, vv) = (u != NONE && u >= m, v != NONE && v >= m);
            if vu {
                add(u - m, u - m, 1.0);
                g[2 * (u - m)] += d.x;
                g[2 * (u - m) + 1] += d.y;
            }
            if vv {
                add(v - m, v - m, 1.0);
                g[2 * (v - m)] -= d.x;
                g[2 * (v - m) + 1] -= d.y;
            }
            if vu && vv {
                add(u - m, v - m, -1.0);
                add(v - m, u - m, -1.0);
            }
        }
        (g, h)
    }

    /// One damped Newton step; false once it no longer moves. Near the
    /// minimum the decrease drops below the rounding of the length, and a
    /// full step is taken if it shrinks the gradient instead.
    fn smoothed_newton_step(&self, x: &mut [Point], mu: f64) -> bool {
        let s = self.n_steiner;
        let dim = 2 * s;
        let mu2 = mu * mu;
        let (g, mut h) = self.smoothed_derivatives(x, mu);
        let mut rhs: Vec<Point> = (0..dim).map(|i| Point::new(-g[i], 0.0)).collect();
        if !cholesky_solve(&mut h, &mut rhs, dim) {
            return false;
        }
        let base = x.to_vec();
        let set = |x: &mut [Point], step: f64| {
            for i in 0..s {
                x[i] = base[i] + Point::new(rhs[2 * i].x, rhs[2 * i + 1].x) * step;
            }
        };
        let moved = |x: &[Point]| (0..s).map(|i| x[i].dist(base[i])).fold(0.0, f64::max) > 1e-15 * self.magnitude;
        let decrement: f64 = (0..dim).map(|i| -g[i] * rhs[i].x).sum();
        let current = self.smoothed_length(x, mu2);
        if decrement < 1e-14 * current {
            let norm = |g: &[f64]| g.iter().map(|v| v * v).sum::<f64>();
            set(x, 1.0);
            if norm(&self.smoothed_derivatives(x, mu).0) < norm(&g) {
                return moved(x);
            }
            x.copy_from_slice(&base);
            return false;
        }
        let mut step = 1.0;
        for _ in 0..40 {
            set(x, step);
            if self.smoothed_length(x, mu2) < current {
                return moved(x);
            }
            step *= 0.5;
        }
        x.copy_from_slice(&base);
        false
    }

    /// Newton iterations on the exact length. Only meaningful when no edge
    /// is (nearly) collapsed; returns the number of accepted steps.
    pub fn newton_polish(&self, x: &mut [Point], max_steps: usize) -> usize {
        let s = self.n_steiner;
        if s == 0 {
            return 0;
        }
        let m = self.fixed.len();
        let dim = 2 * s;
        let mut accepted = 0;
        let mut current = self.length(x);
        for _ in 0..max_steps {
            let mut h = vec![0.0; dim * dim];
            let mut g = vec![0.0; dim];
            for &(u, v) in &self.edges {
                if self.is_foot(u) || self.is_foot(v) {
                    let q = if self.is_foot(u) { v } else { u };
                    if q >= m {
                        let line = self.line().unwrap();
                        let nu = line.normal() * signed_distance(x[q - m], line).signum();
                        g[2 * (q - m)] += nu.x;
                        g[2 * (q - m) + 1] += nu.y;
                    }
                    continue;
                }
                let d = self.pos(x, u) - self.pos(x, v);
                let r = d.norm();
                if r < self.collapse_eps() {
                    return accepted;
                }
                let dir = d / r;
                let k = [
                    (1.0 - dir.x * dir.x) / r,
                    (-dir.x * dir.y) / r,
                    (-dir.x * dir.y) / r,
                    (1.0 - dir.y * dir.y) / r,
                ];
                let mut add = |i: usize, j: usize, sign: f64| {
                    for (bi, bj, kv) in [(0, 0, k[0]), (0, 1, k[1]), (1, 0, k[2]), (1, 1, k[3])] {
                        h[(2 * i + bi) * dim + 2 * j + bj] += sign * kv;
                    }
                };
                if u >= m {
                    add(u - m, u - m, 1.0);
                    g[2 * (u - m)] += dir.x;
                    g[2 * (u - m) + 1] += dir.y;
                }
                if v >= m {
                    add(v - m, v - m, 1.0);
                    g[2 * (v - m)] -= dir.x;
                    g[2 * (v - m) + 1] -= dir.y;
                }
                if u >= m && v >= m {
                    add(u - m, v - m, -1.0);
                    add(v - m, u - m, -1.0);
                }
            }
            let trace: f64 = (0..dim).map(|i| h[i * dim + i]).sum();
            for i in 0..dim {
                h[i * dim + i] += 1e-14 * trace;
            }
            let mut rhs: Vec<Point> = (0..dim).map(|i| Point::new(-g[i], 0.0)).collect();
            if !cholesky_solve(&mut h, &mut rhs, dim) {
                return accepted;
            }
            let mut step = 1.0;
            let mut improved = false;
            let base: Vec<Point> = x.to_vec();
            for _ in 0..30 {
                for i in 0..s {
                    x[i] = base[i] + Point::new(rhs[2 * i].x, rhs[2 * i + 1].x) * step;
                }
                let l = self.length(x);
                if l < current {
                    current = l;
                    improved = true;
                    break;
                }
                step *= 0.5;
            }
            if !improved {
                x.copy_from_slice(&base);
                return accepted;
            }
            accepted += 1;
            let moved = (0..s).map(|i| x[i].dist(base[i])).fold(0.0, f64::max);
            if moved <= 1e-15 * self.magnitude {
                return accepted;
            }
        }
        accepted
    }
}

/// Solves `A X = B` in place for symmetric positive definite `A` (row-major,
/// `n x n`); each right-hand side entry is a point, i.e. two columns.
/// Returns false if `A` is not numerically positive definite.
pub(crate) fn cholesky_solve(a: &mut [f64], b: &mut [Point], n: usize) -> bool {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            d -= a[j * n + k] * a[j * n + k];
        }
        if d <= 0.0 || !d.is_finite() {
            return false;
        }
        let d = d.sqrt();
        a[j * n + j] = d;
        for i in j + 1..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v -= a[i * n + k] * a[j * n + k];
            }
            a[i * n + j] = v / d;
        }
    }
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= b[k] * a[i * n + k];
        }
        b[i] = v / a[i * n + i];
    }
    for i in (0..n).rev() {
        let mut v = b[i];
        for k in i + 1..n {
            v -= b[k] * a[k * n + i];
        }
        b[i] = v / a[i * n + i];
    }
    true
}
