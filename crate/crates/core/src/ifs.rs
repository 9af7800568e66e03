//! The two-map similarity system `f_j(z) = 1 + theta_j z` and its leaf sets.
//!
//! `theta_1 = lambda e^{-i pi/3}` and `theta_2 = lambda e^{+i pi/3}`: map 1
//! turns clockwise, map 2 counterclockwise. The attractor `A` is the limit
//! of the finite sets `A_N = { f_{j_1} o ... o f_{j_N}(0) }`. Since
//! `f_j(0) = 1` for both maps the innermost letter never matters, so `A_N`
//! is indexed by words of length `N - 1` and has `2^(N-1)` points.

use std::f64::consts::PI;
use std::fmt;
use std::io::Write;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::geom::Point;

/// Default maximum word length (about 8M leaves at the cap).
pub const MAX_DEPTH: usize = 24;

pub(crate) fn to_c(p: Point) -> Complex64 {
    Complex64::new(p.x, p.y)
}

pub(crate) fn from_c(z: Complex64) -> Point {
    Point::new(z.re, z.im)
}

/// The contraction ratio and the constants derived from it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct IfsParams {
    lambda: f64,
}

impl TryFrom<f64> for IfsParams {
    type Error = Error;
    fn try_from(lambda: f64) -> Result<Self> {
        IfsParams::new(lambda)
    }
}

impl From<IfsParams> for f64 {
    fn from(p: IfsParams) -> f64 {
        p.lambda
    }
}

impl IfsParams {
    /// Accepts `0 < lambda < 1/2`.
    pub fn new(lambda: f64) -> Result<Self> {
        if lambda.is_finite() && lambda > 0.0 && lambda < 0.5 {
            Ok(IfsParams { lambda })
        } else {
            Err(Error::LambdaOutOfRange(lambda))
        }
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `theta_j = lambda e^{(-1)^j i pi/3}`.
    pub fn theta(&self, j: Letter) -> Complex64 {
        let arg = match j {
            Letter::One => -PI / 3.0,
            Letter::Two => PI / 3.0,
        };
        Complex64::from_polar(self.lambda, arg)
    }

    /// Trunk end and first branch point, `(1, 0)`.
    pub fn t0(&self) -> Point {
        Point::new(1.0, 0.0)
    }

    /// Center of the disk certified to contain `A`, `(1 + lambda/2, 0)`.
    pub fn p(&self) -> Point {
        Point::new(1.0 + self.lambda / 2.0, 0.0)
    }

    /// Radius of the open-set-condition ball around `T0`.
    pub fn r_osc(&self) -> f64 {
        self.lambda / (1.0 - self.lambda)
    }

    /// Branch-point confinement radius `2 lambda / sqrt 3`.
    pub fn r_branch(&self) -> f64 {
        2.0 * self.lambda / 3f64.sqrt()
    }
}

/// Index of one of the two maps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Letter {
    One,
    Two,
}

impl Letter {
    pub const BOTH: [Letter; 2] = [Letter::One, Letter::Two];

    pub fn from_index(j: u8) -> Option<Letter> {
        match j {
            1 => Some(Letter::One),
            2 => Some(Letter::Two),
            _ => None,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Letter::One => 1,
            Letter::Two => 2,
        }
    }

    /// The other map.
    pub fn flip(self) -> Letter {
        match self {
            Letter::One => Letter::Two,
            Letter::Two => Letter::One,
        }
    }
}

/// A composition `f_{j_1} o ... o f_{j_k}`; letters are stored outermost
/// first, so lexicographic order on words is the canonical leaf order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word(Vec<Letter>);

impl Word {
    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn new(letters: Vec<Letter>) -> Self {
        Word(letters)
    }

    /// Parses `"1212"`; the empty string is the empty word.
    pub fn parse(s: &str) -> Option<Word> {
        s.bytes()
            .map(|b| b.checked_sub(b'0').and_then(Letter::from_index))
            .collect::<Option<Vec<_>>>()
            .map(Word)
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `w j`, i.e. `f_w o f_j`.
    pub fn child(&self, j: Letter) -> Word {
        let mut v = self.0.clone();
        v.push(j);
        Word(v)
    }

    /// `j w`, i.e. `f_j o f_w`.
    pub fn prepend(&self, j: Letter) -> Word {
        let mut v = Vec::with_capacity(self.0.len() + 1);
        v.push(j);
        v.extend_from_slice(&self.0);
        Word(v)
    }

    pub fn parent(&self) -> Option<Word> {
        (!self.0.is_empty()).then(|| Word(self.0[..self.0.len() - 1].to_vec()))
    }

    /// All words of length `k` in lexicographic order.
    pub fn all(k: usize) -> Vec<Word> {
        let mut words = vec![Word::empty()];
        for _ in 0..k {
            words = words
                .iter()
                .flat_map(|w| Letter::BOTH.map(|j| w.child(j)))
                .collect();
        }
        words
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for j in &self.0 {
            write!(f, "{}", j.index())?;
        }
        Ok(())
    }
}

impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The affine map `z -> offset + scale z` in complex form; compositions of
/// the system's maps stay in this family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Similarity {
    pub offset: Complex64,
    pub scale: Complex64,
}

impl Similarity {
    pub const IDENTITY: Similarity = Similarity {
        offset: Complex64::new(0.0, 0.0),
        scale: Complex64::new(1.0, 0.0),
    };

    /// `self o inner`.
    pub fn compose_inner(&self, inner: &Similarity) -> Similarity {
        Similarity {
            offset: self.offset + self.scale * inner.offset,
            scale: self.scale * inner.scale,
        }
    }

    pub fn apply(&self, p: Point) -> Point {
        from_c(self.offset + self.scale * to_c(p))
    }

    /// The composite map `f_w`.
    pub fn of_word(params: &IfsParams, w: &Word) -> Similarity {
        w.letters()
            .iter()
            .fold(Similarity::IDENTITY, |acc, &j| acc.then(j, params))
    }

    /// `self o f_j`.
    pub fn then(&self, j: Letter, params: &IfsParams) -> Similarity {
        self.compose_inner(&Similarity { offset: Complex64::new(1.0, 0.0), scale: params.theta(j) })
    }
}

/// `f_j(z) = 1 + theta_j z`.
pub fn apply_map(params: &IfsParams, j: Letter, z: Point) -> Point {
    from_c(Complex64::new(1.0, 0.0) + params.theta(j) * to_c(z))
}

/// `f_w(z)`, innermost letter applied first.
pub fn apply_word(params: &IfsParams, w: &Word, z: Point) -> Point {
    w.letters()
        .iter()
        .rev()
        .fold(z, |acc, &j| apply_map(params, j, acc))
}

/// The finite approximation `A_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LeafSet {
    pub level: usize,
    pub points: Vec<Point>,
}

impl LeafSet {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// One `x,y` row per point, shortest round-trip formatting (at most 17
    /// significant digits).
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        for p in &self.points {
            writeln!(out, "{},{}", p.x, p.y)?;
        }
        Ok(())
    }

    /// JSON array of `[x, y]` pairs.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.points).expect("points serialize")
    }
}

/// Generates `A_N` in lexicographic word order. The level-`k` set is mapped
/// through both maps to obtain level `k + 1`; `exec` controls whether each
/// level is computed in parallel (the order is identical either way).
pub fn generate_leaves_with(params: &IfsParams, n: usize, max_depth: usize, exec: Exec) -> Result<LeafSet> {
    if n == 0 || n > max_depth {
        return Err(Error::DepthOutOfRange { depth: n, max: max_depth });
    }
    let mut points = vec![params.t0()];
    for _ in 1..n {
        let len = points.len();
        let prev = &points;
        // index i < len: f_1(prev[i]); i >= len: f_2(prev[i - len])
        points = exec.map_range(2 * len, |i| {
            let (j, src) = if i < len { (Letter::One, i) } else { (Letter::Two, i - len) };
            apply_map(params, j, prev[src])
        });
    }
    Ok(LeafSet { level: n, points })
}

pub fn generate_leaves(params: &IfsParams, n: usize) -> Result<LeafSet> {
    generate_leaves_with(params, n, MAX_DEPTH, Exec::default())
}

/// Directed Hausdorff distance `sup_{a in from} dist(a, to)`.
pub fn directed_hausdorff(from: &[Point], to: &[Point], exec: Exec) -> f64 {
    exec.max_by(from, |&a| to.iter().map(|&b| a.dist(b)).fold(f64::INFINITY, f64::min))
}

/// Symmetric Hausdorff distance between two finite sets.
pub fn hausdorff_distance_with(s1: &[Point], s2: &[Point], exec: Exec) -> Result<f64> {
    if s1.is_empty() || s2.is_empty() {
        return Err(Error::Empty);
    }
    Ok(directed_hausdorff(s1, s2, exec).max(directed_hausdorff(s2, s1, exec)))
}

pub fn hausdorff_distance(s1: &[Point], s2: &[Point]) -> Result<f64> {
    hausdorff_distance_with(s1, s2, Exec::default())
}

/// Similarity dimension `-1 / log2 lambda`, the solution of `2 lambda^D = 1`.
pub fn hausdorff_dimension(params: &IfsParams) -> f64 {
    -1.0 / params.lambda.log2()
}

/// Outcome of the open-set-condition check with `U = B_R(T0)`,
/// `R = lambda / (1 - lambda)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscReport {
    /// `R - (lambda + lambda R)`: nonnegative iff `f_j(U)` lies in `U`.
    pub nesting_margin: f64,
    /// `|f_1(T0) - f_2(T0)| - 2 lambda R`: positive iff the images are disjoint.
    pub disjoint_margin: f64,
    pub holds: bool,
}

/// Checks both parts of the open set condition.
///
/// The nesting part holds with equality for every `lambda` (`R` is the
/// geometric series of the arm lengths), so it is accepted up to rounding.
/// Disjointness requires `lambda sqrt 3 > 2 lambda R`, i.e.
/// `lambda < 2 sqrt 3 - 3`.
pub fn osc_holds(params: &IfsParams) -> OscReport {
    let l = params.lambda;
    let r = params.r_osc();
    let t0 = params.t0();
    let nesting_margin = r - (l + l * r);
    let images = apply_map(params, Letter::One, t0).dist(apply_map(params, Letter::Two, t0));
    let disjoint_margin = images - 2.0 * l * r;
    OscReport {
        nesting_margin,
        disjoint_margin,
        holds: nesting_margin >= -crate::tol::ALGEBRAIC && disjoint_margin > 0.0,
    }
}

/// Largest `lambda` for which the open-set certificate applies.
pub fn osc_threshold() -> f64 {
    2.0 * 3f64.sqrt() - 3.0
}

/// Upper bound on `|a - P|` over the attractor: `sqrt3 lambda / 2 + lambda^2 / (1 - lambda)`.
pub fn containment_radius_bound(params: &IfsParams) -> f64 {
    let l = params.lambda;
    3f64.sqrt() * l / 2.0 + l * l / (1.0 - l)
}

/// `lambda - containment_radius_bound`; positive certifies `A` in `B_lambda(P)`.
pub fn containment_margin(params: &IfsParams) -> f64 {
    params.lambda - containment_radius_bound(params)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p04() -> IfsParams {
        IfsParams::new(0.04).unwrap()
    }

    #[test]
    fn params_range() {
        for bad in [0.0, -0.1, 0.5, 0.7, f64::NAN] {
            assert!(IfsParams::new(bad).is_err(), "{bad}");
        }
        let p = IfsParams::new(0.3).unwrap();
        for j in Letter::BOTH {
            assert!((p.theta(j).norm() - 0.3).abs() < 1e-15);
        }
        assert!((p.theta(Letter::One).arg() + PI / 3.0).abs() < 1e-15);
        assert!((p.theta(Letter::Two).arg() - PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn maps_send_origin_to_one() {
        for j in Letter::BOTH {
            assert_eq!(apply_map(&p04(), j, Point::ORIGIN), Point::new(1.0, 0.0));
        }
    }

    #[test]
    fn map_two_of_one() {
        let q = apply_map(&p04(), Letter::Two, Point::new(1.0, 0.0));
        assert!((q.x - 1.02).abs() < 1e-15);
        assert!((q.y - 0.034_641_016_151_377_54).abs() < 1e-15);
    }

    #[test]
    fn maps_are_mirror_images() {
        let z = Point::new(0.3, 0.7);
        let a = apply_map(&p04(), Letter::One, z);
        let b = apply_map(&p04(), Letter::Two, z.mirror()).mirror();
        assert!(a.dist(b) < 1e-15);
    }

    #[test]
    fn word_helpers() {
        let w = Word::parse("121").unwrap();
        assert_eq!(w.to_string(), "121");
        assert_eq!(w.parent().unwrap().to_string(), "12");
        assert_eq!(w.prepend(Letter::Two).to_string(), "2121");
        assert!(Word::parse("13").is_none());
        let all = Word::all(2);
        let names: Vec<_> = all.iter().map(|w| w.to_string()).collect();
        assert_eq!(names, ["11", "12", "21", "22"]);
    }

    #[test]
    fn similarity_matches_pointwise_composition() {
        let p = IfsParams::new(0.3).unwrap();
        let z = Point::new(-0.4, 0.25);
        for w in Word::all(4) {
            let sim = Similarity::of_word(&p, &w);
            assert!(sim.apply(z).dist(apply_word(&p, &w, z)) < 1e-14, "{w}");
        }
    }

    #[test]
    fn small_leaf_sets() {
        let a1 = generate_leaves(&p04(), 1).unwrap();
        assert_eq!(a1.points, vec![Point::new(1.0, 0.0)]);
        let a2 = generate_leaves(&p04(), 2).unwrap();
        assert_eq!(a2.len(), 2);
        assert!((a2.points[0].x - 1.02).abs() < 1e-15);
        assert!((a2.points[0].y + 0.034_641_016_151_377_54).abs() < 1e-15);
        assert!(a2.points[0].dist(a2.points[1].mirror()) < 1e-15);
        let a3 = generate_leaves(&p04(), 3).unwrap();
        assert_eq!(a3.len(), 4);
        for q in &a3.points {
            assert!(a3.points.iter().any(|r| r.dist(q.mirror()) < 1e-15));
        }
    }

    #[test]
    fn leaf_depth_limits() {
        assert!(generate_leaves(&p04(), 0).is_err());
        assert!(generate_leaves(&p04(), MAX_DEPTH + 1).is_err());
        assert!(generate_leaves_with(&p04(), 5, 4, Exec::Sequential).is_err());
    }

    #[test]
    fn leaf_order_is_lexicographic() {
        let p = p04();
        let leaves = generate_leaves(&p, 5).unwrap();
        for (w, q) in Word::all(4).iter().zip(&leaves.points) {
            assert!(apply_word(&p, w, Point::new(1.0, 0.0)).dist(*q) < 1e-15);
        }
    }

    #[test]
    fn sequential_and_parallel_agree_bitwise() {
        let p = IfsParams::new(0.13).unwrap();
        let a = generate_leaves_with(&p, 12, MAX_DEPTH, Exec::Sequential).unwrap();
        let b = generate_leaves_with(&p, 12, MAX_DEPTH, Exec::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn hausdorff_examples() {
        let s = [Point::new(0.0, 0.0), Point::new(1.0, 2.0)];
        assert_eq!(hausdorff_distance(&s, &s).unwrap(), 0.0);
        assert_eq!(hausdorff_distance(&[Point::ORIGIN], &[Point::new(3.0, 4.0)]).unwrap(), 5.0);
        assert_eq!(hausdorff_distance(&[], &s), Err(Error::Empty));
        let t = [Point::ORIGIN];
        assert_eq!(
            hausdorff_distance(&s, &t).unwrap(),
            hausdorff_distance(&t, &s).unwrap()
        );
    }

    #[test]
    fn dimension_values() {
        assert!((hausdorff_dimension(&IfsParams::new(0.25).unwrap()) - 0.5).abs() < 1e-15);
        let d = hausdorff_dimension(&p04());
        assert!((d - 2f64.ln() / 25f64.ln()).abs() < 1e-15);
        assert!((d - 0.215_338).abs() < 1e-6);
        let mut prev = 0.0;
        for l in [0.4, 0.45, 0.49, 0.499, 0.4999] {
            let d = hausdorff_dimension(&IfsParams::new(l).unwrap());
            assert!(d > prev && d < 1.0);
            prev = d;
        }
        assert!(prev > 0.999);
    }

    #[test]
    fn osc_examples() {
        assert!(osc_holds(&p04()).holds);
        assert!(osc_holds(&IfsParams::new(0.46).unwrap()).holds);
        let r = osc_holds(&IfsParams::new(0.47).unwrap());
        assert!(!r.holds);
        assert!(r.disjoint_margin < 0.0);
        assert!(r.nesting_margin.abs() < 1e-15);
    }

    #[test]
    fn containment_margin_values() {
        assert!((containment_margin(&p04()) - 0.003_692_3).abs() < 1e-7);
        let m = containment_margin(&IfsParams::new(0.12).unwrap());
        assert!(m < 0.0);
        assert!((m + 0.000_287).abs() < 1e-6);
    }
}
