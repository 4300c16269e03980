//! Simple curves in ℤ² and their Jordan decomposition.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type GridPoint = [i64; 2];

const AXIS: [[i64; 2]; 4] = [[0, 1], [0, -1], [-1, 0], [1, 0]];
const DIAG: [[i64; 2]; 4] = [[1, 1], [-1, 1], [-1, -1], [1, -1]];

fn add(p: GridPoint, v: [i64; 2]) -> GridPoint {
    [p[0] + v[0], p[1] + v[1]]
}

fn is_axis_step(a: GridPoint, b: GridPoint) -> bool {
    (a[0] - b[0]).abs() + (a[1] - b[1]).abs() == 1
}

fn is_diagonal(a: GridPoint, b: GridPoint) -> bool {
    (a[0] - b[0]).abs() == 1 && (a[1] - b[1]).abs() == 1
}

/// The axis and diagonal neighbours of a grid point.
pub fn grid_boundaries(p: GridPoint) -> ([GridPoint; 4], [GridPoint; 4]) {
    (AXIS.map(|v| add(p, v)), DIAG.map(|v| add(p, v)))
}

/// A continuous circuit in ℤ², stored without stays and without the
/// repeated closing point.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "CurveDoc", into = "CurveDoc")]
pub struct DigitalCurve {
    cycle: Vec<GridPoint>,
}

#[derive(Serialize, Deserialize)]
struct CurveDoc {
    kind: String,
    points: Vec<GridPoint>,
}

impl TryFrom<CurveDoc> for DigitalCurve {
    type Error = Error;
    fn try_from(doc: CurveDoc) -> Result<Self> {
        if doc.kind != "digital_curve" {
            return Err(Error::Malformed(format!("expected kind digital_curve, found {:?}", doc.kind)));
        }
        DigitalCurve::new(doc.points)
    }
}

impl From<DigitalCurve> for CurveDoc {
    fn from(c: DigitalCurve) -> Self {
        CurveDoc { kind: "digital_curve".into(), points: c.points() }
    }
}

impl DigitalCurve {
    /// `points` must start and end at the same point; consecutive points are
    /// equal or one axis step apart.
    pub fn new(points: Vec<GridPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptySet);
        }
        if points.first() != points.last() {
            return Err(Error::NotACircuit);
        }
        for i in 1..points.len() {
            if points[i] != points[i - 1] && !is_axis_step(points[i], points[i - 1]) {
                return Err(Error::NotContinuous(i));
            }
        }
        let mut cycle: Vec<GridPoint> = Vec::with_capacity(points.len());
        for &p in &points[..points.len() - 1] {
            if cycle.last() != Some(&p) {
                cycle.push(p);
            }
        }
        while cycle.len() > 1 && cycle.first() == cycle.last() {
            cycle.pop();
        }
        Ok(DigitalCurve { cycle })
    }

    /// Closed sequence, first = last.
    pub fn points(&self) -> Vec<GridPoint> {
        let mut v = self.cycle.clone();
        v.push(self.cycle[0]);
        v
    }

    pub fn cycle(&self) -> &[GridPoint] {
        &self.cycle
    }

    pub fn len(&self) -> usize {
        self.cycle.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycle.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.cycle.len() == 1
    }

    pub fn point_set(&self) -> BTreeSet<GridPoint> {
        self.cycle.iter().copied().collect()
    }

    pub fn bounds(&self) -> Rect {
        let xs = self.cycle.iter().map(|p| p[0]);
        let ys = self.cycle.iter().map(|p| p[1]);
        Rect {
            x0: xs.clone().min().unwrap(),
            x1: xs.max().unwrap(),
            y0: ys.clone().min().unwrap(),
            y1: ys.max().unwrap(),
        }
    }

    /// Image under one of the 8 grid symmetries followed by a translation.
    pub fn transformed(&self, symmetry: u8, shift: [i64; 2]) -> DigitalCurve {
        let f = |[x, y]: GridPoint| {
            let [a, b] = match symmetry % 4 {
                0 => [x, y],
                1 => [-y, x],
                2 => [-x, -y],
                _ => [y, -x],
            };
            let [a, b] = if symmetry >= 4 { [a, -b] } else { [a, b] };
            [a + shift[0], b + shift[1]]
        };
        DigitalCurve { cycle: self.cycle.iter().map(|&p| f(p)).collect() }
    }

    /// Same curve with the starting point moved to index `k`.
    pub fn rotated(&self, k: usize) -> DigitalCurve {
        let mut cycle = self.cycle.clone();
        cycle.rotate_left(k % self.cycle.len());
        DigitalCurve { cycle }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rect {
    pub x0: i64,
    pub x1: i64,
    pub y0: i64,
    pub y1: i64,
}

impl Rect {
    pub fn contains(&self, p: GridPoint) -> bool {
        (self.x0..=self.x1).contains(&p[0]) && (self.y0..=self.y1).contains(&p[1])
    }

    pub fn grown(&self, m: i64) -> Rect {
        Rect { x0: self.x0 - m, x1: self.x1 + m, y0: self.y0 - m, y1: self.y1 + m }
    }

    pub fn width(&self) -> i64 {
        self.x1 - self.x0 + 1
    }

    pub fn height(&self) -> i64 {
        self.y1 - self.y0 + 1
    }

    fn on_border(&self, p: GridPoint) -> bool {
        p[0] == self.x0 || p[0] == self.x1 || p[1] == self.y0 || p[1] == self.y1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SimplicityWitness {
    /// x_i = x_j with i < j.
    Repeat { i: usize, j: usize },
    /// x_i and x_j are diagonal neighbours without being joined by a corner.
    Diagonal { i: usize, j: usize },
}

impl std::fmt::Display for SimplicityWitness {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SimplicityWitness::Repeat { i, j } => write!(f, "x_{i} = x_{j}"),
            SimplicityWitness::Diagonal { i, j } => write!(f, "x_{i} and x_{j} are diagonal neighbours"),
        }
    }
}

/// First violation of simplicity, indices read cyclically.
pub fn simplicity_witness(c: &DigitalCurve) -> Option<SimplicityWitness> {
    let p = &c.cycle;
    let n = p.len();
    for i in 0..n {
        for j in i + 1..n {
            if p[i] == p[j] {
                return Some(SimplicityWitness::Repeat { i, j });
            }
            if is_diagonal(p[i], p[j]) {
                let forward = j - i == 2 && is_axis_step(p[i + 1], p[i]) && is_axis_step(p[i + 1], p[j]);
                let around = n - (j - i) == 2 && {
                    let m = p[(j + 1) % n];
                    is_axis_step(m, p[i]) && is_axis_step(m, p[j])
                };
                if !forward && !around {
                    return Some(SimplicityWitness::Diagonal { i, j });
                }
            }
        }
    }
    None
}

pub fn is_simple_curve(c: &DigitalCurve) -> bool {
    simplicity_witness(c).is_none()
}

/// Lower-left corner of a unit square whose four corners lie on the curve.
pub fn contains_unit_square(c: &DigitalCurve) -> Option<GridPoint> {
    let set = c.point_set();
    set.iter()
        .copied()
        .find(|&p| [[1, 0], [1, 1], [0, 1]].iter().all(|&v| set.contains(&add(p, v))))
}

/// Removes a unit square traversed along three consecutive sides by one
/// elementary homotopy row: x_{i+1} and x_{i+2} slide onto their outer
/// neighbours and the stays are dropped.
pub fn contract_unit_square(c: &DigitalCurve) -> Option<DigitalCurve> {
    let p = &c.cycle;
    let n = p.len();
    if n < 4 {
        return None;
    }
    for i in 0..n {
        let [a, b, cc, d] = [p[i], p[(i + 1) % n], p[(i + 2) % n], p[(i + 3) % n]];
        if is_axis_step(a, d) && is_diagonal(a, cc) && is_diagonal(b, d) {
            let mut row: Vec<GridPoint> = Vec::with_capacity(n + 1);
            for k in 0..n {
                let q = if k == (i + 1) % n {
                    a
                } else if k == (i + 2) % n {
                    d
                } else {
                    p[k]
                };
                row.push(q);
            }
            let start = row[0];
            row.push(start);
            return DigitalCurve::new(row).ok();
        }
    }
    None
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ExtremalRays {
    pub x_plus: Option<GridPoint>,
    pub x_minus: Option<GridPoint>,
    pub y_plus: Option<GridPoint>,
    pub y_minus: Option<GridPoint>,
}

impl ExtremalRays {
    pub fn quasi_internal(&self) -> bool {
        self.x_plus.is_some() && self.x_minus.is_some() && self.y_plus.is_some() && self.y_minus.is_some()
    }

    pub fn hits(&self) -> impl Iterator<Item = GridPoint> + '_ {
        [self.x_plus, self.x_minus, self.y_plus, self.y_minus].into_iter().flatten()
    }

    pub fn count(&self) -> usize {
        self.hits().count()
    }
}

/// Point-set view of a curve with row and column indexes for ray casting.
#[derive(Clone, Debug)]
pub struct CurveIndex {
    set: BTreeSet<GridPoint>,
    rows: BTreeMap<i64, BTreeSet<i64>>,
    cols: BTreeMap<i64, BTreeSet<i64>>,
}

impl CurveIndex {
    pub fn new(c: &DigitalCurve) -> Self {
        let mut rows: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
        let mut cols: BTreeMap<i64, BTreeSet<i64>> = BTreeMap::new();
        for &[x, y] in &c.cycle {
            rows.entry(y).or_default().insert(x);
            cols.entry(x).or_default().insert(y);
        }
        CurveIndex { set: c.point_set(), rows, cols }
    }

    pub fn contains(&self, p: GridPoint) -> bool {
        self.set.contains(&p)
    }

    pub fn rays(&self, [x, y]: GridPoint) -> Result<ExtremalRays> {
        if self.contains([x, y]) {
            return Err(Error::OnCurve(x, y));
        }
        let row = self.rows.get(&y);
        let col = self.cols.get(&x);
        Ok(ExtremalRays {
            x_plus: row.and_then(|r| r.range(x + 1..).next()).map(|&a| [a, y]),
            x_minus: row.and_then(|r| r.range(..x).next_back()).map(|&a| [a, y]),
            y_plus: col.and_then(|c| c.range(y + 1..).next()).map(|&b| [x, b]),
            y_minus: col.and_then(|c| c.range(..y).next_back()).map(|&b| [x, b]),
        })
    }
}

pub fn extremal_rays(c: &DigitalCurve, p: GridPoint) -> Result<ExtremalRays> {
    CurveIndex::new(c).rays(p)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Closure {
    Internal { points: BTreeSet<GridPoint> },
    /// `at` has no curve point along one of its four rays.
    Escaped { at: GridPoint },
}

/// Least set containing `seed` that is closed under filling the open
/// segments between each member's extremal points.
pub fn reconstruction_closure(c: &DigitalCurve, seed: GridPoint) -> Result<Closure> {
    let index = CurveIndex::new(c);
    index.rays(seed)?;
    let mut members = BTreeSet::from([seed]);
    let mut queue = VecDeque::from([seed]);
    while let Some(p) = queue.pop_front() {
        let r = index.rays(p)?;
        let (Some(xp), Some(xm), Some(yp), Some(ym)) = (r.x_plus, r.x_minus, r.y_plus, r.y_minus) else {
            return Ok(Closure::Escaped { at: p });
        };
        let row = (xm[0] + 1..xp[0]).map(|x| [x, p[1]]);
        let col = (ym[1] + 1..yp[1]).map(|y| [p[0], y]);
        for q in row.chain(col) {
            if members.insert(q) {
                queue.push_back(q);
            }
        }
    }
    Ok(Closure::Internal { points: members })
}

/// Extr_γ(C).
pub fn extremal_points(c: &DigitalCurve, inside: &BTreeSet<GridPoint>) -> Result<BTreeSet<GridPoint>> {
    let index = CurveIndex::new(c);
    let mut out = BTreeSet::new();
    for &p in inside {
        let r = index.rays(p)?;
        if !r.quasi_internal() {
            return Err(Error::CheckFailed(format!("({},{}) is not quasi-internal", p[0], p[1])));
        }
        out.extend(r.hits());
    }
    Ok(out)
}

/// Which of the listed neighbourhood shapes an extremal point has: two axis
/// neighbours in Extr; one axis and one diagonal; no axis and two diagonal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompletionPattern {
    TwoAxis,
    AxisAndDiagonal,
    TwoDiagonal,
    Unlisted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Completion {
    pub points: BTreeSet<GridPoint>,
    pub extremal: usize,
    /// Extremal points per shape, in `CompletionPattern` order.
    pub patterns: [usize; 4],
    /// Extremal points of the unlisted shape.
    pub unlisted: Vec<GridPoint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CompletionFailure {
    pub at: GridPoint,
    pub partner: GridPoint,
    pub pattern: CompletionPattern,
    pub reason: &'static str,
}

pub fn completion_pattern(e: GridPoint, extr: &BTreeSet<GridPoint>) -> CompletionPattern {
    let (axis, diag) = grid_boundaries(e);
    let a = axis.iter().filter(|q| extr.contains(*q)).count();
    let d = diag.iter().filter(|q| extr.contains(*q)).count();
    match (a, d) {
        (2, _) => CompletionPattern::TwoAxis,
        (1, 1) => CompletionPattern::AxisAndDiagonal,
        (0, 2) => CompletionPattern::TwoDiagonal,
        _ => CompletionPattern::Unlisted,
    }
}

/// The γ-completion of an internal set: its extremal points together with,
/// for every pair of diagonal extremal neighbours not yet joined through an
/// extremal corner, the corner between them lying off the internal set.
/// On the listed shapes this adds exactly the points e′, e″.
pub fn gamma_completion(
    c: &DigitalCurve,
    inside: &BTreeSet<GridPoint>,
) -> Result<std::result::Result<Completion, CompletionFailure>> {
    let extr = extremal_points(c, inside)?;
    let mut out = Completion { points: extr.clone(), extremal: extr.len(), patterns: [0; 4], unlisted: Vec::new() };
    for &e in &extr {
        let pattern = completion_pattern(e, &extr);
        out.patterns[pattern as usize] += 1;
        if pattern == CompletionPattern::Unlisted {
            out.unlisted.push(e);
        }
        for d in grid_boundaries(e).1.into_iter().filter(|q| extr.contains(q)) {
            let corners = [[e[0], d[1]], [d[0], e[1]]];
            if corners.iter().any(|q| extr.contains(q)) {
                continue;
            }
            let fail = |reason| CompletionFailure { at: e, partner: d, pattern, reason };
            match corners.iter().filter(|q| !inside.contains(*q)).collect::<Vec<_>>().as_slice() {
                [one] => {
                    out.points.insert(**one);
                }
                [] => return Ok(Err(fail("both corners lie in the internal set"))),
                _ => return Ok(Err(fail("both corners lie off the internal set"))),
            }
        }
    }
    Ok(Ok(out))
}

/// 4-connected components of `rect` minus the curve, each sorted, in order
/// of their least point.
pub fn box_components(c: &DigitalCurve, rect: Rect) -> Vec<Vec<GridPoint>> {
    let set = c.point_set();
    let w = rect.width() as usize;
    let h = rect.height() as usize;
    let at = |p: GridPoint| (p[0] - rect.x0) as usize + w * (p[1] - rect.y0) as usize;
    let mut seen = vec![false; w * h];
    let mut comps = Vec::new();
    for x in rect.x0..=rect.x1 {
        for y in rect.y0..=rect.y1 {
            let s = [x, y];
            if seen[at(s)] || set.contains(&s) {
                continue;
            }
            seen[at(s)] = true;
            let mut comp = vec![s];
            let mut k = 0;
            while k < comp.len() {
                let p = comp[k];
                k += 1;
                for v in AXIS {
                    let q = add(p, v);
                    if rect.contains(q) && !seen[at(q)] && !set.contains(&q) {
                        seen[at(q)] = true;
                        comp.push(q);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
    }
    comps.sort();
    comps
}

/// (x₁+1, y⁻+1) where x₁ is the least x on the bottom row of the curve.
pub fn canonical_seed(c: &DigitalCurve) -> GridPoint {
    let b = c.bounds();
    let x1 = c.cycle.iter().filter(|p| p[1] == b.y0).map(|p| p[0]).min().unwrap();
    [x1 + 1, b.y0 + 1]
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct JordanDecomposition {
    pub interior: BTreeSet<GridPoint>,
    /// Exterior restricted to `box_`.
    pub exterior: BTreeSet<GridPoint>,
    #[serde(rename = "box")]
    pub box_: Rect,
    pub bounding: Rect,
    pub margin: i64,
    pub components: usize,
    pub two_components: bool,
    pub interior_in_bounding: bool,
    pub exterior_reaches_border: bool,
    pub reconstruction: bool,
    pub closure_matches: bool,
}

impl JordanDecomposition {
    pub fn verified(&self) -> bool {
        self.two_components
            && self.interior_in_bounding
            && self.exterior_reaches_border
            && self.reconstruction
            && self.closure_matches
    }
}

/// Rejects non-simple, constant and unit-square curves with their witness.
pub fn check_jordan_preconditions(c: &DigitalCurve) -> Result<()> {
    if c.is_constant() {
        return Err(Error::ConstantCurve);
    }
    if let Some(w) = simplicity_witness(c) {
        return Err(Error::NotSimple(w.to_string()));
    }
    if let Some([x, y]) = contains_unit_square(c) {
        return Err(Error::UnitSquare(x, y));
    }
    Ok(())
}

pub fn jordan_decomposition(c: &DigitalCurve, margin: i64) -> Result<JordanDecomposition> {
    check_jordan_preconditions(c)?;
    if margin < 1 {
        return Err(Error::Param("margin must be at least 1".into()));
    }
    let bounding = c.bounds();
    let box_ = bounding.grown(margin);
    let comps = box_components(c, box_);
    let seed = canonical_seed(c);
    let interior: BTreeSet<GridPoint> = comps
        .iter()
        .find(|comp| comp.binary_search(&seed).is_ok())
        .map(|comp| comp.iter().copied().collect())
        .unwrap_or_default();
    let exterior: BTreeSet<GridPoint> = comps
        .iter()
        .filter(|comp| comp.binary_search(&seed).is_err())
        .flatten()
        .copied()
        .collect();
    let interior_in_bounding = !interior.is_empty() && interior.iter().all(|&p| bounding.contains(p));
    let exterior_reaches_border = comps
        .iter()
        .filter(|comp| comp.binary_search(&seed).is_err())
        .all(|comp| comp.iter().any(|&p| box_.on_border(p)));
    let closure_matches = matches!(reconstruction_closure(c, seed)?, Closure::Internal { ref points } if *points == interior);
    let reconstruction = closure_matches
        && matches!(gamma_completion(c, &interior)?, Ok(ref comp) if comp.points == c.point_set());
    Ok(JordanDecomposition {
        components: comps.len(),
        two_components: comps.len() == 2,
        interior,
        exterior,
        box_,
        bounding,
        margin,
        interior_in_bounding,
        exterior_reaches_border,
        reconstruction,
        closure_matches,
    })
}

/// Number of 4-components of the margined box minus the curve, without
/// any precondition. Used to report on rejected curves.
pub fn component_count(c: &DigitalCurve, margin: i64) -> usize {
    box_components(c, c.bounds().grown(margin.max(1))).len()
}

/// Plain PGM: curve black, interior grey, exterior white. Row 0 is the top.
pub fn render_pgm(c: &DigitalCurve, d: &JordanDecomposition) -> String {
    let r = d.box_;
    let set = c.point_set();
    let mut s = format!("P2\n{} {}\n2\n", r.width(), r.height());
    for y in (r.y0..=r.y1).rev() {
        let row: Vec<&str> = (r.x0..=r.x1)
            .map(|x| {
                if set.contains(&[x, y]) {
                    "0"
                } else if d.interior.contains(&[x, y]) {
                    "1"
                } else {
                    "2"
                }
            })
            .collect();
        s.push_str(&row.join(" "));
        s.push('\n');
    }
    s
}

/// Boundary of the rectangle [0, w] × [0, h], counter-clockwise from the origin.
pub fn rectangle_curve(w: i64, h: i64) -> Result<DigitalCurve> {
    if w < 1 || h < 1 {
        return Err(Error::Param("rectangle sides must be positive".into()));
    }
    let mut pts = Vec::new();
    pts.extend((0..w).map(|x| [x, 0]));
    pts.extend((0..h).map(|y| [w, y]));
    pts.extend((1..=w).rev().map(|x| [x, h]));
    pts.extend((1..=h).rev().map(|y| [0, y]));
    pts.push([0, 0]);
    DigitalCurve::new(pts)
}

/// The 12-step circuit that is injective but not simple.
pub fn twelve_step_curve() -> DigitalCurve {
    DigitalCurve::new(vec![
        [0, 0], [0, -1], [1, -1], [2, -1], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2], [-1, 2], [-1, 1], [-1, 0], [0, 0],
    ])
    .expect("continuous")
}

/// Two rectangular loops crossing diagonally at (0,0)–(1,1). With
/// (a, b, c, d) = (2, 1, 1, 2) this is the 12-step curve.
pub fn figure_eight(a: i64, b: i64, c: i64, d: i64) -> Result<DigitalCurve> {
    if a < 2 || d < 2 || b < 1 || c < 1 {
        return Err(Error::Param("figure-eight needs a, d ≥ 2 and b, c ≥ 1".into()));
    }
    let mut pts = Vec::new();
    pts.extend((0..b).map(|k| [0, -k]));
    pts.extend((0..a).map(|k| [k, -b]));
    pts.extend((-b..=1).map(|y| [a, y]));
    pts.extend((1..a).rev().map(|x| [x, 1]));
    pts.extend((2..=d).map(|y| [1, y]));
    pts.extend((-c..1).rev().map(|x| [x, d]));
    pts.extend((0..d).rev().map(|y| [-c, y]));
    pts.extend((-c + 1..=0).map(|x| [x, 0]));
    DigitalCurve::new(pts)
}

/// Outer 8-boundary of a random hole-free 4-connected blob inside a
/// `size × size` box, retried until it traverses as a simple curve without
/// unit squares.
pub fn random_simple_curve<R: Rng>(size: i64, rng: &mut R) -> DigitalCurve {
    assert!(size >= 3, "box side must be at least 3");
    loop {
        let blob = random_blob(size - 2, rng);
        if let Some(c) = trace_boundary(&blob) {
            if check_jordan_preconditions(&c).is_ok() {
                return c;
            }
        }
    }
}

fn random_blob<R: Rng>(side: i64, rng: &mut R) -> BTreeSet<GridPoint> {
    let target = rng.gen_range(1..=(side * side) as usize);
    let start = [rng.gen_range(0..side), rng.gen_range(0..side)];
    let mut blob = BTreeSet::from([start]);
    let mut frontier = vec![start];
    while blob.len() < target && !frontier.is_empty() {
        let k = rng.gen_range(0..frontier.len());
        let p = frontier[k];
        let q = add(p, AXIS[rng.gen_range(0..4)]);
        if (0..side).contains(&q[0]) && (0..side).contains(&q[1]) && blob.insert(q) {
            frontier.push(q);
        }
        if AXIS.iter().all(|&v| {
            let r = add(p, v);
            blob.contains(&r) || !(0..side).contains(&r[0]) || !(0..side).contains(&r[1])
        }) {
            frontier.swap_remove(k);
        }
    }
    fill_holes(blob, side)
}

fn fill_holes(blob: BTreeSet<GridPoint>, side: i64) -> BTreeSet<GridPoint> {
    let outer = Rect { x0: -1, x1: side, y0: -1, y1: side };
    let mut reach = BTreeSet::from([[-1, -1]]);
    let mut queue = vec![[-1, -1]];
    while let Some(p) = queue.pop() {
        for v in AXIS {
            let q = add(p, v);
            if outer.contains(q) && !blob.contains(&q) && reach.insert(q) {
                queue.push(q);
            }
        }
    }
    let mut out = BTreeSet::new();
    for x in 0..side {
        for y in 0..side {
            if !reach.contains(&[x, y]) {
                out.insert([x, y]);
            }
        }
    }
    out
}

/// Points off the blob touching it (axis or diagonal), walked as a cycle when
/// every such point has exactly two axis neighbours in the set.
fn trace_boundary(blob: &BTreeSet<GridPoint>) -> Option<DigitalCurve> {
    let mut ring = BTreeSet::new();
    for &p in blob {
        for v in AXIS.iter().chain(DIAG.iter()) {
            let q = add(p, *v);
            if !blob.contains(&q) {
                ring.insert(q);
            }
        }
    }
    let nbrs = |p: GridPoint| -> Vec<GridPoint> { AXIS.iter().map(|&v| add(p, v)).filter(|q| ring.contains(q)).collect() };
    if ring.iter().any(|&p| nbrs(p).len() != 2) {
        return None;
    }
    let start = *ring.iter().next()?;
    let mut seq = vec![start];
    let mut prev = start;
    let mut cur = nbrs(start)[0];
    while cur != start {
        seq.push(cur);
        let next = nbrs(cur).into_iter().find(|&q| q != prev)?;
        prev = cur;
        cur = next;
    }
    if seq.len() != ring.len() {
        return None;
    }
    seq.push(start);
    DigitalCurve::new(seq).ok()
}
