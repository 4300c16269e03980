use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::homotopy::path_components;
use crate::space::{collect_marks, MetricSpace, PointId};

/// A total function between the point sets of two spaces.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMap<'a> {
    pub domain: &'a MetricSpace,
    pub codomain: &'a MetricSpace,
    table: Vec<PointId>,
}

impl<'a> PointMap<'a> {
    pub fn new(domain: &'a MetricSpace, codomain: &'a MetricSpace, table: Vec<PointId>) -> Result<PointMap<'a>> {
        if table.len() != domain.len() || table.iter().any(|p| p.idx() >= codomain.len()) {
            return Err(Error::BadMap);
        }
        Ok(PointMap { domain, codomain, table })
    }

    pub fn identity(space: &'a MetricSpace) -> PointMap<'a> {
        PointMap { domain: space, codomain: space, table: space.points().collect() }
    }

    #[inline]
    pub fn apply(&self, x: PointId) -> PointId {
        self.table[x.idx()]
    }

    pub fn table(&self) -> &[PointId] {
        &self.table
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.codomain.len()];
        self.table.iter().all(|p| !std::mem::replace(&mut seen[p.idx()], true))
    }

    pub fn is_bijective(&self) -> bool {
        self.domain.len() == self.codomain.len() && self.is_injective()
    }

    pub fn inverse(&self) -> Result<PointMap<'a>> {
        if !self.is_bijective() {
            return Err(Error::NotBijective);
        }
        let mut inv = vec![PointId(0); self.table.len()];
        for (x, y) in self.table.iter().enumerate() {
            inv[y.idx()] = PointId(x as u32);
        }
        Ok(PointMap { domain: self.codomain, codomain: self.domain, table: inv })
    }

    /// `g ∘ self`.
    pub fn then<'b>(&self, g: &PointMap<'b>) -> Result<PointMap<'a>>
    where
        'b: 'a,
    {
        if !std::ptr::eq(self.codomain, g.domain) && self.codomain != g.domain {
            return Err(Error::BadMap);
        }
        Ok(PointMap { domain: self.domain, codomain: g.codomain, table: self.table.iter().map(|&p| g.apply(p)).collect() })
    }

    pub fn image(&self, a: &[PointId]) -> Vec<PointId> {
        let mut out: Vec<PointId> = a.iter().map(|&p| self.apply(p)).collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Witness {
    NotBijective,
    /// y ∈ dN₁(x) but f(y) ∉ dN₁(f(x)).
    Forward { x: PointId, y: PointId },
    /// Same failure for the inverse map, in codomain ids.
    Inverse { x: PointId, y: PointId },
    /// y sits on different distance levels from x and from f(x).
    Level { x: PointId, y: PointId, level: usize, image_level: usize },
    /// f(dN_k(A)) ≠ dN_k(f(A)).
    Subset { set: Vec<PointId>, k: usize },
}

/// First x (and neighbour y) breaking f(dN₁(x)) ⊆ dN₁(f(x)).
pub fn npp_violation(f: &PointMap) -> Option<(PointId, PointId)> {
    for x in f.domain.points() {
        let fx = f.apply(x);
        let Some(r) = f.domain.min_positive(x) else { continue };
        for y in f.domain.points() {
            if y != x && f.domain.d(x, y) == r && !f.codomain.in_dn1(fx, f.apply(y)) {
                return Some((x, y));
            }
        }
    }
    None
}

pub fn is_npp_function(f: &PointMap) -> bool {
    npp_violation(f).is_none()
}

pub fn local_isomorphism_witness(f: &PointMap) -> Option<Witness> {
    if !f.is_bijective() {
        return Some(Witness::NotBijective);
    }
    if let Some((x, y)) = npp_violation(f) {
        return Some(Witness::Forward { x, y });
    }
    let inv = f.inverse().expect("bijective");
    npp_violation(&inv).map(|(x, y)| Witness::Inverse { x, y })
}

pub fn is_npp_local_isomorphism(f: &PointMap) -> bool {
    local_isomorphism_witness(f).is_none()
}

/// Level-structure check: every y keeps its distance-level index seen from x
/// when both are mapped. For a bijection this covers the inverse as well.
pub fn isomorphism_witness(f: &PointMap) -> Result<Option<Witness>> {
    if !f.is_bijective() {
        return Err(Error::NotBijective);
    }
    for x in f.domain.points() {
        let lx = f.domain.distance_levels(x);
        let lfx = f.codomain.distance_levels(f.apply(x));
        if lx.len() != lfx.len() {
            // some level would have to split or merge; find the first point showing it
            for y in f.domain.points() {
                let (a, b) = (lx.level_of(y), lfx.level_of(f.apply(y)));
                if a != b {
                    return Ok(Some(Witness::Level { x, y, level: a, image_level: b }));
                }
            }
        }
        for y in f.domain.points() {
            let (a, b) = (lx.level_of(y), lfx.level_of(f.apply(y)));
            if a != b {
                return Ok(Some(Witness::Level { x, y, level: a, image_level: b }));
            }
        }
    }
    Ok(None)
}

pub fn is_npp_isomorphism(f: &PointMap) -> Result<bool> {
    Ok(isomorphism_witness(f)?.is_none())
}

/// Brute-force subset form: f(dN_k(A)) = dN_k(f(A)) for every non-empty A
/// and every k ≤ kmax. Limited to 16 points.
pub fn subset_identity_witness(f: &PointMap, kmax: usize) -> Result<Option<Witness>> {
    if !f.is_bijective() {
        return Err(Error::NotBijective);
    }
    let n = f.domain.len();
    if n > 16 {
        return Err(Error::Unsupported("subset enumeration is limited to 16 points".into()));
    }
    let mut m1 = vec![false; n];
    let mut m2 = vec![false; n];
    let rule = Default::default();
    for mask in 1u32..(1u32 << n) {
        let a: Vec<PointId> = (0..n as u32).filter(|i| mask >> i & 1 == 1).map(PointId).collect();
        let fa = f.image(&a);
        for k in 0..=kmax {
            f.domain.mark_neighborhood(&a, k, rule, &mut m1);
            f.codomain.mark_neighborhood(&fa, k, rule, &mut m2);
            let img = f.image(&collect_marks(&m1));
            if img != collect_marks(&m2) {
                return Ok(Some(Witness::Subset { set: a, k }));
            }
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum GraphTypeWitness {
    /// x is on level h from y but not y on level h from x.
    Symmetry { x: PointId, y: PointId },
    /// x ∈ dN_h(y), z ∈ dN_k(y), yet x ∉ dN_{h+k}(z).
    Additivity { x: PointId, y: PointId, z: PointId },
}

/// Both graph-type conditions by enumeration; `None` when they hold.
pub fn graph_type_witness(space: &MetricSpace) -> Option<GraphTypeWitness> {
    let lvl = level_table(space);
    let n = space.len();
    for x in 0..n {
        for y in 0..n {
            if lvl[x * n + y] != lvl[y * n + x] {
                return Some(GraphTypeWitness::Symmetry { x: PointId(x as u32), y: PointId(y as u32) });
            }
        }
    }
    for y in 0..n {
        for x in 0..n {
            for z in 0..n {
                if lvl[z * n + x] > lvl[y * n + x] + lvl[y * n + z] {
                    return Some(GraphTypeWitness::Additivity {
                        x: PointId(x as u32),
                        y: PointId(y as u32),
                        z: PointId(z as u32),
                    });
                }
            }
        }
    }
    None
}

pub fn is_graph_type(space: &MetricSpace) -> bool {
    graph_type_witness(space).is_none()
}

/// lvl[x·n + y] = level index of y seen from x.
fn level_table(space: &MetricSpace) -> Vec<u32> {
    let n = space.len();
    let mut t = vec![0u32; n * n];
    for x in space.points() {
        let lv = space.distance_levels(x);
        for y in space.points() {
            t[x.idx() * n + y.idx()] = lv.level_of(y) as u32;
        }
    }
    t
}

/// Complete graph with positive integer labels forming a metric.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TsGraph {
    pub n: usize,
    /// Row-major upper triangle: (0,1), (0,2), …, (1,2), …
    pub labels: Vec<u32>,
}

impl TsGraph {
    fn slot(&self, x: usize, y: usize) -> usize {
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        a * self.n - a * (a + 1) / 2 + (b - a - 1)
    }

    pub fn label(&self, x: PointId, y: PointId) -> u32 {
        if x == y {
            0
        } else {
            self.labels[self.slot(x.idx(), y.idx())]
        }
    }

    pub fn to_space(&self) -> Result<MetricSpace> {
        let rows = (0..self.n)
            .map(|x| (0..self.n).map(|y| Distance::from_int(self.label(PointId(x as u32), PointId(y as u32)) as i64)).collect())
            .collect();
        MetricSpace::from_matrix(rows)
    }
}

/// Runs the map-drawing construction from `base`: visit points shell by shell
/// and join each visited x to the points of dB_h(x) ∖ dB_{h−1}(x) with label h.
pub fn symbolic_graph_from(space: &MetricSpace, base: PointId) -> Result<TsGraph> {
    space.check(base)?;
    let n = space.len();
    let mut g = TsGraph { n, labels: vec![0; n * n.saturating_sub(1) / 2] };
    let order: Vec<PointId> = space.distance_levels(base).members.iter().flatten().copied().collect();
    for &x in &order {
        let lv = space.distance_levels(x);
        for (h, level) in lv.members.iter().enumerate().skip(1) {
            for &y in level {
                let s = g.slot(x.idx(), y.idx());
                if g.labels[s] == 0 {
                    g.labels[s] = h as u32;
                } else if g.labels[s] != h as u32 {
                    return Err(Error::NotGraphType(format!("labels disagree on ({x},{y})")));
                }
            }
        }
    }
    Ok(g)
}

/// Symbolic graph, built from three base points and cross-checked; the
/// identity onto the labelled space is verified to be an NPP-isomorphism.
pub fn symbolic_graph(space: &MetricSpace) -> Result<TsGraph> {
    if let Some(w) = graph_type_witness(space) {
        return Err(Error::NotGraphType(serde_json::to_string(&w).expect("serializable")));
    }
    let comps = path_components(space);
    if comps.len() > 1 {
        return Err(Error::NotPathConnected { count: comps.len() });
    }
    let n = space.len();
    let mut bases = vec![0, n / 2, n - 1];
    bases.dedup();
    let g = symbolic_graph_from(space, PointId(0))?;
    for &b in &bases[1..] {
        if symbolic_graph_from(space, PointId(b as u32))? != g {
            return Err(Error::CheckFailed(format!("symbolic graph depends on the base point {b}")));
        }
    }
    let sym = g.to_space().map_err(|e| Error::CheckFailed(format!("labels are not a metric: {e}")))?;
    let id = PointMap::new(space, &sym, space.points().collect())?;
    if let Some(w) = isomorphism_witness(&id)? {
        return Err(Error::CheckFailed(format!("identity is not an NPP-isomorphism: {w:?}")));
    }
    Ok(g)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct FunctionSearchBounds {
    pub max_steps: usize,
    pub max_states: usize,
}

impl Default for FunctionSearchBounds {
    fn default() -> Self {
        FunctionSearchBounds { max_steps: 12, max_states: 200_000 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum FunctionHomotopy {
    /// f = f₁, …, f_m = g as tables.
    Found { sequence: Vec<Vec<PointId>>, states: usize },
    Exhausted { states: usize },
    StateLimit { states: usize },
}

/// Checks a proposed sequence of tables: every table NPP, consecutive values
/// linked in the codomain.
pub fn validate_function_homotopy(domain: &MetricSpace, codomain: &MetricSpace, seq: &[Vec<PointId>]) -> Result<bool> {
    for t in seq {
        let f = PointMap::new(domain, codomain, t.clone())?;
        if !is_npp_function(&f) {
            return Ok(false);
        }
    }
    Ok(seq.windows(2).all(|w| w[0].iter().zip(&w[1]).all(|(&a, &b)| codomain.linked(a, b))))
}

/// Breadth-first search over NPP-functions, each step moving every value to a
/// linked point. Finds a shortest sequence when one exists within the bounds.
pub fn functions_homotopic_search(f: &PointMap, g: &PointMap, bounds: FunctionSearchBounds) -> Result<FunctionHomotopy> {
    if f.domain != g.domain || f.codomain != g.codomain {
        return Err(Error::BadMap);
    }
    for h in [f, g] {
        if let Some((x, y)) = npp_violation(h) {
            return Err(Error::NotNpp { x: x.0, y: y.0 });
        }
    }
    let (dom, cod) = (f.domain, f.codomain);
    let start = f.table.clone();
    let goal = g.table.clone();
    let mut nodes: Vec<(Vec<PointId>, usize, usize)> = vec![(start.clone(), usize::MAX, 0)];
    let mut seen: HashMap<Vec<PointId>, usize> = HashMap::from([(start.clone(), 0)]);
    let mut head = 0;
    let mut found = (start == goal).then_some(0);
    let nb: Vec<Vec<PointId>> = dom.points().map(|x| dom.adjacent(x).to_vec()).collect();
    let mut limit_hit = false;
    while found.is_none() && head < nodes.len() {
        let (cur, _, depth) = nodes[head].clone();
        if depth < bounds.max_steps {
            let mut next = Vec::with_capacity(cur.len());
            let mut outs = Vec::new();
            extend_tables(dom, cod, &nb, &cur, &mut next, &mut outs);
            for t in outs {
                if seen.contains_key(&t) {
                    continue;
                }
                if nodes.len() >= bounds.max_states {
                    limit_hit = true;
                    break;
                }
                seen.insert(t.clone(), nodes.len());
                let hit = t == goal;
                nodes.push((t, head, depth + 1));
                if hit {
                    found = Some(nodes.len() - 1);
                    break;
                }
            }
            if limit_hit && found.is_none() {
                return Ok(FunctionHomotopy::StateLimit { states: nodes.len() });
            }
        }
        head += 1;
    }
    match found {
        Some(end) => {
            let mut seq = Vec::new();
            let mut at = end;
            while at != usize::MAX {
                seq.push(nodes[at].0.clone());
                at = nodes[at].1;
            }
            seq.reverse();
            Ok(FunctionHomotopy::Found { sequence: seq, states: nodes.len() })
        }
        None => Ok(FunctionHomotopy::Exhausted { states: nodes.len() }),
    }
}

/// All NPP tables whose values are linked to those of `cur`, built point by
/// point with the NPP condition checked against already assigned neighbours.
fn extend_tables(
    dom: &MetricSpace,
    cod: &MetricSpace,
    nb: &[Vec<PointId>],
    cur: &[PointId],
    acc: &mut Vec<PointId>,
    out: &mut Vec<Vec<PointId>>,
) {
    let i = acc.len();
    if i == cur.len() {
        out.push(acc.clone());
        return;
    }
    let x = PointId(i as u32);
    let mut cands = cod.adjacent(cur[i]).to_vec();
    cands.push(cur[i]);
    cands.sort_unstable();
    'cand: for c in cands {
        // NPP both ways between x and its earlier dN₁ members
        for y in dom.points().take(i) {
            let fy = acc[y.idx()];
            if dom.in_dn1(x, y) && !cod.in_dn1(c, fy) {
                continue 'cand;
            }
            if dom.in_dn1(y, x) && !cod.in_dn1(fy, c) {
                continue 'cand;
            }
        }
        let _ = nb;
        acc.push(c);
        extend_tables(dom, cod, nb, cur, acc, out);
        acc.pop();
    }
}

/// An NPP-isomorphic copy of `space`: points shuffled and distances pushed
/// through a strictly increasing map. A window is carried along. Returns the
/// copy and the table x ↦ f(x).
pub fn random_npp_isomorph<R: Rng>(space: &MetricSpace, rng: &mut R) -> (MetricSpace, Vec<PointId>) {
    let n = space.len();
    let mut perm: Vec<PointId> = space.points().collect();
    perm.shuffle(rng);
    let mut values: Vec<Distance> = Vec::new();
    for x in space.points() {
        for y in space.points() {
            values.push(space.d(x, y));
        }
    }
    values.sort_unstable();
    values.dedup();
    // Any increasing relabelling of positive values into [m, 2m] keeps the
    // triangle inequality, as does a uniform rescaling.
    let remap: HashMap<Distance, Distance> = if rng.gen_bool(0.5) {
        let m = 4 * values.len() as i64 + 4;
        let mut picks: Vec<i64> = Vec::new();
        let mut v = m;
        for _ in 1..values.len() {
            v += rng.gen_range(1..=2);
            picks.push(v);
        }
        let mut map = HashMap::from([(Distance::ZERO, Distance::ZERO)]);
        for (d, p) in values.iter().skip(1).zip(picks) {
            map.insert(*d, Distance::from_int(p));
        }
        map
    } else {
        let s = crate::distance::Rational::new(rng.gen_range(1..=5), rng.gen_range(1..=3));
        values.iter().map(|&d| (d, Distance::from_squared(d.squared() * s * s))).collect()
    };
    let mut rows = vec![vec![Distance::ZERO; n]; n];
    for x in space.points() {
        for y in space.points() {
            rows[perm[x.idx()].idx()][perm[y.idx()].idx()] = remap[&space.d(x, y)];
        }
    }
    let copy = MetricSpace::from_matrix(rows).expect("monotone image of a metric");
    let copy = match space.window() {
        Some(w) => {
            let rim = w.rim.iter().map(|p| perm[p.idx()]).collect();
            copy.with_window(w.margin, Some(rim)).expect("rim ids are in range")
        }
        None => copy,
    };
    (copy, perm)
}
