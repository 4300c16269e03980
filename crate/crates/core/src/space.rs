use std::collections::VecDeque;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::distance::{Distance, Rational};
use crate::error::{Error, Result};

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PointId(pub u32);

impl PointId {
    #[inline]
    pub fn idx(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for PointId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

pub fn ids(v: &[u32]) -> Vec<PointId> {
    v.iter().map(|&i| PointId(i)).collect()
}

pub fn raw(v: &[PointId]) -> Vec<u32> {
    v.iter().map(|p| p.0).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PointMetric {
    Euclidean,
    L1,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coords {
    Integer(Vec<Vec<i64>>),
    Rational(Vec<Vec<Rational>>),
}

impl Coords {
    pub fn len(&self) -> usize {
        match self {
            Coords::Integer(v) => v.len(),
            Coords::Rational(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rational(&self, i: usize) -> Vec<Rational> {
        match self {
            Coords::Integer(v) => v[i].iter().map(|&c| Rational::from_integer(c)).collect(),
            Coords::Rational(v) => v[i].clone(),
        }
    }
}

/// Truncation data for a finite window of an infinite ambient space.
/// `rim` holds the points next to the cut; `margin` is the hop depth that
/// separates the safe interior from the rim.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Window {
    pub margin: u32,
    pub rim: Vec<PointId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Origin {
    Points(PointMetric),
    Matrix,
    Graph(Vec<(u32, u32)>),
}

/// Which distance ladder decides chain completeness in dN_k.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChainRule {
    /// Completeness in P = {d(y,A)}.
    #[default]
    SetDistances,
    /// Completeness in {d(x0,y)} for the chain's own start x0.
    BaseDistances,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLevels {
    pub base: PointId,
    pub values: Vec<Distance>,
    pub members: Vec<Vec<PointId>>,
    level_of: Vec<u32>,
}

impl ChainLevels {
    pub fn level_of(&self, y: PointId) -> usize {
        self.level_of[y.idx()] as usize
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Points of the first `k + 1` levels, i.e. dN_k of the base point.
    pub fn ball(&self, k: usize) -> impl Iterator<Item = PointId> + '_ {
        self.members.iter().take(k.saturating_add(1)).flatten().copied()
    }
}

#[derive(Clone, Debug)]
pub struct MetricSpace {
    n: usize,
    dist: Vec<Distance>,
    coords: Option<Coords>,
    window: Option<Window>,
    origin: Origin,
    min_pos: Vec<Option<Distance>>,
    adj: Vec<Vec<PointId>>,
    levels: Vec<OnceLock<ChainLevels>>,
    graph_metric: OnceLock<bool>,
    hops: OnceLock<Vec<u32>>,
}

impl PartialEq for MetricSpace {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.dist == other.dist
            && self.coords == other.coords
            && self.window == other.window
            && self.origin == other.origin
    }
}

impl MetricSpace {
    fn build(n: usize, dist: Vec<Distance>, coords: Option<Coords>, origin: Origin) -> MetricSpace {
        let mut min_pos = vec![None; n];
        for x in 0..n {
            let row = &dist[x * n..(x + 1) * n];
            min_pos[x] = row.iter().filter(|d| !d.is_zero()).min().copied();
        }
        let mut adj = vec![Vec::new(); n];
        for x in 0..n {
            let Some(rx) = min_pos[x] else { continue };
            for y in 0..n {
                if x != y && dist[x * n + y] == rx && min_pos[y] == Some(rx) {
                    adj[x].push(PointId(y as u32));
                }
            }
        }
        MetricSpace {
            n,
            dist,
            coords,
            window: None,
            origin,
            min_pos,
            adj,
            levels: (0..n).map(|_| OnceLock::new()).collect(),
            graph_metric: OnceLock::new(),
            hops: OnceLock::new(),
        }
    }

    /// Builds a space from a full distance table, validating the metric axioms.
    pub fn from_matrix(d: Vec<Vec<Distance>>) -> Result<MetricSpace> {
        let n = d.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        for (i, row) in d.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Ragged(i));
            }
        }
        for a in 0..n {
            if !d[a][a].is_zero() {
                return Err(Error::Axiom { a: a as u32, b: a as u32, what: "nonzero self-distance" });
            }
            for b in 0..n {
                if d[a][b] != d[b][a] {
                    return Err(Error::Axiom { a: a as u32, b: b as u32, what: "asymmetric" });
                }
                if a != b && d[a][b].is_zero() {
                    return Err(Error::Axiom { a: a as u32, b: b as u32, what: "distinct points at distance 0" });
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if !d[a][c].le_sum(d[a][b], d[b][c]) {
                        return Err(Error::Triangle { a: a as u32, b: b as u32, c: c as u32 });
                    }
                }
            }
        }
        let dist = d.into_iter().flatten().collect();
        Ok(MetricSpace::build(n, dist, None, Origin::Matrix))
    }

    pub fn from_points(coords: Coords, metric: PointMetric) -> Result<MetricSpace> {
        let n = coords.len();
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let pts: Vec<Vec<Rational>> = (0..n).map(|i| coords.rational(i)).collect();
        let dim = pts[0].len();
        if pts.iter().any(|p| p.len() != dim) {
            return Err(Error::Malformed("points of different dimensions".into()));
        }
        let mut dist = vec![Distance::ZERO; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = match metric {
                    PointMetric::Euclidean => {
                        let sq = pts[i].iter().zip(&pts[j]).map(|(a, b)| (a - b) * (a - b)).sum();
                        Distance::from_squared(sq)
                    }
                    PointMetric::L1 => {
                        let s: Rational = pts[i].iter().zip(&pts[j]).map(|(a, b)| num_traits::Signed::abs(&(a - b))).sum();
                        Distance::from_rational(s)
                    }
                };
                if d.is_zero() {
                    return Err(Error::Axiom { a: i as u32, b: j as u32, what: "repeated point" });
                }
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(MetricSpace::build(n, dist, Some(coords), Origin::Points(metric)))
    }

    /// Shortest-path metric of an undirected graph.
    pub fn from_graph(n: usize, edges: &[(u32, u32)]) -> Result<MetricSpace> {
        if n == 0 {
            return Err(Error::EmptySet);
        }
        let mut nb = vec![Vec::new(); n];
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::Malformed(format!("edge ({a},{b}) out of range")));
            }
            if a == b {
                return Err(Error::Malformed(format!("self-loop at {a}")));
            }
            nb[a as usize].push(b as usize);
            nb[b as usize].push(a as usize);
            canon.push((a.min(b), a.max(b)));
        }
        canon.sort_unstable();
        canon.dedup();
        let mut dist = vec![Distance::ZERO; n * n];
        for s in 0..n {
            let hop = bfs(&nb, &[s]);
            for t in 0..n {
                if hop[t] == u32::MAX {
                    return Err(Error::DisconnectedGraph { components: graph_components(&nb) });
                }
                dist[s * n + t] = Distance::from_int(hop[t] as i64);
            }
        }
        Ok(MetricSpace::build(n, dist, None, Origin::Graph(canon)))
    }

    /// Trusted constructor for tables produced inside the crate.
    pub(crate) fn from_table(n: usize, dist: Vec<Distance>, coords: Option<Coords>, origin: Origin) -> MetricSpace {
        MetricSpace::build(n, dist, coords, origin)
    }

    pub fn with_window(mut self, margin: u32, rim: Option<Vec<PointId>>) -> Result<MetricSpace> {
        let rim = match rim {
            Some(r) => {
                for p in &r {
                    self.check(*p)?;
                }
                let mut r = r;
                r.sort_unstable();
                r.dedup();
                r
            }
            None => self.inferred_rim(),
        };
        self.window = Some(Window { margin, rim });
        self.hops = OnceLock::new();
        Ok(self)
    }

    /// Points whose dN₁ is smaller than the largest dN₁ in the space.
    fn inferred_rim(&self) -> Vec<PointId> {
        let top = self.adj.iter().map(Vec::len).max().unwrap_or(0);
        (0..self.n).filter(|&i| self.adj[i].len() < top).map(|i| PointId(i as u32)).collect()
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn points(&self) -> impl Iterator<Item = PointId> {
        (0..self.n as u32).map(PointId)
    }

    #[inline]
    pub fn d(&self, x: PointId, y: PointId) -> Distance {
        self.dist[x.idx() * self.n + y.idx()]
    }

    pub fn coords(&self) -> Option<&Coords> {
        self.coords.as_ref()
    }

    pub fn window(&self) -> Option<&Window> {
        self.window.as_ref()
    }

    pub fn origin(&self) -> &Origin {
        &self.origin
    }

    pub fn check(&self, x: PointId) -> Result<()> {
        if x.idx() < self.n {
            Ok(())
        } else {
            Err(Error::UnknownPoint(x.0))
        }
    }

    pub fn check_all(&self, xs: &[PointId]) -> Result<()> {
        xs.iter().try_for_each(|&x| self.check(x))
    }

    /// Integer coordinates of a point, if the space carries them.
    pub fn int_coords(&self, x: PointId) -> Option<&[i64]> {
        match &self.coords {
            Some(Coords::Integer(v)) => Some(&v[x.idx()]),
            _ => None,
        }
    }

    /// Finds the point with the given integer coordinates.
    pub fn find_int(&self, c: &[i64]) -> Option<PointId> {
        match &self.coords {
            Some(Coords::Integer(v)) => v.iter().position(|p| p.as_slice() == c).map(|i| PointId(i as u32)),
            _ => None,
        }
    }

    /// Minimal positive distance from x (R_x); `None` in a singleton space.
    pub fn min_positive(&self, x: PointId) -> Option<Distance> {
        self.min_pos[x.idx()]
    }

    /// Mutual dN₁ neighbours of x, excluding x.
    pub fn adjacent(&self, x: PointId) -> &[PointId] {
        &self.adj[x.idx()]
    }

    /// x and y are equal or mutually in each other's dN₁.
    #[inline]
    pub fn linked(&self, x: PointId, y: PointId) -> bool {
        x == y || {
            let d = self.d(x, y);
            self.min_pos[x.idx()] == Some(d) && self.min_pos[y.idx()] == Some(d)
        }
    }

    pub fn in_dn1(&self, x: PointId, y: PointId) -> bool {
        x == y || self.min_pos[x.idx()] == Some(self.d(x, y))
    }

    pub fn discrete_one_neighborhood(&self, x: PointId) -> Result<Vec<PointId>> {
        self.check(x)?;
        let Some(r) = self.min_pos[x.idx()] else { return Ok(vec![x]) };
        Ok(self.points().filter(|&y| y == x || self.d(x, y) == r).collect())
    }

    pub fn distance_levels(&self, base: PointId) -> &ChainLevels {
        self.levels[base.idx()].get_or_init(|| {
            let n = self.n;
            let row = &self.dist[base.idx() * n..(base.idx() + 1) * n];
            let mut order: Vec<u32> = (0..n as u32).collect();
            order.sort_by(|&a, &b| row[a as usize].cmp(&row[b as usize]).then(a.cmp(&b)));
            let mut values = Vec::new();
            let mut members: Vec<Vec<PointId>> = Vec::new();
            let mut level_of = vec![0u32; n];
            for y in order {
                let d = row[y as usize];
                if values.last() != Some(&d) {
                    values.push(d);
                    members.push(Vec::new());
                }
                level_of[y as usize] = (values.len() - 1) as u32;
                members.last_mut().unwrap().push(PointId(y));
            }
            ChainLevels { base, values, members, level_of }
        })
    }

    pub fn dist_to_set(&self, a: &[PointId], y: PointId) -> Distance {
        a.iter().map(|&x| self.d(x, y)).min().expect("non-empty set")
    }

    /// Whether the metric is the shortest-path metric of its unit-distance graph.
    pub fn is_graph_metric(&self) -> bool {
        *self.graph_metric.get_or_init(|| {
            if let Origin::Graph(_) = self.origin {
                return true;
            }
            let one = Distance::from_int(1);
            if self.dist.iter().any(|d| d.as_rational().is_none_or(|r| !r.is_integer())) {
                return false;
            }
            let nb: Vec<Vec<usize>> = (0..self.n)
                .map(|x| (0..self.n).filter(|&y| self.dist[x * self.n + y] == one).collect())
                .collect();
            (0..self.n).all(|s| {
                let hop = bfs(&nb, &[s]);
                (0..self.n).all(|t| hop[t] != u32::MAX && Distance::from_int(hop[t] as i64) == self.dist[s * self.n + t])
            })
        })
    }

    /// Writes dN_k(A) into `marks` (cleared first).
    pub(crate) fn mark_neighborhood(&self, a: &[PointId], k: usize, rule: ChainRule, marks: &mut [bool]) {
        marks.iter_mut().for_each(|m| *m = false);
        for &x in a {
            marks[x.idx()] = true;
        }
        if k == 0 {
            return;
        }
        // On connected graph metrics both rules give the union of k-balls.
        if rule == ChainRule::BaseDistances || self.is_graph_metric() {
            for &x0 in a {
                for y in self.distance_levels(x0).ball(k) {
                    marks[y.idx()] = true;
                }
            }
            return;
        }
        let mut da: Vec<Distance> = vec![Distance::ZERO; self.n];
        for y in 0..self.n {
            da[y] = self.dist_to_set(a, PointId(y as u32));
        }
        da.sort_unstable();
        da.dedup();
        da.truncate(k + 1);
        for &x0 in a {
            let lv = self.distance_levels(x0);
            let mut top = 0usize;
            let mut idx = vec![0usize];
            for (i, p) in da.iter().enumerate().skip(1) {
                match lv.values.binary_search(p) {
                    Ok(j) => {
                        top = i;
                        idx.push(j);
                    }
                    Err(_) => break,
                }
            }
            for &j in &idx[..=top] {
                for y in &lv.members[j] {
                    marks[y.idx()] = true;
                }
            }
        }
    }

    pub fn discrete_k_neighborhood_with(&self, a: &[PointId], k: usize, rule: ChainRule) -> Result<Vec<PointId>> {
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_all(a)?;
        let mut marks = vec![false; self.n];
        self.mark_neighborhood(a, k, rule, &mut marks);
        Ok(collect_marks(&marks))
    }

    /// dN_k(A).
    pub fn discrete_k_neighborhood(&self, a: &[PointId], k: usize) -> Result<Vec<PointId>> {
        self.discrete_k_neighborhood_with(a, k, ChainRule::SetDistances)
    }

    /// dB_k(A) = dN_k(A) \ A.
    pub fn discrete_k_boundary(&self, a: &[PointId], k: usize) -> Result<Vec<PointId>> {
        self.discrete_k_boundary_with(a, k, ChainRule::SetDistances)
    }

    pub fn discrete_k_boundary_with(&self, a: &[PointId], k: usize, rule: ChainRule) -> Result<Vec<PointId>> {
        let mut nbhd = self.discrete_k_neighborhood_with(a, k, rule)?;
        let mut inside = vec![false; self.n];
        for x in a {
            inside[x.idx()] = true;
        }
        nbhd.retain(|y| !inside[y.idx()]);
        Ok(nbhd)
    }

    /// B_k(A); for locally finite spaces it coincides with dB_k(A).
    pub fn b_k(&self, a: &[PointId], k: usize) -> Result<Vec<PointId>> {
        self.discrete_k_boundary(a, k)
    }

    /// cN_α(A) = {x : d(x,A) <= α}.
    pub fn closed_neighborhood(&self, a: &[PointId], alpha: Distance) -> Result<Vec<PointId>> {
        if a.is_empty() {
            return Err(Error::EmptySet);
        }
        self.check_all(a)?;
        Ok(self.points().filter(|&y| self.dist_to_set(a, y) <= alpha).collect())
    }

    /// Hop count (along mutual dN₁ links) from every point to the window rim.
    /// Unwindowed spaces report `u32::MAX` everywhere.
    pub fn rim_hops(&self) -> &[u32] {
        self.hops.get_or_init(|| match &self.window {
            None => vec![u32::MAX; self.n],
            Some(w) => {
                let nb: Vec<Vec<usize>> = self.adj.iter().map(|v| v.iter().map(|p| p.idx()).collect()).collect();
                let src: Vec<usize> = w.rim.iter().map(|p| p.idx()).collect();
                bfs(&nb, &src)
            }
        })
    }

    /// Safe interior: at least `margin` hops away from the rim.
    pub fn is_interior(&self, x: PointId) -> bool {
        match &self.window {
            None => true,
            Some(w) => self.rim_hops()[x.idx()] >= w.margin,
        }
    }

    /// A computed set is contaminated when it reaches the rim of the window.
    pub fn touches_rim(&self, set: &[PointId]) -> bool {
        self.window.is_some() && set.iter().any(|p| self.rim_hops()[p.idx()] == 0)
    }

    /// Common minimal positive distance and the rescaled space.
    pub fn step_and_normal_form(&self) -> Result<(Distance, MetricSpace)> {
        let comps = crate::homotopy::path_components(self);
        if comps.len() > 1 {
            return Err(Error::NotPathConnected { count: comps.len() });
        }
        let Some(step) = self.min_pos[0] else {
            return Ok((Distance::from_int(1), self.clone()));
        };
        for x in 1..self.n {
            if self.min_pos[x] != Some(step) {
                return Err(Error::NonUniformStep { a: 0, b: x as u32 });
            }
        }
        Ok((step, self.rescaled(step)))
    }

    /// All distances divided by `step`.
    pub fn rescaled(&self, step: Distance) -> MetricSpace {
        let one = Distance::from_int(1);
        if step == one {
            return self.clone();
        }
        let dist: Vec<Distance> = self.dist.iter().map(|d| d.div(step)).collect();
        let (coords, origin) = match (&self.coords, step.as_rational(), &self.origin) {
            (Some(c), Some(s), Origin::Points(m)) => {
                let pts: Vec<Vec<Rational>> = (0..self.n).map(|i| c.rational(i).into_iter().map(|v| v / s).collect()).collect();
                let coords = if pts.iter().flatten().all(|v| v.is_integer()) {
                    Coords::Integer(pts.iter().map(|p| p.iter().map(|v| v.to_integer()).collect()).collect())
                } else {
                    Coords::Rational(pts)
                };
                (Some(coords), Origin::Points(*m))
            }
            _ => (None, Origin::Matrix),
        };
        let mut s = MetricSpace::build(self.n, dist, coords, origin);
        s.window = self.window.clone();
        s
    }

    /// Subspace on the given points, renumbered in the given order.
    pub fn subspace(&self, pts: &[PointId]) -> MetricSpace {
        let m = pts.len();
        let mut dist = Vec::with_capacity(m * m);
        for &a in pts {
            for &b in pts {
                dist.push(self.d(a, b));
            }
        }
        let (coords, origin) = match (&self.coords, &self.origin) {
            (Some(Coords::Integer(v)), Origin::Points(k)) => {
                (Some(Coords::Integer(pts.iter().map(|p| v[p.idx()].clone()).collect())), Origin::Points(*k))
            }
            (Some(Coords::Rational(v)), Origin::Points(k)) => {
                (Some(Coords::Rational(pts.iter().map(|p| v[p.idx()].clone()).collect())), Origin::Points(*k))
            }
            _ => (None, Origin::Matrix),
        };
        MetricSpace::build(m, dist, coords, origin)
    }
}

/// ℓ¹ product X × Y; point (x,y) gets id x·|Y| + y.
pub fn l1_product(x: &MetricSpace, y: &MetricSpace) -> Result<MetricSpace> {
    let (n, m) = (x.len(), y.len());
    let mut dist = vec![Distance::ZERO; n * m * n * m];
    for a in 0..n * m {
        for b in 0..n * m {
            let dx = x.d(PointId((a / m) as u32), PointId((b / m) as u32));
            let dy = y.d(PointId((a % m) as u32), PointId((b % m) as u32));
            dist[a * n * m + b] = dx.checked_add(dy).ok_or(Error::Irrational)?;
        }
    }
    let (coords, origin) = match (x.coords(), y.coords(), x.origin(), y.origin()) {
        (Some(cx), Some(cy), Origin::Points(PointMetric::L1), Origin::Points(PointMetric::L1)) => {
            let pts: Vec<Vec<Rational>> = (0..n * m)
                .map(|a| {
                    let mut p = cx.rational(a / m);
                    p.extend(cy.rational(a % m));
                    p
                })
                .collect();
            let coords = if pts.iter().flatten().all(|v| v.is_integer()) {
                Coords::Integer(pts.iter().map(|p| p.iter().map(|v| v.to_integer()).collect()).collect())
            } else {
                Coords::Rational(pts)
            };
            (Some(coords), Origin::Points(PointMetric::L1))
        }
        (_, _, Origin::Graph(ex), Origin::Graph(ey)) => {
            let mut edges = Vec::new();
            for i in 0..n as u32 {
                for &(a, b) in ey {
                    edges.push((i * m as u32 + a, i * m as u32 + b));
                }
            }
            for j in 0..m as u32 {
                for &(a, b) in ex {
                    edges.push((a * m as u32 + j, b * m as u32 + j));
                }
            }
            edges.sort_unstable();
            (None, Origin::Graph(edges))
        }
        _ => (None, Origin::Matrix),
    };
    Ok(MetricSpace::from_table(n * m, dist, coords, origin))
}

pub(crate) fn collect_marks(marks: &[bool]) -> Vec<PointId> {
    marks.iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| PointId(i as u32)).collect()
}

pub(crate) fn bfs(nb: &[Vec<usize>], sources: &[usize]) -> Vec<u32> {
    let mut hop = vec![u32::MAX; nb.len()];
    let mut q = VecDeque::new();
    for &s in sources {
        if hop[s] == u32::MAX {
            hop[s] = 0;
            q.push_back(s);
        }
    }
    while let Some(v) = q.pop_front() {
        for &w in &nb[v] {
            if hop[w] == u32::MAX {
                hop[w] = hop[v] + 1;
                q.push_back(w);
            }
        }
    }
    hop
}

fn graph_components(nb: &[Vec<usize>]) -> Vec<Vec<u32>> {
    let mut seen = vec![false; nb.len()];
    let mut out = Vec::new();
    for s in 0..nb.len() {
        if seen[s] {
            continue;
        }
        let hop = bfs(nb, &[s]);
        let comp: Vec<u32> = (0..nb.len()).filter(|&t| hop[t] != u32::MAX).map(|t| t as u32).collect();
        for &t in &comp {
            seen[t as usize] = true;
        }
        out.push(comp);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn p(i: u32) -> PointId {
        PointId(i)
    }

    fn int_matrix(rows: &[&[i64]]) -> Vec<Vec<Distance>> {
        rows.iter().map(|r| r.iter().map(|&v| Distance::from_int(v)).collect()).collect()
    }

    #[test]
    fn matrix_path_space() {
        let s = MetricSpace::from_matrix(int_matrix(&[&[0, 1, 2], &[1, 0, 1], &[2, 1, 0]])).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.is_graph_metric());
    }

    #[test]
    fn triangle_violation_reports_triple() {
        let err = MetricSpace::from_matrix(int_matrix(&[&[0, 1, 5], &[1, 0, 1], &[5, 1, 0]])).unwrap_err();
        assert_eq!(err, Error::Triangle { a: 0, b: 1, c: 2 });
    }

    #[test]
    fn disconnected_graph_reports_components() {
        let err = MetricSpace::from_graph(4, &[(0, 1), (2, 3)]).unwrap_err();
        assert_eq!(err, Error::DisconnectedGraph { components: vec![vec![0, 1], vec![2, 3]] });
    }

    #[test]
    fn one_neighborhood_examples() {
        let five = fixtures::five_point();
        let o = five.find_int(&[0, 0]).unwrap();
        let m = five.find_int(&[-1, 0]).unwrap();
        let mut want = vec![o, m];
        want.sort();
        assert_eq!(five.discrete_one_neighborhood(o).unwrap(), want);

        let g = fixtures::grid_window(2, PointMetric::Euclidean, false);
        let c = g.find_int(&[0, 0]).unwrap();
        let mut want: Vec<PointId> =
            [[0, 0], [1, 0], [-1, 0], [0, 1], [0, -1]].iter().map(|q| g.find_int(q).unwrap()).collect();
        want.sort();
        assert_eq!(g.discrete_one_neighborhood(c).unwrap(), want);

        let single = MetricSpace::from_graph(1, &[]).unwrap();
        assert_eq!(single.discrete_one_neighborhood(p(0)).unwrap(), vec![p(0)]);
    }

    #[test]
    fn levels_of_five_point_space() {
        let five = fixtures::five_point();
        let o = five.find_int(&[0, 0]).unwrap();
        let lv = five.distance_levels(o);
        let sq: Vec<Rational> = lv.values.iter().map(|d| d.squared()).collect();
        assert_eq!(sq, [0, 1, 2].map(Rational::from_integer).to_vec());
        let find = |c: [i64; 2]| five.find_int(&c).unwrap();
        let mut l2 = vec![find([-1, 1]), find([1, 1]), find([1, -1])];
        l2.sort();
        assert_eq!(lv.members[2], l2);
        assert_eq!(lv.level_of(find([-1, 0])), 1);

        let c5 = fixtures::cycle(5);
        let counts: Vec<usize> = c5.distance_levels(p(2)).members.iter().map(Vec::len).collect();
        assert_eq!(counts, vec![1, 2, 2]);
    }

    #[test]
    fn neighborhood_examples() {
        let p5 = fixtures::path(5);
        assert_eq!(p5.discrete_k_boundary(&[p(2)], 1).unwrap(), vec![p(1), p(3)]);
        let all: Vec<PointId> = p5.points().collect();
        assert!(p5.discrete_k_boundary(&all, 3).unwrap().is_empty());
        assert_eq!(p5.discrete_k_neighborhood(&all, 2).unwrap(), all);
        assert_eq!(p5.discrete_k_neighborhood(&[p(0)], 0).unwrap(), vec![p(0)]);
        assert_eq!(p5.discrete_k_neighborhood(&[], 1), Err(Error::EmptySet));

        // 7×7 Euclidean window: dN₂ of the origin is the first three levels.
        let g = fixtures::grid_window(3, PointMetric::Euclidean, false);
        let o = g.find_int(&[0, 0]).unwrap();
        let n2 = g.discrete_k_neighborhood(&[o], 2).unwrap();
        assert_eq!(n2.len(), 9);
        for q in &n2 {
            let c = g.int_coords(*q).unwrap();
            assert!(c[0].abs() <= 1 && c[1].abs() <= 1);
        }
    }

    #[test]
    fn closed_neighborhood_examples() {
        let c6 = fixtures::cycle(6);
        assert_eq!(c6.closed_neighborhood(&[p(0)], Distance::from_int(2)).unwrap().len(), 5);
        assert_eq!(c6.closed_neighborhood(&[p(0), p(3)], Distance::ZERO).unwrap(), vec![p(0), p(3)]);
        let g = fixtures::grid_window(3, PointMetric::Euclidean, false);
        let o = g.find_int(&[0, 0]).unwrap();
        assert_eq!(g.closed_neighborhood(&[o], Distance::from_int(1)).unwrap().len(), 5);
    }

    #[test]
    fn normal_form_examples() {
        let (step, same) = fixtures::path(4).step_and_normal_form().unwrap();
        assert_eq!(step, Distance::from_int(1));
        assert_eq!(same, fixtures::path(4));

        assert_eq!(fixtures::five_point().step_and_normal_form().unwrap_err(), Error::NotPathConnected { count: 3 });

        let line = MetricSpace::from_points(
            Coords::Rational([0, 1, 2, 3].iter().map(|&i| vec![Rational::new(i, 2)]).collect()),
            PointMetric::Euclidean,
        )
        .unwrap();
        let (step, scaled) = line.step_and_normal_form().unwrap();
        assert_eq!(step, Distance::from_rational(Rational::new(1, 2)));
        for i in 0..4u32 {
            assert_eq!(scaled.int_coords(p(i)).unwrap(), &[i as i64]);
            assert_eq!(scaled.d(p(0), p(i)), Distance::from_int(i as i64));
        }
    }

    #[test]
    fn products() {
        let p2 = fixtures::path(2);
        let sq = l1_product(&p2, &p2).unwrap();
        let want = [[0, 1, 1, 2], [1, 0, 2, 1], [1, 2, 0, 1], [2, 1, 1, 0]];
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(sq.d(p(a), p(b)), Distance::from_int(want[a as usize][b as usize]));
            }
        }
        assert!(sq.points().all(|x| sq.adjacent(x).len() == 2));
        let single = MetricSpace::from_graph(1, &[]).unwrap();
        let copy = l1_product(&fixtures::cycle(5), &single).unwrap();
        for a in copy.points() {
            for b in copy.points() {
                assert_eq!(copy.d(a, b), fixtures::cycle(5).d(a, b));
            }
        }
        let p3 = fixtures::path(3);
        let grid = l1_product(&p3, &p3).unwrap();
        assert_eq!(crate::homotopy::path_components(&grid).len(), 1);
        assert!(grid.is_graph_metric());
        let irr = fixtures::five_point();
        assert_eq!(l1_product(&irr, &p2).unwrap_err(), Error::Irrational);
    }

    #[test]
    fn chain_rules_agree_on_graphs() {
        let g = fixtures::cycle(6);
        for mask in 1u32..64 {
            let a: Vec<PointId> = (0..6).filter(|i| mask >> i & 1 == 1).map(p).collect();
            for k in 0..4 {
                assert_eq!(
                    g.discrete_k_neighborhood_with(&a, k, ChainRule::SetDistances).unwrap(),
                    g.discrete_k_neighborhood_with(&a, k, ChainRule::BaseDistances).unwrap()
                );
            }
        }
    }

    #[test]
    fn window_rim_and_interior() {
        let z = fixtures::z_window(5, 2);
        let w = z.window().unwrap();
        assert_eq!(w.rim.len(), 2);
        let interior: Vec<i64> = z.points().filter(|&q| z.is_interior(q)).map(|q| z.int_coords(q).unwrap()[0]).collect();
        assert_eq!(interior, vec![-3, -2, -1, 0, 1, 2, 3]);
    }
}
