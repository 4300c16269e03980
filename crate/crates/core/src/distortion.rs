use std::collections::BTreeSet;

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::distance::Distance;
use crate::error::{Error, Result};
use crate::homotopy::path_components;
use crate::space::{bfs, MetricSpace, PointId};

fn ser_distance<S: Serializer>(d: &Distance, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&d.to_string())
}

/// All continuous paths of minimal step count from x to y.
pub fn minimal_continuous_paths(space: &MetricSpace, x: PointId, y: PointId) -> Result<Vec<Vec<PointId>>> {
    space.check(x)?;
    space.check(y)?;
    let nb: Vec<Vec<usize>> = space.points().map(|p| space.adjacent(p).iter().map(|q| q.idx()).collect()).collect();
    let from_y = bfs(&nb, &[y.idx()]);
    if from_y[x.idx()] == u32::MAX {
        return Err(Error::DifferentComponents(x.0, y.0));
    }
    let mut out = Vec::new();
    let mut cur = vec![x];
    extend_paths(space, &from_y, y, &mut cur, &mut out, usize::MAX);
    Ok(out)
}

/// The lexicographically least minimal path.
pub fn first_minimal_path(space: &MetricSpace, x: PointId, y: PointId) -> Result<Vec<PointId>> {
    space.check(x)?;
    space.check(y)?;
    let nb: Vec<Vec<usize>> = space.points().map(|p| space.adjacent(p).iter().map(|q| q.idx()).collect()).collect();
    let from_y = bfs(&nb, &[y.idx()]);
    if from_y[x.idx()] == u32::MAX {
        return Err(Error::DifferentComponents(x.0, y.0));
    }
    let mut out = Vec::new();
    extend_paths(space, &from_y, y, &mut vec![x], &mut out, 1);
    Ok(out.pop().expect("connected"))
}

fn extend_paths(space: &MetricSpace, from_y: &[u32], y: PointId, cur: &mut Vec<PointId>, out: &mut Vec<Vec<PointId>>, cap: usize) {
    if out.len() >= cap {
        return;
    }
    let last = *cur.last().unwrap();
    if last == y {
        out.push(cur.clone());
        return;
    }
    let h = from_y[last.idx()];
    for &q in space.adjacent(last) {
        if from_y[q.idx()] + 1 == h {
            cur.push(q);
            extend_paths(space, from_y, y, cur, out, cap);
            cur.pop();
        }
    }
}

/// Coverings of {0..n} by s ordered parts, consecutive parts sharing exactly
/// their boundary index. Parts are returned as (min, max) index pairs.
pub fn coverings(n: usize, s: usize) -> Result<Vec<Vec<(usize, usize)>>> {
    if s == 0 {
        return Err(Error::Param("covering needs at least one part".into()));
    }
    let mut out = Vec::new();
    if s > n {
        return Ok(out);
    }
    let mut cuts = vec![0usize];
    fn go(n: usize, s: usize, cuts: &mut Vec<usize>, out: &mut Vec<Vec<(usize, usize)>>) {
        if cuts.len() == s {
            cuts.push(n);
            out.push(cuts.windows(2).map(|w| (w[0], w[1])).collect());
            cuts.pop();
            return;
        }
        let last = *cuts.last().unwrap();
        // leave room for the remaining parts
        let remaining = s - cuts.len();
        for c in last + 1..=n - remaining {
            cuts.push(c);
            go(n, s, cuts, out);
            cuts.pop();
        }
    }
    go(n, s, &mut cuts, &mut out);
    Ok(out)
}

/// Whether [a, b] is the i-th part of some covering of {0..n} by s parts.
fn segment_fits(n: usize, s: usize, a: usize, b: usize) -> bool {
    (1..=s).any(|i| {
        let before_ok = if i == 1 { a == 0 } else { a >= i - 1 };
        let after_ok = if i == s { b == n } else { n - b >= s - i };
        before_ok && after_ok
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgesMode {
    /// Every minimal path of every pair.
    #[default]
    All,
    /// One (lexicographically least) minimal path per pair.
    Single,
}

/// E(X) as unordered pairs (smaller id first), sorted.
pub fn edge_set(space: &MetricSpace, mode: EdgesMode) -> Result<Vec<(PointId, PointId)>> {
    let comps = path_components(space);
    if comps.len() > 1 {
        return Err(Error::NotPathConnected { count: comps.len() });
    }
    let (_, norm) = space.step_and_normal_form()?;
    let mut edges = BTreeSet::new();
    for x in norm.points() {
        for y in norm.points() {
            if x >= y {
                continue;
            }
            let s = norm.d(x, y).floor() as usize;
            let paths = match mode {
                EdgesMode::All => minimal_continuous_paths(&norm, x, y)?,
                EdgesMode::Single => vec![first_minimal_path(&norm, x, y)?],
            };
            for path in paths {
                let n = path.len() - 1;
                for a in 0..n {
                    for b in a + 1..=n {
                        if segment_fits(n, s, a, b) {
                            let (u, v) = (path[a], path[b]);
                            edges.insert((u.min(v), u.max(v)));
                        }
                    }
                }
            }
        }
    }
    Ok(edges.into_iter().collect())
}

/// d(X) = max over E(X) of the (normal-form) edge length.
pub fn metric_defect(space: &MetricSpace, edges: &[(PointId, PointId)]) -> Result<Distance> {
    let (_, norm) = space.step_and_normal_form()?;
    Ok(edges.iter().map(|&(a, b)| norm.d(a, b)).max().unwrap_or(Distance::ZERO))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectralGap {
    pub p: f64,
    pub value: f64,
    /// "eigen" (exact up to rounding) or "descent" (upper estimate).
    pub method: &'static str,
    pub restarts: usize,
    pub minimizer: Vec<f64>,
}

/// min over α of Σ|f(x) − α|^p, by convexity in α.
pub fn centered_norm(f: &[f64], p: f64) -> (f64, f64) {
    let cost = |a: f64| f.iter().map(|v| (v - a).abs().powf(p)).sum::<f64>();
    if (p - 2.0).abs() < 1e-15 {
        let a = f.iter().sum::<f64>() / f.len() as f64;
        return (cost(a), a);
    }
    let (mut lo, mut hi) = (f.iter().copied().fold(f64::INFINITY, f64::min), f.iter().copied().fold(f64::NEG_INFINITY, f64::max));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let m1 = hi - g * (hi - lo);
        let m2 = lo + g * (hi - lo);
        if cost(m1) <= cost(m2) {
            hi = m2;
        } else {
            lo = m1;
        }
    }
    let a = (lo + hi) / 2.0;
    (cost(a), a)
}

pub fn rayleigh_p(edges: &[(PointId, PointId)], f: &[f64], p: f64) -> f64 {
    let num: f64 = edges.iter().map(|&(a, b)| (f[a.idx()] - f[b.idx()]).abs().powf(p)).sum();
    num / centered_norm(f, p).0
}

/// λ₁^(p) of the edge set on n points.
pub fn spectral_gap_p(n: usize, edges: &[(PointId, PointId)], p: f64, seed: u64) -> Result<SpectralGap> {
    if n < 2 {
        return Err(Error::TooSmall);
    }
    if p < 1.0 || !p.is_finite() {
        return Err(Error::Param(format!("p = {p} must be finite and at least 1")));
    }
    let (l2, v2) = laplacian_gap(n, edges);
    if (p - 2.0).abs() < 1e-15 {
        return Ok(SpectralGap { p, value: l2, method: "eigen", restarts: 0, minimizer: v2 });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = descend(edges, v2, p);
    let restarts = 20;
    for _ in 0..restarts {
        let start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let cand = descend(edges, start, p);
        if cand.0 < best.0 {
            best = cand;
        }
    }
    Ok(SpectralGap { p, value: best.0, method: "descent", restarts, minimizer: best.1 })
}

fn laplacian_gap(n: usize, edges: &[(PointId, PointId)]) -> (f64, Vec<f64>) {
    let mut l = DMatrix::<f64>::zeros(n, n);
    for &(a, b) in edges {
        let (a, b) = (a.idx(), b.idx());
        l[(a, a)] += 1.0;
        l[(b, b)] += 1.0;
        l[(a, b)] -= 1.0;
        l[(b, a)] -= 1.0;
    }
    let eig = SymmetricEigen::new(l);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    // the constant vector carries the smallest eigenvalue 0
    let k = order[1];
    let v: Vec<f64> = eig.eigenvectors.column(k).iter().copied().collect();
    (eig.eigenvalues[k].max(0.0), v)
}

/// Normalized gradient descent with backtracking on the p-quotient.
fn descend(edges: &[(PointId, PointId)], mut f: Vec<f64>, p: f64) -> (f64, Vec<f64>) {
    let n = f.len();
    let spread = |f: &[f64]| f.iter().copied().fold(f64::NEG_INFINITY, f64::max) - f.iter().copied().fold(f64::INFINITY, f64::min);
    if spread(&f) < 1e-12 {
        f = (0..n).map(|i| i as f64).collect();
    }
    let mut val = rayleigh_p(edges, &f, p);
    let mut step = 0.1;
    for _ in 0..2000 {
        let (den, alpha) = centered_norm(&f, p);
        let num = val * den;
        let mut g = vec![0.0; n];
        for &(a, b) in edges {
            let d = f[a.idx()] - f[b.idx()];
            let t = p * d.abs().powf(p - 1.0) * d.signum();
            g[a.idx()] += t / den;
            g[b.idx()] -= t / den;
        }
        for x in 0..n {
            let d = f[x] - alpha;
            g[x] -= num / (den * den) * p * d.abs().powf(p - 1.0) * d.signum();
        }
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-12 {
            break;
        }
        let scale = spread(&f);
        let mut improved = false;
        while step > 1e-12 {
            let cand: Vec<f64> = f.iter().zip(&g).map(|(v, d)| v - step * scale * d / norm).collect();
            if spread(&cand) > 1e-9 {
                let cv = rayleigh_p(edges, &cand, p);
                if cv < val {
                    f = cand;
                    val = cv;
                    step *= 1.5;
                    improved = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if !improved {
            break;
        }
    }
    (val, f)
}

/// D(X) with a maximizing permutation, by bottleneck matching.
pub fn displacement(space: &MetricSpace) -> Result<(Distance, Vec<PointId>)> {
    let n = space.len();
    if n < 2 {
        return Err(Error::TooSmall);
    }
    let mut values: Vec<Distance> = Vec::new();
    for x in space.points() {
        for y in space.points() {
            values.push(space.d(x, y));
        }
    }
    values.sort_unstable();
    values.dedup();
    // values[0] = 0 always admits the identity
    let (mut lo, mut hi) = (0usize, values.len() - 1);
    let mut best = matching(space, values[0]).expect("identity");
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        match matching(space, values[mid]) {
            Some(m) => {
                lo = mid;
                best = m;
            }
            None => hi = mid - 1,
        }
    }
    Ok((values[lo], best))
}

/// Perfect matching x → α(x) with d(x, α(x)) ≥ t, by augmenting paths.
fn matching(space: &MetricSpace, t: Distance) -> Option<Vec<PointId>> {
    let n = space.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|x| (0..n).filter(|&y| space.d(PointId(x as u32), PointId(y as u32)) >= t).collect())
        .collect();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    fn augment(x: usize, adj: &[Vec<usize>], owner: &mut [Option<usize>], seen: &mut [bool]) -> bool {
        for &y in &adj[x] {
            if !seen[y] {
                seen[y] = true;
                if owner[y].is_none_or(|z| augment(z, adj, owner, seen)) {
                    owner[y] = Some(x);
                    return true;
                }
            }
        }
        false
    }
    for x in 0..n {
        let mut seen = vec![false; n];
        if !augment(x, &adj, &mut owner, &mut seen) {
            return None;
        }
    }
    let mut perm = vec![PointId(0); n];
    for (y, x) in owner.iter().enumerate() {
        perm[x.expect("perfect")] = PointId(y as u32);
    }
    Some(perm)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundReport {
    pub p: f64,
    pub points: usize,
    pub edges: usize,
    pub edge_list: Vec<(PointId, PointId)>,
    pub lambda: SpectralGap,
    #[serde(serialize_with = "ser_distance")]
    pub defect: Distance,
    #[serde(serialize_with = "ser_distance")]
    pub displacement: Distance,
    pub permutation: Vec<PointId>,
    pub bound: f64,
    /// λ came from descent, so the bound rests on an upper estimate of λ.
    pub heuristic_lambda: bool,
    #[serde(serialize_with = "ser_distance")]
    pub step: Distance,
}

impl BoundReport {
    pub fn recompute(&self) -> f64 {
        assemble(self.displacement.to_f64(), self.defect.to_f64(), self.points, self.edges, self.lambda.value, self.p)
    }
}

fn assemble(big_d: f64, small_d: f64, points: usize, edges: usize, lambda: f64, p: f64) -> f64 {
    big_d / (2.0 * small_d) * (points as f64 / (edges as f64 * lambda)).powf(1.0 / p)
}

/// c_p(X) ≥ D/(2d) · (|X| / (|E| λ₁^(p)))^{1/p} for a path-connected space,
/// computed after rescaling to normal form.
pub fn distortion_lower_bound(space: &MetricSpace, p: f64, mode: EdgesMode) -> Result<BoundReport> {
    if space.len() < 2 {
        return Err(Error::TooSmall);
    }
    let (step, norm) = space.step_and_normal_form()?;
    let edge_list = edge_set(&norm, mode)?;
    let defect = metric_defect(&norm, &edge_list)?;
    let lambda = spectral_gap_p(norm.len(), &edge_list, p, 0)?;
    let (displacement, permutation) = displacement(&norm)?;
    let bound = assemble(displacement.to_f64(), defect.to_f64(), norm.len(), edge_list.len(), lambda.value, p);
    Ok(BoundReport {
        p,
        points: norm.len(),
        edges: edge_list.len(),
        heuristic_lambda: lambda.method != "eigen",
        edge_list,
        lambda,
        defect,
        displacement,
        permutation,
        bound,
        step,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentBound {
    pub points: Vec<PointId>,
    /// `None` for single-point components, which are skipped.
    pub report: Option<BoundReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentsReport {
    pub bound: f64,
    pub components: Vec<ComponentBound>,
}

/// Supremum of the per-component bounds.
pub fn distortion_lower_bound_components(space: &MetricSpace, p: f64, mode: EdgesMode) -> Result<ComponentsReport> {
    let mut components = Vec::new();
    let mut bound = 0.0f64;
    for comp in path_components(space) {
        let report = if comp.len() < 2 {
            None
        } else {
            let sub = space.subspace(&comp);
            let r = distortion_lower_bound(&sub, p, mode)?;
            bound = bound.max(r.bound);
            Some(r)
        };
        components.push(ComponentBound { points: comp, report });
    }
    Ok(ComponentsReport { bound, components })
}

/// Distortion ‖F‖_Lip·‖F⁻¹‖_Lip of an explicit embedding into ℓ_p^m.
pub fn embedding_distortion(space: &MetricSpace, emb: &[Vec<f64>], p: f64) -> f64 {
    let (mut expand, mut contract) = (0.0f64, 0.0f64);
    for x in space.points() {
        for y in space.points() {
            if x < y {
                let dp: f64 = emb[x.idx()].iter().zip(&emb[y.idx()]).map(|(a, b)| (a - b).abs().powf(p)).sum::<f64>().powf(1.0 / p);
                let d = space.d(x, y).to_f64();
                expand = expand.max(dp / d);
                contract = contract.max(d / dp);
            }
        }
    }
    expand * contract
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::{ids, Coords, PointMetric};
    use proptest::prelude::{prop_assert, proptest};
    use std::f64::consts::PI;

    #[test]
    fn path_enumeration() {
        let c4 = fixtures::cycle(4);
        assert_eq!(minimal_continuous_paths(&c4, PointId(0), PointId(1)).unwrap(), vec![ids(&[0, 1])]);
        assert_eq!(minimal_continuous_paths(&c4, PointId(0), PointId(2)).unwrap().len(), 2);
        let ring = fixtures::ring8();
        let (a, b) = (ring.find_int(&[1, 0]).unwrap(), ring.find_int(&[-1, 0]).unwrap());
        let paths = minimal_continuous_paths(&ring, a, b).unwrap();
        assert_eq!(paths.len(), 2);
        assert!(paths.iter().all(|p| p.len() == 5));
        let five = fixtures::five_point();
        assert!(matches!(minimal_continuous_paths(&five, PointId(0), PointId(3)), Err(Error::DifferentComponents(0, 3))));
    }

    #[test]
    fn covering_examples() {
        assert_eq!(coverings(3, 2).unwrap(), vec![vec![(0, 1), (1, 3)], vec![(0, 2), (2, 3)]]);
        assert_eq!(coverings(4, 4).unwrap(), vec![vec![(0, 1), (1, 2), (2, 3), (3, 4)]]);
        assert_eq!(coverings(5, 3).unwrap().len(), 6);
        for n in 1..8 {
            for s in 1..=n {
                let parts: BTreeSet<(usize, usize)> = coverings(n, s).unwrap().into_iter().flatten().collect();
                for a in 0..n {
                    for b in a + 1..=n {
                        assert_eq!(parts.contains(&(a, b)), segment_fits(n, s, a, b), "n={n} s={s} [{a},{b}]");
                    }
                }
            }
        }
    }

    #[test]
    fn graph_edge_sets_are_the_edges() {
        for seed in 0..15 {
            let g = fixtures::random_connected_graph(9, 5, seed);
            let crate::space::Origin::Graph(want) = g.origin().clone() else { unreachable!() };
            let got: Vec<(u32, u32)> = edge_set(&g, EdgesMode::All).unwrap().iter().map(|(a, b)| (a.0, b.0)).collect();
            assert_eq!(got, want);
            assert_eq!(metric_defect(&g, &edge_set(&g, EdgesMode::All).unwrap()).unwrap(), Distance::from_int(1));
        }
        let two = fixtures::path(2);
        assert_eq!(edge_set(&two, EdgesMode::All).unwrap(), vec![(PointId(0), PointId(1))]);
    }

    /// Shortest-path metric of the mutual-adjacency graph equals the metric.
    fn is_own_graph(space: &MetricSpace) -> bool {
        let (_, norm) = space.step_and_normal_form().unwrap();
        let nb: Vec<Vec<usize>> = norm.points().map(|p| norm.adjacent(p).iter().map(|q| q.idx()).collect()).collect();
        norm.points().all(|x| {
            let h = bfs(&nb, &[x.idx()]);
            norm.points().all(|y| Distance::from_int(h[y.idx()] as i64) == norm.d(x, y))
        })
    }

    #[test]
    fn defect_one_iff_graph() {
        let spaces = [
            fixtures::ring8(),
            fixtures::cycle(5),
            fixtures::path(4),
            fixtures::square_q(),
            fixtures::grid_window(1, PointMetric::Euclidean, false),
            fixtures::grid_window(1, PointMetric::L1, false),
            fixtures::parallel_segments(3),
        ];
        for s in spaces {
            let e = edge_set(&s, EdgesMode::All).unwrap();
            let one = metric_defect(&s, &e).unwrap() == Distance::from_int(1);
            assert_eq!(one, is_own_graph(&s));
        }
        let ring = fixtures::ring8();
        assert!(metric_defect(&ring, &edge_set(&ring, EdgesMode::All).unwrap()).unwrap() > Distance::from_int(1));
    }

    #[test]
    fn ring_edge_set_by_re_enumeration() {
        // independent pass: every covering of every minimal path, via `coverings`
        let ring = fixtures::ring8();
        let mut want = BTreeSet::new();
        for x in ring.points() {
            for y in ring.points() {
                if x == y {
                    continue;
                }
                let s = ring.d(x, y).floor() as usize;
                for path in minimal_continuous_paths(&ring, x, y).unwrap() {
                    for cov in coverings(path.len() - 1, s).unwrap() {
                        for (a, b) in cov {
                            let (u, v) = (path[a], path[b]);
                            want.insert((u.min(v), u.max(v)));
                        }
                    }
                }
            }
        }
        assert_eq!(edge_set(&ring, EdgesMode::All).unwrap(), want.into_iter().collect::<Vec<_>>());
        assert!(edge_set(&ring, EdgesMode::Single).unwrap().len() <= edge_set(&ring, EdgesMode::All).unwrap().len());
    }

    #[test]
    fn cycle_and_complete_gaps() {
        for n in 3..10u32 {
            let c = fixtures::cycle(n);
            let e = edge_set(&c, EdgesMode::All).unwrap();
            let g = spectral_gap_p(c.len(), &e, 2.0, 0).unwrap();
            assert!((g.value - (2.0 - 2.0 * (2.0 * PI / n as f64).cos())).abs() < 1e-9);
            assert!((rayleigh_p(&e, &g.minimizer, 2.0) - g.value).abs() < 1e-10);
            let k = fixtures::complete(n);
            let e = edge_set(&k, EdgesMode::All).unwrap();
            assert!((spectral_gap_p(k.len(), &e, 2.0, 0).unwrap().value - n as f64).abs() < 1e-9);
        }
    }

    #[test]
    fn two_point_gap() {
        let e = vec![(PointId(0), PointId(1))];
        for p in [1.0, 1.5, 2.0, 3.0] {
            let g = spectral_gap_p(2, &e, p, 0).unwrap();
            assert!((g.value - 2f64.powf(p - 1.0)).abs() < 1e-6, "p={p}: {}", g.value);
        }
        assert_eq!(spectral_gap_p(1, &[], 2.0, 0), Err(Error::TooSmall));
    }

    #[test]
    fn descent_matches_grid_search_on_tiny_spaces() {
        // quantized f on {0, 1/4, …, 1}^4 over C4 edges
        let e = edge_set(&fixtures::cycle(4), EdgesMode::All).unwrap();
        for p in [1.5, 3.0] {
            let g = spectral_gap_p(4, &e, p, 0).unwrap();
            let mut best = f64::INFINITY;
            for code in 0..5usize.pow(4) {
                let f: Vec<f64> = (0..4).map(|i| (code / 5usize.pow(i) % 5) as f64 / 4.0).collect();
                if f.iter().any(|&v| v != f[0]) {
                    best = best.min(rayleigh_p(&e, &f, p));
                }
            }
            assert!(g.value <= best + 1e-9, "p={p}: {} vs {best}", g.value);
        }
    }

    fn brute_displacement(space: &MetricSpace) -> Distance {
        let n = space.len();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut best = Distance::ZERO;
        fn go(k: usize, perm: &mut Vec<usize>, space: &MetricSpace, best: &mut Distance) {
            if k == perm.len() {
                let m = (0..perm.len()).map(|x| space.d(PointId(x as u32), PointId(perm[x] as u32))).min().unwrap();
                *best = (*best).max(m);
                return;
            }
            for i in k..perm.len() {
                perm.swap(k, i);
                go(k + 1, perm, space, best);
                perm.swap(k, i);
            }
        }
        go(0, &mut perm, space, &mut best);
        best
    }

    #[test]
    fn displacement_matches_brute_force() {
        for n in 3..=8u32 {
            let c = fixtures::cycle(n);
            let (d, perm) = displacement(&c).unwrap();
            assert_eq!(d, Distance::from_int((n / 2) as i64));
            assert_eq!(d, brute_displacement(&c));
            assert!(c.points().all(|x| c.d(x, perm[x.idx()]) >= d));
        }
        let five = fixtures::five_point();
        assert_eq!(displacement(&five).unwrap().0, brute_displacement(&five));
        assert_eq!(displacement(&fixtures::path(2)).unwrap().0, Distance::from_int(1));
    }

    #[test]
    fn c4_and_c6_bounds() {
        let c4 = fixtures::cycle(4);
        let r = distortion_lower_bound(&c4, 2.0, EdgesMode::All).unwrap();
        assert_eq!((r.points, r.edges), (4, 4));
        assert!((r.bound - 2f64.sqrt() / 2.0).abs() < 1e-12);
        assert!((r.recompute() - r.bound).abs() < 1e-15);
        let square = vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]];
        let emb = embedding_distortion(&c4, &square, 2.0);
        assert!((emb - 2f64.sqrt()).abs() < 1e-12 && r.bound <= emb);

        let c6 = fixtures::cycle(6);
        let r = distortion_lower_bound(&c6, 2.0, EdgesMode::All).unwrap();
        assert!((r.bound - 1.5).abs() < 1e-9);
        let hexagon: Vec<Vec<f64>> = (0..6).map(|i| {
            let t = PI / 3.0 * i as f64;
            vec![t.cos(), t.sin()]
        }).collect();
        assert!(r.bound <= embedding_distortion(&c6, &hexagon, 2.0) + 1e-12);
    }

    #[test]
    fn two_point_bound() {
        let two = MetricSpace::from_points(Coords::Integer(vec![vec![0], vec![3]]), PointMetric::Euclidean).unwrap();
        let r = distortion_lower_bound(&two, 2.0, EdgesMode::All).unwrap();
        assert_eq!(r.step, Distance::from_int(3));
        assert!((r.lambda.value - 2.0).abs() < 1e-12);
        assert!((r.bound - 0.5).abs() < 1e-12);
    }

    #[test]
    fn components_take_the_sup() {
        // C4 ⊔ C6 placed far apart in the plane (Euclidean, unit steps)
        let mut pts = vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 1]];
        pts.extend([[10, 0], [11, 0], [12, 0], [12, 1], [11, 1], [10, 1]].iter().map(|p| p.to_vec()));
        let s = MetricSpace::from_points(Coords::Integer(pts), PointMetric::L1).unwrap();
        let rep = distortion_lower_bound_components(&s, 2.0, EdgesMode::All).unwrap();
        assert_eq!(rep.components.len(), 2);
        // the 2×3 block is a 6-cycle plus a chord, so its own bound applies
        assert!(rep.bound >= 2f64.sqrt() / 2.0 - 1e-12);

        let five = fixtures::five_point();
        let rep = distortion_lower_bound_components(&five, 2.0, EdgesMode::All).unwrap();
        assert_eq!(rep.components.iter().filter(|c| c.report.is_none()).count(), 2);
        let single = distortion_lower_bound(&fixtures::cycle(5), 2.0, EdgesMode::All).unwrap().bound;
        let comp = distortion_lower_bound_components(&fixtures::cycle(5), 2.0, EdgesMode::All).unwrap().bound;
        assert_eq!(single, comp);
    }

    #[test]
    fn c4_disjoint_c6_graph() {
        let mut edges: Vec<(u32, u32)> = (0..4).map(|i| (i, (i + 1) % 4)).collect();
        let s4 = MetricSpace::from_graph(4, &edges).unwrap();
        edges.clear();
        let s6 = fixtures::cycle(6);
        let b4 = distortion_lower_bound(&s4, 2.0, EdgesMode::All).unwrap().bound;
        let b6 = distortion_lower_bound(&s6, 2.0, EdgesMode::All).unwrap().bound;
        assert!((b4.max(b6) - 1.5).abs() < 1e-9);
    }

    proptest! {
        #[test]
        fn linial_magen_chain(seed in 0u64..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let spaces = [fixtures::ring8(), fixtures::cycle(7), fixtures::grid_window(1, PointMetric::Euclidean, false)];
            for s in &spaces {
                let e = edge_set(s, EdgesMode::All).unwrap();
                let dx = metric_defect(s, &e).unwrap().to_f64();
                let f: Vec<f64> = s.points().map(|_| rng.gen_range(-5i32..=5) as f64).collect();
                let mut ratio = 0.0f64;
                for x in s.points() {
                    for y in s.points() {
                        if x != y {
                            ratio = ratio.max((f[x.idx()] - f[y.idx()]).abs() / s.d(x, y).to_f64());
                        }
                    }
                }
                let edge_max = e.iter().map(|&(a, b)| (f[a.idx()] - f[b.idx()]).abs()).fold(0.0, f64::max);
                prop_assert!(ratio <= edge_max + 1e-12);
                prop_assert!(edge_max <= dx * ratio + 1e-12);
            }
        }

        #[test]
        fn permutation_inequality(seed in 0u64..200, p in 1.0f64..4.0) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 7;
            let f: Vec<Vec<f64>> = (0..n).map(|_| (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect()).collect();
            let mut perm: Vec<usize> = (0..n).collect();
            use rand::seq::SliceRandom;
            perm.shuffle(&mut rng);
            let norm = |v: &[f64]| v.iter().map(|a| a.abs().powf(p)).sum::<f64>();
            let lhs: f64 = (0..n).map(|x| {
                let d: Vec<f64> = f[x].iter().zip(&f[perm[x]]).map(|(a, b)| a - b).collect();
                norm(&d)
            }).sum();
            let rhs: f64 = 2f64.powf(p) * (0..n).map(|x| norm(&f[x])).sum::<f64>();
            prop_assert!(lhs <= rhs + 1e-9);
        }

        #[test]
        fn no_random_f_beats_the_eigenvalue(seed in 0u64..100) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g = fixtures::random_connected_graph(8, 4, seed);
            let e = edge_set(&g, EdgesMode::All).unwrap();
            let gap = spectral_gap_p(g.len(), &e, 2.0, 0).unwrap().value;
            for _ in 0..20 {
                let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
                prop_assert!(rayleigh_p(&e, &f, 2.0) >= gap - 1e-9);
            }
        }
    }
}
