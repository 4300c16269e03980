use std::cmp::Ordering;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};

use crate::distance::{fmt_rational, Distance, Rational};
use crate::error::{Error, Result};
use crate::npp::is_graph_type;
use crate::space::{ChainRule, MetricSpace, PointId};

pub(crate) fn ser_rational<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(*r))
}

fn ser_opt_rational<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
    match r {
        Some(r) => s.serialize_str(&fmt_rational(*r)),
        None => s.serialize_none(),
    }
}

fn ser_rationals<S: Serializer>(v: &[Option<Rational>], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for r in v {
        seq.serialize_element(&r.map(fmt_rational))?;
    }
    seq.end()
}

/// Which subsets A enter the infimum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoPolicy {
    /// Largest |A|; `None` means |X|/2 for plain spaces and the whole interior for windows.
    pub max_size: Option<usize>,
    /// For windows, only subsets of the safe interior.
    pub interior_only: bool,
    /// Exhaustive enumeration is used when the family has at most this many members.
    pub exhaustive_budget: u64,
    /// Seeds and sample count of the heuristic family.
    pub samples: usize,
    pub seed: u64,
}

impl Default for IsoPolicy {
    fn default() -> Self {
        IsoPolicy { max_size: None, interior_only: true, exhaustive_budget: 1 << 24, samples: 200, seed: 0 }
    }
}

impl IsoPolicy {
    /// Every non-empty subset, X included.
    pub fn everything() -> IsoPolicy {
        IsoPolicy { max_size: Some(usize::MAX), interior_only: false, ..Default::default() }
    }

    pub fn with_max_size(mut self, m: usize) -> IsoPolicy {
        self.max_size = Some(m);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Family {
    pub candidates: Vec<PointId>,
    pub max_size: usize,
    pub interior_only: bool,
}

impl Family {
    pub fn resolve(space: &MetricSpace, policy: &IsoPolicy) -> Result<Family> {
        let windowed = space.window().is_some() && policy.interior_only;
        let candidates: Vec<PointId> =
            if windowed { space.points().filter(|&x| space.is_interior(x)).collect() } else { space.points().collect() };
        let default = if windowed { candidates.len() } else { (space.len() / 2).max(1) };
        let max_size = policy.max_size.unwrap_or(default).min(candidates.len());
        if max_size == 0 {
            return Err(Error::EmptyFamily);
        }
        Ok(Family { candidates, max_size, interior_only: windowed })
    }

    /// Number of members, saturating.
    pub fn count(&self) -> u64 {
        let c = self.candidates.len() as u64;
        let mut total: u64 = 0;
        let mut binom: u64 = 1;
        for s in 1..=self.max_size as u64 {
            binom = match binom.checked_mul(c - s + 1) {
                Some(v) => v / s,
                None => return u64::MAX,
            };
            total = total.saturating_add(binom);
        }
        total
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IsoReport {
    pub k: usize,
    #[serde(serialize_with = "ser_rational")]
    pub value: Rational,
    pub boundary: usize,
    pub witness: Vec<PointId>,
    pub exhaustive: bool,
    pub evaluated: u64,
    pub family: FamilyEcho,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FamilyEcho {
    pub candidates: usize,
    pub max_size: usize,
    pub interior_only: bool,
}

impl From<&Family> for FamilyEcho {
    fn from(f: &Family) -> Self {
        FamilyEcho { candidates: f.candidates.len(), max_size: f.max_size, interior_only: f.interior_only }
    }
}

/// Best (|B|, |A|, A) seen so far, ordered by ratio then lexicographically.
struct Best {
    b: usize,
    a: usize,
    set: Vec<PointId>,
}

impl Best {
    fn offer(best: &mut Option<Best>, b: usize, set: &[PointId]) {
        let a = set.len();
        let better = match best {
            None => true,
            Some(cur) => match (b * cur.a).cmp(&(cur.b * a)) {
                Ordering::Less => true,
                Ordering::Greater => false,
                Ordering::Equal => set < cur.set.as_slice(),
            },
        };
        if better {
            *best = Some(Best { b, a, set: set.to_vec() });
        }
    }
}

/// |dB_k(A)| evaluation, with a bitmask path for small graph metrics.
struct Boundary<'a> {
    space: &'a MetricSpace,
    k: usize,
    balls: Option<Vec<u64>>,
    marks: Vec<bool>,
}

impl<'a> Boundary<'a> {
    fn new(space: &'a MetricSpace, k: usize) -> Self {
        let balls = (space.len() <= 64 && space.is_graph_metric()).then(|| {
            space
                .points()
                .map(|x| space.distance_levels(x).ball(k).fold(0u64, |m, y| m | 1u64 << y.0))
                .collect()
        });
        Boundary { space, k, balls, marks: vec![false; space.len()] }
    }

    fn size(&mut self, a: &[PointId]) -> usize {
        if let Some(balls) = &self.balls {
            let (mut inside, mut nb) = (0u64, 0u64);
            for x in a {
                inside |= 1u64 << x.0;
                nb |= balls[x.idx()];
            }
            return (nb & !inside).count_ones() as usize;
        }
        self.space.mark_neighborhood(a, self.k, ChainRule::SetDistances, &mut self.marks);
        let total = self.marks.iter().filter(|&&m| m).count();
        total - a.len()
    }
}

/// ι_k over the policy's family, exhaustive when affordable.
pub fn iota_k(space: &MetricSpace, k: usize, policy: &IsoPolicy) -> Result<IsoReport> {
    if k == 0 {
        return Err(Error::Param("k must be at least 1".into()));
    }
    let family = Family::resolve(space, policy)?;
    let mut eval = Boundary::new(space, k);
    let mut best: Option<Best> = None;
    let exhaustive = family.count() <= policy.exhaustive_budget;
    let mut evaluated = 0u64;
    if exhaustive {
        if let Some(balls) = eval.balls.clone() {
            enumerate_bits(&family, &balls, &mut best, &mut evaluated);
        } else {
            let mut stack = Vec::new();
            enumerate_sets(&family, 0, &mut stack, &mut |a| {
                evaluated += 1;
                let b = eval.size(a);
                Best::offer(&mut best, b, a);
            });
        }
    } else {
        for a in heuristic_family(space, &family, policy) {
            evaluated += 1;
            let b = eval.size(&a);
            Best::offer(&mut best, b, &a);
        }
    }
    let best = best.ok_or(Error::EmptyFamily)?;
    Ok(IsoReport {
        k,
        value: Rational::new(best.b as i64, best.a as i64),
        boundary: best.b,
        witness: best.set,
        exhaustive,
        evaluated,
        family: (&family).into(),
    })
}

fn enumerate_sets(family: &Family, from: usize, stack: &mut Vec<PointId>, f: &mut dyn FnMut(&[PointId])) {
    for i in from..family.candidates.len() {
        stack.push(family.candidates[i]);
        f(stack);
        if stack.len() < family.max_size {
            enumerate_sets(family, i + 1, stack, f);
        }
        stack.pop();
    }
}

fn enumerate_bits(family: &Family, balls: &[u64], best: &mut Option<Best>, evaluated: &mut u64) {
    fn go(
        family: &Family,
        balls: &[u64],
        from: usize,
        inside: u64,
        nb: u64,
        stack: &mut Vec<PointId>,
        best: &mut Option<Best>,
        evaluated: &mut u64,
    ) {
        for i in from..family.candidates.len() {
            let x = family.candidates[i];
            let (inside, nb) = (inside | 1u64 << x.0, nb | balls[x.idx()]);
            stack.push(x);
            *evaluated += 1;
            let b = (nb & !inside).count_ones() as usize;
            // cheap reject before the lexicographic comparison
            let keep = match best {
                None => true,
                Some(cur) => b * cur.a <= cur.b * stack.len(),
            };
            if keep {
                Best::offer(best, b, stack);
            }
            if stack.len() < family.max_size {
                go(family, balls, i + 1, inside, nb, stack, best, evaluated);
            }
            stack.pop();
        }
    }
    let mut stack = Vec::new();
    go(family, balls, 0, 0, 0, &mut stack, best, evaluated);
}

/// Nested neighbourhoods, coordinate boxes and random connected subsets,
/// all restricted to the family.
fn heuristic_family(space: &MetricSpace, family: &Family, policy: &IsoPolicy) -> Vec<Vec<PointId>> {
    let mut allowed = vec![false; space.len()];
    for c in &family.candidates {
        allowed[c.idx()] = true;
    }
    let fits = |a: &[PointId]| !a.is_empty() && a.len() <= family.max_size && a.iter().all(|p| allowed[p.idx()]);
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut out: Vec<Vec<PointId>> = Vec::new();

    let mut centers = family.candidates.clone();
    if centers.len() > policy.samples {
        centers.shuffle(&mut rng);
        centers.truncate(policy.samples);
        centers.sort_unstable();
    }
    for &x in &centers {
        let lv = space.distance_levels(x);
        for n in 0..lv.len() {
            let mut a: Vec<PointId> = lv.ball(n).collect();
            a.sort_unstable();
            if !fits(&a) {
                break;
            }
            out.push(a);
        }
    }

    if let Some(boxes) = coordinate_boxes(space, family) {
        out.extend(boxes.into_iter().filter(|a| fits(a)));
    }

    for _ in 0..policy.samples {
        let target = rng.gen_range(1..=family.max_size);
        let start = family.candidates[rng.gen_range(0..family.candidates.len())];
        let mut inside = vec![false; space.len()];
        inside[start.idx()] = true;
        let mut a = vec![start];
        let mut frontier: Vec<PointId> = Vec::new();
        let push_nb = |p: PointId, inside: &[bool], frontier: &mut Vec<PointId>| {
            for &q in space.adjacent(p) {
                if allowed[q.idx()] && !inside[q.idx()] {
                    frontier.push(q);
                }
            }
        };
        push_nb(start, &inside, &mut frontier);
        while a.len() < target && !frontier.is_empty() {
            let q = frontier.swap_remove(rng.gen_range(0..frontier.len()));
            if inside[q.idx()] {
                continue;
            }
            inside[q.idx()] = true;
            a.push(q);
            push_nb(q, &inside, &mut frontier);
        }
        a.sort_unstable();
        out.push(a);
    }
    out
}

/// Axis-aligned boxes of every shape, anchored once near the middle of the
/// candidates' bounding box (integer coordinates, dimension 1 or 2).
fn coordinate_boxes(space: &MetricSpace, family: &Family) -> Option<Vec<Vec<PointId>>> {
    let coords: Vec<&[i64]> = family.candidates.iter().map(|&p| space.int_coords(p)).collect::<Option<_>>()?;
    let dim = coords.first()?.len();
    if dim == 0 || dim > 2 {
        return None;
    }
    let lo: Vec<i64> = (0..dim).map(|d| coords.iter().map(|c| c[d]).min().unwrap()).collect();
    let hi: Vec<i64> = (0..dim).map(|d| coords.iter().map(|c| c[d]).max().unwrap()).collect();
    let mut grid = std::collections::HashMap::new();
    for (&p, c) in family.candidates.iter().zip(&coords) {
        grid.insert(c.to_vec(), p);
    }
    let mut out = Vec::new();
    let span = |d: usize| (hi[d] - lo[d] + 1) as usize;
    let (w0, w1) = (span(0), if dim == 2 { span(1) } else { 1 });
    for s0 in 1..=w0 {
        for s1 in 1..=w1 {
            if s0 * s1 > family.max_size {
                continue;
            }
            let a0 = lo[0] + ((w0 - s0) / 2) as i64;
            let a1 = if dim == 2 { lo[1] + ((w1 - s1) / 2) as i64 } else { 0 };
            let mut set = Vec::with_capacity(s0 * s1);
            let mut ok = true;
            'fill: for i in 0..s0 as i64 {
                for j in 0..s1 as i64 {
                    let key = if dim == 2 { vec![a0 + i, a1 + j] } else { vec![a0 + i] };
                    match grid.get(&key) {
                        Some(&p) => set.push(p),
                        None => {
                            ok = false;
                            break 'fill;
                        }
                    }
                }
            }
            if ok {
                set.sort_unstable();
                out.push(set);
            }
        }
    }
    Some(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IotaGlobal {
    pub per_k: Vec<IsoReport>,
    /// Supremum over the enumerated k only.
    #[serde(serialize_with = "ser_rational")]
    pub sup: Rational,
    pub kmax: usize,
}

pub fn iota_global(space: &MetricSpace, kmax: usize, policy: &IsoPolicy) -> Result<IotaGlobal> {
    if kmax == 0 {
        return Err(Error::Param("kmax must be at least 1".into()));
    }
    let per_k: Vec<IsoReport> = (1..=kmax).map(|k| iota_k(space, k, policy)).collect::<Result<_>>()?;
    let sup = per_k.iter().map(|r| r.value).max().expect("kmax >= 1");
    Ok(IotaGlobal { per_k, sup, kmax })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DoublingReport {
    pub k: usize,
    pub holds: bool,
    /// First A in enumeration order with |cN_k(A)| < 2|A|.
    pub witness: Option<Vec<PointId>>,
    pub exhaustive: bool,
}

/// |cN_k(A)| ≥ 2|A| over the policy's family.
pub fn doubling_check(space: &MetricSpace, k: usize, policy: &IsoPolicy) -> Result<DoublingReport> {
    let family = Family::resolve(space, policy)?;
    let radius = Distance::from_int(k as i64);
    let exhaustive = family.count() <= policy.exhaustive_budget;
    let mut witness = None;
    let mut test = |a: &[PointId]| {
        if witness.is_none() {
            let near = space.points().filter(|&y| space.dist_to_set(a, y) <= radius).count();
            if near < 2 * a.len() {
                witness = Some(a.to_vec());
            }
        }
    };
    if exhaustive {
        let mut stack = Vec::new();
        enumerate_sets(&family, 0, &mut stack, &mut |a| test(a));
    } else {
        for a in heuristic_family(space, &family, policy) {
            test(&a);
        }
    }
    Ok(DoublingReport { k, holds: witness.is_none(), witness, exhaustive })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SnVerdict {
    SnEvidence,
    NotSnEvidence,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SnReport {
    pub verdict: SnVerdict,
    #[serde(serialize_with = "ser_rational")]
    pub threshold: Rational,
    pub per_k: Vec<IsoReport>,
}

/// Evidence for property SN on a finite window: every k ≤ kmax has a witness
/// with ratio below `threshold`, or some k has an exhaustively certified
/// infimum at or above it.
pub fn property_sn(space: &MetricSpace, kmax: usize, threshold: Rational, policy: &IsoPolicy) -> Result<SnReport> {
    let g = iota_global(space, kmax, policy)?;
    let verdict = if g.per_k.iter().any(|r| r.exhaustive && r.value >= threshold) {
        SnVerdict::NotSnEvidence
    } else if g.per_k.iter().all(|r| r.value < threshold) {
        SnVerdict::SnEvidence
    } else {
        SnVerdict::Inconclusive
    };
    Ok(SnReport { verdict, threshold, per_k: g.per_k })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ZoomPolicy {
    pub kmax: usize,
    pub nmax: usize,
}

impl Default for ZoomPolicy {
    fn default() -> Self {
        ZoomPolicy { kmax: 1, nmax: 64 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZoomEntry {
    pub n: usize,
    /// |dN_{nk}(x)|
    pub outer: usize,
    /// |dN_{(n−1)k}(x)|
    pub inner: usize,
    #[serde(serialize_with = "ser_rational")]
    pub ratio: Rational,
    pub contaminated: bool,
    pub saturated: bool,
}

impl ZoomEntry {
    pub fn usable(&self) -> bool {
        !self.contaminated && !self.saturated
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZoomReport {
    pub x: PointId,
    pub policy: ZoomPolicy,
    /// table[k-1] lists the entries n = 1, 2, … for that k.
    pub table: Vec<Vec<ZoomEntry>>,
    #[serde(serialize_with = "ser_rationals")]
    pub zeta_k: Vec<Option<Rational>>,
    #[serde(serialize_with = "ser_rational")]
    pub zeta: Rational,
    /// ζ_k is non-decreasing in k over the enumerated range.
    pub monotone_in_k: bool,
}

/// ζ_k(x) = min over usable n of |dN_{nk}(x)| / |dN_{(n−1)k}(x)|, and ζ(x) = max over k.
/// An entry is unusable when it reaches the window rim or when the inner
/// neighbourhood is already the whole space.
pub fn zoom_constants(space: &MetricSpace, x: PointId, policy: ZoomPolicy) -> Result<ZoomReport> {
    space.check(x)?;
    if policy.kmax == 0 || policy.nmax == 0 {
        return Err(Error::Param("kmax and nmax must be positive".into()));
    }
    let lv = space.distance_levels(x);
    let hops = space.rim_hops();
    let windowed = space.window().is_some();
    // cumulative sizes and contamination of the first m+1 levels
    let mut size = Vec::with_capacity(lv.len());
    let mut dirty = Vec::with_capacity(lv.len());
    let (mut s, mut d) = (0usize, false);
    for level in &lv.members {
        s += level.len();
        d |= windowed && level.iter().any(|p| hops[p.idx()] == 0);
        size.push(s);
        dirty.push(d);
    }
    let at = |m: usize| size[m.min(size.len() - 1)];
    let dirty_at = |m: usize| dirty[m.min(dirty.len() - 1)];
    let mut table = Vec::new();
    let mut zeta_k = Vec::new();
    for k in 1..=policy.kmax {
        let mut row = Vec::new();
        for n in 1..=policy.nmax {
            let (outer, inner) = (at(n * k), at((n - 1) * k));
            let entry = ZoomEntry {
                n,
                outer,
                inner,
                ratio: Rational::new(outer as i64, inner as i64),
                contaminated: dirty_at(n * k),
                saturated: inner == space.len(),
            };
            let stop = entry.saturated || entry.contaminated;
            row.push(entry);
            if stop {
                break;
            }
        }
        zeta_k.push(row.iter().filter(|e| e.usable()).map(|e| e.ratio).min());
        table.push(row);
    }
    let zeta = zeta_k.iter().flatten().max().copied().ok_or(Error::NoUncontaminated(x.0))?;
    let vals: Vec<Rational> = zeta_k.iter().flatten().copied().collect();
    let monotone_in_k = vals.windows(2).all(|w| w[0] <= w[1]);
    Ok(ZoomReport { x, policy, table, zeta_k, zeta, monotone_in_k })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ZoomExtremes {
    #[serde(serialize_with = "ser_rational")]
    pub zeta_plus: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub zeta_minus: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub lambda: Rational,
    pub argmax: PointId,
    pub argmin: PointId,
    pub per_point: Vec<PointZeta>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointZeta {
    pub x: PointId,
    #[serde(serialize_with = "ser_opt_rational")]
    pub zeta: Option<Rational>,
}

/// ζ⁺, ζ⁻ and λ = ζ⁺ − ζ⁻ over interior points with at least one usable entry.
pub fn zoom_extremes(space: &MetricSpace, policy: ZoomPolicy) -> Result<ZoomExtremes> {
    let mut per_point = Vec::new();
    let mut best: Option<(Rational, PointId, Rational, PointId)> = None;
    for x in space.points() {
        let z = if space.is_interior(x) { zoom_constants(space, x, policy).ok().map(|r| r.zeta) } else { None };
        if let Some(v) = z {
            best = Some(match best {
                None => (v, x, v, x),
                Some((hi, hx, lo, lx)) => {
                    let (hi, hx) = if v > hi { (v, x) } else { (hi, hx) };
                    let (lo, lx) = if v < lo { (v, x) } else { (lo, lx) };
                    (hi, hx, lo, lx)
                }
            });
        }
        per_point.push(PointZeta { x, zeta: z });
    }
    let (hi, hx, lo, lx) = best.ok_or(Error::NoUncontaminated(0))?;
    Ok(ZoomExtremes { zeta_plus: hi, zeta_minus: lo, lambda: hi - lo, argmax: hx, argmin: lx, per_point })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LocalAmenability {
    pub graph_type: bool,
    /// Point used for the one-point inference.
    pub point: PointId,
    #[serde(serialize_with = "ser_rational")]
    pub zeta_point: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub tolerance: Rational,
    /// ζ(x) within tolerance of 1 at the chosen point (or at every point when not graph-type).
    pub locally_amenable_evidence: bool,
    /// Points whose zoom table covers the same n-range as the chosen point.
    pub core_points: usize,
    /// The per-point verdicts over the core points agree with the one-point verdict.
    pub cross_check_agrees: bool,
}

/// One-point shortcut for graph-type spaces, cross-checked against the full table.
pub fn local_amenability(space: &MetricSpace, policy: ZoomPolicy, tolerance: Rational) -> Result<LocalAmenability> {
    let graph_type = is_graph_type(space);
    let interior: Vec<PointId> = space.points().filter(|&x| space.is_interior(x)).collect();
    // the interior point farthest from the rim gives the longest usable table
    let hops = space.rim_hops();
    let x = *interior.iter().max_by_key(|p| (hops[p.idx()], std::cmp::Reverse(p.0))).ok_or(Error::NoUncontaminated(0))?;
    let rx = zoom_constants(space, x, policy)?;
    let near_one = |z: Rational| z <= Rational::from_integer(1) + tolerance;
    let range: Vec<usize> = rx.table.iter().map(|row| row.iter().filter(|e| e.usable()).count()).collect();
    let cut = ZoomPolicy { nmax: range.iter().copied().max().unwrap_or(1).max(1), ..policy };
    let mut core = 0;
    let mut agree = true;
    let mut all_near = near_one(rx.zeta);
    for &y in &interior {
        let Ok(ry) = zoom_constants(space, y, cut) else { continue };
        let covers = ry.table.iter().zip(&range).all(|(row, &r)| row.iter().filter(|e| e.usable()).count() >= r);
        if covers {
            core += 1;
            agree &= near_one(ry.zeta) == near_one(rx.zeta);
            all_near &= near_one(ry.zeta);
        }
    }
    let evidence = if graph_type { near_one(rx.zeta) } else { all_near };
    Ok(LocalAmenability {
        graph_type,
        point: x,
        zeta_point: rx.zeta,
        tolerance,
        locally_amenable_evidence: evidence,
        core_points: core,
        cross_check_agrees: agree,
    })
}

pub fn boundary_ratio(space: &MetricSpace, a: &[PointId], k: usize) -> Result<Rational> {
    let b = space.discrete_k_boundary(a, k)?;
    Ok(Rational::new(b.len() as i64, a.len() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::space::{ids, PointMetric};
    use proptest::prelude::{prop_assert, prop_assert_eq, proptest};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p, q)
    }

    #[test]
    fn whole_space_gives_zero() {
        let c6 = fixtures::cycle(6);
        let rep = iota_k(&c6, 1, &IsoPolicy::everything()).unwrap();
        assert_eq!(rep.value, r(0, 1));
        assert_eq!(rep.witness, c6.points().collect::<Vec<_>>());
        assert!(rep.exhaustive);
    }

    #[test]
    fn cycle_default_policy() {
        // half of C6 is a path of three vertices with two boundary vertices
        let c6 = fixtures::cycle(6);
        let rep = iota_k(&c6, 1, &IsoPolicy::default()).unwrap();
        assert_eq!(rep.value, r(2, 3));
        assert_eq!(rep.witness, ids(&[0, 1, 2]));
        assert_eq!(boundary_ratio(&c6, &rep.witness, 1).unwrap(), rep.value);
    }

    #[test]
    fn z_window_interval() {
        let z = fixtures::z_window(20, 4);
        let rep = iota_k(&z, 1, &IsoPolicy::default()).unwrap();
        assert!(!rep.exhaustive);
        assert_eq!(rep.value, r(2, 33));
        assert_eq!(rep.witness.len(), 33);
        let small = iota_k(&fixtures::z_window(10, 4), 1, &IsoPolicy::default()).unwrap();
        assert!(small.value > rep.value);
    }

    #[test]
    fn intervals_are_optimal_on_small_windows() {
        let z = fixtures::z_window(7, 1);
        let rep = iota_k(&z, 1, &IsoPolicy::default()).unwrap();
        assert!(rep.exhaustive);
        assert_eq!(rep.value, r(2, 13));
    }

    #[test]
    fn saturation_beyond_diameter() {
        let p5 = fixtures::path(5);
        let rep = iota_k(&p5, 10, &IsoPolicy::default()).unwrap();
        assert_eq!(rep.value, r(3, 2));
    }

    #[test]
    fn singleton_family_by_hand() {
        let p5 = fixtures::path(5);
        let rep = iota_k(&p5, 1, &IsoPolicy::default().with_max_size(1)).unwrap();
        assert_eq!(rep.value, r(1, 1));
        assert_eq!(rep.witness, ids(&[0]));
    }

    #[test]
    fn tree_is_not_sn() {
        let t = fixtures::regular_tree(3, 3);
        let rep = property_sn(&t, 1, r(1, 1), &IsoPolicy::default()).unwrap();
        assert_eq!(rep.verdict, SnVerdict::NotSnEvidence);
        assert!(rep.per_k[0].exhaustive);
        assert_eq!(rep.per_k[0].value, r(12, 10));
    }

    #[test]
    fn grid_square_witness() {
        let g = fixtures::grid_window(5, PointMetric::L1, false);
        let rep = property_sn(&g, 1, r(1, 1), &IsoPolicy::default()).unwrap();
        assert_eq!(rep.verdict, SnVerdict::SnEvidence);
        assert!(rep.per_k[0].value <= r(4, 9));
    }

    #[test]
    fn single_point_is_sn() {
        let s = MetricSpace::from_graph(1, &[]).unwrap();
        let rep = property_sn(&s, 1, r(1, 1), &IsoPolicy::default()).unwrap();
        assert_eq!(rep.verdict, SnVerdict::SnEvidence);
    }

    #[test]
    fn doubling_examples() {
        let z = fixtures::z_window(8, 1);
        let rep = doubling_check(&z, 1, &IsoPolicy::default()).unwrap();
        assert!(!rep.holds);
        let t = fixtures::regular_tree(3, 4);
        let rep = doubling_check(&t, 1, &IsoPolicy::default().with_max_size(6)).unwrap();
        assert!(rep.holds && rep.exhaustive);
    }

    #[test]
    fn z_zoom_ratios() {
        let z = fixtures::z_window(20, 1);
        let o = z.find_int(&[0]).unwrap();
        let rep = zoom_constants(&z, o, ZoomPolicy { kmax: 1, nmax: 64 }).unwrap();
        for e in rep.table[0].iter().filter(|e| e.usable()) {
            assert_eq!(e.ratio, r(2 * e.n as i64 + 1, 2 * e.n as i64 - 1));
        }
        assert_eq!(rep.zeta, r(39, 37));
        assert!(rep.table[0].last().unwrap().contaminated);
    }

    #[test]
    fn tree_zoom() {
        let t = fixtures::regular_tree(3, 6);
        let rep = zoom_constants(&t, PointId(0), ZoomPolicy::default()).unwrap();
        // level sizes 1, 3, 6, 12, ...: ratios (3·2^n − 2)/(3·2^{n−1} − 2)
        assert_eq!(rep.table[0][0].ratio, r(4, 1));
        assert!(rep.zeta > r(2, 1));
        let single = MetricSpace::from_graph(1, &[]).unwrap();
        assert_eq!(zoom_constants(&single, PointId(0), ZoomPolicy::default()).unwrap_err(), Error::NoUncontaminated(0));
    }

    #[test]
    fn zoom_extremes_grow_with_degree() {
        let mut prev = r(0, 1);
        for d in [3, 4, 5] {
            let t = fixtures::regular_tree(d, 4);
            let ex = zoom_extremes(&t, ZoomPolicy::default()).unwrap();
            assert!(ex.zeta_minus > prev);
            prev = ex.zeta_minus;
        }
    }

    #[test]
    fn grid_local_amenability() {
        let g = fixtures::grid_window(15, PointMetric::L1, false);
        let la = local_amenability(&g, ZoomPolicy::default(), r(1, 4)).unwrap();
        assert!(la.graph_type);
        assert!(la.locally_amenable_evidence);
        assert!(la.cross_check_agrees);
        assert!(la.core_points >= 1);
        let t = fixtures::regular_tree(3, 5);
        let la = local_amenability(&t, ZoomPolicy::default(), r(1, 4)).unwrap();
        assert!(!la.locally_amenable_evidence);
        let z = fixtures::z_window(30, 1);
        assert!(local_amenability(&z, ZoomPolicy::default(), r(1, 4)).unwrap().locally_amenable_evidence);
    }

    #[test]
    fn iota_below_zeta_minus_one_on_the_family() {
        // A = dN_{(n−1)k}(x) is in the family whenever it is small enough, so
        // ι_k ≤ ratio − 1 for every such entry.
        for s in [fixtures::cycle(8), fixtures::path(7), fixtures::complete(5), fixtures::random_connected_graph(9, 3, 2)] {
            let policy = IsoPolicy::default();
            let fam = Family::resolve(&s, &policy).unwrap();
            for k in 1..=3 {
                let iota = iota_k(&s, k, &policy).unwrap().value;
                for x in s.points() {
                    let z = zoom_constants(&s, x, ZoomPolicy { kmax: k, nmax: 16 }).unwrap();
                    for e in z.table[k - 1].iter().filter(|e| e.usable() && e.inner <= fam.max_size) {
                        assert!(iota <= e.ratio - r(1, 1), "k={k} x={x} {iota} vs {}", e.ratio);
                    }
                }
            }
        }
    }

    #[test]
    fn bitmask_and_marks_agree() {
        let g = fixtures::random_connected_graph(10, 4, 9);
        let table = g.subspace(&g.points().collect::<Vec<_>>());
        assert!(table.is_graph_metric());
        for k in 1..4 {
            let mut a = Boundary::new(&g, k);
            let mut b = Boundary { space: &g, k, balls: None, marks: vec![false; g.len()] };
            for mask in 1u32..1024 {
                let set: Vec<PointId> = (0..10).filter(|i| mask >> i & 1 == 1).map(PointId).collect();
                assert_eq!(a.size(&set), b.size(&set));
            }
        }
    }

    proptest! {
        #[test]
        fn report_value_matches_witness(seed in 0u64..300, k in 1usize..4) {
            let g = fixtures::random_connected_graph(8, 3, seed);
            let rep = iota_k(&g, k, &IsoPolicy::default()).unwrap();
            let b = g.discrete_k_boundary(&rep.witness, k).unwrap();
            prop_assert_eq!(rep.value, r(b.len() as i64, rep.witness.len() as i64));
            prop_assert!(rep.exhaustive);
        }

        #[test]
        fn doubling_matches_shifted_boundary(seed in 0u64..200, k in 1usize..4) {
            let g = fixtures::random_connected_graph(8, 2, seed);
            let d = doubling_check(&g, k, &IsoPolicy::everything()).unwrap();
            let small = {
                let fam = Family::resolve(&g, &IsoPolicy::everything()).unwrap();
                let mut found = false;
                let mut stack = Vec::new();
                enumerate_sets(&fam, 0, &mut stack, &mut |a| {
                    found |= g.discrete_k_boundary(a, k).unwrap().len() < a.len();
                });
                found
            };
            prop_assert_eq!(!d.holds, small);
        }
    }
}
