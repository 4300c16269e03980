//! Builders for the standard test spaces.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::digital::{self, DigitalCurve};
use crate::error::{Error, Result};
use crate::space::{Coords, MetricSpace, PointId, PointMetric};

fn ring_edges(n: u32) -> Vec<(u32, u32)> {
    (0..n).map(|i| (i, (i + 1) % n)).collect()
}

/// Cycle graph C_n (n >= 3), vertices in cyclic order.
pub fn cycle(n: u32) -> MetricSpace {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    MetricSpace::from_graph(n as usize, &ring_edges(n)).expect("cycle is connected")
}

/// Path graph P_n on vertices 0..n.
pub fn path(n: u32) -> MetricSpace {
    assert!(n >= 1);
    let edges: Vec<(u32, u32)> = (1..n).map(|i| (i - 1, i)).collect();
    MetricSpace::from_graph(n as usize, &edges).expect("path is connected")
}

pub fn complete(n: u32) -> MetricSpace {
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            edges.push((a, b));
        }
    }
    MetricSpace::from_graph(n as usize, &edges).expect("complete graph is connected")
}

/// The window [-r, r] of ℤ, rim at both ends.
pub fn z_window(r: i64, margin: u32) -> MetricSpace {
    let pts: Vec<Vec<i64>> = (-r..=r).map(|x| vec![x]).collect();
    let n = pts.len() as u32;
    MetricSpace::from_points(Coords::Integer(pts), PointMetric::L1)
        .and_then(|s| s.with_window(margin, Some(vec![PointId(0), PointId(n - 1)])))
        .expect("window is valid")
}

/// The window [-r, r]² of ℤ², optionally without the origin.
/// The outer square is the rim, margin 1.
pub fn grid_window(r: i64, metric: PointMetric, punctured: bool) -> MetricSpace {
    grid_window_with_margin(r, metric, punctured, 1)
}

pub fn grid_window_with_margin(r: i64, metric: PointMetric, punctured: bool, margin: u32) -> MetricSpace {
    let mut pts = Vec::new();
    for y in -r..=r {
        for x in -r..=r {
            if punctured && x == 0 && y == 0 {
                continue;
            }
            pts.push(vec![x, y]);
        }
    }
    let rim: Vec<PointId> = pts
        .iter()
        .enumerate()
        .filter(|(_, p)| p[0].abs() == r || p[1].abs() == r)
        .map(|(i, _)| PointId(i as u32))
        .collect();
    MetricSpace::from_points(Coords::Integer(pts), metric)
        .and_then(|s| s.with_window(margin, Some(rim)))
        .expect("window is valid")
}

/// The square [1, side]² of ℤ² surrounded by a one-point rim layer, margin 1.
pub fn grid_box(side: i64, metric: PointMetric) -> MetricSpace {
    assert!(side >= 1);
    let mut pts = Vec::new();
    for y in 0..=side + 1 {
        for x in 0..=side + 1 {
            pts.push(vec![x, y]);
        }
    }
    let rim: Vec<PointId> = pts
        .iter()
        .enumerate()
        .filter(|(_, p)| p.iter().any(|&c| c == 0 || c == side + 1))
        .map(|(i, _)| PointId(i as u32))
        .collect();
    MetricSpace::from_points(Coords::Integer(pts), metric)
        .and_then(|s| s.with_window(1, Some(rim)))
        .expect("window is valid")
}

/// Ball of radius `depth` around a vertex of the degree-regular tree.
/// Vertex 0 is the centre, numbering is breadth-first; leaves form the rim.
pub fn regular_tree(degree: u32, depth: u32) -> MetricSpace {
    let (n, edges, leaves) = tree_parts(degree, depth);
    MetricSpace::from_graph(n, &edges)
        .and_then(|s| s.with_window(1, Some(leaves)))
        .expect("tree is connected")
}

fn tree_parts(degree: u32, depth: u32) -> (usize, Vec<(u32, u32)>, Vec<PointId>) {
    assert!(degree >= 2);
    let mut edges = Vec::new();
    let mut frontier = vec![0u32];
    let mut next_id = 1u32;
    for level in 0..depth {
        let mut nf = Vec::new();
        for &v in &frontier {
            let kids = if level == 0 { degree } else { degree - 1 };
            for _ in 0..kids {
                edges.push((v, next_id));
                nf.push(next_id);
                next_id += 1;
            }
        }
        frontier = nf;
    }
    let leaves = if depth == 0 { vec![] } else { frontier.into_iter().map(PointId).collect() };
    (next_id as usize, edges, leaves)
}

/// Regular tree ball with a copy of ℤ (truncated to [-limb, limb]) glued at the centre.
/// Returns the space and the ids of the limb points ordered from -limb to limb
/// (the centre sits in the middle).
pub fn tree_plus_z(degree: u32, depth: u32, limb: u32) -> (MetricSpace, Vec<PointId>) {
    let (n, mut edges, mut rim) = tree_parts(degree, depth);
    let mut line = vec![PointId(0)];
    let mut id = n as u32;
    for side in 0..2 {
        let mut prev = 0u32;
        let mut ray = Vec::new();
        for _ in 0..limb {
            edges.push((prev, id));
            ray.push(PointId(id));
            prev = id;
            id += 1;
        }
        if let Some(&end) = ray.last() {
            rim.push(end);
        }
        if side == 0 {
            ray.reverse();
            ray.extend(line);
            line = ray;
        } else {
            line.extend(ray);
        }
    }
    let space = MetricSpace::from_graph(id as usize, &edges)
        .and_then(|s| s.with_window(1, Some(rim)))
        .expect("hybrid is connected");
    (space, line)
}

/// {(-1,1), (-1,0), (0,0), (1,1), (1,-1)} with the Euclidean metric.
pub fn five_point() -> MetricSpace {
    let pts = vec![vec![-1, 1], vec![-1, 0], vec![0, 0], vec![1, 1], vec![1, -1]];
    MetricSpace::from_points(Coords::Integer(pts), PointMetric::Euclidean).expect("distinct points")
}

/// The 3×3 grid block without its centre, Euclidean, listed counterclockwise
/// from (1,0).
pub fn ring8() -> MetricSpace {
    let pts = vec![
        vec![1, 0],
        vec![1, 1],
        vec![0, 1],
        vec![-1, 1],
        vec![-1, 0],
        vec![-1, -1],
        vec![0, -1],
        vec![1, -1],
    ];
    MetricSpace::from_points(Coords::Integer(pts), PointMetric::Euclidean).expect("distinct points")
}

/// Q = {(0,0), (1,0), (1,1), (0,1)} with the Euclidean metric.
pub fn square_q() -> MetricSpace {
    let pts = vec![vec![0, 0], vec![1, 0], vec![1, 1], vec![0, 1]];
    MetricSpace::from_points(Coords::Integer(pts), PointMetric::Euclidean).expect("distinct points")
}

/// Two parallel copies of the segment {0..len-1} at height 0 and 1 (Euclidean).
pub fn parallel_segments(len: i64) -> MetricSpace {
    let mut pts = Vec::new();
    for row in 0..2 {
        for x in 0..len {
            pts.push(vec![row, x]);
        }
    }
    MetricSpace::from_points(Coords::Integer(pts), PointMetric::Euclidean).expect("distinct points")
}

/// (0,1) together with (n,0) for 2 <= n <= last.
pub fn lifted_half_line(last: i64) -> MetricSpace {
    let mut pts = vec![vec![0, 1]];
    pts.extend((2..=last).map(|n| vec![n, 0]));
    MetricSpace::from_points(Coords::Integer(pts), PointMetric::Euclidean).expect("distinct points")
}

/// (0,0) together with (n,0) for 2 <= n <= last.
pub fn gapped_half_line(last: i64) -> MetricSpace {
    let mut pts = vec![vec![0, 0]];
    pts.extend((2..=last).map(|n| vec![n, 0]));
    MetricSpace::from_points(Coords::Integer(pts), PointMetric::Euclidean).expect("distinct points")
}

/// Random connected graph: a random spanning tree plus `extra` random edges.
pub fn random_connected_graph(n: u32, extra: u32, seed: u64) -> MetricSpace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_connected_graph_with(n, extra, &mut rng)
}

pub fn random_connected_graph_with<R: Rng>(n: u32, extra: u32, rng: &mut R) -> MetricSpace {
    let mut order: Vec<u32> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for i in 1..n as usize {
        let parent = order[rng.gen_range(0..i)];
        edges.push((parent, order[i]));
    }
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a, b));
            }
        }
    }
    MetricSpace::from_graph(n as usize, &edges).expect("spanning tree keeps it connected")
}

/// Names understood by [`by_name`], with their parameters.
pub const NAMES: &[&str] = &[
    "cycle n=",
    "path n=",
    "complete n=",
    "z_window r= margin=",
    "grid r= metric=l1|euclidean margin=",
    "grid_box side= metric=",
    "punctured_grid r= metric=",
    "regular_tree degree= depth=",
    "tree_plus_z degree= depth= limb=",
    "five_point",
    "ring8",
    "square_q",
    "parallel_segments len=",
    "random_graph n= extra= seed=",
];

pub const CURVE_NAMES: &[&str] = &["ring3", "rectangle w= h=", "twelve_step", "figure_eight a= b= c= d=", "random_curve size= seed="];

/// Looks up a digital curve fixture by name with `key=value` parameters.
pub fn curve_by_name(name: &str, params: &[(String, String)]) -> Result<DigitalCurve> {
    let get = |key: &str, default: i64| -> Result<i64> {
        match params.iter().find(|(k, _)| k == key) {
            None => Ok(default),
            Some((_, v)) => v.parse().map_err(|_| Error::Param(format!("{key}={v}"))),
        }
    };
    match name {
        "ring3" => Ok(digital::rectangle_curve(2, 2)?.transformed(0, [-1, -1])),
        "rectangle" => digital::rectangle_curve(get("w", 4)?, get("h", 3)?),
        "twelve_step" => Ok(digital::twelve_step_curve()),
        "figure_eight" => digital::figure_eight(get("a", 2)?, get("b", 1)?, get("c", 1)?, get("d", 2)?),
        "random_curve" => {
            let size = get("size", 12)?;
            if !(3..=64).contains(&size) {
                return Err(Error::Param("size must lie in 3..=64".into()));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(get("seed", 0)? as u64);
            Ok(digital::random_simple_curve(size, &mut rng))
        }
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

/// Looks up a space fixture by name with `key=value` parameters.
pub fn by_name(name: &str, params: &[(String, String)]) -> Result<MetricSpace> {
    let get = |key: &str, default: i64| -> Result<i64> {
        match params.iter().find(|(k, _)| k == key) {
            None => Ok(default),
            Some((_, v)) => v.parse().map_err(|_| Error::Param(format!("{key}={v}"))),
        }
    };
    let metric = match params.iter().find(|(k, _)| k == "metric").map(|(_, v)| v.as_str()) {
        None | Some("l1") => PointMetric::L1,
        Some("euclidean") => PointMetric::Euclidean,
        Some(other) => return Err(Error::Param(format!("metric={other}"))),
    };
    let pos = |key: &str, default: i64, min: i64| -> Result<i64> {
        let v = get(key, default)?;
        if v < min {
            return Err(Error::Param(format!("{key} must be at least {min}")));
        }
        Ok(v)
    };
    Ok(match name {
        "cycle" => cycle(pos("n", 5, 3)? as u32),
        "path" => path(pos("n", 5, 1)? as u32),
        "complete" => complete(pos("n", 4, 1)? as u32),
        "z_window" => z_window(pos("r", 20, 1)?, pos("margin", 1, 0)? as u32),
        "grid" => grid_window_with_margin(pos("r", 5, 1)?, metric, false, pos("margin", 1, 0)? as u32),
        "grid_box" => grid_box(pos("side", 10, 1)?, metric),
        "punctured_grid" => grid_window_with_margin(pos("r", 5, 1)?, metric, true, pos("margin", 1, 0)? as u32),
        "regular_tree" => regular_tree(pos("degree", 3, 2)? as u32, pos("depth", 4, 0)? as u32),
        "tree_plus_z" => tree_plus_z(pos("degree", 3, 2)? as u32, pos("depth", 6, 0)? as u32, pos("limb", 12, 0)? as u32).0,
        "five_point" => five_point(),
        "ring8" => ring8(),
        "square_q" => square_q(),
        "parallel_segments" => parallel_segments(pos("len", 5, 1)?),
        "random_graph" => random_connected_graph(pos("n", 8, 1)? as u32, pos("extra", 4, 0)? as u32, get("seed", 0)? as u64),
        other => return Err(Error::UnknownFixture(other.to_string())),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_sizes() {
        assert_eq!(regular_tree(3, 3).len(), 1 + 3 + 6 + 12);
        assert_eq!(regular_tree(3, 3).window().unwrap().rim.len(), 12);
        let (h, line) = tree_plus_z(3, 2, 4);
        assert_eq!(h.len(), 10 + 8);
        assert_eq!(line.len(), 9);
        assert_eq!(line[4], PointId(0));
        for w in line.windows(2) {
            assert!(h.linked(w[0], w[1]));
        }
    }

    #[test]
    fn random_graphs_are_deterministic() {
        assert_eq!(random_connected_graph(9, 5, 7), random_connected_graph(9, 5, 7));
    }

    #[test]
    fn by_name_rejects_unknown() {
        assert_eq!(by_name("moebius", &[]).unwrap_err(), Error::UnknownFixture("moebius".into()));
        assert_eq!(by_name("cycle", &[("n".into(), "4".into())]).unwrap(), cycle(4));
        assert!(by_name("cycle", &[("n".into(), "2".into())]).is_err());
    }
}
