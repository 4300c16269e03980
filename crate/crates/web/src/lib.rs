//! Browser demo bindings. Every exported function takes and returns JSON text.

use locfin::digital::{self, DigitalCurve, GridPoint};
use locfin::homotopy;
use locfin::iso::{self, ZoomPolicy};
use locfin::{fixtures, Coords, MetricSpace, PointId, PointMetric};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn metric_of(name: &str) -> Result<PointMetric, String> {
    match name {
        "euclidean" => Ok(PointMetric::Euclidean),
        "l1" => Ok(PointMetric::L1),
        other => Err(format!("unknown metric {other}")),
    }
}

fn parse_points(text: &str) -> Result<Vec<GridPoint>, String> {
    serde_json::from_str(text).map_err(|e| format!("points: {e}"))
}

/// Path components of a finite point set, plus dN_1 and dN_k of a focus point.
pub fn components_report(points: &str, metric: &str, focus: Option<usize>, k: usize) -> Result<String, String> {
    let pts = parse_points(points)?;
    if pts.is_empty() {
        return Ok(json!({"components": [], "focus": null}).to_string());
    }
    let coords = Coords::Integer(pts.iter().map(|p| p.to_vec()).collect());
    let space = MetricSpace::from_points(coords, metric_of(metric)?).map_err(|e| e.to_string())?;
    let at = |ids: &[PointId]| -> Vec<GridPoint> { ids.iter().map(|p| pts[p.idx()]).collect() };
    let comps: Vec<Vec<GridPoint>> = homotopy::path_components(&space).iter().map(|c| at(c)).collect();
    let focus = match focus {
        Some(i) if i < pts.len() => {
            let x = PointId(i as u32);
            let one = space.discrete_one_neighborhood(x).map_err(|e| e.to_string())?;
            let kk = space.discrete_k_neighborhood(&[x], k).map_err(|e| e.to_string())?;
            json!({"point": pts[i], "k": k, "dn1": at(&one), "dnk": at(&kk)})
        }
        _ => Value::Null,
    };
    Ok(json!({"components": comps, "focus": focus}).to_string())
}

/// Jordan decomposition of a closed digital curve given as a list of grid points.
pub fn jordan_report(points: &str, margin: i64) -> Result<String, String> {
    let curve = DigitalCurve::new(parse_points(points)?).map_err(|e| e.to_string())?;
    let out = match digital::jordan_decomposition(&curve, margin) {
        Ok(d) => json!({
            "curve": curve.points(),
            "interior": d.interior,
            "exterior": d.exterior,
            "box": d.box_,
            "components": d.components,
            "verified": d.verified(),
        }),
        Err(e) => json!({
            "curve": curve.points(),
            "rejected": e.to_string(),
            "simplicity_witness": digital::simplicity_witness(&curve),
            "components": digital::component_count(&curve, margin),
        }),
    };
    Ok(out.to_string())
}

/// A seeded random simple curve in a `size × size` box.
pub fn random_curve_points(size: i64, seed: u64) -> Result<String, String> {
    if !(3..=64).contains(&size) {
        return Err("size must be between 3 and 64".into());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c = digital::random_simple_curve(size, &mut rng);
    serde_json::to_string(&c.points()).map_err(|e| e.to_string())
}

/// Zoom table of a named fixture at a point (index, or the origin when the
/// fixture has coordinates and no index is given).
pub fn zoom_report(fixture: &str, point: Option<u32>, kmax: usize, nmax: usize) -> Result<String, String> {
    let mut words = fixture.split_whitespace();
    let name = words.next().ok_or("empty fixture name")?;
    let params: Vec<(String, String)> = words
        .map(|w| w.split_once('=').map(|(k, v)| (k.to_string(), v.to_string())).ok_or(format!("bad parameter {w}")))
        .collect::<Result<_, _>>()?;
    let space = fixtures::by_name(name, &params).map_err(|e| e.to_string())?;
    let x = match point {
        Some(i) => PointId(i),
        None => {
            let dim = space.int_coords(PointId(0)).map_or(0, <[i64]>::len);
            space.find_int(&vec![0; dim]).filter(|_| dim > 0).unwrap_or(PointId(0))
        }
    };
    let rep = iso::zoom_constants(&space, x, ZoomPolicy { kmax, nmax }).map_err(|e| e.to_string())?;
    let mut v = serde_json::to_value(&rep).map_err(|e| e.to_string())?;
    v["points"] = json!(space.len());
    v["coords"] = json!(space.int_coords(x));
    Ok(v.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn components(points: &str, metric: &str, focus: i32, k: usize) -> Result<String, JsValue> {
    js(components_report(points, metric, usize::try_from(focus).ok(), k))
}

#[wasm_bindgen]
pub fn jordan(points: &str, margin: i32) -> Result<String, JsValue> {
    js(jordan_report(points, margin as i64))
}

#[wasm_bindgen]
pub fn random_curve(size: i32, seed: u32) -> Result<String, JsValue> {
    js(random_curve_points(size as i64, seed as u64))
}

#[wasm_bindgen]
pub fn zoom(fixture: &str, point: i32, kmax: usize, nmax: usize) -> Result<String, JsValue> {
    js(zoom_report(fixture, u32::try_from(point).ok(), kmax, nmax))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Value {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn five_point_components() {
        let v = parse(&components_report("[[-1,1],[-1,0],[0,0],[1,1],[1,-1]]", "euclidean", Some(2), 1).unwrap());
        assert_eq!(v["components"].as_array().unwrap().len(), 3);
        assert_eq!(v["focus"]["dn1"], json!([[-1, 0], [0, 0]]));
        assert!(components_report("[[0,0],[0,0]]", "l1", None, 1).is_err());
        assert!(components_report("[[0,0]]", "chebyshev", None, 1).is_err());
    }

    #[test]
    fn jordan_accepts_rings_and_rejects_the_figure_eight() {
        let ring = "[[0,0],[1,0],[2,0],[2,1],[2,2],[1,2],[0,2],[0,1],[0,0]]";
        let v = parse(&jordan_report(ring, 1).unwrap());
        assert_eq!(v["interior"], json!([[1, 1]]));
        assert_eq!(v["verified"], true);
        let twelve = serde_json::to_string(&digital::twelve_step_curve().points()).unwrap();
        let v = parse(&jordan_report(&twelve, 1).unwrap());
        assert!(v["rejected"].is_string());
        assert_ne!(v["components"], 2);
    }

    #[test]
    fn random_curves_decompose() {
        for seed in 0..5 {
            let pts = random_curve_points(10, seed).unwrap();
            assert_eq!(random_curve_points(10, seed).unwrap(), pts);
            assert_eq!(parse(&jordan_report(&pts, 1).unwrap())["verified"], true);
        }
        assert!(random_curve_points(2, 0).is_err());
    }

    #[test]
    fn zoom_on_z() {
        let v = parse(&zoom_report("z_window r=10", None, 1, 64).unwrap());
        assert_eq!(v["coords"], json!([0]));
        assert_eq!(v["table"][0][0]["ratio"], "3");
        assert!(zoom_report("nonsense", None, 1, 4).is_err());
        assert!(zoom_report("cycle n", None, 1, 4).is_err());
    }
}
