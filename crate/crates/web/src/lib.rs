//! Browser bindings. Every export returns a JSON string of the form
//! `{"ok": true, ...}` or `{"ok": false, "error": "..."}`.

use acm_core::classifier::{classify_point, classify_tensor, DEFAULT_TOL_ALGEBRAIC};
use acm_core::decomposition::{components, COMPONENT_COUNT};
use acm_core::geometry::{builtin_charts, chart_by_name};
use acm_core::structure::AcmStructure;
use acm_core::tensor::{random_element, Tensor3};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(Value::Object(mut map)) => {
            map.insert("ok".into(), Value::Bool(true));
            Value::Object(map).to_string()
        }
        Ok(other) => json!({ "ok": true, "value": other }).to_string(),
        Err(error) => json!({ "ok": false, "error": error }).to_string(),
    }
}

fn parse_point(text: &str, dim: usize) -> Result<Vec<f64>, String> {
    if text.trim().is_empty() {
        return Ok(vec![0.0; dim]);
    }
    let point = text
        .split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| format!("bad coordinate `{}`: {e}", c.trim())))
        .collect::<Result<Vec<_>, _>>()?;
    if point.len() != dim {
        return Err(format!("point has {} coordinates, chart needs {dim}", point.len()));
    }
    Ok(point)
}

pub fn chart_list() -> Value {
    let charts: Vec<Value> = builtin_charts()
        .iter()
        .map(|c| json!({ "name": c.name, "n": c.n, "dim": c.dim() }))
        .collect();
    json!({ "charts": charts })
}

pub fn chart_verdict(name: &str, point: &str, step: f64, tol: f64) -> Result<Value, String> {
    let chart = chart_by_name(name).map_err(|e| e.to_string())?;
    let p = parse_point(point, chart.dim())?;
    let out = classify_point(&chart, &p, step, tol).map_err(|e| e.to_string())?;
    Ok(json!({
        "chart": chart.name,
        "point": p,
        "spectrum": out.spectrum,
        "verdict": out.label,
    }))
}

/// Weighted sum of the components of one random tensor, then decomposed
/// and classified again.
pub fn blended_verdict(n: usize, seed: u32, weights: &[f64]) -> Result<Value, String> {
    if weights.len() != COMPONENT_COUNT {
        return Err(format!("expected {COMPONENT_COUNT} weights, got {}", weights.len()));
    }
    let s = AcmStructure::standard(n).map_err(|e| e.to_string())?;
    let f = random_element(&s, u64::from(seed));
    let parts = components(&s, &f).map_err(|e| e.to_string())?;
    let mut mix = Tensor3::zeros(n);
    for (part, w) in parts.iter().zip(weights) {
        if let Some(p) = part {
            mix += &(p * *w);
        }
    }
    let (spectrum, verdict) = classify_tensor(&s, &mix, DEFAULT_TOL_ALGEBRAIC).map_err(|e| e.to_string())?;
    Ok(json!({ "n": n, "seed": seed, "spectrum": spectrum, "verdict": verdict }))
}

#[wasm_bindgen]
pub fn charts() -> String {
    respond(Ok(chart_list()))
}

#[wasm_bindgen]
pub fn classify_chart(name: &str, point: &str, step: f64, tol: f64) -> String {
    respond(chart_verdict(name, point, step, tol))
}

#[wasm_bindgen]
pub fn blend(n: usize, seed: u32, weights: Vec<f64>) -> String {
    respond(blended_verdict(n, seed, &weights))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: String) -> Value {
        serde_json::from_str(&text).unwrap()
    }

    #[test]
    fn lists_builtin_charts() {
        let v = parse(charts());
        assert_eq!(v["ok"], true);
        let names: Vec<&str> = v["charts"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
        assert!(names.contains(&"sasakian-r3"));
        assert!(names.contains(&"kenmotsu-r3"));
    }

    #[test]
    fn classifies_sasakian_origin() {
        let v = parse(classify_chart("sasakian-r3", "0,0,0", 1e-5, 1e-3));
        assert_eq!(v["ok"], true);
        assert_eq!(v["verdict"]["kind"], "single");
        assert_eq!(v["verdict"]["classes"], json!([2]));
        let empty = parse(classify_chart("kenmotsu-r3", "", 1e-5, 1e-3));
        assert_eq!(empty["verdict"]["classes"], json!([3]));
    }

    #[test]
    fn reports_errors_as_json() {
        let v = parse(classify_chart("nowhere", "0", 1e-5, 1e-3));
        assert_eq!(v["ok"], false);
        assert!(v["error"].as_str().unwrap().contains("unknown chart"));
        let v = parse(classify_chart("sasakian-r3", "0,0", 1e-5, 1e-3));
        assert_eq!(v["ok"], false);
        let v = parse(blend(2, 1, vec![1.0; 3]));
        assert_eq!(v["ok"], false);
    }

    #[test]
    fn blending_selects_classes() {
        let mut w = vec![0.0; 12];
        w[3] = 1.0;
        let v = parse(blend(2, 7, w.clone()));
        assert_eq!(v["verdict"]["kind"], "single");
        assert_eq!(v["verdict"]["classes"], json!([4]));
        w[10] = 2.0;
        let v = parse(blend(3, 7, w));
        assert_eq!(v["verdict"]["kind"], "sum");
        assert_eq!(v["verdict"]["classes"], json!([4, 11]));
        let v = parse(blend(2, 7, vec![0.0; 12]));
        assert_eq!(v["verdict"]["kind"], "cosymplectic");
    }
}
