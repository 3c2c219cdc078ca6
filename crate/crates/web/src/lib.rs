//! WebAssembly bindings behind `www/index.html`.
//!
//! Each export takes JSON text (order and symbol in the library's formats)
//! and returns JSON text for the page to draw.

use conehankel::fourier::{eval_grid, FourierCoeffs};
use conehankel::nehari::{nehari_gap, ExtensionResult};
use conehankel::operators::hphi_matrix;
use conehankel::ordered_group::OrderSpec;
use conehankel::spectral::{norm_convergence_study, StudyKind, StudyOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Keeps the page responsive; larger boxes belong to the CLI.
pub const MAX_RADIUS: i64 = 48;

fn parse<T: serde::de::DeserializeOwned>(what: &str, text: &str) -> Result<T, String> {
    serde_json::from_str(text).map_err(|e| format!("{what}: {e}"))
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

#[derive(Serialize)]
struct Heatmap {
    rows: Vec<String>,
    cols: Vec<String>,
    /// Row-major moduli.
    abs: Vec<f64>,
    max: f64,
}

pub fn hphi_heatmap_json(order: &str, symbol: &str, radius: i64) -> Result<String, String> {
    if !(1..=MAX_RADIUS).contains(&radius) {
        return Err(format!("radius: must lie in 1..={MAX_RADIUS}"));
    }
    let spec: OrderSpec = parse("order", order)?;
    let phi: FourierCoeffs = parse("symbol", symbol)?;
    let m = hphi_matrix(&phi, &spec, radius).map_err(|e| e.to_string())?;
    let abs: Vec<f64> = m.data().row_iter().flat_map(|r| r.iter().map(|z| z.norm()).collect::<Vec<_>>()).collect();
    to_json(&Heatmap {
        rows: m.rows().elements().iter().map(|n| n.to_string()).collect(),
        cols: m.cols().elements().iter().map(|n| n.to_string()).collect(),
        max: abs.iter().copied().fold(0.0, f64::max),
        abs,
    })
}

pub fn singular_profile_json(order: &str, symbol: &str, kind: &str, radii: &str, k: usize) -> Result<String, String> {
    let spec: OrderSpec = parse("order", order)?;
    let f: FourierCoeffs = parse("symbol", symbol)?;
    let kind: StudyKind = parse("kind", &format!("\"{kind}\""))?;
    let radii = radii
        .split(',')
        .map(|t| t.trim().parse::<i64>().map_err(|_| "radii: expected integers".to_string()))
        .collect::<Result<Vec<_>, _>>()?;
    if radii.iter().any(|&r| r > MAX_RADIUS) {
        return Err(format!("radii: at most {MAX_RADIUS} in the browser"));
    }
    let opts = StudyOptions {
        k,
        ..StudyOptions::default()
    };
    let report = norm_convergence_study(&f, "symbol", kind, &spec, &radii, &opts).map_err(|e| e.to_string())?;
    to_json(&report)
}

#[derive(Serialize)]
struct Extension {
    result: ExtensionResult,
    /// |ψ| on an even grid of [0, 2π).
    curve: Vec<f64>,
}

/// Nehari bracket for Hankel data on Z with the modulus curve of the
/// extension found.
pub fn nehari_extension_json(data: &str, degree: i64, budget: usize) -> Result<String, String> {
    let a: FourierCoeffs = parse("data", data)?;
    if a.dim() != 1 {
        return Err("data: the demo handles d = 1".into());
    }
    if !(0..=24).contains(&degree) {
        return Err("degree: must lie in 0..=24".into());
    }
    let spec = OrderSpec::lex(1).map_err(|e| e.to_string())?;
    let radius = (2 * a.max_degree()).clamp(8, MAX_RADIUS);
    let result = nehari_gap(&a, &spec, radius, degree, budget).map_err(|e| e.to_string())?;
    let grid = eval_grid(&result.psi, 512).map_err(|e| e.to_string())?;
    let curve = grid.samples().iter().map(|z| z.norm()).collect();
    to_json(&Extension { result, curve })
}

#[wasm_bindgen]
pub fn hphi_heatmap(order: &str, symbol: &str, radius: i32) -> Result<String, JsValue> {
    hphi_heatmap_json(order, symbol, radius as i64).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn singular_profile(order: &str, symbol: &str, kind: &str, radii: &str, k: u32) -> Result<String, JsValue> {
    singular_profile_json(order, symbol, kind, radii, k as usize).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn nehari_extension(data: &str, degree: i32, budget: u32) -> Result<String, JsValue> {
    nehari_extension_json(data, degree as i64, budget as usize).map_err(|e| JsValue::from_str(&e))
}
