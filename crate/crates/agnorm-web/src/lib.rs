//! Browser bindings. Every export takes plain strings and returns a JSON
//! string, `{"error": …}` on failure, so the same functions run natively.

use agnorm::decomposer::{idempotent_decompose, DEFAULT_MAX_STEPS};
use agnorm::group_core::build_group_capped;
use agnorm::io::{parse_function, parse_subset, subset_json, to_stable_string};
use agnorm::set_structures::{energy_ratio, symmetry_set};
use agnorm::spectral::{a_norm, pm_norm, singular_values};
use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

/// Browser-side order cap; dense SVDs beyond this stall the page.
pub const WEB_CAP: usize = 128;

fn render(r: agnorm::Result<Value>) -> String {
    let v = r.unwrap_or_else(|e| json!({ "error": e.to_string() }));
    to_stable_string(&v).unwrap_or_else(|e| format!("{{\"error\": \"{e}\"}}"))
}

/// `‖f‖_A`, `‖f‖_PM` and the singular values of `L_f`.
#[wasm_bindgen]
pub fn norm(group: &str, function: &str) -> String {
    render((|| {
        let g = build_group_capped(group, WEB_CAP)?;
        let f = parse_function(&g, function)?;
        Ok(json!({
            "order": g.order(),
            "a_norm": a_norm(&f)?,
            "pm_norm": pm_norm(&f)?,
            "singular_values": singular_values(&f)?,
        }))
    })())
}

/// `Sym_η(A)` with the labels of its elements.
#[wasm_bindgen]
pub fn symset(group: &str, set: &str, eta: f64) -> String {
    render((|| {
        let g = build_group_capped(group, WEB_CAP)?;
        let a = parse_subset(&g, set)?;
        let s = symmetry_set(&a, eta)?;
        Ok(json!({
            "sym": subset_json(&s),
            "labels": s.iter().map(|x| g.label(x)).collect::<Vec<_>>(),
            "energy_ratio": energy_ratio(&a)?,
            "is_subgroup": s.is_subgroup(),
        }))
    })())
}

/// Coset decomposition of an integer-valued function.
#[wasm_bindgen]
pub fn decompose(group: &str, function: &str) -> String {
    render((|| {
        let g = build_group_capped(group, WEB_CAP)?;
        let f = parse_function(&g, function)?;
        let out = idempotent_decompose(&f, DEFAULT_MAX_STEPS)?;
        Ok(json!({
            "terms": out.decomposition.terms,
            "norms": out.norms,
            "complete": out.complete,
            "failure": out.failure,
        }))
    })())
}
