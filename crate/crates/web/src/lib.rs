//! Browser bindings: every export takes and returns JSON text.

use leibniz_core::catalog::{catalog_check, Catalog, CheckOptions, ListFilter};
use leibniz_core::io::{parse_algebra, parse_operator, report_text, to_canonical_json, Algebra};
use leibniz_core::operators::{verify_family, verify_family_binary, Family};
use wasm_bindgen::prelude::*;

/// Residual report of an algebra or pair document.
pub fn verify_json(doc: &str, text: bool) -> Result<String, String> {
    let a = parse_algebra(doc).map_err(|e| e.to_string())?;
    let r = a.residual().map_err(|e| e.to_string())?;
    Ok(if text { report_text(&r) } else { to_canonical_json(&r) })
}

/// Containment verdict of an operator document on an algebra document.
pub fn verify_operator_json(algebra: &str, operator: &str) -> Result<String, String> {
    let a = parse_algebra(algebra).map_err(|e| e.to_string())?;
    let op = parse_operator(operator).map_err(|e| e.to_string())?;
    let v = match &a {
        Algebra::Ternary(t) => verify_family(Family::Single(t), &op.class, &op.matrices),
        Algebra::TernaryPair(t1, t2) => verify_family(Family::Pair(t1, t2), &op.class, &op.matrices),
        Algebra::Binary(b) => verify_family_binary(b, &op.class, &op.matrices),
        Algebra::BinaryPair(..) => return Err("operator checks on binary pairs are not supported".into()),
    }
    .map_err(|e| e.to_string())?;
    Ok(to_canonical_json(&v))
}

pub fn catalog_ids() -> String {
    to_canonical_json(&Catalog::builtin().list(&ListFilter::default()))
}

pub fn catalog_entry(id: &str) -> Result<String, String> {
    Catalog::builtin().show(id).ok_or_else(|| format!("no catalog entry `{id}`"))
}

/// Conformance report for a JSON array of entry ids; an empty array checks everything.
pub fn check_json(ids: &str) -> Result<String, String> {
    let ids: Vec<String> = serde_json::from_str(ids).map_err(|e| e.to_string())?;
    Ok(to_canonical_json(&catalog_check(Catalog::builtin(), &ids, &CheckOptions::default())))
}

#[wasm_bindgen(js_name = verify)]
pub fn verify_js(doc: &str, text: bool) -> Result<String, JsValue> {
    verify_json(doc, text).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = verifyOperator)]
pub fn verify_operator_js(algebra: &str, operator: &str) -> Result<String, JsValue> {
    verify_operator_json(algebra, operator).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = catalogIds)]
pub fn catalog_ids_js() -> String {
    catalog_ids()
}

#[wasm_bindgen(js_name = catalogEntry)]
pub fn catalog_entry_js(id: &str) -> Result<String, JsValue> {
    catalog_entry(id).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = check)]
pub fn check_js(ids: &str) -> Result<String, JsValue> {
    check_json(ids).map_err(|e| JsValue::from_str(&e))
}
