//! Browser bindings. Every export returns a JSON string: the result object, or
//! `{"error": {code, message, context}}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::wasm_bindgen;

use ellsheaf::descriptors::Descriptor;
use ellsheaf::sheaf_ops::cohomology_formula;
use ellsheaf::stable::{block_chain, cuspidal_simple_matrix, splitting_data, stable_sequence};
use ellsheaf::triples::{cohomology as triple_cohomology, NodalTriple};
use ellsheaf::{Error, Field, Result};

fn wrap(r: Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_json() }).to_string(),
    }
}

pub fn stable_seq_value(r: i64, d: i64) -> Result<Value> {
    let s = stable_sequence(r, d)?;
    let mut v = s.to_json();
    v["bits"] = json!(s.base.iter().map(|x| x.to_string()).collect::<String>());
    Ok(v)
}

pub fn cohomology_value(descriptor: &str, field: &str) -> Result<Value> {
    let field = Field::parse(field)?;
    let v: Value = serde_json::from_str(descriptor).map_err(|e| Error::invalid(format!("malformed JSON: {e}")))?;
    let d = Descriptor::from_json(field, &v)?;
    let oracle = triple_cohomology(&NodalTriple::from_descriptor(&d, field));
    let mut out = json!({
        "display": d.canonical().to_string(),
        "oracle": { "h0": oracle.h0, "h1": oracle.h1 },
    });
    if let Descriptor::Band(b) = &d {
        let h = cohomology_formula(b);
        out["formula"] = json!({ "h0": h.h0, "h1": h.h1 });
        out["match"] = json!(h == oracle);
    }
    Ok(out)
}

pub fn cusp_matrix_value(r: i64, d: i64, lambda: &str, field: &str) -> Result<Value> {
    let field = Field::parse(field)?;
    let t = cuspidal_simple_matrix(r, d, &field.parse_scalar(lambda)?)?;
    let (c, r1, r2) = splitting_data(r, d);
    Ok(json!({
        "splitting": { "c": c, "r1": r1, "r2": r2 },
        "chain": block_chain(r1, r2),
        "display": t.to_string(),
        "end_dim": t.end_dim(),
    }))
}

#[wasm_bindgen]
pub fn stable_seq(r: i64, d: i64) -> String {
    wrap(stable_seq_value(r, d))
}

#[wasm_bindgen]
pub fn cohomology(descriptor: &str, field: &str) -> String {
    wrap(cohomology_value(descriptor, field))
}

#[wasm_bindgen]
pub fn cusp_matrix(r: i64, d: i64, lambda: &str, field: &str) -> String {
    wrap(cusp_matrix_value(r, d, lambda, field))
}
