//! JSON reports for the command-line tool, and their CSV flattening.

use serde_json::{json, Map, Value};

use crate::cm::{is_lcm, is_wcm, prop25_harness, CmReport};
use crate::error::{Error, Result};
use crate::io::{groups_to_value, matrix_to_value, module_to_value, param_to_value, vector_to_value};
use crate::ka::KaComplex;
use crate::quadratic::{orthogonal_complement, QModMorphism, QuadraticModule};
use crate::reduction::{orbit_search, reduce_to_first_block, replay, search_to_first_block, HVector};
use crate::simplicial::SimplicialComplex;

pub fn validate_report(m: &QuadraticModule) -> (Value, bool) {
    match m.validate() {
        Ok(()) => (json!({"valid": true, "rank": m.rank(), "param": param_to_value(m.param())}), true),
        Err(v) => (json!({"valid": false, "rank": m.rank(), "param": param_to_value(m.param()), "invariant": v.invariant, "detail": v.detail}), false),
    }
}

fn word_value(word: &[crate::reduction::ElementaryMove]) -> Value {
    serde_json::to_value(word).expect("moves serialize")
}

/// Reduces `v` into the first block, or searches for a word to `target`.
pub fn reduce_report(v: &HVector, target: Option<&HVector>, depth: usize) -> Result<Value> {
    if let Some(w) = target {
        if v.gcd() != w.gcd() {
            return Ok(json!({"found": false, "obstruction": "gcd", "gcd_source": v.gcd().to_string(), "gcd_target": w.gcd().to_string()}));
        }
        return Ok(match orbit_search(v, w, depth)? {
            Some(word) => {
                let verified = replay(&word, v)? == *w;
                json!({"found": true, "word": word_value(&word), "result": vector_to_value(w.coords()), "verified": verified})
            }
            None => json!({"found": false, "depth": depth}),
        });
    }
    if !v.is_unimodular() {
        return Ok(json!({"found": false, "obstruction": "gcd", "gcd_source": v.gcd().to_string()}));
    }
    let r = if v.param().is_skew() { Some(reduce_to_first_block(v)?) } else { search_to_first_block(v, depth)? };
    Ok(match r {
        Some(r) => {
            let verified = replay(&r.word, v)? == r.result && r.result.in_first_block();
            json!({"found": true, "word": word_value(&r.word), "result": vector_to_value(r.result.coords()), "verified": verified})
        }
        None => json!({"found": false, "depth": depth}),
    })
}

pub fn witt_report(m: &QuadraticModule, bound: u32, stable_k: usize) -> Result<Value> {
    let (g, w) = m.witt_index_lower_bound(bound)?;
    let stable = m.stable_witt_lower_bound(stable_k, bound)?;
    Ok(json!({"bound": bound, "g_lower_bound": g, "witness": matrix_to_value(&w.matrix), "stable_k": stable_k, "stable_lower_bound": stable}))
}

pub fn arf_report(m: &QuadraticModule) -> Result<Value> {
    Ok(json!({"arf": u8::from(m.arf_invariant()?)}))
}

pub fn complement_report(f: &QModMorphism) -> Result<Value> {
    let c = orthogonal_complement(f)?;
    Ok(json!({
        "complement": module_to_value(&c.module),
        "basis": matrix_to_value(&c.basis),
        "change_of_basis": matrix_to_value(&c.change_of_basis),
        "verified": c.verify(f),
    }))
}

/// Size, components, homology (when small enough) and the evidence clauses
/// for `g_claim`, which defaults to the bounded Witt index lower bound.
pub fn ka_report(m: &QuadraticModule, bound: u32, max_degree: usize, g_claim: Option<i64>, pi1_budget: usize) -> Result<Value> {
    let k = KaComplex::build(m, bound)?;
    let g = match g_claim {
        Some(g) => g,
        None => m.witt_index_lower_bound(bound)?.0 as i64,
    };
    let edges = k.edges().ok().map(|e| e.len());
    let comps = k.components();
    let (f_vector, homology) = match k.to_simplicial() {
        Ok(x) => (json!(x.f_vector()), {
            let h = x.homology(max_degree);
            json!({"unreduced": groups_to_value(&h.unreduced), "reduced": groups_to_value(&h.reduced)})
        }),
        Err(Error::ResourceLimit(_)) => (Value::Null, Value::Null),
        Err(e) => return Err(e),
    };
    let evidence = k.theorem32_evidence(g, max_degree as i64, pi1_budget)?;
    Ok(json!({
        "rank": m.rank(),
        "param": param_to_value(m.param()),
        "bound": bound,
        "vertices": k.vertex_count(),
        "edges": edges,
        "components": comps,
        "f_vector": f_vector,
        "homology": homology,
        "g_claim": g,
        "evidence": evidence,
    }))
}

pub fn homology_report(x: &SimplicialComplex, max_degree: usize) -> Value {
    let h = x.homology(max_degree);
    json!({"vertices": x.vertex_count(), "f_vector": x.f_vector(), "homology": groups_to_value(&h.unreduced), "reduced": groups_to_value(&h.reduced)})
}

fn cm_value(r: &CmReport, kind: &str) -> Value {
    json!({"check": kind, "n": r.n, "holds": r.holds, "witness": r.witness})
}

pub fn wcm_report(x: &SimplicialComplex, n: i64, pi1_budget: usize) -> Value {
    cm_value(&is_wcm(x, n, pi1_budget), "wcm")
}

pub fn lcm_report(x: &SimplicialComplex, n: i64, pi1_budget: usize) -> Value {
    cm_value(&is_lcm(x, n, pi1_budget), "lcm")
}

pub fn prop25_report(x: &SimplicialComplex, subset: &[usize], n: i64, pi1_budget: usize) -> Result<Value> {
    if let Some(v) = subset.iter().find(|&&v| v >= x.vertex_count()) {
        return Err(Error::Input(format!("vertex {v} out of range")));
    }
    let r = prop25_harness(x, subset, n, pi1_budget);
    Ok(json!({
        "n": r.n,
        "hypothesis_holds": r.hypothesis_holds,
        "hypothesis_witness": r.hypothesis_witness,
        "conclusion_holds": r.conclusion_holds,
        "relative_homology": groups_to_value(&r.relative_homology),
    }))
}

pub fn transitivity_report(m: &QuadraticModule, h0: &QModMorphism, h1: &QModMorphism, bound: u32) -> Result<Value> {
    let k = KaComplex::build(m, bound)?;
    Ok(match k.transitivity_witness(h0, h1)? {
        Some(w) => json!({
            "found": true,
            "path": w.path,
            "automorphism": matrix_to_value(&w.automorphism.matrix),
            "verified": w.automorphism.matrix.mul(&h0.matrix) == h1.matrix && w.automorphism.is_isomorphism(),
        }),
        None => json!({"found": false, "bound": bound}),
    })
}

pub fn cancel_report(m: &QuadraticModule, n: &QuadraticModule, phi: &QModMorphism, bound: u32) -> Result<Value> {
    Ok(match crate::ka::cancellation_witness(m, n, phi, bound)? {
        Some(c) => json!({
            "found": true,
            "path": c.path,
            "alpha": matrix_to_value(&c.alpha.matrix),
            "isomorphism": matrix_to_value(&c.isomorphism.matrix),
            "verified": c.isomorphism.is_isomorphism(),
        }),
        None => json!({"found": false, "bound": bound}),
    })
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Map<String, Value>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                flatten_into(&key(k), x, out);
            }
        }
        Value::Array(xs) => {
            for (i, x) in xs.iter().enumerate() {
                flatten_into(&key(&i.to_string()), x, out);
            }
        }
        other => {
            out.insert(prefix.to_string(), other.clone());
        }
    }
}

/// Flattens a report to CSV with dotted column names: a top-level array
/// becomes one row per element, anything else a single row.
pub fn to_csv(v: &Value) -> String {
    let items: Vec<&Value> = match v {
        Value::Array(xs) => xs.iter().collect(),
        other => vec![other],
    };
    let rows: Vec<Map<String, Value>> = items
        .iter()
        .map(|x| {
            let mut m = Map::new();
            flatten_into("", x, &mut m);
            m
        })
        .collect();
    let mut header: Vec<String> = Vec::new();
    for r in &rows {
        for k in r.keys() {
            if !header.contains(k) {
                header.push(k.clone());
            }
        }
    }
    let cell = |x: Option<&Value>| match x {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    };
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header).expect("in-memory write");
    for r in &rows {
        w.write_record(header.iter().map(|k| cell(r.get(k)))).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 input")
}
