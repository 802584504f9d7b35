//! JSON encodings for modules, morphisms, vectors, complexes and homology.
//!
//! Arithmetic values (matrix entries, vector coordinates, `μ` values,
//! torsion coefficients) are written as decimal strings; on input both
//! strings and JSON integers are accepted. Counts and indices stay numbers.

use num_bigint::BigInt;
use serde_json::{json, Value};

use crate::chain::{HomologyGroup, HomologyReport};
use crate::error::{Error, Result};
use crate::form::{FormParameter, LambdaSub, MuValue, Sign};
use crate::matrix::IntMatrix;
use crate::quadratic::{IntVector, QModMorphism, QuadraticModule};
use crate::simplicial::SimplicialComplex;

fn parse_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Parse(msg.into()))
}

pub fn parse_json(text: &str) -> Result<Value> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

pub fn int_from_value(v: &Value) -> Result<BigInt> {
    match v {
        Value::String(s) => s.trim().parse().map_err(|_| Error::Parse(format!("not an integer: {s:?}"))),
        Value::Number(n) if n.is_i64() || n.is_u64() => Ok(n.to_string().parse().expect("integral JSON number")),
        other => parse_err(format!("expected an integer, got {other}")),
    }
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| Error::Parse(format!("missing field {key:?}")))
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| Error::Parse(format!("{what} must be an array")))
}

fn usize_from_value(v: &Value, what: &str) -> Result<usize> {
    v.as_u64().map(|n| n as usize).ok_or_else(|| Error::Parse(format!("{what} must be a non-negative integer")))
}

pub fn vector_to_value(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

pub fn vector_from_value(v: &Value) -> Result<IntVector> {
    array(v, "vector")?.iter().map(int_from_value).collect()
}

pub fn matrix_to_value(m: &IntMatrix) -> Value {
    Value::Array(m.to_rows().iter().map(|r| vector_to_value(r)).collect())
}

/// Reads a row-major matrix; `cols` fixes the width of a matrix with no rows.
pub fn matrix_from_value(v: &Value, cols: Option<usize>) -> Result<IntMatrix> {
    let rows: Vec<IntVector> = array(v, "matrix")?.iter().map(vector_from_value).collect::<Result<_>>()?;
    if rows.is_empty() {
        return Ok(IntMatrix::zeros(0, cols.unwrap_or(0)));
    }
    let width = rows[0].len();
    if rows.iter().any(|r| r.len() != width) {
        return parse_err("matrix rows have different lengths");
    }
    if cols.is_some_and(|c| c != width) {
        return parse_err(format!("matrix has {width} columns, expected {}", cols.unwrap_or(0)));
    }
    Ok(IntMatrix::from_rows(&rows))
}

pub fn param_from_value(v: &Value) -> Result<FormParameter> {
    let eps = match field(v, "epsilon")? {
        Value::String(s) => s.trim().trim_start_matches('+').parse::<i64>().map_err(|_| Error::Parse(format!("bad epsilon {s:?}")))?,
        Value::Number(n) => n.as_i64().ok_or_else(|| Error::Parse("bad epsilon".into()))?,
        other => return parse_err(format!("bad epsilon {other}")),
    };
    let lambda = field(v, "lambda")?.as_str().ok_or_else(|| Error::Parse("lambda must be a string".into()))?;
    let lambda = LambdaSub::parse(lambda).map_err(|e| Error::Parse(e.to_string()))?;
    FormParameter::new(Sign::from_i64(eps).map_err(|e| Error::Parse(e.to_string()))?, lambda)
}

pub fn param_to_value(p: FormParameter) -> Value {
    json!({"epsilon": p.eps(), "lambda": p.lambda().name()})
}

/// `{"epsilon", "lambda", "gram", "mu"}`. Only shapes are checked; the form
/// axioms are left to [`QuadraticModule::validate`].
pub fn module_from_value(v: &Value) -> Result<QuadraticModule> {
    let param = param_from_value(v)?;
    let mu: Vec<BigInt> = array(field(v, "mu")?, "mu")?.iter().map(int_from_value).collect::<Result<_>>()?;
    let gram = matrix_from_value(field(v, "gram")?, Some(mu.len()))?;
    let mu: Vec<MuValue> = mu.iter().map(|m| MuValue::reduce(param.lambda(), m)).collect();
    QuadraticModule::new(param, gram, mu).map_err(|e| Error::Parse(e.to_string()))
}

pub fn module_to_value(m: &QuadraticModule) -> Value {
    let mu: Vec<Value> = m.mu_basis().iter().map(|x| Value::String(x.representative().to_string())).collect();
    json!({"epsilon": m.param().eps(), "lambda": m.param().lambda().name(), "gram": matrix_to_value(m.gram()), "mu": mu})
}

pub fn morphism_to_value(f: &QModMorphism) -> Value {
    json!({"matrix": matrix_to_value(&f.matrix)})
}

/// Reads `{"matrix"}` as a morphism `source → target`, checking it.
pub fn morphism_from_value(v: &Value, source: &QuadraticModule, target: &QuadraticModule) -> Result<QModMorphism> {
    let m = matrix_from_value(field(v, "matrix")?, Some(source.rank()))?;
    let m = if m.rows() == 0 && target.rank() == 0 { IntMatrix::zeros(0, source.rank()) } else { m };
    QModMorphism::new(source.clone(), target.clone(), m)
}

pub fn complex_to_value(x: &SimplicialComplex) -> Value {
    let mut out = json!({"vertices": x.vertex_count(), "facets": x.facets(), "flag": x.is_flag_declared()});
    if x.is_flag_declared() {
        let edges: Vec<[usize; 2]> = x.edges().into_iter().map(|(a, b)| [a, b]).collect();
        out["edges"] = json!(edges);
    }
    out
}

/// `{"vertices": n, "facets": [...]}` or, with `"flag": true`, `"edges"`.
/// Every label below `n` is a vertex.
pub fn complex_from_value(v: &Value) -> Result<SimplicialComplex> {
    let n = usize_from_value(field(v, "vertices")?, "vertices")?;
    let flag = v.get("flag").and_then(Value::as_bool).unwrap_or(false);
    let index = |x: &Value| -> Result<usize> {
        let i = usize_from_value(x, "vertex label")?;
        if i >= n {
            return parse_err(format!("vertex {i} out of range for {n} vertices"));
        }
        Ok(i)
    };
    if flag && v.get("edges").is_some() {
        let edges = array(field(v, "edges")?, "edges")?
            .iter()
            .map(|e| match array(e, "edge")?.as_slice() {
                [a, b] => Ok((index(a)?, index(b)?)),
                _ => parse_err("edges must have two endpoints"),
            })
            .collect::<Result<Vec<_>>>()?;
        return SimplicialComplex::flag(n, &edges).map_err(|e| Error::Parse(e.to_string()));
    }
    let mut facets: Vec<Vec<usize>> = array(field(v, "facets")?, "facets")?.iter().map(|f| array(f, "facet")?.iter().map(index).collect()).collect::<Result<_>>()?;
    let mut covered = vec![false; n];
    for &i in facets.iter().flatten() {
        covered[i] = true;
    }
    facets.extend((0..n).filter(|&i| !covered[i]).map(|i| vec![i]));
    SimplicialComplex::new(n, facets).map_err(|e| Error::Parse(e.to_string()))
}

pub fn group_to_value(g: &HomologyGroup) -> Value {
    let torsion: Vec<String> = g.torsion.iter().map(ToString::to_string).collect();
    json!({"degree": g.degree, "betti": g.betti, "torsion": torsion})
}

pub fn groups_to_value(gs: &[HomologyGroup]) -> Value {
    Value::Array(gs.iter().map(group_to_value).collect())
}

pub fn group_from_value(v: &Value) -> Result<HomologyGroup> {
    let degree = field(v, "degree")?.as_i64().ok_or_else(|| Error::Parse("degree must be an integer".into()))?;
    let betti = usize_from_value(field(v, "betti")?, "betti")?;
    let torsion = array(field(v, "torsion")?, "torsion")?.iter().map(int_from_value).collect::<Result<_>>()?;
    Ok(HomologyGroup { degree, betti, torsion })
}

pub fn homology_to_value(h: &HomologyReport) -> Value {
    json!({"unreduced": groups_to_value(&h.unreduced), "reduced": groups_to_value(&h.reduced)})
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn module_round_trip() {
        for p in FormParameter::ALL {
            let m = QuadraticModule::hyperbolic(p, 2);
            let v = module_to_value(&m);
            assert_eq!(v["gram"][0][1], json!("1"));
            assert_eq!(module_from_value(&v).unwrap(), m);
        }
    }

    #[test]
    fn numbers_and_strings_are_both_accepted() {
        let v = json!({"epsilon": -1, "lambda": "even", "gram": [[0, "1"], [-1, 0]], "mu": ["1", 0]});
        let m = module_from_value(&v).unwrap();
        assert_eq!(m.mu_basis()[0], MuValue::Bit(true));
        let big = json!({"epsilon": "+1", "lambda": "zero", "gram": [["123456789012345678901234567890"]], "mu": ["61728394506172839450617283945"]});
        assert!(module_from_value(&big).unwrap().validate().is_ok());
    }

    #[test]
    fn malformed_modules_are_parse_errors() {
        for v in [json!({"epsilon": 2, "lambda": "even", "gram": [], "mu": []}), json!({"epsilon": 1, "lambda": "zero", "gram": [[1, 2]], "mu": [0]}), json!({"lambda": "all"}), json!({"epsilon": 1, "lambda": "zero", "gram": [["x"]], "mu": [0]})] {
            assert!(matches!(module_from_value(&v), Err(Error::Parse(_))), "{v}");
        }
    }

    #[test]
    fn complex_round_trip() {
        let x = SimplicialComplex::flag(4, &[(0, 1), (1, 2), (0, 2)]).unwrap();
        let v = complex_to_value(&x);
        assert_eq!(v["edges"], json!([[0, 1], [0, 2], [1, 2]]));
        let y = complex_from_value(&v).unwrap();
        assert_eq!(y.facets(), x.facets());
        let z = complex_from_value(&json!({"vertices": 3, "facets": [[0, 1]]})).unwrap();
        assert_eq!(z.vertices(), vec![0, 1, 2]);
        assert!(complex_from_value(&json!({"vertices": 2, "facets": [[0, 5]]})).is_err());
    }

    #[test]
    fn torsion_is_written_as_strings() {
        let h = crate::simplicial::projective_plane_6().homology(2);
        let v = homology_to_value(&h);
        assert_eq!(v["unreduced"][1], json!({"degree": 1, "betti": 0, "torsion": ["2"]}));
        assert_eq!(group_from_value(&v["unreduced"][1]).unwrap(), h.unreduced[1]);
    }
}
