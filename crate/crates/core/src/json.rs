//! JSON encodings.
//!
//! Integers are JSON numbers when they fit in 64 bits and decimal strings
//! otherwise; rationals are strings `"a/b"` (or plain integers).
//!
//! | object      | shape |
//! |-------------|-------|
//! | lattice     | `{"name": str?, "gram": [[int]]}` |
//! | sublattice  | `{"ambient": lattice, "basis": [[int]]}` |
//! | torsion form| `{"factors": [int], "bilinear": [["a/b"]], "quadratic": ["a/b"] \| null}` |
//! | isometry    | `{"matrix": [[int]], "source": lattice, "target": lattice}` |
//! | glue graph  | `[[["a/b"], ["a/b"]]]` |

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde_json::{json, Map, Value};

use crate::embed::PrimitiveSublattice;
use crate::isometry::Isometry;
use crate::lattice::Lattice;
use crate::matrix::{IntMatrix, RatMatrix};
use crate::torsion::TorsionQuadraticForm;
use crate::{Error, Result};

fn err(msg: impl Into<String>) -> Error {
    Error::Json(msg.into())
}

pub fn int_to_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

pub fn int_from_json(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                Ok(BigInt::from(i))
            } else if let Some(u) = n.as_u64() {
                Ok(BigInt::from(u))
            } else {
                Err(err(format!("{n} is not an integer")))
            }
        }
        Value::String(s) => s.trim().parse().map_err(|_| err(format!("`{s}` is not an integer"))),
        other => Err(err(format!("expected an integer, got {other}"))),
    }
}

pub fn rational_to_json(x: &BigRational) -> Value {
    json!(x.to_string())
}

/// Parses `"a/b"`, `"a"` or an integer number.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || err(format!("`{s}` is not a rational"));
    let s = s.trim();
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(s.parse().map_err(|_| bad())?)),
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            Ok(BigRational::new(n, d))
        }
    }
}

pub fn rational_from_json(v: &Value) -> Result<BigRational> {
    match v {
        Value::String(s) => parse_rational(s),
        other => int_from_json(other).map(BigRational::from_integer),
    }
}

fn array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| err(format!("{what} must be an array")))
}

fn field<'a>(v: &'a Value, key: &str) -> Result<&'a Value> {
    v.get(key).ok_or_else(|| err(format!("missing field `{key}`")))
}

pub fn int_matrix_to_json(m: &IntMatrix) -> Value {
    Value::Array(
        m.to_rows()
            .iter()
            .map(|r| Value::Array(r.iter().map(int_to_json).collect()))
            .collect(),
    )
}

/// A matrix with `cols` columns (needed when there are no rows).
pub fn int_matrix_from_json(v: &Value, cols: Option<usize>) -> Result<IntMatrix> {
    let rows: Vec<Vec<BigInt>> = array(v, "matrix")?
        .iter()
        .map(|r| array(r, "matrix row")?.iter().map(int_from_json).collect())
        .collect::<Result<_>>()?;
    let c = cols.or_else(|| rows.first().map(Vec::len)).unwrap_or(0);
    IntMatrix::from_rows_with_cols(rows, c).map_err(|_| err("matrix rows have different lengths"))
}

pub fn int_vec_to_json(v: &[BigInt]) -> Value {
    Value::Array(v.iter().map(int_to_json).collect())
}

pub fn rational_vec_to_json(v: &[BigRational]) -> Value {
    Value::Array(v.iter().map(rational_to_json).collect())
}

pub fn rational_vec_from_json(v: &Value) -> Result<Vec<BigRational>> {
    array(v, "rational vector")?.iter().map(rational_from_json).collect()
}

pub fn lattice_to_json(l: &Lattice) -> Value {
    let mut m = Map::new();
    if let Some(n) = l.name() {
        m.insert("name".into(), json!(n));
    }
    m.insert("gram".into(), int_matrix_to_json(l.gram()));
    Value::Object(m)
}

pub fn lattice_from_json(v: &Value) -> Result<Lattice> {
    let g = int_matrix_from_json(field(v, "gram")?, None)?;
    let l = Lattice::new(g)?;
    Ok(match v.get("name").and_then(Value::as_str) {
        Some(n) => l.named(n),
        None => l,
    })
}

pub fn sublattice_to_json(s: &PrimitiveSublattice) -> Value {
    json!({"ambient": lattice_to_json(s.ambient()), "basis": int_matrix_to_json(s.basis())})
}

pub fn sublattice_from_json(v: &Value) -> Result<PrimitiveSublattice> {
    let ambient = lattice_from_json(field(v, "ambient")?)?;
    let basis = int_matrix_from_json(field(v, "basis")?, Some(ambient.rank()))?;
    PrimitiveSublattice::from_basis(&ambient, basis)
}

pub fn torsion_to_json(d: &TorsionQuadraticForm) -> Value {
    let k = d.length();
    let bilinear: Vec<Value> = (0..k)
        .map(|i| Value::Array((0..k).map(|j| rational_to_json(&d.bilinear()[(i, j)])).collect()))
        .collect();
    json!({
        "factors": int_vec_to_json(d.factors()),
        "bilinear": bilinear,
        "quadratic": d.quadratic().map(rational_vec_to_json),
    })
}

pub fn torsion_from_json(v: &Value) -> Result<TorsionQuadraticForm> {
    let factors: Vec<BigInt> = array(field(v, "factors")?, "factors")?
        .iter()
        .map(int_from_json)
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<BigRational>> = array(field(v, "bilinear")?, "bilinear")?
        .iter()
        .map(rational_vec_from_json)
        .collect::<Result<_>>()?;
    let k = factors.len();
    let bilinear =
        RatMatrix::from_rows_with_cols(rows, k).map_err(|_| err("bilinear rows have different lengths"))?;
    let quadratic = match v.get("quadratic") {
        None | Some(Value::Null) => None,
        Some(q) => Some(rational_vec_from_json(q)?),
    };
    TorsionQuadraticForm::from_parts(factors, bilinear, quadratic)
}

pub fn isometry_to_json(f: &Isometry) -> Value {
    json!({
        "matrix": int_matrix_to_json(f.matrix()),
        "source": lattice_to_json(f.source()),
        "target": lattice_to_json(f.target()),
    })
}

pub fn isometry_from_json(v: &Value) -> Result<Isometry> {
    let source = lattice_from_json(field(v, "source")?)?;
    let target = lattice_from_json(field(v, "target")?)?;
    let m = int_matrix_from_json(field(v, "matrix")?, Some(source.rank()))?;
    Isometry::new(source, target, m)
}

pub type GlueGraph = Vec<(Vec<BigRational>, Vec<BigRational>)>;

pub fn glue_graph_to_json(g: &[(Vec<BigRational>, Vec<BigRational>)]) -> Value {
    Value::Array(
        g.iter()
            .map(|(a, c)| json!([rational_vec_to_json(a), rational_vec_to_json(c)]))
            .collect(),
    )
}

pub fn glue_graph_from_json(v: &Value) -> Result<GlueGraph> {
    array(v, "glue graph")?
        .iter()
        .map(|pair| match pair.as_array().map(Vec::as_slice) {
            Some([a, c]) => Ok((rational_vec_from_json(a)?, rational_vec_from_json(c)?)),
            _ => Err(err("glue graph entries must be pairs")),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{a2, og10};
    use crate::embed::saturate;

    #[test]
    fn lattice_round_trip() {
        let l = og10();
        let back = lattice_from_json(&lattice_to_json(&l)).unwrap();
        assert_eq!(back, l);
        assert_eq!(back.name(), Some("OG10"));
    }

    #[test]
    fn big_entries_use_strings() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let v = int_to_json(&big);
        assert!(v.is_string());
        assert_eq!(int_from_json(&v).unwrap(), big);
        assert!(int_from_json(&json!(1.5)).is_err());
    }

    #[test]
    fn torsion_round_trip() {
        let d = a2().rescale_int(2).unwrap().discriminant_group();
        let back = torsion_from_json(&torsion_to_json(&d)).unwrap();
        assert_eq!(back.factors(), d.factors());
        assert_eq!(back.quadratic(), d.quadratic());
    }

    #[test]
    fn sublattice_and_isometry_round_trip() {
        let m = a2();
        let s = saturate(&m, &[vec![2.into(), 4.into()]]).unwrap();
        assert_eq!(sublattice_from_json(&sublattice_to_json(&s)).unwrap(), s);
        let f = Isometry::negation(&m);
        assert_eq!(isometry_from_json(&isometry_to_json(&f)).unwrap(), f);
    }

    #[test]
    fn graph_round_trip() {
        let g = vec![(vec![parse_rational("1/2").unwrap()], vec![parse_rational("-1/2").unwrap()])];
        assert_eq!(glue_graph_from_json(&glue_graph_to_json(&g)).unwrap(), g);
        assert!(parse_rational("1/0").is_err());
        assert!(glue_graph_from_json(&json!([[["1/2"]]])).is_err());
    }
}
