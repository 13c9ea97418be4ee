//! JSON encodings of lattices, Mukai vectors and rational matrices.

use mukai_lab::lattice::{IntegerLattice, MukaiVector};
use mukai_lab::linalg::Matrix;
use mukai_lab::{BigInt, Error, IntMatrix, RatMatrix, Rational, Result};
use serde_json::{json, Value};
use std::path::Path;

pub fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Error::input(format!("malformed JSON in {}: {e}", path.display())))
}

pub fn big(n: &BigInt) -> Value {
    match n.to_string().parse::<i64>() {
        Ok(x) => json!(x),
        Err(_) => json!(n.to_string()),
    }
}

pub fn rational(q: &Rational) -> Value {
    if q.is_integer() {
        big(q.numer())
    } else {
        json!(q.to_string())
    }
}

pub fn parse_int(v: &Value) -> Result<BigInt> {
    match v {
        Value::Number(n) if n.is_i64() => Ok(BigInt::from(n.as_i64().expect("checked"))),
        Value::String(s) => s.trim().parse().map_err(|_| Error::input(format!("`{s}` is not an integer"))),
        other => Err(Error::input(format!("expected an integer, found {other}"))),
    }
}

/// Integers or `"p/q"` strings.
pub fn parse_rational(v: &Value) -> Result<Rational> {
    match v {
        Value::Number(_) => Ok(Rational::from_integer(parse_int(v)?)),
        Value::String(s) => s.trim().parse().map_err(|_| Error::input(format!("`{s}` is not a rational"))),
        other => Err(Error::input(format!("expected a rational, found {other}"))),
    }
}

fn rows(v: &Value, what: &str) -> Result<Vec<Vec<Value>>> {
    let outer = v.as_array().ok_or_else(|| Error::input(format!("{what} must be an array of rows")))?;
    outer
        .iter()
        .map(|r| r.as_array().cloned().ok_or_else(|| Error::input(format!("{what} rows must be arrays"))))
        .collect()
}

/// `{"gram": [[int]]}`.
pub fn parse_lattice(v: &Value) -> Result<IntegerLattice> {
    let gram = v.get("gram").ok_or_else(|| Error::input("lattice object needs a `gram` field"))?;
    let entries = rows(gram, "gram")?
        .iter()
        .map(|r| r.iter().map(parse_int).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    IntegerLattice::new(Matrix::from_rows(entries)?)
}

/// `{"r": int, "c": [int], "s": int}` or the short form `"(r,c,s)"`.
pub fn parse_vector(v: &Value, h2_rank: usize) -> Result<MukaiVector> {
    if let Value::String(s) = v {
        return MukaiVector::parse_short(s, h2_rank);
    }
    let field = |name: &str| v.get(name).ok_or_else(|| Error::input(format!("vector needs a `{name}` field")));
    let c = match field("c")? {
        Value::Array(items) => items.iter().map(parse_int).collect::<Result<Vec<_>>>()?,
        Value::Number(n) if n.as_i64() == Some(0) => vec![BigInt::from(0); h2_rank],
        other => return Err(Error::input(format!("`c` must be a list, found {other}"))),
    };
    if c.len() != h2_rank {
        return Err(Error::input(format!("`c` has {} entries, lattice rank is {h2_rank}", c.len())));
    }
    Ok(MukaiVector::new(parse_int(field("r")?)?, c, parse_int(field("s")?)?))
}

pub fn vector_json(v: &MukaiVector) -> Value {
    json!({ "r": big(&v.r), "c": v.c.iter().map(big).collect::<Vec<_>>(), "s": big(&v.s) })
}

/// `[[rat]]` or `{"matrix": [[rat]]}`.
pub fn parse_rat_matrix(v: &Value) -> Result<RatMatrix> {
    let m = v.get("matrix").unwrap_or(v);
    let entries = rows(m, "matrix")?
        .iter()
        .map(|r| r.iter().map(parse_rational).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(entries)
}

pub fn rat_matrix_json(m: &RatMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(rational).collect::<Vec<_>>()).collect::<Vec<_>>())
}

pub fn int_matrix_json(m: &IntMatrix) -> Value {
    json!(m.to_rows().iter().map(|r| r.iter().map(big).collect::<Vec<_>>()).collect::<Vec<_>>())
}

/// Comma-separated numbers, with optional surrounding brackets.
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    text.trim()
        .trim_start_matches('[')
        .trim_end_matches(']')
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse().map_err(|_| Error::input(format!("bad entry `{}` in {what}", p.trim()))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_round_trip() {
        let q = parse_rational(&json!("-3/6")).unwrap();
        assert_eq!(rational(&q), json!("-1/2"));
        assert_eq!(rational(&parse_rational(&json!(4)).unwrap()), json!(4));
        assert!(parse_rational(&json!("x")).is_err());
    }

    #[test]
    fn vectors_in_both_forms() {
        let a = parse_vector(&json!("(1,0,1)"), 2).unwrap();
        let b = parse_vector(&json!({"r": 1, "c": [0, 0], "s": 1}), 2).unwrap();
        assert_eq!(a, b);
        assert_eq!(vector_json(&a), json!({"r": 1, "c": [0, 0], "s": 1}));
        assert!(parse_vector(&json!({"r": 1, "c": [0], "s": 1}), 2).is_err());
    }

    #[test]
    fn lattice_and_matrix() {
        let l = parse_lattice(&json!({"gram": [[0, 1], [1, 0]]})).unwrap();
        assert_eq!(l.rank(), 2);
        let m = parse_rat_matrix(&json!({"matrix": [["1/2", 0], [0, 2]]})).unwrap();
        assert_eq!(rat_matrix_json(&m), json!([["1/2", 0], [0, 2]]));
        assert!(parse_lattice(&json!({"gram": [1, 2]})).is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(parse_list::<f64>("[0.1, 0.2,0.3,0.4]", "xi").unwrap(), vec![0.1, 0.2, 0.3, 0.4]);
        assert!(parse_list::<i64>("1,a", "alpha").is_err());
    }
}
