//! JSON file formats: operator files, function files, and the `[re, im]`
//! encoding of complex scalars used throughout the reports.
//!
//! Numeric fields accept either JSON numbers or decimal strings and are
//! parsed as double precision. Emitted floats use the shortest decimal
//! representation that round-trips.

use ndarray::Array2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::KernelOperator;
use crate::space::{CFunction, FiniteMeasureSpace};

/// Serde adapter: a complex scalar as the two-element array `[re, im]`.
pub mod complex_pair {
    use num_complex::Complex64;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Complex64, ser: S) -> Result<S::Ok, S::Error> {
        [v.re, v.im].serialize(ser)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Complex64, D::Error> {
        let raw = <[super::Flexible; 2]>::deserialize(de)?;
        Ok(Complex64::new(
            raw[0].to_f64().map_err(D::Error::custom)?,
            raw[1].to_f64().map_err(D::Error::custom)?,
        ))
    }
}

/// A JSON scalar that is either a number or a decimal string.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum Flexible {
    Number(f64),
    Text(String),
}

impl Flexible {
    fn to_f64(&self) -> Result<f64, String> {
        match self {
            Flexible::Number(x) => Ok(*x),
            Flexible::Text(s) => s
                .trim()
                .parse::<f64>()
                .map_err(|e| format!("cannot parse {s:?} as a number: {e}")),
        }
    }
}

fn to_weights(raw: &[Flexible]) -> Result<Vec<f64>> {
    raw.iter()
        .map(|v| v.to_f64().map_err(Error::InvalidInput))
        .collect()
}

fn to_complex(raw: &[Flexible; 2]) -> Result<Complex64> {
    Ok(Complex64::new(
        raw[0].to_f64().map_err(Error::InvalidInput)?,
        raw[1].to_f64().map_err(Error::InvalidInput)?,
    ))
}

#[derive(Debug, Deserialize)]
struct OperatorFileRaw {
    weights: Vec<Flexible>,
    matrix: Vec<Vec<[Flexible; 2]>>,
}

/// Parses an operator file: `{ "weights": [...], "matrix": [[[re, im], ...], ...] }`.
pub fn parse_operator_json(text: &str) -> Result<KernelOperator> {
    let raw: OperatorFileRaw = serde_json::from_str(text)?;
    let weights = to_weights(&raw.weights)?;
    let space = FiniteMeasureSpace::new(&weights)?;
    let n = space.n();
    if raw.matrix.len() != n || raw.matrix.iter().any(|row| row.len() != n) {
        return Err(Error::invalid(format!(
            "matrix must be {n}x{n} to match the weights"
        )));
    }
    let mut entries = Array2::from_elem((n, n), Complex64::ZERO);
    for (i, row) in raw.matrix.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            entries[[i, j]] = to_complex(cell)?;
        }
    }
    KernelOperator::new(space, entries)
}

pub fn read_operator_file(path: &std::path::Path) -> Result<KernelOperator> {
    let text = std::fs::read_to_string(path)?;
    parse_operator_json(&text)
}

/// Serializable form of an operator, mirroring the input format.
#[derive(Debug, Serialize)]
pub struct OperatorJson {
    pub weights: Vec<f64>,
    pub matrix: Vec<Vec<[f64; 2]>>,
}

pub fn operator_to_json(t: &KernelOperator) -> OperatorJson {
    let n = t.n();
    OperatorJson {
        weights: t.space().weights().to_vec(),
        matrix: (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let v = t.entry(i, j);
                        [v.re, v.im]
                    })
                    .collect()
            })
            .collect(),
    }
}

#[derive(Debug, Deserialize)]
struct FunctionFileRaw {
    space: Vec<Flexible>,
    values: Vec<[Flexible; 2]>,
}

/// Parses a function file: `{ "space": [w0, ...], "values": [[re, im], ...] }`.
pub fn parse_function_json(text: &str) -> Result<CFunction> {
    let raw: FunctionFileRaw = serde_json::from_str(text)?;
    let weights = to_weights(&raw.space)?;
    let space = FiniteMeasureSpace::new(&weights)?;
    let values = raw
        .values
        .iter()
        .map(to_complex)
        .collect::<Result<Vec<_>>>()?;
    CFunction::new(space, values)
}

pub fn read_function_file(path: &std::path::Path) -> Result<CFunction> {
    let text = std::fs::read_to_string(path)?;
    parse_function_json(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operator_file_accepts_numbers_and_strings() {
        let text = r#"{
            "weights": [0.5, "0.5"],
            "matrix": [[[0, 0], ["1", 0]], [[1, "0"], [0, 0]]]
        }"#;
        let t = parse_operator_json(text).unwrap();
        assert_eq!(t.entry(0, 1), Complex64::ONE);
        assert_eq!(t.entry(1, 0), Complex64::ONE);
        assert_eq!(t.space().weights(), &[0.5, 0.5]);
    }

    #[test]
    fn operator_file_rejects_shape_mismatch() {
        let text = r#"{ "weights": [1.0], "matrix": [[[0,0],[0,0]]] }"#;
        assert!(parse_operator_json(text).is_err());
    }

    #[test]
    fn operator_file_rejects_truncated_json() {
        let text = r#"{ "weights": [1.0], "matrix": [[[0,0"#;
        match parse_operator_json(text) {
            Err(Error::Json(e)) => {
                assert!(e.line() >= 1);
            }
            other => panic!("expected a JSON error, got {other:?}"),
        }
    }

    #[test]
    fn function_file_round_trip() {
        let text = r#"{ "space": [1, 2], "values": [[1.5, -0.5], ["0.25", "0"]] }"#;
        let f = parse_function_json(text).unwrap();
        assert_eq!(f.value(0), Complex64::new(1.5, -0.5));
        assert_eq!(f.value(1), Complex64::new(0.25, 0.0));
    }

    #[test]
    fn operator_json_round_trips_through_parse() {
        let t = crate::operator::random_symmetric_contraction(
            4,
            1,
            crate::operator::RandomClass::General,
            None,
        )
        .unwrap();
        let json = serde_json::to_string(&operator_to_json(&t)).unwrap();
        let back = parse_operator_json(&json).unwrap();
        assert_eq!(back.entries(), t.entries());
        assert_eq!(back.space(), t.space());
    }
}
