//! Text format for tensors and matrices.
//!
//! A tensor file is one JSON object:
//!
//! ```text
//! {"dims":[l,m,n],"entries":[...]}
//! ```
//!
//! with `entries` flat in `k`-fastest order. Exact entries are strings
//! `"p/q"`, floating entries are JSON numbers. Matrices use the same shape
//! with `dims` = `[rows, cols]` and row-major entries.

use serde_json::Value;

use crate::error::{Error, Result};
use crate::scalar::{format_rational, parse_rational, Rational, ScalarKind};

use super::{Matrix, Tensor3};

#[derive(Debug, Clone, PartialEq)]
pub enum AnyTensor {
    Exact(Tensor3<Rational>),
    Float(Tensor3<f64>),
}

impl AnyTensor {
    pub fn kind(&self) -> ScalarKind {
        match self {
            AnyTensor::Exact(_) => ScalarKind::Exact,
            AnyTensor::Float(_) => ScalarKind::Float,
        }
    }

    pub fn dims(&self) -> [usize; 3] {
        match self {
            AnyTensor::Exact(t) => t.dims(),
            AnyTensor::Float(t) => t.dims(),
        }
    }

    pub fn to_f64(&self) -> Tensor3<f64> {
        match self {
            AnyTensor::Exact(t) => t.to_f64(),
            AnyTensor::Float(t) => t.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyMatrix {
    Exact(Matrix<Rational>),
    Float(Matrix<f64>),
}

impl AnyMatrix {
    pub fn to_f64(&self) -> Matrix<f64> {
        match self {
            AnyMatrix::Exact(m) => m.to_f64(),
            AnyMatrix::Float(m) => m.clone(),
        }
    }
}

pub fn tensor_to_string_exact(t: &Tensor3<Rational>) -> String {
    let entries: Vec<Value> = t
        .entries()
        .iter()
        .map(|r| Value::String(format_rational(r)))
        .collect();
    render(&t.dims(), entries)
}

pub fn tensor_to_string_float(t: &Tensor3<f64>) -> String {
    let entries: Vec<Value> = t.entries().iter().map(|&x| float_value(x)).collect();
    render(&t.dims(), entries)
}

pub fn tensor_to_string(t: &AnyTensor) -> String {
    match t {
        AnyTensor::Exact(t) => tensor_to_string_exact(t),
        AnyTensor::Float(t) => tensor_to_string_float(t),
    }
}

pub fn matrix_to_string_exact(m: &Matrix<Rational>) -> String {
    let entries = m
        .data()
        .iter()
        .map(|r| Value::String(format_rational(r)))
        .collect();
    render(&[m.rows(), m.cols()], entries)
}

fn float_value(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn render(dims: &[usize], entries: Vec<Value>) -> String {
    let obj = serde_json::json!({ "dims": dims, "entries": entries });
    let mut s = obj.to_string();
    s.push('\n');
    s
}

/// Parse a tensor file; the scalar kind is taken from the entry literals.
pub fn parse_tensor(text: &str) -> Result<AnyTensor> {
    let (dims, entries) = parse_object(text, 3)?;
    let dims = [dims[0], dims[1], dims[2]];
    match parse_entries(text, &entries)? {
        Entries::Exact(v) => Ok(AnyTensor::Exact(
            Tensor3::new(dims, v).map_err(|e| at_start(text, e))?,
        )),
        Entries::Float(v) => Ok(AnyTensor::Float(
            Tensor3::new(dims, v).map_err(|e| at_start(text, e))?,
        )),
    }
}

pub fn parse_matrix(text: &str) -> Result<AnyMatrix> {
    let (dims, entries) = parse_object(text, 2)?;
    match parse_entries(text, &entries)? {
        Entries::Exact(v) => Ok(AnyMatrix::Exact(
            Matrix::new(dims[0], dims[1], v).map_err(|e| at_start(text, e))?,
        )),
        Entries::Float(v) => Ok(AnyMatrix::Float(
            Matrix::new(dims[0], dims[1], v).map_err(|e| at_start(text, e))?,
        )),
    }
}

enum Entries {
    Exact(Vec<Rational>),
    Float(Vec<f64>),
}

fn parse_object(text: &str, rank: usize) -> Result<(Vec<usize>, Vec<Value>)> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    let obj = value
        .as_object()
        .ok_or_else(|| parse_error(text, "{", "expected a JSON object"))?;
    let dims = obj
        .get("dims")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_error(text, "{", "missing array field \"dims\""))?;
    if dims.len() != rank {
        return Err(parse_error(
            text,
            "\"dims\"",
            &format!("\"dims\" must have {rank} entries"),
        ));
    }
    let dims: Vec<usize> = dims
        .iter()
        .map(|d| d.as_u64().filter(|&d| d > 0).map(|d| d as usize))
        .collect::<Option<_>>()
        .ok_or_else(|| parse_error(text, "\"dims\"", "\"dims\" must be positive integers"))?;
    let entries = obj
        .get("entries")
        .and_then(Value::as_array)
        .ok_or_else(|| parse_error(text, "{", "missing array field \"entries\""))?
        .clone();
    Ok((dims, entries))
}

fn parse_entries(text: &str, entries: &[Value]) -> Result<Entries> {
    let exact = entries.first().map(Value::is_string).unwrap_or(true);
    if exact {
        let mut out = Vec::with_capacity(entries.len());
        for v in entries {
            let s = v.as_str().ok_or_else(|| {
                parse_error(text, &v.to_string(), "mixed exact and floating entries")
            })?;
            out.push(
                parse_rational(s)
                    .map_err(|e| parse_error(text, &format!("\"{s}\""), &e.to_string()))?,
            );
        }
        Ok(Entries::Exact(out))
    } else {
        let mut out = Vec::with_capacity(entries.len());
        for v in entries {
            let x = v.as_f64().ok_or_else(|| {
                parse_error(text, &v.to_string(), "mixed exact and floating entries")
            })?;
            out.push(x);
        }
        Ok(Entries::Float(out))
    }
}

/// Locate `needle` in the source for error reporting; falls back to 1:1.
fn parse_error(text: &str, needle: &str, message: &str) -> Error {
    let (line, column) = text
        .find(needle)
        .map(|off| line_col(text, off))
        .unwrap_or((1, 1));
    Error::Parse {
        line,
        column,
        message: message.to_string(),
    }
}

fn at_start(text: &str, e: Error) -> Error {
    parse_error(text, "\"entries\"", &e.to_string())
}

pub(crate) fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset];
    let line = before.matches('\n').count() + 1;
    let column = before.rfind('\n').map(|p| offset - p).unwrap_or(offset + 1);
    (line, column)
}
