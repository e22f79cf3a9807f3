//! Text encodings shared by every file format and JSON document.
//!
//! All floating-point numbers are written in scientific notation with 17
//! significant digits, which round-trips any `f64` exactly.

use std::str::FromStr;

use serde_json::{Number, Value};

/// Formats `x` with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{:.16e}", x)
}

/// JSON number carrying the 17-significant-digit text verbatim.
///
/// Non-finite values have no JSON encoding and become `null`.
pub fn num(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Value::Number(Number::from_str(&fmt17(x)).expect("formatted float is a valid JSON number"))
}

pub fn num_array(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

/// Serializes a document with a trailing newline.
pub fn to_json_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}
