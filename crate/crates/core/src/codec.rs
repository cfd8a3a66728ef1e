//! Sparse JSON rows `[index..., re, im]` shared by the coefficient formats.

use num_complex::Complex64;
use serde_json::{json, Value};

use crate::error::{Result, TwcError};

pub(crate) fn encode_row(index: &[usize], value: Complex64) -> Value {
    let mut row: Vec<Value> = index.iter().map(|&i| json!(i)).collect();
    row.push(json!(value.re));
    row.push(json!(value.im));
    Value::Array(row)
}

/// Splits a row into `n_index` non-negative integers and a complex value.
pub(crate) fn decode_row(row: &Value, n_index: usize) -> Result<(Vec<usize>, Complex64)> {
    let items = row
        .as_array()
        .ok_or_else(|| TwcError::Format(format!("entry {row} is not an array")))?;
    if items.len() != n_index + 2 {
        return Err(TwcError::Format(format!(
            "entry {row} has {} items, expected {}",
            items.len(),
            n_index + 2
        )));
    }
    let index = items[..n_index]
        .iter()
        .map(|v| {
            v.as_u64()
                .map(|u| u as usize)
                .ok_or_else(|| TwcError::Format(format!("index {v} is not a non-negative integer")))
        })
        .collect::<Result<Vec<_>>>()?;
    let num = |v: &Value| {
        v.as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| TwcError::Format(format!("value {v} is not a finite number")))
    };
    Ok((index, Complex64::new(num(&items[n_index])?, num(&items[n_index + 1])?)))
}

pub(crate) fn read_header(doc: &Value) -> Result<(usize, usize)> {
    let field = |name: &str| {
        doc.get(name)
            .and_then(Value::as_u64)
            .map(|v| v as usize)
            .ok_or_else(|| TwcError::Format(format!("missing or invalid \"{name}\"")))
    };
    Ok((field("d")?, field("n_max")?))
}
