//! Canonical JSON rendering and content digests.
//!
//! The canonical form is compact JSON with object keys sorted, and every
//! floating point number written with 17 significant digits in scientific
//! notation. Integers are written as plain integers. Two values that compare
//! equal always render to the same bytes, which makes the form suitable as a
//! hashing preimage for fingerprints and cache keys.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Render any serializable value in canonical form.
pub fn to_canonical_string<T: Serialize>(value: &T) -> String {
    let value = serde_json::to_value(value).expect("value is representable as JSON");
    let mut out = String::new();
    write_value(&value, &mut out);
    out
}

/// Hex-encoded SHA-256 of `bytes`.
pub fn sha256_hex(bytes: impl AsRef<[u8]>) -> String {
    hex::encode(Sha256::digest(bytes.as_ref()))
}

/// Hex-encoded SHA-256 of the canonical rendering of `value`.
pub fn digest<T: Serialize>(value: &T) -> String {
    sha256_hex(to_canonical_string(value))
}

/// Fixed 17-significant-digit rendering used for floats in canonical text.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_value(value: &Value, out: &mut String) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("strings always serialize"));
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            out.push('{');
            for (i, key) in keys.into_iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("strings always serialize"));
                out.push(':');
                write_value(&map[key], out);
            }
            out.push('}');
        }
    }
}
