use std::collections::BTreeMap;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};

pub const DEPTH: &str = "depth";
pub const SIZE: &str = "size";
pub const TWO_QUBIT: &str = "2q";
pub const ERR: &str = "err";
pub const TIME: &str = "time";
pub const ENTROPY: &str = "entropy";
pub const P_MAX: &str = "p_max";

/// A metric value with explicit invalid states.
///
/// On the wire: a JSON number when finite, the strings `"nan"`, `"inf"` or
/// `"-inf"` when non-finite, and `null` when missing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Finite(f64),
    NonFinite(f64),
    Missing,
}

impl MetricValue {
    pub fn from_f64(x: f64) -> Self {
        if x.is_finite() {
            MetricValue::Finite(x)
        } else {
            MetricValue::NonFinite(x)
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            MetricValue::Finite(x) => Some(x),
            _ => None,
        }
    }
}

impl From<f64> for MetricValue {
    fn from(x: f64) -> Self {
        MetricValue::from_f64(x)
    }
}

impl From<Option<f64>> for MetricValue {
    fn from(x: Option<f64>) -> Self {
        x.map_or(MetricValue::Missing, MetricValue::from_f64)
    }
}

impl Serialize for MetricValue {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match *self {
            MetricValue::Finite(x) => s.serialize_f64(x),
            MetricValue::NonFinite(x) if x.is_nan() => s.serialize_str("nan"),
            MetricValue::NonFinite(x) if x > 0.0 => s.serialize_str("inf"),
            MetricValue::NonFinite(_) => s.serialize_str("-inf"),
            MetricValue::Missing => s.serialize_none(),
        }
    }
}

impl<'de> Deserialize<'de> for MetricValue {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = MetricValue;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number, null, or one of \"nan\", \"inf\", \"-inf\"")
            }
            fn visit_f64<E>(self, v: f64) -> Result<MetricValue, E> {
                Ok(MetricValue::from_f64(v))
            }
            fn visit_i64<E>(self, v: i64) -> Result<MetricValue, E> {
                Ok(MetricValue::Finite(v as f64))
            }
            fn visit_u64<E>(self, v: u64) -> Result<MetricValue, E> {
                Ok(MetricValue::Finite(v as f64))
            }
            fn visit_unit<E>(self) -> Result<MetricValue, E> {
                Ok(MetricValue::Missing)
            }
            fn visit_none<E>(self) -> Result<MetricValue, E> {
                Ok(MetricValue::Missing)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<MetricValue, E> {
                match v {
                    "nan" => Ok(MetricValue::NonFinite(f64::NAN)),
                    "inf" => Ok(MetricValue::NonFinite(f64::INFINITY)),
                    "-inf" => Ok(MetricValue::NonFinite(f64::NEG_INFINITY)),
                    other => Err(E::invalid_value(de::Unexpected::Str(other), &self)),
                }
            }
        }
        d.deserialize_any(V)
    }
}

/// Named scalar metrics for one compiled (and possibly executed) candidate.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub values: BTreeMap<String, MetricValue>,
    /// Set when the candidate failed; such records always score `+inf`.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub failed: bool,
}

impl MetricRecord {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn failure() -> Self {
        MetricRecord {
            values: BTreeMap::new(),
            failed: true,
        }
    }

    pub fn set(&mut self, key: &str, value: impl Into<MetricValue>) -> &mut Self {
        assert!(!key.is_empty(), "metric keys must be non-empty");
        self.values.insert(key.to_string(), value.into());
        self
    }

    pub fn with(mut self, key: &str, value: impl Into<MetricValue>) -> Self {
        self.set(key, value);
        self
    }

    pub fn get(&self, key: &str) -> MetricValue {
        self.values.get(key).copied().unwrap_or(MetricValue::Missing)
    }

    pub fn finite(&self, key: &str) -> Option<f64> {
        self.get(key).finite()
    }

    pub fn merge(&mut self, other: &MetricRecord) {
        for (k, v) in &other.values {
            self.values.insert(k.clone(), *v);
        }
        self.failed |= other.failed;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wire_format() {
        let r = MetricRecord::new()
            .with("a", 1.5)
            .with("b", f64::INFINITY)
            .with("c", MetricValue::Missing)
            .with("d", f64::NAN);
        let s = serde_json::to_string(&r).unwrap();
        assert_eq!(s, r#"{"values":{"a":1.5,"b":"inf","c":null,"d":"nan"}}"#);
        let back: MetricRecord = serde_json::from_str(&s).unwrap();
        assert_eq!(back.get("a"), MetricValue::Finite(1.5));
        assert!(matches!(back.get("d"), MetricValue::NonFinite(x) if x.is_nan()));
        assert_eq!(back.get("c"), MetricValue::Missing);
        assert_eq!(back.get("zzz"), MetricValue::Missing);
    }
}
