use std::fmt;

use exlab_core::ExactRational;
use num_bigint::BigInt;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A reported number: exact when the quantity is a ratio of counts,
/// floating point otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(ExactRational),
    Float(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(q) => q.to_f64(),
            Value::Float(x) => *x,
        }
    }

    pub fn as_exact(&self) -> Option<&ExactRational> {
        match self {
            Value::Exact(q) => Some(q),
            Value::Float(_) => None,
        }
    }
}

impl From<ExactRational> for Value {
    fn from(q: ExactRational) -> Self {
        Value::Exact(q)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Float(x)
    }
}

/// Shortest round-trip form, switching to scientific notation outside
/// `[1e-4, 1e16)`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(q) => write!(f, "{q}"),
            Value::Float(x) => f.write_str(&format_float(*x)),
        }
    }
}

fn big_number(n: &BigInt) -> serde_json::Number {
    n.to_string().parse().expect("integers are valid JSON numbers")
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(q) => {
                #[derive(Serialize)]
                struct Ratio {
                    num: serde_json::Number,
                    den: serde_json::Number,
                }
                Ratio { num: big_number(q.numer()), den: big_number(q.denom()) }.serialize(serializer)
            }
            Value::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

impl<'de> Deserialize<'de> for Value {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = serde_json::Value::deserialize(deserializer)?;
        match json {
            serde_json::Value::Number(n) => {
                n.as_f64().map(Value::Float).ok_or_else(|| D::Error::custom("number out of range"))
            }
            serde_json::Value::Object(map) => {
                let part = |key: &str| -> Result<BigInt, D::Error> {
                    match map.get(key) {
                        Some(serde_json::Value::Number(n)) => {
                            n.to_string().parse().map_err(|_| D::Error::custom(format!("{key} is not an integer")))
                        }
                        _ => Err(D::Error::custom(format!("missing integer field {key}"))),
                    }
                };
                let den = part("den")?;
                ExactRational::try_new(part("num")?, den).map(Value::Exact).map_err(D::Error::custom)
            }
            other => Err(D::Error::custom(format!("expected a number or {{num, den}}, got {other}"))),
        }
    }
}

mod rational_serde {
    use super::*;

    pub fn serialize<S: Serializer>(q: &ExactRational, serializer: S) -> Result<S::Ok, S::Error> {
        Value::Exact(q.clone()).serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<ExactRational, D::Error> {
        match Value::deserialize(deserializer)? {
            Value::Exact(q) => Ok(q),
            Value::Float(_) => Err(D::Error::custom("expected {num, den}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundEntry {
    pub name: String,
    pub value: Value,
}

impl BoundEntry {
    pub fn new(name: impl Into<String>, value: impl Into<Value>) -> Self {
        Self { name: name.into(), value: value.into() }
    }
}

/// One row of results: the configuration echo, observed errors, message
/// cost and the bounds that apply to the run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub suite: String,
    pub n: usize,
    pub m: usize,
    #[serde(with = "rational_serde")]
    pub gamma: ExactRational,
    pub strategy: String,
    pub param_k: Option<usize>,
    pub param_r: Option<u32>,
    pub param_t: Option<u64>,
    /// Qubits for quantum messages, bits for classical ones.
    pub cost: Option<u128>,
    pub worst_err: Option<Value>,
    pub mean_err: Option<Value>,
    pub bounds: Vec<BoundEntry>,
    pub seed: u64,
    /// Sample count for sampled runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    /// Seconds; recorded only on request so output stays reproducible.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl ResultRecord {
    pub fn bound(&self, name: &str) -> Option<&Value> {
        self.bounds.iter().find(|b| b.name == name).map(|b| &b.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_serialize_as_num_den() {
        let v = Value::Exact(ExactRational::new(1, 8));
        assert_eq!(serde_json::to_string(&v).unwrap(), r#"{"num":1,"den":8}"#);
        assert_eq!(v.to_string(), "1/8");
        let big = Value::Exact(ExactRational::pow2_neg(100));
        let text = serde_json::to_string(&big).unwrap();
        assert_eq!(text, r#"{"num":1,"den":1267650600228229401496703205376}"#);
        assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), big);
    }

    #[test]
    fn floats_round_trip() {
        for x in [0.25, 1e-300, 3.348e-4, -0.0, 123456.789] {
            let text = serde_json::to_string(&Value::Float(x)).unwrap();
            assert_eq!(serde_json::from_str::<Value>(&text).unwrap(), Value::Float(x));
        }
        assert_eq!(format_float(1e-20), "1e-20");
        assert_eq!(format_float(0.125), "0.125");
    }

    #[test]
    fn rejects_malformed_ratios() {
        assert!(serde_json::from_str::<Value>(r#"{"num":1,"den":0}"#).is_err());
        assert!(serde_json::from_str::<Value>(r#"{"num":1.5,"den":2}"#).is_err());
        assert!(serde_json::from_str::<Value>(r#""1/8""#).is_err());
    }
}
