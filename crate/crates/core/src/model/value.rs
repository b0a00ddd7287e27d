use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Serialize, Serializer};

/// A cost, utility or potential value: exact when the inputs allow it.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigInt),
    Approx(f64),
}

impl Value {
    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(v) => v.to_f64().unwrap_or(f64::NAN),
            Value::Approx(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Value::Exact(_))
    }

    pub fn as_exact(&self) -> Option<&BigInt> {
        match self {
            Value::Exact(v) => Some(v),
            Value::Approx(_) => None,
        }
    }

    /// Difference `self - other`, exact when both sides are.
    pub fn minus(&self, other: &Value) -> Value {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Value::Exact(a - b),
            _ => Value::Approx(self.to_f64() - other.to_f64()),
        }
    }

    pub fn signum(&self) -> i8 {
        match self {
            Value::Exact(v) => match v.sign() {
                num_bigint::Sign::Minus => -1,
                num_bigint::Sign::NoSign => 0,
                num_bigint::Sign::Plus => 1,
            },
            Value::Approx(v) => {
                if *v > 0.0 {
                    1
                } else if *v < 0.0 {
                    -1
                } else {
                    0
                }
            }
        }
    }
}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Value::Exact(a), Value::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(v) => write!(f, "{v}"),
            Value::Approx(v) => write!(f, "{v}"),
        }
    }
}

/// Exact values serialize as decimal strings so no precision is lost.
impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Exact(v) => s.serialize_str(&v.to_string()),
            Value::Approx(v) => s.serialize_f64(*v),
        }
    }
}
