use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Serialize, Serializer};

/// A property value. Numbers are always finite.
#[derive(Debug, Clone)]
pub enum Value {
    Text(String),
    Number(f64),
    Integer(i64),
    Boolean(bool),
}

/// Coarse value kind, used for distance-function dispatch.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ValueKind {
    Text,
    Number,
    Integer,
    Boolean,
}

impl Value {
    /// Builds a number, rejecting NaN and infinities.
    pub fn number(x: f64) -> Option<Value> {
        x.is_finite().then_some(Value::Number(x))
    }

    pub fn text(s: impl Into<String>) -> Value {
        Value::Text(s.into())
    }

    pub fn kind(&self) -> ValueKind {
        match self {
            Value::Text(_) => ValueKind::Text,
            Value::Number(_) => ValueKind::Number,
            Value::Integer(_) => ValueKind::Integer,
            Value::Boolean(_) => ValueKind::Boolean,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Number(x) => Some(*x),
            Value::Integer(i) => Some(*i as f64),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, Value::Number(_) | Value::Integer(_))
    }

    /// Parses an unescaped CSV field: integer, then float, then `true|false`,
    /// else text. A field wrapped in double quotes is always text.
    pub fn parse_field(s: &str) -> Value {
        if s.len() >= 2 && s.starts_with('"') && s.ends_with('"') {
            return Value::Text(s[1..s.len() - 1].to_string());
        }
        if let Ok(i) = s.parse::<i64>() {
            return Value::Integer(i);
        }
        if looks_numeric(s) {
            if let Ok(x) = s.parse::<f64>() {
                if x.is_finite() {
                    return Value::Number(x);
                }
            }
        }
        match s {
            "true" => Value::Boolean(true),
            "false" => Value::Boolean(false),
            _ => Value::Text(s.to_string()),
        }
    }

    /// Inverse of [`Value::parse_field`] (before escaping).
    pub fn to_field(&self) -> String {
        match self {
            Value::Text(s) => {
                if matches!(Value::parse_field(s), Value::Text(ref t) if t == s) {
                    s.clone()
                } else {
                    format!("\"{s}\"")
                }
            }
            Value::Number(x) => format!("{x:?}"),
            Value::Integer(i) => i.to_string(),
            Value::Boolean(b) => b.to_string(),
        }
    }
}

fn looks_numeric(s: &str) -> bool {
    // Rust's float parser also accepts "inf", "nan" and friends.
    !s.is_empty()
        && s.chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '+' | '-' | '.' | 'e' | 'E'))
        && s.chars().any(|c| c.is_ascii_digit())
}

impl PartialEq for Value {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Value {}

impl PartialOrd for Value {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Value {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Value::Text(a), Value::Text(b)) => a.cmp(b),
            (Value::Number(a), Value::Number(b)) => a.total_cmp(b),
            (Value::Integer(a), Value::Integer(b)) => a.cmp(b),
            (Value::Boolean(a), Value::Boolean(b)) => a.cmp(b),
            _ => self.kind().cmp(&other.kind()),
        }
    }
}

impl Hash for Value {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.kind().hash(state);
        match self {
            Value::Text(s) => s.hash(state),
            Value::Number(x) => x.to_bits().hash(state),
            Value::Integer(i) => i.hash(state),
            Value::Boolean(b) => b.hash(state),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) => write!(f, "{s}"),
            Value::Number(x) => write!(f, "{x:?}"),
            Value::Integer(i) => write!(f, "{i}"),
            Value::Boolean(b) => write!(f, "{b}"),
        }
    }
}

impl Serialize for Value {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Value::Text(t) => s.serialize_str(t),
            Value::Number(x) => s.serialize_f64(*x),
            Value::Integer(i) => s.serialize_i64(*i),
            Value::Boolean(b) => s.serialize_bool(*b),
        }
    }
}
