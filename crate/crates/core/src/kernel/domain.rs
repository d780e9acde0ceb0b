use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Index of a value inside its [`Domain`]. Booleans use `0` for false, `1` for true.
pub type Value = u8;

pub const BOOL_DOMAIN: &str = "bool";

/// An ordered finite set of named values.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Domain {
    name: String,
    values: Vec<String>,
}

impl Domain {
    pub fn new<S: Into<String>>(name: impl Into<String>, values: impl IntoIterator<Item = S>) -> Result<Self> {
        let name = name.into();
        let values: Vec<String> = values.into_iter().map(Into::into).collect();
        if values.is_empty() {
            return Err(Error::InvalidArgument(format!("domain `{name}` has no values")));
        }
        if values.len() > usize::from(Value::MAX) {
            return Err(Error::InvalidArgument(format!("domain `{name}` has too many values")));
        }
        for (i, v) in values.iter().enumerate() {
            if values[..i].contains(v) {
                return Err(Error::InvalidArgument(format!("domain `{name}` repeats value `{v}`")));
            }
        }
        Ok(Self { name, values })
    }

    pub fn boolean() -> Self {
        Self {
            name: BOOL_DOMAIN.to_string(),
            values: vec!["0".to_string(), "1".to_string()],
        }
    }

    pub fn shared_bool() -> Arc<Self> {
        Arc::new(Self::boolean())
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn is_bool(&self) -> bool {
        self.name == BOOL_DOMAIN
    }

    pub fn size(&self) -> usize {
        self.values.len()
    }

    pub fn values(&self) -> &[String] {
        &self.values
    }

    pub fn text(&self, v: Value) -> &str {
        &self.values[usize::from(v)]
    }

    /// Resolves a value token. Booleans also accept `true`/`false`/`T`/`F`.
    pub fn lookup(&self, token: &str) -> Option<Value> {
        if self.is_bool() {
            return match token {
                "0" | "false" | "F" | "f" => Some(0),
                "1" | "true" | "T" | "t" => Some(1),
                _ => None,
            };
        }
        self.values.iter().position(|v| v == token).map(|i| i as Value)
    }
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {{{}}}", self.name, self.values.join(", "))
    }
}
