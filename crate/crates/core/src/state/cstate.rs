use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Classical state: variables absent from the map are zero.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "BTreeMap<String, i64>", into = "BTreeMap<String, i64>")]
pub struct ClassicalState(BTreeMap<String, i64>);

impl ClassicalState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, i64)>) -> Self {
        let mut s = Self::new();
        for (x, n) in pairs {
            s.set(x, n);
        }
        s
    }

    pub fn get(&self, x: &str) -> i64 {
        self.0.get(x).copied().unwrap_or(0)
    }

    pub fn set(&mut self, x: &str, n: i64) {
        if n == 0 {
            self.0.remove(x);
        } else {
            self.0.insert(x.to_string(), n);
        }
    }

    /// `σ[n/x]`.
    pub fn update(&self, x: &str, n: i64) -> Self {
        let mut s = self.clone();
        s.set(x, n);
        s
    }

    /// Nonzero assignments in name order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, i64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn fingerprint(&self) -> String {
        self.to_string()
    }
}

impl From<BTreeMap<String, i64>> for ClassicalState {
    fn from(mut m: BTreeMap<String, i64>) -> Self {
        m.retain(|_, v| *v != 0);
        ClassicalState(m)
    }
}

impl From<ClassicalState> for BTreeMap<String, i64> {
    fn from(s: ClassicalState) -> Self {
        s.0
    }
}

/// Free-standing form of [`ClassicalState::update`].
pub fn update(sigma: &ClassicalState, x: &str, n: i64) -> ClassicalState {
    sigma.update(x, n)
}

impl fmt::Display for ClassicalState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, (k, v)) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{k}={v}")?;
        }
        f.write_str("}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_is_not_stored() {
        let s = update(&ClassicalState::new(), "x", 0);
        assert!(s.is_zero());
        assert_eq!(s, ClassicalState::new());
    }

    #[test]
    fn update_overwrites_and_extends() {
        let s = ClassicalState::from_pairs([("x", 1)]);
        assert_eq!(s.update("x", 2), ClassicalState::from_pairs([("x", 2)]));
        assert_eq!(s.update("y", 3), ClassicalState::from_pairs([("x", 1), ("y", 3)]));
        assert_eq!(s.update("x", 0).get("x"), 0);
    }

    #[test]
    fn serde_drops_zeros() {
        let s: ClassicalState = serde_json::from_str(r#"{"a": 0, "b": -2}"#).unwrap();
        assert_eq!(s.to_string(), "{b=-2}");
        assert_eq!(serde_json::to_string(&s).unwrap(), r#"{"b":-2}"#);
    }
}
