use std::collections::BTreeMap;

use super::parser::KEYWORDS;
use crate::array::Array;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid array name {0:?}: names are identifiers that are not keywords or dim<N>")]
pub struct InvalidName(pub String);

pub fn is_valid_name(name: &str) -> bool {
    let mut chars = name.chars();
    let starts_ok = chars
        .next()
        .is_some_and(|c| c.is_ascii_alphabetic() || c == '_');
    let rest_ok = chars.all(|c| c.is_ascii_alphanumeric() || c == '_');
    let is_dim = name
        .strip_prefix("dim")
        .is_some_and(|n| !n.is_empty() && n.bytes().all(|b| b.is_ascii_digit()));
    starts_ok && rest_ok && !is_dim && !KEYWORDS.contains(&name)
}

/// Named arrays a query can reference.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Catalog {
    arrays: BTreeMap<String, Array>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Binds `name`, replacing any previous binding.
    pub fn insert(&mut self, name: impl Into<String>, array: Array) -> Result<(), InvalidName> {
        let name = name.into();
        if !is_valid_name(&name) {
            return Err(InvalidName(name));
        }
        self.arrays.insert(name, array);
        Ok(())
    }

    pub fn with(mut self, name: impl Into<String>, array: Array) -> Result<Self, InvalidName> {
        self.insert(name, array)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&Array> {
        self.arrays.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.arrays.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.arrays.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arrays.is_empty()
    }
}
