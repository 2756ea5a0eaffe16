use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Liberal and conservative target statements for issue-specific stance.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetSet {
    #[serde(default)]
    pub liberal: Vec<String>,
    #[serde(default)]
    pub conservative: Vec<String>,
}

impl TargetSet {
    pub fn new(liberal: Vec<String>, conservative: Vec<String>) -> Result<Self> {
        let set = Self {
            liberal,
            conservative,
        };
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<()> {
        if self
            .liberal
            .iter()
            .chain(&self.conservative)
            .any(|t| t.trim().is_empty())
        {
            return Err(Error::invalid("target statements must be non-empty"));
        }
        let lib: BTreeSet<&str> = self.liberal.iter().map(String::as_str).collect();
        if let Some(dup) = self.conservative.iter().find(|t| lib.contains(t.as_str())) {
            return Err(Error::invalid(format!(
                "target {dup:?} is both liberal and conservative"
            )));
        }
        Ok(())
    }

    /// The same targets with sides exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            liberal: self.conservative.clone(),
            conservative: self.liberal.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.liberal.len() + self.conservative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Loads a JSON (`.json`) or TOML file with `liberal` and `conservative` lists.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let set: Self = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::invalid(format!("{}: {e}", path.display())))?
        };
        set.validate()?;
        Ok(set)
    }
}
