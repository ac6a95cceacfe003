//! Layered configuration: defaults, then the `--config` file, then flags.

use std::path::Path;

use crisk::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

/// Parsed `--config` file: a JSON object with an optional top-level `seed`
/// and one object per section (`synthetic`, `split`, `glm`, `gbm`, `lime`,
/// `probe`).
#[derive(Debug, Clone, Default)]
pub struct ConfigFile {
    root: Map<String, Value>,
}

const SECTIONS: [&str; 7] = ["seed", "synthetic", "split", "glm", "gbm", "lime", "probe"];

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Document(m) => Error::Document(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))?;
        let Value::Object(root) = value else {
            return Err(Error::Document("config must be a JSON object".into()));
        };
        if let Some(key) = root.keys().find(|k| !SECTIONS.contains(&k.as_str())) {
            return Err(Error::InvalidArgument(format!("unknown config section {key:?}")));
        }
        Ok(Self { root })
    }

    pub fn seed(&self) -> Result<Option<u64>> {
        match self.root.get("seed") {
            None => Ok(None),
            Some(v) => v
                .as_u64()
                .map(Some)
                .ok_or_else(|| Error::InvalidArgument("config seed must be a nonnegative integer".into())),
        }
    }

    /// Resolves `section` over `defaults`. A top-level seed applies first,
    /// then the section's own keys, then `flags`.
    pub fn resolve<T: Serialize + DeserializeOwned>(&self, defaults: &T, section: &str, flags: Flags) -> Result<T> {
        let mut value = serde_json::to_value(defaults).map_err(|e| Error::Document(e.to_string()))?;
        if let (Some(seed), Some(obj)) = (self.root.get("seed"), value.as_object_mut()) {
            if obj.contains_key("seed") {
                obj.insert("seed".into(), seed.clone());
            }
        }
        if let Some(patch) = self.root.get(section) {
            merge(&mut value, patch, section)?;
        }
        merge(&mut value, &Value::Object(flags.0), section)?;
        serde_json::from_value(value).map_err(|e| Error::InvalidArgument(format!("config section {section}: {e}")))
    }
}

/// Flag values that were actually given on the command line.
#[derive(Debug, Default)]
pub struct Flags(Map<String, Value>);

impl Flags {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set<V: Serialize>(mut self, key: &str, value: Option<V>) -> Self {
        if let Some(v) = value {
            self.0.insert(key.to_string(), serde_json::to_value(v).expect("flag values serialize"));
        }
        self
    }

    pub fn set_if(self, key: &str, cond: bool, value: impl Serialize) -> Self {
        self.set(key, cond.then_some(value))
    }
}

fn merge(base: &mut Value, patch: &Value, path: &str) -> Result<()> {
    let (Value::Object(base), Value::Object(patch)) = (base, patch) else {
        return Err(Error::InvalidArgument(format!("config section {path} must be an object")));
    };
    for (key, v) in patch {
        let Some(slot) = base.get_mut(key) else {
            return Err(Error::InvalidArgument(format!("unknown config key {path}.{key}")));
        };
        if slot.is_object() && v.is_object() {
            merge(slot, v, &format!("{path}.{key}"))?;
        } else {
            *slot = v.clone();
        }
    }
    Ok(())
}
