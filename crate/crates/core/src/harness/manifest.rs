//! Flat key/value run summaries, serialized as a sorted JSON object.

use std::collections::BTreeMap;
use std::path::Path;

use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};

/// Flat, ordered key/value document.
///
/// Keys are kept sorted and floats print in shortest round-trip form, so equal
/// contents always serialize to identical bytes. Non-finite floats are stored
/// as the strings `inf`, `-inf` and `NaN`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Manifest {
    entries: BTreeMap<String, Value>,
}

impl Manifest {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn set_str(&mut self, key: impl Into<String>, v: impl Into<String>) {
        self.entries.insert(key.into(), Value::String(v.into()));
    }

    pub fn set_f64(&mut self, key: impl Into<String>, v: f64) {
        let val = match Number::from_f64(v) {
            Some(num) => Value::Number(num),
            None => Value::String(format!("{v}")),
        };
        self.entries.insert(key.into(), val);
    }

    pub fn set_u64(&mut self, key: impl Into<String>, v: u64) {
        self.entries.insert(key.into(), Value::Number(v.into()));
    }

    pub fn set_usize(&mut self, key: impl Into<String>, v: usize) {
        self.set_u64(key, v as u64);
    }

    pub fn set_bool(&mut self, key: impl Into<String>, v: bool) {
        self.entries.insert(key.into(), Value::Bool(v));
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.get(key)
    }

    pub fn get_f64(&self, key: &str) -> Option<f64> {
        match self.entries.get(key)? {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.parse().ok(),
            _ => None,
        }
    }

    pub fn get_u64(&self, key: &str) -> Option<u64> {
        self.entries.get(key)?.as_u64()
    }

    pub fn get_bool(&self, key: &str) -> Option<bool> {
        self.entries.get(key)?.as_bool()
    }

    pub fn get_str(&self, key: &str) -> Option<&str> {
        self.entries.get(key)?.as_str()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &Value)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn to_json(&self) -> String {
        let map: Map<String, Value> = self.entries.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
        let mut s = serde_json::to_string_pretty(&Value::Object(map)).expect("plain values serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> std::result::Result<Self, String> {
        let v: Value = serde_json::from_str(text).map_err(|e| e.to_string())?;
        let Value::Object(map) = v else {
            return Err("manifest must be a JSON object".into());
        };
        let mut entries = BTreeMap::new();
        for (k, v) in map {
            if v.is_object() || v.is_array() {
                return Err(format!("key `{k}` is not a flat value"));
            }
            entries.insert(k, v);
        }
        Ok(Manifest { entries })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|msg| Error::Format { path: path.to_path_buf(), msg })
    }
}
