//! Versioned JSON form of configurations.
//!
//! A document is an object with the keys, in this order: `format` (always
//! "polyfield-config"), `version`, `meta` (free-form provenance, may be null)
//! and `config`. Numbers are written in shortest round-trip form, so equal
//! configurations serialize to identical bytes.

use super::PolyConfig;
use crate::error::{invalid, Result};
use serde::{Deserialize, Serialize};

pub const FORMAT: &str = "polyfield-config";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigDocument {
    pub format: String,
    pub version: u32,
    #[serde(default)]
    pub meta: serde_json::Value,
    pub config: PolyConfig,
}

pub fn to_json(cfg: &PolyConfig) -> String {
    to_json_with_meta(cfg, serde_json::Value::Null)
}

pub fn to_json_with_meta(cfg: &PolyConfig, meta: serde_json::Value) -> String {
    let doc = ConfigDocument { format: FORMAT.into(), version: FORMAT_VERSION, meta, config: cfg.clone() };
    serde_json::to_string(&doc).expect("configurations always serialize")
}

pub fn document_from_json(s: &str) -> Result<ConfigDocument> {
    let doc: ConfigDocument = serde_json::from_str(s).or_else(|e| invalid(format!("malformed configuration: {e}")))?;
    if doc.format != FORMAT {
        return invalid(format!("not a configuration document: format {:?}", doc.format));
    }
    if doc.version != FORMAT_VERSION {
        return invalid(format!("unsupported configuration version {}", doc.version));
    }
    Ok(doc)
}

pub fn from_json(s: &str) -> Result<PolyConfig> {
    document_from_json(s).map(|d| d.config)
}
