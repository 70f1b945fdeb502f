//! Merging of command-line flags with an optional JSON config file.
//!
//! Every flag of a subcommand has a config key of the same name with dashes
//! replaced by underscores (`--burn-in` is `burn_in`). Flags given on the
//! command line win; keys the subcommand does not know are rejected.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::CliError;

/// Reads a config file, which must hold a JSON object.
pub fn load(path: &Path) -> Result<Map<String, Value>, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read config {}: {e}", path.display())))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(map)) => Ok(map),
        Ok(_) => Err(CliError::usage(format!("config {} must be a JSON object", path.display()))),
        Err(e) => Err(CliError::usage(format!("invalid config {}: {e}", path.display()))),
    }
}

/// Overlays the flags that were given on top of `config`.
pub fn merge<T>(flags: T, config: Option<&Map<String, Value>>) -> Result<T, CliError>
where
    T: Serialize + DeserializeOwned,
{
    let Some(config) = config else {
        return Ok(flags);
    };
    let Value::Object(given) = serde_json::to_value(&flags).map_err(CliError::internal)? else {
        unreachable!("argument structs serialize to objects");
    };
    let mut unknown: Vec<&str> = config
        .keys()
        .filter(|k| !given.contains_key(*k))
        .map(String::as_str)
        .collect();
    if !unknown.is_empty() {
        unknown.sort_unstable();
        let mut known: Vec<&str> = given.keys().map(String::as_str).collect();
        known.sort_unstable();
        return Err(CliError::usage(format!(
            "unknown config key(s) {} (this command accepts: {})",
            unknown.join(", "),
            known.join(", ")
        )));
    }
    let mut merged = config.clone();
    for (key, value) in given {
        if !value.is_null() {
            merged.insert(key, value);
        }
    }
    serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::usage(format!("invalid config value: {e}")))
}
