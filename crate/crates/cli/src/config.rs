//! Flat key = value configuration files. Lines starting with `#` (or with
//! a trailing `# comment`) are stripped; unknown keys are rejected against
//! the per-command schema; command-line flags take precedence.

use std::collections::HashMap;
use std::path::Path;

pub struct FileConfig {
    entries: HashMap<String, String>,
}

pub fn load(path: &Path) -> Result<FileConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config file {}: {e}", path.display()))?;
    let mut entries = HashMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.find('#') {
            Some(k) => &raw[..k],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some(eq) = line.find('=') else {
            return Err(format!(
                "config line {} is not `key = value`: {raw:?}",
                lineno + 1
            ));
        };
        let key = line[..eq].trim().to_string();
        let value = line[eq + 1..].trim().to_string();
        if key.is_empty() || value.is_empty() {
            return Err(format!(
                "config line {} has an empty key or value",
                lineno + 1
            ));
        }
        if entries.insert(key.clone(), value).is_some() {
            return Err(format!("duplicate config key {key:?}"));
        }
    }
    Ok(FileConfig { entries })
}

impl FileConfig {
    pub fn empty() -> Self {
        FileConfig {
            entries: HashMap::new(),
        }
    }

    pub fn check_keys(&self, allowed: &[&str]) -> Result<(), String> {
        for key in self.entries.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(format!(
                    "unknown config key {key:?} (allowed: {})",
                    allowed.join(", ")
                ));
            }
        }
        Ok(())
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, String> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|_| format!("config key {key:?}: {v:?} is not a number"))
            })
            .transpose()
    }

    pub fn get_u32(&self, key: &str) -> Result<Option<u32>, String> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<u32>()
                    .map_err(|_| format!("config key {key:?}: {v:?} is not an integer"))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, String> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|_| format!("config key {key:?}: {v:?} is not an integer"))
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, String> {
        self.entries
            .get(key)
            .map(|v| {
                v.parse::<bool>()
                    .map_err(|_| format!("config key {key:?}: {v:?} is not a bool"))
            })
            .transpose()
    }

    pub fn get_string(&self, key: &str) -> Option<String> {
        self.entries.get(key).cloned()
    }
}

/// Flag-over-file precedence.
pub fn pick<T>(
    flag: Option<T>,
    file: Option<T>,
    default: Option<T>,
    name: &str,
) -> Result<T, String> {
    flag.or(file)
        .or(default)
        .ok_or_else(|| format!("missing required parameter --{name}"))
}
