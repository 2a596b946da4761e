//! Flat `key = value` configuration files.
//!
//! One assignment per line, SI units, `#` starts a comment. Keys not given
//! keep the values of [`ArrayConfig::default`].

use shellgap::ArrayConfig;
use std::collections::HashSet;
use std::path::Path;

pub const KEYS: [&str; 8] = [
    "shell.a",
    "shell.thickness",
    "shell.rho",
    "shell.E",
    "shell.nu",
    "fluid.rho",
    "fluid.c",
    "lattice.L",
];

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("{0}")]
    Invalid(String),
}

pub fn parse_config(text: &str) -> Result<ArrayConfig, ConfigError> {
    let mut c = ArrayConfig::default();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax { line, msg: format!("expected `key = value`, got `{body}`") })?;
        let (key, value) = (key.trim(), value.trim());
        let x: f64 = value
            .parse()
            .map_err(|_| ConfigError::Syntax { line, msg: format!("`{value}` is not a number") })?;
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::Syntax { line, msg: format!("duplicate key `{key}`") });
        }
        match key {
            "shell.a" => c.shell.a = x,
            "shell.thickness" => c.shell.h = 0.5 * x,
            "shell.rho" => c.shell.rho = x,
            "shell.E" => c.shell.e = x,
            "shell.nu" => c.shell.nu = x,
            "fluid.rho" => c.fluid.rho_o = x,
            "fluid.c" => c.fluid.c_o = x,
            "lattice.L" => c.lattice.l = x,
            _ => {
                return Err(ConfigError::Syntax {
                    line,
                    msg: format!("unknown key `{key}` (expected one of {})", KEYS.join(", ")),
                })
            }
        }
    }
    c.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(c)
}

pub fn load_config(path: &Path) -> Result<ArrayConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::Io { path: path.display().to_string(), reason: e.to_string() })?;
    parse_config(&text)
}

/// Inverse of [`parse_config`], full precision.
pub fn render_config(c: &ArrayConfig) -> String {
    let vals = [
        c.shell.a,
        2.0 * c.shell.h,
        c.shell.rho,
        c.shell.e,
        c.shell.nu,
        c.fluid.rho_o,
        c.fluid.c_o,
        c.lattice.l,
    ];
    KEYS.iter().zip(vals).map(|(k, v)| format!("{k} = {v:?}\n")).collect()
}
