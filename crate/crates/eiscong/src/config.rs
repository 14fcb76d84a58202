//! Run configuration: a small TOML file whose keys can all be overridden
//! from the command line.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{CliError, Exit};

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    /// Working precision for L-values, in decimal digits.
    pub digits: u32,
    /// Refuse requests above this many digits.
    pub digits_cap: u32,
    /// Total Pollard rho iterations per factorization.
    pub factor_budget: u64,
    /// Partial-quotient threshold for rational reconstruction.
    pub cf_threshold: String,
    /// Extra JSON-lines files merged over the bundled tables.
    pub data: Vec<PathBuf>,
    pub bundled: bool,
    /// Worker threads for reports; 0 lets rayon decide.
    pub threads: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            digits: 30,
            digits_cap: eiscong_core::lfunc::eval::DEFAULT_DIGITS_CAP,
            factor_budget: 4_000_000,
            cf_threshold: "10000000000".into(),
            data: Vec::new(),
            bundled: true,
            threads: 0,
        }
    }
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::new(Exit::Usage, format!("config {}: {}", path.display(), e)))?;
        let mut cfg: Config =
            toml::from_str(&text).map_err(|e| CliError::new(Exit::Usage, format!("config {}: {}", path.display(), e)))?;
        // Relative data paths are taken from the config file's directory.
        let base = path.parent().unwrap_or(Path::new("."));
        for p in &mut cfg.data {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_partial_file() {
        let c: Config = toml::from_str("digits = 20\ndata = [\"x.jsonl\"]\n").unwrap();
        assert_eq!(c.digits, 20);
        assert_eq!(c.data, vec![PathBuf::from("x.jsonl")]);
        assert!(c.bundled);
        assert!(toml::from_str::<Config>("digitz = 3").is_err());
    }
}
