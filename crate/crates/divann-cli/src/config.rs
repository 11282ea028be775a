//! Optional TOML configuration file and the flag → file → default
//! precedence every subcommand resolves its parameters through.

use std::path::Path;

use divann::{Error, Result};
use serde::Deserialize;

pub const DEFAULT_ALPHA: f64 = 1.2;
pub const DEFAULT_DEGREE_CAP: usize = 64;
pub const DEFAULT_BUILD_BEAM: usize = 200;
pub const DEFAULT_M: usize = 1;
pub const DEFAULT_PASSES: usize = 2;
pub const DEFAULT_K: usize = 100;
pub const DEFAULT_K_PRIME: usize = 1;
pub const DEFAULT_L: usize = 200;
pub const DEFAULT_EPSILON: f64 = 0.1;
pub const DEFAULT_C_LOOP: usize = 2;

/// Values a `--config` file may supply. Every field is optional: a flag
/// given on the command line wins over the file, and the file wins over
/// the built-in default. Unknown keys are rejected so typos fail loudly.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub degree_cap: Option<usize>,
    pub build_beam: Option<usize>,
    pub m: Option<usize>,
    pub passes: Option<usize>,
    pub seed: Option<u64>,
    pub k: Option<usize>,
    pub k_prime: Option<usize>,
    pub l: Option<usize>,
    pub l_values: Option<Vec<usize>>,
    pub c: Option<f64>,
    pub radius: Option<f64>,
    pub epsilon: Option<f64>,
    pub steps: Option<usize>,
    pub c_loop: Option<usize>,
    pub threads: Option<usize>,
}

/// Loads the file when a path was given. Any read or parse problem is a
/// configuration error, since the path itself came from a flag.
pub fn load(path: Option<&Path>) -> Result<FileConfig> {
    let Some(path) = path else {
        return Ok(FileConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::usage(format!("cannot read config {}: {e}", path.display())))?;
    toml::from_str(&text).map_err(|e| Error::usage(format!("bad config {}: {e}", path.display())))
}

/// Flag value if present, else the config-file value, else the default.
pub fn pick<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}
