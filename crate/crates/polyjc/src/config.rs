//! Cap policy from an optional TOML file named by `POLYJC_CONFIG`, e.g.
//!
//! ```toml
//! groebner.max_pairs = 20000
//! groebner.max_degree = 40
//! invert.cap = 64
//! lnd.cap = 200
//! ```
//!
//! Command-line flags win over the file: `--max-degree` sets the Gröbner
//! degree cap, `--cap` sets both iteration caps.

use std::path::Path;

use polyjc_core::groebner::GroebnerLimits;
use serde::Deserialize;

use crate::CliError;

pub const ENV_VAR: &str = "POLYJC_CONFIG";

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    #[serde(default)]
    pub groebner: GroebnerSection,
    #[serde(default)]
    pub invert: CapSection,
    #[serde(default)]
    pub lnd: CapSection,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroebnerSection {
    pub max_pairs: Option<usize>,
    pub max_degree: Option<u32>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CapSection {
    pub cap: Option<u32>,
}

pub const DEFAULT_INVERT_CAP: u32 = 64;

impl Config {
    pub fn parse(text: &str) -> Result<Config, CliError> {
        toml::from_str(text).map_err(|e| CliError(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Config, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
        Config::parse(&text)
    }

    pub fn from_env() -> Result<Config, CliError> {
        match std::env::var_os(ENV_VAR) {
            Some(p) => Config::load(Path::new(&p)),
            None => Ok(Config::default()),
        }
    }
}

/// Caps in effect for one invocation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Caps {
    pub groebner: GroebnerLimits,
    pub invert: u32,
    /// None means the derivation's own degree bound.
    pub lnd: Option<u32>,
}

impl Caps {
    pub fn resolve(config: &Config, max_degree: Option<u32>, cap: Option<u32>) -> Caps {
        let mut groebner = GroebnerLimits::default();
        if let Some(p) = config.groebner.max_pairs {
            groebner.max_pairs = p;
        }
        if let Some(d) = max_degree.or(config.groebner.max_degree) {
            groebner.max_degree = d;
        }
        Caps {
            groebner,
            invert: cap.or(config.invert.cap).unwrap_or(DEFAULT_INVERT_CAP),
            lnd: cap.or(config.lnd.cap),
        }
    }
}
