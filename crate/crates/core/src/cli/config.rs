//! Layered settings: command-line flags, then `DTWHAR_*` environment
//! variables, then a `key = value` config file, then built-in defaults.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use super::CliError;
use crate::classify::pipeline::read_key_values;

pub const ENV_PREFIX: &str = "DTWHAR_";

#[derive(Clone, Debug, Default)]
pub struct Layers {
    env: BTreeMap<String, String>,
    file: BTreeMap<String, String>,
}

impl Layers {
    /// Reads the config file (if any) and the process environment.
    pub fn load(config: Option<&Path>) -> Result<Self, CliError> {
        let file = match config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!(
                    "cannot read config file {}: {e}",
                    path.display()
                )))?;
                read_key_values(path, &text).map_err(|e| CliError::Usage(e.to_string()))?
            }
            None => BTreeMap::new(),
        };
        let env = std::env::vars()
            .filter_map(|(k, v)| k.strip_prefix(ENV_PREFIX).map(|k| (k.to_ascii_lowercase(), v)))
            .collect();
        Ok(Self { env, file })
    }

    pub fn from_maps(env: BTreeMap<String, String>, file: BTreeMap<String, String>) -> Self {
        Self { env, file }
    }

    fn lookup(&self, key: &str) -> Option<(&str, &'static str)> {
        self.env
            .get(key)
            .map(|v| (v.as_str(), "environment"))
            .or_else(|| self.file.get(key).map(|v| (v.as_str(), "config file")))
    }

    /// The flag value if given, else the first layer defining `key`.
    pub fn get<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.lookup(key) {
            Some((raw, source)) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("invalid {key} = {raw:?} in {source}: {e}"))),
            None => Ok(None),
        }
    }

    pub fn or<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.get(flag, key)?.unwrap_or(default))
    }

    pub fn required<T>(&self, flag: Option<T>, key: &str, why: &str) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.get(flag, key)?
            .ok_or_else(|| CliError::Usage(format!("--{} is required {why}", key.replace('_', "-"))))
    }
}
