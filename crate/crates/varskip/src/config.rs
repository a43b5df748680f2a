//! Flat `key = value` configuration with environment overrides.
//!
//! Precedence, lowest first: built-in default, config file, `VARSKIP_*`
//! environment variable, command-line flag. Keys are lowercase with
//! underscores (`batch_size`); the environment form is `VARSKIP_BATCH_SIZE`.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::{AppError, AppResult};

pub const ENV_PREFIX: &str = "VARSKIP_";

fn normalize(key: &str) -> String {
    key.trim().to_ascii_lowercase().replace('-', "_")
}

/// Parses `key = value` lines; `#` starts a comment line.
pub fn parse_kv(text: &str) -> AppResult<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| AppError::Usage(format!("config line {}: expected key = value, got `{line}`", i + 1)))?;
        if k.trim().is_empty() {
            return Err(AppError::Usage(format!("config line {}: empty key", i + 1)));
        }
        out.insert(normalize(k), v.trim().to_string());
    }
    Ok(out)
}

#[derive(Debug, Clone, Default)]
pub struct Layers {
    file: BTreeMap<String, String>,
    env: BTreeMap<String, String>,
    resolved: BTreeMap<String, String>,
}

impl Layers {
    pub fn new(file: BTreeMap<String, String>, env: impl IntoIterator<Item = (String, String)>) -> Self {
        let env = env.into_iter().filter_map(|(k, v)| k.strip_prefix(ENV_PREFIX).map(|k| (normalize(k), v))).collect();
        Layers { file, env, resolved: BTreeMap::new() }
    }

    /// Reads the optional config file and the process environment.
    pub fn load(config: Option<&Path>) -> AppResult<Self> {
        let file = match config {
            Some(p) => parse_kv(&std::fs::read_to_string(p).map_err(|e| AppError::io(p, e))?)?,
            None => BTreeMap::new(),
        };
        Ok(Self::new(file, std::env::vars()))
    }

    fn layered(&self, key: &str) -> Option<(&str, &'static str)> {
        self.env
            .get(key)
            .map(|v| (v.as_str(), "environment"))
            .or_else(|| self.file.get(key).map(|v| (v.as_str(), "config file")))
    }

    fn record(&mut self, key: &str, value: &impl Display) {
        self.resolved.insert(key.to_string(), value.to_string());
    }

    /// Value for `key` if any layer (flag, env, file) provides one.
    pub fn opt<T>(&mut self, cli: Option<T>, key: &str) -> AppResult<Option<T>>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let value = match cli {
            Some(v) => Some(v),
            None => match self.layered(key) {
                Some((raw, origin)) => Some(
                    raw.parse::<T>()
                        .map_err(|e| AppError::Usage(format!("{key} from {origin}: cannot parse `{raw}`: {e}")))?,
                ),
                None => None,
            },
        };
        if let Some(v) = &value {
            self.record(key, v);
        }
        Ok(value)
    }

    pub fn get<T>(&mut self, cli: Option<T>, key: &str, default: T) -> AppResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        let v = self.opt(cli, key)?.unwrap_or(default);
        self.record(key, &v);
        Ok(v)
    }

    /// Like [`get`](Self::get) but with no default: missing is a usage error.
    pub fn require<T>(&mut self, cli: Option<T>, key: &str) -> AppResult<T>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.opt(cli, key)?.ok_or_else(|| {
            AppError::Usage(format!(
                "`{key}` must be given (flag --{}, {ENV_PREFIX}{} or config file)",
                key.replace('_', "-"),
                key.to_ascii_uppercase()
            ))
        })
    }

    /// Every key resolved so far with its final value.
    pub fn resolved(&self) -> &BTreeMap<String, String> {
        &self.resolved
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_is_default_file_env_flag() {
        let file = parse_kv("# comment\nepochs = 5\nlr=0.01\nbatch-size = 64\n").unwrap();
        let env = vec![("VARSKIP_LR".to_string(), "0.02".to_string()), ("OTHER".to_string(), "1".to_string())];
        let mut l = Layers::new(file, env);
        assert_eq!(l.get::<usize>(None, "epochs", 20).unwrap(), 5);
        assert_eq!(l.get::<f64>(None, "lr", 1.0).unwrap(), 0.02);
        assert_eq!(l.get::<f64>(Some(0.5), "lr", 1.0).unwrap(), 0.5);
        assert_eq!(l.get::<usize>(None, "batch_size", 1).unwrap(), 64);
        assert_eq!(l.get::<usize>(None, "hidden", 64).unwrap(), 64);
        assert!(l.require::<u64>(None, "seed").is_err());
        assert_eq!(l.resolved()["lr"], "0.5");
    }

    #[test]
    fn bad_values_are_usage_errors() {
        assert!(parse_kv("no equals sign").is_err());
        let mut l = Layers::new(parse_kv("epochs = many").unwrap(), Vec::new());
        assert!(matches!(l.get::<usize>(None, "epochs", 1), Err(AppError::Usage(_))));
    }
}
