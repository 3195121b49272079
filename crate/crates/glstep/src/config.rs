//! Flat key=value configuration with one `[section]` per subcommand.
//!
//! Keys before the first section header apply to every subcommand; a
//! section key overrides a global key; a command-line flag overrides both.
//! Lines starting with `#` or `;` are comments.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

/// Parsed configuration file contents.
#[derive(Debug, Default)]
pub struct Config {
    global: BTreeMap<String, String>,
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

impl Config {
    /// Loads the file named by `GLSTEP_CONFIG`; an unset variable means an
    /// empty configuration, a set but unreadable one is a usage error.
    pub fn from_env() -> Result<Self, CliError> {
        match std::env::var_os("GLSTEP_CONFIG") {
            None => Ok(Config::default()),
            Some(path) => Config::load(Path::new(&path)),
        }
    }

    /// Loads and parses a config file.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Config::parse(&text)
            .map_err(|msg| CliError::Usage(format!("config {}: {msg}", path.display())))
    }

    fn parse(text: &str) -> Result<Self, String> {
        let mut cfg = Config::default();
        let mut section: Option<String> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with(';') {
                continue;
            }
            if let Some(name) = line.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
                section = Some(name.trim().to_string());
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(format!("line {}: expected key=value, got {line:?}", lineno + 1));
            };
            let map = match &section {
                None => &mut cfg.global,
                Some(name) => cfg.sections.entry(name.clone()).or_default(),
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(cfg)
    }

    fn raw(&self, section: &str, key: &str) -> Option<&str> {
        self.sections
            .get(section)
            .and_then(|m| m.get(key))
            .or_else(|| self.global.get(key))
            .map(String::as_str)
    }
}

/// One subcommand's view of the configuration.
pub struct Scope<'c> {
    cfg: &'c Config,
    section: &'static str,
}

impl<'c> Scope<'c> {
    pub fn new(cfg: &'c Config, section: &'static str) -> Self {
        Scope { cfg, section }
    }

    /// The CLI value if given, else the config value parsed as `T`.
    pub fn resolve<T>(&self, cli: Option<T>, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        if cli.is_some() {
            return Ok(cli);
        }
        match self.cfg.raw(self.section, key) {
            None => Ok(None),
            Some(text) => text
                .parse::<T>()
                .map(Some)
                .map_err(|e| CliError::Usage(format!("config key {key} = {text:?}: {e}"))),
        }
    }

    /// Boolean flag: set on the command line wins, else the config value.
    pub fn flag(&self, cli: bool, key: &str) -> Result<bool, CliError> {
        if cli {
            return Ok(true);
        }
        match self.cfg.raw(self.section, key) {
            None => Ok(false),
            Some("true") | Some("1") | Some("yes") => Ok(true),
            Some("false") | Some("0") | Some("no") => Ok(false),
            Some(other) => Err(CliError::Usage(format!(
                "config key {key} = {other:?}: expected a boolean"
            ))),
        }
    }
}
