// SPDX-License-Identifier: Apache-2.0

//! Run configuration: a key=value or JSON file merged with command-line
//! flags. Parameter keys share the preset file schema; any other key names
//! a subcommand option (flag name with `-` replaced by `_`).

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use mtkink_core::units::{load_preset_from_dirs, parse_key_value, PhysicalParams};

use crate::CliError;

pub const PRESET_DIR_ENV: &str = "MTKINK_PRESET_DIR";

const PARAM_KEYS: [&str; 11] = [
    "M", "A", "B", "k_stiff", "R0", "gamma", "q", "E_field", "T", "Tc", "c_temp",
];

#[derive(Debug, Default, Clone)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::validation(format!("cannot read {}: {e}", path.display())))?;
        let entries = if path.extension().is_some_and(|e| e == "json") {
            let value: serde_json::Value = serde_json::from_str(&text)
                .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
            let obj = value
                .as_object()
                .ok_or_else(|| CliError::validation("JSON config must be an object"))?;
            obj.iter()
                .map(|(k, v)| {
                    let s = match v {
                        serde_json::Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    (k.clone(), s)
                })
                .collect()
        } else {
            parse_key_value(&text)?
                .into_iter()
                .map(|(k, (_, v))| (k, v))
                .collect()
        };
        Ok(RunConfig { entries })
    }

    /// Option value from the file, parsed.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, CliError> {
        match self.entries.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::validation(format!("config key {key}: cannot parse '{raw}'"))
            }),
        }
    }

    /// `flag` if given, else the file value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError> {
        Ok(match flag {
            Some(v) => v,
            None => self.get(key)?.unwrap_or(default),
        })
    }

    pub fn pick_opt<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, CliError> {
        Ok(match flag {
            Some(v) => Some(v),
            None => self.get(key)?,
        })
    }

    fn param_overrides(&self) -> impl Iterator<Item = (&str, &str)> {
        self.entries
            .iter()
            .filter(|(k, _)| PARAM_KEYS.contains(&k.as_str()))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

/// Parameter selection shared by the physical subcommands.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Named preset (built-in or found in $MTKINK_PRESET_DIR)
    #[arg(long)]
    pub preset: Option<String>,
    /// key=value or JSON run configuration
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one parameter, e.g. --set B=1e34 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
    /// Friction coefficient override (kg/s)
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Electric field override (V/m)
    #[arg(long)]
    pub efield: Option<f64>,
}

impl ParamArgs {
    pub fn config(&self) -> Result<RunConfig, CliError> {
        RunConfig::load(self.config.as_deref())
    }

    /// Resolves preset → file overrides → --set → named flags, then validates.
    pub fn resolve(&self, config: &RunConfig) -> Result<PhysicalParams, CliError> {
        let name = match &self.preset {
            Some(n) => n.clone(),
            None => config
                .get::<String>("preset")?
                .unwrap_or_else(|| "paper".into()),
        };
        let dirs = preset_dirs();
        let mut params = load_preset_from_dirs(&name, &dirs)?;
        for (k, v) in config.param_overrides() {
            let value = v
                .parse()
                .map_err(|_| CliError::validation(format!("parameter {k}: cannot parse '{v}'")))?;
            params.set_field(k, value)?;
        }
        for item in &self.set {
            let (k, v) = item.split_once('=').ok_or_else(|| {
                CliError::validation(format!("--set expects KEY=VALUE, got '{item}'"))
            })?;
            let value = v
                .trim()
                .parse()
                .map_err(|_| CliError::validation(format!("--set {k}: cannot parse '{v}'")))?;
            params.set_field(k.trim(), value)?;
        }
        if let Some(g) = self.gamma {
            params.gamma = g;
        }
        if let Some(e) = self.efield {
            params.e_field = e;
        }
        params.validate()?;
        Ok(params)
    }
}

fn preset_dirs() -> Vec<PathBuf> {
    std::env::var_os(PRESET_DIR_ENV)
        .map(|v| std::env::split_paths(&v).collect())
        .unwrap_or_default()
}
