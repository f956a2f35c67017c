use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Record of one CLI run, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// The resolved subcommand options, defaults filled in.
    pub config: serde_json::Value,
    pub seed: u64,
    pub threads: Option<usize>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
    pub outputs: Vec<String>,
}

/// Loads a TOML config, or a manifest JSON whose `config` is replayed as the
/// section of its subcommand.
pub fn load(path: &Path) -> Result<toml::Table> {
    let text = std::fs::read_to_string(path)?;
    if path.extension().is_some_and(|e| e == "json") {
        let m: RunManifest =
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut table = toml::Table::new();
        table.insert("seed".into(), toml::Value::Integer(m.seed as i64));
        if let Some(t) = m.threads {
            table.insert("threads".into(), toml::Value::Integer(t as i64));
        }
        let section = toml::Value::try_from(&m.config).map_err(|e| Error::Config(e.to_string()))?;
        table.insert(m.subcommand, section);
        Ok(table)
    } else {
        text.parse::<toml::Table>()
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }
}

/// Overlays the options given on the command line onto `file`.
pub fn merge<T: Serialize + DeserializeOwned>(flags: &T, file: Option<&toml::Value>) -> Result<T> {
    let given = toml::Value::try_from(flags).map_err(|e| Error::Config(e.to_string()))?;
    let mut base = match file {
        Some(toml::Value::Table(t)) => t.clone(),
        Some(_) => return Err(Error::Config("section must be a table".into())),
        None => toml::Table::new(),
    };
    if let toml::Value::Table(t) = given {
        overlay(&mut base, t);
    }
    toml::Value::Table(base)
        .try_into()
        .map_err(|e: toml::de::Error| Error::Config(e.to_string()))
}

fn overlay(base: &mut toml::Table, top: toml::Table) {
    for (k, v) in top {
        match (base.get_mut(&k), v) {
            (Some(toml::Value::Table(b)), toml::Value::Table(t)) => overlay(b, t),
            (_, v) => {
                base.insert(k, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Debug, Default, PartialEq, Serialize, Deserialize)]
    #[serde(default, deny_unknown_fields)]
    struct Opts {
        #[serde(skip_serializing_if = "Option::is_none")]
        k: Option<usize>,
        #[serde(skip_serializing_if = "Option::is_none")]
        eps: Option<f64>,
    }

    #[test]
    fn flags_win() {
        let file: toml::Table = "k = 3\neps = 0.5".parse().unwrap();
        let flags = Opts {
            k: Some(8),
            eps: None,
        };
        let got = merge(&flags, Some(&toml::Value::Table(file))).unwrap();
        assert_eq!(
            got,
            Opts {
                k: Some(8),
                eps: Some(0.5)
            }
        );
        let bad: toml::Table = "q = 1".parse().unwrap();
        assert!(matches!(
            merge(&Opts::default(), Some(&toml::Value::Table(bad))),
            Err(Error::Config(_))
        ));
    }
}
