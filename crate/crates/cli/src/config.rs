use std::path::Path;

use serde_json::{Map, Value};

use crate::cli::Opts;
use crate::error::{CliError, CliResult};

/// Defaults, then the `[section]` table of the config file, then flags.
pub fn resolve<T: Opts>(section: &str, mut flags: T, file: Option<&Path>) -> CliResult<T> {
    let mut merged = Map::new();
    if let Some(path) = file {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let table: toml::Table = text
            .parse()
            .map_err(|e| CliError::usage(format!("{}: {e}", path.display())))?;
        if let Some(sec) = table.get(section) {
            match serde_json::to_value(sec).map_err(|e| CliError::usage(e.to_string()))? {
                Value::Object(m) => merged = m,
                _ => return Err(CliError::usage(format!("{}: [{section}] must be a table", path.display()))),
            }
        }
    }
    flags.normalize_flags();
    if let Value::Object(m) = serde_json::to_value(&flags).map_err(|e| CliError::usage(e.to_string()))? {
        merged.extend(m.into_iter().filter(|(_, v)| !v.is_null()));
    }
    let mut opts: T = serde_json::from_value(Value::Object(merged))
        .map_err(|e| CliError::usage(format!("options for {section}: {e}")))?;
    opts.fill_defaults();
    Ok(opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::AugmentOpts;

    #[test]
    fn flags_override_file_override_defaults() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(&cfg, "[augment]\nratio = 0.25\ndataset = \"d.jsonl\"\n").unwrap();

        let none = resolve("augment", AugmentOpts::default(), None).unwrap();
        assert_eq!(none.ratio, Some(0.5));

        let from_file = resolve("augment", AugmentOpts::default(), Some(&cfg)).unwrap();
        assert_eq!(from_file.ratio, Some(0.25));
        assert_eq!(from_file.dataset.as_deref(), Some(Path::new("d.jsonl")));

        let flags = AugmentOpts {
            ratio: Some(1.0),
            ..AugmentOpts::default()
        };
        assert_eq!(resolve("augment", flags, Some(&cfg)).unwrap().ratio, Some(1.0));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = dir.path().join("c.toml");
        std::fs::write(&cfg, "[augment]\nratoi = 0.25\n").unwrap();
        let err = resolve("augment", AugmentOpts::default(), Some(&cfg)).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }
}
