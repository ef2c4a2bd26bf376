use std::path::{Path, PathBuf};

use serde::Deserialize;

/// Optional TOML file with run settings; command-line flags take precedence.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Config {
    /// Maximum number of tensor terms held during an expansion.
    pub ceiling: Option<u64>,
    /// Maximum number of exponent tuples a search may examine.
    pub max_candidates: Option<u64>,
    pub workers: Option<usize>,
    pub store: Option<PathBuf>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config, String> {
        let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
        toml::from_str(&text).map_err(|e| format!("{}: {e}", path.display()))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overridden_by(self, flags: Config) -> Config {
        Config {
            ceiling: flags.ceiling.or(self.ceiling),
            max_candidates: flags.max_candidates.or(self.max_candidates),
            workers: flags.workers.or(self.workers),
            store: flags.store.or(self.store),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_win() {
        let file: Config = toml::from_str("ceiling = 10\nworkers = 2\nstore = \"a.jsonl\"").unwrap();
        let flags = Config { workers: Some(4), ..Config::default() };
        let merged = file.overridden_by(flags);
        assert_eq!(merged.ceiling, Some(10));
        assert_eq!(merged.workers, Some(4));
        assert_eq!(merged.store, Some(PathBuf::from("a.jsonl")));
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(toml::from_str::<Config>("celing = 10").is_err());
    }
}
