//! Optional JSON config file. Every field mirrors a flag; flags win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::CliError;

/// File-level defaults for any subcommand. All fields are optional; a
/// subcommand resolves each value as flag → file → built-in default.
/// Unknown keys are rejected so typos fail at launch instead of being
/// silently ignored.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub corpus: Option<PathBuf>,
    pub db: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub split: Option<String>,
    pub seed: Option<u64>,
    pub split_seed: Option<u64>,
    pub anonymize_fraction: Option<f64>,
    pub base_timestamp: Option<String>,
    pub embed_dim: Option<usize>,
    pub model: Option<String>,
    pub model_seed: Option<u64>,
    pub remote: Option<RemoteSection>,
    pub setting: Option<String>,
    pub agent: Option<String>,
    pub seeds: Option<String>,
    pub max_rounds: Option<u32>,
    pub workers: Option<usize>,
    pub host: Option<String>,
    pub port: Option<u16>,
    pub trace_dir: Option<PathBuf>,
    pub traces: Option<PathBuf>,
    pub k: Option<usize>,
    pub metrics: Option<PathBuf>,
    pub graph: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
}

/// Connection settings for a remote chat-completions backend.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RemoteSection {
    pub base_url: Option<String>,
    pub model: Option<String>,
    pub api_key_env: Option<String>,
    pub timeout_secs: Option<u64>,
}

impl RemoteSection {
    pub fn to_model_config(&self) -> genpipe::remote::RemoteModelConfig {
        let defaults = genpipe::remote::RemoteModelConfig::default();
        genpipe::remote::RemoteModelConfig {
            base_url: self.base_url.clone().unwrap_or(defaults.base_url),
            model: self.model.clone().unwrap_or(defaults.model),
            api_key_env: self.api_key_env.clone().unwrap_or(defaults.api_key_env),
            timeout_secs: self.timeout_secs.unwrap_or(defaults.timeout_secs),
        }
    }
}

pub fn load(path: &Path) -> Result<FileConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_config(dir: &tempfile::TempDir, body: &str) -> PathBuf {
        let path = dir.path().join("config.json");
        let mut file = std::fs::File::create(&path).unwrap();
        write!(file, "{body}").unwrap();
        path
    }

    #[test]
    fn loads_partial_config() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(&dir, r#"{"seed": 99, "split": "medium"}"#);
        let config = load(&path).unwrap();
        assert_eq!(config.seed, Some(99));
        assert_eq!(config.split.as_deref(), Some("medium"));
        assert_eq!(config.corpus, None);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = write_config(&dir, r#"{"sede": 99}"#);
        let err = load(&path).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_file_is_an_io_error() {
        let err = load(Path::new("/nonexistent/config.json")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn flag_beats_file_beats_default() {
        // The resolution idiom every subcommand uses.
        let file = FileConfig {
            seed: Some(5),
            ..FileConfig::default()
        };
        let flag: Option<u64> = Some(9);
        assert_eq!(flag.or(file.seed).unwrap_or(17), 9);
        assert_eq!(None.or(file.seed).unwrap_or(17), 5);
        let empty = FileConfig::default();
        assert_eq!(None.or(empty.seed).unwrap_or(17), 17);
    }
}
