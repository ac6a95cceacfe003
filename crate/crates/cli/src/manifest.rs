use std::path::{Path, PathBuf};

use crisk::{Error, Result, SCHEMA_VERSION};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Record of one command invocation, written next to its outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub tool_version: String,
    pub command: String,
    /// Arguments after the program name, as given.
    pub args: Vec<String>,
    /// Directory relative paths in `args` are resolved against.
    pub working_directory: PathBuf,
    /// Fully resolved configuration.
    pub config: Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub duration_seconds: f64,
}

impl RunManifest {
    /// `<first output>.manifest.json`.
    pub fn path_for(primary_output: &Path) -> PathBuf {
        let mut name = primary_output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        primary_output.with_file_name(name)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Document(e.to_string()))?;
        std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let m: Self =
            serde_json::from_str(&text).map_err(|e| Error::Document(format!("{}: {e}", path.display())))?;
        if m.schema_version != SCHEMA_VERSION {
            return Err(Error::Document(format!("unsupported manifest schema_version {}", m.schema_version)));
        }
        Ok(m)
    }
}

/// Replaces any `--out-dir` in `args` with `out_dir`.
pub fn with_out_dir(args: &[String], out_dir: &Path) -> Vec<String> {
    let mut kept = Vec::with_capacity(args.len() + 2);
    let mut skip_next = false;
    for a in args {
        if skip_next {
            skip_next = false;
            continue;
        }
        if a == "--out-dir" {
            skip_next = true;
        } else if !a.starts_with("--out-dir=") {
            kept.push(a.clone());
        }
    }
    kept.push("--out-dir".into());
    kept.push(out_dir.to_string_lossy().into_owned());
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_name_follows_output() {
        assert_eq!(RunManifest::path_for(Path::new("/x/gbm.model")), PathBuf::from("/x/gbm.model.manifest.json"));
    }

    #[test]
    fn out_dir_is_replaced() {
        let args: Vec<String> = ["--out-dir", "a", "generate", "--out-dir=b", "--rows", "5"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        assert_eq!(with_out_dir(&args, Path::new("c")), vec!["generate", "--rows", "5", "--out-dir", "c"]);
    }
}
