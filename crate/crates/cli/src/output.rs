//! Run manifests and output sinks.

use std::io::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub args: Vec<String>,
    pub seed: Option<u64>,
    #[serde(rename = "K")]
    pub order: Option<usize>,
    pub mode: Option<String>,
    pub version: &'static str,
    /// Seconds since the epoch, taken from `SOURCE_DATE_EPOCH` (0 when unset).
    pub timestamp: u64,
}

impl RunManifest {
    pub fn new(command: &str, args: &[String]) -> Self {
        let timestamp = std::env::var("SOURCE_DATE_EPOCH")
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(0);
        RunManifest {
            command: command.to_string(),
            args: args.to_vec(),
            seed: None,
            order: None,
            mode: None,
            version: env!("CARGO_PKG_VERSION"),
            timestamp,
        }
    }
}

pub struct Sink {
    out: Option<PathBuf>,
}

impl Sink {
    pub fn new(out: Option<PathBuf>) -> Self {
        Sink { out }
    }

    fn write(&self, text: &str) -> Result<(), CliError> {
        match &self.out {
            Some(path) => std::fs::write(path, text)
                .map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(text.as_bytes())
                    .map_err(|e| CliError::Io(e.to_string()))
            }
        }
    }

    pub fn json<T: Serialize>(&self, manifest: &RunManifest, result: &T) -> Result<(), CliError> {
        #[derive(Serialize)]
        struct Doc<'a, T> {
            manifest: &'a RunManifest,
            result: &'a T,
        }
        let mut text = serde_json::to_string_pretty(&Doc { manifest, result })
            .map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.write(&text)
    }

    /// CSV preceded by a `#`-prefixed manifest line.
    pub fn csv(
        &self,
        manifest: &RunManifest,
        header: &str,
        rows: &[String],
    ) -> Result<(), CliError> {
        let mut text = format!(
            "# {}\n{header}\n",
            serde_json::to_string(manifest).map_err(|e| CliError::Io(e.to_string()))?
        );
        for r in rows {
            text.push_str(r);
            text.push('\n');
        }
        self.write(&text)
    }
}
