use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::time::Instant;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use unmix_core::Result;

/// Provenance written next to every output artifact.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    /// Full argument vector, program name excluded; `replay` re-parses it.
    pub argv: Vec<String>,
    pub parameters: Value,
    pub seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
    pub tool_version: String,
    pub started_at: DateTime<Utc>,
    pub wall_clock_seconds: f64,
}

pub struct ManifestBuilder {
    command: &'static str,
    argv: Vec<String>,
    started_at: DateTime<Utc>,
    clock: Instant,
}

impl ManifestBuilder {
    pub fn start(command: &'static str, argv: &[String]) -> Self {
        ManifestBuilder {
            command,
            argv: argv.to_vec(),
            started_at: Utc::now(),
            clock: Instant::now(),
        }
    }

    pub fn finish(
        self,
        parameters: Value,
        seeds: Vec<u64>,
        outputs: Vec<PathBuf>,
    ) -> RunManifest {
        RunManifest {
            command: self.command.to_string(),
            argv: self.argv,
            parameters,
            seeds,
            outputs,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            started_at: self.started_at,
            wall_clock_seconds: self.clock.elapsed().as_secs_f64(),
        }
    }
}

impl RunManifest {
    /// `<output>.manifest.json` beside the first output.
    pub fn path_for(output: &Path) -> PathBuf {
        let mut name = output.file_name().unwrap_or_default().to_os_string();
        name.push(".manifest.json");
        output.with_file_name(name)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let w = BufWriter::new(File::create(path)?);
        serde_json::to_writer_pretty(w, self)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self> {
        Ok(serde_json::from_reader(BufReader::new(File::open(path)?))?)
    }
}
