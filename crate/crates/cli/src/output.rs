//! Output files with provenance.
//!
//! CSV files start with `#` comment lines naming the tool version, command,
//! seed, configuration hash and input hashes; JSON files carry the same data
//! under `provenance`. Nothing time-dependent is written, so reruns are
//! byte-identical. Floats use the shortest decimal that round-trips.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::data::sha256_hex;
use crate::{CliError, TOOL, VERSION};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InputRecord {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub seed: u64,
    /// SHA-256 of the command's resolved settings as JSON.
    pub config_sha256: String,
    pub inputs: Vec<InputRecord>,
}

impl Provenance {
    pub fn new(command: &str, seed: u64, settings: &impl Serialize, inputs: Vec<InputRecord>) -> Self {
        let json = serde_json::to_string(settings).expect("settings serialize");
        Provenance {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            seed,
            config_sha256: sha256_hex(json.as_bytes()),
            inputs,
        }
    }

    pub fn header_lines(&self) -> Vec<String> {
        let mut lines = vec![
            format!("{} {} {}", self.tool, self.version, self.command),
            format!("seed: {}", self.seed),
            format!("config_sha256: {}", self.config_sha256),
        ];
        if self.inputs.is_empty() {
            lines.push("input: none".into());
        }
        for i in &self.inputs {
            lines.push(format!("input: {} sha256={}", i.path, i.sha256));
        }
        lines
    }
}

/// Shortest round-trip rendering; negative zero prints as `0`.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        "0".into()
    } else {
        format!("{x}")
    }
}

pub fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_f64).unwrap_or_default()
}

/// Creates the output directory and resolves file names inside it.
pub struct OutDir {
    root: PathBuf,
    written: Vec<PathBuf>,
}

impl OutDir {
    pub fn create(root: &Path) -> Result<Self, CliError> {
        std::fs::create_dir_all(root).map_err(|e| CliError::Io { path: root.to_path_buf(), source: e })?;
        Ok(OutDir { root: root.to_path_buf(), written: Vec::new() })
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.root.join(name);
        let io = |e| CliError::Io { path: path.clone(), source: e };
        let mut f = std::fs::File::create(&path).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        log::info!("wrote {}", path.display());
        self.written.push(path.clone());
        Ok(path)
    }

    /// `extra` lines follow the provenance in the comment header.
    pub fn csv(
        &mut self,
        name: &str,
        provenance: &Provenance,
        extra: &[String],
        columns: &[&str],
        rows: impl IntoIterator<Item = Vec<String>>,
    ) -> Result<PathBuf, CliError> {
        let mut buf = Vec::new();
        for line in provenance.header_lines().iter().chain(extra) {
            buf.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            let runtime = |e: csv::Error| CliError::Runtime(format!("{name}: {e}"));
            w.write_record(columns).map_err(runtime)?;
            for row in rows {
                w.write_record(&row).map_err(runtime)?;
            }
            w.flush().map_err(|e| CliError::Runtime(format!("{name}: {e}")))?;
        }
        self.write(name, &buf)
    }

    pub fn json(&mut self, name: &str, value: &impl Serialize) -> Result<PathBuf, CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Runtime(format!("{name}: {e}")))?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }
}
