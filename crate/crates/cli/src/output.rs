//! Report, CSV and manifest writing.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use flatlab::report::{to_csv, to_json, SCHEMA_VERSION};
use flatlab::{FlatError, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const TOOL: &str = "flatlab";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Debug, Serialize)]
pub struct FileDigest {
    pub path: String,
    pub sha256: String,
}

impl FileDigest {
    fn of(path: &Path, bytes: &[u8]) -> Self {
        FileDigest { path: path.display().to_string(), sha256: hex::encode(Sha256::digest(bytes)) }
    }
}

#[derive(Serialize)]
struct Envelope<'a, P, R> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    parameters: P,
    result: R,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    schema: u32,
    tool: &'static str,
    version: &'static str,
    command_line: &'a [String],
    seed: u64,
    jobs: usize,
    inputs: &'a [FileDigest],
    outputs: &'a [FileDigest],
    wall_time_seconds: f64,
}

/// One subcommand invocation: collects input and output digests and writes
/// the manifest at the end.
pub struct Run {
    command: &'static str,
    out_dir: PathBuf,
    format: Format,
    argv: Vec<String>,
    seed: u64,
    jobs: usize,
    inputs: Vec<FileDigest>,
    outputs: Vec<FileDigest>,
    start: Instant,
}

impl Run {
    pub fn new(command: &'static str, out_dir: &Path, format: Format, seed: u64, jobs: usize) -> Result<Self> {
        fs::create_dir_all(out_dir)?;
        let mut argv = vec![TOOL.to_string()];
        argv.extend(std::env::args().skip(1));
        Ok(Run {
            command,
            out_dir: out_dir.to_path_buf(),
            format,
            argv,
            seed,
            jobs,
            inputs: Vec::new(),
            outputs: Vec::new(),
            start: Instant::now(),
        })
    }

    pub fn read_input(&mut self, path: &Path) -> Result<Vec<u8>> {
        let bytes = fs::read(path).map_err(|e| FlatError::Io(format!("{}: {e}", path.display())))?;
        self.inputs.push(FileDigest::of(path, &bytes));
        Ok(bytes)
    }

    pub fn write_file(&mut self, path: &Path, bytes: &[u8]) -> Result<()> {
        if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
            fs::create_dir_all(parent)?;
        }
        fs::write(path, bytes).map_err(|e| FlatError::Io(format!("{}: {e}", path.display())))?;
        self.outputs.push(FileDigest::of(path, bytes));
        println!("wrote {}", path.display());
        Ok(())
    }

    pub fn report<P: Serialize, R: Serialize>(&mut self, parameters: P, result: &R) -> Result<()> {
        let envelope = Envelope {
            schema: SCHEMA_VERSION,
            tool: TOOL,
            version: VERSION,
            command: self.command,
            parameters,
            result,
        };
        let path = self.out_dir.join(format!("{}.json", self.command));
        self.write_file(&path, to_json(&envelope).as_bytes())
    }

    /// Writes `<command>.csv` when CSV output was requested.
    pub fn csv(&mut self, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
        if self.format != Format::Csv {
            return Ok(());
        }
        let path = self.out_dir.join(format!("{}.csv", self.command));
        self.write_file(&path, to_csv(header, rows).as_bytes())
    }

    pub fn finish(self) -> Result<()> {
        let manifest = RunManifest {
            schema: SCHEMA_VERSION,
            tool: TOOL,
            version: VERSION,
            command_line: &self.argv,
            seed: self.seed,
            jobs: self.jobs,
            inputs: &self.inputs,
            outputs: &self.outputs,
            wall_time_seconds: self.start.elapsed().as_secs_f64(),
        };
        let path = self.out_dir.join(format!("{}.manifest.json", self.command));
        fs::write(&path, to_json(&manifest)).map_err(|e| FlatError::Io(format!("{}: {e}", path.display())))?;
        println!("wrote {}", path.display());
        Ok(())
    }
}
