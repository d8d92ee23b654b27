//! Delimited data files and the JSON run record.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use relloc::discriminator::AveragedPosterior;
use relloc::{Outcome1D, Outcome3D};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::tof::TofReport;

pub const SCHEMA_VERSION: u32 = 1;
pub const RECORD_FILE: &str = "run.json";

/// Everything needed to reproduce and inspect one command invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub version: String,
    pub config: RunConfig,
    pub results: RunResults,
}

impl RunRecord {
    pub fn new(config: RunConfig, results: RunResults) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            version: version_tag(),
            config,
            results,
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let record: RunRecord = serde_json::from_str(&text)?;
        if record.schema_version != SCHEMA_VERSION {
            return Err(CliError::Invalid(format!(
                "{} has schema version {}, expected {SCHEMA_VERSION}",
                path.display(),
                record.schema_version
            )));
        }
        Ok(record)
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(RECORD_FILE);
        let text = serde_json::to_string_pretty(self)?;
        fs::write(&path, text + "\n").map_err(|e| CliError::io(&path, e))?;
        Ok(path)
    }
}

pub fn version_tag() -> String {
    format!("relloc {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum RunResults {
    Simulate1d {
        events: Vec<Outcome1D>,
        x: Vec<f64>,
        position_density: Vec<f64>,
        p: Vec<f64>,
        q_induced: Vec<f64>,
        q_prelocalised: Vec<f64>,
        two_peaks: bool,
    },
    Simulate3d {
        events: Vec<Outcome3D>,
        x: Vec<f64>,
        marginals: [Vec<f64>; 3],
        principal_axis: [f64; 3],
        bimodal: bool,
        inversion_asymmetry: f64,
    },
    Discriminate {
        curves: Vec<AveragedPosterior<f64>>,
    },
    Tof(TofReport),
}

/// A CSV file with `#` comment lines ahead of the column names.
pub struct Table<'a> {
    pub comments: Vec<String>,
    pub columns: &'a [&'a str],
}

impl Table<'_> {
    pub fn write<R, I>(&self, path: &Path, rows: I) -> Result<(), CliError>
    where
        R: AsRef<[String]>,
        I: IntoIterator<Item = R>,
    {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut out = BufWriter::new(file);
        let emit = || -> std::io::Result<()> {
            for line in &self.comments {
                writeln!(out, "# {line}")?;
            }
            writeln!(out, "{}", self.columns.join(","))?;
            for row in rows {
                writeln!(out, "{}", row.as_ref().join(","))?;
            }
            out.flush()
        };
        emit().map_err(|e| CliError::io(path, e))
    }
}

/// Shortest representation that parses back to the same f64.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}
