//! Run directory: resolved config echo, CSV tables, JSON summaries and
//! field snapshots.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone)]
pub struct OutDir {
    root: PathBuf,
}

#[derive(Serialize)]
struct Versioned<'a, S: Serialize> {
    schema_version: u32,
    command: &'a str,
    #[serde(flatten)]
    body: &'a S,
}

impl OutDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self, CliError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| CliError::io(&root, e))?;
        Ok(Self { root })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.root.join(name)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    fn file(&self, name: &str) -> Result<BufWriter<File>, CliError> {
        let p = self.path(name);
        File::create(&p).map(BufWriter::new).map_err(|e| CliError::io(p, e))
    }

    pub fn write_raw_json<S: Serialize>(&self, name: &str, body: &S) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        serde_json::to_writer_pretty(&mut w, body).map_err(|e| CliError::Json(e.to_string()))?;
        writeln!(w).and_then(|_| w.flush()).map_err(|e| CliError::io(self.path(name), e))
    }

    /// Summary JSON tagged with the schema version and command.
    pub fn write_json<S: Serialize>(&self, name: &str, command: &str, body: &S) -> Result<(), CliError> {
        self.write_raw_json(name, &Versioned { schema_version: SCHEMA_VERSION, command, body })
    }

    /// Writes a CSV table; an empty `rows` gives a header-only file.
    pub fn write_csv<R, I>(&self, name: &str, header: &[&str], rows: I) -> Result<(), CliError>
    where
        R: IntoIterator<Item = String>,
        I: IntoIterator<Item = R>,
    {
        let mut w = csv::Writer::from_writer(self.file(name)?);
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush().map_err(|e| CliError::io(self.path(name), e))
    }

    pub fn write_snapshot(&self, name: &str, fields: &[&nsmx::Field]) -> Result<(), CliError> {
        let mut w = self.file(name)?;
        nsmx::spectral::snapshot::write_snapshot(&mut w, fields)?;
        w.flush().map_err(|e| CliError::io(self.path(name), e))
    }
}

/// Shortest round-trip decimal form of a float.
pub fn num(x: f64) -> String {
    format!("{x:?}")
}

pub fn read_snapshot(path: &Path) -> Result<(nsmx::Lattice, Vec<nsmx::Field>), CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    Ok(nsmx::spectral::snapshot::read_snapshot(std::io::BufReader::new(f))?)
}
