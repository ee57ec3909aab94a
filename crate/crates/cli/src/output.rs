//! Artifact writers. All files go through one `Artifacts` value so the
//! run manifest can list every emitted file; the manifest itself is
//! written last. CSV is LF-terminated with 17-significant-digit floats,
//! JSON is pretty-printed with the struct field order.

use burgers_core::entropy::GraphCurve;
use burgers_core::grid::fmt_g17;
use burgers_core::GridFunction;
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

pub struct Artifacts {
    dir: PathBuf,
    command: String,
    config_hash: String,
    seed: u64,
    files: Vec<String>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    command: &'a str,
    config_hash: &'a str,
    seed: u64,
    files: &'a [String],
}

impl Artifacts {
    pub fn new(dir: PathBuf, command: &str, config_bytes: &[u8], seed: u64) -> io::Result<Self> {
        std::fs::create_dir_all(&dir)?;
        let digest = Sha256::digest(config_bytes);
        let mut config_hash = String::with_capacity(7 + 2 * digest.len());
        config_hash.push_str("sha256:");
        for b in digest {
            config_hash.push_str(&format!("{b:02x}"));
        }
        Ok(Self { dir, command: command.to_string(), config_hash, seed, files: Vec::new() })
    }

    fn create(&mut self, name: &str) -> io::Result<BufWriter<File>> {
        let f = File::create(self.dir.join(name))?;
        self.files.push(name.to_string());
        Ok(BufWriter::new(f))
    }

    /// CSV table: header line, then one line per row of pre-formatted
    /// cells.
    pub fn csv<I>(&mut self, name: &str, header: &str, rows: I) -> io::Result<()>
    where
        I: IntoIterator<Item = Vec<String>>,
    {
        let mut w = self.create(name)?;
        writeln!(w, "{header}")?;
        for row in rows {
            writeln!(w, "{}", row.join(","))?;
        }
        w.flush()
    }

    pub fn grid_csv(&mut self, name: &str, y: &GridFunction) -> io::Result<()> {
        let mut w = self.create(name)?;
        y.write_csv(&mut w)?;
        w.flush()
    }

    pub fn graph_csv(&mut self, name: &str, g: &GraphCurve) -> io::Result<()> {
        let mut w = self.create(name)?;
        g.write_csv(&mut w)?;
        w.flush()
    }

    pub fn json<T: Serialize>(&mut self, name: &str, value: &T) -> io::Result<()> {
        let mut w = self.create(name)?;
        serde_json::to_writer_pretty(&mut w, value)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        writeln!(w)?;
        w.flush()
    }

    /// Writes the manifest and consumes the writer; call once, last.
    pub fn finish(self) -> io::Result<()> {
        let manifest = Manifest {
            command: &self.command,
            config_hash: &self.config_hash,
            seed: self.seed,
            files: &self.files,
        };
        let mut w = BufWriter::new(File::create(self.dir.join("manifest.json"))?);
        serde_json::to_writer_pretty(&mut w, &manifest)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
        writeln!(w)?;
        w.flush()
    }
}

/// One formatted float cell.
pub fn cell(v: f64) -> String {
    fmt_g17(v)
}
