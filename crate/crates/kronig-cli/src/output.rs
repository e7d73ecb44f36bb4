//! Deterministic CSV and manifest writing.
//!
//! Numbers are formatted with 12 significant digits in scientific notation
//! and a locale-independent decimal point; two runs with the same inputs
//! produce byte-identical files.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

/// 12-significant-digit scientific formatting for energies and lengths.
pub fn num(x: f64) -> String {
    format!("{x:.11e}")
}

/// One CSV artifact buffered in memory until `write`.
pub struct Csv {
    name: &'static str,
    buf: String,
}

impl Csv {
    /// Starts a file with its header row (column names carry units).
    pub fn new(name: &'static str, header: &[&str]) -> Self {
        let mut buf = header.join(",");
        buf.push('\n');
        Csv { name, buf }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.buf.push_str(&fields.join(","));
        self.buf.push('\n');
    }

    pub fn name(&self) -> &'static str {
        self.name
    }

    pub fn write(&self, dir: &Path) -> io::Result<PathBuf> {
        let path = dir.join(self.name);
        fs::write(&path, self.buf.as_bytes())?;
        Ok(path)
    }
}

/// Writes `manifest.txt`: tool version, command, the fully resolved
/// configuration, any extra result lines, and the emitted files.
pub fn write_manifest(
    dir: &Path,
    command: &str,
    entries: &[(String, String)],
    extras: &[(String, String)],
    files: &[&str],
) -> io::Result<PathBuf> {
    let mut buf = String::new();
    buf.push_str(&format!("kronig {}\n", env!("CARGO_PKG_VERSION")));
    buf.push_str(&format!("command = {command}\n"));
    for (k, v) in entries {
        buf.push_str(&format!("{k} = {v}\n"));
    }
    for (k, v) in extras {
        buf.push_str(&format!("{k} = {v}\n"));
    }
    for f in files {
        buf.push_str(&format!("file = {f}\n"));
    }
    let path = dir.join("manifest.txt");
    fs::write(&path, buf.as_bytes())?;
    Ok(path)
}
