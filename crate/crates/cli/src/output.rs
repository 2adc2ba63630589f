//! CSV and manifest writers. Reals are written with 17 significant digits.

use std::fmt;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use galton_dirac::{Histogram, SpinorField};
use serde::Serialize;

use crate::error::{CliError, Result};

/// Lossless display of an `f64`.
pub struct R(pub f64);

impl fmt::Display for R {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:.16e}", self.0)
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.display().to_string(),
        source,
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(io_err(dir))
}

pub struct Csv {
    path: PathBuf,
    w: BufWriter<File>,
}

impl Csv {
    pub fn create(dir: &Path, name: &str, header: &str) -> Result<Self> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(io_err(&path))?;
        let mut csv = Self {
            w: BufWriter::new(file),
            path,
        };
        csv.line(format_args!("{header}"))?;
        Ok(csv)
    }

    pub fn line(&mut self, args: fmt::Arguments<'_>) -> Result<()> {
        writeln!(self.w, "{args}").map_err(io_err(&self.path))
    }

    pub fn finish(mut self) -> Result<()> {
        self.w.flush().map_err(io_err(&self.path))
    }
}

pub fn write_histogram(dir: &Path, name: &str, h: &Histogram) -> Result<()> {
    let mut csv = Csv::create(dir, name, "p,H,bin_lo,bin_hi")?;
    for ((p, d), e) in h.centers().iter().zip(&h.density).zip(h.bin_edges.windows(2)) {
        csv.line(format_args!("{},{},{},{}", R(*p), R(*d), R(e[0]), R(e[1])))?;
    }
    csv.finish()
}

/// Full complex state, one row per site.
pub fn write_state(dir: &Path, name: &str, field: &SpinorField) -> Result<()> {
    let grid = field.grid();
    let mut csv = Csv::create(dir, name, "m,x,re_minus,im_minus,re_plus,im_plus")?;
    for (m, s) in field.iter().enumerate() {
        csv.line(format_args!(
            "{m},{},{},{},{},{}",
            R(grid.position(m)),
            R(s.minus.re),
            R(s.minus.im),
            R(s.plus.re),
            R(s.plus.im)
        ))?;
    }
    csv.finish()
}

#[derive(Debug, Serialize)]
pub struct Manifest<'a> {
    pub experiment: &'a str,
    pub status: &'a str,
    pub version: &'a str,
    pub seed: Option<u64>,
    pub started_unix_s: u64,
    pub wall_time_s: f64,
    pub config: &'a std::collections::BTreeMap<String, String>,
    pub summary: &'a serde_json::Map<String, serde_json::Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn write_manifest(dir: &Path, manifest: &Manifest<'_>) -> Result<()> {
    let path = dir.join("manifest.json");
    let text = serde_json::to_string_pretty(manifest).map_err(|e| CliError::Runtime(e.to_string()))?;
    fs::write(&path, text + "\n").map_err(io_err(&path))
}
