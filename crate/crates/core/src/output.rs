//! CSV tables, the run manifest, and crash-safe file writes.
//!
//! Numbers are written in scientific notation with 9 significant digits and a
//! `.` decimal separator. Files are first written as `<name>.partial` and
//! renamed into place once complete.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

/// Scientific notation, 9 significant digits.
pub fn fmt_sci(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.8e}")
    } else {
        format!("{v}")
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_sci(v)).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn partial_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".partial");
    path.with_file_name(name)
}

/// Write `bytes` to `<path>.partial`, sync, then rename onto `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = partial_path(path);
    let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
    f.write_all(bytes).map_err(|e| Error::io(&tmp, e))?;
    f.sync_all().map_err(|e| Error::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Run metadata. Rendered as `#` comment lines followed by the config echo,
/// so the manifest itself is a valid config file.
#[derive(Clone, Debug, Default)]
pub struct RunManifest {
    pub version: String,
    pub seed: u64,
    pub wall_time: Duration,
    pub n_traj: usize,
    pub n_discarded: usize,
    /// Free-form diagnostics (`key`, `value`).
    pub notes: Vec<(String, String)>,
    /// Output file name and its SHA-256.
    pub files: Vec<(String, String)>,
    pub config_echo: String,
}

impl RunManifest {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# sit-squeeze run manifest");
        let _ = writeln!(out, "# version: {}", self.version);
        let _ = writeln!(out, "# seed: {}", self.seed);
        let _ = writeln!(out, "# wall_time_s: {:.3}", self.wall_time.as_secs_f64());
        let _ = writeln!(out, "# trajectories: {}", self.n_traj);
        let _ = writeln!(out, "# discarded: {}", self.n_discarded);
        for (k, v) in &self.notes {
            let _ = writeln!(out, "# {k}: {v}");
        }
        for (name, sum) in &self.files {
            let _ = writeln!(out, "# sha256 {sum}  {name}");
        }
        let _ = writeln!(out, "#");
        out.push_str(&self.config_echo);
        out
    }
}

/// Collects output files, writing each atomically and remembering its checksum.
#[derive(Debug)]
pub struct OutputDir {
    pub root: PathBuf,
    pub files: Vec<(String, String)>,
}

impl OutputDir {
    pub fn create(root: &Path) -> Result<Self> {
        fs::create_dir_all(root).map_err(|e| Error::io(root, e))?;
        Ok(OutputDir {
            root: root.to_path_buf(),
            files: Vec::new(),
        })
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        write_atomic(&path, bytes)?;
        self.files.push((name.to_string(), sha256_hex(bytes)));
        Ok(path)
    }

    /// Write the manifest last, listing every file written so far.
    pub fn finish(self, mut manifest: RunManifest) -> Result<PathBuf> {
        manifest.files = self.files;
        let path = self.root.join("manifest.txt");
        write_atomic(&path, manifest.render().as_bytes())?;
        Ok(path)
    }
}
