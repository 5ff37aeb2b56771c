//! 2-D intensity images, region-labeled libraries, and their file formats.
//!
//! A chromatogram file is plain UTF-8 CSV, one line per matrix row, `.` as
//! the decimal separator, with optional leading `#` comment lines. Metadata
//! travels in a JSON sidecar next to the data file (`<stem>.json`), or as
//! `# sample_id=...` / `# region=...` comment lines when no sidecar exists.
//! Values are written with Rust's shortest-round-trip float formatting, so
//! save/load is exact.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One 2-D peak-profile image. Row index = second retention time (M rows),
/// column index = first retention time (N columns).
#[derive(Debug, Clone, PartialEq)]
pub struct Chromatogram {
    pub sample_id: String,
    /// Geographic source label.
    pub region: String,
    data: Array2<f64>,
}

impl Chromatogram {
    /// Validates non-negative finite intensities and minimum dimensions
    /// (M >= 2, N >= 1).
    pub fn new(sample_id: impl Into<String>, region: impl Into<String>, data: Array2<f64>) -> Result<Self> {
        let (m, n) = data.dim();
        if m < 2 || n < 1 {
            return Err(Error::Validation(format!(
                "matrix must be at least 2x1, got {m}x{n}"
            )));
        }
        for ((r, c), &v) in data.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite intensity {v} at row {r}, column {c}"
                )));
            }
            if v < 0.0 {
                return Err(Error::Validation(format!(
                    "negative intensity {v} at row {r}, column {c}"
                )));
            }
        }
        Ok(Self {
            sample_id: sample_id.into(),
            region: region.into(),
            data,
        })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.data
    }

    /// Number of rows M.
    pub fn m(&self) -> usize {
        self.data.nrows()
    }

    /// Number of columns N.
    pub fn n(&self) -> usize {
        self.data.ncols()
    }

    pub fn dims(&self) -> (usize, usize) {
        self.data.dim()
    }

    /// Column `c` as a contiguous vector of length M.
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.data.column(c).to_vec()
    }

    pub(crate) fn same_dims(&self, other: &Chromatogram) -> Result<()> {
        if self.dims() != other.dims() {
            return Err(Error::dims(self.dims(), other.dims()));
        }
        Ok(())
    }
}

/// Ordered reference library: K template images and their region labels.
/// Entry order is load order; downstream reports index into it.
#[derive(Debug, Clone)]
pub struct SourceLibrary {
    pub entries: Vec<Chromatogram>,
    pub regions: Vec<String>,
}

impl SourceLibrary {
    pub fn new(entries: Vec<Chromatogram>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::Validation("library must not be empty".into()));
        }
        let dims = entries[0].dims();
        for (i, e) in entries.iter().enumerate() {
            if e.dims() != dims {
                return Err(Error::ManifestEntry {
                    index: i,
                    message: format!(
                        "dimension mismatch: expected {}x{}, got {}x{}",
                        dims.0,
                        dims.1,
                        e.m(),
                        e.n()
                    ),
                });
            }
        }
        let regions = entries.iter().map(|e| e.region.clone()).collect();
        Ok(Self { entries, regions })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    sample_id: String,
    region: String,
}

/// One line of a library manifest: `{ "path": ..., "region": ... }`.
/// Paths are resolved relative to the manifest's directory.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub path: String,
    pub region: String,
}

fn sidecar_path(path: &Path) -> PathBuf {
    path.with_extension("json")
}

/// Writes the intensity CSV and its metadata sidecar. Rejects an empty
/// sample id before touching the filesystem.
pub fn save_chromatogram(c: &Chromatogram, path: &Path) -> Result<()> {
    if c.sample_id.is_empty() {
        return Err(Error::Validation(
            "sample_id must not be empty when saving".into(),
        ));
    }
    let mut body = String::new();
    for row in c.data.rows() {
        let mut first = true;
        for v in row {
            if !first {
                body.push(',');
            }
            // Display for f64 is shortest-round-trip, so re-parsing is exact.
            write!(body, "{v}").expect("write to String");
            first = false;
        }
        body.push('\n');
    }
    fs::File::create(path)
        .and_then(|mut f| f.write_all(body.as_bytes()))
        .map_err(|e| Error::io(path, e))?;

    let side = Sidecar {
        sample_id: c.sample_id.clone(),
        region: c.region.clone(),
    };
    let sp = sidecar_path(path);
    let json = serde_json::to_string_pretty(&side).expect("sidecar serializes");
    fs::write(&sp, json).map_err(|e| Error::io(&sp, e))?;
    Ok(())
}

/// Parses a chromatogram CSV plus metadata from the sidecar (preferred) or
/// `# key=value` header comments.
pub fn load_chromatogram(path: &Path) -> Result<Chromatogram> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;

    let mut comment_id: Option<String> = None;
    let mut comment_region: Option<String> = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width: Option<usize> = None;

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if let Some(rest) = line.strip_prefix('#') {
            let rest = rest.trim();
            if let Some(v) = rest.strip_prefix("sample_id=") {
                comment_id = Some(v.trim().to_string());
            } else if let Some(v) = rest.strip_prefix("region=") {
                comment_region = Some(v.trim().to_string());
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let mut row = Vec::new();
        for (fieldno, field) in line.split(',').enumerate() {
            let v: f64 = field.trim().parse().map_err(|_| Error::Parse {
                path: path.to_path_buf(),
                row: lineno + 1,
                col: fieldno + 1,
                message: format!("not a number: {field:?}"),
            })?;
            if !v.is_finite() {
                return Err(Error::Validation(format!(
                    "non-finite intensity at {}:{} field {}",
                    path.display(),
                    lineno + 1,
                    fieldno + 1
                )));
            }
            if v < 0.0 {
                return Err(Error::Validation(format!(
                    "negative intensity {v} at {}:{} field {}",
                    path.display(),
                    lineno + 1,
                    fieldno + 1
                )));
            }
            row.push(v);
        }
        match width {
            None => width = Some(row.len()),
            Some(w) if w != row.len() => {
                return Err(Error::Parse {
                    path: path.to_path_buf(),
                    row: lineno + 1,
                    col: row.len(),
                    message: format!("ragged row: expected {w} fields, got {}", row.len()),
                });
            }
            _ => {}
        }
        rows.push(row);
    }

    let n = width.unwrap_or(0);
    let m = rows.len();
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let data = Array2::from_shape_vec((m, n), flat)
        .map_err(|e| Error::Validation(format!("bad matrix shape: {e}")))?;

    let sp = sidecar_path(path);
    let (sample_id, region) = if sp.exists() {
        let side: Sidecar = serde_json::from_str(
            &fs::read_to_string(&sp).map_err(|e| Error::io(&sp, e))?,
        )
        .map_err(|e| Error::Json {
            path: sp.clone(),
            source: e,
        })?;
        (side.sample_id, side.region)
    } else {
        match (comment_id, comment_region) {
            (Some(id), Some(r)) => (id, r),
            _ => {
                return Err(Error::Validation(format!(
                    "no metadata for {}: sidecar {} missing and no '# sample_id=' / '# region=' header",
                    path.display(),
                    sp.display()
                )))
            }
        }
    };

    Chromatogram::new(sample_id, region, data)
}

/// Loads a manifest (JSON array of `{path, region}`) and every referenced
/// chromatogram, preserving manifest order. The manifest region overrides
/// the sidecar's, so the manifest stays the single source of labels.
pub fn load_library(manifest_path: &Path) -> Result<SourceLibrary> {
    let text = fs::read_to_string(manifest_path).map_err(|e| Error::io(manifest_path, e))?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: manifest_path.to_path_buf(),
        source: e,
    })?;
    if entries.is_empty() {
        return Err(Error::Validation("manifest lists no entries".into()));
    }
    let base = manifest_path.parent().unwrap_or(Path::new("."));
    let mut out = Vec::with_capacity(entries.len());
    for (i, me) in entries.iter().enumerate() {
        let p = base.join(&me.path);
        let mut c = load_chromatogram(&p).map_err(|e| Error::ManifestEntry {
            index: i,
            message: e.to_string(),
        })?;
        c.region = me.region.clone();
        out.push(c);
    }
    SourceLibrary::new(out)
}

/// Writes a manifest for the given entries, with paths as given.
pub fn save_manifest(entries: &[ManifestEntry], path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(entries).expect("manifest serializes");
    fs::write(path, json).map_err(|e| Error::io(path, e))
}
