//! Peak topography maps: column-wise local maxima and the
//! maximum-along-interval column reduction.

use std::fmt::Write as _;

use ndarray::Array2;

use crate::chromatogram::Chromatogram;
use crate::error::{Error, Result};
use crate::exec;

/// A single column-local maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub row: usize,
    pub col: usize,
    pub height: f64,
}

/// The sparse peak set of one chromatogram, sorted by (col, row).
#[derive(Debug, Clone, PartialEq)]
pub struct PeakMap {
    pub source_id: String,
    pub dims: (usize, usize),
    pub peaks: Vec<Peak>,
}

impl PeakMap {
    /// Dense M x N view: zero everywhere except peak locations, which hold
    /// the peak height. Exactly reconstructible from `peaks` and `dims`.
    pub fn dense_view(&self) -> Array2<f64> {
        let mut out = Array2::zeros(self.dims);
        for p in &self.peaks {
            out[(p.row, p.col)] = p.height;
        }
        out
    }

    /// Peaks of column `c` as a subslice (peaks are sorted by column).
    pub fn column_peaks(&self, c: usize) -> &[Peak] {
        let start = self.peaks.partition_point(|p| p.col < c);
        let end = self.peaks.partition_point(|p| p.col <= c);
        &self.peaks[start..end]
    }

    /// Debug/inspection dump: `# source_id=...` header then `row,col,height`
    /// lines.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# source_id={}\nrow,col,height\n", self.source_id);
        for p in &self.peaks {
            writeln!(s, "{},{},{}", p.row, p.col, p.height).expect("write to String");
        }
        s
    }
}

/// Sweeps every column and keeps the strict local maxima above `min_height`.
///
/// A flat run of equal values counts as one candidate, attributed to its
/// leftmost index; the run is a peak only when both values adjacent to the
/// run exist and are strictly lower. Column endpoints are never peaks.
pub fn extract_peaks(c: &Chromatogram, min_height: f64) -> Result<PeakMap> {
    if !(min_height >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "min_height must be >= 0, got {min_height}"
        )));
    }
    let (m, n) = c.dims();
    let data = c.data();
    let per_col: Vec<Vec<Peak>> = exec::map_indexed(n, |col| {
        let mut peaks = Vec::new();
        if m < 3 {
            return peaks;
        }
        let at = |r: usize| data[(r, col)];
        let mut run_start = 0usize;
        for r in 1..=m {
            if r < m && at(r) == at(run_start) {
                continue;
            }
            // run is [run_start, r)
            let left_lower = run_start > 0 && at(run_start - 1) < at(run_start);
            let right_lower = r < m && at(r) < at(run_start);
            if left_lower && right_lower && at(run_start) > min_height {
                peaks.push(Peak {
                    row: run_start,
                    col,
                    height: at(run_start),
                });
            }
            run_start = r;
        }
        peaks
    });
    let peaks: Vec<Peak> = per_col.into_iter().flatten().collect();
    Ok(PeakMap {
        source_id: c.sample_id.clone(),
        dims: (m, n),
        peaks,
    })
}

/// Replaces each of `windows` intervals of a column with its maximum.
///
/// The window length is `floor(n / windows)`; a final shorter window covers
/// the remainder so no samples are dropped. Output length is therefore
/// `ceil(n / floor(n / windows))`.
pub fn max_along_interval(column: &[f64], windows: usize) -> Result<Vec<f64>> {
    let n = column.len();
    if windows == 0 || windows > n {
        return Err(Error::InvalidArgument(format!(
            "window count must be in 1..={n}, got {windows}"
        )));
    }
    let len = n / windows;
    let mut out = Vec::with_capacity(n.div_ceil(len));
    let mut start = 0;
    while start < n {
        let end = (start + len).min(n);
        let max = column[start..end]
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max);
        out.push(max);
        start = end;
    }
    Ok(out)
}
