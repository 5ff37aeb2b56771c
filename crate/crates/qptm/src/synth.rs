//! Synthetic 2-D peak-profile generator: separable-Gaussian peak mixtures
//! with region-family structure, multiplicative height jitter, and additive
//! baseline noise. Stands in for real instrument data in end-to-end
//! evaluation; every sample is reproducible from `(seed, sample index)`.

use std::path::Path;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::chromatogram::{save_manifest, save_chromatogram, Chromatogram, ManifestEntry, SourceLibrary};
use crate::error::{Error, Result};
use crate::exec;
use crate::rng::Rng;

/// One planted Gaussian summit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakSpec {
    /// (row, col) center.
    pub center: (f64, f64),
    pub height: f64,
    pub sigma_row: f64,
    pub sigma_col: f64,
}

/// A region family: the regional fingerprint shared with sibling families
/// plus this family's own source-specific peaks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family_id: String,
    pub shared_peaks: Vec<PeakSpec>,
    pub source_peaks: Vec<PeakSpec>,
    /// Max multiplicative height perturbation per peak per sample:
    /// heights scale by `1 + u`, `u ~ U(0, jitter)`, so the ratio of two
    /// co-located realizations never exceeds `1 + jitter`. That bound is
    /// what makes the epsilon calibration knee analytically known.
    pub height_jitter: f64,
    /// Std of the additive per-pixel Gaussian baseline noise.
    pub noise_sigma: f64,
    pub seed: u64,
}

fn check_peak_in_bounds(p: &PeakSpec, dims: (usize, usize)) -> Result<()> {
    let (m, n) = (dims.0 as f64, dims.1 as f64);
    if !(p.sigma_row > 0.0 && p.sigma_col > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "peak sigmas must be positive, got ({}, {})",
            p.sigma_row, p.sigma_col
        )));
    }
    if !(p.height > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "peak height must be positive, got {}",
            p.height
        )));
    }
    let (r, c) = p.center;
    if r - 3.0 * p.sigma_row < 0.0
        || r + 3.0 * p.sigma_row > m - 1.0
        || c - 3.0 * p.sigma_col < 0.0
        || c + 3.0 * p.sigma_col > n - 1.0
    {
        return Err(Error::InvalidArgument(format!(
            "peak at ({r}, {c}) does not fit {m}x{n} with a 3-sigma margin"
        )));
    }
    Ok(())
}

/// Adds one truncated Gaussian (5 sigma box) to the image.
fn stamp(data: &mut Array2<f64>, p: &PeakSpec, height: f64) {
    let (m, n) = data.dim();
    let (cr, cc) = p.center;
    let r_lo = ((cr - 5.0 * p.sigma_row).floor().max(0.0)) as usize;
    let r_hi = ((cr + 5.0 * p.sigma_row).ceil() as usize).min(m - 1);
    let c_lo = ((cc - 5.0 * p.sigma_col).floor().max(0.0)) as usize;
    let c_hi = ((cc + 5.0 * p.sigma_col).ceil() as usize).min(n - 1);
    let inv2sr = 1.0 / (2.0 * p.sigma_row * p.sigma_row);
    let inv2sc = 1.0 / (2.0 * p.sigma_col * p.sigma_col);
    for r in r_lo..=r_hi {
        let dr = r as f64 - cr;
        let row_term = dr * dr * inv2sr;
        for c in c_lo..=c_hi {
            let dc = c as f64 - cc;
            data[(r, c)] += height * (-(row_term + dc * dc * inv2sc)).exp();
        }
    }
}

/// Renders `count` samples of a family. Returns the chromatograms together
/// with the realized (jittered) peak list for each sample, for use as
/// ground truth by oracles. Sample `i` draws from stream `(spec.seed, i)`
/// only, so rendering parallelizes without affecting determinism.
pub fn render(spec: &FamilySpec, dims: (usize, usize), count: usize) -> Result<Vec<(Chromatogram, Vec<PeakSpec>)>> {
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be positive".into()));
    }
    if !(spec.height_jitter >= 0.0) || !spec.height_jitter.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "height jitter must be finite and >= 0, got {}",
            spec.height_jitter
        )));
    }
    if !(spec.noise_sigma >= 0.0) || !spec.noise_sigma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "noise sigma must be finite and >= 0, got {}",
            spec.noise_sigma
        )));
    }
    for p in spec.shared_peaks.iter().chain(&spec.source_peaks) {
        check_peak_in_bounds(p, dims)?;
    }

    exec::try_map_indexed(count, |i| {
        let mut rng = Rng::from_seed_stream(spec.seed, i as u64);
        let mut data = Array2::zeros(dims);
        let mut realized = Vec::new();
        for p in spec.shared_peaks.iter().chain(&spec.source_peaks) {
            let factor = 1.0 + rng.uniform_in(0.0, spec.height_jitter);
            let h = p.height * factor;
            stamp(&mut data, p, h);
            realized.push(PeakSpec { height: h, ..*p });
        }
        if spec.noise_sigma > 0.0 {
            for v in data.iter_mut() {
                *v = (*v + spec.noise_sigma * rng.normal()).max(0.0);
            }
        }
        let id = format!("{}-{:02}", spec.family_id, i);
        let c = Chromatogram::new(id, spec.family_id.clone(), data)?;
        Ok((c, realized))
    })
}

/// Ground truth emitted next to a generated benchmark.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TruthRecord {
    pub sample_id: String,
    pub region: String,
    pub is_template: bool,
    pub peaks: Vec<PeakSpec>,
}

/// A rendered benchmark: library templates (first sample of each family),
/// labeled test samples, and planted ground truth for all of them.
#[derive(Debug, Clone)]
pub struct Benchmark {
    pub library: SourceLibrary,
    pub tests: Vec<Chromatogram>,
    pub truth: Vec<TruthRecord>,
}

/// Renders every family and splits samples into library templates and test
/// set: the first sample per family becomes the template, the rest become
/// labeled tests.
pub fn make_benchmark(families: &[FamilySpec], dims: (usize, usize), per_family: usize) -> Result<Benchmark> {
    if families.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "benchmark needs at least 2 families, got {}",
            families.len()
        )));
    }
    let mut templates = Vec::new();
    let mut tests = Vec::new();
    let mut truth = Vec::new();
    for spec in families {
        let samples = render(spec, dims, per_family)?;
        for (i, (c, peaks)) in samples.into_iter().enumerate() {
            truth.push(TruthRecord {
                sample_id: c.sample_id.clone(),
                region: c.region.clone(),
                is_template: i == 0,
                peaks,
            });
            if i == 0 {
                templates.push(c);
            } else {
                tests.push(c);
            }
        }
    }
    Ok(Benchmark {
        library: SourceLibrary::new(templates)?,
        tests,
        truth,
    })
}

impl Benchmark {
    /// Writes the benchmark as a directory tree: one CSV + sidecar per
    /// sample, `manifest.json` for the library, `tests.json` for the test
    /// set, and `truth.json` with planted peaks and labels.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let entry = |c: &Chromatogram| ManifestEntry {
            path: format!("{}.csv", c.sample_id),
            region: c.region.clone(),
        };
        for c in self.library.entries.iter().chain(&self.tests) {
            save_chromatogram(c, &dir.join(format!("{}.csv", c.sample_id)))?;
        }
        let lib_entries: Vec<ManifestEntry> = self.library.entries.iter().map(entry).collect();
        save_manifest(&lib_entries, &dir.join("manifest.json"))?;
        let test_entries: Vec<ManifestEntry> = self.tests.iter().map(entry).collect();
        save_manifest(&test_entries, &dir.join("tests.json"))?;
        let truth_path = dir.join("truth.json");
        let json = serde_json::to_string_pretty(&self.truth).expect("truth serializes");
        std::fs::write(&truth_path, json).map_err(|e| Error::io(&truth_path, e))?;
        Ok(())
    }
}

/// Knobs for the deterministic benchmark-spec builder.
#[derive(Debug, Clone)]
pub struct BenchmarkParams {
    pub families: usize,
    pub dims: (usize, usize),
    pub seed: u64,
    /// Total peaks per image; `shared_fraction` of them form the regional
    /// fingerprint common to every family.
    pub peaks_per_image: usize,
    pub shared_fraction: f64,
    pub height_jitter: f64,
    /// Noise sigma as a fraction of the maximum peak height.
    pub noise_fraction: f64,
    pub sigma_row: f64,
    pub sigma_col: f64,
    /// Peak rows snap to this grid spacing, keeping column windows to at
    /// most one peak each.
    pub row_step: usize,
    pub col_step: usize,
    pub height_range: (f64, f64),
}

impl Default for BenchmarkParams {
    fn default() -> Self {
        Self {
            families: 3,
            dims: (200, 100),
            seed: 7,
            peaks_per_image: 40,
            shared_fraction: 0.8,
            height_jitter: 0.3,
            noise_fraction: 0.01,
            sigma_row: 1.4,
            sigma_col: 0.7,
            row_step: 16,
            col_step: 5,
            height_range: (100.0, 1000.0),
        }
    }
}

/// Lays out family specs on a deterministic peak grid: candidate centers are
/// grid cells with a 3-sigma margin, shuffled by the seed; the first block
/// becomes the shared regional fingerprint, then each family draws its own
/// disjoint source-specific block.
pub fn build_family_specs(p: &BenchmarkParams) -> Result<Vec<FamilySpec>> {
    if p.families < 2 {
        return Err(Error::InvalidArgument("need at least 2 families".into()));
    }
    if !(0.0..=1.0).contains(&p.shared_fraction) {
        return Err(Error::InvalidArgument(format!(
            "shared fraction must be in [0, 1], got {}",
            p.shared_fraction
        )));
    }
    let (m, n) = p.dims;
    let margin_r = (3.0 * p.sigma_row).ceil() as usize + 1;
    let margin_c = (3.0 * p.sigma_col).ceil() as usize + 1;
    let mut cells = Vec::new();
    let mut r = margin_r;
    while r + margin_r < m {
        let mut c = margin_c;
        while c + margin_c < n {
            cells.push((r, c));
            c += p.col_step;
        }
        r += p.row_step;
    }
    let n_shared = (p.peaks_per_image as f64 * p.shared_fraction).round() as usize;
    let n_source = p.peaks_per_image - n_shared;
    let needed = n_shared + p.families * n_source;
    if cells.len() < needed {
        return Err(Error::InvalidArgument(format!(
            "grid of {}x{} with steps ({}, {}) yields {} candidate sites, need {needed}",
            m,
            n,
            p.row_step,
            p.col_step,
            cells.len()
        )));
    }
    let mut rng = Rng::from_seed_stream(p.seed, u64::MAX);
    rng.shuffle(&mut cells);
    let mut make_peaks = |count: usize, offset: usize| -> Vec<PeakSpec> {
        (0..count)
            .map(|i| {
                let (r, c) = cells[offset + i];
                PeakSpec {
                    center: (r as f64, c as f64),
                    height: rng.uniform_in(p.height_range.0, p.height_range.1),
                    sigma_row: p.sigma_row,
                    sigma_col: p.sigma_col,
                }
            })
            .collect()
    };
    let shared = make_peaks(n_shared, 0);
    let noise_sigma = p.noise_fraction * p.height_range.1;
    let specs = (0..p.families)
        .map(|f| FamilySpec {
            family_id: format!("family{f}"),
            shared_peaks: shared.clone(),
            source_peaks: make_peaks(n_source, n_shared + f * n_source),
            height_jitter: p.height_jitter,
            noise_sigma,
            seed: p.seed.wrapping_add(f as u64),
        })
        .collect();
    Ok(specs)
}
