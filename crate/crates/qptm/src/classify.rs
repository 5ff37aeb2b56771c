//! The decision layer: score test samples against references, convert raw
//! scores to percentage matches, threshold into target-vs-rest predictions,
//! and reduce to confusion matrices and classification metrics.
//!
//! Raw scores are distances for `qptm`, `sax`, `paa` and `l2` (lower is
//! better) and correlations for `corr2` and `pca` (higher is better).
//! Percentage match is batch-relative for distances:
//! `100 * (1 - raw / max_raw_in_batch)`, with an all-zero batch mapping to
//! 100 everywhere; correlations map as `100 * max(raw, 0)`. The published
//! experiments never define this mapping, so the convention is declared
//! here once and used everywhere.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::baselines::{corr2, fit_pca, l2_dist, pca_similarity, PcaModel};
use crate::chromatogram::{Chromatogram, SourceLibrary};
use crate::error::{Error, Result};
use crate::exec;
use crate::peaks::extract_peaks;
use crate::quantize::{paa, paa_dist, paa_dist_scaled, sax, sax_dist, znormalize, Alphabet, TableSemantics};
use crate::similarity::{calibrate_epsilon, harmonized_views, Epsilon};

/// The comparison methods. The PTM score of the source publications is out
/// of scope here (it is defined only by citation), hence not a variant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MethodId {
    Qptm,
    Sax,
    Paa,
    L2,
    Corr2,
    Pca,
}

impl MethodId {
    pub const ALL: [MethodId; 6] = [
        MethodId::Qptm,
        MethodId::Sax,
        MethodId::Paa,
        MethodId::L2,
        MethodId::Corr2,
        MethodId::Pca,
    ];

    /// Distance-like methods score lower-is-better; the rest are
    /// correlation-like.
    pub fn is_distance_like(&self) -> bool {
        matches!(self, MethodId::Qptm | MethodId::Sax | MethodId::Paa | MethodId::L2)
    }
}

impl std::fmt::Display for MethodId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MethodId::Qptm => "qptm",
            MethodId::Sax => "sax",
            MethodId::Paa => "paa",
            MethodId::L2 => "l2",
            MethodId::Corr2 => "corr2",
            MethodId::Pca => "pca",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MethodId {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "qptm" => Ok(MethodId::Qptm),
            "sax" => Ok(MethodId::Sax),
            "paa" => Ok(MethodId::Paa),
            "l2" => Ok(MethodId::L2),
            "corr2" | "correlation" => Ok(MethodId::Corr2),
            "pca" => Ok(MethodId::Pca),
            "ptm" => Err(Error::InvalidArgument(
                "the PTM score is out of scope for this tool; available methods: qptm, sax, paa, l2, corr2, pca".into(),
            )),
            other => Err(Error::InvalidArgument(format!(
                "unknown method {other:?}; available: qptm, sax, paa, l2, corr2, pca"
            ))),
        }
    }
}

/// Resolved scoring parameters shared by all methods.
#[derive(Debug, Clone)]
pub struct ScoreParams {
    pub epsilon: Epsilon,
    /// Per-column word length (windows per column) for PAA/SAX.
    pub windows: usize,
    pub alphabet: Alphabet,
    pub min_peak_height: f64,
    pub table_semantics: TableSemantics,
    pub paa_dist_scaled: bool,
    pub znormalize: bool,
}

/// One scored (test, reference) pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScoreRow {
    pub test_id: String,
    pub ref_id: String,
    pub method: MethodId,
    pub raw: f64,
    pub percent_match: f64,
}

/// A scoring context for one method over one comparison batch. PCA needs a
/// model fitted on the whole batch, so batch construction happens up front.
pub struct Scorer<'a> {
    method: MethodId,
    params: &'a ScoreParams,
    pca: Option<PcaModel>,
}

impl<'a> Scorer<'a> {
    /// For `pca` the batch must hold the reference and every test image
    /// (at least 3 in total); other methods ignore it.
    pub fn new(method: MethodId, params: &'a ScoreParams, batch: &[&Chromatogram]) -> Result<Self> {
        let pca = if method == MethodId::Pca {
            Some(fit_pca(batch)?)
        } else {
            None
        };
        Ok(Self { method, params, pca })
    }

    /// Raw score of a test image against one reference.
    pub fn raw(&self, test: &Chromatogram, reference: &Chromatogram) -> Result<f64> {
        test.same_dims(reference)?;
        let p = self.params;
        match self.method {
            MethodId::L2 => l2_dist(test, reference),
            MethodId::Corr2 => corr2(test, reference),
            MethodId::Pca => {
                let model = self.pca.as_ref().ok_or_else(|| {
                    Error::InvalidArgument("pca scorer was built without a fitted batch".into())
                })?;
                pca_similarity(model, test, reference)
            }
            MethodId::Sax => {
                let n = test.n();
                let dists = exec::try_map_indexed(n, |c| -> Result<f64> {
                    let wt = sax(&test.column(c), p.windows, &p.alphabet, p.znormalize)?;
                    let wr = sax(&reference.column(c), p.windows, &p.alphabet, p.znormalize)?;
                    sax_dist(&wt, &wr, &p.alphabet, p.table_semantics)
                })?;
                Ok(dists.iter().sum::<f64>() / n as f64)
            }
            MethodId::Qptm | MethodId::Paa => {
                let ref_map = extract_peaks(reference, p.min_peak_height)?;
                let test_map = extract_peaks(test, p.min_peak_height)?;
                let (ref_view, test_view) = harmonized_views(&ref_map, &test_map, p.epsilon)?;
                let n = test.n();
                let use_sax = self.method == MethodId::Qptm;
                let dists = exec::try_map_indexed(n, |c| -> Result<f64> {
                    let col_t = test_view.column(c).to_vec();
                    let col_r = ref_view.column(c).to_vec();
                    if use_sax {
                        let wt = sax(&col_t, p.windows, &p.alphabet, p.znormalize)?;
                        let wr = sax(&col_r, p.windows, &p.alphabet, p.znormalize)?;
                        sax_dist(&wt, &wr, &p.alphabet, p.table_semantics)
                    } else {
                        let (vt, vr) = if p.znormalize {
                            (paa(&znormalize(&col_t), p.windows)?, paa(&znormalize(&col_r), p.windows)?)
                        } else {
                            (paa(&col_t, p.windows)?, paa(&col_r, p.windows)?)
                        };
                        if p.paa_dist_scaled {
                            paa_dist_scaled(&vt, &vr)
                        } else {
                            paa_dist(&vt, &vr)
                        }
                    }
                })?;
                Ok(dists.iter().sum::<f64>() / n as f64)
            }
        }
    }
}

/// Convenience single-pair score for the non-PCA methods.
pub fn score(
    test: &Chromatogram,
    reference: &Chromatogram,
    method: MethodId,
    params: &ScoreParams,
) -> Result<f64> {
    if method == MethodId::Pca {
        return Err(Error::InvalidArgument(
            "pca scoring needs a batch context; use Scorer::new with the comparison batch".into(),
        ));
    }
    Scorer::new(method, params, &[])?.raw(test, reference)
}

/// Fills `percent_match` for one method's rows over one comparison batch.
pub fn normalize_scores(rows: &mut [ScoreRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidArgument("empty score batch".into()));
    }
    let method = rows[0].method;
    if rows.iter().any(|r| r.method != method) {
        return Err(Error::InvalidArgument(
            "normalize_scores expects a single-method batch".into(),
        ));
    }
    if method.is_distance_like() {
        let max_raw = rows.iter().map(|r| r.raw).fold(0.0f64, f64::max);
        for r in rows.iter_mut() {
            r.percent_match = if max_raw == 0.0 {
                100.0
            } else {
                100.0 * (1.0 - r.raw / max_raw)
            };
        }
    } else {
        for r in rows.iter_mut() {
            r.percent_match = 100.0 * r.raw.max(0.0);
        }
    }
    Ok(())
}

/// Scores every test against one reference and normalizes the batch.
/// For `pca` the model is fitted on the reference plus all tests.
pub fn score_batch(
    tests: &[&Chromatogram],
    reference: &Chromatogram,
    method: MethodId,
    params: &ScoreParams,
) -> Result<Vec<ScoreRow>> {
    if tests.is_empty() {
        return Err(Error::InvalidArgument("empty test batch".into()));
    }
    let mut batch: Vec<&Chromatogram> = vec![reference];
    batch.extend_from_slice(tests);
    let scorer = Scorer::new(method, params, &batch)?;
    let raws = exec::try_map_indexed(tests.len(), |i| scorer.raw(tests[i], reference))?;
    let mut rows: Vec<ScoreRow> = tests
        .iter()
        .zip(raws)
        .map(|(t, raw)| ScoreRow {
            test_id: t.sample_id.clone(),
            ref_id: reference.sample_id.clone(),
            method,
            raw,
            percent_match: 0.0,
        })
        .collect();
    normalize_scores(&mut rows)?;
    Ok(rows)
}

/// Index of the best raw score: argmin for distances, argmax for
/// correlations, ties broken by lowest index.
pub(crate) fn best_index(raws: &[f64], distance_like: bool) -> usize {
    let mut best = 0;
    for (i, &r) in raws.iter().enumerate().skip(1) {
        let better = if distance_like { r < raws[best] } else { r > raws[best] };
        if better {
            best = i;
        }
    }
    best
}

/// Picks the closest library entry for a test image. Returns the entry
/// index and its region label.
pub fn decide(
    test: &Chromatogram,
    library: &SourceLibrary,
    method: MethodId,
    params: &ScoreParams,
) -> Result<(usize, String)> {
    let mut batch: Vec<&Chromatogram> = vec![test];
    batch.extend(library.entries.iter());
    let scorer = Scorer::new(method, params, &batch)?;
    let raws = exec::try_map_indexed(library.len(), |k| scorer.raw(test, &library.entries[k]))?;
    let k = best_index(&raws, method.is_distance_like());
    Ok((k, library.regions[k].clone()))
}

/// Binary confusion matrix, rows = true {target, other}, columns =
/// predicted {target, other}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix2 {
    #[serde(rename = "tp")]
    pub true_pos: usize,
    #[serde(rename = "fn")]
    pub false_neg: usize,
    #[serde(rename = "fp")]
    pub false_pos: usize,
    #[serde(rename = "tn")]
    pub true_neg: usize,
}

impl ConfusionMatrix2 {
    pub fn total(&self) -> usize {
        self.true_pos + self.false_neg + self.false_pos + self.true_neg
    }
}

/// Thresholds normalized rows at `theta` percent: predicted target iff
/// `percent_match >= theta`. `is_target` carries the ground truth per row.
pub fn binary_classify(rows: &[ScoreRow], is_target: &[bool], theta: f64) -> Result<ConfusionMatrix2> {
    if rows.len() != is_target.len() {
        return Err(Error::InvalidArgument(format!(
            "{} rows but {} ground-truth flags",
            rows.len(),
            is_target.len()
        )));
    }
    let mut c = ConfusionMatrix2 {
        true_pos: 0,
        false_neg: 0,
        false_pos: 0,
        true_neg: 0,
    };
    for (row, &target) in rows.iter().zip(is_target) {
        let predicted = row.percent_match >= theta;
        match (target, predicted) {
            (true, true) => c.true_pos += 1,
            (true, false) => c.false_neg += 1,
            (false, true) => c.false_pos += 1,
            (false, false) => c.true_neg += 1,
        }
    }
    Ok(c)
}

/// Classification metrics; 0/0 ratios surface as `None` (printed as NaN),
/// never as a silent zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub accuracy: f64,
    pub precision: Option<f64>,
    pub sensitivity: Option<f64>,
    pub specificity: Option<f64>,
    pub f1: f64,
}

pub fn metrics(c: &ConfusionMatrix2) -> Result<MetricSet> {
    let total = c.total();
    if total == 0 {
        return Err(Error::InvalidArgument("empty confusion matrix".into()));
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let precision = ratio(c.true_pos, c.true_pos + c.false_pos);
    let sensitivity = ratio(c.true_pos, c.true_pos + c.false_neg);
    let f1 = match (precision, sensitivity) {
        (Some(p), Some(s)) if p + s > 0.0 => 2.0 * p * s / (p + s),
        _ => 0.0,
    };
    Ok(MetricSet {
        accuracy: (c.true_pos + c.true_neg) as f64 / total as f64,
        precision,
        sensitivity,
        specificity: ratio(c.true_neg, c.true_neg + c.false_pos),
        f1,
    })
}

/// Per-row epsilon training protocol for the cross matrix.
#[derive(Debug, Clone)]
pub struct CrossOptions {
    /// How many same-family injections after the row reference train the
    /// row's epsilon (qptm only). Rows whose family is smaller fall back to
    /// the configured epsilon.
    pub train_count: usize,
    pub eps_grid: Vec<f64>,
    pub plateau_tol: f64,
}

impl Default for CrossOptions {
    fn default() -> Self {
        Self {
            train_count: 6,
            eps_grid: (1..=10).map(|i| i as f64 / 10.0).collect(),
            plateau_tol: 0.01,
        }
    }
}

/// K x K percentage-match matrix: entry (i, j) scores injection j against
/// reference i, normalized within row i. Diagonal entries are 100 for
/// distance methods by self-match maximality.
pub fn cross_score_matrix(
    library: &SourceLibrary,
    method: MethodId,
    params: &ScoreParams,
    opts: &CrossOptions,
) -> Result<Array2<f64>> {
    let k = library.len();
    let batch: Vec<&Chromatogram> = library.entries.iter().collect();
    // one PCA model for the whole comparison batch
    let shared_pca = if method == MethodId::Pca {
        Some(fit_pca(&batch)?)
    } else {
        None
    };
    let rows = exec::try_map_indexed(k, |i| -> Result<Vec<f64>> {
        let mut row_params = params.clone();
        if method == MethodId::Qptm {
            let family: Vec<usize> = (0..k)
                .filter(|&j| library.regions[j] == library.regions[i])
                .collect();
            let train: Vec<usize> = family.iter().copied().filter(|&j| j != i).take(opts.train_count).collect();
            if opts.train_count > 0 && train.len() >= opts.train_count && !opts.eps_grid.is_empty() {
                let mut members = vec![library.entries[i].clone()];
                members.extend(train.iter().map(|&j| library.entries[j].clone()));
                let curve = calibrate_epsilon(
                    &members,
                    0,
                    &opts.eps_grid,
                    params.windows,
                    params.min_peak_height,
                    opts.plateau_tol,
                )?;
                row_params.epsilon = Epsilon::new(curve.chosen_epsilon)?;
            }
        }
        let scorer = Scorer {
            method,
            params: &row_params,
            pca: shared_pca.clone(),
        };
        let mut row_scores: Vec<ScoreRow> = Vec::with_capacity(k);
        for j in 0..k {
            let raw = scorer.raw(&library.entries[j], &library.entries[i])?;
            row_scores.push(ScoreRow {
                test_id: library.entries[j].sample_id.clone(),
                ref_id: library.entries[i].sample_id.clone(),
                method,
                raw,
                percent_match: 0.0,
            });
        }
        normalize_scores(&mut row_scores)?;
        Ok(row_scores.into_iter().map(|r| r.percent_match).collect())
    })?;
    let mut out = Array2::zeros((k, k));
    for (i, row) in rows.into_iter().enumerate() {
        for (j, v) in row.into_iter().enumerate() {
            out[(i, j)] = v;
        }
    }
    Ok(out)
}
