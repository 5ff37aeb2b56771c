//! Peak-ratio similarity, tau-thresholded common-peak harmonization, and the
//! epsilon calibration sweep.
//!
//! Two co-located peaks harmonize when their ratio similarity
//! `max(a/b, b/a)` stays within `tau = 1 + epsilon`; both are then replaced
//! by the common peak `min(a, b)`. The weight mask stores the test-side
//! factor `p_common / p_test` (1 for unmatched or out-of-tolerance peaks,
//! 0 for non-peak pixels); the reference side is substituted directly when a
//! harmonized pair of images is compared.

use std::fmt::Write as _;

use ndarray::Array2;

use crate::chromatogram::Chromatogram;
use crate::error::{Error, Result};
use crate::exec;
use crate::peaks::{extract_peaks, max_along_interval, PeakMap};

/// Uncertainty bound for peak-ratio similarity. Strictly positive; zero
/// would reduce harmonization to exact float equality.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Epsilon(f64);

impl Epsilon {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "epsilon must be a finite positive real, got {value}"
            )));
        }
        Ok(Epsilon(value))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// The peak-ratio threshold `tau = 1 + epsilon`.
    pub fn tau(&self) -> f64 {
        1.0 + self.0
    }
}

/// Ratio similarity between two peak heights: `max(a/b, b/a)`, always >= 1
/// with equality exactly when the heights agree.
pub fn peak_sim(p_ref: f64, p_test: f64) -> Result<f64> {
    if !(p_ref > 0.0) || !(p_test > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "peak heights must be positive, got {p_ref} and {p_test}"
        )));
    }
    Ok((p_ref / p_test).max(p_test / p_ref))
}

/// Per-pixel multiplicative weights for the test image.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMask {
    pub dims: (usize, usize),
    pub weights: Array2<f64>,
    pub tau: f64,
}

/// Walks both sorted peak lists and calls `on_pair` for every co-located
/// (row, col) pair.
fn for_each_colocated(a: &PeakMap, b: &PeakMap, mut on_pair: impl FnMut(f64, f64, (usize, usize))) {
    let (pa, pb) = (&a.peaks, &b.peaks);
    let (mut i, mut j) = (0, 0);
    while i < pa.len() && j < pb.len() {
        let ka = (pa[i].col, pa[i].row);
        let kb = (pb[j].col, pb[j].row);
        match ka.cmp(&kb) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                on_pair(pa[i].height, pb[j].height, (pa[i].row, pa[i].col));
                i += 1;
                j += 1;
            }
        }
    }
}

/// Builds the test-side weight mask against a reference peak map.
///
/// Non-peak pixels get weight 0. A test peak with no reference peak at the
/// same (row, col), or whose ratio similarity exceeds tau, keeps its exact
/// value (weight 1). A harmonizable pair gets `min(p_ref, p_test) / p_test`.
pub fn build_weight_mask(reference: &PeakMap, test: &PeakMap, eps: Epsilon) -> Result<WeightMask> {
    if reference.dims != test.dims {
        return Err(Error::dims(reference.dims, test.dims));
    }
    let tau = eps.tau();
    let mut weights = Array2::zeros(test.dims);
    for p in &test.peaks {
        weights[(p.row, p.col)] = 1.0;
    }
    for_each_colocated(reference, test, |p_ref, p_test, at| {
        let sim = (p_ref / p_test).max(p_test / p_ref);
        if sim <= tau {
            weights[at] = p_ref.min(p_test) / p_test;
        }
    });
    Ok(WeightMask {
        dims: test.dims,
        weights,
        tau,
    })
}

/// Elementwise product of a test image and its weight mask. At a harmonized
/// peak the result is the common peak height; at non-peak pixels it is 0.
pub fn apply_weights(test: &Chromatogram, mask: &WeightMask) -> Result<Chromatogram> {
    if test.dims() != mask.dims {
        return Err(Error::dims(mask.dims, test.dims()));
    }
    let data = test.data() * &mask.weights;
    Chromatogram::new(test.sample_id.clone(), test.region.clone(), data)
}

/// Dense harmonized peak views for a (reference, test) pair: each side's
/// peak heights with every harmonizable co-located pair replaced by the
/// common peak on both sides.
pub fn harmonized_views(
    reference: &PeakMap,
    test: &PeakMap,
    eps: Epsilon,
) -> Result<(Array2<f64>, Array2<f64>)> {
    if reference.dims != test.dims {
        return Err(Error::dims(reference.dims, test.dims));
    }
    let tau = eps.tau();
    let mut ref_view = reference.dense_view();
    let mut test_view = test.dense_view();
    for_each_colocated(reference, test, |p_ref, p_test, at| {
        let sim = (p_ref / p_test).max(p_test / p_ref);
        if sim <= tau {
            let common = p_ref.min(p_test);
            ref_view[at] = common;
            test_view[at] = common;
        }
    });
    Ok((ref_view, test_view))
}

/// Deviation between two peak maps after harmonization: per column, the
/// Euclidean distance between the maximum-along-interval reductions of the
/// two harmonized views, averaged over the columns.
pub(crate) fn deviation_from_maps(
    reference: &PeakMap,
    test: &PeakMap,
    eps: Epsilon,
    windows: usize,
) -> Result<f64> {
    let (m, n) = reference.dims;
    if windows == 0 || windows > m {
        return Err(Error::InvalidArgument(format!(
            "window count must be in 1..={m}, got {windows}"
        )));
    }
    let (ref_view, test_view) = harmonized_views(reference, test, eps)?;
    let col_dists = exec::try_map_indexed(n, |c| -> Result<f64> {
        let u = max_along_interval(&ref_view.column(c).to_vec(), windows)?;
        let v = max_along_interval(&test_view.column(c).to_vec(), windows)?;
        Ok(u.iter()
            .zip(&v)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt())
    })?;
    Ok(col_dists.iter().sum::<f64>() / n as f64)
}

/// Harmonizes the pair at `eps` and returns the average per-column L2
/// deviation of the reduced views. Peaks are extracted at `min_height`.
pub fn pairwise_deviation(
    a: &Chromatogram,
    b: &Chromatogram,
    eps: Epsilon,
    windows: usize,
    min_height: f64,
) -> Result<f64> {
    a.same_dims(b)?;
    let map_a = extract_peaks(a, min_height)?;
    let map_b = extract_peaks(b, min_height)?;
    deviation_from_maps(&map_a, &map_b, eps, windows)
}

/// Deviation-vs-epsilon sweep with the chosen knee point.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationCurve {
    /// `(epsilon, deviation)` sorted by epsilon ascending.
    pub points: Vec<(f64, f64)>,
    pub chosen_epsilon: f64,
}

impl CalibrationCurve {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("epsilon,deviation\n");
        for (e, d) in &self.points {
            writeln!(s, "{e},{d}").expect("write to String");
        }
        s
    }
}

/// Sweeps the epsilon grid over a family of images harmonized against the
/// designated reference and picks the knee: the smallest epsilon whose
/// deviation first comes within `plateau_tol` (relative) of the curve
/// minimum.
///
/// The deviation at each grid point is the mean of [`pairwise_deviation`]
/// between the reference and every other family member.
pub fn calibrate_epsilon(
    family: &[Chromatogram],
    reference: usize,
    eps_grid: &[f64],
    windows: usize,
    min_height: f64,
    plateau_tol: f64,
) -> Result<CalibrationCurve> {
    if family.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "calibration needs at least 2 family members, got {}",
            family.len()
        )));
    }
    if reference >= family.len() {
        return Err(Error::InvalidArgument(format!(
            "reference index {reference} out of range for family of {}",
            family.len()
        )));
    }
    if eps_grid.is_empty() {
        return Err(Error::InvalidArgument("epsilon grid is empty".into()));
    }
    for w in eps_grid.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidArgument(format!(
                "epsilon grid must be strictly ascending, got {} then {}",
                w[0], w[1]
            )));
        }
    }
    if !(plateau_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "plateau tolerance must be >= 0, got {plateau_tol}"
        )));
    }
    let eps_values: Vec<Epsilon> = eps_grid.iter().map(|&e| Epsilon::new(e)).collect::<Result<_>>()?;

    let maps: Vec<PeakMap> = family
        .iter()
        .map(|c| {
            family[reference].same_dims(c)?;
            extract_peaks(c, min_height)
        })
        .collect::<Result<_>>()?;

    let members: Vec<usize> = (0..family.len()).filter(|&i| i != reference).collect();
    let deviations = exec::try_map_indexed(eps_values.len(), |gi| -> Result<f64> {
        let eps = eps_values[gi];
        let mut total = 0.0;
        for &mi in &members {
            total += deviation_from_maps(&maps[reference], &maps[mi], eps, windows)?;
        }
        Ok(total / members.len() as f64)
    })?;

    let points: Vec<(f64, f64)> = eps_grid.iter().copied().zip(deviations).collect();
    let min_dev = points.iter().map(|&(_, d)| d).fold(f64::INFINITY, f64::min);
    let threshold = min_dev * (1.0 + plateau_tol);
    let chosen_epsilon = points
        .iter()
        .find(|&&(_, d)| d <= threshold)
        .map(|&(e, _)| e)
        .unwrap_or(points[points.len() - 1].0);
    Ok(CalibrationCurve {
        points,
        chosen_epsilon,
    })
}
