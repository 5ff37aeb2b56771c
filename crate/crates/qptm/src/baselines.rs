//! Baseline comparison methods: whole-image L2 distance, 2-D correlation,
//! and similarity in a 2-component PCA score space.
//!
//! PCA is fitted on flattened images via the Gram-matrix trick (samples x
//! samples instead of pixels x pixels, since libraries have tens of samples
//! and images have ~10^5 pixels) with a cyclic Jacobi eigensolver, which is
//! deterministic and dependency-free.

use ndarray::Array2;

use crate::chromatogram::Chromatogram;
use crate::error::{Error, Result};

/// Euclidean distance over the flattened image.
pub fn l2_dist(a: &Chromatogram, b: &Chromatogram) -> Result<f64> {
    a.same_dims(b)?;
    Ok(a.data()
        .iter()
        .zip(b.data().iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Pearson correlation over all pixels. Errors when either image has zero
/// variance (the denominator vanishes).
pub fn corr2(a: &Chromatogram, b: &Chromatogram) -> Result<f64> {
    a.same_dims(b)?;
    let len = (a.m() * a.n()) as f64;
    let mean_a = a.data().sum() / len;
    let mean_b = b.data().sum() / len;
    let mut num = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for (x, y) in a.data().iter().zip(b.data().iter()) {
        let dx = x - mean_a;
        let dy = y - mean_b;
        num += dx * dy;
        var_a += dx * dx;
        var_b += dy * dy;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return Err(Error::Degenerate(
            "corr2 undefined for a constant image".into(),
        ));
    }
    Ok(num / (var_a * var_b).sqrt())
}

/// Two-component PCA model over flattened images.
#[derive(Debug, Clone)]
pub struct PcaModel {
    pub dims: (usize, usize),
    /// Per-pixel mean over the fitted collection.
    pub mean: Vec<f64>,
    /// Two orthonormal principal directions, descending variance.
    pub components: [Vec<f64>; 2],
    /// Descending eigenvalues of the (population) covariance.
    pub explained: [f64; 2],
}

/// Cyclic Jacobi eigendecomposition of a small symmetric matrix. Returns
/// (eigenvalues, eigenvectors-as-columns), unsorted. Iterates until the
/// off-diagonal norm drops below 1e-12 of the matrix scale.
fn jacobi_eigen_sym(mut a: Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut v = Array2::eye(n);
    if n == 1 {
        return (vec![a[(0, 0)]], v);
    }
    let scale = a.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-12 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                off += a[(p, q)] * a[(p, q)];
            }
        }
        if off.sqrt() < tol {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq.abs() < tol * 1e-4 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let l = (0..n).map(|i| a[(i, i)]).collect();
    (l, v)
}

fn flatten(c: &Chromatogram) -> Vec<f64> {
    c.data().iter().copied().collect()
}

/// Fits the 2-component model: mean-center the flattened collection, solve
/// the K x K Gram system, and lift the top-2 eigenvectors back to pixel
/// space. Sign convention: the largest-magnitude coordinate of each
/// component is positive.
pub fn fit_pca(collection: &[&Chromatogram]) -> Result<PcaModel> {
    let k = collection.len();
    if k < 3 {
        return Err(Error::InvalidArgument(format!(
            "PCA needs at least 3 samples, got {k}"
        )));
    }
    let dims = collection[0].dims();
    for c in collection {
        collection[0].same_dims(c)?;
    }
    let d = dims.0 * dims.1;
    let flats: Vec<Vec<f64>> = collection.iter().map(|c| flatten(c)).collect();
    let mut mean = vec![0.0; d];
    for f in &flats {
        for (m, x) in mean.iter_mut().zip(f) {
            *m += x;
        }
    }
    for m in &mut mean {
        *m /= k as f64;
    }
    let centered: Vec<Vec<f64>> = flats
        .iter()
        .map(|f| f.iter().zip(&mean).map(|(x, m)| x - m).collect())
        .collect();

    let mut gram = Array2::zeros((k, k));
    for i in 0..k {
        for j in i..k {
            let dot: f64 = centered[i].iter().zip(&centered[j]).map(|(x, y)| x * y).sum();
            gram[(i, j)] = dot;
            gram[(j, i)] = dot;
        }
    }
    let (eigvals, eigvecs) = jacobi_eigen_sym(gram);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| eigvals[j].partial_cmp(&eigvals[i]).unwrap());

    let mut components: [Vec<f64>; 2] = [Vec::new(), Vec::new()];
    let mut explained = [0.0; 2];
    for (slot, &idx) in order.iter().take(2).enumerate() {
        explained[slot] = (eigvals[idx] / k as f64).max(0.0);
        let mut comp = vec![0.0; d];
        for (i, cen) in centered.iter().enumerate() {
            let u = eigvecs[(i, idx)];
            for (cv, x) in comp.iter_mut().zip(cen) {
                *cv += u * x;
            }
        }
        let norm = comp.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for cv in &mut comp {
                *cv /= norm;
            }
        } else {
            // degenerate direction (rank-deficient data): deterministic
            // filler orthogonal to the earlier component
            comp = vec![0.0; d];
            let prev = if slot == 1 { Some(&components[0]) } else { None };
            let pick = match prev {
                Some(p) => (0..d).min_by(|&i, &j| p[i].abs().partial_cmp(&p[j].abs()).unwrap()).unwrap_or(0),
                None => 0,
            };
            comp[pick] = 1.0;
            if let Some(p) = prev {
                let proj: f64 = comp.iter().zip(p.iter()).map(|(x, y)| x * y).sum();
                for (cv, y) in comp.iter_mut().zip(p.iter()) {
                    *cv -= proj * y;
                }
                let norm = comp.iter().map(|x| x * x).sum::<f64>().sqrt();
                for cv in &mut comp {
                    *cv /= norm;
                }
            }
        }
        let mut best = 0;
        for (i, x) in comp.iter().enumerate() {
            if x.abs() > comp[best].abs() {
                best = i;
            }
        }
        if comp[best] < 0.0 {
            for cv in &mut comp {
                *cv = -*cv;
            }
        }
        components[slot] = comp;
    }
    Ok(PcaModel {
        dims,
        mean,
        components,
        explained,
    })
}

impl PcaModel {
    /// Projects an image onto the two components.
    pub fn scores(&self, c: &Chromatogram) -> Result<[f64; 2]> {
        if c.dims() != self.dims {
            return Err(Error::dims(self.dims, c.dims()));
        }
        let flat = flatten(c);
        let mut out = [0.0; 2];
        for (slot, comp) in self.components.iter().enumerate() {
            out[slot] = flat
                .iter()
                .zip(&self.mean)
                .zip(comp)
                .map(|((x, m), v)| (x - m) * v)
                .sum();
        }
        Ok(out)
    }
}

/// Correlation between the two images' score pairs. A two-point correlation
/// is +-1 by construction whenever it is defined; equal coordinates in
/// either score pair make it degenerate, which is defined as 1.0.
pub fn pca_similarity(model: &PcaModel, a: &Chromatogram, b: &Chromatogram) -> Result<f64> {
    let sa = model.scores(a)?;
    let sb = model.scores(b)?;
    // For 2-vectors the centered coordinates are +-(s1 - s2)/2, so the
    // correlation collapses to the sign of (s1 - s2)(t1 - t2).
    let da = sa[0] - sa[1];
    let db = sb[0] - sb[1];
    if da.abs() < 1e-12 || db.abs() < 1e-12 {
        return Ok(1.0);
    }
    Ok(if da * db > 0.0 { 1.0 } else { -1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    fn chrom(data: Array2<f64>) -> Chromatogram {
        Chromatogram::new("x", "r", data).unwrap()
    }

    fn random_image(rng: &mut Rng, m: usize, n: usize, hi: f64) -> Chromatogram {
        chrom(Array2::from_shape_fn((m, n), |_| rng.uniform_in(0.0, hi)))
    }

    #[test]
    fn l2_basics() {
        let a = chrom(ndarray::array![[0.0], [0.0]]);
        let b = chrom(ndarray::array![[3.0], [4.0]]);
        assert_eq!(l2_dist(&a, &a).unwrap(), 0.0);
        assert_eq!(l2_dist(&a, &b).unwrap(), 5.0);
    }

    #[test]
    fn l2_matches_double_loop() {
        let mut rng = Rng::new(41);
        let a = random_image(&mut rng, 7, 9, 10.0);
        let b = random_image(&mut rng, 7, 9, 10.0);
        let mut sum = 0.0;
        for r in 0..7 {
            for c in 0..9 {
                let d = a.data()[(r, c)] - b.data()[(r, c)];
                sum += d * d;
            }
        }
        assert_abs_diff_eq!(l2_dist(&a, &b).unwrap(), sum.sqrt(), epsilon = 1e-12);
    }

    #[test]
    fn l2_is_a_metric_on_random_triples() {
        let mut rng = Rng::new(43);
        for _ in 0..200 {
            let a = random_image(&mut rng, 4, 4, 5.0);
            let b = random_image(&mut rng, 4, 4, 5.0);
            let c = random_image(&mut rng, 4, 4, 5.0);
            let ab = l2_dist(&a, &b).unwrap();
            let ba = l2_dist(&b, &a).unwrap();
            let ac = l2_dist(&a, &c).unwrap();
            let cb = l2_dist(&c, &b).unwrap();
            assert_eq!(ab, ba);
            assert!(ab >= 0.0);
            assert!(ab <= ac + cb + 1e-12);
        }
        let a = random_image(&mut rng, 4, 4, 5.0);
        assert_eq!(l2_dist(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn l2_dimension_mismatch() {
        let a = chrom(Array2::zeros((2, 2)));
        let b = chrom(Array2::zeros((2, 3)));
        assert!(matches!(l2_dist(&a, &b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn corr2_self_and_anti() {
        let mut rng = Rng::new(47);
        let a = random_image(&mut rng, 5, 5, 10.0);
        assert_abs_diff_eq!(corr2(&a, &a).unwrap(), 1.0, epsilon = 1e-12);
        let flipped = chrom(a.data().mapv(|v| 12.0 - v));
        assert_abs_diff_eq!(corr2(&a, &flipped).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn corr2_matches_brute_force_formula() {
        let mut rng = Rng::new(53);
        let a = random_image(&mut rng, 6, 8, 7.0);
        let b = random_image(&mut rng, 6, 8, 7.0);
        let len = 48.0;
        let ma = a.data().sum() / len;
        let mb = b.data().sum() / len;
        let mut num = 0.0;
        let mut va = 0.0;
        let mut vb = 0.0;
        for r in 0..6 {
            for c in 0..8 {
                let dx = a.data()[(r, c)] - ma;
                let dy = b.data()[(r, c)] - mb;
                num += dx * dy;
                va += dx * dx;
                vb += dy * dy;
            }
        }
        assert_abs_diff_eq!(
            corr2(&a, &b).unwrap(),
            num / (va * vb).sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn corr2_affine_invariance() {
        let mut rng = Rng::new(59);
        let a = random_image(&mut rng, 6, 6, 5.0);
        let b = random_image(&mut rng, 6, 6, 5.0);
        let scaled = chrom(a.data().mapv(|v| 2.5 * v + 3.0));
        assert_abs_diff_eq!(
            corr2(&scaled, &b).unwrap(),
            corr2(&a, &b).unwrap(),
            epsilon = 1e-10
        );
    }

    #[test]
    fn corr2_zero_variance_is_degenerate() {
        let a = chrom(Array2::from_elem((3, 3), 2.0));
        let mut rng = Rng::new(61);
        let b = random_image(&mut rng, 3, 3, 5.0);
        assert!(matches!(corr2(&a, &b), Err(Error::Degenerate(_))));
    }

    #[test]
    fn pca_needs_three_samples() {
        let mut rng = Rng::new(67);
        let a = random_image(&mut rng, 3, 3, 5.0);
        let b = random_image(&mut rng, 3, 3, 5.0);
        assert!(fit_pca(&[&a, &b]).is_err());
    }

    #[test]
    fn pca_on_collinear_data_has_zero_second_eigenvalue() {
        // samples on a line in feature space: base + t * direction
        let mut rng = Rng::new(71);
        let base = random_image(&mut rng, 3, 4, 5.0);
        let dir = Array2::from_shape_fn((3, 4), |_| rng.uniform_in(0.0, 1.0));
        let samples: Vec<Chromatogram> = (0..5)
            .map(|i| chrom(base.data() + &(dir.mapv(|v| v * i as f64))))
            .collect();
        let refs: Vec<&Chromatogram> = samples.iter().collect();
        let model = fit_pca(&refs).unwrap();
        assert!(model.explained[1].abs() < 1e-8, "{:?}", model.explained);
        assert!(model.explained[0] > 0.0);
        // orthonormal within tolerance
        let dot: f64 = model.components[0]
            .iter()
            .zip(&model.components[1])
            .map(|(x, y)| x * y)
            .sum();
        assert!(dot.abs() < 1e-8);
        for comp in &model.components {
            let norm: f64 = comp.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert_abs_diff_eq!(norm, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn pca_matches_dense_eigendecomposition() {
        let mut rng = Rng::new(73);
        let samples: Vec<Chromatogram> = (0..5).map(|_| random_image(&mut rng, 3, 2, 9.0)).collect();
        let refs: Vec<&Chromatogram> = samples.iter().collect();
        let model = fit_pca(&refs).unwrap();

        // independent oracle: full feature-space covariance eigensolve
        let k = 5usize;
        let d = 6usize;
        let flats: Vec<Vec<f64>> = samples
            .iter()
            .map(|c| c.data().iter().copied().collect())
            .collect();
        let mean: Vec<f64> = (0..d)
            .map(|j| flats.iter().map(|f| f[j]).sum::<f64>() / k as f64)
            .collect();
        let mut cov = nalgebra::DMatrix::<f64>::zeros(d, d);
        for f in &flats {
            for i in 0..d {
                for j in 0..d {
                    cov[(i, j)] += (f[i] - mean[i]) * (f[j] - mean[j]) / k as f64;
                }
            }
        }
        let eig = nalgebra::SymmetricEigen::new(cov);
        let mut pairs: Vec<(f64, Vec<f64>)> = (0..d)
            .map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect()))
            .collect();
        pairs.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());

        for slot in 0..2 {
            assert_abs_diff_eq!(model.explained[slot], pairs[slot].0, epsilon = 1e-8);
            let dot: f64 = model.components[slot]
                .iter()
                .zip(&pairs[slot].1)
                .map(|(x, y)| x * y)
                .sum();
            assert_abs_diff_eq!(dot.abs(), 1.0, epsilon = 1e-8);
        }
    }

    #[test]
    fn pca_duplication_invariance() {
        let mut rng = Rng::new(79);
        let samples: Vec<Chromatogram> = (0..4).map(|_| random_image(&mut rng, 4, 3, 9.0)).collect();
        let refs: Vec<&Chromatogram> = samples.iter().collect();
        let doubled: Vec<&Chromatogram> = samples.iter().chain(samples.iter()).collect();
        let m1 = fit_pca(&refs).unwrap();
        let m2 = fit_pca(&doubled).unwrap();
        for slot in 0..2 {
            assert_abs_diff_eq!(m1.explained[slot], m2.explained[slot], epsilon = 1e-8);
            for (x, y) in m1.components[slot].iter().zip(&m2.components[slot]) {
                assert_abs_diff_eq!(*x, *y, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn pca_rank2_reconstruction_is_exact() {
        // samples spanned by two directions only: top-2 projection loses nothing
        let mut rng = Rng::new(83);
        let base = random_image(&mut rng, 3, 3, 5.0);
        let d1 = Array2::from_shape_fn((3, 3), |_| rng.uniform_in(0.0, 1.0));
        let d2 = Array2::from_shape_fn((3, 3), |_| rng.uniform_in(0.0, 1.0));
        let samples: Vec<Chromatogram> = (0..6)
            .map(|i| {
                let (s, t) = ((i % 3) as f64, (i / 3) as f64 * 1.7);
                chrom(base.data() + &d1.mapv(|v| v * s) + &d2.mapv(|v| v * t))
            })
            .collect();
        let refs: Vec<&Chromatogram> = samples.iter().collect();
        let model = fit_pca(&refs).unwrap();
        for s in &samples {
            let scores = model.scores(s).unwrap();
            let flat: Vec<f64> = s.data().iter().copied().collect();
            let mut recon = model.mean.clone();
            for slot in 0..2 {
                for (r, v) in recon.iter_mut().zip(&model.components[slot]) {
                    *r += scores[slot] * v;
                }
            }
            let err: f64 = flat
                .iter()
                .zip(&recon)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            assert!(err < 1e-8, "reconstruction error {err}");
        }
    }

    #[test]
    fn pca_similarity_behaviour() {
        let mut rng = Rng::new(89);
        let samples: Vec<Chromatogram> = (0..6).map(|_| random_image(&mut rng, 4, 4, 9.0)).collect();
        let refs: Vec<&Chromatogram> = samples.iter().collect();
        let model = fit_pca(&refs).unwrap();
        assert_eq!(pca_similarity(&model, &samples[0], &samples[0]).unwrap(), 1.0);
        for a in &samples {
            for b in &samples {
                let sim = pca_similarity(&model, a, b).unwrap();
                assert!(sim == 1.0 || sim == -1.0);
                // sign equals the sign of the score-pair covariance
                let sa = model.scores(a).unwrap();
                let sb = model.scores(b).unwrap();
                let cov = (sa[0] - sa[1]) * (sb[0] - sb[1]);
                if cov.abs() > 1e-9 {
                    assert_eq!(sim, if cov > 0.0 { 1.0 } else { -1.0 });
                }
            }
        }
    }
}
