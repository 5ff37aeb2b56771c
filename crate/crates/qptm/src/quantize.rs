//! PAA and SAX representations of column series, Gaussian-breakpoint symbol
//! tables, and the PAA/SAX distance functions.
//!
//! Breakpoints split the real line into `alpha` equiprobable buckets under
//! the standard normal. The symbol-distance lookup table is built from the
//! breakpoints rounded to two decimals, the working precision of the
//! published SAX lookup tables, so that a regenerated table matches the
//! published one cell for cell. Symbolization itself always uses the
//! full-precision breakpoints.

use std::fmt;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the lookup-table entries enter the SAX distance sum.
///
/// `Squared` squares the looked-up value (the formula as published here);
/// `Gap` uses the entry directly as the squared breakpoint gap it already
/// is, which is the reading that preserves the classic Euclidean
/// lower-bounding guarantee.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableSemantics {
    #[default]
    Squared,
    Gap,
}

impl std::str::FromStr for TableSemantics {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "squared" => Ok(TableSemantics::Squared),
            "gap" => Ok(TableSemantics::Gap),
            other => Err(Error::InvalidArgument(format!(
                "unknown table semantics {other:?} (expected 'squared' or 'gap')"
            ))),
        }
    }
}

/// Symbol alphabet: breakpoints plus the symbol-distance lookup table.
#[derive(Debug, Clone, PartialEq)]
pub struct Alphabet {
    pub size: usize,
    /// `size - 1` ascending standard-normal quantiles at k/size.
    pub breakpoints: Vec<f64>,
    /// `size x size` symmetric table; zero on the band `|i - j| <= 1`, else
    /// the squared gap between the (two-decimal) breakpoints bounding the
    /// two symbols' buckets.
    pub dist_table: Array2<f64>,
}

/// Builds the alphabet for `2 <= alpha <= 26` (symbols print as a-z).
pub fn make_alphabet(alpha: usize) -> Result<Alphabet> {
    if !(2..=26).contains(&alpha) {
        return Err(Error::InvalidArgument(format!(
            "alphabet size must be in 2..=26, got {alpha}"
        )));
    }
    let breakpoints: Vec<f64> = (1..alpha)
        .map(|k| inverse_normal_cdf(k as f64 / alpha as f64))
        .collect();
    let printed: Vec<f64> = breakpoints.iter().map(|b| (b * 100.0).round() / 100.0).collect();
    let mut dist_table = Array2::zeros((alpha, alpha));
    for i in 0..alpha {
        for j in 0..alpha {
            if i.abs_diff(j) > 1 {
                let hi = i.max(j);
                let lo = i.min(j);
                let gap = printed[hi - 1] - printed[lo];
                dist_table[(i, j)] = gap * gap;
            }
        }
    }
    Ok(Alphabet {
        size: alpha,
        breakpoints,
        dist_table,
    })
}

impl Alphabet {
    pub fn dist(&self, i: usize, j: usize) -> f64 {
        self.dist_table[(i, j)]
    }

    /// Symbol index for a value: the count of breakpoints strictly below it,
    /// so a value exactly on a breakpoint falls in the lower bucket.
    pub fn symbol_for(&self, value: f64) -> u8 {
        self.breakpoints.partition_point(|b| *b < value) as u8
    }

    /// Lookup-table dump in the published layout (symbol letters as header
    /// row and first column, entries to four decimals) for visual diffing.
    pub fn dist_table_csv(&self) -> String {
        let letter = |i: usize| (b'a' + i as u8) as char;
        let mut s = String::from("Alphabet");
        for j in 0..self.size {
            s.push(',');
            s.push(letter(j));
        }
        s.push('\n');
        for i in 0..self.size {
            s.push(letter(i));
            for j in 0..self.size {
                let v = self.dist_table[(i, j)];
                if v == 0.0 {
                    s.push_str(",0");
                } else {
                    s.push_str(&format!(",{v:.4}"));
                }
            }
            s.push('\n');
        }
        s
    }
}

/// Inverse standard-normal CDF (Wichura's algorithm AS 241, PPND16),
/// accurate to close to machine precision over (0, 1).
pub fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile argument must be in (0,1), got {p}");
    let q = p - 0.5;
    if q.abs() <= 0.425 {
        let r = 0.180625 - q * q;
        let num = ((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r
            + 6.7265770927008700853e4)
            * r
            + 4.5921953931549871457e4)
            * r
            + 1.3731693765509461125e4)
            * r
            + 1.9715909503065514427e3)
            * r
            + 1.3314166789178437745e2)
            * r
            + 3.3871328727963666080e0;
        let den = ((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r
            + 3.9307895800092710610e4)
            * r
            + 2.1213794301586595867e4)
            * r
            + 5.3941960214247511077e3)
            * r
            + 6.8718700749205790830e2)
            * r
            + 4.2313330701600911252e1)
            * r
            + 1.0;
        return q * num / den;
    }
    let r = if q < 0.0 { p } else { 1.0 - p };
    let mut r = (-r.ln()).sqrt();
    let x = if r <= 5.0 {
        r -= 1.6;
        let num = ((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r
            + 2.41780725177450611770e-1)
            * r
            + 1.27045825245236838258e0)
            * r
            + 3.64784832476320460504e0)
            * r
            + 5.76949722146069140550e0)
            * r
            + 4.63033784615654529590e0)
            * r
            + 1.42343711074968357734e0;
        let den = ((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r
            + 1.51986665636164571966e-2)
            * r
            + 1.48103976427480074590e-1)
            * r
            + 6.89767334985100004550e-1)
            * r
            + 1.67638483018380384940e0)
            * r
            + 2.05319162663775882187e0)
            * r
            + 1.0;
        num / den
    } else {
        r -= 5.0;
        let num = ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r
            + 1.24266094738807843860e-3)
            * r
            + 2.65321895265761230930e-2)
            * r
            + 2.96560571828504891230e-1)
            * r
            + 1.78482653991729133580e0)
            * r
            + 5.46378491116411436990e0)
            * r
            + 6.65790464350110377720e0;
        let den = ((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r
            + 1.84631831751005468180e-5)
            * r
            + 7.86869131145613259100e-4)
            * r
            + 1.48753612908506148525e-2)
            * r
            + 1.36929880922735805310e-1)
            * r
            + 5.99832206555887937690e-1)
            * r
            + 1.0;
        num / den
    };
    if q < 0.0 {
        -x
    } else {
        x
    }
}

/// Piecewise aggregate approximation of a series.
#[derive(Debug, Clone, PartialEq)]
pub struct PaaVector {
    pub values: Vec<f64>,
    pub original_length: usize,
    pub window_count: usize,
}

/// Window means. When the window count divides the length, each value is a
/// plain mean over its slice; otherwise windows have fractional boundaries
/// and each sample contributes to a window in proportion to its overlap, so
/// the mean-of-window semantics is preserved with nothing dropped.
pub fn paa(series: &[f64], windows: usize) -> Result<PaaVector> {
    let n = series.len();
    if windows == 0 || windows > n {
        return Err(Error::InvalidArgument(format!(
            "window count must be in 1..={n}, got {windows}"
        )));
    }
    let values = if n % windows == 0 {
        let len = n / windows;
        (0..windows)
            .map(|i| series[i * len..(i + 1) * len].iter().sum::<f64>() / len as f64)
            .collect()
    } else {
        let step = n as f64 / windows as f64;
        (0..windows)
            .map(|i| {
                let a = i as f64 * step;
                let b = a + step;
                let mut sum = 0.0;
                let lo = a.floor() as usize;
                let hi = (b.ceil() as usize).min(n);
                for (j, &v) in series.iter().enumerate().take(hi).skip(lo) {
                    let overlap = (b.min(j as f64 + 1.0) - a.max(j as f64)).max(0.0);
                    sum += overlap * v;
                }
                sum / step
            })
            .collect()
    };
    Ok(PaaVector {
        values,
        original_length: n,
        window_count: windows,
    })
}

/// Z-normalization with population moments. Near-constant input (std below
/// 1e-12) maps to all zeros.
pub fn znormalize(series: &[f64]) -> Vec<f64> {
    let n = series.len();
    if n == 0 {
        return Vec::new();
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let var = series.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let std = var.sqrt();
    if std < 1e-12 {
        return vec![0.0; n];
    }
    series.iter().map(|x| (x - mean) / std).collect()
}

/// Symbolized series.
#[derive(Debug, Clone, PartialEq)]
pub struct SaxWord {
    pub symbols: Vec<u8>,
    pub alphabet_size: usize,
    pub original_length: usize,
}

impl fmt::Display for SaxWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &s in &self.symbols {
            write!(f, "{}", (b'a' + s) as char)?;
        }
        Ok(())
    }
}

/// Z-normalize (optionally), reduce with [`paa`], then bucket each window
/// mean by the breakpoints.
pub fn sax(series: &[f64], windows: usize, abc: &Alphabet, normalize: bool) -> Result<SaxWord> {
    let reduced = if normalize {
        paa(&znormalize(series), windows)?
    } else {
        paa(series, windows)?
    };
    let symbols = reduced.values.iter().map(|&v| abc.symbol_for(v)).collect();
    Ok(SaxWord {
        symbols,
        alphabet_size: abc.size,
        original_length: series.len(),
    })
}

/// Euclidean distance between PAA vectors, exactly as published: no
/// `sqrt(n/w)` scale factor.
pub fn paa_dist(a: &PaaVector, b: &PaaVector) -> Result<f64> {
    if a.window_count != b.window_count {
        return Err(Error::InvalidArgument(format!(
            "PAA window counts differ: {} vs {}",
            a.window_count, b.window_count
        )));
    }
    Ok(a.values
        .iter()
        .zip(&b.values)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// The customary scaled variant, `sqrt(n/w)` times [`paa_dist`]; this is the
/// form that lower-bounds the true Euclidean distance.
pub fn paa_dist_scaled(a: &PaaVector, b: &PaaVector) -> Result<f64> {
    if a.original_length != b.original_length {
        return Err(Error::InvalidArgument(format!(
            "PAA original lengths differ: {} vs {}",
            a.original_length, b.original_length
        )));
    }
    let scale = (a.original_length as f64 / a.window_count as f64).sqrt();
    Ok(scale * paa_dist(a, b)?)
}

/// Symbolic distance `sqrt((n/w) * sum(term))` where `term` is the lookup
/// value squared (`Squared`) or the lookup value itself (`Gap`).
pub fn sax_dist(a: &SaxWord, b: &SaxWord, abc: &Alphabet, semantics: TableSemantics) -> Result<f64> {
    if a.symbols.len() != b.symbols.len() {
        return Err(Error::InvalidArgument(format!(
            "SAX word lengths differ: {} vs {}",
            a.symbols.len(),
            b.symbols.len()
        )));
    }
    if a.original_length != b.original_length {
        return Err(Error::InvalidArgument(format!(
            "SAX original lengths differ: {} vs {}",
            a.original_length, b.original_length
        )));
    }
    if a.alphabet_size != b.alphabet_size || a.alphabet_size != abc.size {
        return Err(Error::InvalidArgument(format!(
            "alphabet sizes differ: {} vs {} (table {})",
            a.alphabet_size, b.alphabet_size, abc.size
        )));
    }
    let w = a.symbols.len() as f64;
    let n = a.original_length as f64;
    let sum: f64 = a
        .symbols
        .iter()
        .zip(&b.symbols)
        .map(|(&i, &j)| {
            let d = abc.dist(i as usize, j as usize);
            match semantics {
                TableSemantics::Squared => d * d,
                TableSemantics::Gap => d,
            }
        })
        .sum();
    Ok((n / w * sum).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Rng;
    use approx::assert_abs_diff_eq;

    #[test]
    fn inverse_cdf_matches_published_quantiles() {
        // Reference values computed independently (scipy.stats.norm.ppf).
        let cases = [
            (0.5, 0.0),
            (0.9, 1.2815515655446004),
            (0.975, 1.959963984540054),
            (0.3, -0.5244005127080409),
            (0.25, -0.6744897501960817),
            (0.001, -3.090232306167813),
            (1e-9, -5.9978070150076865),
        ];
        for (p, want) in cases {
            assert_abs_diff_eq!(inverse_normal_cdf(p), want, epsilon = 1e-12);
        }
    }

    #[test]
    fn inverse_cdf_is_antisymmetric() {
        let mut rng = Rng::new(1);
        for _ in 0..1000 {
            let p = rng.uniform_in(1e-12, 0.5);
            assert_abs_diff_eq!(
                inverse_normal_cdf(p),
                -inverse_normal_cdf(1.0 - p),
                epsilon = 1e-9
            );
        }
    }

    fn letter_pair(abc: &Alphabet, a: char, b: char) -> f64 {
        abc.dist((a as u8 - b'a') as usize, (b as u8 - b'a') as usize)
    }

    #[test]
    fn alpha_10_reproduces_published_cells() {
        let abc = make_alphabet(10).unwrap();
        assert_abs_diff_eq!(letter_pair(&abc, 'a', 'c'), 0.1936, epsilon = 1e-12);
        assert_abs_diff_eq!(letter_pair(&abc, 'a', 'd'), 0.5776, epsilon = 1e-12);
        assert_abs_diff_eq!(letter_pair(&abc, 'a', 'j'), 6.5536, epsilon = 1e-12);
        assert_abs_diff_eq!(letter_pair(&abc, 'e', 'g'), 0.0625, epsilon = 1e-12);
        assert_abs_diff_eq!(letter_pair(&abc, 'c', 'h'), 1.0816, epsilon = 1e-12);
        for i in 0..10usize {
            for j in 0..10usize {
                if i.abs_diff(j) <= 1 {
                    assert_eq!(abc.dist(i, j), 0.0);
                }
            }
        }
    }

    #[test]
    fn alpha_2_has_single_zero_breakpoint_and_zero_table() {
        let abc = make_alphabet(2).unwrap();
        assert_eq!(abc.breakpoints, vec![0.0]);
        assert!(abc.dist_table.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn alpha_4_breakpoints_are_exact_quantiles() {
        let abc = make_alphabet(4).unwrap();
        assert_abs_diff_eq!(abc.breakpoints[0], -0.6745, epsilon = 1e-4);
        assert_abs_diff_eq!(abc.breakpoints[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(abc.breakpoints[2], 0.6745, epsilon = 1e-4);
        // Table entries come from the two-decimal breakpoints, matching the
        // published-table convention: (0 - (-0.67))^2.
        assert_abs_diff_eq!(letter_pair(&abc, 'a', 'c'), 0.4489, epsilon = 1e-12);
    }

    #[test]
    fn table_is_symmetric_with_monotone_rows() {
        for alpha in [3, 4, 10, 16] {
            let abc = make_alphabet(alpha).unwrap();
            for i in 0..alpha {
                for j in 0..alpha {
                    assert_eq!(abc.dist(i, j), abc.dist(j, i));
                    assert!((abc.dist(i, j) == 0.0) == (i.abs_diff(j) <= 1));
                }
                // non-decreasing away from the diagonal
                for j in (i + 1)..alpha - 1 {
                    assert!(abc.dist(i, j + 1) >= abc.dist(i, j));
                }
                for j in 1..i {
                    assert!(abc.dist(i, j - 1) >= abc.dist(i, j));
                }
            }
        }
    }

    #[test]
    fn alphabet_size_bounds() {
        assert!(make_alphabet(1).is_err());
        assert!(make_alphabet(27).is_err());
        assert!(make_alphabet(26).is_ok());
    }

    #[test]
    fn table_csv_layout() {
        let abc = make_alphabet(10).unwrap();
        let csv = abc.dist_table_csv();
        let mut lines = csv.lines();
        assert_eq!(lines.next().unwrap(), "Alphabet,a,b,c,d,e,f,g,h,i,j");
        assert_eq!(
            lines.next().unwrap(),
            "a,0,0,0.1936,0.5776,1.0609,1.6384,2.3409,3.2400,4.4944,6.5536"
        );
    }

    #[test]
    fn paa_window_means() {
        assert_eq!(paa(&[1.0, 3.0, 5.0, 7.0], 2).unwrap().values, vec![2.0, 6.0]);
    }

    #[test]
    fn paa_identity_when_w_equals_n() {
        let xs = [0.5, 2.0, -1.0];
        assert_eq!(paa(&xs, 3).unwrap().values, xs.to_vec());
    }

    #[test]
    fn paa_matches_brute_force_on_divisible_input() {
        let mut rng = Rng::new(2);
        let xs: Vec<f64> = (0..100).map(|_| rng.uniform_in(-10.0, 10.0)).collect();
        let got = paa(&xs, 10).unwrap();
        for i in 0..10 {
            let want = xs[i * 10..(i + 1) * 10].iter().sum::<f64>() / 10.0;
            assert_abs_diff_eq!(got.values[i], want, epsilon = 1e-12);
        }
    }

    #[test]
    fn paa_fractional_windows_preserve_mass() {
        // n=5, w=2: windows [0,2.5) and [2.5,5); the middle sample splits.
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
        let got = paa(&xs, 2).unwrap().values;
        assert_abs_diff_eq!(got[0], (1.0 + 2.0 + 0.5 * 3.0) / 2.5, epsilon = 1e-12);
        assert_abs_diff_eq!(got[1], (0.5 * 3.0 + 4.0 + 5.0) / 2.5, epsilon = 1e-12);
        // weighted means recombine to the overall mean
        let mean = xs.iter().sum::<f64>() / 5.0;
        assert_abs_diff_eq!((got[0] + got[1]) / 2.0, mean, epsilon = 1e-12);
    }

    #[test]
    fn paa_rejects_bad_window_counts() {
        assert!(paa(&[1.0], 0).is_err());
        assert!(paa(&[1.0], 2).is_err());
    }

    #[test]
    fn znormalize_contract() {
        let z = znormalize(&[1.0, 2.0, 3.0]);
        let mean = z.iter().sum::<f64>() / 3.0;
        let var = z.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / 3.0;
        assert_abs_diff_eq!(mean, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(var.sqrt(), 1.0, epsilon = 1e-9);
        assert_eq!(znormalize(&[5.0, 5.0, 5.0]), vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn znormalize_random_moments() {
        let mut rng = Rng::new(3);
        let xs: Vec<f64> = (0..500).map(|_| rng.uniform_in(3.0, 90.0)).collect();
        let z = znormalize(&xs);
        let mean = z.iter().sum::<f64>() / z.len() as f64;
        let std = (z.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / z.len() as f64).sqrt();
        assert!(mean.abs() < 1e-12);
        assert!((std - 1.0).abs() < 1e-9);
    }

    #[test]
    fn sax_word_for_stepped_series() {
        // Four high, three middle, two low values: the shape quantizes to
        // "ccccbbbaa" with three symbols and nine windows.
        let series = [2.0, 2.0, 2.0, 2.0, 0.0, 0.0, 0.0, -2.0, -2.0];
        let abc = make_alphabet(3).unwrap();
        let word = sax(&series, 9, &abc, true).unwrap();
        assert_eq!(word.to_string(), "ccccbbbaa");
    }

    #[test]
    fn constant_series_maps_to_the_bucket_of_zero() {
        let abc = make_alphabet(3).unwrap();
        let word = sax(&[7.0; 12], 4, &abc, true).unwrap();
        assert_eq!(word.to_string(), "bbbb");
        // boundary rule: 0 sits exactly on the middle breakpoint of an even
        // alphabet and maps to the lower symbol
        let abc4 = make_alphabet(4).unwrap();
        let word4 = sax(&[7.0; 12], 4, &abc4, true).unwrap();
        assert_eq!(word4.to_string(), "bbbb");
    }

    #[test]
    fn symbols_are_monotone_in_value() {
        let mut rng = Rng::new(4);
        let abc = make_alphabet(10).unwrap();
        for _ in 0..200 {
            let a = rng.uniform_in(-3.0, 3.0);
            let b = rng.uniform_in(-3.0, 3.0);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            assert!(abc.symbol_for(lo) <= abc.symbol_for(hi));
        }
    }

    #[test]
    fn boundary_value_takes_lower_symbol() {
        let abc = make_alphabet(10).unwrap();
        for (k, &b) in abc.breakpoints.iter().enumerate() {
            assert_eq!(abc.symbol_for(b) as usize, k);
        }
    }

    #[test]
    fn paa_dist_cases() {
        let z = paa(&[0.0, 0.0], 2).unwrap();
        let v = paa(&[3.0, 4.0], 2).unwrap();
        assert_eq!(paa_dist(&z, &z).unwrap(), 0.0);
        assert_eq!(paa_dist(&z, &v).unwrap(), 5.0);
        let w3 = paa(&[1.0, 2.0, 3.0], 3).unwrap();
        assert!(paa_dist(&z, &w3).is_err());
    }

    #[test]
    fn paa_dist_matches_brute_force() {
        let mut rng = Rng::new(5);
        let a: Vec<f64> = (0..64).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let b: Vec<f64> = (0..64).map(|_| rng.uniform_in(-2.0, 2.0)).collect();
        let pa = paa(&a, 8).unwrap();
        let pb = paa(&b, 8).unwrap();
        let want = pa
            .values
            .iter()
            .zip(&pb.values)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt();
        assert_abs_diff_eq!(paa_dist(&pa, &pb).unwrap(), want, epsilon = 1e-12);
        assert_abs_diff_eq!(
            paa_dist_scaled(&pa, &pb).unwrap(),
            8.0_f64.sqrt() * want,
            epsilon = 1e-12
        );
    }

    fn word(symbols: &[u8], alpha: usize, n: usize) -> SaxWord {
        SaxWord {
            symbols: symbols.to_vec(),
            alphabet_size: alpha,
            original_length: n,
        }
    }

    #[test]
    fn sax_dist_identical_and_adjacent_words_are_zero() {
        let abc = make_alphabet(10).unwrap();
        let a = word(&[0, 3, 5, 9], 10, 16);
        let b = word(&[1, 2, 6, 8], 10, 16);
        assert_eq!(sax_dist(&a, &a, &abc, TableSemantics::Squared).unwrap(), 0.0);
        assert_eq!(sax_dist(&a, &b, &abc, TableSemantics::Squared).unwrap(), 0.0);
        assert_eq!(sax_dist(&a, &b, &abc, TableSemantics::Gap).unwrap(), 0.0);
    }

    #[test]
    fn sax_dist_two_semantics() {
        let abc = make_alphabet(10).unwrap();
        let a = word(&[0, 0, 0, 0], 10, 16);
        let c = word(&[2, 2, 2, 2], 10, 16);
        // n/w = 4 and four windows of table value 0.1936 each
        assert_abs_diff_eq!(
            sax_dist(&a, &c, &abc, TableSemantics::Squared).unwrap(),
            0.7744,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            sax_dist(&a, &c, &abc, TableSemantics::Gap).unwrap(),
            1.7600,
            epsilon = 1e-12
        );
    }

    #[test]
    fn sax_dist_rejects_mismatched_words() {
        let abc = make_alphabet(10).unwrap();
        let a = word(&[0, 0], 10, 16);
        assert!(sax_dist(&a, &word(&[0, 0, 0], 10, 16), &abc, TableSemantics::Gap).is_err());
        assert!(sax_dist(&a, &word(&[0, 0], 10, 32), &abc, TableSemantics::Gap).is_err());
        assert!(sax_dist(&a, &word(&[0, 0], 4, 16), &abc, TableSemantics::Gap).is_err());
    }

    #[test]
    fn gap_semantics_lower_bounds_euclidean_sample() {
        // Smoke-scale version of the acceptance property.
        let mut rng = Rng::new(6);
        let abc = make_alphabet(10).unwrap();
        for _ in 0..500 {
            let a = znormalize(&(0..128).map(|_| rng.normal()).collect::<Vec<_>>());
            let b = znormalize(&(0..128).map(|_| rng.normal()).collect::<Vec<_>>());
            let euclid = a
                .iter()
                .zip(&b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt();
            let wa = sax(&a, 16, &abc, false).unwrap();
            let wb = sax(&b, 16, &abc, false).unwrap();
            let mindist = sax_dist(&wa, &wb, &abc, TableSemantics::Gap).unwrap();
            assert!(
                mindist <= euclid + 1e-12,
                "mindist {mindist} > euclid {euclid}"
            );
        }
    }

    #[test]
    fn max_along_interval_dominates_paa() {
        let mut rng = Rng::new(7);
        let xs: Vec<f64> = (0..120).map(|_| rng.uniform_in(0.0, 50.0)).collect();
        let means = paa(&xs, 12).unwrap().values;
        let maxes = crate::peaks::max_along_interval(&xs, 12).unwrap();
        for (mx, mn) in maxes.iter().zip(&means) {
            assert!(mx >= mn);
        }
    }
}
