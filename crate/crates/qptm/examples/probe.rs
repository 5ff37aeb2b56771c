// Scratch harness for tuning acceptance-test parameters. Not part of the
// test suite.

use qptm::classify::{binary_classify, cross_score_matrix, metrics, score_batch, CrossOptions, MethodId};
use qptm::config::RunConfig;
use qptm::similarity::calibrate_epsilon;
use qptm::synth::{build_family_specs, make_benchmark, render, BenchmarkParams};

fn main() {
    probe_calibration();
    probe_end_to_end();
}

fn probe_calibration() {
    println!("=== calibration probe (criterion 5) ===");
    for (noise_frac, min_h) in [(0.0, 0.0), (0.01, 0.0), (0.01, 50.0), (0.02, 0.0)] {
        let params = BenchmarkParams {
            families: 2,
            dims: (500, 250),
            seed: 123,
            peaks_per_image: 60,
            shared_fraction: 0.8,
            height_jitter: 0.4,
            noise_fraction: noise_frac,
            ..Default::default()
        };
        let specs = build_family_specs(&params).unwrap();
        let family: Vec<_> = render(&specs[0], params.dims, 7)
            .unwrap()
            .into_iter()
            .map(|(c, _)| c)
            .collect();
        let grid: Vec<f64> = (1..=10).map(|i| i as f64 / 10.0).collect();
        let windows = 500 / 8;
        let t0 = std::time::Instant::now();
        let curve = calibrate_epsilon(&family, 0, &grid, windows, min_h, 0.01).unwrap();
        println!(
            "noise_frac={noise_frac} min_h={min_h} chosen={} ({:?})",
            curve.chosen_epsilon,
            t0.elapsed()
        );
        for (e, d) in &curve.points {
            println!("  eps={e:.1} dev={d:.4}");
        }
        let monotone = curve.points.windows(2).all(|w| w[1].1 <= w[0].1 + 1e-9);
        println!("  non-increasing: {monotone}");
    }
}

fn probe_end_to_end() {
    println!("=== end-to-end probe (criterion 6) ===");
    let params = BenchmarkParams {
        families: 3,
        dims: (200, 120),
        seed: 42,
        peaks_per_image: 40,
        shared_fraction: 0.8,
        height_jitter: 0.3,
        noise_fraction: 0.01,
        ..Default::default()
    };
    let specs = build_family_specs(&params).unwrap();
    let bench = make_benchmark(&specs, params.dims, 7).unwrap();
    let mut cfg = RunConfig::default();
    cfg.min_peak_height = 50.0;
    let sp = cfg.score_params(params.dims.0).unwrap();
    let reference = &bench.library.entries[0];
    let target_region = &bench.library.regions[0];
    let tests: Vec<_> = bench.tests.iter().collect();
    let is_target: Vec<bool> = bench.tests.iter().map(|t| &t.region == target_region).collect();
    let t0 = std::time::Instant::now();
    for method in [MethodId::Qptm, MethodId::Sax, MethodId::Paa, MethodId::L2, MethodId::Corr2, MethodId::Pca] {
        let rows = score_batch(&tests, reference, method, &sp).unwrap();
        let c = binary_classify(&rows, &is_target, cfg.theta).unwrap();
        let m = metrics(&c).unwrap();
        let in_p: Vec<f64> = rows
            .iter()
            .zip(&is_target)
            .filter(|(_, t)| **t)
            .map(|(r, _)| r.percent_match)
            .collect();
        let out_p: Vec<f64> = rows
            .iter()
            .zip(&is_target)
            .filter(|(_, t)| !**t)
            .map(|(r, _)| r.percent_match)
            .collect();
        println!(
            "{method}: tp={} fn={} fp={} tn={} f1={:.4} | in-family mean {:.2} cross mean {:.2}",
            c.true_pos,
            c.false_neg,
            c.false_pos,
            c.true_neg,
            m.f1,
            in_p.iter().sum::<f64>() / in_p.len() as f64,
            out_p.iter().sum::<f64>() / out_p.len() as f64,
        );
    }
    println!("scoring took {:?}", t0.elapsed());

    // full-sample cross matrix over all injections, per-row epsilon training
    let all: Vec<_> = bench
        .library
        .entries
        .iter()
        .cloned()
        .chain(bench.tests.iter().cloned())
        .collect();
    let full = qptm::chromatogram::SourceLibrary::new(all).unwrap();
    let t0 = std::time::Instant::now();
    let matrix = cross_score_matrix(&full, MethodId::Qptm, &sp, &CrossOptions::default()).unwrap();
    println!("cross matrix {:?} in {:?}", matrix.dim(), t0.elapsed());
    let k = full.len();
    let mut in_sum = 0.0;
    let mut in_n = 0;
    let mut out_sum = 0.0;
    let mut out_n = 0;
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            if full.regions[i] == full.regions[j] {
                in_sum += matrix[(i, j)];
                in_n += 1;
            } else {
                out_sum += matrix[(i, j)];
                out_n += 1;
            }
        }
    }
    println!(
        "in-family mean {:.2} ({in_n}), cross-family mean {:.2} ({out_n})",
        in_sum / in_n as f64,
        out_sum / out_n as f64
    );
}
