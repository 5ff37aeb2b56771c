//! Command-line front end: benchmark generation, epsilon calibration,
//! library comparison, target classification, cross-matrix export, and
//! report rendering.
//!
//! Configuration precedence is built-in defaults, then `--config` file,
//! then flags. All randomness flows from `--seed`; `--threads` only changes
//! wall-clock time, never bytes of output.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::chromatogram::load_library;
use crate::classify::{
    binary_classify, best_index, cross_score_matrix, metrics, normalize_scores, ConfusionMatrix2,
    CrossOptions, MethodId, MetricSet, ScoreRow, Scorer, score_batch,
};
use crate::config::{ConfigFile, RunConfig};
use crate::error::{Error, Result};
use crate::exec;
use crate::quantize::TableSemantics;
use crate::similarity::calibrate_epsilon;
use crate::synth::{build_family_specs, make_benchmark, BenchmarkParams};

#[derive(Debug, Parser)]
#[command(name = "qptm", version, about = "Fingerprint 2-D peak-profile images against a reference library")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a seeded synthetic benchmark directory
    Gen(GenArgs),
    /// Sweep epsilon over a family and pick the knee
    Calibrate(CalibrateArgs),
    /// Score a test set against every library entry
    Compare(CompareArgs),
    /// Binary target-vs-rest classification with confusion matrix and metrics
    Classify(ClassifyArgs),
    /// K x K percentage-match matrix over the library
    Crossmatrix(CrossmatrixArgs),
    /// Pretty-print a saved classification report
    Report(ReportArgs),
}

/// Scoring configuration flags shared by every command.
#[derive(Debug, Args)]
struct ConfigArgs {
    /// JSON config file; flags override its values
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Peak-ratio uncertainty bound epsilon [default: 0.5]
    #[arg(long)]
    epsilon: Option<f64>,
    /// Classification threshold theta, percent [default: 96]
    #[arg(long)]
    theta: Option<f64>,
    /// SAX alphabet size [default: 10]
    #[arg(long)]
    alphabet_size: Option<usize>,
    /// Per-column word length divisor, w = M/divisor [default: 8]
    #[arg(long)]
    word_length_divisor: Option<usize>,
    /// Peak extraction floor [default: 0]
    #[arg(long)]
    min_peak_height: Option<f64>,
    /// SAX lookup-table semantics: squared | gap [default: squared]
    #[arg(long)]
    sax_table_semantics: Option<TableSemantics>,
    /// Scale the PAA distance by sqrt(n/w): true | false [default: false]
    #[arg(long)]
    paa_dist_scaled: Option<bool>,
    /// Z-normalize columns before PAA/SAX: true | false [default: true]
    #[arg(long)]
    znormalize: Option<bool>,
    /// Worker threads [default: available cores]
    #[arg(long)]
    threads: Option<usize>,
}

impl ConfigArgs {
    fn resolve(&self, method: Option<MethodId>) -> Result<RunConfig> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg = cfg.with_file(&ConfigFile::load(path)?);
        }
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = self.$f { cfg.$f = v; } )* };
        }
        take!(
            epsilon,
            theta,
            alphabet_size,
            word_length_divisor,
            min_peak_height,
            sax_table_semantics,
            paa_dist_scaled,
            znormalize,
            threads
        );
        if let Some(m) = method {
            cfg.method = m;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// `start:step:end` epsilon grid, or a single value.
#[derive(Debug, Clone)]
struct GridSpec(Vec<f64>);

impl std::str::FromStr for GridSpec {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let num = |t: &str| -> std::result::Result<f64, String> {
            t.trim().parse::<f64>().map_err(|_| format!("not a number: {t:?}"))
        };
        match parts.as_slice() {
            [single] => Ok(GridSpec(vec![num(single)?])),
            [start, step, end] => {
                let (a, b, c) = (num(start)?, num(step)?, num(end)?);
                if b <= 0.0 || c < a {
                    return Err(format!("bad grid {s:?}: need start <= end and step > 0"));
                }
                let count = ((c - a) / b + 1e-9).floor() as usize + 1;
                Ok(GridSpec((0..count).map(|i| a + i as f64 * b).collect()))
            }
            _ => Err(format!("grid must be 'start:step:end' or a single value, got {s:?}")),
        }
    }
}

fn parse_dims(s: &str) -> std::result::Result<(usize, usize), String> {
    let (m, n) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("dims must be MxN, got {s:?}"))?;
    let m = m.trim().parse::<usize>().map_err(|_| format!("bad row count {m:?}"))?;
    let n = n.trim().parse::<usize>().map_err(|_| format!("bad column count {n:?}"))?;
    Ok((m, n))
}

#[derive(Debug, Args)]
struct GenArgs {
    /// Output directory for the benchmark
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
    /// Number of region families
    #[arg(long, default_value_t = 3)]
    families: usize,
    /// Samples per family (first one becomes the library template)
    #[arg(long, default_value_t = 7)]
    per_family: usize,
    /// Image dimensions as MxN (rows x columns)
    #[arg(long, default_value = "200x100", value_parser = parse_dims)]
    dims: (usize, usize),
    #[arg(long, default_value_t = 7)]
    seed: u64,
    /// Total peaks per image
    #[arg(long, default_value_t = 40)]
    peaks: usize,
    /// Fraction of peaks shared across families (the regional fingerprint)
    #[arg(long, default_value_t = 0.8)]
    shared_frac: f64,
    /// Max multiplicative height jitter per peak
    #[arg(long, default_value_t = 0.3)]
    jitter: f64,
    /// Baseline noise sigma as a fraction of the max peak height
    #[arg(long, default_value_t = 0.01)]
    noise_frac: f64,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Debug, Args)]
struct CalibrateArgs {
    /// Manifest of training injections (JSON array of {path, region})
    #[arg(long, value_name = "FILE")]
    manifest: PathBuf,
    /// Region family to calibrate
    #[arg(long)]
    family: String,
    /// Reference index within the family
    #[arg(long, default_value_t = 0)]
    reference: usize,
    /// Epsilon grid as start:step:end
    #[arg(long, default_value = "0.1:0.1:1.0")]
    eps: GridSpec,
    /// Relative plateau tolerance for the knee rule
    #[arg(long, default_value_t = 0.01)]
    plateau_tol: f64,
    /// Output prefix: writes <prefix>.csv and <prefix>.json
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Library manifest
    #[arg(long, value_name = "FILE")]
    library: PathBuf,
    /// Test-set manifest
    #[arg(long, value_name = "FILE")]
    tests: PathBuf,
    /// Comparison method: qptm | sax | paa | l2 | corr2 | pca [default: qptm]
    #[arg(long)]
    method: Option<MethodId>,
    /// Output prefix: writes <prefix>.json and <prefix>_scores.csv
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Debug, Args)]
struct ClassifyArgs {
    /// Library manifest
    #[arg(long, value_name = "FILE")]
    library: PathBuf,
    /// Test-set manifest; regions are the ground truth
    #[arg(long, value_name = "FILE")]
    tests: PathBuf,
    /// Index of the target reference within the library
    #[arg(long, default_value_t = 0)]
    target: usize,
    /// Comparison method; repeat for side-by-side reports [default: qptm]
    #[arg(long = "method")]
    methods: Vec<MethodId>,
    /// Output prefix: writes <prefix>.json and <prefix>_scores.csv
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Debug, Args)]
struct CrossmatrixArgs {
    /// Library manifest
    #[arg(long, value_name = "FILE")]
    library: PathBuf,
    /// Comparison method [default: qptm]
    #[arg(long)]
    method: Option<MethodId>,
    /// Same-family injections used to train each row's epsilon (qptm only)
    #[arg(long, default_value_t = 6)]
    train_count: usize,
    /// Per-row epsilon calibration grid
    #[arg(long, default_value = "0.1:0.1:1.0")]
    eps_grid: GridSpec,
    #[arg(long, default_value_t = 0.01)]
    plateau_tol: f64,
    /// Output CSV path (K rows x K columns, no header)
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    cfg: ConfigArgs,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Classification report JSON to render
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
}

/// JSON report of one `classify` run.
#[derive(Debug, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub config: RunConfig,
    pub target_index: usize,
    pub target_region: String,
    pub results: Vec<MethodReport>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MethodReport {
    pub method: MethodId,
    pub confusion: ConfusionMatrix2,
    pub metrics: MetricSet,
    pub scores: Vec<ScoreRow>,
}

/// JSON report of one `compare` run.
#[derive(Debug, Serialize, Deserialize)]
pub struct CompareReport {
    pub config: RunConfig,
    pub decisions: Vec<Decision>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Decision {
    pub test_id: String,
    pub best_index: usize,
    pub region: String,
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .expect("thread pool")
        .install(f)
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T>(_threads: usize, f: impl FnOnce() -> T) -> T {
    f()
}

/// Parses arguments and runs; returns the process exit code. Usage errors
/// exit 2 (via clap), validation and I/O errors exit 1.
pub fn run() -> i32 {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Classify(a) => cmd_classify(a),
        Command::Crossmatrix(a) => cmd_crossmatrix(a),
        Command::Report(a) => cmd_report(a),
    }
}

fn with_suffix(p: &Path, suffix: &str) -> PathBuf {
    PathBuf::from(format!("{}{suffix}", p.display()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn scores_csv(rows: &[ScoreRow]) -> String {
    let mut s = String::from("test_id,ref_id,method,raw,percent_match\n");
    for r in rows {
        s.push_str(&format!(
            "{},{},{},{},{}\n",
            r.test_id, r.ref_id, r.method, r.raw, r.percent_match
        ));
    }
    s
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let cfg = a.cfg.resolve(None)?;
    let params = BenchmarkParams {
        families: a.families,
        dims: a.dims,
        seed: a.seed,
        peaks_per_image: a.peaks,
        shared_fraction: a.shared_frac,
        height_jitter: a.jitter,
        noise_fraction: a.noise_frac,
        ..Default::default()
    };
    let specs = build_family_specs(&params)?;
    let bench = with_threads(cfg.threads, || make_benchmark(&specs, params.dims, a.per_family))?;
    bench.write_to(&a.out)?;
    println!(
        "wrote {} templates and {} test samples to {}",
        bench.library.len(),
        bench.tests.len(),
        a.out.display()
    );
    Ok(())
}

fn cmd_calibrate(a: CalibrateArgs) -> Result<()> {
    let cfg = a.cfg.resolve(None)?;
    let lib = load_library(&a.manifest)?;
    let family: Vec<_> = lib
        .entries
        .iter()
        .filter(|c| c.region == a.family)
        .cloned()
        .collect();
    if family.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "family {:?} has {} members in {}; calibration needs at least 2",
            a.family,
            family.len(),
            a.manifest.display()
        )));
    }
    if a.reference >= family.len() {
        return Err(Error::InvalidArgument(format!(
            "reference index {} out of range for family of {}",
            a.reference,
            family.len()
        )));
    }
    let params = cfg.score_params(family[0].m())?;
    let curve = with_threads(cfg.threads, || {
        calibrate_epsilon(
            &family,
            a.reference,
            &a.eps.0,
            params.windows,
            cfg.min_peak_height,
            a.plateau_tol,
        )
    })?;
    write_file(&with_suffix(&a.out, ".csv"), &curve.to_csv())?;
    let summary = serde_json::json!({ "chosen_epsilon": curve.chosen_epsilon });
    write_file(
        &with_suffix(&a.out, ".json"),
        &serde_json::to_string_pretty(&summary).expect("summary serializes"),
    )?;
    println!(
        "chosen epsilon {} over {} grid points (family {:?}, {} members)",
        curve.chosen_epsilon,
        curve.points.len(),
        a.family,
        family.len()
    );
    Ok(())
}

fn cmd_compare(a: CompareArgs) -> Result<()> {
    let cfg = a.cfg.resolve(a.method)?;
    let lib = load_library(&a.library)?;
    let tests = load_library(&a.tests)?;
    let params = cfg.score_params(lib.entries[0].m())?;
    let method = cfg.method;
    let k = lib.len();
    let (rows, decisions) = with_threads(cfg.threads, || -> Result<_> {
        let mut batch: Vec<&_> = tests.entries.iter().collect();
        batch.extend(lib.entries.iter());
        let scorer = Scorer::new(method, &params, &batch)?;
        let raws = exec::try_map_indexed(tests.len() * k, |idx| {
            let (t, r) = (idx / k, idx % k);
            scorer.raw(&tests.entries[t], &lib.entries[r])
        })?;
        let mut rows: Vec<ScoreRow> = Vec::with_capacity(raws.len());
        for (idx, raw) in raws.iter().enumerate() {
            let (t, r) = (idx / k, idx % k);
            rows.push(ScoreRow {
                test_id: tests.entries[t].sample_id.clone(),
                ref_id: lib.entries[r].sample_id.clone(),
                method,
                raw: *raw,
                percent_match: 0.0,
            });
        }
        normalize_scores(&mut rows)?;
        let decisions: Vec<Decision> = (0..tests.len())
            .map(|t| {
                let slice = &raws[t * k..(t + 1) * k];
                let best = best_index(slice, method.is_distance_like());
                Decision {
                    test_id: tests.entries[t].sample_id.clone(),
                    best_index: best,
                    region: lib.regions[best].clone(),
                }
            })
            .collect();
        Ok((rows, decisions))
    })?;
    let report = CompareReport {
        config: cfg,
        decisions,
    };
    write_file(&with_suffix(&a.out, "_scores.csv"), &scores_csv(&rows))?;
    write_file(
        &with_suffix(&a.out, ".json"),
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    println!("{:<24} {:>6}  region", "test", "ref#");
    for d in &report.decisions {
        println!("{:<24} {:>6}  {}", d.test_id, d.best_index, d.region);
    }
    Ok(())
}

fn cmd_classify(a: ClassifyArgs) -> Result<()> {
    let cfg = a.cfg.resolve(None)?;
    let methods = if a.methods.is_empty() {
        vec![cfg.method]
    } else {
        a.methods.clone()
    };
    let lib = load_library(&a.library)?;
    if a.target >= lib.len() {
        return Err(Error::InvalidArgument(format!(
            "target index {} out of range for library of {}",
            a.target,
            lib.len()
        )));
    }
    let tests = load_library(&a.tests)?;
    if tests.is_empty() {
        return Err(Error::InvalidArgument("test set is empty".into()));
    }
    let params = cfg.score_params(lib.entries[0].m())?;
    let reference = &lib.entries[a.target];
    let target_region = lib.regions[a.target].clone();
    let is_target: Vec<bool> = tests.regions.iter().map(|r| *r == target_region).collect();

    let results = with_threads(cfg.threads, || -> Result<Vec<MethodReport>> {
        let test_refs: Vec<&_> = tests.entries.iter().collect();
        methods
            .iter()
            .map(|&method| {
                let rows = score_batch(&test_refs, reference, method, &params)?;
                let confusion = binary_classify(&rows, &is_target, cfg.theta)?;
                Ok(MethodReport {
                    method,
                    confusion,
                    metrics: metrics(&confusion)?,
                    scores: rows,
                })
            })
            .collect()
    })?;

    let report = ClassifyReport {
        config: cfg,
        target_index: a.target,
        target_region,
        results,
    };
    write_file(
        &with_suffix(&a.out, ".json"),
        &serde_json::to_string_pretty(&report).expect("report serializes"),
    )?;
    let all_rows: Vec<ScoreRow> = report
        .results
        .iter()
        .flat_map(|r| r.scores.iter().cloned())
        .collect();
    write_file(&with_suffix(&a.out, "_scores.csv"), &scores_csv(&all_rows))?;
    print_report(&report);
    Ok(())
}

fn cmd_crossmatrix(a: CrossmatrixArgs) -> Result<()> {
    let cfg = a.cfg.resolve(a.method)?;
    let lib = load_library(&a.library)?;
    let params = cfg.score_params(lib.entries[0].m())?;
    let opts = CrossOptions {
        train_count: a.train_count,
        eps_grid: a.eps_grid.0.clone(),
        plateau_tol: a.plateau_tol,
    };
    let matrix = with_threads(cfg.threads, || {
        cross_score_matrix(&lib, cfg.method, &params, &opts)
    })?;
    let mut csv = String::new();
    for i in 0..matrix.nrows() {
        let row: Vec<String> = (0..matrix.ncols()).map(|j| format!("{}", matrix[(i, j)])).collect();
        csv.push_str(&row.join(","));
        csv.push('\n');
    }
    write_file(&a.out, &csv)?;
    println!(
        "wrote {}x{} percent matrix for {} to {}",
        matrix.nrows(),
        matrix.ncols(),
        cfg.method,
        a.out.display()
    );
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.input).map_err(|e| Error::io(&a.input, e))?;
    let report: ClassifyReport = serde_json::from_str(&text).map_err(|e| Error::Json {
        path: a.input.clone(),
        source: e,
    })?;
    print_report(&report);
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{x:.4}"),
        None => "NaN".into(),
    }
}

fn print_report(report: &ClassifyReport) {
    println!(
        "target: library entry {} (region {:?}), theta = {}%",
        report.target_index, report.target_region, report.config.theta
    );
    println!();
    println!("{:<10} confusion matrix (rows: true target/other)", "method");
    for r in &report.results {
        let c = &r.confusion;
        println!("{:<10} [ {:>4} {:>4} ]", r.method.to_string(), c.true_pos, c.false_neg);
        println!("{:<10} [ {:>4} {:>4} ]", "", c.false_pos, c.true_neg);
    }
    println!();
    println!(
        "{:<10} {:>9} {:>10} {:>12} {:>12} {:>8}",
        "method", "accuracy", "precision", "sensitivity", "specificity", "f1"
    );
    for r in &report.results {
        let m = &r.metrics;
        println!(
            "{:<10} {:>9.4} {:>10} {:>12} {:>12} {:>8.4}",
            r.method.to_string(),
            m.accuracy,
            fmt_opt(m.precision),
            fmt_opt(m.sensitivity),
            fmt_opt(m.specificity),
            m.f1
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_spec_parses_ranges_and_single_values() {
        let g: GridSpec = "0.1:0.1:2.0".parse().unwrap();
        assert_eq!(g.0.len(), 20);
        assert!((g.0[0] - 0.1).abs() < 1e-12);
        assert!((g.0[19] - 2.0).abs() < 1e-9);
        let single: GridSpec = "0.5".parse().unwrap();
        assert_eq!(single.0, vec![0.5]);
        assert!("1:0:2".parse::<GridSpec>().is_err());
        assert!("2:0.1:1".parse::<GridSpec>().is_err());
        assert!("a:b".parse::<GridSpec>().is_err());
    }

    #[test]
    fn dims_parser() {
        assert_eq!(parse_dims("200x100").unwrap(), (200, 100));
        assert_eq!(parse_dims("16X8").unwrap(), (16, 8));
        assert!(parse_dims("200").is_err());
        assert!(parse_dims("axb").is_err());
    }

    #[test]
    fn cli_help_smoke() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn every_config_field_is_listed_in_help_with_default() {
        use clap::CommandFactory;
        let mut cmd = Cli::command();
        for sub in ["gen", "calibrate", "compare", "classify", "crossmatrix"] {
            let help = cmd
                .find_subcommand_mut(sub)
                .unwrap()
                .render_long_help()
                .to_string();
            for flag in [
                "--epsilon",
                "--theta",
                "--alphabet-size",
                "--word-length-divisor",
                "--min-peak-height",
                "--sax-table-semantics",
                "--paa-dist-scaled",
                "--znormalize",
                "--threads",
            ] {
                assert!(help.contains(flag), "{sub} help is missing {flag}");
            }
            for default in ["[default: 0.5]", "[default: 96]", "[default: 10]", "[default: 8]"] {
                assert!(help.contains(default), "{sub} help is missing {default}");
            }
        }
    }
}
