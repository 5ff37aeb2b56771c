//! Fingerprinting of 2-D peak-profile images (GC×GC chromatograms) against a
//! reference library using quantized peak topography maps.
//!
//! The pipeline: column-wise peak extraction ([`peaks`]), ratio-based peak
//! harmonization ([`similarity`]), PAA/SAX symbolic quantization
//! ([`quantize`]), and symbol-table distances, scored against a library and
//! reduced to confusion matrices and classification metrics ([`classify`]).
//! Baseline comparators (L2, 2-D correlation, 2-component PCA) live in
//! [`baselines`]; a seeded synthetic generator for end-to-end evaluation in
//! [`synth`].
//!
//! Data-parallel inner loops (batch scoring, cross-matrix rows, calibration
//! sweeps, sample rendering) run on rayon when the `parallel` feature is
//! enabled (the default) and fall back to sequential iteration otherwise.
//! Results are identical either way.

pub mod baselines;
pub mod chromatogram;
pub mod classify;
pub mod cli;
pub mod config;
pub mod error;
pub mod exec;
pub mod peaks;
pub mod quantize;
pub mod rng;
pub mod similarity;
pub mod synth;

pub use chromatogram::{Chromatogram, SourceLibrary};
pub use classify::{ConfusionMatrix2, MethodId, MetricSet, ScoreRow};
pub use error::{Error, Result};
pub use peaks::{Peak, PeakMap};
pub use quantize::{Alphabet, PaaVector, SaxWord};
pub use similarity::{CalibrationCurve, Epsilon, WeightMask};
