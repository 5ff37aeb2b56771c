//! Run configuration: built-in defaults, optionally overlaid by a JSON
//! config file, overlaid in turn by command-line flags.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::classify::{MethodId, ScoreParams};
use crate::error::{Error, Result};
use crate::quantize::{make_alphabet, TableSemantics};
use crate::similarity::Epsilon;

/// Fully resolved run configuration. Reports embed it for reproducibility;
/// `threads` is excluded from serialization because it never affects
/// results, only wall-clock time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub method: MethodId,
    pub epsilon: f64,
    /// Classification threshold, percent.
    pub theta: f64,
    pub alphabet_size: usize,
    /// Per-column word length is `M / word_length_divisor`.
    pub word_length_divisor: usize,
    pub min_peak_height: f64,
    pub sax_table_semantics: TableSemantics,
    pub paa_dist_scaled: bool,
    pub znormalize: bool,
    #[serde(skip_serializing, default = "default_threads")]
    pub threads: usize,
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1)
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            method: MethodId::Qptm,
            epsilon: 0.5,
            theta: 96.0,
            alphabet_size: 10,
            word_length_divisor: 8,
            min_peak_height: 0.0,
            sax_table_semantics: TableSemantics::Squared,
            paa_dist_scaled: false,
            znormalize: true,
            threads: default_threads(),
        }
    }
}

/// Partial configuration as read from a JSON file; any subset of fields.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub method: Option<MethodId>,
    pub epsilon: Option<f64>,
    pub theta: Option<f64>,
    pub alphabet_size: Option<usize>,
    pub word_length_divisor: Option<usize>,
    pub min_peak_height: Option<f64>,
    pub sax_table_semantics: Option<TableSemantics>,
    pub paa_dist_scaled: Option<bool>,
    pub znormalize: Option<bool>,
    pub threads: Option<usize>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })
    }
}

impl RunConfig {
    /// Overlays a config file onto the defaults.
    pub fn with_file(mut self, file: &ConfigFile) -> Self {
        macro_rules! take {
            ($($f:ident),*) => { $( if let Some(v) = file.$f { self.$f = v; } )* };
        }
        take!(
            method,
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
        self
    }

    pub fn validate(&self) -> Result<()> {
        Epsilon::new(self.epsilon)?;
        if !(self.theta.is_finite() && (0.0..=100.0).contains(&self.theta)) {
            return Err(Error::InvalidArgument(format!(
                "theta must be a percent in [0, 100], got {}",
                self.theta
            )));
        }
        if self.word_length_divisor == 0 {
            return Err(Error::InvalidArgument(
                "word length divisor must be positive".into(),
            ));
        }
        if !(self.min_peak_height >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "min peak height must be >= 0, got {}",
                self.min_peak_height
            )));
        }
        if self.threads == 0 {
            return Err(Error::InvalidArgument("threads must be positive".into()));
        }
        make_alphabet(self.alphabet_size)?;
        Ok(())
    }

    /// Resolves the per-column scoring parameters for images with `m_rows`
    /// rows.
    pub fn score_params(&self, m_rows: usize) -> Result<ScoreParams> {
        self.validate()?;
        let windows = (m_rows / self.word_length_divisor).clamp(1, m_rows);
        Ok(ScoreParams {
            epsilon: Epsilon::new(self.epsilon)?,
            windows,
            alphabet: make_alphabet(self.alphabet_size)?,
            min_peak_height: self.min_peak_height,
            table_semantics: self.sax_table_semantics,
            paa_dist_scaled: self.paa_dist_scaled,
            znormalize: self.znormalize,
        })
    }
}
