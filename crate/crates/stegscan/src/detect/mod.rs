//! The staged detection pipeline: statistical analysis (SAF), spectrogram
//! analysis, file-signature analysis (FSA) with LSB examination, forensic
//! content analysis (FCA), plus hash-comparison and MAC-timestamp flags.

mod fca;
mod fsa;
mod gamma;
mod mac;
mod pipeline;
mod report;
mod saf;
mod spectro;

pub use fca::fca_quality;
pub use fsa::{fsa_scan, SignatureEntry, SignatureHit, SignatureKind, SignatureTable, SourcePlane};
pub use gamma::{chi_square_sf, gamma_p, gamma_q, ln_gamma};
pub use mac::{mac_anomaly_check, FileTimes};
pub use pipeline::{is_self_hit, run_pipeline, scan_planes, FileFormat};
pub use report::{DetectionReport, FinalVerdict};
pub use saf::{pov_chi_square, saf_statistics, window_stats, WindowStats};
pub use spectro::{compute_spectrogram, compute_spectrogram_windowed, spectro_anomaly, Spectrogram, WindowShape};

use crate::error::{Error, Result};

/// Pipeline stages, in report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Stage {
    Hash,
    Saf,
    Spectro,
    Fsa,
    Fca,
    Mac,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Hash => "HASH",
            Stage::Saf => "SAF",
            Stage::Spectro => "SPECTRO",
            Stage::Fsa => "FSA",
            Stage::Fca => "FCA",
            Stage::Mac => "MAC",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name.to_ascii_uppercase().as_str() {
            "HASH" => Some(Stage::Hash),
            "SAF" => Some(Stage::Saf),
            "SPECTRO" => Some(Stage::Spectro),
            "FSA" => Some(Stage::Fsa),
            "FCA" => Some(Stage::Fca),
            "MAC" => Some(Stage::Mac),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Clean,
    Suspicious,
    Positive,
    NotRun,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Clean => "clean",
            Verdict::Suspicious => "suspicious",
            Verdict::Positive => "positive",
            Verdict::NotRun => "not_run",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "clean" => Some(Verdict::Clean),
            "suspicious" => Some(Verdict::Suspicious),
            "positive" => Some(Verdict::Positive),
            "not_run" => Some(Verdict::NotRun),
            _ => None,
        }
    }
}

/// Outcome of one pipeline stage. `score` is absent exactly when the stage
/// did not run; higher scores are more suspicious.
#[derive(Debug, Clone, PartialEq)]
pub struct StageResult {
    pub stage: Stage,
    pub score: Option<f64>,
    pub verdict: Verdict,
    pub detail: Vec<String>,
}

impl StageResult {
    pub fn not_run(stage: Stage, why: &str) -> Self {
        StageResult {
            stage,
            score: None,
            verdict: Verdict::NotRun,
            detail: vec![why.to_string()],
        }
    }

    pub fn is_positive(&self) -> bool {
        self.verdict == Verdict::Positive
    }
}

/// Calibration constants for every stage, exposed so runs can document the
/// exact thresholds they used.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    /// Non-overlapping SAF window, in samples.
    pub saf_window: usize,
    /// A window counts as embedding-like when its chi-square tail
    /// probability exceeds this.
    pub saf_p_threshold: f64,
    /// Weight of the embedding-like window fraction in the SAF score.
    pub saf_chi_weight: f64,
    /// Weight of the LSB-entropy deviation in the SAF score.
    pub saf_entropy_weight: f64,
    /// Upper edge of the clean-carrier LSB entropy band, bits per sample.
    pub saf_entropy_clean_max: f64,

    /// Stage score at or above which a verdict is positive.
    pub positive_threshold: f64,
    /// Stage score at or above which a verdict is suspicious.
    pub suspicious_threshold: f64,

    /// Spectrogram window and hop, in samples.
    pub spectro_window: usize,
    pub spectro_hop: usize,
    /// Upper edge of the clean spectral-flatness calibration band for the
    /// top-quartile bins (no-baseline mode).
    pub spectro_flatness_clean_max: f64,
    /// Log10 magnitude difference that maps to a baseline-mode score of 1.
    pub spectro_log_diff_full_scale: f64,

    /// SNR at or below which FCA scores 1.0 (certain alteration).
    pub fca_snr_floor_db: f64,
    /// SNR at or above which FCA scores 0.0 (no audible alteration).
    pub fca_snr_ceiling_db: f64,

    /// Clock skew tolerated before a future timestamp counts as an anomaly.
    pub mac_skew_seconds: u64,

    /// Signatures shorter than this are reported but too weak to make the
    /// FSA verdict positive on their own.
    pub fsa_strong_min_len: usize,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            saf_window: 4096,
            saf_p_threshold: 0.95,
            saf_chi_weight: 0.7,
            saf_entropy_weight: 0.3,
            saf_entropy_clean_max: 0.6,
            positive_threshold: 0.5,
            suspicious_threshold: 0.2,
            spectro_window: 1024,
            spectro_hop: 512,
            spectro_flatness_clean_max: 0.9,
            spectro_log_diff_full_scale: 1.0,
            fca_snr_floor_db: 40.0,
            fca_snr_ceiling_db: 90.0,
            mac_skew_seconds: 2,
            fsa_strong_min_len: 4,
        }
    }
}

impl PipelineConfig {
    /// Maps a score to a verdict using the shared stage thresholds.
    pub fn verdict_for(&self, score: f64) -> Verdict {
        if score >= self.positive_threshold {
            Verdict::Positive
        } else if score >= self.suspicious_threshold {
            Verdict::Suspicious
        } else {
            Verdict::Clean
        }
    }

    /// Applies a `--threshold name=value` style override.
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        match name {
            "saf_window" => self.saf_window = value as usize,
            "saf_p" => self.saf_p_threshold = value,
            "saf_entropy_clean_max" => self.saf_entropy_clean_max = value,
            "positive" => self.positive_threshold = value,
            "suspicious" => self.suspicious_threshold = value,
            "spectro_flatness_clean_max" => self.spectro_flatness_clean_max = value,
            "fca_snr_floor" => self.fca_snr_floor_db = value,
            "fca_snr_ceiling" => self.fca_snr_ceiling_db = value,
            "fsa_strong_min_len" => self.fsa_strong_min_len = value as usize,
            other => {
                return Err(Error::InvalidInput(format!(
                    "unknown threshold {other:?} (known: saf_window, saf_p, \
                     saf_entropy_clean_max, positive, suspicious, \
                     spectro_flatness_clean_max, fca_snr_floor, fca_snr_ceiling, \
                     fsa_strong_min_len)"
                )))
            }
        }
        Ok(())
    }

    /// One-line rendering of the full threshold set, recorded in reports.
    pub fn summary(&self) -> String {
        format!(
            "saf_window={} saf_p={} chi_w={} ent_w={} ent_max={} pos={} susp={} \
             spec_win={} spec_hop={} flat_max={} logdiff_fs={} snr_floor={} snr_ceil={} \
             mac_skew={} strong_sig={}",
            self.saf_window,
            self.saf_p_threshold,
            self.saf_chi_weight,
            self.saf_entropy_weight,
            self.saf_entropy_clean_max,
            self.positive_threshold,
            self.suspicious_threshold,
            self.spectro_window,
            self.spectro_hop,
            self.spectro_flatness_clean_max,
            self.spectro_log_diff_full_scale,
            self.fca_snr_floor_db,
            self.fca_snr_ceiling_db,
            self.mac_skew_seconds,
            self.fsa_strong_min_len
        )
    }
}
