//! Forensic Content Analysis: suspect-versus-reference signal comparison.
//! Perceptual alteration is summarized as an SNR in decibels.

use super::{PipelineConfig, Stage, StageResult};
use crate::audio::PcmAudio;
use crate::error::{Error, Result};

/// Compares a suspect signal against its reference.
///
/// SNR = 10 log10(sum(ref^2) / sum((ref - suspect)^2)) dB, mapped linearly to
/// a score of 1 at the configured floor and 0 at the ceiling. Identical
/// signals report infinite SNR and score 0.
pub fn fca_quality(suspect: &PcmAudio, reference: &PcmAudio, cfg: &PipelineConfig) -> Result<StageResult> {
    if suspect.sample_rate() != reference.sample_rate()
        || suspect.channels() != reference.channels()
        || suspect.len() != reference.len()
    {
        return Err(Error::ShapeMismatch(format!(
            "suspect {}ch/{}Hz/{} samples vs reference {}ch/{}Hz/{} samples",
            suspect.channels(),
            suspect.sample_rate(),
            suspect.len(),
            reference.channels(),
            reference.sample_rate(),
            reference.len()
        )));
    }

    let mut signal = 0f64;
    let mut noise = 0f64;
    for (&r, &s) in reference.samples().iter().zip(suspect.samples()) {
        let r = r as f64;
        let d = r - s as f64;
        signal += r * r;
        noise += d * d;
    }

    let (snr_db, score, label) = if noise == 0.0 {
        (f64::INFINITY, 0.0, "identical signals".to_string())
    } else if signal == 0.0 {
        (f64::NEG_INFINITY, 1.0, "reference is silence".to_string())
    } else {
        let snr = 10.0 * (signal / noise).log10();
        let score = ((cfg.fca_snr_ceiling_db - snr)
            / (cfg.fca_snr_ceiling_db - cfg.fca_snr_floor_db))
            .clamp(0.0, 1.0);
        (snr, score, format!("snr_db={snr:.2}"))
    };

    Ok(StageResult {
        stage: Stage::Fca,
        score: Some(score),
        // FCA evidence is corroborative: any measurable score is at most
        // suspicious, never positive on its own.
        verdict: if score >= cfg.suspicious_threshold {
            super::Verdict::Suspicious
        } else {
            super::Verdict::Clean
        },
        detail: vec![
            label,
            format!(
                "anchors: snr<={} -> 1.0, snr>={} -> 0.0",
                cfg.fca_snr_floor_db, cfg.fca_snr_ceiling_db
            ),
            format!("snr_db_value={snr_db}"),
        ],
    })
}
