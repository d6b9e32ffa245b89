//! Stage orchestration: hash comparison, SAF, conditional spectrogram
//! analysis, FSA (always, since extraction depends on its hits), optional
//! FCA, and the MAC timestamp flag.

use super::fca::fca_quality;
use super::fsa::{fsa_scan, SignatureHit, SignatureKind, SourcePlane};
use super::mac::{mac_anomaly_check, FileTimes};
use super::report::{DetectionReport, FinalVerdict};
use super::saf::saf_statistics;
use super::spectro::{compute_spectrogram, spectro_anomaly};
use super::{PipelineConfig, SignatureTable, Stage, StageResult, Verdict};
use crate::audio::{decode_pcm, parse_mp3, parse_wav, PcmAudio};
use crate::error::{Error, Result};
use crate::integrity::{sha256, HashDb};
use crate::stego::{extract_wav_lsb, EmbedPlan};
use crate::util::to_hex;
use std::path::Path;
use std::time::SystemTime;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FileFormat {
    Wav,
    Mp3,
}

impl FileFormat {
    pub fn name(self) -> &'static str {
        match self {
            FileFormat::Wav => "wav",
            FileFormat::Mp3 => "mp3",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "wav" => Some(FileFormat::Wav),
            "mp3" => Some(FileFormat::Mp3),
            _ => None,
        }
    }
}

/// Builds the byte streams FSA scans for a given carrier.
///
/// WAV: the raw file image plus the reassembled 1-bit LSB plane.
/// MP3: the raw image, the writable ID3 area, and the trailing bytes.
pub fn scan_planes(format: FileFormat, bytes: &[u8]) -> Result<Vec<(SourcePlane, Vec<u8>)>> {
    match format {
        FileFormat::Wav => {
            let wav = parse_wav(bytes)?;
            let audio = decode_pcm(&wav)?;
            let plane = extract_wav_lsb(&audio, &EmbedPlan::default());
            Ok(vec![
                (SourcePlane::RawBytes, bytes.to_vec()),
                (SourcePlane::LsbPlane, plane),
            ])
        }
        FileFormat::Mp3 => {
            let stream = parse_mp3(bytes)?;
            let mut planes = vec![(SourcePlane::RawBytes, bytes.to_vec())];
            if let Some(tag) = &stream.id3v2 {
                planes.push((
                    SourcePlane::Id3Padding,
                    tag.free_span.slice(bytes).to_vec(),
                ));
            }
            planes.push((SourcePlane::Trailing, stream.trailing().to_vec()));
            Ok(planes)
        }
    }
}

/// A hit on the carrier's own container signature, not evidence of hiding.
pub fn is_self_hit(format: FileFormat, hit: &SignatureHit) -> bool {
    format == FileFormat::Wav
        && hit.plane == SourcePlane::RawBytes
        && hit.offset == 0
        && hit.kind == SignatureKind::RiffWav
}

fn detect_format(bytes: &[u8]) -> Result<FileFormat> {
    if bytes.len() >= 12 && &bytes[0..4] == b"RIFF" && &bytes[8..12] == b"WAVE" {
        return Ok(FileFormat::Wav);
    }
    // Delegate the harder cases to the MP3 indexer.
    parse_mp3(bytes).map(|_| FileFormat::Mp3)
}

fn hash_stage(db: Option<&HashDb>, name: &str, bytes: &[u8]) -> StageResult {
    let Some(db) = db else {
        return StageResult::not_run(Stage::Hash, "no reference database supplied");
    };
    let Some(record) = db.get(name) else {
        return StageResult::not_run(Stage::Hash, "file not present in reference database");
    };
    let sha = to_hex(&sha256(bytes));
    let mismatch = sha != record.sha256;
    let score = if mismatch { 1.0 } else { 0.0 };
    StageResult {
        stage: Stage::Hash,
        score: Some(score),
        verdict: if mismatch { Verdict::Positive } else { Verdict::Clean },
        detail: vec![if mismatch {
            "sha256 differs from reference database record".to_string()
        } else {
            "sha256 matches reference database record".to_string()
        }],
    }
}

fn load_reference_audio(reference: Option<&Path>) -> Option<PcmAudio> {
    let path = reference?;
    let bytes = std::fs::read(path).ok()?;
    let wav = parse_wav(&bytes).ok()?;
    decode_pcm(&wav).ok()
}

/// Runs the full staged pipeline on one file.
///
/// Missing reference inputs degrade the dependent stages to `not_run`;
/// malformed carriers are an error.
pub fn run_pipeline(
    file: &Path,
    reference_db: Option<&HashDb>,
    reference_audio: Option<&Path>,
    table: &SignatureTable,
    cfg: &PipelineConfig,
) -> Result<DetectionReport> {
    let bytes = std::fs::read(file).map_err(|e| Error::io(file, e))?;
    let name = file
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_default();
    let format = detect_format(&bytes)?;

    let mut stages = Vec::with_capacity(6);

    // Stage 1: working-copy digest against the reference database.
    stages.push(hash_stage(reference_db, &name, &bytes));

    // Stage 2: statistical analysis of PCM samples.
    let audio = match format {
        FileFormat::Wav => Some(decode_pcm(&parse_wav(&bytes)?)?),
        FileFormat::Mp3 => None,
    };
    let saf = match &audio {
        None => StageResult::not_run(Stage::Saf, "statistic defined only on PCM samples"),
        Some(pcm) => match saf_statistics(pcm, cfg.saf_window, cfg) {
            Ok(result) => result,
            Err(Error::TooShort { need, got }) => StageResult::not_run(
                Stage::Saf,
                &format!("signal shorter than one window ({got} < {need})"),
            ),
            Err(e) => return Err(e),
        },
    };
    let saf_verdict = saf.verdict;
    stages.push(saf);

    // Stage 3: spectrogram analysis, only when SAF saw nothing.
    let spectro = if saf_verdict != Verdict::Clean {
        StageResult::not_run(
            Stage::Spectro,
            &format!("skipped: SAF verdict was {}", saf_verdict.name()),
        )
    } else {
        let pcm = audio.as_ref().expect("SAF clean implies PCM present");
        match compute_spectrogram(pcm, cfg.spectro_window, cfg.spectro_hop) {
            Err(Error::TooShort { need, got }) => StageResult::not_run(
                Stage::Spectro,
                &format!("signal shorter than one window ({got} < {need})"),
            ),
            Err(e) => return Err(e),
            Ok(spec) => {
                let baseline = load_reference_audio(reference_audio)
                    .and_then(|r| compute_spectrogram(&r, cfg.spectro_window, cfg.spectro_hop).ok());
                match spectro_anomaly(&spec, baseline.as_ref(), cfg) {
                    Ok(result) => result,
                    // Mismatched reference dimensions: fall back to the
                    // calibration-band mode rather than failing the scan.
                    Err(Error::ShapeMismatch(_)) => {
                        let mut r = spectro_anomaly(&spec, None, cfg)?;
                        r.detail.push("reference shape mismatched; ran without baseline".into());
                        r
                    }
                    Err(e) => return Err(e),
                }
            }
        }
    };
    stages.push(spectro);

    // Stage 4: file signature analysis over every scannable plane.
    let planes = scan_planes(format, &bytes)?;
    let plane_refs: Vec<(SourcePlane, &[u8])> =
        planes.iter().map(|(p, b)| (*p, b.as_slice())).collect();
    let signature_hits = fsa_scan(&plane_refs, table);
    let strong = signature_hits
        .iter()
        .filter(|h| !is_self_hit(format, h) && h.sig_len >= cfg.fsa_strong_min_len)
        .count();
    let weak = signature_hits
        .iter()
        .filter(|h| !is_self_hit(format, h) && h.sig_len < cfg.fsa_strong_min_len)
        .count();
    let fsa_score = if strong > 0 {
        1.0
    } else if weak > 0 {
        0.3
    } else {
        0.0
    };
    stages.push(StageResult {
        stage: Stage::Fsa,
        score: Some(fsa_score),
        verdict: cfg.verdict_for(fsa_score),
        detail: vec![
            format!("planes_scanned={}", plane_refs.len()),
            format!("hits={} strong={strong} weak={weak}", signature_hits.len()),
        ],
    });
    let fsa_positive = fsa_score >= cfg.positive_threshold;

    // Stage 5: content analysis against a reference copy, when supplied.
    let fca = match (&audio, load_reference_audio(reference_audio)) {
        (Some(suspect), Some(reference)) => match fca_quality(suspect, &reference, cfg) {
            Ok(result) => result,
            Err(Error::ShapeMismatch(why)) => {
                StageResult::not_run(Stage::Fca, &format!("reference mismatch: {why}"))
            }
            Err(e) => return Err(e),
        },
        (None, Some(_)) => StageResult::not_run(Stage::Fca, "content analysis requires PCM samples"),
        _ => StageResult::not_run(Stage::Fca, "no reference audio supplied"),
    };
    stages.push(fca);

    // Stage 6: MAC timestamp consistency.
    let mac = match FileTimes::from_path(file) {
        Ok(times) => mac_anomaly_check(&times, SystemTime::now(), cfg),
        Err(_) => StageResult::not_run(Stage::Mac, "timestamps unavailable"),
    };
    let mac_anomaly = mac.is_positive();
    stages.push(mac);

    let hash_mismatch = stages
        .iter()
        .any(|s| s.stage == Stage::Hash && s.is_positive());
    let saf_positive = stages
        .iter()
        .any(|s| s.stage == Stage::Saf && s.is_positive());
    let spectro_not_clean = stages
        .iter()
        .any(|s| s.stage == Stage::Spectro && s.verdict != Verdict::Clean);

    let detected = fsa_positive
        || (saf_positive && spectro_not_clean)
        || (hash_mismatch && saf_positive);
    let confidence = stages
        .iter()
        .filter_map(|s| s.score)
        .fold(0.0f64, f64::max);

    Ok(DetectionReport {
        file: name,
        format,
        stages,
        signature_hits,
        final_verdict: if detected {
            FinalVerdict::StegoDetected
        } else {
            FinalVerdict::Clean
        },
        confidence,
        hash_mismatch,
        mac_anomaly,
    })
}
