use super::fsa::{SignatureHit, SignatureKind, SourcePlane};
use super::{Stage, StageResult, Verdict};
use crate::error::{Error, Result};
use crate::util::{csv_field, csv_split};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FinalVerdict {
    Clean,
    StegoDetected,
}

impl FinalVerdict {
    pub fn name(self) -> &'static str {
        match self {
            FinalVerdict::Clean => "clean",
            FinalVerdict::StegoDetected => "stego_detected",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "clean" => Some(FinalVerdict::Clean),
            "stego_detected" => Some(FinalVerdict::StegoDetected),
            _ => None,
        }
    }
}

/// Per-file outcome of the staged pipeline.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionReport {
    /// File name relative to the scanned directory. Reports never embed
    /// absolute paths or timestamps, so identical scans serialize
    /// byte-identically.
    pub file: String,
    pub format: super::pipeline::FileFormat,
    pub stages: Vec<StageResult>,
    pub signature_hits: Vec<SignatureHit>,
    pub final_verdict: FinalVerdict,
    pub confidence: f64,
    pub hash_mismatch: bool,
    pub mac_anomaly: bool,
}

impl DetectionReport {
    pub fn stage(&self, stage: Stage) -> Option<&StageResult> {
        self.stages.iter().find(|s| s.stage == stage)
    }

    pub fn is_detected(&self) -> bool {
        self.final_verdict == FinalVerdict::StegoDetected
    }

    /// Human-readable structured report, one file per scan target.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("file: {}\n", self.file));
        out.push_str(&format!("format: {}\n", self.format.name()));
        out.push_str(&format!("final_verdict: {}\n", self.final_verdict.name()));
        out.push_str(&format!("confidence: {:.6}\n", self.confidence));
        out.push_str(&format!("hash_mismatch: {}\n", self.hash_mismatch));
        out.push_str(&format!("mac_anomaly: {}\n", self.mac_anomaly));
        out.push_str("stages:\n");
        for s in &self.stages {
            match s.score {
                Some(score) => out.push_str(&format!(
                    "  {}: {} (score {:.6})\n",
                    s.stage.name(),
                    s.verdict.name(),
                    score
                )),
                None => out.push_str(&format!("  {}: {}\n", s.stage.name(), s.verdict.name())),
            }
            for d in &s.detail {
                out.push_str(&format!("    - {d}\n"));
            }
        }
        out.push_str(&format!("signature_hits: {}\n", self.signature_hits.len()));
        for h in &self.signature_hits {
            out.push_str(&format!(
                "  {} at {} offset {} (sig {} bytes)\n",
                h.kind.name(),
                h.plane.name(),
                h.offset,
                h.sig_len
            ));
        }
        out
    }

    pub fn csv_header() -> &'static str {
        "file,format,final_verdict,confidence,hash_mismatch,mac_anomaly,stage_verdicts,stage_scores,signature_hits"
    }

    /// One machine-readable line per file, consumed by the evaluator and the
    /// extraction pass.
    pub fn to_csv_row(&self) -> String {
        let verdicts = self
            .stages
            .iter()
            .map(|s| format!("{}={}", s.stage.name(), s.verdict.name()))
            .collect::<Vec<_>>()
            .join(";");
        let scores = self
            .stages
            .iter()
            .filter_map(|s| s.score.map(|v| format!("{}={:.6}", s.stage.name(), v)))
            .collect::<Vec<_>>()
            .join(";");
        let hits = self
            .signature_hits
            .iter()
            .map(|h| format!("{}:{}:{}:{}", h.plane.name(), h.offset, h.kind.name(), h.sig_len))
            .collect::<Vec<_>>()
            .join(";");
        format!(
            "{},{},{},{:.6},{},{},{},{},{}",
            csv_field(&self.file),
            self.format.name(),
            self.final_verdict.name(),
            self.confidence,
            self.hash_mismatch,
            self.mac_anomaly,
            csv_field(&verdicts),
            csv_field(&scores),
            csv_field(&hits)
        )
    }

    /// Rebuilds a report from its CSV line. Stage detail text does not
    /// survive the round trip; verdicts, scores and hits do.
    pub fn from_csv_row(line: &str) -> Result<Self> {
        let fields = csv_split(line);
        if fields.len() != 9 {
            return Err(Error::InvalidInput(format!(
                "report row has {} fields, expected 9",
                fields.len()
            )));
        }
        let format = super::pipeline::FileFormat::from_name(&fields[1])
            .ok_or_else(|| Error::InvalidInput(format!("bad format {:?}", fields[1])))?;
        let final_verdict = FinalVerdict::from_name(&fields[2])
            .ok_or_else(|| Error::InvalidInput(format!("bad verdict {:?}", fields[2])))?;
        let confidence: f64 = fields[3]
            .parse()
            .map_err(|_| Error::InvalidInput(format!("bad confidence {:?}", fields[3])))?;
        let parse_bool = |s: &str| -> Result<bool> {
            match s {
                "true" => Ok(true),
                "false" => Ok(false),
                other => Err(Error::InvalidInput(format!("bad boolean {other:?}"))),
            }
        };

        let mut scores = std::collections::HashMap::new();
        for part in fields[7].split(';').filter(|p| !p.is_empty()) {
            let (name, value) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("bad score entry {part:?}")))?;
            scores.insert(
                name.to_string(),
                value
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidInput(format!("bad score {value:?}")))?,
            );
        }

        let mut stages = Vec::new();
        for part in fields[6].split(';').filter(|p| !p.is_empty()) {
            let (name, verdict) = part
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("bad stage entry {part:?}")))?;
            let stage = Stage::from_name(name)
                .ok_or_else(|| Error::InvalidInput(format!("bad stage {name:?}")))?;
            let verdict = Verdict::from_name(verdict)
                .ok_or_else(|| Error::InvalidInput(format!("bad stage verdict {verdict:?}")))?;
            stages.push(StageResult {
                stage,
                score: scores.get(name).copied(),
                verdict,
                detail: Vec::new(),
            });
        }

        let mut signature_hits = Vec::new();
        for part in fields[8].split(';').filter(|p| !p.is_empty()) {
            let bits: Vec<&str> = part.split(':').collect();
            if bits.len() != 4 {
                return Err(Error::InvalidInput(format!("bad hit entry {part:?}")));
            }
            signature_hits.push(SignatureHit {
                plane: SourcePlane::from_name(bits[0])
                    .ok_or_else(|| Error::InvalidInput(format!("bad plane {:?}", bits[0])))?,
                offset: bits[1]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad offset {:?}", bits[1])))?,
                kind: SignatureKind::from_name(bits[2]),
                sig_len: bits[3]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad sig len {:?}", bits[3])))?,
            });
        }

        Ok(DetectionReport {
            file: fields[0].clone(),
            format,
            stages,
            signature_hits,
            final_verdict,
            confidence,
            hash_mismatch: parse_bool(&fields[4])?,
            mac_anomaly: parse_bool(&fields[5])?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::pipeline::FileFormat;
    use super::*;

    fn sample_report() -> DetectionReport {
        DetectionReport {
            file: "wav_0001_0010s.wav".into(),
            format: FileFormat::Wav,
            stages: vec![
                StageResult::not_run(Stage::Hash, "no reference database"),
                StageResult {
                    stage: Stage::Saf,
                    score: Some(0.0125),
                    verdict: Verdict::Clean,
                    detail: vec!["windows=100".into()],
                },
                StageResult {
                    stage: Stage::Fsa,
                    score: Some(1.0),
                    verdict: Verdict::Positive,
                    detail: vec![],
                },
            ],
            signature_hits: vec![SignatureHit {
                offset: 0,
                kind: SignatureKind::Framed,
                plane: SourcePlane::LsbPlane,
                sig_len: 4,
            }],
            final_verdict: FinalVerdict::StegoDetected,
            confidence: 1.0,
            hash_mismatch: false,
            mac_anomaly: false,
        }
    }

    #[test]
    fn csv_round_trip_preserves_everything_but_detail() {
        let report = sample_report();
        let row = report.to_csv_row();
        let back = DetectionReport::from_csv_row(&row).unwrap();
        assert_eq!(back.file, report.file);
        assert_eq!(back.format, report.format);
        assert_eq!(back.final_verdict, report.final_verdict);
        assert_eq!(back.confidence, report.confidence);
        assert_eq!(back.signature_hits, report.signature_hits);
        assert_eq!(back.stages.len(), report.stages.len());
        for (a, b) in back.stages.iter().zip(&report.stages) {
            assert_eq!(a.stage, b.stage);
            assert_eq!(a.verdict, b.verdict);
            assert_eq!(a.score, b.score);
        }
    }

    #[test]
    fn text_report_mentions_stages_and_hits() {
        let text = sample_report().to_text();
        assert!(text.contains("final_verdict: stego_detected"));
        assert!(text.contains("SAF: clean (score 0.012500)"));
        assert!(text.contains("framed at lsb_plane offset 0"));
    }
}
