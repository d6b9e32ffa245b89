//! MAC (Modification, Access, Creation) timestamp consistency checks.
//! Ordering inconsistencies are an investigative lead, not proof.

use super::{PipelineConfig, Stage, StageResult, Verdict};
use std::path::Path;
use std::time::{Duration, SystemTime};

#[derive(Debug, Clone, Copy, Default)]
pub struct FileTimes {
    pub created: Option<SystemTime>,
    pub modified: Option<SystemTime>,
    pub accessed: Option<SystemTime>,
}

impl FileTimes {
    pub fn from_path(path: &Path) -> std::io::Result<Self> {
        let meta = std::fs::metadata(path)?;
        Ok(FileTimes {
            created: meta.created().ok(),
            modified: meta.modified().ok(),
            accessed: meta.accessed().ok(),
        })
    }
}

/// Flags timestamp orderings that cannot arise from ordinary file handling:
/// modification or access before creation, or any timestamp in the future
/// (beyond a small clock-skew tolerance). Age differences alone are fine.
pub fn mac_anomaly_check(times: &FileTimes, now: SystemTime, cfg: &PipelineConfig) -> StageResult {
    let (created, modified, accessed) = match (times.created, times.modified, times.accessed) {
        (Some(c), Some(m), Some(a)) => (c, m, a),
        _ => return StageResult::not_run(Stage::Mac, "timestamps unavailable"),
    };

    let mut anomalies = Vec::new();
    if modified < created {
        anomalies.push("modified before created".to_string());
    }
    if accessed < created {
        anomalies.push("accessed before created".to_string());
    }
    let horizon = now + Duration::from_secs(cfg.mac_skew_seconds);
    for (name, t) in [("created", created), ("modified", modified), ("accessed", accessed)] {
        if t > horizon {
            anomalies.push(format!("{name} timestamp lies in the future"));
        }
    }

    let score = if anomalies.is_empty() { 0.0 } else { 1.0 };
    let mut detail = vec![format!("skew_tolerance_s={}", cfg.mac_skew_seconds)];
    detail.extend(anomalies.iter().cloned());
    StageResult {
        stage: Stage::Mac,
        score: Some(score),
        verdict: if anomalies.is_empty() {
            Verdict::Clean
        } else {
            Verdict::Positive
        },
        detail,
    }
}
