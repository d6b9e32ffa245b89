//! Scoring pipeline output against corpus ground truth: detection counts,
//! false positives and false negatives per format, and the per-duration
//! breakdowns emitted as CSV and gnuplot-ready data files.

use crate::corpus::CorpusManifest;
use crate::detect::{DetectionReport, FileFormat};
use crate::error::{Error, Result};
use crate::recover::ExtractedArtifact;
use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};

/// Default duration bucket width, seconds.
pub const BUCKET_WIDTH_S: f64 = 50.0;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct FormatCounts {
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
    pub true_negatives: usize,
    pub detected_count: usize,
    /// Detections whose extracted artifact hashed to the manifest payload.
    pub extracted_exact_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BucketRow {
    pub bucket_start_s: u64,
    pub format: FileFormat,
    pub stego_total: usize,
    pub detected_count: usize,
    pub fn_count: usize,
    /// FN / (TP + FN); absent when the bucket holds no stego entries.
    pub fn_rate: Option<f64>,
    pub extracted_exact: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetadata {
    pub config_hash: String,
    pub thresholds: String,
    /// Wall-clock seconds; recorded in the metadata file only, never in the
    /// comparable CSV outputs.
    pub timestamp: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalSummary {
    pub per_format: BTreeMap<&'static str, FormatCounts>,
    pub per_duration_bucket: Vec<BucketRow>,
    pub run_metadata: RunMetadata,
}

impl EvalSummary {
    pub fn counts(&self, format: FileFormat) -> FormatCounts {
        self.per_format.get(format.name()).copied().unwrap_or_default()
    }
}

/// Folds manifest ground truth, per-file reports and the extraction log into
/// an [`EvalSummary`]. Every manifest entry must have exactly one report.
pub fn evaluate(
    manifest: &CorpusManifest,
    reports: &[DetectionReport],
    artifacts: &[ExtractedArtifact],
    thresholds: &str,
    timestamp: u64,
) -> Result<EvalSummary> {
    let mut by_file: HashMap<&str, &DetectionReport> = HashMap::new();
    for r in reports {
        if by_file.insert(r.file.as_str(), r).is_some() {
            return Err(Error::ManifestReportMismatch(format!(
                "duplicate report for {:?}",
                r.file
            )));
        }
    }
    for e in &manifest.entries {
        if !by_file.contains_key(e.filename.as_str()) {
            return Err(Error::ManifestReportMismatch(format!(
                "no report for manifest entry {:?}",
                e.filename
            )));
        }
    }

    // An entry extracts exactly when some artifact's digest equals the
    // manifest payload digest.
    let mut exact_sources: HashMap<&str, bool> = HashMap::new();
    for e in &manifest.entries {
        if let Some(want) = &e.payload_sha256 {
            let hit = artifacts
                .iter()
                .any(|a| a.source_file == e.filename && &a.sha256 == want);
            exact_sources.insert(e.filename.as_str(), hit);
        }
    }

    let mut per_format: BTreeMap<&'static str, FormatCounts> = BTreeMap::new();
    let mut buckets: BTreeMap<(u64, &'static str), BucketRow> = BTreeMap::new();
    for e in &manifest.entries {
        let report = by_file[e.filename.as_str()];
        let detected = report.is_detected();
        let counts = per_format.entry(e.format.name()).or_default();
        let exact = exact_sources.get(e.filename.as_str()).copied().unwrap_or(false);
        match (e.is_stego, detected) {
            (true, true) => {
                counts.true_positives += 1;
                counts.detected_count += 1;
                if exact {
                    counts.extracted_exact_count += 1;
                }
            }
            (true, false) => counts.false_negatives += 1,
            (false, true) => {
                counts.false_positives += 1;
                counts.detected_count += 1;
            }
            (false, false) => counts.true_negatives += 1,
        }

        if e.is_stego {
            let start = (e.duration_s / BUCKET_WIDTH_S).floor() as u64 * BUCKET_WIDTH_S as u64;
            let row = buckets.entry((start, e.format.name())).or_insert(BucketRow {
                bucket_start_s: start,
                format: e.format,
                stego_total: 0,
                detected_count: 0,
                fn_count: 0,
                fn_rate: None,
                extracted_exact: 0,
            });
            row.stego_total += 1;
            if detected {
                row.detected_count += 1;
                if exact {
                    row.extracted_exact += 1;
                }
            } else {
                row.fn_count += 1;
            }
        }
    }

    let mut per_duration_bucket: Vec<BucketRow> = buckets.into_values().collect();
    for row in &mut per_duration_bucket {
        if row.stego_total > 0 {
            row.fn_rate = Some(row.fn_count as f64 / row.stego_total as f64);
        }
    }
    per_duration_bucket.sort_by_key(|r| (r.format.name(), r.bucket_start_s));

    Ok(EvalSummary {
        per_format,
        per_duration_bucket,
        run_metadata: RunMetadata {
            config_hash: manifest.config_hash(),
            thresholds: thresholds.to_string(),
            timestamp,
        },
    })
}

fn detection_rows(summary: &EvalSummary, format: FileFormat) -> Vec<&BucketRow> {
    summary
        .per_duration_bucket
        .iter()
        .filter(|r| r.format == format)
        .collect()
}

/// Writes `detections_wav.csv`, `detections_mp3.csv` and
/// `fn_distribution.csv` (plus gnuplot `.dat` mirrors) into `dir`.
///
/// Column order and header names are a stable interface; the `extracted`
/// column is the stricter identified-and-extracted series.
pub fn emit_csv(summary: &EvalSummary, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    for format in [FileFormat::Wav, FileFormat::Mp3] {
        let mut csv = String::from("duration_s,detected,total,extracted\n");
        let mut dat = String::from("# duration_s detected total extracted\n");
        for row in detection_rows(summary, format) {
            csv.push_str(&format!(
                "{},{},{},{}\n",
                row.bucket_start_s, row.detected_count, row.stego_total, row.extracted_exact
            ));
            dat.push_str(&format!(
                "{} {} {} {}\n",
                row.bucket_start_s, row.detected_count, row.stego_total, row.extracted_exact
            ));
        }
        for (name, body) in [
            (format!("detections_{}.csv", format.name()), csv),
            (format!("detections_{}.dat", format.name()), dat),
        ] {
            let path = dir.join(name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
    }

    let mut csv = String::from("format,bucket_start,fn_rate\n");
    let mut dat = String::from("# format bucket_start fn_rate\n");
    for row in &summary.per_duration_bucket {
        if let Some(rate) = row.fn_rate {
            csv.push_str(&format!("{},{},{rate:.6}\n", row.format.name(), row.bucket_start_s));
            dat.push_str(&format!("{} {} {rate:.6}\n", row.format.name(), row.bucket_start_s));
        }
    }
    for (name, body) in [("fn_distribution.csv", csv), ("fn_distribution.dat", dat)] {
        let path = dir.join(name);
        fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
        written.push(path);
    }

    // Aggregate counts and run parameters, outside the comparable CSVs.
    let mut meta = String::new();
    meta.push_str(&format!("config_hash={}\n", summary.run_metadata.config_hash));
    meta.push_str(&format!("thresholds={}\n", summary.run_metadata.thresholds));
    meta.push_str(&format!("timestamp={}\n", summary.run_metadata.timestamp));
    for (name, c) in &summary.per_format {
        meta.push_str(&format!(
            "{name}: tp={} fp={} fn={} tn={} detected={} extracted_exact={}\n",
            c.true_positives,
            c.false_positives,
            c.false_negatives,
            c.true_negatives,
            c.detected_count,
            c.extracted_exact_count
        ));
    }
    let path = dir.join("run_metadata.txt");
    fs::write(&path, meta).map_err(|e| Error::io(&path, e))?;
    written.push(path);

    Ok(written)
}

/// Parses a `detections_*.csv` back into (duration, detected, total,
/// extracted) rows; the inverse of [`emit_csv`] for those files.
pub fn parse_detection_csv(text: &str) -> Result<Vec<(u64, usize, usize, usize)>> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 {
            if line != "duration_s,detected,total,extracted" {
                return Err(Error::InvalidInput(format!("unexpected header {line:?}")));
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(Error::InvalidInput(format!("bad detection row {line:?}")));
        }
        let parse = |s: &str| -> Result<usize> {
            s.parse()
                .map_err(|_| Error::InvalidInput(format!("bad count {s:?}")))
        };
        rows.push((
            fields[0]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad duration {:?}", fields[0])))?,
            parse(fields[1])?,
            parse(fields[2])?,
            parse(fields[3])?,
        ));
    }
    Ok(rows)
}
