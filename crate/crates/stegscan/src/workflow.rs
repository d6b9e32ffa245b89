//! Directory-level operations behind the CLI subcommands: scanning a tree of
//! carriers through the pipeline, extracting positives, and evaluating a run
//! against its manifest. Originals are never modified; all analysis happens
//! on working copies.

use crate::corpus::load_manifest;
use crate::detect::{run_pipeline, DetectionReport, PipelineConfig, SignatureTable};
use crate::error::{Error, Result};
use crate::eval::{emit_csv, evaluate, EvalSummary};
use crate::integrity::list_files;
use crate::recover::{
    extract_all_into, read_extraction_log, write_extraction_log, ExtractedArtifact, Wordlist,
};
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Folder names mirroring the evidence-handling discipline: inputs live in
/// an `original` tree, analysis runs on `original_copy`, recovered objects
/// land in `extracted`.
pub const WORKING_COPY_DIR: &str = "original_copy";
pub const EXTRACTED_DIR: &str = "extracted";
pub const REPORTS_DIR: &str = "reports";
pub const REPORTS_INDEX: &str = "reports.csv";

#[derive(Debug)]
pub struct ScanSummary {
    pub reports: Vec<DetectionReport>,
    /// Files that failed to parse, with the error text; they are logged and
    /// skipped rather than aborting the scan.
    pub failures: Vec<(String, String)>,
    pub out_dir: PathBuf,
}

impl ScanSummary {
    pub fn detected_count(&self) -> usize {
        self.reports.iter().filter(|r| r.is_detected()).count()
    }
}

/// Copies every input file into `<out>/original_copy/`, runs the pipeline on
/// the copies only, and writes one text report per file plus a CSV index.
pub fn scan_directory(
    input_dir: &Path,
    out_dir: &Path,
    db: Option<&crate::integrity::HashDb>,
    table: &SignatureTable,
    cfg: &PipelineConfig,
) -> Result<ScanSummary> {
    scan_directory_in(input_dir, out_dir, db, table, cfg, WORKING_COPY_DIR)
}

/// [`scan_directory`] with an overridden working-copy folder name.
pub fn scan_directory_in(
    input_dir: &Path,
    out_dir: &Path,
    db: Option<&crate::integrity::HashDb>,
    table: &SignatureTable,
    cfg: &PipelineConfig,
    copy_dir_name: &str,
) -> Result<ScanSummary> {
    let copies = out_dir.join(copy_dir_name);
    let reports_dir = out_dir.join(REPORTS_DIR);
    fs::create_dir_all(&copies).map_err(|e| Error::io(&copies, e))?;
    fs::create_dir_all(&reports_dir).map_err(|e| Error::io(&reports_dir, e))?;

    let mut reports = Vec::new();
    let mut failures = Vec::new();
    for source in list_files(input_dir)? {
        let name = source
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        if name == crate::corpus::MANIFEST_FILE {
            continue; // ground truth rides along with corpora; not a carrier
        }
        let copy = copies.join(&name);
        fs::copy(&source, &copy).map_err(|e| Error::io(&copy, e))?;
        match run_pipeline(&copy, db, None, table, cfg) {
            Ok(report) => {
                let report_path = reports_dir.join(format!("{name}.report.txt"));
                fs::write(&report_path, report.to_text()).map_err(|e| Error::io(&report_path, e))?;
                reports.push(report);
            }
            Err(e) => failures.push((name, e.to_string())),
        }
    }

    let mut index = String::from(DetectionReport::csv_header());
    index.push('\n');
    for r in &reports {
        index.push_str(&r.to_csv_row());
        index.push('\n');
    }
    let index_path = out_dir.join(REPORTS_INDEX);
    fs::write(&index_path, index).map_err(|e| Error::io(&index_path, e))?;

    Ok(ScanSummary {
        reports,
        failures,
        out_dir: out_dir.to_path_buf(),
    })
}

/// Loads the report index written by [`scan_directory`].
pub fn load_reports(scan_out_dir: &Path) -> Result<Vec<DetectionReport>> {
    let path = scan_out_dir.join(REPORTS_INDEX);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    let mut reports = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        reports.push(DetectionReport::from_csv_row(line)?);
    }
    Ok(reports)
}

#[derive(Debug, Default)]
pub struct ExtractRunSummary {
    pub artifacts: Vec<ExtractedArtifact>,
    pub notes: Vec<String>,
}

/// Runs extraction for every positive report of a previous scan. Artifacts
/// land in `<scan_out>/extracted/` with a CSV log beside them. A wordlist
/// arms ZipCrypto brute force ("if prompted"); without one, encrypted
/// archives are extracted but not decrypted.
pub fn extract_from_scan(
    scan_out_dir: &Path,
    wordlist: Option<&Wordlist>,
    table: &SignatureTable,
    force_all: bool,
) -> Result<ExtractRunSummary> {
    extract_from_scan_in(scan_out_dir, wordlist, table, force_all, WORKING_COPY_DIR, EXTRACTED_DIR)
}

/// [`extract_from_scan`] with overridden folder names.
pub fn extract_from_scan_in(
    scan_out_dir: &Path,
    wordlist: Option<&Wordlist>,
    table: &SignatureTable,
    force_all: bool,
    copy_dir_name: &str,
    extract_dir_name: &str,
) -> Result<ExtractRunSummary> {
    let reports = load_reports(scan_out_dir)?;
    let copies = scan_out_dir.join(copy_dir_name);
    let mut summary = ExtractRunSummary::default();
    // The extracted/ folder exists even when nothing is positive.
    let extracted_dir = scan_out_dir.join(extract_dir_name);
    fs::create_dir_all(&extracted_dir).map_err(|e| Error::io(&extracted_dir, e))?;

    for report in &reports {
        if !(report.is_detected() || force_all) {
            continue;
        }
        let carrier = copies.join(&report.file);
        let outcome = extract_all_into(report, &carrier, &extracted_dir, table, wordlist)?;
        summary.artifacts.extend(outcome.artifacts);
        summary.notes.extend(outcome.notes);
    }

    write_extraction_log(&scan_out_dir.join("extraction_log.csv"), &summary.artifacts)?;
    Ok(summary)
}

/// Scores a scan (and optional extraction) against the corpus manifest,
/// emitting the detection and FN-distribution CSVs under a run directory
/// named by the config hash.
pub fn evaluate_run(
    manifest_path: &Path,
    scan_out_dir: &Path,
    thresholds: &str,
) -> Result<(EvalSummary, PathBuf)> {
    let manifest = load_manifest(manifest_path)?;
    let reports = load_reports(scan_out_dir)?;
    let log_path = scan_out_dir.join("extraction_log.csv");
    let artifacts = if log_path.exists() {
        read_extraction_log(&log_path)?
    } else {
        Vec::new()
    };
    let timestamp = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let summary = evaluate(&manifest, &reports, &artifacts, thresholds, timestamp)?;
    let run_dir = scan_out_dir.join(format!("eval_{}", summary.run_metadata.config_hash));
    emit_csv(&summary, &run_dir)?;
    Ok((summary, run_dir))
}
