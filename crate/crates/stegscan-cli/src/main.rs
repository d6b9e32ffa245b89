//! Command-line front end: hash-db build/verify, corpus generation, scan,
//! extract, brute-force decryption and evaluation.
//!
//! Exit codes are a stable contract: 0 success, 1 findings (digest
//! mismatches for `hashdb verify`), 2 operational error.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use stegscan::corpus::{self, resolve_config};
use stegscan::detect::{PipelineConfig, SignatureTable};
use stegscan::integrity::{build_db, verify_against_db, FindingStatus, HashDb};
use stegscan::recover::Wordlist;
use stegscan::workflow;

#[derive(Parser)]
#[command(
    name = "stegscan",
    version,
    about = "Audio steganalysis toolkit: detect, extract and score hidden payloads in WAV and MP3 files"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build or verify the file-integrity hash database
    #[command(subcommand)]
    Hashdb(HashdbCmd),
    /// Generate a ground-truth stego corpus with a manifest
    Gen(GenArgs),
    /// Copy inputs to a working tree and run the detection pipeline
    Scan(ScanArgs),
    /// Carve and recover payloads from a scan's positive reports
    Extract(ExtractArgs),
    /// Score a scan against its corpus manifest
    Eval(EvalArgs),
}

#[derive(Subcommand)]
enum HashdbCmd {
    /// Hash every file in a directory into a new database
    Build(HashdbArgs),
    /// Compare a directory against a database, one finding per file
    Verify(HashdbArgs),
}

#[derive(Args)]
struct HashdbArgs {
    /// Directory of source files
    #[arg(long)]
    source: PathBuf,
    /// Database file path
    #[arg(long)]
    db: PathBuf,
}

#[derive(Args)]
struct GenArgs {
    /// Output directory for carriers and manifest.csv
    #[arg(long)]
    out: PathBuf,
    /// Flat key=value config file (flags below override it)
    #[arg(long)]
    config: Option<PathBuf>,
    /// Corpus seed
    #[arg(long)]
    seed: Option<u64>,
    /// Total file count (split equally between WAV and MP3)
    #[arg(long)]
    files: Option<usize>,
    #[arg(long)]
    min_duration: Option<f64>,
    #[arg(long)]
    max_duration: Option<f64>,
    /// Payload bytes per second of carrier
    #[arg(long)]
    payload_rate: Option<f64>,
    #[arg(long)]
    clean_fraction: Option<f64>,
    /// linear | geometric
    #[arg(long)]
    schedule: Option<String>,
    /// framed | raw
    #[arg(long)]
    mode: Option<String>,
    /// Large-scale preset: 320 files spanning 10-1600 s
    #[arg(long)]
    large_scale: bool,
}

#[derive(Args)]
struct ScanArgs {
    /// Directory of files to analyse (never modified)
    #[arg(long)]
    input: PathBuf,
    /// Output directory for the working copy, reports and index
    #[arg(long)]
    out: PathBuf,
    /// Optional integrity database for original-vs-copy comparison
    #[arg(long)]
    db: Option<PathBuf>,
    /// Extra signature table file (type_id<TAB>hex per line)
    #[arg(long)]
    signatures: Option<PathBuf>,
    /// Threshold overrides, e.g. --threshold positive=0.6
    #[arg(long = "threshold", value_name = "NAME=VALUE")]
    thresholds: Vec<String>,
    /// Console output per file: text | csv
    #[arg(long, default_value = "text")]
    format: String,
    /// Working-copy folder name under --out
    #[arg(long, default_value = "original_copy")]
    copy_dir: String,
}

#[derive(Args)]
struct ExtractArgs {
    /// A scan output directory (holds reports.csv and original_copy/)
    #[arg(long)]
    scan: PathBuf,
    /// Wordlist arming ZipCrypto brute force, one candidate per line
    #[arg(long)]
    wordlist: Option<PathBuf>,
    /// Extract every file, not just positive reports
    #[arg(long)]
    force: bool,
    /// Working-copy folder name under the scan directory
    #[arg(long, default_value = "original_copy")]
    copy_dir: String,
    /// Artifact folder name under the scan directory
    #[arg(long, default_value = "extracted")]
    extract_dir: String,
}

#[derive(Args)]
struct EvalArgs {
    /// Corpus manifest written by `gen`
    #[arg(long)]
    manifest: PathBuf,
    /// The scan output directory to score
    #[arg(long)]
    scan: PathBuf,
    /// Threshold overrides recorded in the run metadata
    #[arg(long = "threshold", value_name = "NAME=VALUE")]
    thresholds: Vec<String>,
}

fn pipeline_config(thresholds: &[String]) -> stegscan::Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    for spec in thresholds {
        let (name, value) = spec.split_once('=').ok_or_else(|| {
            stegscan::Error::InvalidInput(format!("--threshold expects NAME=VALUE, got {spec:?}"))
        })?;
        let value: f64 = value
            .parse()
            .map_err(|_| stegscan::Error::InvalidInput(format!("bad threshold value in {spec:?}")))?;
        cfg.set(name, value)?;
    }
    Ok(cfg)
}

fn signature_table(path: Option<&PathBuf>) -> stegscan::Result<SignatureTable> {
    let mut table = SignatureTable::default();
    if let Some(p) = path {
        let added = table.load_file(p)?;
        eprintln!("loaded {added} extra signatures from {}", p.display());
    }
    Ok(table)
}

fn cmd_hashdb(cmd: &HashdbCmd) -> stegscan::Result<u8> {
    match cmd {
        HashdbCmd::Build(args) => {
            let db = build_db(&args.source, &args.db)?;
            println!("hashed {} files into {}", db.len(), args.db.display());
            Ok(0)
        }
        HashdbCmd::Verify(args) => {
            let db = HashDb::open(&args.db)?;
            let findings = verify_against_db(&db, &args.source)?;
            let mut mismatches = 0;
            for f in &findings {
                println!("{}\t{}", f.status.name(), f.name);
                if f.status == FindingStatus::Mismatch {
                    mismatches += 1;
                }
            }
            Ok(if mismatches > 0 { 1 } else { 0 })
        }
    }
}

fn cmd_gen(args: &GenArgs) -> stegscan::Result<u8> {
    let mut overrides: Vec<(String, String)> = Vec::new();
    if args.large_scale {
        overrides.push(("total_files".into(), "320".into()));
        overrides.push(("max_duration_s".into(), "1600".into()));
    }
    let mut push = |key: &str, v: Option<String>| {
        if let Some(v) = v {
            overrides.push((key.into(), v));
        }
    };
    push("seed", args.seed.map(|v| v.to_string()));
    push("total_files", args.files.map(|v| v.to_string()));
    push("min_duration_s", args.min_duration.map(|v| v.to_string()));
    push("max_duration_s", args.max_duration.map(|v| v.to_string()));
    push("payload_rate", args.payload_rate.map(|v| v.to_string()));
    push("clean_fraction", args.clean_fraction.map(|v| v.to_string()));
    push("duration_schedule", args.schedule.clone());
    push("embed_mode", args.mode.clone());

    let config = resolve_config(args.config.as_deref(), &overrides)?;
    let manifest = corpus::generate_corpus(&config, &args.out)?;
    println!(
        "generated {} files ({} stego wav, {} stego mp3) under {}",
        manifest.entries.len(),
        manifest.stego_count(stegscan::detect::FileFormat::Wav),
        manifest.stego_count(stegscan::detect::FileFormat::Mp3),
        args.out.display()
    );
    println!("manifest sha256 {}", manifest.manifest_sha256);
    Ok(0)
}

fn cmd_scan(args: &ScanArgs) -> stegscan::Result<u8> {
    let cfg = pipeline_config(&args.thresholds)?;
    let table = signature_table(args.signatures.as_ref())?;
    let db = match &args.db {
        Some(path) => Some(HashDb::open(path)?),
        None => None,
    };
    let summary = workflow::scan_directory_in(
        &args.input,
        &args.out,
        db.as_ref(),
        &table,
        &cfg,
        &args.copy_dir,
    )?;
    for r in &summary.reports {
        match args.format.as_str() {
            "csv" => println!("{}", r.to_csv_row()),
            _ => println!(
                "{}\t{}\tconfidence {:.3}",
                r.file,
                r.final_verdict.name(),
                r.confidence
            ),
        }
    }
    for (file, why) in &summary.failures {
        eprintln!("skipped {file}: {why}");
    }
    println!(
        "scanned {} files, {} detections, {} failures",
        summary.reports.len(),
        summary.detected_count(),
        summary.failures.len()
    );
    if summary.reports.is_empty() && !summary.failures.is_empty() {
        return Err(stegscan::Error::InvalidInput(
            "every input file failed to parse".into(),
        ));
    }
    Ok(0)
}

fn cmd_extract(args: &ExtractArgs) -> stegscan::Result<u8> {
    let wordlist = match &args.wordlist {
        Some(path) => Some(Wordlist::load(path)?),
        None => None,
    };
    let table = SignatureTable::default();
    let summary = workflow::extract_from_scan_in(
        &args.scan,
        wordlist.as_ref(),
        &table,
        args.force,
        &args.copy_dir,
        &args.extract_dir,
    )?;
    for note in &summary.notes {
        eprintln!("note: {note}");
    }
    for a in &summary.artifacts {
        println!(
            "{}\t{}\t{} bytes\t{}{}",
            a.source_file,
            a.type_name,
            a.length,
            a.output_path.display(),
            if a.decrypted { "\t(decrypted)" } else { "" }
        );
    }
    println!("extracted {} artifacts", summary.artifacts.len());
    Ok(0)
}

fn cmd_eval(args: &EvalArgs) -> stegscan::Result<u8> {
    let cfg = pipeline_config(&args.thresholds)?;
    let (summary, run_dir) = workflow::evaluate_run(&args.manifest, &args.scan, &cfg.summary())?;
    for (format, c) in &summary.per_format {
        println!(
            "{format}: tp={} fp={} fn={} tn={} extracted_exact={}",
            c.true_positives,
            c.false_positives,
            c.false_negatives,
            c.true_negatives,
            c.extracted_exact_count
        );
    }
    println!("wrote evaluation files under {}", run_dir.display());
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Hashdb(cmd) => cmd_hashdb(cmd),
        Command::Gen(args) => cmd_gen(args),
        Command::Scan(args) => cmd_scan(args),
        Command::Extract(args) => cmd_extract(args),
        Command::Eval(args) => cmd_eval(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
