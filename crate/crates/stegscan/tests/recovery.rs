//! End-to-end recovery: pipeline hits carved back into the exact payload
//! bytes that were embedded, across planes, formats and payload types.

use stegscan::audio::{encode_wav, parse_mp3};
use stegscan::corpus::{
    build_wordlist_entries, generate_payload, synthesize_carrier, synthesize_mp3_carrier,
    CarrierKind, CorpusConfig, PayloadType,
};
use stegscan::detect::{run_pipeline, PipelineConfig, SignatureTable, SourcePlane};
use stegscan::recover::{extract_all, Wordlist};
use stegscan::stego::{embed_mp3_meta, embed_wav_lsb, EmbedMode, EmbedPlan, Mp3Location};
use std::fs;
use std::path::{Path, PathBuf};

fn work_dir(tag: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(tag);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn defaults() -> (SignatureTable, PipelineConfig, CorpusConfig) {
    (
        SignatureTable::default(),
        PipelineConfig::default(),
        CorpusConfig::default(),
    )
}

#[test]
fn wav_png_payload_recovers_bit_exactly() {
    let dir = work_dir("rec-wav-png");
    let (table, pipe, corpus) = defaults();
    let carrier = synthesize_carrier(CarrierKind::ShapedNoise, 3.0, &corpus, 41).unwrap();
    let payload = generate_payload(PayloadType::Png, 2048, 42, &[], EmbedMode::Framed).unwrap();
    let stego = embed_wav_lsb(&carrier, &payload.spec, &EmbedPlan::default()).unwrap();
    let path = dir.join("carrier.wav");
    fs::write(&path, encode_wav(&stego)).unwrap();

    let report = run_pipeline(&path, None, None, &table, &pipe).unwrap();
    assert!(report.is_detected());
    let outcome = extract_all(&report, &path, &dir, &table, None).unwrap();
    assert_eq!(outcome.artifacts.len(), 1);
    let artifact = &outcome.artifacts[0];
    assert_eq!(artifact.plane, SourcePlane::LsbPlane);
    assert_eq!(artifact.type_name, "png");
    let recovered = fs::read(&artifact.output_path).unwrap();
    assert_eq!(recovered, payload.spec.data);
}

#[test]
fn mp3_payloads_in_both_planes_recover() {
    let dir = work_dir("rec-mp3-both");
    let (table, pipe, corpus) = defaults();
    let carrier = synthesize_mp3_carrier(4.0, &corpus).unwrap();
    let stream = parse_mp3(&carrier).unwrap();
    let pad_payload = generate_payload(PayloadType::Txt, 600, 50, &[], EmbedMode::Framed).unwrap();
    let once = embed_mp3_meta(&stream, &pad_payload.spec, Mp3Location::Id3Padding).unwrap();
    let stream = parse_mp3(&once).unwrap();
    let tail_payload = generate_payload(PayloadType::Zip, 900, 51, &[], EmbedMode::Framed).unwrap();
    let twice = embed_mp3_meta(&stream, &tail_payload.spec, Mp3Location::TrailingAppend).unwrap();
    let path = dir.join("carrier.mp3");
    fs::write(&path, &twice).unwrap();

    let report = run_pipeline(&path, None, None, &table, &pipe).unwrap();
    assert!(report.is_detected());
    let outcome = extract_all(&report, &path, &dir, &table, None).unwrap();
    let mut planes: Vec<SourcePlane> = outcome.artifacts.iter().map(|a| a.plane).collect();
    planes.dedup();
    assert_eq!(outcome.artifacts.len(), 2, "{:?}", outcome.notes);
    assert!(planes.contains(&SourcePlane::Id3Padding));
    assert!(planes.contains(&SourcePlane::Trailing));
    for artifact in &outcome.artifacts {
        let recovered = fs::read(&artifact.output_path).unwrap();
        let want = match artifact.plane {
            SourcePlane::Id3Padding => &pad_payload.spec.data,
            SourcePlane::Trailing => &tail_payload.spec.data,
            other => panic!("unexpected plane {other:?}"),
        };
        assert_eq!(&recovered, want);
    }
}

#[test]
fn raw_mode_zip_is_carved_by_its_own_magic() {
    let dir = work_dir("rec-raw-zip");
    let (table, pipe, corpus) = defaults();
    let carrier = synthesize_carrier(CarrierKind::ShapedNoise, 3.0, &corpus, 43).unwrap();
    let payload = generate_payload(PayloadType::Zip, 1500, 44, &[], EmbedMode::Raw).unwrap();
    let stego = embed_wav_lsb(&carrier, &payload.spec, &EmbedPlan::default()).unwrap();
    let path = dir.join("carrier.wav");
    fs::write(&path, encode_wav(&stego)).unwrap();

    let report = run_pipeline(&path, None, None, &table, &pipe).unwrap();
    assert!(report.is_detected());
    let outcome = extract_all(&report, &path, &dir, &table, None).unwrap();
    assert_eq!(outcome.artifacts.len(), 1);
    // Raw mode: the EOCD rule must carve the archive to its exact length.
    let recovered = fs::read(&outcome.artifacts[0].output_path).unwrap();
    assert_eq!(recovered, payload.spec.data);
    assert!(!outcome.artifacts[0].truncated);
}

#[test]
fn encrypted_zip_payload_is_cracked_with_wordlist() {
    let dir = work_dir("rec-crack");
    let (table, pipe, corpus) = defaults();
    let words = build_wordlist_entries();
    let carrier = synthesize_carrier(CarrierKind::ShapedNoise, 4.0, &corpus, 45).unwrap();
    let payload =
        generate_payload(PayloadType::ZipEncrypted, 2000, 46, &words, EmbedMode::Framed).unwrap();
    let password = payload.zip_password.clone().unwrap();
    let stego = embed_wav_lsb(&carrier, &payload.spec, &EmbedPlan::default()).unwrap();
    let path = dir.join("carrier.wav");
    fs::write(&path, encode_wav(&stego)).unwrap();

    let report = run_pipeline(&path, None, None, &table, &pipe).unwrap();
    let wordlist = Wordlist::from_entries(words);
    let outcome = extract_all(&report, &path, &dir, &table, Some(&wordlist)).unwrap();
    let zip_artifact = outcome
        .artifacts
        .iter()
        .find(|a| a.type_name == "zip")
        .expect("zip artifact");
    assert!(zip_artifact.decrypted);
    assert_eq!(zip_artifact.password.as_deref(), Some(password.as_str()));

    // The decrypted member is written beside the archive.
    let members: Vec<_> = fs::read_dir(dir.join("extracted"))
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().contains("data_0.bin"))
        .collect();
    assert_eq!(members.len(), 1);

    // Without a wordlist the archive extracts but stays encrypted.
    let dir2 = work_dir("rec-nocrack");
    let outcome = extract_all(&report, &path, &dir2, &table, None).unwrap();
    let zip_artifact = outcome.artifacts.iter().find(|a| a.type_name == "zip").unwrap();
    assert!(!zip_artifact.decrypted);
    assert!(outcome
        .notes
        .iter()
        .any(|n| n.contains("no wordlist supplied")));
}

#[test]
fn clean_file_forced_extraction_is_empty() {
    let dir = work_dir("rec-clean");
    let (table, pipe, corpus) = defaults();
    let carrier = synthesize_carrier(CarrierKind::ShapedNoise, 2.0, &corpus, 47).unwrap();
    let path = dir.join("clean.wav");
    fs::write(&path, encode_wav(&carrier)).unwrap();
    let report = run_pipeline(&path, None, None, &table, &pipe).unwrap();
    assert!(!report.is_detected());
    let outcome = extract_all(&report, &path, &dir, &table, None).unwrap();
    assert!(outcome.artifacts.is_empty());
}

#[test]
fn originals_survive_scan_and_extract_untouched() {
    let dir = work_dir("rec-originals");
    let corpus_dir = dir.join("original");
    let cfg = CorpusConfig {
        total_files: 4,
        min_duration_s: 2.0,
        max_duration_s: 4.0,
        seed: 48,
        ..CorpusConfig::default()
    };
    stegscan::corpus::generate_corpus(&cfg, &corpus_dir).unwrap();
    let digest_tree = |dir: &Path| -> Vec<(String, String)> {
        let mut rows: Vec<(String, String)> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .filter(|p| p.is_file())
            .map(|p| {
                let bytes = fs::read(&p).unwrap();
                (
                    p.file_name().unwrap().to_string_lossy().into_owned(),
                    stegscan::util::to_hex(&stegscan::integrity::sha256(&bytes)),
                )
            })
            .collect();
        rows.sort();
        rows
    };
    let before = digest_tree(&corpus_dir);

    let out = dir.join("run");
    let table = SignatureTable::default();
    stegscan::workflow::scan_directory(
        &corpus_dir,
        &out,
        None,
        &table,
        &PipelineConfig::default(),
    )
    .unwrap();
    stegscan::workflow::extract_from_scan(&out, None, &table, false).unwrap();

    assert_eq!(digest_tree(&corpus_dir), before);
}
