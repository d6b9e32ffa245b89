use super::carrier::{synthesize_carrier, synthesize_mp3_carrier};
use super::payload::generate_payload;
use super::{build_wordlist_entries, CorpusConfig, CorpusManifest, ManifestEntry};
use crate::audio::{encode_wav, parse_mp3};
use crate::detect::FileFormat;
use crate::error::{Error, Result};
use crate::integrity::sha256;
use crate::stego::{embed_mp3_meta, embed_wav_lsb, EmbedPlan, Mp3Location, FRAME_OVERHEAD};
use crate::util::{csv_field, csv_split, to_hex, Rng};
use std::fs;
use std::path::Path;

pub const MANIFEST_FILE: &str = "manifest.csv";
const MANIFEST_HEADER: &str = "filename,format,duration_s,is_stego,payload_type,payload_bytes,embed_mode,embed_location,bits_per_sample,zip_password,payload_sha256";

fn entry_csv_row(e: &ManifestEntry) -> String {
    let opt = |v: &Option<String>| v.clone().unwrap_or_default();
    format!(
        "{},{},{},{},{},{},{},{},{},{},{}",
        csv_field(&e.filename),
        e.format.name(),
        e.duration_s,
        e.is_stego,
        e.payload_type.map(|t| t.name()).unwrap_or_default(),
        e.payload_bytes.map(|b| b.to_string()).unwrap_or_default(),
        e.embed_mode.map(|m| m.name()).unwrap_or_default(),
        opt(&e.embed_location),
        e.bits_per_sample.map(|b| b.to_string()).unwrap_or_default(),
        csv_field(&opt(&e.zip_password)),
        opt(&e.payload_sha256),
    )
}

fn manifest_text(manifest: &CorpusManifest) -> String {
    let mut out = String::new();
    for (k, v) in &manifest.config {
        out.push_str(&format!("# config {k}={v}\n"));
    }
    out.push_str(MANIFEST_HEADER);
    out.push('\n');
    for e in &manifest.entries {
        out.push_str(&entry_csv_row(e));
        out.push('\n');
    }
    out.push_str(&format!("# manifest_sha256={}\n", manifest.manifest_sha256));
    out
}

fn entry_block_digest(entries: &[ManifestEntry]) -> String {
    let block: String = entries.iter().map(|e| entry_csv_row(e) + "\n").collect();
    to_hex(&sha256(block.as_bytes()))
}

/// Synthesizes the corpus into `out_dir` and writes `manifest.csv`.
///
/// Durations follow the configured schedule, mirrored across the WAV and
/// MP3 halves; the clean fraction of each format is left unembedded as
/// false-positive controls. Stego payload size follows the proportionality
/// rule `payload_rate x duration`. Fully reproducible from the config seed.
pub fn generate_corpus(config: &CorpusConfig, out_dir: &Path) -> Result<CorpusManifest> {
    config.validate()?;
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let wordlist = build_wordlist_entries();
    let root_rng = Rng::new(config.seed);
    let durations = config.durations();
    let clean: std::collections::BTreeSet<usize> = config.clean_indices().into_iter().collect();

    let mut entries = Vec::with_capacity(config.total_files);
    for (fmt_idx, format) in [FileFormat::Wav, FileFormat::Mp3].into_iter().enumerate() {
        let mut stego_ordinal = 0usize;
        for (i, &duration) in durations.iter().enumerate() {
            let entry_rng = root_rng.fork((fmt_idx * durations.len() + i) as u64 + 1);
            let entry_seed = {
                let mut r = entry_rng.clone();
                r.next_u64()
            };
            let is_stego = !clean.contains(&i);
            let filename = format!("{}_{:04}_{:05}s.{}", format.name(), i + 1, duration as u64, format.name());

            let mut entry = ManifestEntry {
                filename: filename.clone(),
                format,
                duration_s: duration,
                is_stego,
                payload_type: None,
                payload_bytes: None,
                embed_mode: None,
                embed_location: None,
                bits_per_sample: None,
                zip_password: None,
                payload_sha256: None,
            };

            let payload = if is_stego {
                let mut pick_rng = entry_rng.clone();
                pick_rng.next_u64();
                let requested = (config.payload_rate * duration).round() as usize;
                let ty = config.payload_mix.pick(pick_rng.next_f64());
                let size = requested.max(ty.minimum_size());
                Some(generate_payload(ty, size, entry_seed, &wordlist, config.embed_mode)?)
            } else {
                None
            };

            let file_bytes = match format {
                FileFormat::Wav => {
                    let carrier = synthesize_carrier(config.carrier, duration, config, entry_seed)?;
                    let audio = match &payload {
                        None => carrier,
                        Some(p) => {
                            let plan = EmbedPlan {
                                bits_per_sample: config.bits_per_sample,
                                ..EmbedPlan::default()
                            };
                            entry.embed_location = Some("lsb".into());
                            entry.bits_per_sample = Some(config.bits_per_sample);
                            embed_wav_lsb(&carrier, &p.spec, &plan)?
                        }
                    };
                    encode_wav(&audio)
                }
                FileFormat::Mp3 => {
                    let carrier = synthesize_mp3_carrier(duration, config)?;
                    match &payload {
                        None => carrier,
                        Some(p) => {
                            let stream = parse_mp3(&carrier)?;
                            let serialized_len = p.spec.data.len()
                                + if config.embed_mode == crate::stego::EmbedMode::Framed {
                                    FRAME_OVERHEAD
                                } else {
                                    0
                                };
                            // Alternate the container region; fall back to
                            // trailing when the padding cannot hold it.
                            let padding_cap = stream
                                .id3v2
                                .as_ref()
                                .map(|t| t.padding_span.len)
                                .unwrap_or(0);
                            let location = if stego_ordinal.is_multiple_of(2) && serialized_len <= padding_cap
                            {
                                Mp3Location::Id3Padding
                            } else {
                                Mp3Location::TrailingAppend
                            };
                            entry.embed_location = Some(location.name().into());
                            embed_mp3_meta(&stream, &p.spec, location)?
                        }
                    }
                }
            };

            if let Some(p) = &payload {
                stego_ordinal += 1;
                entry.payload_type = Some(p.payload_type);
                entry.payload_bytes = Some(p.spec.data.len());
                entry.embed_mode = Some(config.embed_mode);
                entry.zip_password = p.zip_password.clone();
                entry.payload_sha256 = Some(to_hex(&sha256(&p.spec.data)));
            }

            let path = out_dir.join(&filename);
            fs::write(&path, &file_bytes).map_err(|e| Error::io(&path, e))?;
            entries.push(entry);
        }
    }

    let manifest = CorpusManifest {
        config: config.to_key_values(),
        manifest_sha256: entry_block_digest(&entries),
        entries,
    };
    let path = out_dir.join(MANIFEST_FILE);
    fs::write(&path, manifest_text(&manifest)).map_err(|e| Error::io(&path, e))?;
    Ok(manifest)
}

/// Reads a manifest written by [`generate_corpus`], verifying the entry
/// block digest.
pub fn load_manifest(path: &Path) -> Result<CorpusManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut config = Vec::new();
    let mut entries = Vec::new();
    let mut stated_digest = None;
    for line in text.lines() {
        if let Some(rest) = line.strip_prefix("# config ") {
            if let Some((k, v)) = rest.split_once('=') {
                config.push((k.to_string(), v.to_string()));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("# manifest_sha256=") {
            stated_digest = Some(rest.to_string());
            continue;
        }
        if line.is_empty() || line == MANIFEST_HEADER {
            continue;
        }
        let fields = csv_split(line);
        if fields.len() != 11 {
            return Err(Error::InvalidInput(format!(
                "manifest row has {} fields, expected 11",
                fields.len()
            )));
        }
        let opt = |s: &String| (!s.is_empty()).then(|| s.clone());
        entries.push(ManifestEntry {
            filename: fields[0].clone(),
            format: FileFormat::from_name(&fields[1])
                .ok_or_else(|| Error::InvalidInput(format!("bad format {:?}", fields[1])))?,
            duration_s: fields[2]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad duration {:?}", fields[2])))?,
            is_stego: fields[3] == "true",
            payload_type: opt(&fields[4])
                .map(|s| {
                    super::PayloadType::from_name(&s)
                        .ok_or_else(|| Error::InvalidInput(format!("bad payload type {s:?}")))
                })
                .transpose()?,
            payload_bytes: opt(&fields[5])
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::InvalidInput(format!("bad payload size {s:?}")))
                })
                .transpose()?,
            embed_mode: opt(&fields[6])
                .map(|s| {
                    crate::stego::EmbedMode::from_name(&s)
                        .ok_or_else(|| Error::InvalidInput(format!("bad embed mode {s:?}")))
                })
                .transpose()?,
            embed_location: opt(&fields[7]),
            bits_per_sample: opt(&fields[8])
                .map(|s| {
                    s.parse()
                        .map_err(|_| Error::InvalidInput(format!("bad bits_per_sample {s:?}")))
                })
                .transpose()?,
            zip_password: opt(&fields[9]),
            payload_sha256: opt(&fields[10]),
        });
    }

    let manifest_sha256 = entry_block_digest(&entries);
    if let Some(stated) = stated_digest {
        if stated != manifest_sha256 {
            return Err(Error::InvalidInput(format!(
                "manifest digest mismatch: stated {stated}, computed {manifest_sha256}"
            )));
        }
    }
    Ok(CorpusManifest {
        config,
        entries,
        manifest_sha256,
    })
}
