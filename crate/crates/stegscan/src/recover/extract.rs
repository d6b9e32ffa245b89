use super::bruteforce::{zip_brute_force, Wordlist};
use super::carve::carve;
use super::identify::{identify_type, IdentifiedType};
use crate::detect::{
    scan_planes, DetectionReport, SignatureHit, SignatureKind, SignatureTable, SourcePlane,
};
use crate::error::{Error, Result};
use crate::integrity::sha256;
use crate::stego::deframe_payload;
use crate::util::{csv_field, csv_split, to_hex};
use std::fs;
use std::path::{Path, PathBuf};

/// One recovered object, written under the extraction folder.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractedArtifact {
    pub source_file: String,
    pub plane: SourcePlane,
    pub carve_offset: usize,
    pub type_name: String,
    pub length: usize,
    pub output_path: PathBuf,
    pub decrypted: bool,
    pub password: Option<String>,
    pub sha256: String,
    pub truncated: bool,
}

#[derive(Debug, Clone, Default)]
pub struct ExtractionOutcome {
    pub artifacts: Vec<ExtractedArtifact>,
    /// Per-artifact anomalies (CRC mismatches, skipped duplicates); recovery
    /// continues past them.
    pub notes: Vec<String>,
}

/// Raw-bytes hits that merely restate a hit on a dedicated MP3 plane are
/// redundant for extraction (the raw image contains those regions too).
fn covered_by_dedicated_plane(
    hit: &SignatureHit,
    planes: &[(SourcePlane, Vec<u8>)],
    raw: &[u8],
) -> bool {
    if hit.plane != SourcePlane::RawBytes {
        return false;
    }
    for (plane, bytes) in planes {
        if *plane == SourcePlane::RawBytes || bytes.is_empty() {
            continue;
        }
        // Locate the dedicated plane inside the raw image.
        if let Some(at) = raw
            .windows(bytes.len().min(raw.len()))
            .position(|w| w == &bytes[..])
        {
            if hit.offset >= at && hit.offset < at + bytes.len() {
                return true;
            }
        }
    }
    false
}

fn artifact_file_name(source: &str, hit: &SignatureHit, ext: &str) -> String {
    let stem = Path::new(source)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| source.to_string());
    format!("{stem}_{}_{}.{ext}", hit.plane.name(), hit.offset)
}

/// Carves and writes every hit of a positive report.
///
/// Operates on the working copy only: the carrier at `carrier_file` is read,
/// never written. Framed payloads are deframed and CRC-checked. A wordlist
/// arms the ZipCrypto dictionary attack for encrypted ZIP artifacts. Output
/// names follow `<source-stem>_<plane>_<offset>.<ext>`.
pub fn extract_all(
    report: &DetectionReport,
    carrier_file: &Path,
    out_dir: &Path,
    table: &SignatureTable,
    wordlist: Option<&Wordlist>,
) -> Result<ExtractionOutcome> {
    extract_all_into(report, carrier_file, &out_dir.join("extracted"), table, wordlist)
}

/// [`extract_all`] writing artifacts into an explicit directory.
pub fn extract_all_into(
    report: &DetectionReport,
    carrier_file: &Path,
    extracted_dir: &Path,
    table: &SignatureTable,
    wordlist: Option<&Wordlist>,
) -> Result<ExtractionOutcome> {
    let bytes = fs::read(carrier_file).map_err(|e| Error::io(carrier_file, e))?;
    let planes = scan_planes(report.format, &bytes)?;
    fs::create_dir_all(extracted_dir).map_err(|e| Error::io(extracted_dir, e))?;

    let mut outcome = ExtractionOutcome::default();
    // (plane, body span) regions already claimed by a deframed payload.
    let mut claimed: Vec<(SourcePlane, std::ops::Range<usize>)> = Vec::new();

    let mut hits = report.signature_hits.clone();
    hits.sort_by_key(|h| (h.plane, h.offset));
    for hit in &hits {
        if crate::detect::is_self_hit(report.format, hit) {
            continue;
        }
        if covered_by_dedicated_plane(hit, &planes, &bytes) {
            outcome.notes.push(format!(
                "skipped raw_bytes hit at {} ({}): covered by a dedicated plane",
                hit.offset,
                hit.kind.name()
            ));
            continue;
        }
        if claimed
            .iter()
            .any(|(plane, span)| *plane == hit.plane && span.contains(&hit.offset))
        {
            outcome.notes.push(format!(
                "skipped {} hit at {}:{}: inside an already-recovered frame body",
                hit.kind.name(),
                hit.plane.name(),
                hit.offset
            ));
            continue;
        }
        let Some((_, stream)) = planes.iter().find(|(p, _)| *p == hit.plane) else {
            continue;
        };

        let carved = carve(hit, stream);
        let (artifact_bytes, type_name, ext, mut truncated) = if hit.kind == SignatureKind::Framed {
            match deframe_payload(&carved.bytes) {
                Ok(payload) => {
                    claimed.push((hit.plane, hit.offset..hit.offset + carved.bytes.len()));
                    // The frame records the payload's declared type.
                    let ext = payload.declared_type.extension();
                    (payload.data, payload.declared_type.name().to_string(), ext, false)
                }
                Err(e) => {
                    outcome.notes.push(format!(
                        "frame at {}:{} failed validation ({e}); kept raw carve",
                        hit.plane.name(),
                        hit.offset
                    ));
                    (carved.bytes, "framed".to_string(), "bin", carved.truncated)
                }
            }
        } else {
            let identified = identify_type(&carved.bytes, table);
            let type_name = if identified == IdentifiedType::Unknown {
                hit.kind.name().to_string()
            } else {
                identified.name().to_string()
            };
            let ext = if identified == IdentifiedType::Unknown {
                hit.kind.extension()
            } else {
                identified.extension()
            };
            (carved.bytes, type_name, ext, carved.truncated)
        };

        let file_name = artifact_file_name(&report.file, hit, ext);
        let output_path = extracted_dir.join(&file_name);
        fs::write(&output_path, &artifact_bytes).map_err(|e| Error::io(&output_path, e))?;

        let mut decrypted = false;
        let mut password = None;
        if type_name == "zip" || type_name == "docx" {
            match (wordlist, crate::zip::parse_zip(&artifact_bytes)) {
                (Some(wl), Ok(archive))
                    if archive
                        .entries
                        .iter()
                        .any(|e| e.encryption == crate::zip::EntryEncryption::ZipCrypto) =>
                {
                    match zip_brute_force(&artifact_bytes, wl, usize::MAX) {
                        Ok(crack) => {
                            let member_name =
                                format!("{}_{}", file_name.trim_end_matches(".zip"), sanitize(&crack.member_name));
                            let member_path = extracted_dir.join(&member_name);
                            fs::write(&member_path, &crack.data)
                                .map_err(|e| Error::io(&member_path, e))?;
                            outcome.notes.push(format!(
                                "decrypted member {:?} of {file_name} after {} attempts",
                                crack.member_name, crack.attempts
                            ));
                            decrypted = true;
                            password = Some(crack.password);
                        }
                        Err(Error::Exhausted { attempts }) => {
                            outcome.notes.push(format!(
                                "wordlist exhausted after {attempts} attempts on {file_name}"
                            ));
                        }
                        Err(Error::UnsupportedEncryption(why)) => {
                            outcome.notes.push(format!("{file_name}: {why}"));
                        }
                        Err(e) => return Err(e),
                    }
                }
                (None, Ok(archive))
                    if archive
                        .entries
                        .iter()
                        .any(|e| e.encryption != crate::zip::EntryEncryption::None) =>
                {
                    outcome.notes.push(format!(
                        "{file_name} holds encrypted members; no wordlist supplied, not decrypted"
                    ));
                }
                (_, Err(_)) => {
                    truncated = true;
                    outcome
                        .notes
                        .push(format!("{file_name} does not parse as a complete archive"));
                }
                _ => {}
            }
        }

        outcome.artifacts.push(ExtractedArtifact {
            source_file: report.file.clone(),
            plane: hit.plane,
            carve_offset: hit.offset,
            type_name,
            length: artifact_bytes.len(),
            output_path,
            decrypted,
            password,
            sha256: to_hex(&sha256(&artifact_bytes)),
            truncated,
        });
    }

    Ok(outcome)
}

pub const EXTRACTION_LOG_HEADER: &str =
    "source,plane,offset,type,length,sha256,decrypted,password_present";

/// Appends artifacts as CSV rows (header written once by the caller).
pub fn write_extraction_log(path: &Path, artifacts: &[ExtractedArtifact]) -> Result<()> {
    let mut out = String::new();
    out.push_str(EXTRACTION_LOG_HEADER);
    out.push('\n');
    for a in artifacts {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            csv_field(&a.source_file),
            a.plane.name(),
            a.carve_offset,
            a.type_name,
            a.length,
            a.sha256,
            a.decrypted,
            a.password.is_some()
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Reads back an extraction log written by [`write_extraction_log`].
pub fn read_extraction_log(path: &Path) -> Result<Vec<ExtractedArtifact>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if i == 0 || line.is_empty() {
            continue;
        }
        let fields = csv_split(line);
        if fields.len() != 8 {
            return Err(Error::InvalidInput(format!(
                "extraction log line {} has {} fields",
                i + 1,
                fields.len()
            )));
        }
        rows.push(ExtractedArtifact {
            source_file: fields[0].clone(),
            plane: SourcePlane::from_name(&fields[1])
                .ok_or_else(|| Error::InvalidInput(format!("bad plane {:?}", fields[1])))?,
            carve_offset: fields[2]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad offset {:?}", fields[2])))?,
            type_name: fields[3].clone(),
            length: fields[4]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad length {:?}", fields[4])))?,
            output_path: PathBuf::new(),
            decrypted: fields[6] == "true",
            password: None,
            sha256: fields[5].clone(),
            truncated: false,
        });
    }
    Ok(rows)
}

fn sanitize(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' || c == '_' { c } else { '_' })
        .collect()
}
