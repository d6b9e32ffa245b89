//! File Signature Analysis: scanning byte streams for known magic numbers.
//! Streams include raw file bytes, the reassembled LSB plane of WAV
//! carriers, and the writable container regions of MP3 streams.

use crate::error::{Error, Result};
use crate::util::from_hex;
use std::fmt;
use std::path::Path;

/// Known signature families. `Framed` is the toolkit's own length-checked
/// payload wrapper; `Unknown` covers user-added table entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SignatureKind {
    Zip,
    Png,
    SevenZ,
    Pdf,
    Gzip,
    Rar,
    RiffWav,
    Framed,
    Unknown,
}

impl SignatureKind {
    pub fn name(self) -> &'static str {
        match self {
            SignatureKind::Zip => "zip",
            SignatureKind::Png => "png",
            SignatureKind::SevenZ => "sevenz",
            SignatureKind::Pdf => "pdf",
            SignatureKind::Gzip => "gzip",
            SignatureKind::Rar => "rar",
            SignatureKind::RiffWav => "riff_wav",
            SignatureKind::Framed => "framed",
            SignatureKind::Unknown => "unknown",
        }
    }

    pub fn from_name(name: &str) -> Self {
        match name {
            "zip" => SignatureKind::Zip,
            "png" => SignatureKind::Png,
            "sevenz" | "7z" => SignatureKind::SevenZ,
            "pdf" => SignatureKind::Pdf,
            "gzip" => SignatureKind::Gzip,
            "rar" => SignatureKind::Rar,
            "riff_wav" => SignatureKind::RiffWav,
            "framed" => SignatureKind::Framed,
            _ => SignatureKind::Unknown,
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            SignatureKind::Zip => "zip",
            SignatureKind::Png => "png",
            SignatureKind::SevenZ => "7z",
            SignatureKind::Pdf => "pdf",
            SignatureKind::Gzip => "gz",
            SignatureKind::Rar => "rar",
            SignatureKind::RiffWav => "wav",
            SignatureKind::Framed => "bin",
            SignatureKind::Unknown => "bin",
        }
    }
}

impl fmt::Display for SignatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Byte stream a hit was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SourcePlane {
    RawBytes,
    LsbPlane,
    Id3Padding,
    Trailing,
}

impl SourcePlane {
    pub fn name(self) -> &'static str {
        match self {
            SourcePlane::RawBytes => "raw_bytes",
            SourcePlane::LsbPlane => "lsb_plane",
            SourcePlane::Id3Padding => "id3_padding",
            SourcePlane::Trailing => "trailing",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "raw_bytes" => Some(SourcePlane::RawBytes),
            "lsb_plane" => Some(SourcePlane::LsbPlane),
            "id3_padding" => Some(SourcePlane::Id3Padding),
            "trailing" => Some(SourcePlane::Trailing),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignatureEntry {
    pub kind: SignatureKind,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureHit {
    pub offset: usize,
    pub kind: SignatureKind,
    pub plane: SourcePlane,
    /// Matched signature length; short signatures are weaker evidence.
    pub sig_len: usize,
}

/// The expandable magic-number table. Entries can be appended from a text
/// file with one `type_id<TAB>hex-bytes` line per signature.
#[derive(Debug, Clone)]
pub struct SignatureTable {
    entries: Vec<SignatureEntry>,
}

impl Default for SignatureTable {
    fn default() -> Self {
        let mut table = SignatureTable { entries: Vec::new() };
        let defaults: [(SignatureKind, &[u8]); 8] = [
            (SignatureKind::Zip, &[0x50, 0x4B, 0x03, 0x04]),
            (SignatureKind::Png, &[0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A]),
            (SignatureKind::SevenZ, &[0x37, 0x7A, 0xBC, 0xAF, 0x27, 0x1C]),
            (SignatureKind::Pdf, b"%PDF-"),
            (SignatureKind::Gzip, &[0x1F, 0x8B, 0x08]),
            (SignatureKind::Rar, &[0x52, 0x61, 0x72, 0x21, 0x1A, 0x07]),
            (SignatureKind::RiffWav, b"RIFF"),
            (SignatureKind::Framed, b"SGH1"),
        ];
        for (kind, bytes) in defaults {
            table.entries.push(SignatureEntry {
                kind,
                bytes: bytes.to_vec(),
            });
        }
        table
    }
}

impl SignatureTable {
    pub fn entries(&self) -> &[SignatureEntry] {
        &self.entries
    }

    pub fn push(&mut self, entry: SignatureEntry) {
        self.entries.push(entry);
    }

    /// Appends entries from a signature file: one `type_id<TAB>hex-bytes`
    /// per line, `#` comments allowed.
    pub fn extend_from_text(&mut self, text: &str) -> Result<usize> {
        let mut added = 0;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (name, hex) = line.split_once('\t').ok_or_else(|| {
                Error::InvalidInput(format!("signature line {} lacks a tab separator", lineno + 1))
            })?;
            let bytes = from_hex(hex).ok_or_else(|| {
                Error::InvalidInput(format!("signature line {}: bad hex {:?}", lineno + 1, hex))
            })?;
            if bytes.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "signature line {} is empty",
                    lineno + 1
                )));
            }
            self.entries.push(SignatureEntry {
                kind: SignatureKind::from_name(name.trim()),
                bytes,
            });
            added += 1;
        }
        Ok(added)
    }

    pub fn load_file(&mut self, path: &Path) -> Result<usize> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        self.extend_from_text(&text)
    }

    pub fn lookup(&self, kind: SignatureKind) -> Option<&SignatureEntry> {
        self.entries.iter().find(|e| e.kind == kind)
    }
}

/// Scans each stream for every table signature occurrence.
///
/// Hits are returned in deterministic (plane, offset, table order). An empty
/// result is a valid "no match" outcome.
pub fn fsa_scan(streams: &[(SourcePlane, &[u8])], table: &SignatureTable) -> Vec<SignatureHit> {
    // First-byte dispatch keeps the scan a single pass per stream.
    let mut by_first: [Vec<usize>; 256] = std::array::from_fn(|_| Vec::new());
    for (i, entry) in table.entries.iter().enumerate() {
        by_first[entry.bytes[0] as usize].push(i);
    }

    let mut hits = Vec::new();
    for &(plane, bytes) in streams {
        for at in 0..bytes.len() {
            for &idx in &by_first[bytes[at] as usize] {
                let sig = &table.entries[idx].bytes;
                if bytes.len() - at >= sig.len() && bytes[at..at + sig.len()] == sig[..] {
                    hits.push(SignatureHit {
                        offset: at,
                        kind: table.entries[idx].kind,
                        plane,
                        sig_len: sig.len(),
                    });
                }
            }
        }
    }
    hits.sort_by_key(|h| (h.plane, h.offset, h.sig_len));
    hits
}
