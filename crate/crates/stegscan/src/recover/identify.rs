use crate::detect::{SignatureKind, SignatureTable};
use crate::zip::LOCAL_HEADER_SIG;

/// Resolved file type of a recovered byte stream. Extends the raw signature
/// families with the DOCX refinement (a ZIP whose leading entry marks an
/// Office document).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IdentifiedType {
    Zip,
    Docx,
    Png,
    SevenZ,
    Pdf,
    Gzip,
    Rar,
    RiffWav,
    Framed,
    Unknown,
}

impl IdentifiedType {
    pub fn name(self) -> &'static str {
        match self {
            IdentifiedType::Zip => "zip",
            IdentifiedType::Docx => "docx",
            IdentifiedType::Png => "png",
            IdentifiedType::SevenZ => "sevenz",
            IdentifiedType::Pdf => "pdf",
            IdentifiedType::Gzip => "gzip",
            IdentifiedType::Rar => "rar",
            IdentifiedType::RiffWav => "riff_wav",
            IdentifiedType::Framed => "framed",
            IdentifiedType::Unknown => "unknown",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            IdentifiedType::Zip => "zip",
            IdentifiedType::Docx => "docx",
            IdentifiedType::Png => "png",
            IdentifiedType::SevenZ => "7z",
            IdentifiedType::Pdf => "pdf",
            IdentifiedType::Gzip => "gz",
            IdentifiedType::Rar => "rar",
            IdentifiedType::RiffWav => "wav",
            IdentifiedType::Framed => "bin",
            IdentifiedType::Unknown => "bin",
        }
    }

    fn from_kind(kind: SignatureKind) -> Self {
        match kind {
            SignatureKind::Zip => IdentifiedType::Zip,
            SignatureKind::Png => IdentifiedType::Png,
            SignatureKind::SevenZ => IdentifiedType::SevenZ,
            SignatureKind::Pdf => IdentifiedType::Pdf,
            SignatureKind::Gzip => IdentifiedType::Gzip,
            SignatureKind::Rar => IdentifiedType::Rar,
            SignatureKind::RiffWav => IdentifiedType::RiffWav,
            SignatureKind::Framed => IdentifiedType::Framed,
            SignatureKind::Unknown => IdentifiedType::Unknown,
        }
    }
}

/// First local-file-header name of a ZIP image, if readable.
fn first_zip_entry_name(bytes: &[u8]) -> Option<String> {
    if bytes.len() < 30 || bytes[0..4] != LOCAL_HEADER_SIG {
        return None;
    }
    let name_len = u16::from_le_bytes([bytes[26], bytes[27]]) as usize;
    if 30 + name_len > bytes.len() {
        return None;
    }
    Some(String::from_utf8_lossy(&bytes[30..30 + name_len]).into_owned())
}

/// Identifies a byte stream by longest-prefix match against the signature
/// table, independent of any file extension. A ZIP whose first entry name
/// begins with `[Content_Types].xml` or contains `word/` is reported as DOCX.
pub fn identify_type(bytes: &[u8], table: &SignatureTable) -> IdentifiedType {
    let mut best: Option<(usize, SignatureKind)> = None;
    for entry in table.entries() {
        if bytes.starts_with(&entry.bytes) {
            let better = match best {
                None => true,
                Some((len, _)) => entry.bytes.len() > len,
            };
            if better {
                best = Some((entry.bytes.len(), entry.kind));
            }
        }
    }
    let Some((_, kind)) = best else {
        return IdentifiedType::Unknown;
    };
    if kind == SignatureKind::Zip {
        if let Some(name) = first_zip_entry_name(bytes) {
            if name.starts_with("[Content_Types].xml") || name.contains("word/") {
                return IdentifiedType::Docx;
            }
        }
    }
    IdentifiedType::from_kind(kind)
}
