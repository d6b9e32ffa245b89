use crate::detect::{SignatureHit, SignatureKind};
use crate::stego::framed_total_len;
use crate::zip::{EOCD_FIXED_LEN, EOCD_SIG};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarveResult {
    pub bytes: Vec<u8>,
    /// Set when no structural end boundary was found and the carve fell back
    /// to the end of the stream.
    pub truncated: bool,
}

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// ZIP boundary: the end of the EOCD record, validated against its own
/// central-directory size/offset fields so a stored nested archive or a
/// random signature collision cannot end the carve early.
fn zip_end(stream: &[u8]) -> Option<usize> {
    let mut at = 0;
    while at + EOCD_FIXED_LEN <= stream.len() {
        if stream[at..at + 4] == EOCD_SIG {
            let cd_size = read_u32(stream, at + 12) as usize;
            let cd_offset = read_u32(stream, at + 16) as usize;
            let comment_len = read_u16(stream, at + 20) as usize;
            let end = at + EOCD_FIXED_LEN + comment_len;
            if cd_offset + cd_size == at && end <= stream.len() {
                return Some(end);
            }
        }
        at += 1;
    }
    None
}

/// PNG boundary: walk chunks from the signature through IEND plus its CRC.
fn png_end(stream: &[u8]) -> Option<usize> {
    if stream.len() < 8 {
        return None;
    }
    let mut at = 8;
    loop {
        if at + 8 > stream.len() {
            return None;
        }
        let len = u32::from_be_bytes(stream[at..at + 4].try_into().unwrap()) as usize;
        let kind = &stream[at + 4..at + 8];
        let end = at.checked_add(8 + len + 4)?;
        if end > stream.len() {
            return None;
        }
        if kind == b"IEND" {
            return Some(end);
        }
        at = end;
    }
}

/// 7z boundary: the 32-byte start header declares the next-header location.
fn sevenz_end(stream: &[u8]) -> Option<usize> {
    if stream.len() < 32 {
        return None;
    }
    let next_offset = u64::from_le_bytes(stream[12..20].try_into().unwrap()) as usize;
    let next_size = u64::from_le_bytes(stream[20..28].try_into().unwrap()) as usize;
    let end = 32usize.checked_add(next_offset)?.checked_add(next_size)?;
    (end <= stream.len()).then_some(end)
}

/// Carves the hit's object out of its stream.
///
/// Boundary rules by type: ZIP (and docx) end at the validated EOCD record;
/// PNG at IEND + CRC; 7z at the declared next-header end; framed payloads at
/// their length field. Types without a structural end fall back to the end
/// of the stream with the `truncated` flag set.
pub fn carve(hit: &SignatureHit, stream: &[u8]) -> CarveResult {
    let tail = &stream[hit.offset..];
    let end = match hit.kind {
        SignatureKind::Zip => zip_end(tail),
        SignatureKind::Png => png_end(tail),
        SignatureKind::SevenZ => sevenz_end(tail),
        SignatureKind::Framed => framed_total_len(tail).ok(),
        _ => None,
    };
    match end {
        Some(end) => CarveResult {
            bytes: tail[..end].to_vec(),
            truncated: false,
        },
        None => CarveResult {
            bytes: tail.to_vec(),
            truncated: true,
        },
    }
}
