use super::{EOCD_FIXED_LEN, EOCD_SIG, LOCAL_HEADER_SIG};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryCompression {
    Stored,
    Deflate,
    Other(u16),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryEncryption {
    None,
    ZipCrypto,
    /// AES or another strong scheme; not crackable here.
    Unsupported,
}

/// One central-directory entry with the derived data locations.
#[derive(Debug, Clone)]
pub struct ZipEntry {
    pub name: String,
    pub compression: EntryCompression,
    pub encryption: EntryEncryption,
    pub crc32: u32,
    pub compressed_len: usize,
    pub uncompressed_len: usize,
    /// Offset of the member payload (after the local header, including any
    /// 12-byte encryption header).
    pub data_offset: usize,
}

#[derive(Debug, Clone)]
pub struct ZipArchive {
    pub entries: Vec<ZipEntry>,
    pub comment_len: usize,
    /// Total archive length implied by the EOCD record.
    pub total_len: usize,
}

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Locates the EOCD record by scanning backward from the end, tolerating a
/// trailing comment.
fn find_eocd(bytes: &[u8]) -> Option<usize> {
    if bytes.len() < EOCD_FIXED_LEN {
        return None;
    }
    let start = bytes.len() - EOCD_FIXED_LEN;
    let lowest = start.saturating_sub(u16::MAX as usize);
    for at in (lowest..=start).rev() {
        if bytes[at..at + 4] == EOCD_SIG {
            let comment_len = read_u16(bytes, at + 20) as usize;
            if at + EOCD_FIXED_LEN + comment_len == bytes.len() {
                return Some(at);
            }
        }
    }
    None
}

/// Parses the central directory of an archive image.
pub fn parse_zip(bytes: &[u8]) -> Result<ZipArchive> {
    let eocd = find_eocd(bytes)
        .ok_or_else(|| Error::MalformedContainer("no end-of-central-directory record".into()))?;
    let entry_count = read_u16(bytes, eocd + 10) as usize;
    let cd_size = read_u32(bytes, eocd + 12) as usize;
    let cd_offset = read_u32(bytes, eocd + 16) as usize;
    let comment_len = read_u16(bytes, eocd + 20) as usize;
    if cd_offset + cd_size > bytes.len() {
        return Err(Error::MalformedContainer(
            "central directory overruns archive".into(),
        ));
    }

    let mut entries = Vec::with_capacity(entry_count);
    let mut pos = cd_offset;
    for _ in 0..entry_count {
        if pos + 46 > bytes.len() || bytes[pos..pos + 4] != super::CENTRAL_HEADER_SIG {
            return Err(Error::MalformedContainer(format!(
                "bad central directory header at {pos}"
            )));
        }
        let flags = read_u16(bytes, pos + 8);
        let method = read_u16(bytes, pos + 10);
        let crc = read_u32(bytes, pos + 16);
        let compressed_len = read_u32(bytes, pos + 20) as usize;
        let uncompressed_len = read_u32(bytes, pos + 24) as usize;
        let name_len = read_u16(bytes, pos + 28) as usize;
        let extra_len = read_u16(bytes, pos + 30) as usize;
        let comment = read_u16(bytes, pos + 32) as usize;
        let local_offset = read_u32(bytes, pos + 42) as usize;
        if pos + 46 + name_len > bytes.len() {
            return Err(Error::MalformedContainer("truncated entry name".into()));
        }
        let name = String::from_utf8_lossy(&bytes[pos + 46..pos + 46 + name_len]).into_owned();

        // Resolve the data offset through the local header (its name/extra
        // lengths may differ from the central copy).
        if local_offset + 30 > bytes.len() || bytes[local_offset..local_offset + 4] != LOCAL_HEADER_SIG {
            return Err(Error::MalformedContainer(format!(
                "bad local header for {name:?} at {local_offset}"
            )));
        }
        let l_name = read_u16(bytes, local_offset + 26) as usize;
        let l_extra = read_u16(bytes, local_offset + 28) as usize;
        let data_offset = local_offset + 30 + l_name + l_extra;
        if data_offset + compressed_len > bytes.len() {
            return Err(Error::MalformedContainer(format!(
                "member data for {name:?} overruns archive"
            )));
        }

        let encryption = if flags & 0x0001 == 0 {
            EntryEncryption::None
        } else if method == 99 || has_aes_extra(&bytes[pos + 46 + name_len..pos + 46 + name_len + extra_len]) {
            EntryEncryption::Unsupported
        } else if flags & 0x0040 != 0 {
            // Strong encryption flag.
            EntryEncryption::Unsupported
        } else {
            EntryEncryption::ZipCrypto
        };

        entries.push(ZipEntry {
            name,
            compression: match method {
                0 => EntryCompression::Stored,
                8 => EntryCompression::Deflate,
                99 => EntryCompression::Other(99),
                other => EntryCompression::Other(other),
            },
            encryption,
            crc32: crc,
            compressed_len,
            uncompressed_len,
            data_offset,
        });
        pos += 46 + name_len + extra_len + comment;
    }

    Ok(ZipArchive {
        entries,
        comment_len,
        total_len: eocd + EOCD_FIXED_LEN + comment_len,
    })
}

fn has_aes_extra(extra: &[u8]) -> bool {
    let mut pos = 0;
    while pos + 4 <= extra.len() {
        let id = read_u16(extra, pos);
        let len = read_u16(extra, pos + 2) as usize;
        if id == 0x9901 {
            return true;
        }
        pos += 4 + len;
    }
    false
}

#[cfg(test)]
mod tests {
    use super::super::writer::{write_zip, ZipEntrySpec};
    use super::*;
    use crate::util::Rng;

    #[test]
    fn reads_back_written_archive() {
        let mut rng = Rng::new(2);
        let bytes = write_zip(
            &[
                ZipEntrySpec::stored("one.txt", b"first member".to_vec()),
                ZipEntrySpec::encrypted("two.bin", vec![9u8; 100], "secret"),
            ],
            b"trailing comment",
            &mut rng,
        );
        let zip = parse_zip(&bytes).unwrap();
        assert_eq!(zip.entries.len(), 2);
        assert_eq!(zip.entries[0].name, "one.txt");
        assert_eq!(zip.entries[0].encryption, EntryEncryption::None);
        assert_eq!(zip.entries[0].compressed_len, 12);
        assert_eq!(zip.entries[1].encryption, EntryEncryption::ZipCrypto);
        assert_eq!(zip.entries[1].compressed_len, 112);
        assert_eq!(zip.comment_len, 16);
        assert_eq!(zip.total_len, bytes.len());
        let data = &bytes[zip.entries[0].data_offset..zip.entries[0].data_offset + 12];
        assert_eq!(data, b"first member");
    }

    #[test]
    fn deflate_members_round_trip() {
        let mut rng = Rng::new(3);
        let body = b"compressible compressible compressible compressible".to_vec();
        let bytes = write_zip(
            &[ZipEntrySpec {
                name: "c.txt".into(),
                data: body.clone(),
                deflate: true,
                password: None,
            }],
            b"",
            &mut rng,
        );
        let zip = parse_zip(&bytes).unwrap();
        let e = &zip.entries[0];
        assert_eq!(e.compression, EntryCompression::Deflate);
        assert!(e.compressed_len < body.len());
        let raw = &bytes[e.data_offset..e.data_offset + e.compressed_len];
        let inflated = miniz_oxide::inflate::decompress_to_vec(raw).unwrap();
        assert_eq!(inflated, body);
    }

    #[test]
    fn eocd_missing_is_malformed() {
        assert!(parse_zip(b"PK\x03\x04 not a real archive").is_err());
    }

    #[test]
    fn aes_extra_field_marks_unsupported() {
        let mut rng = Rng::new(4);
        let mut bytes = write_zip(
            &[ZipEntrySpec::encrypted("a.bin", vec![1u8; 32], "pw")],
            b"",
            &mut rng,
        );
        // Patch the central-directory method to 99 (AES).
        let zip = parse_zip(&bytes).unwrap();
        assert_eq!(zip.entries[0].encryption, EntryEncryption::ZipCrypto);
        let cd_at = bytes
            .windows(4)
            .rposition(|w| w == super::super::CENTRAL_HEADER_SIG)
            .unwrap();
        bytes[cd_at + 10..cd_at + 12].copy_from_slice(&99u16.to_le_bytes());
        let zip = parse_zip(&bytes).unwrap();
        assert_eq!(zip.entries[0].encryption, EntryEncryption::Unsupported);
    }
}
