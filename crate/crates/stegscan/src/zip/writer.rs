use super::crypto::ZipCryptoKeys;
use super::{CENTRAL_HEADER_SIG, DOS_DATE, DOS_TIME, EOCD_SIG, LOCAL_HEADER_SIG};
use crate::util::{crc32, Rng};

/// One member of an archive under construction.
#[derive(Debug, Clone)]
pub struct ZipEntrySpec {
    pub name: String,
    pub data: Vec<u8>,
    /// Deflate the member body (raw deflate, method 8) instead of storing.
    pub deflate: bool,
    /// ZipCrypto-encrypt the member with this password.
    pub password: Option<String>,
}

impl ZipEntrySpec {
    pub fn stored(name: &str, data: Vec<u8>) -> Self {
        ZipEntrySpec {
            name: name.to_string(),
            data,
            deflate: false,
            password: None,
        }
    }

    pub fn encrypted(name: &str, data: Vec<u8>, password: &str) -> Self {
        ZipEntrySpec {
            name: name.to_string(),
            data,
            deflate: false,
            password: Some(password.to_string()),
        }
    }
}

struct CentralRecord {
    name: String,
    crc: u32,
    compressed_len: u32,
    uncompressed_len: u32,
    method: u16,
    flags: u16,
    local_offset: u32,
}

/// Serializes a complete archive: local headers, member data, central
/// directory, EOCD. The `rng` seeds the random prefix of ZipCrypto
/// encryption headers, keeping output reproducible for a fixed seed.
pub fn write_zip(entries: &[ZipEntrySpec], comment: &[u8], rng: &mut Rng) -> Vec<u8> {
    let mut out = Vec::new();
    let mut central = Vec::with_capacity(entries.len());

    for spec in entries {
        let crc = crc32(&spec.data);
        let body = if spec.deflate {
            miniz_oxide::deflate::compress_to_vec(&spec.data, 6)
        } else {
            spec.data.clone()
        };
        let method: u16 = if spec.deflate { 8 } else { 0 };

        let (flags, payload): (u16, Vec<u8>) = match &spec.password {
            None => (0, body),
            Some(password) => {
                // 12-byte encryption header: 11 random bytes plus the CRC
                // high byte as the check byte, all encrypted in stream order.
                let mut keys = ZipCryptoKeys::new(password.as_bytes());
                let mut block = Vec::with_capacity(12 + body.len());
                let mut header = [0u8; 12];
                rng.fill_bytes(&mut header[..11]);
                header[11] = (crc >> 24) as u8;
                block.extend_from_slice(&header);
                block.extend_from_slice(&body);
                keys.encrypt_in_place(&mut block);
                (1, block)
            }
        };

        let local_offset = out.len() as u32;
        out.extend_from_slice(&LOCAL_HEADER_SIG);
        out.extend_from_slice(&20u16.to_le_bytes()); // version needed
        out.extend_from_slice(&flags.to_le_bytes());
        out.extend_from_slice(&method.to_le_bytes());
        out.extend_from_slice(&DOS_TIME.to_le_bytes());
        out.extend_from_slice(&DOS_DATE.to_le_bytes());
        out.extend_from_slice(&crc.to_le_bytes());
        out.extend_from_slice(&(payload.len() as u32).to_le_bytes());
        out.extend_from_slice(&(spec.data.len() as u32).to_le_bytes());
        out.extend_from_slice(&(spec.name.len() as u16).to_le_bytes());
        out.extend_from_slice(&0u16.to_le_bytes()); // extra length
        out.extend_from_slice(spec.name.as_bytes());
        out.extend_from_slice(&payload);

        central.push(CentralRecord {
            name: spec.name.clone(),
            crc,
            compressed_len: payload.len() as u32,
            uncompressed_len: spec.data.len() as u32,
            method,
            flags,
            local_offset,
        });
    }

    let cd_start = out.len() as u32;
    for rec in &central {
        out.extend_from_slice(&CENTRAL_HEADER_SIG);
        out.extend_from_slice(&20u16.to_le_bytes()); // version made by
        out.extend_from_slice(&20u16.to_le_bytes()); // version needed
        out.extend_from_slice(&rec.flags.to_le_bytes());
        out.extend_from_slice(&rec.method.to_le_bytes());
        out.extend_from_slice(&DOS_TIME.to_le_bytes());
        out.extend_from_slice(&DOS_DATE.to_le_bytes());
        out.extend_from_slice(&rec.crc.to_le_bytes());
        out.extend_from_slice(&rec.compressed_len.to_le_bytes());
        out.extend_from_slice(&rec.uncompressed_len.to_le_bytes());
        out.extend_from_slice(&(rec.name.len() as u16).to_le_bytes());
        out.extend_from_slice(&[0u8; 2 + 2 + 2 + 2]); // extra/comment lens, disk, internal attrs
        out.extend_from_slice(&0u32.to_le_bytes()); // external attrs
        out.extend_from_slice(&rec.local_offset.to_le_bytes());
        out.extend_from_slice(rec.name.as_bytes());
    }
    let cd_len = out.len() as u32 - cd_start;

    out.extend_from_slice(&EOCD_SIG);
    out.extend_from_slice(&[0u8; 4]); // disk numbers
    out.extend_from_slice(&(central.len() as u16).to_le_bytes());
    out.extend_from_slice(&(central.len() as u16).to_le_bytes());
    out.extend_from_slice(&cd_len.to_le_bytes());
    out.extend_from_slice(&cd_start.to_le_bytes());
    out.extend_from_slice(&(comment.len() as u16).to_le_bytes());
    out.extend_from_slice(comment);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eocd_arithmetic_with_empty_comment() {
        let mut rng = Rng::new(1);
        let bytes = write_zip(&[ZipEntrySpec::stored("a.txt", b"hello".to_vec())], b"", &mut rng);
        // EOCD fixed part is the last 22 bytes when the comment is empty.
        let eocd_at = bytes.len() - super::super::EOCD_FIXED_LEN;
        assert_eq!(&bytes[eocd_at..eocd_at + 4], &EOCD_SIG);
        assert!(bytes.starts_with(&LOCAL_HEADER_SIG));
    }

    #[test]
    fn deterministic_for_fixed_seed() {
        let build = || {
            let mut rng = Rng::new(42);
            write_zip(
                &[ZipEntrySpec::encrypted("s.bin", vec![7u8; 64], "pw")],
                b"",
                &mut rng,
            )
        };
        assert_eq!(build(), build());
    }
}
