use super::{EmbedMode, PayloadKind, PayloadSpec};
use crate::error::{Error, Result};
use crate::util::crc32;

/// Magic prefix of the framed payload wire format.
pub const FRAME_MAGIC: &[u8; 4] = b"SGH1";

/// Bytes added around the payload body: magic(4) + type(1) + length(8) + crc(4).
pub const FRAME_OVERHEAD: usize = 17;

/// Serializes a payload as `"SGH1" | type_code | u64-LE length | body | u32-LE CRC-32`.
pub fn frame_payload(payload: &PayloadSpec) -> Vec<u8> {
    let mut out = Vec::with_capacity(FRAME_OVERHEAD + payload.data.len());
    out.extend_from_slice(FRAME_MAGIC);
    out.push(payload.declared_type.type_code());
    out.extend_from_slice(&(payload.data.len() as u64).to_le_bytes());
    out.extend_from_slice(&payload.data);
    out.extend_from_slice(&crc32(&payload.data).to_le_bytes());
    out
}

/// Total frame length declared by a frame starting at `bytes[0]`, without
/// validating the CRC. Used to carve frame boundaries out of longer streams.
pub fn framed_total_len(bytes: &[u8]) -> Result<usize> {
    if bytes.len() < 4 || &bytes[0..4] != FRAME_MAGIC {
        return Err(Error::BadMagic);
    }
    if bytes.len() < 13 {
        return Err(Error::TruncatedFrame);
    }
    let len = u64::from_le_bytes(bytes[5..13].try_into().unwrap());
    let total = (len as usize)
        .checked_add(FRAME_OVERHEAD)
        .ok_or(Error::TruncatedFrame)?;
    if total > bytes.len() {
        return Err(Error::TruncatedFrame);
    }
    Ok(total)
}

/// Parses and validates a framed payload: magic, length bound, CRC-32.
pub fn deframe_payload(bytes: &[u8]) -> Result<PayloadSpec> {
    let total = framed_total_len(bytes)?;
    let body = &bytes[13..total - 4];
    let stored = u32::from_le_bytes(bytes[total - 4..total].try_into().unwrap());
    let computed = crc32(body);
    if stored != computed {
        return Err(Error::CrcMismatch { stored, computed });
    }
    Ok(PayloadSpec {
        data: body.to_vec(),
        declared_type: PayloadKind::from_type_code(bytes[4]),
        mode: EmbedMode::Framed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn txt(data: &[u8]) -> PayloadSpec {
        PayloadSpec::new(data.to_vec(), PayloadKind::Txt, EmbedMode::Framed).unwrap()
    }

    #[test]
    fn empty_body_frame_is_17_bytes_with_zero_crc() {
        // Constructed directly since PayloadSpec forbids empty data.
        let spec = PayloadSpec {
            data: Vec::new(),
            declared_type: PayloadKind::Txt,
            mode: EmbedMode::Framed,
        };
        let framed = frame_payload(&spec);
        assert_eq!(framed.len(), 17);
        assert_eq!(&framed[5..13], &0u64.to_le_bytes());
        // CRC-32 of the empty input is zero.
        assert_eq!(&framed[13..17], &[0, 0, 0, 0]);
    }

    #[test]
    fn round_trip() {
        let spec = txt(b"the hidden message");
        let back = deframe_payload(&frame_payload(&spec)).unwrap();
        assert_eq!(back.data, spec.data);
        assert_eq!(back.declared_type, PayloadKind::Txt);
    }

    #[test]
    fn corrupt_body_byte_fails_crc() {
        let mut framed = frame_payload(&txt(b"payload bytes"));
        framed[15] ^= 0x01;
        assert!(matches!(
            deframe_payload(&framed),
            Err(Error::CrcMismatch { .. })
        ));
    }

    #[test]
    fn bad_magic_and_truncation() {
        assert!(matches!(deframe_payload(b"NOPE"), Err(Error::BadMagic)));
        let framed = frame_payload(&txt(b"abc"));
        assert!(matches!(
            deframe_payload(&framed[..framed.len() - 1]),
            Err(Error::TruncatedFrame)
        ));
        assert!(matches!(framed_total_len(b"SGH1\x00"), Err(Error::TruncatedFrame)));
    }

    #[test]
    fn trailing_garbage_is_ignored_by_length_field() {
        let mut framed = frame_payload(&txt(b"bounded"));
        let total = framed.len();
        framed.extend_from_slice(b"junk after the frame");
        assert_eq!(framed_total_len(&framed).unwrap(), total);
        assert_eq!(deframe_payload(&framed).unwrap().data, b"bounded");
    }
}
