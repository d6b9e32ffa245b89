use super::PayloadSpec;
use crate::audio::Mp3Stream;
use crate::error::{Error, Result};

/// Container region that receives an MP3 payload.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mp3Location {
    /// Overwrite the zero padding inside the ID3v2 tag. Bounded by the
    /// padding run; leaves the file length unchanged.
    Id3Padding,
    /// Append after the last MPEG frame (and before any ID3v1 tag).
    TrailingAppend,
}

impl Mp3Location {
    pub fn name(self) -> &'static str {
        match self {
            Mp3Location::Id3Padding => "id3_padding",
            Mp3Location::TrailingAppend => "trailing_append",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "id3_padding" => Some(Mp3Location::Id3Padding),
            "trailing_append" => Some(Mp3Location::TrailingAppend),
            _ => None,
        }
    }
}

/// Writes a payload into an MP3 container region, returning the full file
/// bytes. Frame bytes are never touched, so the stream stays playable.
pub fn embed_mp3_meta(
    stream: &Mp3Stream,
    payload: &PayloadSpec,
    location: Mp3Location,
) -> Result<Vec<u8>> {
    let serialized = payload.serialized();
    match location {
        Mp3Location::Id3Padding => {
            let tag = stream.id3v2.as_ref().ok_or(Error::NoId3Tag)?;
            if serialized.len() > tag.padding_span.len {
                return Err(Error::CapacityExceeded {
                    needed: serialized.len() as u64 * 8,
                    available: tag.padding_span.len as u64 * 8,
                });
            }
            let mut out = stream.raw_bytes.clone();
            let at = tag.padding_span.offset;
            out[at..at + serialized.len()].copy_from_slice(&serialized);
            Ok(out)
        }
        Mp3Location::TrailingAppend => {
            let insert_at = stream.id3v1.map_or(stream.raw_bytes.len(), |s| s.offset);
            let mut out = Vec::with_capacity(stream.raw_bytes.len() + serialized.len());
            out.extend_from_slice(&stream.raw_bytes[..insert_at]);
            out.extend_from_slice(&serialized);
            out.extend_from_slice(&stream.raw_bytes[insert_at..]);
            Ok(out)
        }
    }
}
