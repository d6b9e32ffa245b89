use super::Span;
use crate::error::{Error, Result};

/// MPEG-1 Layer III bitrates in kbps, indexed by the header's 4-bit field.
const BITRATES_V1_L3: [u32; 15] = [
    0, 32, 40, 48, 56, 64, 80, 96, 112, 128, 160, 192, 224, 256, 320,
];

const SAMPLE_RATES_V1: [u32; 3] = [44100, 48000, 32000];

/// One indexed MPEG audio frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameInfo {
    pub offset: usize,
    pub len: usize,
    pub bitrate_kbps: u32,
    pub sample_rate: u32,
    pub padding: bool,
}

/// ID3v2 tag layout. `free_span` is the writable area after the last ID3
/// frame (the scan target for injected data); `padding_span` is the run of
/// trailing zero bytes inside that area.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Id3v2Tag {
    pub version: (u8, u8),
    pub flags: u8,
    pub tag_size: usize,
    pub free_span: Span,
    pub padding_span: Span,
}

impl Id3v2Tag {
    /// Total byte length of the tag including its 10-byte header.
    pub fn total_len(&self) -> usize {
        10 + self.tag_size + if self.flags & 0x10 != 0 { 10 } else { 0 }
    }
}

/// Structural index of an MPEG-1 Layer III stream. Audio is never decoded.
#[derive(Debug, Clone)]
pub struct Mp3Stream {
    pub id3v2: Option<Id3v2Tag>,
    pub frames: Vec<FrameInfo>,
    pub trailing_span: Span,
    pub id3v1: Option<Span>,
    pub resync_skips: Vec<Span>,
    pub raw_bytes: Vec<u8>,
}

impl Mp3Stream {
    pub fn trailing(&self) -> &[u8] {
        self.trailing_span.slice(&self.raw_bytes)
    }
}

/// Decodes ID3v2's 28-bit synchsafe size (7 payload bits per byte).
pub fn synchsafe_u28(bytes: [u8; 4]) -> Result<usize> {
    if bytes.iter().any(|b| b & 0x80 != 0) {
        return Err(Error::MalformedContainer(
            "synchsafe size byte has high bit set".into(),
        ));
    }
    Ok(((bytes[0] as usize) << 21)
        | ((bytes[1] as usize) << 14)
        | ((bytes[2] as usize) << 7)
        | bytes[3] as usize)
}

pub fn encode_synchsafe_u28(value: usize) -> [u8; 4] {
    debug_assert!(value < (1 << 28));
    [
        ((value >> 21) & 0x7F) as u8,
        ((value >> 14) & 0x7F) as u8,
        ((value >> 7) & 0x7F) as u8,
        (value & 0x7F) as u8,
    ]
}

/// Parses an MPEG-1 Layer III frame header, returning the frame length.
fn parse_frame_header(bytes: &[u8], at: usize) -> Option<FrameInfo> {
    if at + 4 > bytes.len() {
        return None;
    }
    let h = &bytes[at..at + 4];
    if h[0] != 0xFF || h[1] & 0xE0 != 0xE0 {
        return None;
    }
    let version = (h[1] >> 3) & 0x03;
    let layer = (h[1] >> 1) & 0x03;
    if version != 0b11 || layer != 0b01 {
        return None; // only MPEG-1 Layer III
    }
    let bitrate_idx = (h[2] >> 4) as usize;
    if bitrate_idx == 0 || bitrate_idx > 14 {
        return None; // free-format and invalid bitrates not indexable
    }
    let rate_idx = ((h[2] >> 2) & 0x03) as usize;
    if rate_idx > 2 {
        return None;
    }
    let bitrate_kbps = BITRATES_V1_L3[bitrate_idx];
    let sample_rate = SAMPLE_RATES_V1[rate_idx];
    let padding = (h[2] >> 1) & 1 == 1;
    let len = (144 * bitrate_kbps as usize * 1000) / sample_rate as usize + padding as usize;
    Some(FrameInfo {
        offset: at,
        len,
        bitrate_kbps,
        sample_rate,
        padding,
    })
}

fn valid_id3_frame_id(id: &[u8]) -> bool {
    id.iter().all(|c| c.is_ascii_uppercase() || c.is_ascii_digit())
}

fn parse_id3v2(bytes: &[u8]) -> Result<Option<Id3v2Tag>> {
    if bytes.len() < 10 || &bytes[0..3] != b"ID3" {
        return Ok(None);
    }
    let major = bytes[3];
    let revision = bytes[4];
    if major != 3 && major != 4 {
        return Err(Error::UnsupportedFormat(format!("ID3v2.{major} tag")));
    }
    let flags = bytes[5];
    let tag_size = synchsafe_u28([bytes[6], bytes[7], bytes[8], bytes[9]])?;
    let content_end = 10 + tag_size;
    if content_end > bytes.len() {
        return Err(Error::MalformedContainer(format!(
            "ID3v2 tag size {tag_size} overruns file"
        )));
    }

    // Walk the ID3 frames to find where the free area begins.
    let mut pos = 10usize;
    if flags & 0x40 != 0 && pos + 4 <= content_end {
        // Extended header: v2.3 size excludes its own four size bytes,
        // v2.4 is synchsafe and includes the full header.
        let raw = [bytes[pos], bytes[pos + 1], bytes[pos + 2], bytes[pos + 3]];
        let ext = if major == 4 {
            synchsafe_u28(raw)?
        } else {
            u32::from_be_bytes(raw) as usize + 4
        };
        pos = (pos + ext).min(content_end);
    }
    while pos + 10 <= content_end {
        let id = &bytes[pos..pos + 4];
        if !valid_id3_frame_id(id) {
            break;
        }
        let raw = [bytes[pos + 4], bytes[pos + 5], bytes[pos + 6], bytes[pos + 7]];
        let frame_size = if major == 4 {
            match synchsafe_u28(raw) {
                Ok(v) => v,
                Err(_) => break,
            }
        } else {
            u32::from_be_bytes(raw) as usize
        };
        let next = pos + 10 + frame_size;
        if next > content_end {
            break;
        }
        pos = next;
    }

    let free_span = Span::new(pos, content_end - pos);
    // Trailing zero run inside the free area.
    let mut zero_start = content_end;
    while zero_start > pos && bytes[zero_start - 1] == 0 {
        zero_start -= 1;
    }
    let padding_span = Span::new(zero_start, content_end - zero_start);

    Ok(Some(Id3v2Tag {
        version: (major, revision),
        flags,
        tag_size,
        free_span,
        padding_span,
    }))
}

/// Indexes an MPEG stream: ID3v2 tag, frame list, trailing bytes, ID3v1 tag.
///
/// Frames are walked by the Layer III length formula. After a gap, a frame is
/// only accepted when chained to another valid header (or it ends the
/// stream); skipped bytes are recorded in `resync_skips`.
pub fn parse_mp3(bytes: &[u8]) -> Result<Mp3Stream> {
    if bytes.is_empty() {
        return Err(Error::MalformedContainer("empty stream".into()));
    }

    let id3v2 = parse_id3v2(bytes)?;
    let audio_start = id3v2.as_ref().map_or(0, |t| t.total_len());
    if audio_start > bytes.len() {
        return Err(Error::MalformedContainer(
            "ID3v2 tag footer overruns file".into(),
        ));
    }

    let id3v1 = if bytes.len() >= audio_start + 128 && &bytes[bytes.len() - 128..bytes.len() - 125] == b"TAG" {
        Some(Span::new(bytes.len() - 128, 128))
    } else {
        None
    };
    let audio_end = id3v1.map_or(bytes.len(), |s| s.offset);

    let mut frames: Vec<FrameInfo> = Vec::new();
    let mut resync_skips = Vec::new();
    let mut pos = audio_start;
    let trailing_start = loop {
        if pos >= audio_end {
            break audio_end;
        }
        // Look for the next acceptable frame at or after `pos`.
        let mut found = None;
        let mut q = pos;
        while q + 4 <= audio_end {
            if let Some(frame) = parse_frame_header(bytes, q) {
                let end = q + frame.len;
                if end <= audio_end {
                    let contiguous = q == pos;
                    let chained = end == audio_end || parse_frame_header(bytes, end).is_some();
                    if contiguous || chained {
                        found = Some(frame);
                        break;
                    }
                }
            }
            q += 1;
        }
        match found {
            Some(frame) => {
                if frame.offset > pos {
                    resync_skips.push(Span::new(pos, frame.offset - pos));
                }
                pos = frame.offset + frame.len;
                frames.push(frame);
            }
            None => break pos,
        }
    };

    if frames.is_empty() && id3v2.is_none() && id3v1.is_none() {
        return Err(Error::MalformedContainer("no MPEG frame or ID3 tag found".into()));
    }

    Ok(Mp3Stream {
        id3v2,
        frames,
        trailing_span: Span::new(trailing_start, audio_end - trailing_start),
        id3v1,
        resync_skips,
        raw_bytes: bytes.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn template_frame() -> Vec<u8> {
        let mut f = vec![0u8; 417];
        f[0] = 0xFF;
        f[1] = 0xFB;
        f[2] = 0x90;
        f[3] = 0x00;
        f
    }

    #[test]
    fn synchsafe_examples() {
        assert_eq!(synchsafe_u28([0x00, 0x00, 0x02, 0x01]).unwrap(), 257);
        assert_eq!(synchsafe_u28([0x00, 0x00, 0x00, 0x7F]).unwrap(), 127);
        assert!(synchsafe_u28([0x00, 0x00, 0x00, 0x80]).is_err());
        assert_eq!(encode_synchsafe_u28(257), [0x00, 0x00, 0x02, 0x01]);
    }

    #[test]
    fn frame_header_128kbps_44100() {
        let frame = template_frame();
        let info = parse_frame_header(&frame, 0).unwrap();
        assert_eq!(info.bitrate_kbps, 128);
        assert_eq!(info.sample_rate, 44100);
        assert!(!info.padding);
        assert_eq!(info.len, 417);
    }

    #[test]
    fn trailing_bytes_after_single_frame() {
        let mut bytes = template_frame();
        bytes.extend(std::iter::repeat_n(0xA5, 64));
        let stream = parse_mp3(&bytes).unwrap();
        assert_eq!(stream.frames.len(), 1);
        assert_eq!(stream.trailing_span.len, 64);
        assert!(stream.resync_skips.is_empty());
    }

    #[test]
    fn frames_tile_the_stream() {
        let mut bytes = Vec::new();
        for _ in 0..5 {
            bytes.extend(template_frame());
        }
        let stream = parse_mp3(&bytes).unwrap();
        assert_eq!(stream.frames.len(), 5);
        let mut pos = 0;
        for f in &stream.frames {
            assert_eq!(f.offset, pos);
            pos += f.len;
        }
        assert_eq!(stream.trailing_span.len, 0);
        let claimed: usize = stream.frames.iter().map(|f| f.len).sum();
        assert_eq!(claimed + stream.trailing_span.len, bytes.len());
    }

    #[test]
    fn resync_after_garbage_records_skip() {
        let mut bytes = template_frame();
        bytes.extend_from_slice(b"garbage!");
        bytes.extend(template_frame());
        bytes.extend(template_frame());
        let stream = parse_mp3(&bytes).unwrap();
        assert_eq!(stream.frames.len(), 3);
        assert_eq!(stream.resync_skips, vec![Span::new(417, 8)]);
    }

    #[test]
    fn id3v1_excluded_from_trailing() {
        let mut bytes = template_frame();
        bytes.extend(std::iter::repeat_n(0x11, 10));
        let mut v1 = vec![0u8; 128];
        v1[..3].copy_from_slice(b"TAG");
        bytes.extend(&v1);
        let stream = parse_mp3(&bytes).unwrap();
        assert_eq!(stream.trailing_span.len, 10);
        assert_eq!(stream.id3v1, Some(Span::new(417 + 10, 128)));
    }

    #[test]
    fn id3v22_rejected() {
        let mut bytes = vec![0u8; 64];
        bytes[..3].copy_from_slice(b"ID3");
        bytes[3] = 2;
        bytes[9] = 10;
        assert!(matches!(parse_mp3(&bytes), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn garbage_without_frames_is_malformed() {
        let bytes = vec![0x13u8; 300];
        assert!(matches!(parse_mp3(&bytes), Err(Error::MalformedContainer(_))));
    }

    #[test]
    fn tag_with_padding_is_indexed() {
        // ID3v2.3 tag: one TIT2 frame ("x") then 100 zero bytes of padding.
        let frame_body = [0u8, b'x'];
        let content_size = 10 + frame_body.len() + 100;
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"ID3");
        bytes.extend_from_slice(&[3, 0, 0]);
        bytes.extend_from_slice(&encode_synchsafe_u28(content_size));
        bytes.extend_from_slice(b"TIT2");
        bytes.extend_from_slice(&(frame_body.len() as u32).to_be_bytes());
        bytes.extend_from_slice(&[0, 0]);
        bytes.extend_from_slice(&frame_body);
        bytes.extend(std::iter::repeat_n(0, 100));
        bytes.extend(template_frame());

        let stream = parse_mp3(&bytes).unwrap();
        let tag = stream.id3v2.unwrap();
        assert_eq!(tag.version, (3, 0));
        assert_eq!(tag.tag_size, content_size);
        assert_eq!(tag.padding_span.len, 100);
        assert_eq!(tag.free_span, tag.padding_span);
        assert_eq!(stream.frames.len(), 1);
        assert_eq!(stream.frames[0].offset, 10 + content_size);
    }
}
