use super::pcm::{BitDepth, PcmAudio};
use super::Span;
use crate::error::{Error, Result};

const RIFF: &[u8; 4] = b"RIFF";
const WAVE: &[u8; 4] = b"WAVE";
const FMT: &[u8; 4] = b"fmt ";
const DATA: &[u8; 4] = b"data";

/// One top-level RIFF chunk: fourcc, payload offset (past the 8-byte chunk
/// header) and payload length.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChunkEntry {
    pub id: [u8; 4],
    pub offset: usize,
    pub len: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FormatInfo {
    pub audio_format: u16,
    pub channels: u16,
    pub sample_rate: u32,
    pub bit_depth: BitDepth,
}

/// A parsed WAV image. Unknown chunks are preserved verbatim in the index,
/// so re-serializing `raw_bytes` is always byte-exact.
#[derive(Debug, Clone)]
pub struct WavFile {
    pub chunk_index: Vec<ChunkEntry>,
    pub format_info: FormatInfo,
    pub data_span: Span,
    pub raw_bytes: Vec<u8>,
    pub warnings: Vec<String>,
}

impl WavFile {
    pub fn data(&self) -> &[u8] {
        self.data_span.slice(&self.raw_bytes)
    }
}

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes([bytes[at], bytes[at + 1]])
}

fn read_u32(bytes: &[u8], at: usize) -> u32 {
    u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]])
}

/// Parses a RIFF/WAVE image into an indexed [`WavFile`].
///
/// Only integer PCM (format code 1) is accepted. The optional RIFF pad byte
/// after odd-length chunks is tolerated, and an off-by-one declared RIFF size
/// is downgraded to a warning.
pub fn parse_wav(bytes: &[u8]) -> Result<WavFile> {
    if bytes.len() < 44 {
        return Err(Error::MalformedContainer(format!(
            "file too short for a WAV header: {} bytes",
            bytes.len()
        )));
    }
    if &bytes[0..4] != RIFF {
        return Err(Error::MalformedContainer("missing RIFF magic".into()));
    }
    if &bytes[8..12] != WAVE {
        return Err(Error::MalformedContainer("missing WAVE form type".into()));
    }

    let mut warnings = Vec::new();
    let declared = read_u32(bytes, 4) as usize;
    let actual = bytes.len() - 8;
    if declared != actual {
        if declared.abs_diff(actual) == 1 {
            warnings.push(format!(
                "declared RIFF size {declared} differs from actual {actual} by a pad byte"
            ));
        } else {
            return Err(Error::MalformedContainer(format!(
                "declared RIFF size {declared} does not match actual {actual}"
            )));
        }
    }

    let mut chunk_index = Vec::new();
    let mut pos = 12usize;
    while pos < bytes.len() {
        if pos + 8 > bytes.len() {
            return Err(Error::MalformedContainer(format!(
                "truncated chunk header at offset {pos}"
            )));
        }
        let id = [bytes[pos], bytes[pos + 1], bytes[pos + 2], bytes[pos + 3]];
        let len = read_u32(bytes, pos + 4) as usize;
        let payload = pos + 8;
        if payload + len > bytes.len() {
            return Err(Error::MalformedContainer(format!(
                "chunk {:?} at offset {pos} overruns file ({} + {len} > {})",
                String::from_utf8_lossy(&id),
                payload,
                bytes.len()
            )));
        }
        chunk_index.push(ChunkEntry {
            id,
            offset: payload,
            len,
        });
        pos = payload + len;
        // RIFF requires word alignment; odd chunks carry one pad byte.
        if len % 2 == 1 && pos < bytes.len() {
            pos += 1;
        }
    }

    let fmt = chunk_index
        .iter()
        .find(|c| &c.id == FMT)
        .ok_or_else(|| Error::MalformedContainer("no fmt chunk".into()))?;
    if fmt.len < 16 {
        return Err(Error::MalformedContainer(format!(
            "fmt chunk too short: {} bytes",
            fmt.len
        )));
    }
    let audio_format = read_u16(bytes, fmt.offset);
    if audio_format != 1 {
        return Err(Error::UnsupportedFormat(format!(
            "audio format code {audio_format} (only integer PCM = 1 is supported)"
        )));
    }
    let channels = read_u16(bytes, fmt.offset + 2);
    if channels == 0 {
        return Err(Error::MalformedContainer("zero channels".into()));
    }
    let sample_rate = read_u32(bytes, fmt.offset + 4);
    if sample_rate == 0 {
        return Err(Error::MalformedContainer("zero sample rate".into()));
    }
    let bits = read_u16(bytes, fmt.offset + 14);
    let bit_depth = BitDepth::from_bits(bits)
        .ok_or_else(|| Error::UnsupportedFormat(format!("{bits}-bit samples")))?;

    let data = chunk_index
        .iter()
        .find(|c| &c.id == DATA)
        .ok_or_else(|| Error::MalformedContainer("no data chunk".into()))?;
    let block = channels as usize * bit_depth.bytes();
    if data.len % block != 0 {
        return Err(Error::MalformedContainer(format!(
            "data length {} not divisible by block align {block}",
            data.len
        )));
    }

    Ok(WavFile {
        data_span: Span::new(data.offset, data.len),
        format_info: FormatInfo {
            audio_format,
            channels,
            sample_rate,
            bit_depth,
        },
        chunk_index,
        raw_bytes: bytes.to_vec(),
        warnings,
    })
}

/// Decodes the data chunk into interleaved signed samples.
pub fn decode_pcm(wav: &WavFile) -> Result<PcmAudio> {
    let info = wav.format_info;
    let data = wav.data();
    let samples: Vec<i32> = match info.bit_depth {
        BitDepth::B8 => data.iter().map(|&b| b as i32 - 128).collect(),
        BitDepth::B16 => data
            .chunks_exact(2)
            .map(|c| i16::from_le_bytes([c[0], c[1]]) as i32)
            .collect(),
        BitDepth::B24 => data
            .chunks_exact(3)
            .map(|c| {
                let raw = (c[0] as u32) | ((c[1] as u32) << 8) | ((c[2] as u32) << 16);
                // Sign-extend from 24 bits.
                ((raw << 8) as i32) >> 8
            })
            .collect(),
    };
    PcmAudio::new(info.sample_rate, info.channels, info.bit_depth, samples)
}

/// Serializes audio as a minimal canonical RIFF/WAVE file: a 16-byte PCM
/// `fmt ` chunk followed by `data`. Deterministic for identical input.
pub fn encode_wav(audio: &PcmAudio) -> Vec<u8> {
    let depth = audio.bit_depth();
    let data_len = audio.len() * depth.bytes();
    let pad = data_len % 2;
    let riff_size = 4 + (8 + 16) + (8 + data_len + pad);
    let mut out = Vec::with_capacity(8 + riff_size);

    out.extend_from_slice(RIFF);
    out.extend_from_slice(&(riff_size as u32).to_le_bytes());
    out.extend_from_slice(WAVE);

    out.extend_from_slice(FMT);
    out.extend_from_slice(&16u32.to_le_bytes());
    out.extend_from_slice(&1u16.to_le_bytes());
    out.extend_from_slice(&audio.channels().to_le_bytes());
    out.extend_from_slice(&audio.sample_rate().to_le_bytes());
    let block = audio.channels() as u32 * depth.bytes() as u32;
    out.extend_from_slice(&(audio.sample_rate() * block).to_le_bytes());
    out.extend_from_slice(&(block as u16).to_le_bytes());
    out.extend_from_slice(&depth.bits().to_le_bytes());

    out.extend_from_slice(DATA);
    out.extend_from_slice(&(data_len as u32).to_le_bytes());
    for &s in audio.samples() {
        match depth {
            BitDepth::B8 => out.push((s + 128) as u8),
            BitDepth::B16 => out.extend_from_slice(&(s as i16).to_le_bytes()),
            BitDepth::B24 => out.extend_from_slice(&s.to_le_bytes()[..3]),
        }
    }
    if pad == 1 {
        out.push(0);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mono(samples: Vec<i32>) -> PcmAudio {
        PcmAudio::new(44100, 1, BitDepth::B16, samples).unwrap()
    }

    #[test]
    fn canonical_header_and_duration() {
        let audio = mono(vec![0; 44100]);
        let bytes = encode_wav(&audio);
        assert_eq!(bytes.len(), 44 + 88200);
        let wav = parse_wav(&bytes).unwrap();
        assert_eq!(wav.data_span.len, 88200);
        assert_eq!(decode_pcm(&wav).unwrap().duration_seconds(), 1.0);
    }

    #[test]
    fn one_sample_file_is_46_bytes() {
        assert_eq!(encode_wav(&mono(vec![7])).len(), 46);
    }

    #[test]
    fn rejects_rifx() {
        let mut bytes = encode_wav(&mono(vec![0; 4]));
        bytes[..4].copy_from_slice(b"RIFX");
        assert!(matches!(parse_wav(&bytes), Err(Error::MalformedContainer(_))));
    }

    #[test]
    fn rejects_float_pcm() {
        let mut bytes = encode_wav(&mono(vec![0; 4]));
        // Patch the audio format code to 3 (IEEE float).
        bytes[20] = 3;
        assert!(matches!(parse_wav(&bytes), Err(Error::UnsupportedFormat(_))));
    }

    #[test]
    fn list_chunk_before_data_is_indexed() {
        let audio = mono(vec![1, 2, 3, 4]);
        let canon = encode_wav(&audio);
        // Rebuild with a LIST chunk inserted between fmt and data.
        let list_body = b"INFOIART\x04\x00\x00\x00test";
        let mut bytes = Vec::new();
        bytes.extend_from_slice(&canon[..36]);
        bytes.extend_from_slice(b"LIST");
        bytes.extend_from_slice(&(list_body.len() as u32).to_le_bytes());
        bytes.extend_from_slice(list_body);
        bytes.extend_from_slice(&canon[36..]);
        let riff_size = (bytes.len() - 8) as u32;
        bytes[4..8].copy_from_slice(&riff_size.to_le_bytes());

        let wav = parse_wav(&bytes).unwrap();
        let ids: Vec<&[u8; 4]> = wav.chunk_index.iter().map(|c| &c.id).collect();
        assert_eq!(ids, [b"fmt ", b"LIST", b"data"]);
        assert_eq!(wav.data_span.len, 8);
        assert_eq!(decode_pcm(&wav).unwrap().samples(), audio.samples());
    }

    #[test]
    fn sixteen_bit_two_complement_decoding() {
        let mut bytes = encode_wav(&mono(vec![0, 0]));
        let data_at = bytes.len() - 4;
        bytes[data_at..].copy_from_slice(&[0x01, 0x00, 0xFF, 0xFF]);
        let audio = decode_pcm(&parse_wav(&bytes).unwrap()).unwrap();
        assert_eq!(audio.samples(), [1, -1]);
    }

    #[test]
    fn eight_bit_recentering() {
        let audio = PcmAudio::new(8000, 1, BitDepth::B8, vec![0, -128]).unwrap();
        let bytes = encode_wav(&audio);
        assert_eq!(&bytes[bytes.len() - 2..], &[0x80, 0x00]);
        let back = decode_pcm(&parse_wav(&bytes).unwrap()).unwrap();
        assert_eq!(back.samples(), [0, -128]);
    }

    #[test]
    fn twenty_four_bit_round_trip() {
        let audio = PcmAudio::new(48000, 2, BitDepth::B24, vec![0, 1, -1, 8_388_607, -8_388_608, 42]).unwrap();
        let back = decode_pcm(&parse_wav(&encode_wav(&audio)).unwrap()).unwrap();
        assert_eq!(back, audio);
    }

    #[test]
    fn odd_eight_bit_data_gets_pad_byte() {
        let audio = PcmAudio::new(8000, 1, BitDepth::B8, vec![1, 2, 3]).unwrap();
        let bytes = encode_wav(&audio);
        assert_eq!(bytes.len() % 2, 0);
        let wav = parse_wav(&bytes).unwrap();
        assert_eq!(wav.data_span.len, 3);
        assert_eq!(decode_pcm(&wav).unwrap(), audio);
    }

    #[test]
    fn truncations_error_cleanly() {
        let bytes = encode_wav(&mono(vec![0; 128]));
        for cut in [0, 3, 11, 43, 44, 100, bytes.len() - 1] {
            let sliced = &bytes[..cut];
            // Any truncation must produce an error, never a panic.
            assert!(parse_wav(sliced).is_err(), "cut at {cut} parsed");
        }
    }
}
