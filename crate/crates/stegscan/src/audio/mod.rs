//! Container parsing for the two supported carrier formats.
//!
//! WAV files are parsed down to their PCM samples; MP3 streams are indexed
//! structurally (tag, frames, trailing bytes) without ever decoding audio.

mod mp3;
mod pcm;
mod wav;

pub use mp3::{encode_synchsafe_u28, parse_mp3, synchsafe_u28, FrameInfo, Id3v2Tag, Mp3Stream};
pub use pcm::{BitDepth, PcmAudio};
pub use wav::{decode_pcm, encode_wav, parse_wav, ChunkEntry, FormatInfo, WavFile};

/// A half-open byte range inside a file image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Span {
    pub offset: usize,
    pub len: usize,
}

impl Span {
    pub fn new(offset: usize, len: usize) -> Self {
        Span { offset, len }
    }

    pub fn end(&self) -> usize {
        self.offset + self.len
    }

    pub fn slice<'a>(&self, bytes: &'a [u8]) -> &'a [u8] {
        &bytes[self.offset..self.end()]
    }

    pub fn contains(&self, pos: usize) -> bool {
        pos >= self.offset && pos < self.end()
    }
}
