//! Payload embedding and extraction: LSB substitution over WAV PCM samples
//! and container-region injection for MP3 streams.

mod frame;
mod lsb;
mod mp3_meta;

pub use frame::{deframe_payload, frame_payload, framed_total_len, FRAME_MAGIC, FRAME_OVERHEAD};
pub use lsb::{capacity_bits, embed_wav_lsb, extract_wav_lsb};
pub use mp3_meta::{embed_mp3_meta, Mp3Location};

use crate::error::{Error, Result};

/// Hidden-payload file types the toolkit generates and recognizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PayloadKind {
    Txt,
    Docx,
    Png,
    Zip,
    Unknown,
}

impl PayloadKind {
    pub fn type_code(self) -> u8 {
        match self {
            PayloadKind::Txt => 0,
            PayloadKind::Docx => 1,
            PayloadKind::Png => 2,
            PayloadKind::Zip => 3,
            PayloadKind::Unknown => 255,
        }
    }

    pub fn from_type_code(code: u8) -> Self {
        match code {
            0 => PayloadKind::Txt,
            1 => PayloadKind::Docx,
            2 => PayloadKind::Png,
            3 => PayloadKind::Zip,
            _ => PayloadKind::Unknown,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            PayloadKind::Txt => "txt",
            PayloadKind::Docx => "docx",
            PayloadKind::Png => "png",
            PayloadKind::Zip => "zip",
            PayloadKind::Unknown => "unknown",
        }
    }

    pub fn extension(self) -> &'static str {
        match self {
            PayloadKind::Unknown => "bin",
            other => other.name(),
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "txt" => Some(PayloadKind::Txt),
            "docx" => Some(PayloadKind::Docx),
            "png" => Some(PayloadKind::Png),
            "zip" => Some(PayloadKind::Zip),
            "unknown" => Some(PayloadKind::Unknown),
            _ => None,
        }
    }
}

/// Serialization mode for embedded payloads.
///
/// `Raw` writes the payload bytes directly, so recovery depends on the hidden
/// file's own magic number. `Framed` wraps them in a length- and CRC-checked
/// frame, which makes magic-less payloads (plain or encrypted text)
/// recoverable too.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmbedMode {
    Raw,
    Framed,
}

impl EmbedMode {
    pub fn name(self) -> &'static str {
        match self {
            EmbedMode::Raw => "raw",
            EmbedMode::Framed => "framed",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "raw" => Some(EmbedMode::Raw),
            "framed" => Some(EmbedMode::Framed),
            _ => None,
        }
    }
}

/// A payload to hide, with its declared type and serialization mode.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PayloadSpec {
    pub data: Vec<u8>,
    pub declared_type: PayloadKind,
    pub mode: EmbedMode,
}

impl PayloadSpec {
    pub fn new(data: Vec<u8>, declared_type: PayloadKind, mode: EmbedMode) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::InvalidInput("payload data is empty".into()));
        }
        let magic_ok = match declared_type {
            PayloadKind::Txt | PayloadKind::Unknown => true,
            PayloadKind::Png => data.starts_with(&[0x89, 0x50, 0x4E, 0x47, 0x0D, 0x0A, 0x1A, 0x0A]),
            PayloadKind::Zip | PayloadKind::Docx => data.starts_with(&[0x50, 0x4B, 0x03, 0x04]),
        };
        if !magic_ok {
            return Err(Error::InvalidInput(format!(
                "payload declared {} but magic number disagrees",
                declared_type.name()
            )));
        }
        Ok(PayloadSpec {
            data,
            declared_type,
            mode,
        })
    }

    /// The byte stream actually written into the carrier.
    pub fn serialized(&self) -> Vec<u8> {
        match self.mode {
            EmbedMode::Raw => self.data.clone(),
            EmbedMode::Framed => frame_payload(self),
        }
    }
}

/// Which samples an embedding touches.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelPolicy {
    AllChannels,
    Channel0Only,
}

/// Placement parameters for WAV LSB embedding. Bit order is fixed: payload
/// bytes are consumed LSB-first, samples in interleaved storage order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmbedPlan {
    pub bits_per_sample: u8,
    pub start_sample: usize,
    pub channel_policy: ChannelPolicy,
}

impl Default for EmbedPlan {
    fn default() -> Self {
        EmbedPlan {
            bits_per_sample: 1,
            start_sample: 0,
            channel_policy: ChannelPolicy::AllChannels,
        }
    }
}

impl EmbedPlan {
    pub fn validate(&self) -> Result<()> {
        if self.bits_per_sample != 1 && self.bits_per_sample != 2 {
            return Err(Error::InvalidInput(format!(
                "bits_per_sample must be 1 or 2, got {}",
                self.bits_per_sample
            )));
        }
        Ok(())
    }
}
