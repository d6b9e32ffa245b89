use crate::error::{Error, Result};

/// Bits per sample supported for integer PCM carriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitDepth {
    B8,
    B16,
    B24,
}

impl BitDepth {
    pub fn from_bits(bits: u16) -> Option<Self> {
        match bits {
            8 => Some(BitDepth::B8),
            16 => Some(BitDepth::B16),
            24 => Some(BitDepth::B24),
            _ => None,
        }
    }

    pub fn bits(self) -> u16 {
        match self {
            BitDepth::B8 => 8,
            BitDepth::B16 => 16,
            BitDepth::B24 => 24,
        }
    }

    pub fn bytes(self) -> usize {
        self.bits() as usize / 8
    }

    /// Largest representable positive sample value.
    pub fn max_value(self) -> i32 {
        (1i32 << (self.bits() - 1)) - 1
    }

    pub fn min_value(self) -> i32 {
        -(1i32 << (self.bits() - 1))
    }
}

/// Decoded interleaved integer samples: the carrier for all LSB work.
///
/// 8-bit WAV data is stored unsigned on disk; it is re-centered to signed
/// here so sample arithmetic is uniform across depths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PcmAudio {
    sample_rate: u32,
    channels: u16,
    bit_depth: BitDepth,
    samples: Vec<i32>,
}

impl PcmAudio {
    pub fn new(sample_rate: u32, channels: u16, bit_depth: BitDepth, samples: Vec<i32>) -> Result<Self> {
        if sample_rate == 0 {
            return Err(Error::InvalidInput("sample rate must be positive".into()));
        }
        if channels == 0 {
            return Err(Error::InvalidInput("channel count must be positive".into()));
        }
        if !samples.len().is_multiple_of(channels as usize) {
            return Err(Error::InvalidInput(format!(
                "{} samples not divisible by {} channels",
                samples.len(),
                channels
            )));
        }
        let (lo, hi) = (bit_depth.min_value(), bit_depth.max_value());
        if let Some(s) = samples.iter().find(|s| **s < lo || **s > hi) {
            return Err(Error::InvalidInput(format!(
                "sample {s} outside {}-bit range [{lo}, {hi}]",
                bit_depth.bits()
            )));
        }
        Ok(PcmAudio {
            sample_rate,
            channels,
            bit_depth,
            samples,
        })
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channels(&self) -> u16 {
        self.channels
    }

    pub fn bit_depth(&self) -> BitDepth {
        self.bit_depth
    }

    pub fn samples(&self) -> &[i32] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Frames = interleaved sample groups, one per channel.
    pub fn frame_count(&self) -> usize {
        self.samples.len() / self.channels as usize
    }

    pub fn duration_seconds(&self) -> f64 {
        self.frame_count() as f64 / self.sample_rate as f64
    }

    /// Replaces the sample buffer, revalidating the invariants.
    pub fn with_samples(&self, samples: Vec<i32>) -> Result<Self> {
        PcmAudio::new(self.sample_rate, self.channels, self.bit_depth, samples)
    }

    /// Channel-averaged mono view used by spectral analysis.
    pub fn mixdown(&self) -> Vec<f64> {
        let ch = self.channels as usize;
        self.samples
            .chunks_exact(ch)
            .map(|frame| frame.iter().map(|&s| s as f64).sum::<f64>() / ch as f64)
            .collect()
    }
}
