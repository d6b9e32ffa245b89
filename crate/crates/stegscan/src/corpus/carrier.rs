use super::CorpusConfig;
use crate::audio::{encode_synchsafe_u28, BitDepth, PcmAudio};
use crate::error::{Error, Result};
use crate::util::Rng;

/// Synthetic carrier families.
///
/// `ShapedNoise` is the corpus default: a slow filtered wander plus a low
/// tone, quantized so the clean LSB plane is strongly structured (mostly
/// zero, with a sparse deterministic pattern of ones). That structure is
/// what the statistical stage's calibration rests on; embedding randomizes
/// it and becomes conspicuous.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CarrierKind {
    SineTone,
    SweptTone,
    ShapedNoise,
}

impl CarrierKind {
    pub fn name(self) -> &'static str {
        match self {
            CarrierKind::SineTone => "sine_tone",
            CarrierKind::SweptTone => "swept_tone",
            CarrierKind::ShapedNoise => "shaped_noise",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sine_tone" => Some(CarrierKind::SineTone),
            "swept_tone" => Some(CarrierKind::SweptTone),
            "shaped_noise" => Some(CarrierKind::ShapedNoise),
            _ => None,
        }
    }
}

/// Synthesizes a mono carrier, deterministic in (kind, duration, seed).
/// Amplitudes stay at or below half of full scale.
pub fn synthesize_carrier(
    kind: CarrierKind,
    duration_s: f64,
    config: &CorpusConfig,
    seed: u64,
) -> Result<PcmAudio> {
    if duration_s <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    let depth = BitDepth::from_bits(config.bit_depth)
        .ok_or_else(|| Error::UnsupportedFormat(format!("{}-bit samples", config.bit_depth)))?;
    let rate = config.sample_rate;
    let n = (duration_s * rate as f64).round() as usize;
    let full_scale = (depth.max_value() as f64 + 1.0) / 2.0; // half full scale

    let samples: Vec<i32> = match kind {
        CarrierKind::SineTone => {
            let amp = full_scale.round();
            (0..n)
                .map(|t| {
                    let phase = 2.0 * std::f64::consts::PI * 440.0 * t as f64 / rate as f64;
                    (amp * phase.sin()).round() as i32
                })
                .collect()
        }
        CarrierKind::SweptTone => {
            // Linear sweep from 100 Hz to a quarter of the sample rate.
            let amp = full_scale.round();
            let f0 = 100.0;
            let f1 = rate as f64 / 4.0;
            let mut phase = 0.0f64;
            (0..n)
                .map(|t| {
                    let f = f0 + (f1 - f0) * t as f64 / n as f64;
                    phase += 2.0 * std::f64::consts::PI * f / rate as f64;
                    (amp * phase.sin()).round() as i32
                })
                .collect()
        }
        CarrierKind::ShapedNoise => {
            let mut rng = Rng::new(seed);
            // Wander sigma and tone amplitude in quantization steps; scaled
            // down for 8-bit so peaks stay inside half scale.
            let (sigma, tone_amp) = if depth == BitDepth::B8 { (12.0, 22.0) } else { (45.0, 80.0) };
            let alpha = 0.9995f64;
            let drive = sigma / ((1.0 - alpha) / (1.0 + alpha)).sqrt();
            let mut y = 0.0f64;
            (0..n)
                .map(|t| {
                    y = alpha * y + (1.0 - alpha) * rng.next_gaussian() * drive;
                    let tone = tone_amp
                        * (2.0 * std::f64::consts::PI * 37.0 * t as f64 / rate as f64).sin();
                    let bound = full_scale - 1.0;
                    let v = (y + tone).clamp(-bound, bound).round() as i32;
                    // Structured LSB plane: zero except a sparse pattern
                    // carrying the second bit of every eighth sample.
                    let lsb = if t % 8 == 0 { (v >> 1) & 1 } else { 0 };
                    (v & !1) | lsb
                })
                .collect()
        }
    };

    PcmAudio::new(rate, 1, depth, samples)
}

/// The canned 128 kbps / 44100 Hz MPEG-1 Layer III frame: 4-byte header plus
/// a zeroed 413-byte body, 417 bytes total by the frame-length formula.
pub fn mp3_frame_template() -> [u8; 417] {
    let mut frame = [0u8; 417];
    frame[0] = 0xFF;
    frame[1] = 0xFB;
    frame[2] = 0x90;
    frame[3] = 0x00;
    frame
}

/// Bytes of ID3v2 padding every synthesized MP3 carrier starts with.
pub const MP3_TAG_PADDING: usize = 4096;

const SAMPLES_PER_FRAME: f64 = 1152.0;

/// Assembles a structurally valid MPEG stream: an ID3v2.3 tag with one text
/// frame and 4096 bytes of padding, followed by repeated template frames to
/// cover the requested duration.
pub fn synthesize_mp3_carrier(duration_s: f64, config: &CorpusConfig) -> Result<Vec<u8>> {
    if duration_s <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "duration must be positive, got {duration_s}"
        )));
    }
    let frames = (duration_s * config.sample_rate as f64 / SAMPLES_PER_FRAME).ceil() as usize;

    let mut out = Vec::new();
    let text_frame_body: &[u8] = &[0, b't', b'o', b'n', b'e'];
    let content_size = 10 + text_frame_body.len() + MP3_TAG_PADDING;
    out.extend_from_slice(b"ID3");
    out.extend_from_slice(&[3, 0, 0]);
    out.extend_from_slice(&encode_synchsafe_u28(content_size));
    out.extend_from_slice(b"TIT2");
    out.extend_from_slice(&(text_frame_body.len() as u32).to_be_bytes());
    out.extend_from_slice(&[0, 0]);
    out.extend_from_slice(text_frame_body);
    out.extend(std::iter::repeat_n(0, MP3_TAG_PADDING));

    let template = mp3_frame_template();
    for _ in 0..frames {
        out.extend_from_slice(&template);
    }
    Ok(out)
}
