use super::{ChannelPolicy, EmbedPlan, PayloadSpec};
use crate::audio::PcmAudio;
use crate::error::{Error, Result};

fn eligible_indices<'a>(
    carrier: &'a PcmAudio,
    plan: &'a EmbedPlan,
) -> impl Iterator<Item = usize> + 'a {
    let channels = carrier.channels() as usize;
    (plan.start_sample..carrier.len()).filter(move |idx| match plan.channel_policy {
        ChannelPolicy::AllChannels => true,
        ChannelPolicy::Channel0Only => idx % channels == 0,
    })
}

/// Number of payload bits the carrier can hold under the given plan.
pub fn capacity_bits(carrier: &PcmAudio, plan: &EmbedPlan) -> u64 {
    eligible_indices(carrier, plan).count() as u64 * plan.bits_per_sample as u64
}

/// Replaces the low bits of eligible samples with the payload bit stream.
///
/// Sample count, rate, channels and depth are preserved; samples beyond the
/// payload region are untouched. Framed payloads count their 17-byte
/// overhead against capacity.
pub fn embed_wav_lsb(carrier: &PcmAudio, payload: &PayloadSpec, plan: &EmbedPlan) -> Result<PcmAudio> {
    plan.validate()?;
    let bytes = payload.serialized();
    let needed = bytes.len() as u64 * 8;
    let available = capacity_bits(carrier, plan);
    if needed > available {
        return Err(Error::CapacityExceeded { needed, available });
    }

    let mut samples = carrier.samples().to_vec();
    let bps = plan.bits_per_sample as usize;
    let mask = (1i32 << bps) - 1;
    let mut bit_pos = 0usize;
    let total_bits = bytes.len() * 8;
    for idx in eligible_indices(carrier, plan) {
        if bit_pos >= total_bits {
            break;
        }
        let mut chunk = 0i32;
        for b in 0..bps {
            // LSB-first within each payload byte; zero-padded past the end.
            let bit = if bit_pos < total_bits {
                (bytes[bit_pos / 8] >> (bit_pos % 8)) & 1
            } else {
                0
            };
            chunk |= (bit as i32) << b;
            bit_pos += 1;
        }
        samples[idx] = (samples[idx] & !mask) | chunk;
    }
    carrier.with_samples(samples)
}

/// Reassembles the full low-bit plane of all eligible samples as bytes.
///
/// This is deliberately boundary-blind: it returns `floor(capacity/8)` bytes
/// and leaves payload delimitation to the recovery stage.
pub fn extract_wav_lsb(carrier: &PcmAudio, plan: &EmbedPlan) -> Vec<u8> {
    let bps = plan.bits_per_sample as usize;
    let mask = (1i32 << bps) - 1;
    let total_bits = capacity_bits(carrier, plan) as usize;
    let mut out = vec![0u8; total_bits / 8];
    let mut bit_pos = 0usize;
    let limit = out.len() * 8;
    for idx in eligible_indices(carrier, plan) {
        if bit_pos >= limit {
            break;
        }
        let chunk = carrier.samples()[idx] & mask;
        for b in 0..bps {
            if bit_pos >= limit {
                break;
            }
            let bit = ((chunk >> b) & 1) as u8;
            out[bit_pos / 8] |= bit << (bit_pos % 8);
            bit_pos += 1;
        }
    }
    out
}
