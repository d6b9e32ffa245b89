//! Statistical Analysis Function: windowed pair-of-values chi-square plus
//! LSB-plane entropy, flagging distributions that look like sequential
//! low-bit replacement.

use super::gamma::chi_square_sf;
use super::{PipelineConfig, Stage, StageResult};
use crate::audio::PcmAudio;
use crate::error::{Error, Result};

/// Per-window statistics, exposed for calibration and reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowStats {
    pub chi_square: f64,
    pub dof: u64,
    /// Upper-tail probability: near 1 when value pairs are equalized the way
    /// low-bit replacement equalizes them.
    pub p_embedding: f64,
    /// Shannon entropy of the window's LSB plane, bits per sample.
    pub lsb_entropy: f64,
}

/// Pair-of-values chi-square over one sample window.
///
/// Categories are the occupied value pairs `(2k, 2k+1)`; for each pair the
/// expected even-member count is the pair mean, and the statistic sums
/// `(observed_even - mean)^2 / mean` with `occupied_pairs - 1` degrees of
/// freedom. Sequential LSB replacement drives the statistic far below its
/// degrees of freedom, so the upper-tail probability approaches one.
pub fn pov_chi_square(window: &[i32]) -> (f64, u64) {
    let mut sorted = window.to_vec();
    sorted.sort_unstable();

    let mut stat = 0.0;
    let mut pairs = 0u64;
    let mut i = 0;
    while i < sorted.len() {
        // Arithmetic shift pairs negative values correctly: -4 and -3 share
        // pair index -2, with -4 as the even member.
        let pair = sorted[i] >> 1;
        let mut even = 0u64;
        let mut total = 0u64;
        while i < sorted.len() && sorted[i] >> 1 == pair {
            total += 1;
            if sorted[i] & 1 == 0 {
                even += 1;
            }
            i += 1;
        }
        let mean = total as f64 / 2.0;
        stat += (even as f64 - mean).powi(2) / mean;
        pairs += 1;
    }
    let dof = pairs.saturating_sub(1);
    (stat, dof)
}

fn lsb_entropy(window: &[i32]) -> f64 {
    let ones = window.iter().filter(|&&s| s & 1 == 1).count();
    let p = ones as f64 / window.len() as f64;
    if p == 0.0 || p == 1.0 {
        return 0.0;
    }
    -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
}

/// Computes per-window statistics over non-overlapping windows.
pub fn window_stats(audio: &PcmAudio, window: usize) -> Result<Vec<WindowStats>> {
    if window < 256 {
        return Err(Error::InvalidInput(format!(
            "window must be at least 256 samples, got {window}"
        )));
    }
    if audio.len() < window {
        return Err(Error::TooShort {
            need: window,
            got: audio.len(),
        });
    }
    Ok(audio
        .samples()
        .chunks_exact(window)
        .map(|w| {
            let (chi_square, dof) = pov_chi_square(w);
            WindowStats {
                chi_square,
                dof,
                p_embedding: chi_square_sf(chi_square, dof),
                lsb_entropy: lsb_entropy(w),
            }
        })
        .collect())
}

/// Runs the SAF stage over PCM samples.
///
/// Score = `chi_weight` x (fraction of windows whose embedding probability
/// exceeds the threshold) + `entropy_weight` x (normalized excursion of mean
/// LSB entropy above the clean-reference band).
pub fn saf_statistics(audio: &PcmAudio, window: usize, cfg: &PipelineConfig) -> Result<StageResult> {
    let stats = window_stats(audio, window)?;
    let n = stats.len() as f64;
    let embedding_like = stats
        .iter()
        .filter(|s| s.p_embedding > cfg.saf_p_threshold)
        .count();
    let fraction = embedding_like as f64 / n;
    let mean_entropy = stats.iter().map(|s| s.lsb_entropy).sum::<f64>() / n;
    let band = cfg.saf_entropy_clean_max.min(1.0 - 1e-9);
    let entropy_deviation = ((mean_entropy - band) / (1.0 - band)).clamp(0.0, 1.0);

    let score = cfg.saf_chi_weight * fraction + cfg.saf_entropy_weight * entropy_deviation;
    Ok(StageResult {
        stage: Stage::Saf,
        score: Some(score),
        verdict: cfg.verdict_for(score),
        detail: vec![
            format!("windows={} window_size={window}", stats.len()),
            format!(
                "embedding_like={embedding_like} fraction={fraction:.4} p_threshold={}",
                cfg.saf_p_threshold
            ),
            format!("mean_lsb_entropy={mean_entropy:.4} deviation={entropy_deviation:.4}"),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::audio::BitDepth;
    use crate::util::Rng;
    use std::collections::BTreeMap;

    fn pcm(samples: Vec<i32>) -> PcmAudio {
        PcmAudio::new(44100, 1, BitDepth::B16, samples).unwrap()
    }

    /// Brute-force oracle: recount the pair histogram with a map and apply
    /// the textbook formula, independently of the sort-based implementation.
    fn oracle_pov(window: &[i32]) -> (f64, u64) {
        let mut hist: BTreeMap<i32, u64> = BTreeMap::new();
        for &v in window {
            *hist.entry(v).or_insert(0) += 1;
        }
        let mut pairs: BTreeMap<i32, (u64, u64)> = BTreeMap::new();
        for (&v, &n) in &hist {
            let entry = pairs.entry(v.div_euclid(2)).or_insert((0, 0));
            if v.rem_euclid(2) == 0 {
                entry.0 += n;
            } else {
                entry.1 += n;
            }
        }
        let mut stat = 0.0;
        let mut cats = 0u64;
        for &(even, odd) in pairs.values() {
            let mean = (even + odd) as f64 / 2.0;
            if mean > 0.0 {
                stat += (even as f64 - mean).powi(2) / mean;
                cats += 1;
            }
        }
        (stat, cats.saturating_sub(1))
    }

    #[test]
    fn matches_brute_force_oracle() {
        let mut rng = Rng::new(400);
        for trial in 0..100 {
            let n = 256 + (rng.next_u32() as usize % 3841);
            let spread = [4, 64, 1024, 30000][trial % 4];
            let samples: Vec<i32> = (0..n)
                .map(|_| (rng.below(2 * spread + 1) as i32) - spread as i32)
                .collect();
            let (stat, dof) = pov_chi_square(&samples);
            let (ostat, odof) = oracle_pov(&samples);
            assert_eq!(dof, odof);
            let rel = (stat - ostat).abs() / ostat.abs().max(1e-30);
            assert!(rel < 1e-9, "trial {trial}: {stat} vs {ostat}");
        }
    }

    #[test]
    fn all_zero_lsbs_read_clean() {
        // Dense even-valued histogram: strongly unequal pairs.
        let mut rng = Rng::new(7);
        let samples: Vec<i32> = (0..8192).map(|_| ((rng.below(129) as i32) - 64) * 2).collect();
        let audio = pcm(samples);
        let cfg = PipelineConfig::default();
        let result = saf_statistics(&audio, 4096, &cfg).unwrap();
        assert_eq!(result.verdict, super::super::Verdict::Clean);
        let stats = window_stats(&audio, 4096).unwrap();
        for w in stats {
            assert_eq!(w.lsb_entropy, 0.0);
            assert!(w.p_embedding < 0.05, "p = {}", w.p_embedding);
        }
    }

    #[test]
    fn full_embedding_lights_up_windows() {
        // Dense histogram with randomized LSBs: the embedded picture.
        let mut rng = Rng::new(8);
        let samples: Vec<i32> = (0..16384)
            .map(|_| ((rng.below(129) as i32) - 64) * 2 + (rng.next_u64() & 1) as i32)
            .collect();
        let stats = window_stats(&pcm(samples), 4096).unwrap();
        let hot = stats.iter().filter(|w| w.p_embedding > 0.95).count();
        assert!(
            hot as f64 >= 0.9 * stats.len() as f64,
            "{hot}/{} windows embedding-like",
            stats.len()
        );
    }

    #[test]
    fn window_larger_than_signal_is_too_short() {
        let audio = pcm(vec![0; 1024]);
        assert!(matches!(
            saf_statistics(&audio, 4096, &PipelineConfig::default()),
            Err(Error::TooShort { need: 4096, got: 1024 })
        ));
    }

    #[test]
    fn tiny_window_rejected() {
        let audio = pcm(vec![0; 1024]);
        assert!(saf_statistics(&audio, 128, &PipelineConfig::default()).is_err());
    }

    #[test]
    fn negative_values_pair_by_floor_division() {
        // (-4, -3) form one pair; (-2, -1) another; (0, 1) another.
        let window = [-4, -4, -3, -2, -1, -1, 0, 1];
        let (stat, dof) = pov_chi_square(&window);
        let (ostat, odof) = oracle_pov(&window);
        assert_eq!(dof, odof);
        assert!((stat - ostat).abs() < 1e-12);
        assert_eq!(dof, 2);
    }
}
