//! Short-time Fourier magnitudes and spectral anomaly scoring. The transform
//! is an in-house radix-2 implementation so runs are reproducible without an
//! external viewer.

use super::{PipelineConfig, Stage, StageResult};
use crate::audio::PcmAudio;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowShape {
    Hann,
    Rectangular,
}

/// Magnitude spectrogram: `frames x (window_size/2 + 1)` non-negative reals.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrogram {
    pub window_size: usize,
    pub hop: usize,
    pub magnitudes: Vec<Vec<f64>>,
}

impl Spectrogram {
    pub fn frames(&self) -> usize {
        self.magnitudes.len()
    }

    pub fn bins(&self) -> usize {
        self.window_size / 2 + 1
    }
}

/// Iterative in-place radix-2 FFT over split re/im buffers.
fn fft_radix2(re: &mut [f64], im: &mut [f64]) {
    let n = re.len();
    debug_assert!(n.is_power_of_two());

    // Bit-reversal permutation.
    let bits = n.trailing_zeros();
    for i in 0..n {
        let j = (i as u32).reverse_bits() >> (32 - bits);
        let j = j as usize;
        if j > i {
            re.swap(i, j);
            im.swap(i, j);
        }
    }

    let mut len = 2;
    while len <= n {
        let angle = -2.0 * std::f64::consts::PI / len as f64;
        let (w_re, w_im) = (angle.cos(), angle.sin());
        for start in (0..n).step_by(len) {
            let mut cur_re = 1.0;
            let mut cur_im = 0.0;
            for k in 0..len / 2 {
                let a = start + k;
                let b = a + len / 2;
                let t_re = re[b] * cur_re - im[b] * cur_im;
                let t_im = re[b] * cur_im + im[b] * cur_re;
                re[b] = re[a] - t_re;
                im[b] = im[a] - t_im;
                re[a] += t_re;
                im[a] += t_im;
                let next_re = cur_re * w_re - cur_im * w_im;
                cur_im = cur_re * w_im + cur_im * w_re;
                cur_re = next_re;
            }
        }
        len <<= 1;
    }
}

/// Computes the spectrogram with an explicit window shape.
pub fn compute_spectrogram_windowed(
    audio: &PcmAudio,
    window_size: usize,
    hop: usize,
    shape: WindowShape,
) -> Result<Spectrogram> {
    if !window_size.is_power_of_two() || window_size < 2 {
        return Err(Error::InvalidInput(format!(
            "window size must be a power of two, got {window_size}"
        )));
    }
    if hop == 0 {
        return Err(Error::InvalidInput("hop must be positive".into()));
    }
    let signal = audio.mixdown();
    if signal.len() < window_size {
        return Err(Error::TooShort {
            need: window_size,
            got: signal.len(),
        });
    }

    let window: Vec<f64> = match shape {
        WindowShape::Rectangular => vec![1.0; window_size],
        WindowShape::Hann => (0..window_size)
            .map(|t| {
                let x = std::f64::consts::PI * t as f64 / (window_size - 1) as f64;
                (x.sin()) * (x.sin())
            })
            .collect(),
    };

    let frames = (signal.len() - window_size) / hop + 1;
    let bins = window_size / 2 + 1;
    let mut magnitudes = Vec::with_capacity(frames);
    let mut re = vec![0.0; window_size];
    let mut im = vec![0.0; window_size];
    for f in 0..frames {
        let start = f * hop;
        for t in 0..window_size {
            re[t] = signal[start + t] * window[t];
            im[t] = 0.0;
        }
        fft_radix2(&mut re, &mut im);
        let row: Vec<f64> = (0..bins)
            .map(|k| (re[k] * re[k] + im[k] * im[k]).sqrt())
            .collect();
        magnitudes.push(row);
    }

    Ok(Spectrogram {
        window_size,
        hop,
        magnitudes,
    })
}

/// Hann-windowed spectrogram with the pipeline defaults (1024/512).
pub fn compute_spectrogram(audio: &PcmAudio, window_size: usize, hop: usize) -> Result<Spectrogram> {
    compute_spectrogram_windowed(audio, window_size, hop, WindowShape::Hann)
}

fn top_quartile_range(bins: usize) -> std::ops::Range<usize> {
    (bins - bins / 4)..bins
}

/// Geometric over arithmetic mean of power in the given bins.
fn spectral_flatness(spec: &Spectrogram, range: std::ops::Range<usize>) -> f64 {
    const FLOOR: f64 = 1e-12;
    let mut log_sum = 0.0;
    let mut sum = 0.0;
    let mut count = 0usize;
    for row in &spec.magnitudes {
        for k in range.clone() {
            let power = (row[k] * row[k]).max(FLOOR);
            log_sum += power.ln();
            sum += power;
            count += 1;
        }
    }
    if count == 0 {
        return 0.0;
    }
    let gmean = (log_sum / count as f64).exp();
    let amean = sum / count as f64;
    gmean / amean
}

/// Scores spectral anomalies in the top-quartile frequency bins.
///
/// With a baseline the score is the normalized mean absolute log-magnitude
/// difference; without one it is the excursion of spectral flatness above a
/// fixed clean calibration band.
pub fn spectro_anomaly(
    spec: &Spectrogram,
    baseline: Option<&Spectrogram>,
    cfg: &PipelineConfig,
) -> Result<StageResult> {
    const FLOOR: f64 = 1e-9;
    let range = top_quartile_range(spec.bins());
    let (score, detail) = match baseline {
        Some(base) => {
            if base.window_size != spec.window_size || base.frames() != spec.frames() {
                return Err(Error::ShapeMismatch(format!(
                    "baseline {}x{} vs suspect {}x{}",
                    base.frames(),
                    base.window_size,
                    spec.frames(),
                    spec.window_size
                )));
            }
            let mut acc = 0.0;
            let mut count = 0usize;
            for (row_s, row_b) in spec.magnitudes.iter().zip(&base.magnitudes) {
                for k in range.clone() {
                    acc += ((row_s[k] + FLOOR).log10() - (row_b[k] + FLOOR).log10()).abs();
                    count += 1;
                }
            }
            let mad = if count == 0 { 0.0 } else { acc / count as f64 };
            let score = (mad / cfg.spectro_log_diff_full_scale).clamp(0.0, 1.0);
            (score, format!("baseline log-magnitude diff mad={mad:.6}"))
        }
        None => {
            let flatness = spectral_flatness(spec, range.clone());
            let band = cfg.spectro_flatness_clean_max.min(1.0 - 1e-9);
            let score = ((flatness - band) / (1.0 - band)).clamp(0.0, 1.0);
            (score, format!("top-quartile flatness={flatness:.4} clean_max={band:.4}"))
        }
    };
    Ok(StageResult {
        stage: Stage::Spectro,
        score: Some(score),
        verdict: cfg.verdict_for(score),
        detail: vec![format!("bins={:?}", range), detail],
    })
}
