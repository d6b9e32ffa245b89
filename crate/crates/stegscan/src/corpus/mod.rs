//! Deterministic ground-truth corpus synthesis: graded-duration WAV and MP3
//! carriers, payloads proportional to duration, clean controls, and a
//! manifest the evaluator scores against.

mod carrier;
mod generate;
mod payload;

pub use carrier::{synthesize_carrier, synthesize_mp3_carrier, CarrierKind};
pub use generate::{generate_corpus, load_manifest, MANIFEST_FILE};
pub use payload::{generate_payload, GeneratedPayload, PayloadType};

use crate::detect::FileFormat;
use crate::error::{Error, Result};
use crate::stego::EmbedMode;
use std::collections::BTreeMap;
use std::path::Path;

/// Password candidates compiled into the toolkit; corpus generation draws
/// ZipCrypto passwords from here so extraction can close the loop.
pub const BUILD_WORDLIST: &str = include_str!("../../data/default_wordlist.txt");

pub fn build_wordlist_entries() -> Vec<String> {
    BUILD_WORDLIST
        .lines()
        .map(str::to_string)
        .filter(|l| !l.is_empty())
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Linear,
    Geometric,
}

impl Schedule {
    pub fn name(self) -> &'static str {
        match self {
            Schedule::Linear => "linear",
            Schedule::Geometric => "geometric",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "linear" => Some(Schedule::Linear),
            "geometric" => Some(Schedule::Geometric),
            _ => None,
        }
    }
}

/// Relative weights over payload types for stego entries.
#[derive(Debug, Clone, PartialEq)]
pub struct PayloadMix {
    pub weights: Vec<(PayloadType, f64)>,
}

impl Default for PayloadMix {
    fn default() -> Self {
        PayloadMix {
            weights: vec![
                (PayloadType::Txt, 0.2),
                (PayloadType::Docx, 0.2),
                (PayloadType::Png, 0.2),
                (PayloadType::Zip, 0.2),
                (PayloadType::ZipEncrypted, 0.2),
            ],
        }
    }
}

impl PayloadMix {
    pub fn validate(&self) -> Result<()> {
        if self.weights.is_empty() {
            return Err(Error::InvalidInput("payload mix is empty".into()));
        }
        let total: f64 = self.weights.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidInput(format!(
                "payload mix weights sum to {total}, expected 1"
            )));
        }
        if self.weights.iter().any(|(_, w)| *w < 0.0) {
            return Err(Error::InvalidInput("negative payload weight".into()));
        }
        Ok(())
    }

    /// Deterministic weighted draw on a unit sample.
    pub fn pick(&self, unit: f64) -> PayloadType {
        let mut acc = 0.0;
        for (ty, w) in &self.weights {
            acc += w;
            if unit < acc {
                return *ty;
            }
        }
        self.weights.last().unwrap().0
    }
}

/// Generation parameters. The default is the desk-scale corpus (32 files,
/// 10-160 s); [`CorpusConfig::large_scale`] spans 10-1600 s over 320 files.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusConfig {
    pub total_files: usize,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    pub duration_schedule: Schedule,
    /// Payload bytes embedded per second of carrier (the proportionality
    /// rule for stego entries).
    pub payload_rate: f64,
    pub payload_mix: PayloadMix,
    /// Fraction of each format left clean as false-positive controls.
    pub clean_fraction: f64,
    pub seed: u64,
    pub sample_rate: u32,
    pub bit_depth: u16,
    pub embed_mode: EmbedMode,
    pub bits_per_sample: u8,
    pub carrier: CarrierKind,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            total_files: 32,
            min_duration_s: 10.0,
            max_duration_s: 160.0,
            duration_schedule: Schedule::Linear,
            payload_rate: 100.0,
            payload_mix: PayloadMix::default(),
            clean_fraction: 0.25,
            seed: 1,
            sample_rate: 44100,
            bit_depth: 16,
            embed_mode: EmbedMode::Framed,
            bits_per_sample: 1,
            carrier: CarrierKind::ShapedNoise,
        }
    }
}

impl CorpusConfig {
    /// The 320-file, 10-1600 s configuration.
    pub fn large_scale() -> Self {
        CorpusConfig {
            total_files: 320,
            max_duration_s: 1600.0,
            ..CorpusConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.total_files == 0 || !self.total_files.is_multiple_of(2) {
            return Err(Error::InvalidInput(format!(
                "total_files must be a positive even count, got {}",
                self.total_files
            )));
        }
        if !(self.min_duration_s > 0.0 && self.min_duration_s < self.max_duration_s) {
            return Err(Error::InvalidInput(format!(
                "need 0 < min_duration ({}) < max_duration ({})",
                self.min_duration_s, self.max_duration_s
            )));
        }
        if !(0.0..1.0).contains(&self.clean_fraction) {
            return Err(Error::InvalidInput(format!(
                "clean_fraction must lie in [0, 1), got {}",
                self.clean_fraction
            )));
        }
        if self.payload_rate <= 0.0 {
            return Err(Error::InvalidInput("payload_rate must be positive".into()));
        }
        self.payload_mix.validate()?;
        if crate::audio::BitDepth::from_bits(self.bit_depth).is_none() {
            return Err(Error::UnsupportedFormat(format!("{}-bit samples", self.bit_depth)));
        }
        if self.bits_per_sample != 1 && self.bits_per_sample != 2 {
            return Err(Error::InvalidInput("bits_per_sample must be 1 or 2".into()));
        }
        // The proportionality rule must stay within 1-bit LSB capacity.
        let capacity_per_s = self.sample_rate as f64 * self.bits_per_sample as f64 / 8.0;
        let framed_overhead = 17.0 / self.min_duration_s;
        if self.payload_rate + framed_overhead > capacity_per_s {
            return Err(Error::InvalidInput(format!(
                "payload_rate {} exceeds carrier capacity {} bytes/s",
                self.payload_rate, capacity_per_s
            )));
        }
        Ok(())
    }

    /// Duration ladder for one format (the other format mirrors it).
    pub fn durations(&self) -> Vec<f64> {
        let n = self.total_files / 2;
        let (lo, hi) = (self.min_duration_s, self.max_duration_s);
        (0..n)
            .map(|i| {
                let t = if n == 1 { 0.0 } else { i as f64 / (n - 1) as f64 };
                let d = match self.duration_schedule {
                    Schedule::Linear => lo + t * (hi - lo),
                    Schedule::Geometric => lo * (hi / lo).powf(t),
                };
                // Whole seconds keep file names and payload sizes tidy.
                d.round()
            })
            .collect()
    }

    /// Indices (within one format's ladder) left clean as FP controls,
    /// spread evenly across the duration range.
    pub fn clean_indices(&self) -> Vec<usize> {
        let n = self.total_files / 2;
        let clean = (self.clean_fraction * n as f64).round() as usize;
        (0..clean)
            .map(|k| ((k as f64 + 0.5) * n as f64 / clean as f64).floor() as usize)
            .collect()
    }

    /// Flat `key=value` rendering, echoed into the manifest.
    pub fn to_key_values(&self) -> Vec<(String, String)> {
        let mix = self
            .payload_mix
            .weights
            .iter()
            .map(|(t, w)| format!("{}:{w}", t.name()))
            .collect::<Vec<_>>()
            .join("|");
        vec![
            ("total_files".into(), self.total_files.to_string()),
            ("min_duration_s".into(), self.min_duration_s.to_string()),
            ("max_duration_s".into(), self.max_duration_s.to_string()),
            ("duration_schedule".into(), self.duration_schedule.name().into()),
            ("payload_rate".into(), self.payload_rate.to_string()),
            ("payload_mix".into(), mix),
            ("clean_fraction".into(), self.clean_fraction.to_string()),
            ("seed".into(), self.seed.to_string()),
            ("sample_rate".into(), self.sample_rate.to_string()),
            ("bit_depth".into(), self.bit_depth.to_string()),
            ("embed_mode".into(), self.embed_mode.name().into()),
            ("bits_per_sample".into(), self.bits_per_sample.to_string()),
            ("carrier".into(), self.carrier.name().into()),
        ]
    }

    /// Parses a flat `key=value` config file (one pair per line, `#`
    /// comments), starting from the defaults.
    pub fn from_key_values(text: &str) -> Result<Self> {
        let mut cfg = CorpusConfig::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("config line {}: expected key=value", lineno + 1))
            })?;
            cfg.apply(key.trim(), value.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::InvalidInput(format!("bad {what}: {value:?}"));
        match key {
            "total_files" => self.total_files = value.parse().map_err(|_| bad("total_files"))?,
            "min_duration_s" => self.min_duration_s = value.parse().map_err(|_| bad("min_duration_s"))?,
            "max_duration_s" => self.max_duration_s = value.parse().map_err(|_| bad("max_duration_s"))?,
            "duration_schedule" => {
                self.duration_schedule =
                    Schedule::from_name(value).ok_or_else(|| bad("duration_schedule"))?
            }
            "payload_rate" => self.payload_rate = value.parse().map_err(|_| bad("payload_rate"))?,
            "payload_mix" => {
                let mut weights = Vec::new();
                for part in value.split('|') {
                    let (name, w) = part.split_once(':').ok_or_else(|| bad("payload_mix"))?;
                    weights.push((
                        PayloadType::from_name(name).ok_or_else(|| bad("payload_mix type"))?,
                        w.parse().map_err(|_| bad("payload_mix weight"))?,
                    ));
                }
                self.payload_mix = PayloadMix { weights };
            }
            "clean_fraction" => self.clean_fraction = value.parse().map_err(|_| bad("clean_fraction"))?,
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "sample_rate" => self.sample_rate = value.parse().map_err(|_| bad("sample_rate"))?,
            "bit_depth" => self.bit_depth = value.parse().map_err(|_| bad("bit_depth"))?,
            "embed_mode" => {
                self.embed_mode = EmbedMode::from_name(value).ok_or_else(|| bad("embed_mode"))?
            }
            "bits_per_sample" => {
                self.bits_per_sample = value.parse().map_err(|_| bad("bits_per_sample"))?
            }
            "carrier" => self.carrier = CarrierKind::from_name(value).ok_or_else(|| bad("carrier"))?,
            other => return Err(Error::InvalidInput(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }
}

/// Ground-truth record for one corpus file.
#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub filename: String,
    pub format: FileFormat,
    pub duration_s: f64,
    pub is_stego: bool,
    pub payload_type: Option<PayloadType>,
    pub payload_bytes: Option<usize>,
    pub embed_mode: Option<EmbedMode>,
    pub embed_location: Option<String>,
    pub bits_per_sample: Option<u8>,
    pub zip_password: Option<String>,
    pub payload_sha256: Option<String>,
}

/// The corpus ground truth: config echo, per-file entries, and a digest of
/// the entry block.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub config: Vec<(String, String)>,
    pub entries: Vec<ManifestEntry>,
    pub manifest_sha256: String,
}

impl CorpusManifest {
    pub fn entry(&self, filename: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.filename == filename)
    }

    pub fn stego_count(&self, format: FileFormat) -> usize {
        self.entries
            .iter()
            .filter(|e| e.format == format && e.is_stego)
            .count()
    }

    pub fn clean_count(&self, format: FileFormat) -> usize {
        self.entries
            .iter()
            .filter(|e| e.format == format && !e.is_stego)
            .count()
    }

    /// Short hash of the config echo, used to name run directories.
    pub fn config_hash(&self) -> String {
        let text: String = self
            .config
            .iter()
            .map(|(k, v)| format!("{k}={v}\n"))
            .collect();
        crate::util::to_hex(&crate::integrity::sha256(text.as_bytes()))[..16].to_string()
    }
}

/// Convenience: per-format duration multisets, used to check the mirrored
/// split invariant.
pub fn duration_multisets(manifest: &CorpusManifest) -> BTreeMap<&'static str, Vec<u64>> {
    let mut map: BTreeMap<&'static str, Vec<u64>> = BTreeMap::new();
    for e in &manifest.entries {
        map.entry(e.format.name())
            .or_default()
            .push(e.duration_s.round() as u64);
    }
    for v in map.values_mut() {
        v.sort_unstable();
    }
    map
}

/// Reads a config file if given, then applies `key=value` overrides.
pub fn resolve_config(path: Option<&Path>, overrides: &[(String, String)]) -> Result<CorpusConfig> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
            CorpusConfig::from_key_values(&text)?
        }
        None => CorpusConfig::default(),
    };
    for (key, value) in overrides {
        cfg.apply(key, value)?;
    }
    cfg.validate()?;
    Ok(cfg)
}
