//! Audio steganalysis toolkit for WAV and MP3 carriers.
//!
//! The crate covers the full forensic loop:
//!
//! * [`audio`] parses WAV files down to PCM samples and indexes MP3 streams
//!   structurally (tag, frames, trailing bytes) without decoding audio.
//! * [`stego`] embeds and extracts payloads: LSB substitution over PCM
//!   samples, container-region injection for MP3, and an optional
//!   length- and CRC-checked payload frame.
//! * [`integrity`] computes MD5/SHA-1/SHA-256 digests and maintains the
//!   hash database used for tamper detection.
//! * [`detect`] runs the staged pipeline: statistical analysis, spectrogram
//!   analysis, file-signature scanning, content comparison, plus hash and
//!   timestamp flags.
//!
//! A worked guide with runnable examples lives in the `book/` directory and
//! is kept honest by this crate's doc-tests.

pub mod audio;
pub mod corpus;
pub mod detect;
pub mod error;
pub mod eval;
pub mod integrity;
pub mod recover;
pub mod stego;
pub mod util;
pub mod workflow;
pub mod zip;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book;
