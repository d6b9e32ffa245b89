//! Minimal ZIP support: a deterministic writer for corpus payloads, a
//! central-directory reader for carving and cracking, and the ZipCrypto
//! stream cipher.

mod crypto;
mod reader;
mod writer;

pub use crypto::ZipCryptoKeys;
pub use reader::{parse_zip, EntryCompression, EntryEncryption, ZipArchive, ZipEntry};
pub use writer::{write_zip, ZipEntrySpec};

/// Local file header magic.
pub(crate) const LOCAL_HEADER_SIG: [u8; 4] = [0x50, 0x4B, 0x03, 0x04];
/// Central directory header magic.
pub(crate) const CENTRAL_HEADER_SIG: [u8; 4] = [0x50, 0x4B, 0x01, 0x02];
/// End-of-central-directory magic.
pub(crate) const EOCD_SIG: [u8; 4] = [0x50, 0x4B, 0x05, 0x06];
/// Fixed EOCD record size excluding the trailing comment.
pub(crate) const EOCD_FIXED_LEN: usize = 22;

/// Fixed DOS timestamp written by the corpus generator (2020-01-01 00:00:00),
/// keeping archives byte-reproducible.
pub(crate) const DOS_TIME: u16 = 0;
pub(crate) const DOS_DATE: u16 = ((2020 - 1980) << 9) | (1 << 5) | 1;
