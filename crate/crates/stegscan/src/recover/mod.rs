//! Payload recovery: carving hits out of scanned streams, restoring framed
//! payloads, identifying file types, and dictionary attacks on ZipCrypto
//! archives. Extraction only ever touches the working copy.

mod bruteforce;
mod carve;
mod extract;
mod identify;

pub use bruteforce::{zip_brute_force, CrackOutcome, Wordlist};
pub use carve::{carve, CarveResult};
pub use extract::{
    extract_all, extract_all_into, read_extraction_log, write_extraction_log, ExtractedArtifact,
    ExtractionOutcome, EXTRACTION_LOG_HEADER,
};
pub use identify::{identify_type, IdentifiedType};
