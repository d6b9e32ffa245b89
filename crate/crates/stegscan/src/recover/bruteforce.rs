//! Dictionary attack against ZipCrypto-protected archive members.
//!
//! Each candidate is screened against the 12-byte encryption header's check
//! byte (surviving by chance at a rate near 1/256) and only confirmed by a
//! full decrypt, inflate where needed, and CRC-32 comparison. A returned
//! password has therefore never failed the CRC.

use crate::error::{Error, Result};
use crate::util::crc32;
use crate::zip::{parse_zip, EntryCompression, EntryEncryption, ZipCryptoKeys, ZipEntry};
use std::path::{Path, PathBuf};

/// Ordered password candidates; attempt order is file order.
#[derive(Debug, Clone)]
pub struct Wordlist {
    pub entries: Vec<String>,
    pub source: PathBuf,
}

impl Wordlist {
    pub fn from_entries(entries: Vec<String>) -> Self {
        Wordlist {
            entries,
            source: PathBuf::from("<inline>"),
        }
    }

    /// Loads one candidate per line (UTF-8, blank lines skipped).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let entries: Vec<String> = text
            .lines()
            .map(|l| l.trim_end_matches('\r').to_string())
            .filter(|l| !l.is_empty())
            .collect();
        if entries.is_empty() {
            return Err(Error::InvalidInput(format!(
                "wordlist {} has no candidates",
                path.display()
            )));
        }
        Ok(Wordlist {
            entries,
            source: path.to_path_buf(),
        })
    }
}

#[derive(Debug, Clone)]
pub struct CrackOutcome {
    pub password: String,
    pub member_name: String,
    /// Fully decrypted (and decompressed) member data.
    pub data: Vec<u8>,
    pub attempts: usize,
    /// Candidates that passed the check byte but failed CRC confirmation.
    pub false_survivors: usize,
}

fn decrypt_member(entry: &ZipEntry, zip_bytes: &[u8], password: &str) -> Option<Vec<u8>> {
    let raw = &zip_bytes[entry.data_offset..entry.data_offset + entry.compressed_len];
    if raw.len() < 12 {
        return None;
    }
    let mut keys = ZipCryptoKeys::new(password.as_bytes());
    let mut header = [0u8; 12];
    for (i, &b) in raw[..12].iter().enumerate() {
        header[i] = keys.decrypt_byte(b);
    }
    // PKZIP 2.0+ check byte: high byte of the plaintext CRC.
    if header[11] != (entry.crc32 >> 24) as u8 {
        return None;
    }
    let mut body: Vec<u8> = raw[12..].to_vec();
    keys.decrypt_in_place(&mut body);
    Some(body)
}

fn confirm(entry: &ZipEntry, body: Vec<u8>) -> Option<Vec<u8>> {
    let plain = match entry.compression {
        EntryCompression::Stored => body,
        EntryCompression::Deflate => miniz_oxide::inflate::decompress_to_vec(&body).ok()?,
        EntryCompression::Other(_) => return None,
    };
    (crc32(&plain) == entry.crc32).then_some(plain)
}

/// Tries wordlist candidates in order against the first ZipCrypto entry.
///
/// Returns the first candidate whose full-member CRC confirms, or
/// `Exhausted` after `budget` attempts. AES-protected members are reported
/// as `UnsupportedEncryption`; archives without encrypted members as
/// `NotEncrypted`.
pub fn zip_brute_force(zip_bytes: &[u8], wordlist: &Wordlist, budget: usize) -> Result<CrackOutcome> {
    let archive = parse_zip(zip_bytes)?;
    let target = match archive
        .entries
        .iter()
        .find(|e| e.encryption == EntryEncryption::ZipCrypto)
    {
        Some(entry) => entry,
        None => {
            return if let Some(aes) = archive
                .entries
                .iter()
                .find(|e| e.encryption == EntryEncryption::Unsupported)
            {
                Err(Error::UnsupportedEncryption(format!(
                    "entry {:?} uses a non-ZipCrypto scheme",
                    aes.name
                )))
            } else {
                Err(Error::NotEncrypted)
            };
        }
    };

    let mut attempts = 0usize;
    let mut false_survivors = 0usize;
    for candidate in wordlist.entries.iter().take(budget) {
        attempts += 1;
        let Some(body) = decrypt_member(target, zip_bytes, candidate) else {
            continue;
        };
        match confirm(target, body) {
            Some(data) => {
                return Ok(CrackOutcome {
                    password: candidate.clone(),
                    member_name: target.name.clone(),
                    data,
                    attempts,
                    false_survivors,
                })
            }
            None => false_survivors += 1,
        }
    }
    Err(Error::Exhausted { attempts })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::Rng;
    use crate::zip::{write_zip, ZipEntrySpec};

    fn fixture(password: &str, seed: u64) -> (Vec<u8>, Vec<u8>) {
        let mut rng = Rng::new(seed);
        let body = rng.bytes(400);
        let zip = write_zip(
            &[ZipEntrySpec::encrypted("member.bin", body.clone(), password)],
            b"",
            &mut rng,
        );
        (zip, body)
    }

    #[test]
    fn finds_password_at_position_three() {
        let (zip, body) = fixture("secret", 60);
        let wl = Wordlist::from_entries(
            ["password", "letmein", "secret"].iter().map(|s| s.to_string()).collect(),
        );
        let outcome = zip_brute_force(&zip, &wl, 1000).unwrap();
        assert_eq!(outcome.password, "secret");
        assert_eq!(outcome.attempts, 3);
        assert_eq!(outcome.data, body);
    }

    #[test]
    fn wrong_wordlist_exhausts() {
        let (zip, _) = fixture("correct-horse", 61);
        let wl = Wordlist::from_entries(vec!["a".into(), "b".into(), "c".into()]);
        assert!(matches!(
            zip_brute_force(&zip, &wl, 1000),
            Err(Error::Exhausted { attempts: 3 })
        ));
    }

    #[test]
    fn budget_caps_attempts() {
        let (zip, _) = fixture("deep", 62);
        let entries: Vec<String> = (0..100).map(|i| format!("cand{i}")).collect();
        let wl = Wordlist::from_entries(entries);
        assert!(matches!(
            zip_brute_force(&zip, &wl, 10),
            Err(Error::Exhausted { attempts: 10 })
        ));
    }

    #[test]
    fn unencrypted_archive_is_not_encrypted() {
        let mut rng = Rng::new(63);
        let zip = write_zip(&[ZipEntrySpec::stored("a.txt", b"plain".to_vec())], b"", &mut rng);
        let wl = Wordlist::from_entries(vec!["x".into()]);
        assert!(matches!(zip_brute_force(&zip, &wl, 10), Err(Error::NotEncrypted)));
    }

    #[test]
    fn aes_member_is_unsupported() {
        let (mut zip, _) = fixture("pw", 64);
        let cd_at = zip
            .windows(4)
            .rposition(|w| w == [0x50, 0x4B, 0x01, 0x02])
            .unwrap();
        zip[cd_at + 10..cd_at + 12].copy_from_slice(&99u16.to_le_bytes());
        let wl = Wordlist::from_entries(vec!["pw".into()]);
        assert!(matches!(
            zip_brute_force(&zip, &wl, 10),
            Err(Error::UnsupportedEncryption(_))
        ));
    }

    #[test]
    fn deflated_encrypted_member_confirms_via_crc() {
        let mut rng = Rng::new(65);
        let body: Vec<u8> = b"squeeze me squeeze me squeeze me squeeze me".repeat(4);
        let zip = write_zip(
            &[ZipEntrySpec {
                name: "d.txt".into(),
                data: body.clone(),
                deflate: true,
                password: Some("inflate-me".into()),
            }],
            b"",
            &mut rng,
        );
        let wl = Wordlist::from_entries(vec!["nope".into(), "inflate-me".into()]);
        let outcome = zip_brute_force(&zip, &wl, 10).unwrap();
        assert_eq!(outcome.data, body);
        assert_eq!(outcome.attempts, 2);
    }

    #[test]
    fn check_byte_survivors_never_escape_crc() {
        // Adversarial wordlist large enough that some candidates pass the
        // 1-in-256 check byte screen; none may be returned.
        let (zip, _) = fixture("the-real-one", 66);
        let entries: Vec<String> = (0..10_000).map(|i| format!("adversary-{i:05}")).collect();
        let wl = Wordlist::from_entries(entries);
        match zip_brute_force(&zip, &wl, usize::MAX) {
            Err(Error::Exhausted { attempts }) => assert_eq!(attempts, 10_000),
            other => panic!("unexpected outcome: {other:?}"),
        }

        // Confirm the screen actually let some candidates through, so the
        // CRC stage is what eliminated them (expected rate ~ 1/256).
        let archive = parse_zip(&zip).unwrap();
        let target = &archive.entries[0];
        let survivors = wl
            .entries
            .iter()
            .filter(|c| decrypt_member(target, &zip, c).is_some())
            .count();
        assert!(survivors > 0, "no check-byte survivors in 10k candidates");
        assert!(survivors < 200, "implausibly many survivors: {survivors}");
    }
}
