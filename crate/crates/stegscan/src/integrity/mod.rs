//! File digests and the persistent hash database used for tamper detection
//! by original-versus-working-copy comparison.

mod md5;
mod sha;

pub use md5::md5;
pub use sha::{sha1, sha256};

use crate::error::{Error, Result};
use crate::util::to_hex;
use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

/// Hex digests of one byte stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digests {
    /// 128-bit MD5, 32 hex chars.
    pub md5: String,
    /// 160-bit SHA-1, 40 hex chars.
    pub sha1: Option<String>,
    /// 256-bit SHA-256, 64 hex chars.
    pub sha256: String,
}

/// Computes MD5, SHA-1 and SHA-256 of the input.
///
/// Comparison logic elsewhere defaults to SHA-256; MD5 is kept for
/// interoperability with tooling that still expects it.
pub fn compute_digests(bytes: &[u8]) -> Digests {
    Digests {
        md5: to_hex(&md5(bytes)),
        sha1: Some(to_hex(&sha1(bytes))),
        sha256: to_hex(&sha256(bytes)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HashRecord {
    pub id: u64,
    pub name: String,
    pub md5: String,
    pub sha256: String,
    pub recorded_at: u64,
}

/// A single-file store of [`HashRecord`]s with one table of columns
/// `(id INTEGER, name TEXT, md5 TEXT, sha256 TEXT, recorded_at INTEGER)`.
///
/// Commits are atomic: the new state is written to a temporary file and
/// renamed over the old one, so a crash leaves either state intact.
#[derive(Debug, Clone)]
pub struct HashDb {
    pub path: PathBuf,
    records: BTreeMap<String, HashRecord>,
}

const DB_HEADER: &str = "# stegscan hashdb v1";
const DB_SCHEMA: &str = "# id\tname\tmd5\tsha256\trecorded_at";

fn escape_name(name: &str) -> String {
    name.replace('%', "%25").replace('\t', "%09").replace('\n', "%0a")
}

fn unescape_name(name: &str) -> String {
    name.replace("%0a", "\n").replace("%09", "\t").replace("%25", "%")
}

impl HashDb {
    pub fn empty(path: impl Into<PathBuf>) -> Self {
        HashDb {
            path: path.into(),
            records: BTreeMap::new(),
        }
    }

    pub fn records(&self) -> impl Iterator<Item = &HashRecord> {
        self.records.values()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, name: &str) -> Option<&HashRecord> {
        self.records.get(name)
    }

    pub fn insert(&mut self, record: HashRecord) -> Result<()> {
        if self.records.contains_key(&record.name) {
            return Err(Error::DuplicateName(record.name));
        }
        if self.records.values().any(|r| r.id == record.id) {
            return Err(Error::InvalidInput(format!("duplicate record id {}", record.id)));
        }
        self.records.insert(record.name.clone(), record);
        Ok(())
    }

    pub fn open(path: impl Into<PathBuf>) -> Result<Self> {
        let path = path.into();
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        let mut db = HashDb::empty(&path);
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 5 {
                return Err(Error::InvalidInput(format!(
                    "{}:{}: expected 5 columns, got {}",
                    path.display(),
                    lineno + 1,
                    fields.len()
                )));
            }
            let record = HashRecord {
                id: fields[0]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad id {:?}", fields[0])))?,
                name: unescape_name(fields[1]),
                md5: fields[2].to_string(),
                sha256: fields[3].to_string(),
                recorded_at: fields[4]
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("bad timestamp {:?}", fields[4])))?,
            };
            db.insert(record)?;
        }
        Ok(db)
    }

    /// Writes the database atomically (temp file + rename).
    pub fn commit(&self) -> Result<()> {
        let tmp = self.path.with_extension("tmp");
        {
            let mut f = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
            writeln!(f, "{DB_HEADER}").map_err(|e| Error::io(&tmp, e))?;
            writeln!(f, "{DB_SCHEMA}").map_err(|e| Error::io(&tmp, e))?;
            let mut rows: Vec<&HashRecord> = self.records.values().collect();
            rows.sort_by_key(|r| r.id);
            for r in rows {
                writeln!(
                    f,
                    "{}\t{}\t{}\t{}\t{}",
                    r.id,
                    escape_name(&r.name),
                    r.md5,
                    r.sha256,
                    r.recorded_at
                )
                .map_err(|e| Error::io(&tmp, e))?;
            }
            f.sync_all().map_err(|e| Error::io(&tmp, e))?;
        }
        fs::rename(&tmp, &self.path).map_err(|e| Error::io(&self.path, e))?;
        Ok(())
    }
}

/// Lists the regular files directly inside a directory, name-sorted.
pub(crate) fn list_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}

/// Hashes every regular file in `source_dir` into a committed database.
/// Ids are assigned 1..n in name order, so rebuilding an unchanged tree
/// yields an identical record set up to timestamps.
pub fn build_db(source_dir: &Path, db_path: &Path) -> Result<HashDb> {
    let now = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    let mut db = HashDb::empty(db_path);
    for (i, path) in list_files(source_dir)?.iter().enumerate() {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let digests = compute_digests(&bytes);
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        db.insert(HashRecord {
            id: i as u64 + 1,
            name,
            md5: digests.md5,
            sha256: digests.sha256,
            recorded_at: now,
        })?;
    }
    db.commit()?;
    Ok(db)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FindingStatus {
    /// Digest matches the database record.
    Match,
    /// Digest differs: the first sign of tampering.
    Mismatch,
    /// Recorded in the database but absent from the directory.
    Missing,
    /// Present in the directory but not in the database.
    Unknown,
}

impl FindingStatus {
    pub fn name(self) -> &'static str {
        match self {
            FindingStatus::Match => "match",
            FindingStatus::Mismatch => "mismatch",
            FindingStatus::Missing => "missing",
            FindingStatus::Unknown => "unknown",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VerificationFinding {
    pub name: String,
    pub status: FindingStatus,
}

/// Compares a working directory against the database, one finding per file
/// name in either set. Comparison uses SHA-256.
pub fn verify_against_db(db: &HashDb, working_dir: &Path) -> Result<Vec<VerificationFinding>> {
    let mut findings = BTreeMap::new();
    for record in db.records() {
        findings.insert(record.name.clone(), FindingStatus::Missing);
    }
    for path in list_files(working_dir)? {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default();
        match db.get(&name) {
            None => {
                findings.insert(name, FindingStatus::Unknown);
            }
            Some(record) => {
                let bytes = fs::read(&path).map_err(|e| Error::io(&path, e))?;
                let sha = to_hex(&sha256(&bytes));
                let status = if sha == record.sha256 {
                    FindingStatus::Match
                } else {
                    FindingStatus::Mismatch
                };
                findings.insert(name, status);
            }
        }
    }
    Ok(findings
        .into_iter()
        .map(|(name, status)| VerificationFinding { name, status })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::Rng;

    fn temp_dir(tag: &str) -> PathBuf {
        let dir = std::env::temp_dir().join(format!(
            "stegscan-integrity-{tag}-{}",
            std::process::id()
        ));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn digest_determinism_and_avalanche() {
        let mut rng = Rng::new(31);
        for _ in 0..16 {
            let len = 1 + rng.next_u32() as usize % 512;
            let data = rng.bytes(len);
            let a = compute_digests(&data);
            assert_eq!(a, compute_digests(&data));

            let mut flipped = data.clone();
            let at = rng.next_u32() as usize % flipped.len();
            flipped[at] ^= 1 << (rng.next_u32() % 8);
            let b = compute_digests(&flipped);
            assert_ne!(a.md5, b.md5);
            assert_ne!(a.sha1, b.sha1);
            assert_ne!(a.sha256, b.sha256);
        }
    }

    #[test]
    fn build_then_verify_all_match() {
        let dir = temp_dir("roundtrip");
        let db_path = dir.join("hashes.db");
        let src = dir.join("src");
        fs::create_dir(&src).unwrap();
        fs::write(src.join("a.wav"), b"alpha").unwrap();
        fs::write(src.join("b.wav"), b"beta").unwrap();
        let db = build_db(&src, &db_path).unwrap();
        assert_eq!(db.len(), 2);
        let ids: Vec<u64> = db.records().map(|r| r.id).collect();
        assert_eq!(ids, [1, 2]);

        let findings = verify_against_db(&db, &src).unwrap();
        assert!(findings.iter().all(|f| f.status == FindingStatus::Match));

        // Reopen preserves records exactly.
        let reopened = HashDb::open(&db_path).unwrap();
        let a: Vec<_> = db.records().cloned().collect();
        let b: Vec<_> = reopened.records().cloned().collect();
        assert_eq!(a, b);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn tamper_and_extra_file_findings() {
        let dir = temp_dir("tamper");
        let src = dir.join("src");
        fs::create_dir(&src).unwrap();
        fs::write(src.join("a.bin"), b"unchanged").unwrap();
        fs::write(src.join("b.bin"), b"will change").unwrap();
        let db = build_db(&src, &dir.join("db.tsv")).unwrap();

        fs::write(src.join("b.bin"), b"wilL change").unwrap();
        fs::write(src.join("c.bin"), b"new arrival").unwrap();
        let findings = verify_against_db(&db, &src).unwrap();
        let by_name: BTreeMap<&str, FindingStatus> = findings
            .iter()
            .map(|f| (f.name.as_str(), f.status))
            .collect();
        assert_eq!(by_name["a.bin"], FindingStatus::Match);
        assert_eq!(by_name["b.bin"], FindingStatus::Mismatch);
        assert_eq!(by_name["c.bin"], FindingStatus::Unknown);
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn missing_file_finding_and_empty_dir() {
        let dir = temp_dir("missing");
        let src = dir.join("src");
        fs::create_dir(&src).unwrap();
        fs::write(src.join("gone.bin"), b"data").unwrap();
        let db = build_db(&src, &dir.join("db.tsv")).unwrap();
        fs::remove_file(src.join("gone.bin")).unwrap();
        let findings = verify_against_db(&db, &src).unwrap();
        assert_eq!(findings[0].status, FindingStatus::Missing);

        let empty = dir.join("empty");
        fs::create_dir(&empty).unwrap();
        let db = build_db(&empty, &dir.join("db2.tsv")).unwrap();
        assert!(db.is_empty());
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn rebuild_unchanged_tree_is_identical_modulo_timestamps() {
        let dir = temp_dir("rebuild");
        let src = dir.join("src");
        fs::create_dir(&src).unwrap();
        fs::write(src.join("x.dat"), b"stable bytes").unwrap();
        let a = build_db(&src, &dir.join("a.tsv")).unwrap();
        let b = build_db(&src, &dir.join("b.tsv")).unwrap();
        let strip = |db: &HashDb| -> Vec<(u64, String, String, String)> {
            db.records()
                .map(|r| (r.id, r.name.clone(), r.md5.clone(), r.sha256.clone()))
                .collect()
        };
        assert_eq!(strip(&a), strip(&b));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn odd_names_survive_the_store() {
        let dir = temp_dir("names");
        let mut db = HashDb::empty(dir.join("db.tsv"));
        db.insert(HashRecord {
            id: 1,
            name: "weird\tname %".into(),
            md5: "0".repeat(32),
            sha256: "0".repeat(64),
            recorded_at: 0,
        })
        .unwrap();
        db.commit().unwrap();
        let back = HashDb::open(&db.path).unwrap();
        assert!(back.get("weird\tname %").is_some());
        assert!(matches!(
            db.insert(HashRecord {
                id: 2,
                name: "weird\tname %".into(),
                md5: String::new(),
                sha256: String::new(),
                recorded_at: 0,
            }),
            Err(Error::DuplicateName(_))
        ));
        fs::remove_dir_all(&dir).unwrap();
    }
}
