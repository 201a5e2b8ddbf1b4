//! On-disk triangle cache: one JSON-lines file per family and gamma, led by a
//! header line carrying the schema version and a SHA-256 of the body.

use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use lslab_core::export::{read_jsonl, records, triangle_from_records, EntryRecord};
use lslab_core::triangle::StirlingTriangle;
use lslab_core::GammaParam;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const SCHEMA: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct Header {
    pub schema: u32,
    pub family: String,
    pub gamma: String,
    pub n_max: usize,
    pub hash: String,
}

#[derive(Debug)]
pub enum Lookup {
    Hit(StirlingTriangle),
    Miss,
    Corrupt(String),
}

pub fn cache_path(dir: &Path, family: &str, gamma: &GammaParam) -> PathBuf {
    let g = gamma.to_string().replace('/', "_");
    dir.join(format!("{family}_{g}.jsonl"))
}

fn body_of(tri: &StirlingTriangle) -> Vec<u8> {
    let mut body = Vec::new();
    for rec in records(tri) {
        serde_json::to_writer(&mut body, &rec).expect("records serialize");
        body.push(b'\n');
    }
    body
}

fn digest(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Reads the cache entry; a triangle with more rows than requested is cut down.
pub fn load(dir: &Path, family: &str, gamma: &GammaParam, n_max: usize) -> Lookup {
    let path = cache_path(dir, family, gamma);
    let Ok(file) = fs::File::open(&path) else {
        return Lookup::Miss;
    };
    let mut reader = BufReader::new(file);
    let mut first = String::new();
    if reader.read_line(&mut first).is_err() {
        return Lookup::Corrupt(format!("{}: unreadable header", path.display()));
    }
    let header: Header = match serde_json::from_str(first.trim_end()) {
        Ok(h) => h,
        Err(e) => return Lookup::Corrupt(format!("{}: bad header ({e})", path.display())),
    };
    if header.schema != SCHEMA || header.family != family || header.gamma != gamma.to_string() {
        return Lookup::Miss;
    }
    if header.n_max < n_max {
        return Lookup::Miss;
    }
    let mut body = Vec::new();
    if std::io::Read::read_to_end(&mut reader, &mut body).is_err() {
        return Lookup::Corrupt(format!("{}: unreadable body", path.display()));
    }
    if digest(&body) != header.hash {
        return Lookup::Corrupt(format!("{}: hash mismatch", path.display()));
    }
    let recs = match read_jsonl(body.as_slice()) {
        Ok(r) => r,
        Err(e) => return Lookup::Corrupt(format!("{}: {e}", path.display())),
    };
    let wanted: Vec<EntryRecord> = recs.into_iter().filter(|r| r.n <= n_max).collect();
    match triangle_from_records(gamma.clone(), &wanted) {
        Ok(t) if t.max_n() == n_max => Lookup::Hit(t),
        Ok(_) => Lookup::Corrupt(format!("{}: row count does not match header", path.display())),
        Err(e) => Lookup::Corrupt(format!("{}: {e}", path.display())),
    }
}

/// Writes the entry through a temporary file and a rename.
pub fn store(dir: &Path, family: &str, tri: &StirlingTriangle) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    let body = body_of(tri);
    let header = Header {
        schema: SCHEMA,
        family: family.to_string(),
        gamma: tri.gamma().to_string(),
        n_max: tri.max_n(),
        hash: digest(&body),
    };
    let path = cache_path(dir, family, tri.gamma());
    let tmp = path.with_extension("jsonl.tmp");
    {
        let mut f = fs::File::create(&tmp)?;
        serde_json::to_writer(&mut f, &header)?;
        f.write_all(b"\n")?;
        f.write_all(&body)?;
        f.sync_all()?;
    }
    fs::rename(tmp, path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_and_truncation() {
        let dir = tempfile::tempdir().unwrap();
        let tri = StirlingTriangle::build(GammaParam::legendre(), 12).unwrap();
        store(dir.path(), "legendre", &tri).unwrap();
        match load(dir.path(), "legendre", &GammaParam::legendre(), 12) {
            Lookup::Hit(t) => assert_eq!(t, tri),
            other => panic!("{other:?}"),
        }
        match load(dir.path(), "legendre", &GammaParam::legendre(), 5) {
            Lookup::Hit(t) => assert_eq!(t.max_n(), 5),
            other => panic!("{other:?}"),
        }
        assert!(matches!(load(dir.path(), "legendre", &GammaParam::legendre(), 13), Lookup::Miss));
        assert!(matches!(load(dir.path(), "chebyshev", &GammaParam::chebyshev(), 3), Lookup::Miss));
    }

    #[test]
    fn tampering_is_detected() {
        let dir = tempfile::tempdir().unwrap();
        let tri = StirlingTriangle::build(GammaParam::chebyshev(), 6).unwrap();
        store(dir.path(), "chebyshev", &tri).unwrap();
        let path = cache_path(dir.path(), "chebyshev", &GammaParam::chebyshev());
        let text = fs::read_to_string(&path).unwrap();
        fs::write(&path, text.replace("\"value\":\"5\"", "\"value\":\"6\"")).unwrap();
        assert!(matches!(load(dir.path(), "chebyshev", &GammaParam::chebyshev(), 6), Lookup::Corrupt(_)));
    }
}
