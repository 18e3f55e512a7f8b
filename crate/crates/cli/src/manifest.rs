use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn walk(dir: &Path, base: &Path, out: &mut Vec<(String, PathBuf)>) -> std::io::Result<()> {
    let mut entries: Vec<PathBuf> = fs::read_dir(dir)?.map(|e| e.map(|e| e.path())).collect::<Result<_, _>>()?;
    entries.sort();
    for p in entries {
        if p.is_dir() {
            walk(&p, base, out)?;
        } else {
            let rel = p.strip_prefix(base).unwrap_or(&p).to_string_lossy().replace('\\', "/");
            out.push((rel, p));
        }
    }
    Ok(())
}

/// SHA-256 of a file, or of a directory tree as the sequence of
/// (relative path, file digest) pairs in sorted order.
pub fn digest_path(path: &Path) -> std::io::Result<String> {
    if path.is_dir() {
        let mut files = Vec::new();
        walk(path, path, &mut files)?;
        let mut h = Sha256::new();
        for (rel, p) in files {
            h.update(rel.as_bytes());
            h.update([0]);
            h.update(Sha256::digest(fs::read(&p)?));
        }
        Ok(hex(&h.finalize()))
    } else {
        Ok(hex(&Sha256::digest(fs::read(path)?)))
    }
}

/// Unreadable inputs are recorded as `null` rather than failing the run.
pub fn digest_inputs(inputs: &[PathBuf]) -> BTreeMap<String, Option<String>> {
    inputs
        .iter()
        .map(|p| (p.display().to_string(), digest_path(p).ok()))
        .collect()
}
