//! Dataset loading from files, with a sha256 manifest entry per source.

use std::path::Path;

use eiscong_core::dataset::{Dataset, BUNDLED_JSONL, BUNDLED_NAME};
use sha2::{Digest, Sha256};

use crate::{CliError, Exit};

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Bundled tables (optionally) plus every file in `paths`, in order.
pub fn load(paths: &[impl AsRef<Path>], bundled: bool) -> Result<Dataset, CliError> {
    let mut d = Dataset::new();
    if bundled {
        d.add_source(BUNDLED_JSONL, BUNDLED_NAME, &sha256_hex(BUNDLED_JSONL.as_bytes()))
            .map_err(|e| CliError::new(Exit::Miss, e.to_string()))?;
    }
    for p in paths {
        let p = p.as_ref();
        let bytes = std::fs::read(p).map_err(|e| CliError::new(Exit::Miss, format!("{}: {}", p.display(), e)))?;
        let text = String::from_utf8(bytes).map_err(|_| CliError::new(Exit::Miss, format!("{}: not UTF-8", p.display())))?;
        d.add_source(&text, &p.display().to_string(), &sha256_hex(text.as_bytes()))
            .map_err(|e| CliError::new(Exit::Miss, e.to_string()))?;
    }
    Ok(d)
}

pub fn manifest_lines(d: &Dataset) -> Vec<String> {
    d.manifest().iter().map(|m| format!("data {} sha256={} records={}", m.source, m.sha256, m.records)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use eiscong_core::dataset::Op;
    use std::io::Write;

    fn tmp(name: &str, body: &str) -> std::path::PathBuf {
        let p = std::env::temp_dir().join(format!("eiscong-load-{}-{}", std::process::id(), name));
        std::fs::File::create(&p).unwrap().write_all(body.as_bytes()).unwrap();
        p
    }

    #[test]
    fn bundled_and_files() {
        let empty: [&str; 0] = [];
        assert!(load(&empty, false).unwrap().is_empty());
        let d = load(&empty, true).unwrap();
        assert_eq!(d.query("D25_17", Op::Tp, 2).unwrap().to_string(), "3600");
        assert_eq!(d.manifest()[0].sha256.len(), 64);

        let a = tmp("a", "{\"space\":\"X\",\"op\":\"T(p)\",\"n\":2,\"value\":\"5\",\"src\":\"first\"}\n");
        let b = tmp("b", "{\"space\":\"X\",\"op\":\"T(p)\",\"n\":2,\"value\":\"6\",\"src\":\"second\"}\n");
        let d = load(&[&a], false).unwrap();
        assert_eq!(d.query("X", Op::Tp, 2).unwrap().to_string(), "5");
        let e = load(&[&a, &b], false).unwrap_err();
        assert_eq!(e.code, Exit::Miss);
        assert!(e.msg.contains("first") && e.msg.contains("second"), "{}", e.msg);
        assert!(load(&[std::path::Path::new("/nonexistent/x.jsonl")], true).is_err());
    }
}
