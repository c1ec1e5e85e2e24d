//! Key-file I/O: the fast path is raw little-endian 64-bit integers (the
//! benchmark key type, zero parsing); `text` mode accepts one decimal value
//! per line for hand-written inputs.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};

/// Reads a key file. `text` selects one-decimal-per-line parsing; otherwise
/// the file must be a whole number of little-endian 8-byte values.
pub fn read_keys(path: &Path, text: bool) -> Result<Vec<u64>> {
    if text {
        read_text_keys(path)
    } else {
        read_raw_keys(path)
    }
}

fn read_raw_keys(path: &Path) -> Result<Vec<u64>> {
    let bytes = fs::read(path).with_context(|| format!("reading key file {}", path.display()))?;
    if bytes.len() % 8 != 0 {
        bail!(
            "key file {} holds {} bytes, not a whole number of 8-byte keys",
            path.display(),
            bytes.len()
        );
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|chunk| u64::from_le_bytes(chunk.try_into().expect("8-byte chunk")))
        .collect())
}

fn read_text_keys(path: &Path) -> Result<Vec<u64>> {
    let content = fs::read_to_string(path)
        .with_context(|| format!("reading key file {}", path.display()))?;
    let mut keys = Vec::new();
    for (index, line) in content.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let key = line.parse::<u64>().with_context(|| {
            format!(
                "key file {} line {}: {line:?} is not a decimal 64-bit value",
                path.display(),
                index + 1
            )
        })?;
        keys.push(key);
    }
    Ok(keys)
}

/// Writes keys as raw little-endian 8-byte values.
pub fn write_raw_keys(path: &Path, keys: &[u64]) -> Result<()> {
    let mut bytes = Vec::with_capacity(keys.len() * 8);
    for key in keys {
        bytes.extend_from_slice(&key.to_le_bytes());
    }
    fs::write(path, bytes).with_context(|| format!("writing key file {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn raw_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("keys.bin");
        let keys = vec![0u64, 1, u64::MAX, 0x0123_4567_89AB_CDEF];
        write_raw_keys(&path, &keys).unwrap();
        assert_eq!(read_keys(&path, false).unwrap(), keys);
    }

    #[test]
    fn raw_rejects_ragged_files() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ragged.bin");
        fs::write(&path, [1, 2, 3]).unwrap();
        let err = read_keys(&path, false).unwrap_err();
        assert!(err.to_string().contains("8-byte"));
    }

    #[test]
    fn text_parses_one_decimal_per_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("keys.txt");
        fs::write(&path, "7\n\n  42  \n18446744073709551615\n").unwrap();
        assert_eq!(read_keys(&path, true).unwrap(), vec![7, 42, u64::MAX]);
    }

    #[test]
    fn text_reports_the_offending_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        fs::write(&path, "1\nnope\n").unwrap();
        let err = format!("{:#}", read_keys(&path, true).unwrap_err());
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn missing_files_name_the_path() {
        let err = format!(
            "{:#}",
            read_keys(Path::new("/nonexistent/keys.bin"), false).unwrap_err()
        );
        assert!(err.contains("/nonexistent/keys.bin"), "{err}");
    }
}
