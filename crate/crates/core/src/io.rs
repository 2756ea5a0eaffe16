//! Line-delimited JSON helpers and atomic file output.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// A rejected input line or row. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, serde::Deserialize)]
pub struct LineError {
    pub line: usize,
    pub message: String,
}

/// Reads every non-blank line of a JSONL file through `parse`.
///
/// Lines that fail to deserialize or that `parse` rejects are collected
/// into the returned error list instead of aborting the read.
pub fn read_jsonl_with<T, R, F>(path: &Path, parse: F) -> Result<(Vec<R>, Vec<LineError>)>
where
    T: DeserializeOwned,
    F: FnMut(T) -> std::result::Result<R, String>,
{
    let (records, errors) = read_jsonl_numbered(path, parse)?;
    Ok((records.into_iter().map(|(_, r)| r).collect(), errors))
}

/// Records paired with their 1-based line numbers, plus the rejected lines.
pub type Numbered<R> = (Vec<(usize, R)>, Vec<LineError>);

/// Like [`read_jsonl_with`], keeping the 1-based line number of each record.
pub fn read_jsonl_numbered<T, R, F>(path: &Path, mut parse: F) -> Result<Numbered<R>>
where
    T: DeserializeOwned,
    F: FnMut(T) -> std::result::Result<R, String>,
{
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut errors = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed = serde_json::from_str::<T>(&line)
            .map_err(|e| e.to_string())
            .and_then(&mut parse);
        match parsed {
            Ok(rec) => records.push((idx + 1, rec)),
            Err(message) => errors.push(LineError {
                line: idx + 1,
                message,
            }),
        }
    }
    Ok((records, errors))
}

/// Strict variant: the first malformed line is a fatal parse error.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let (records, errors) = read_jsonl_with(path, Ok::<T, String>)?;
    if let Some(err) = errors.into_iter().next() {
        return Err(Error::Parse {
            path: path.to_path_buf(),
            line: err.line,
            message: err.message,
        });
    }
    Ok(records)
}

pub fn to_jsonl<T: Serialize>(records: &[T]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    for rec in records {
        serde_json::to_writer(&mut buf, rec).map_err(|e| Error::invalid(e.to_string()))?;
        buf.push(b'\n');
    }
    Ok(buf)
}

pub fn write_jsonl<T: Serialize>(path: &Path, records: &[T]) -> Result<()> {
    write_atomic(path, &to_jsonl(records)?)
}

/// Writes `bytes` to a temporary file next to `path`, then renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| Error::io(dir, e))?;
    tmp.write_all(bytes).map_err(|e| Error::io(path, e))?;
    tmp.flush().map_err(|e| Error::io(path, e))?;
    tmp.persist(path).map_err(|e| Error::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn malformed_lines_are_reported_with_line_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("x.jsonl");
        std::fs::write(&path, "{\"a\":1}\n\nnot json\n{\"a\":2}\n").unwrap();
        #[derive(serde::Deserialize)]
        struct A {
            a: i32,
        }
        let (recs, errs) = read_jsonl_with(&path, |r: A| Ok(r.a)).unwrap();
        assert_eq!(recs, vec![1, 2]);
        assert_eq!(errs.len(), 1);
        assert_eq!(errs[0].line, 3);
        assert!(read_jsonl::<serde_json::Value>(&path).is_err());
    }

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.txt");
        write_atomic(&path, b"one").unwrap();
        write_atomic(&path, b"two").unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), b"two");
    }
}
