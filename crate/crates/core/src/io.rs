//! Line-delimited JSON helpers with transparent gzip support.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::de::DeserializeOwned;
use serde::Serialize;

use crate::error::{Error, Result};

/// Opens `path` for buffered reading, decompressing when the file starts
/// with the gzip magic bytes.
pub fn open_reader(path: impl AsRef<Path>) -> Result<Box<dyn BufRead>> {
    let mut file = File::open(path)?;
    let mut magic = [0u8; 2];
    let n = file.read(&mut magic)?;
    let head = std::io::Cursor::new(magic[..n].to_vec()).chain(file);
    if n == 2 && magic == [0x1f, 0x8b] {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(head))))
    } else {
        Ok(Box::new(BufReader::new(head)))
    }
}

/// Creates `path` for writing; a `.gz` extension enables compression.
pub fn create_writer(path: impl AsRef<Path>) -> Result<Box<dyn Write>> {
    let path = path.as_ref();
    let file = BufWriter::new(File::create(path)?);
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(GzEncoder::new(file, Compression::default())))
    } else {
        Ok(Box::new(file))
    }
}

pub fn read_jsonl<T: DeserializeOwned>(reader: impl BufRead) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line).map_err(|e| Error::Syntax { line: i + 1, message: e.to_string() })?;
        out.push(value);
    }
    Ok(out)
}

pub fn load_jsonl<T: DeserializeOwned>(path: impl AsRef<Path>) -> Result<Vec<T>> {
    read_jsonl(open_reader(path)?)
}

pub fn write_jsonl<T: Serialize>(items: &[T], mut out: impl Write) -> Result<()> {
    for item in items {
        serde_json::to_writer(&mut out, item)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}

pub fn save_jsonl<T: Serialize>(items: &[T], path: impl AsRef<Path>) -> Result<()> {
    write_jsonl(items, create_writer(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gzip_is_transparent() {
        let dir = tempfile::tempdir().unwrap();
        let items = vec![vec![1, 2], vec![3]];
        for name in ["a.jsonl", "a.jsonl.gz"] {
            let path = dir.path().join(name);
            save_jsonl(&items, &path).unwrap();
            let back: Vec<Vec<i32>> = load_jsonl(&path).unwrap();
            assert_eq!(back, items);
        }
    }
}
