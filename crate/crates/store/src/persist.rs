//! Single-file index persistence.
//!
//! Layout (all integers little-endian):
//!
//! ```text
//! magic    [u8; 4] = b"SGDB"
//! version  u32     = 1
//! dim      u32
//! count    u64
//! entries  count × { id_len: u32, id: [u8], vector: dim × f32 }
//! doc_len  u64
//! docs     doc_len bytes of JSON (Vec<Document>, entry order)
//! ```

use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use genpipe::Document;

use crate::index::{IndexEntry, VectorIndex};
use crate::StoreError;

const MAGIC: [u8; 4] = *b"SGDB";
const VERSION: u32 = 1;

/// Writes `index` to `path`, overwriting any existing file.
pub fn persist_index(index: &VectorIndex, path: &Path) -> Result<(), StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(io_err)?;
        }
    }
    let mut w = BufWriter::new(std::fs::File::create(path).map_err(io_err)?);
    w.write_all(&MAGIC).map_err(io_err)?;
    w.write_all(&VERSION.to_le_bytes()).map_err(io_err)?;
    w.write_all(&(index.dimension() as u32).to_le_bytes())
        .map_err(io_err)?;
    w.write_all(&(index.len() as u64).to_le_bytes())
        .map_err(io_err)?;
    for entry in index.entries() {
        let id = entry.doc_id.as_bytes();
        w.write_all(&(id.len() as u32).to_le_bytes()).map_err(io_err)?;
        w.write_all(id).map_err(io_err)?;
        for &x in &entry.vector {
            w.write_all(&x.to_le_bytes()).map_err(io_err)?;
        }
    }
    let docs: Vec<&Document> = index.entries().iter().map(|e| &e.document).collect();
    let json = serde_json::to_vec(&docs).expect("documents serialize");
    w.write_all(&(json.len() as u64).to_le_bytes()).map_err(io_err)?;
    w.write_all(&json).map_err(io_err)?;
    w.flush().map_err(io_err)?;
    Ok(())
}

/// Loads an index previously written by [`persist_index`].
pub fn load_index(path: &Path) -> Result<VectorIndex, StoreError> {
    let io_err = |source| StoreError::Io {
        path: path.display().to_string(),
        source,
    };
    let corrupt = |reason: &str| StoreError::Corrupt {
        path: path.display().to_string(),
        reason: reason.to_string(),
    };
    let mut r = BufReader::new(std::fs::File::open(path).map_err(io_err)?);

    let mut magic = [0u8; 4];
    read_exact(&mut r, &mut magic).map_err(|_| corrupt("missing header"))?;
    if magic != MAGIC {
        return Err(corrupt("bad magic"));
    }
    let version = read_u32(&mut r).map_err(|_| corrupt("truncated version"))?;
    if version != VERSION {
        return Err(StoreError::VersionMismatch {
            path: path.display().to_string(),
            found: version,
            expected: VERSION,
        });
    }
    let dim = read_u32(&mut r).map_err(|_| corrupt("truncated dimension"))? as usize;
    let count = read_u64(&mut r).map_err(|_| corrupt("truncated count"))? as usize;

    let mut ids = Vec::with_capacity(count);
    let mut vectors = Vec::with_capacity(count);
    for _ in 0..count {
        let id_len = read_u32(&mut r).map_err(|_| corrupt("truncated entry id length"))? as usize;
        let mut id = vec![0u8; id_len];
        read_exact(&mut r, &mut id).map_err(|_| corrupt("truncated entry id"))?;
        let id = String::from_utf8(id).map_err(|_| corrupt("entry id is not utf-8"))?;
        let mut vector = Vec::with_capacity(dim);
        for _ in 0..dim {
            let mut b = [0u8; 4];
            read_exact(&mut r, &mut b).map_err(|_| corrupt("truncated vector"))?;
            vector.push(f32::from_le_bytes(b));
        }
        ids.push(id);
        vectors.push(vector);
    }
    let doc_len = read_u64(&mut r).map_err(|_| corrupt("truncated document block length"))? as usize;
    let mut json = vec![0u8; doc_len];
    read_exact(&mut r, &mut json).map_err(|_| corrupt("truncated document block"))?;
    let documents: Vec<Document> =
        serde_json::from_slice(&json).map_err(|_| corrupt("document block is not valid JSON"))?;
    if documents.len() != count {
        return Err(corrupt("document count does not match entry count"));
    }

    let entries: Vec<IndexEntry> = ids
        .into_iter()
        .zip(vectors)
        .zip(documents)
        .map(|((doc_id, vector), document)| {
            if document.doc_id != doc_id {
                return Err(corrupt("entry/document id mismatch"));
            }
            Ok(IndexEntry {
                doc_id,
                vector,
                document,
            })
        })
        .collect::<Result<_, _>>()?;
    Ok(VectorIndex::from_parts(dim, entries))
}

fn read_exact(r: &mut impl Read, buf: &mut [u8]) -> std::io::Result<()> {
    r.read_exact(buf)
}

fn read_u32(r: &mut impl Read) -> std::io::Result<u32> {
    let mut b = [0u8; 4];
    r.read_exact(&mut b)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64(r: &mut impl Read) -> std::io::Result<u64> {
    let mut b = [0u8; 8];
    r.read_exact(&mut b)?;
    Ok(u64::from_le_bytes(b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embed::HashedBowEmbedder;
    use crate::index::index_documents;
    use genpipe::DocMetadata;

    fn doc(i: usize) -> Document {
        Document {
            doc_id: format!("p{i}/d0"),
            content: format!("content number {i} with words {}", i % 5),
            metadata: DocMetadata {
                timestamp: "1990-09".parse().unwrap(),
                names: vec![format!("Name{i}")],
                doc_type: "Log".into(),
            },
            source: (format!("p{i}"), 0),
            anonymized: i % 3 == 0,
        }
    }

    #[test]
    fn round_trip_preserves_every_entry() {
        let e = HashedBowEmbedder::default();
        let docs: Vec<Document> = (0..200).map(doc).collect();
        let idx = index_documents(&docs, &e).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.sgdb");
        persist_index(&idx, &path).unwrap();
        let loaded = load_index(&path).unwrap();
        assert_eq!(loaded.dimension(), idx.dimension());
        assert_eq!(loaded.len(), idx.len());
        for (a, b) in idx.entries().iter().zip(loaded.entries()) {
            assert_eq!(a.doc_id, b.doc_id);
            assert_eq!(a.vector, b.vector);
            assert_eq!(a.document, b.document);
        }
        // Re-persisting the loaded index is byte-identical.
        let path2 = dir.path().join("db2.sgdb");
        persist_index(&loaded, &path2).unwrap();
        assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&path2).unwrap());
    }

    #[test]
    fn truncated_files_are_corrupt() {
        let e = HashedBowEmbedder::default();
        let docs: Vec<Document> = (0..10).map(doc).collect();
        let idx = index_documents(&docs, &e).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.sgdb");
        persist_index(&idx, &path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        let cut = dir.path().join("cut.sgdb");
        std::fs::write(&cut, &bytes[..bytes.len() / 2]).unwrap();
        assert!(matches!(load_index(&cut), Err(StoreError::Corrupt { .. })));
    }

    #[test]
    fn wrong_version_is_reported() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.sgdb");
        let mut bytes = Vec::new();
        bytes.extend_from_slice(b"SGDB");
        bytes.extend_from_slice(&9u32.to_le_bytes());
        bytes.extend_from_slice(&[0u8; 16]);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            load_index(&path),
            Err(StoreError::VersionMismatch { found: 9, .. })
        ));
    }

    #[test]
    fn bad_magic_is_corrupt() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("db.sgdb");
        std::fs::write(&path, b"NOPE....rest").unwrap();
        assert!(matches!(load_index(&path), Err(StoreError::Corrupt { .. })));
    }
}
