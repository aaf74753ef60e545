//! Exact vector index with paginated, capped retrieval.

use std::collections::BTreeSet;

use genpipe::Document;
use serde::{Deserialize, Serialize};

use crate::embed::{cosine_similarity, Embedder};
use crate::StoreError;

/// Documents returned per page.
pub const PAGE_SIZE: usize = 5;
/// Maximum `next_page` calls after one search (so at most
/// `PAGE_SIZE × (1 + MAX_NEXT_PAGES) = 100` ranks are reachable).
pub const MAX_NEXT_PAGES: usize = 19;
/// Wire text returned once a ranking is exhausted or the page cap is hit.
pub const EXHAUSTED_MESSAGE: &str = "We have iterated through all the pages.";

/// One indexed document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IndexEntry {
    pub doc_id: String,
    pub vector: Vec<f32>,
    pub document: Document,
}

/// Immutable exact-scan vector index.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VectorIndex {
    dimension: usize,
    entries: Vec<IndexEntry>,
    /// Fingerprint binding cursors to the index they came from.
    fingerprint: u64,
}

/// Pagination state for one search. Cursors are session-local; they hold
/// the complete ranking so later pages need no re-ranking.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SearchCursor {
    ranked_doc_ids: Vec<String>,
    next_offset: usize,
    pages_served: usize,
    index_fingerprint: u64,
}

impl SearchCursor {
    pub fn pages_served(&self) -> usize {
        self.pages_served
    }

    pub fn next_offset(&self) -> usize {
        self.next_offset
    }

    /// Full ranking this cursor walks (most similar first).
    pub fn ranked_doc_ids(&self) -> &[String] {
        &self.ranked_doc_ids
    }
}

/// Result of a pagination step.
#[derive(Debug, Clone)]
pub enum PageResult {
    Page {
        documents: Vec<Document>,
        cursor: SearchCursor,
    },
    /// No further pages; render as [`EXHAUSTED_MESSAGE`].
    Exhausted,
}

impl VectorIndex {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[IndexEntry] {
        &self.entries
    }

    pub fn get(&self, doc_id: &str) -> Option<&Document> {
        self.entries
            .iter()
            .find(|e| e.doc_id == doc_id)
            .map(|e| &e.document)
    }

    pub(crate) fn fingerprint(&self) -> u64 {
        self.fingerprint
    }

    pub(crate) fn from_parts(dimension: usize, entries: Vec<IndexEntry>) -> Self {
        let fingerprint = fingerprint_of(dimension, &entries);
        Self {
            dimension,
            entries,
            fingerprint,
        }
    }
}

fn fingerprint_of(dimension: usize, entries: &[IndexEntry]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    let mut mix = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    mix(&(dimension as u64).to_le_bytes());
    mix(&(entries.len() as u64).to_le_bytes());
    for e in entries {
        mix(e.doc_id.as_bytes());
        mix(b"\x1f");
    }
    h
}

/// Builds an index by embedding each document's content (id and metadata
/// are not embedded).
pub fn index_documents(
    documents: &[Document],
    embedder: &dyn Embedder,
) -> Result<VectorIndex, StoreError> {
    if documents.is_empty() {
        return Err(StoreError::EmptyIndex);
    }
    let dimension = embedder.dimension();
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut entries = Vec::with_capacity(documents.len());
    for doc in documents {
        if !seen.insert(&doc.doc_id) {
            return Err(StoreError::DuplicateDocId(doc.doc_id.clone()));
        }
        let vector = embedder.embed(&doc.content);
        if vector.len() != dimension {
            return Err(StoreError::DimensionMismatch {
                doc_id: doc.doc_id.clone(),
                expected: dimension,
                got: vector.len(),
            });
        }
        entries.push(IndexEntry {
            doc_id: doc.doc_id.clone(),
            vector,
            document: doc.clone(),
        });
    }
    Ok(VectorIndex::from_parts(dimension, entries))
}

/// Ranks every document against `query_text` and returns the first page
/// plus a cursor positioned after it.
pub fn search(
    index: &VectorIndex,
    query_text: &str,
    embedder: &dyn Embedder,
) -> Result<(Vec<Document>, SearchCursor), StoreError> {
    if index.is_empty() {
        return Err(StoreError::EmptyIndex);
    }
    if query_text.trim().is_empty() {
        return Err(StoreError::EmptyQuery);
    }
    let query_vector = embedder.embed(query_text);
    let mut ranked: Vec<(f64, &IndexEntry)> = index
        .entries
        .iter()
        .map(|e| (cosine_similarity(&query_vector, &e.vector), e))
        .collect();
    ranked.sort_by(|(sa, ea), (sb, eb)| {
        sb.total_cmp(sa).then_with(|| ea.doc_id.cmp(&eb.doc_id))
    });
    let ranked_doc_ids: Vec<String> = ranked.iter().map(|(_, e)| e.doc_id.clone()).collect();
    let page: Vec<Document> = ranked
        .iter()
        .take(PAGE_SIZE)
        .map(|(_, e)| e.document.clone())
        .collect();
    let cursor = SearchCursor {
        ranked_doc_ids,
        next_offset: page.len(),
        pages_served: 1,
        index_fingerprint: index.fingerprint(),
    };
    Ok((page, cursor))
}

/// Serves the next page of a previous search, or the exhausted signal when
/// the ranking has ended or the page cap (1 search + 19 next pages) is hit.
pub fn next_page(index: &VectorIndex, cursor: &SearchCursor) -> Result<PageResult, StoreError> {
    if cursor.index_fingerprint != index.fingerprint() {
        return Err(StoreError::ForeignCursor);
    }
    if cursor.pages_served > MAX_NEXT_PAGES || cursor.next_offset >= cursor.ranked_doc_ids.len() {
        return Ok(PageResult::Exhausted);
    }
    let end = (cursor.next_offset + PAGE_SIZE).min(cursor.ranked_doc_ids.len());
    let documents: Vec<Document> = cursor.ranked_doc_ids[cursor.next_offset..end]
        .iter()
        .map(|id| {
            index
                .get(id)
                .cloned()
                .ok_or(StoreError::ForeignCursor)
        })
        .collect::<Result<_, _>>()?;
    let cursor = SearchCursor {
        ranked_doc_ids: cursor.ranked_doc_ids.clone(),
        next_offset: end,
        pages_served: cursor.pages_served + 1,
        index_fingerprint: cursor.index_fingerprint,
    };
    Ok(PageResult::Page { documents, cursor })
}
