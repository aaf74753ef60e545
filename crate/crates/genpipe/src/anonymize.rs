//! Stage 6: anonymizing a seeded fraction of documents.
//!
//! Selection is uniform without replacement over the whole document set,
//! sized at `round(fraction × N)` (half-up). Name removal is deterministic
//! string surgery: every metadata name (and its possessive form) in the
//! content becomes a generic reference. Names stay available in the
//! document metadata, so an agent can only recover them by finding the
//! document through other clues — which is the point.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::task::Document;

/// How many documents a fraction selects: round-half-up of `fraction × n`.
pub fn anonymize_count(n: usize, fraction: f64) -> usize {
    ((fraction * n as f64) + 0.5).floor() as usize
}

/// Anonymizes `round(fraction × N)` of `documents` in place, chosen
/// uniformly by a ChaCha generator seeded with `rng_seed`. Returns the
/// indices that were anonymized, in ascending order.
pub fn anonymize(documents: &mut [Document], fraction: f64, rng_seed: u64) -> Vec<usize> {
    assert!((0.0..=1.0).contains(&fraction), "fraction out of range");
    let count = anonymize_count(documents.len(), fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut indices: Vec<usize> = (0..documents.len()).collect();
    // Partial Fisher-Yates: the first `count` slots are a uniform sample.
    for i in 0..count {
        let j = rng.random_range(i..indices.len());
        indices.swap(i, j);
    }
    let mut selected: Vec<usize> = indices[..count].to_vec();
    selected.sort_unstable();
    for &idx in &selected {
        let doc = &mut documents[idx];
        doc.content = strip_names(&doc.content, &doc.metadata.names);
        doc.anonymized = true;
    }
    selected
}

/// Replaces each name (longest first, possessives included) with a generic
/// reference. Digits are never touched.
fn strip_names(content: &str, names: &[String]) -> String {
    let mut names: Vec<&String> = names.iter().collect();
    names.sort_by_key(|n| std::cmp::Reverse(n.len()));
    let mut text = content.to_string();
    for name in names {
        if name.is_empty() {
            continue;
        }
        text = text.replace(&format!("{name}'s"), "someone's");
        text = text.replace(name.as_str(), "someone");
    }
    text
}
