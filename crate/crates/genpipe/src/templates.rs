//! Prompt templates for every model-backed stage.
//!
//! Templates live as plain text files under `templates/` and are embedded at
//! compile time. Each template is a complete system prompt; stage inputs are
//! passed as a JSON object in the user prompt, which keeps them trivially
//! machine-parseable for the mock backend.

pub const ENTITY_EXTRACTION: &str = include_str!("../templates/entity_extraction.txt");
pub const SPECIALIZE: &str = include_str!("../templates/specialize.txt");
pub const SHARD: &str = include_str!("../templates/shard.txt");
pub const DOCGEN: &str = include_str!("../templates/docgen.txt");
pub const INDEPENDENCE: &str = include_str!("../templates/independence.txt");
pub const ANONYMIZE: &str = include_str!("../templates/anonymize.txt");
pub const SOLVE: &str = include_str!("../templates/solve.txt");

/// Stable markers used by backends to recognize which stage is calling.
/// Each is a substring of exactly one template's opening line.
pub mod markers {
    pub const ENTITY_EXTRACTION: &str = "narrative analysis and entity extraction";
    pub const SPECIALIZE: &str = "replace a generic entity with a specific, named entity";
    pub const SHARD: &str = "self-contained factual premises";
    pub const DOCGEN: &str = "realistic, contextualized documents";
    pub const INDEPENDENCE: &str = "Independence Checker Agent";
    pub const ANONYMIZE: &str = "Anonymizer Agent";
    pub const SOLVE: &str = "extract the relevant quantities";
}
