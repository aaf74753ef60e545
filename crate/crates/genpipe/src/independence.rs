//! Stage 5: independence verification and patching.

use serde::Deserialize;
use serde_json::json;

use crate::model::{complete_with_retries, parse_json_reply, CompletionParams, TextModel};
use crate::task::Document;
use crate::{templates, GenError};

/// Outcome of checking one document against its sibling premises.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IndependenceVerdict {
    Independent,
    /// The document leaked material from other premises and was rewritten.
    Violated { violations: Vec<String> },
}

#[derive(Deserialize)]
struct IndependenceReply {
    is_independent: bool,
    #[serde(default)]
    violations: Vec<String>,
    #[serde(default)]
    proposed_document: Option<String>,
}

/// Verifies that `document` covers only `target_premise`. On a violation the
/// document's content is replaced by the checker's patched version.
pub fn verify_independence(
    document: &mut Document,
    target_premise: &str,
    other_premises: &[String],
    model: &dyn TextModel,
) -> Result<IndependenceVerdict, GenError> {
    let user = json!({
        "target_premise": target_premise,
        "other_premises": other_premises,
        "document": document.content,
        "metadata": {
            "Type": document.metadata.doc_type,
            "Timestamp": document.metadata.timestamp.to_string(),
            "names": document.metadata.names.join(","),
        },
    })
    .to_string();

    let reply = complete_with_retries(
        model,
        templates::INDEPENDENCE,
        &user,
        &CompletionParams::default(),
        |text| {
            let reply: IndependenceReply = parse_json_reply(text)?;
            if !reply.is_independent {
                // A violated verdict must come with a usable patch.
                match &reply.proposed_document {
                    Some(p) if !p.trim().is_empty() => {}
                    _ => return None,
                }
            }
            Some(reply)
        },
    )
    .map_err(|e| GenError::BadModelOutput {
        stage: "independence verification",
        problem_id: document.source.0.clone(),
        attempts: e.attempts,
        last_output: e.last_output,
    })?;

    if reply.is_independent {
        Ok(IndependenceVerdict::Independent)
    } else {
        document.content = reply
            .proposed_document
            .expect("validated above")
            .trim()
            .to_string();
        Ok(IndependenceVerdict::Violated {
            violations: reply.violations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::DocMetadata;

    fn doc(content: &str) -> Document {
        Document {
            doc_id: "p1/d1".into(),
            content: content.into(),
            metadata: DocMetadata {
                timestamp: "1990-09".parse().unwrap(),
                names: vec!["Natalia".into()],
                doc_type: "Sales Log".into(),
            },
            source: ("p1".into(), 1),
            anonymized: false,
        }
    }

    #[test]
    fn canonical_leak_is_patched() {
        let model = crate::MockModel::new(1);
        let mut d = doc("May sales: 24 clips (half of April's 48)");
        let verdict = verify_independence(
            &mut d,
            "Natalia sold half as many clips in May as in April",
            &["Natalia sold 48 clips in April".to_string()],
            &model,
        )
        .unwrap();
        match verdict {
            IndependenceVerdict::Violated { violations } => {
                assert_eq!(violations.len(), 2);
                assert!(violations[0].contains("48"));
                assert!(violations[1].contains("24"));
            }
            _ => panic!("expected violation"),
        }
        assert_eq!(
            d.content,
            "May sales update: Sold half as many clips as I did in April."
        );
    }

    #[test]
    fn clean_documents_pass_unchanged() {
        let model = crate::MockModel::new(1);
        let original = "Diary: sold half as many clips in May as in April.";
        let mut d = doc(original);
        let verdict = verify_independence(
            &mut d,
            "Natalia sold half as many clips in May as in April",
            &["Natalia sold 48 clips in April".to_string()],
            &model,
        )
        .unwrap();
        assert_eq!(verdict, IndependenceVerdict::Independent);
        assert_eq!(d.content, original);
    }

    #[test]
    fn verdicts_match_the_digit_overlap_oracle() {
        use crate::numeric::extract_number_tokens;
        let model = crate::MockModel::new(5);
        // Random-ish synthetic cases built from a fixed table.
        let cases = [
            ("Log: counted 17 crates today.", "The depot counted 17 crates.", vec!["The truck moved 42 crates."]),
            ("Log: counted 17 crates, matching the 42 moved.", "The depot counted 17 crates.", vec!["The truck moved 42 crates."]),
            ("Note: 9 boxes left (9 is one digit).", "There are 9 boxes.", vec!["The van holds 9 boxes."]),
            ("Recap: 120 units sold, 77 returned.", "120 units were sold.", vec!["77 units were returned.", "Nothing else happened."]),
        ];
        for (content, target, others) in cases {
            let others: Vec<String> = others.into_iter().map(String::from).collect();
            let mut d = doc(content);
            let verdict = verify_independence(&mut d, target, &others, &model).unwrap();
            // Oracle: leaked iff a 2+-digit number token of the content
            // appears in some other premise.
            let foreign: std::collections::BTreeSet<String> = others
                .iter()
                .flat_map(|p| extract_number_tokens(p))
                .filter(|t| t.chars().filter(|c| c.is_ascii_digit()).count() >= 2)
                .collect();
            let leaked = extract_number_tokens(content)
                .into_iter()
                .filter(|t| t.chars().filter(|c| c.is_ascii_digit()).count() >= 2)
                .any(|t| foreign.contains(&t));
            match (&verdict, leaked) {
                (IndependenceVerdict::Independent, false) | (IndependenceVerdict::Violated { .. }, true) => {}
                other => panic!("verdict {other:?} disagrees with oracle for {content:?}"),
            }
            if leaked {
                // The patch must have removed every leaked token.
                for t in extract_number_tokens(&d.content) {
                    assert!(!foreign.contains(&t), "patch left leaked token {t}");
                }
            }
        }
    }
}
