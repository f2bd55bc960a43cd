//! Exact-formulation decontamination.
//!
//! Every formula inside a protected item is extracted, whitespace-stripped,
//! and concatenated into one key. A document is removed when any of its
//! paragraphs reproduces a protected key exactly — same formulas, same
//! order, down to the symbol. One changed character keeps the document.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::CorpusDoc;

/// Bumped whenever extraction or normalization changes shape.
pub const FORMULA_NORMALIZATION_VERSION: &str = "strip-ws-v1";

/// Math delimiters recognized by the extractor, in scan priority.
const DELIMS: [(&str, &str); 4] = [("$$", "$$"), ("$", "$"), ("\\(", "\\)"), ("\\[", "\\]")];

/// One extracted formula span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FormulaSpan {
    pub content: String,
    /// The span never found its closing delimiter and ran to the end of
    /// the paragraph.
    pub unterminated: bool,
}

/// Extracts the contents of `$...$`, `$$...$$`, `\(...\)`, and `\[...\]`
/// spans in document order, delimiters stripped. Unbalanced delimiters
/// terminate at the end of the paragraph and are flagged.
pub fn extract_formulas(paragraph: &str) -> Vec<FormulaSpan> {
    let mut spans = Vec::new();
    let bytes = paragraph.as_bytes();
    let mut pos = 0usize;
    'scan: while pos < bytes.len() {
        for (open, close) in DELIMS {
            if paragraph[pos..].starts_with(open) {
                let body_start = pos + open.len();
                match paragraph[body_start..].find(close) {
                    Some(rel) => {
                        spans.push(FormulaSpan {
                            content: paragraph[body_start..body_start + rel].to_string(),
                            unterminated: false,
                        });
                        pos = body_start + rel + close.len();
                    }
                    None => {
                        spans.push(FormulaSpan {
                            content: paragraph[body_start..].to_string(),
                            unterminated: true,
                        });
                        pos = bytes.len();
                    }
                }
                continue 'scan;
            }
        }
        pos += paragraph[pos..].chars().next().map_or(1, char::len_utf8);
    }
    spans
}

/// Strips all whitespace; case and command names are preserved.
pub fn normalize_formula(formula: &str) -> String {
    formula.chars().filter(|c| !c.is_whitespace()).collect()
}

/// The normalized formula concatenation of a paragraph; empty when the
/// paragraph has no math.
fn paragraph_key(paragraph: &str) -> String {
    extract_formulas(paragraph)
        .iter()
        .map(|s| normalize_formula(&s.content))
        .collect()
}

/// Set of protected formula-concatenation keys.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FormulaIndex {
    pub normalization: String,
    keys: BTreeSet<String>,
}

impl FormulaIndex {
    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn contains(&self, key: &str) -> bool {
        self.keys.contains(key)
    }

    /// Persists as a sorted key file: a header line recording the
    /// normalization version, then one key per line. Keys contain no
    /// whitespace, so the format is unambiguous.
    pub fn to_file_format(&self) -> String {
        let mut out = format!("# formula-index {}\n", self.normalization);
        for key in &self.keys {
            out.push_str(key);
            out.push('\n');
        }
        out
    }

    pub fn from_file_format(content: &str) -> Result<FormulaIndex, String> {
        let mut lines = content.lines();
        let header = lines.next().ok_or("empty index file")?;
        let normalization = header
            .strip_prefix("# formula-index ")
            .ok_or("missing index header")?
            .to_string();
        let keys: BTreeSet<String> = lines
            .filter(|l| !l.is_empty())
            .map(|l| l.to_string())
            .collect();
        Ok(FormulaIndex {
            normalization,
            keys,
        })
    }
}

/// Builds the index from protected items via the same extraction and
/// normalization applied to candidate paragraphs. Items without formulas
/// contribute no key.
pub fn build_formula_index<'a>(items: impl IntoIterator<Item = &'a str>) -> FormulaIndex {
    let keys = items
        .into_iter()
        .map(paragraph_key)
        .filter(|k| !k.is_empty())
        .collect();
    FormulaIndex {
        normalization: FORMULA_NORMALIZATION_VERSION.to_string(),
        keys,
    }
}

/// One decontamination hit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecontamHit {
    pub doc_id: String,
    pub paragraph: usize,
    pub key: String,
}

/// Decontamination outcome.
#[derive(Debug)]
pub struct DecontamReport {
    pub kept: Vec<CorpusDoc>,
    pub removed: Vec<CorpusDoc>,
    pub hits: Vec<DecontamHit>,
}

/// Removes every document with a paragraph whose normalized formula
/// concatenation hits the index. Paragraphs are blank-line separated; a
/// hit anywhere removes the whole document.
pub fn decontaminate(docs: &[CorpusDoc], index: &FormulaIndex) -> DecontamReport {
    let mut kept = Vec::new();
    let mut removed = Vec::new();
    let mut hits = Vec::new();
    for doc in docs {
        let mut hit = None;
        for (pi, paragraph) in doc.text.split("\n\n").enumerate() {
            let key = paragraph_key(paragraph);
            if !key.is_empty() && index.contains(&key) {
                hit = Some(DecontamHit {
                    doc_id: doc.id.clone(),
                    paragraph: pi,
                    key,
                });
                break;
            }
        }
        match hit {
            Some(h) => {
                hits.push(h);
                removed.push(doc.clone());
            }
            None => kept.push(doc.clone()),
        }
    }
    DecontamReport {
        kept,
        removed,
        hits,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(id: &str, text: &str) -> CorpusDoc {
        CorpusDoc {
            id: id.to_string(),
            text: text.to_string(),
        }
    }

    #[test]
    fn extraction_in_document_order() {
        let spans = extract_formulas("Let $x=2$. Then $x^2=4$.");
        let contents: Vec<&str> = spans.iter().map(|s| s.content.as_str()).collect();
        assert_eq!(contents, vec!["x=2", "x^2=4"]);
        assert!(spans.iter().all(|s| !s.unterminated));
    }

    #[test]
    fn display_and_inline_mix() {
        let spans = extract_formulas("$$a+b$$ text $c$");
        let contents: Vec<&str> = spans.iter().map(|s| s.content.as_str()).collect();
        assert_eq!(contents, vec!["a+b", "c"]);
    }

    #[test]
    fn no_math_no_spans() {
        assert!(extract_formulas("plain prose only").is_empty());
    }

    #[test]
    fn unbalanced_delimiter_flagged() {
        let spans = extract_formulas("broken $x + y to the end");
        assert_eq!(spans.len(), 1);
        assert!(spans[0].unterminated);
        assert_eq!(spans[0].content, "x + y to the end");
    }

    #[test]
    fn latex_bracket_delimiters() {
        let spans = extract_formulas("a \\(u+v\\) b \\[w-z\\] c");
        let contents: Vec<&str> = spans.iter().map(|s| s.content.as_str()).collect();
        assert_eq!(contents, vec!["u+v", "w-z"]);
    }

    #[test]
    fn normalization_strips_whitespace_only() {
        assert_eq!(normalize_formula("x ^ 2 = 4"), "x^2=4");
        assert_eq!(normalize_formula("\\frac {1} {2}"), "\\frac{1}{2}");
        // Case preserved.
        assert_ne!(normalize_formula("X=2"), normalize_formula("x=2"));
    }

    #[test]
    fn verbatim_hit_removed_mutant_kept() {
        let protected = "Find $x$ such that $x^2 - 5x + 6 = 0$.";
        let index = build_formula_index([protected]);
        assert_eq!(index.len(), 1);

        let verbatim = doc("hit", "Some intro.\n\nWe ask for $x$ with $x^2-5x+6=0$. Easy.");
        let mutated = doc("miss", "We ask for $x$ with $x^2-5x+7=0$.");
        let formula_free = doc("free", "No math at all here.");
        let report = decontaminate(&[verbatim, mutated, formula_free], &index);
        let removed_ids: Vec<&str> = report.removed.iter().map(|d| d.id.as_str()).collect();
        assert_eq!(removed_ids, vec!["hit"]);
        assert_eq!(report.kept.len(), 2);
        assert_eq!(report.hits.len(), 1);
        assert_eq!(report.hits[0].paragraph, 1);
    }

    #[test]
    fn items_without_formulas_contribute_no_key() {
        let index = build_formula_index(["no math", "also none"]);
        assert!(index.is_empty());
    }

    #[test]
    fn index_file_round_trip() {
        let index = build_formula_index(["$a+b$", "$c \\cdot d$"]);
        let text = index.to_file_format();
        assert!(text.starts_with("# formula-index strip-ws-v1\n"));
        let back = FormulaIndex::from_file_format(&text).unwrap();
        assert_eq!(back.len(), index.len());
        assert!(back.contains("a+b"));
        assert_eq!(back.normalization, FORMULA_NORMALIZATION_VERSION);
    }
}
