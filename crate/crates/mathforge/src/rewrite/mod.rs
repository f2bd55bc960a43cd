//! Rewriting single-jump calculations inside chain-of-thought text.
//!
//! A line like `$(12+17)^3 = 24389$` asks a reader to produce the result in
//! one leap. [`rewrite_cot`] finds such fully numeric equation runs and
//! expands each into a chain of small verified links,
//! `(12+17)^3 = 29^3 = 841 * 29 = (800 + 40 + 1) * 29 = 23200 + 1160 + 29 = 24389`,
//! leaving every character outside the matched spans untouched. Claims that
//! do not hold are never rewritten into a correct-looking chain; they are
//! reported instead.

use serde::{Deserialize, Serialize};

use crate::claims::{looks_like_ungrounded_equation, scan_runs, Run};
use crate::exact::ExactNumber;
use crate::expr::Expr;
use crate::trace::expansion_chain;

/// A matched, fully numeric equation span.
#[derive(Debug, Clone)]
pub struct EquationSpan {
    /// Byte range in the source text, delimiters excluded.
    pub start: usize,
    pub end: usize,
    /// Leading expression of the run.
    pub lhs: Expr,
    /// Value of the run's final element.
    pub claimed: ExactNumber,
    /// Whether the span sits inside `$...$`.
    pub in_math: bool,
    /// All adjacent links of the run as written verify exactly.
    pub links_hold: bool,
}

/// A region that looks like an equation but cannot be grounded (symbolic
/// variables, unparseable structure).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UnmatchedEquation {
    pub start: usize,
    pub end: usize,
    pub snippet: String,
}

/// Scan result: spans the rewriter can ground, and regions it cannot.
#[derive(Debug)]
pub struct ScanOutcome {
    pub spans: Vec<EquationSpan>,
    pub unmatched: Vec<UnmatchedEquation>,
}

/// Expansion failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RewriteError {
    /// The claimed value differs from exact evaluation; the span must not
    /// be rewritten.
    #[error("claimed {claimed} but `{lhs}` evaluates to {actual}")]
    ClaimedValueWrong {
        lhs: String,
        claimed: String,
        actual: String,
    },
    #[error("expansion failed: {0}")]
    Expansion(String),
}

/// Options for [`rewrite_cot`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RewriteConfig {
    /// Longest chain emitted, counted in chain elements. Longer expansions
    /// fall back to the bare two-element claim (repetition guard).
    pub max_chain_links: usize,
}

impl Default for RewriteConfig {
    fn default() -> Self {
        RewriteConfig { max_chain_links: 8 }
    }
}

/// Per-document rewrite report.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct RewriteReport {
    pub rewritten: usize,
    /// Spans left alone because they were already the canonical chain.
    pub unchanged: usize,
    /// Spans whose claimed value is wrong; text untouched. Usable as
    /// negative reward-model examples.
    pub wrong_claims: Vec<UnmatchedEquation>,
    pub unmatched: Vec<UnmatchedEquation>,
    /// Spans whose expansion overflowed the link cap.
    pub capped: usize,
}

/// Finds groundable equation spans and ungroundable equation-like regions,
/// in document order.
pub fn find_calc_equations(text: &str) -> ScanOutcome {
    let mut spans = Vec::new();
    for run in scan_runs(text) {
        if !run.is_equality_chain() || run.elements.len() < 2 {
            continue;
        }
        let Some(span) = span_of(&run) else { continue };
        spans.push(span);
    }

    // Equation-like regions the grammar cannot ground: math segments with
    // an `=` and arithmetic structure, but symbols in the way.
    let mut unmatched = Vec::new();
    for (start, end) in math_segments(text) {
        let body = &text[start..end];
        let covered = spans.iter().any(|s| s.start >= start && s.end <= end);
        if !covered && looks_like_ungrounded_equation(body) {
            unmatched.push(UnmatchedEquation {
                start,
                end,
                snippet: body.trim().to_string(),
            });
        }
    }

    ScanOutcome { spans, unmatched }
}

fn span_of(run: &Run) -> Option<EquationSpan> {
    let lhs = run.elements.first()?.clone();
    let last = run.elements.last()?;
    let claimed = last.eval().ok()?;
    let mut links_hold = true;
    for pair in run.elements.windows(2) {
        match (pair[0].eval(), pair[1].eval()) {
            (Ok(a), Ok(b)) if a == b => {}
            _ => {
                links_hold = false;
                break;
            }
        }
    }
    Some(EquationSpan {
        start: run.start,
        end: run.end,
        lhs,
        claimed,
        in_math: run.in_math,
        links_hold,
    })
}

/// Byte ranges of `$...$` bodies, in order.
fn math_segments(text: &str) -> Vec<(usize, usize)> {
    let mut segments = Vec::new();
    let mut open: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c == '$' {
            match open.take() {
                Some(start) => segments.push((start, i)),
                None => open = Some(i + 1),
            }
        }
    }
    segments
}

/// Expands a span into chained-equality text whose every adjacent pair
/// verifies exactly. Fails (and must not rewrite) when the claimed value
/// is wrong.
pub fn expand_equation(span: &EquationSpan, config: &RewriteConfig) -> Result<String, RewriteError> {
    let actual = span
        .lhs
        .eval()
        .map_err(|e| RewriteError::Expansion(e.to_string()))?;
    if actual != span.claimed {
        return Err(RewriteError::ClaimedValueWrong {
            lhs: span.lhs.to_string(),
            claimed: span.claimed.to_string(),
            actual: actual.to_string(),
        });
    }
    if !span.links_hold {
        // Endpoints agree but an intermediate link is false as written:
        // never silently repair.
        return Err(RewriteError::ClaimedValueWrong {
            lhs: span.lhs.to_string(),
            claimed: span.claimed.to_string(),
            actual: "a false intermediate link".to_string(),
        });
    }
    let chain = expansion_chain(&span.lhs).map_err(|e| RewriteError::Expansion(e.to_string()))?;
    let chain = if chain.len() > config.max_chain_links {
        vec![span.lhs.clone(), Expr::lit(span.claimed.clone())]
    } else {
        chain
    };
    Ok(chain
        .iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join(" = "))
}

/// Rewrites every groundable, correct, non-trivial equation span in the
/// text; everything outside the spans is byte-identical. The second pass
/// is a fixed point.
pub fn rewrite_cot(text: &str, config: &RewriteConfig) -> (String, RewriteReport) {
    let outcome = find_calc_equations(text);
    let mut report = RewriteReport {
        unmatched: outcome.unmatched,
        ..RewriteReport::default()
    };

    let mut result = String::with_capacity(text.len());
    let mut cursor = 0usize;
    for span in &outcome.spans {
        result.push_str(&text[cursor..span.start]);
        cursor = span.end;
        let original = &text[span.start..span.end];

        // A literal left-hand side (`7 = 7`) has nothing to expand.
        if span.lhs.as_literal().is_some() {
            report.unchanged += 1;
            result.push_str(original);
            continue;
        }
        match expand_equation(span, config) {
            Ok(expanded) => {
                let counts_as_capped = {
                    let chain_len = expanded.matches(" = ").count() + 1;
                    chain_len == 2 && span.lhs.op_count() > 1
                };
                if expanded == original {
                    report.unchanged += 1;
                } else {
                    report.rewritten += 1;
                    if counts_as_capped {
                        report.capped += 1;
                    }
                }
                result.push_str(&expanded);
            }
            Err(RewriteError::ClaimedValueWrong { .. }) => {
                report.wrong_claims.push(UnmatchedEquation {
                    start: span.start,
                    end: span.end,
                    snippet: original.to_string(),
                });
                result.push_str(original);
            }
            Err(RewriteError::Expansion(_)) => {
                result.push_str(original);
            }
        }
    }
    result.push_str(&text[cursor..]);
    (result, report)
}

/// Partition of augmented records by final-answer agreement with gold.
#[derive(Debug, Default)]
pub struct FilterOutcome<T> {
    pub kept: Vec<T>,
    pub dropped: Vec<T>,
}

/// Keeps a record iff its response's extracted answer is equivalent to the
/// gold answer. Records whose answer cannot be extracted are dropped.
pub fn filter_by_answer<T, F>(records: Vec<T>, response_and_gold: F) -> FilterOutcome<T>
where
    F: Fn(&T) -> (String, String),
{
    let mut outcome = FilterOutcome {
        kept: Vec::new(),
        dropped: Vec::new(),
    };
    for record in records {
        let (response, gold) = response_and_gold(&record);
        let keep = crate::rerank::extract_answer(&response)
            .is_some_and(|a| crate::rerank::answers_equivalent(&a, &gold));
        if keep {
            outcome.kept.push(record);
        } else {
            outcome.dropped.push(record);
        }
    }
    outcome
}

#[cfg(test)]
mod tests {
    use super::*;

    const PAPER_CHAIN: &str =
        "(12 + 17)^3 = 29^3 = 841 * 29 = (800 + 40 + 1) * 29 = 23200 + 1160 + 29 = 24389";

    #[test]
    fn finds_the_inline_power_claim() {
        let text = "so $(12+17)^3 = 24389$ inside";
        let outcome = find_calc_equations(text);
        assert_eq!(outcome.spans.len(), 1);
        let span = &outcome.spans[0];
        assert_eq!(span.claimed, ExactNumber::int(24389));
        assert!(span.in_math);
        assert!(span.links_hold);
        assert!(outcome.unmatched.is_empty());
    }

    #[test]
    fn symbolic_equation_goes_to_unmatched() {
        let text = "We solve $x^3-3x^2+3x-1=0$, and obtain $x=1$";
        let outcome = find_calc_equations(text);
        assert!(outcome.spans.is_empty());
        assert_eq!(outcome.unmatched.len(), 1);
        assert!(outcome.unmatched[0].snippet.contains("x^3"));
    }

    #[test]
    fn empty_text_no_spans() {
        let outcome = find_calc_equations("");
        assert!(outcome.spans.is_empty() && outcome.unmatched.is_empty());
    }

    #[test]
    fn expansion_matches_paper_chain() {
        let text = "$(12+17)^3 = 24389$";
        let outcome = find_calc_equations(text);
        let expanded = expand_equation(&outcome.spans[0], &RewriteConfig::default()).unwrap();
        assert_eq!(expanded, PAPER_CHAIN);
    }

    #[test]
    fn wrong_claim_is_never_rewritten() {
        let (out, report) = rewrite_cot("clearly 2+2 = 5 here", &RewriteConfig::default());
        assert_eq!(out, "clearly 2+2 = 5 here");
        assert_eq!(report.rewritten, 0);
        assert_eq!(report.wrong_claims.len(), 1);
        assert_eq!(report.wrong_claims[0].snippet, "2+2 = 5");
    }

    #[test]
    fn trivial_identity_unchanged() {
        let (out, report) = rewrite_cot("note 7 = 7 holds", &RewriteConfig::default());
        assert_eq!(out, "note 7 = 7 holds");
        assert_eq!(report.rewritten, 0);
        assert_eq!(report.unchanged, 1);
    }

    #[test]
    fn surrounding_prose_untouched() {
        let text = "Before text. $(12+17)^3 = 24389$ After text.";
        let (out, report) = rewrite_cot(text, &RewriteConfig::default());
        assert!(out.starts_with("Before text. $"));
        assert!(out.ends_with("$ After text."));
        assert!(out.contains(PAPER_CHAIN));
        assert_eq!(report.rewritten, 1);
    }

    #[test]
    fn rewrite_is_idempotent() {
        let text = "We see $(12+17)^3 = 24389$ and also 48/2 = 24 clips.";
        let config = RewriteConfig::default();
        let (once, _) = rewrite_cot(text, &config);
        let (twice, report) = rewrite_cot(&once, &config);
        assert_eq!(once, twice);
        assert_eq!(report.rewritten, 0);
    }

    #[test]
    fn every_link_of_rewritten_chain_verifies() {
        let text = "compute $(12+17)^3 = 24389$ then $0.25 + 0.5 = 0.75$ and $1/2 + 1/3 = 5/6$.";
        let (out, report) = rewrite_cot(text, &RewriteConfig::default());
        assert_eq!(report.rewritten, 3);
        for claim in crate::claims::scan_claims(&out) {
            assert_eq!(claim.check(), Ok(true), "claim {claim} in {out}");
        }
    }

    #[test]
    fn correct_noncanonical_chain_is_canonicalized() {
        // Every link holds, so the span rewrites to the canonical chain.
        let text = "$(12+17)^3 = 24390 - 1 + 0 = 24389$";
        let (out, report) = rewrite_cot(text, &RewriteConfig::default());
        assert_eq!(out, format!("${PAPER_CHAIN}$"));
        assert_eq!(report.rewritten, 1);
    }

    #[test]
    fn false_middle_link_is_reported_not_repaired() {
        // Endpoints agree (24389) but the middle link is false.
        let text = "$(12+17)^3 = 24000 = 24389$";
        let (out, report) = rewrite_cot(text, &RewriteConfig::default());
        assert_eq!(out, text);
        assert_eq!(report.rewritten, 0);
        assert_eq!(report.wrong_claims.len(), 1, "{report:?}");
    }

    #[test]
    fn chain_cap_falls_back_to_two_links() {
        let config = RewriteConfig { max_chain_links: 3 };
        let text = "$(12+17)^3 = 24389$";
        let (out, report) = rewrite_cot(text, &config);
        assert_eq!(out, "$(12 + 17)^3 = 24389$");
        assert_eq!(report.rewritten, 1);
        assert_eq!(report.capped, 1);
    }

    #[test]
    fn filter_by_answer_partition() {
        let records = vec![
            ("The answer is: 24.".to_string(), "24".to_string()),
            ("The answer is: 23.".to_string(), "24".to_string()),
            ("The answer is: \\frac{1}{2}.".to_string(), "0.5".to_string()),
            ("no marker".to_string(), "24".to_string()),
        ];
        let outcome = filter_by_answer(records, |r| (r.0.clone(), r.1.clone()));
        assert_eq!(outcome.kept.len(), 2);
        assert_eq!(outcome.dropped.len(), 2);
    }
}
