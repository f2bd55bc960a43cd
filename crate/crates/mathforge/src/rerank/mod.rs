//! Candidate reranking and evaluation.
//!
//! Candidates are pre-sampled solutions to a problem. This module extracts
//! final answers, decides answer equivalence, and ranks the first K
//! candidates by majority vote, outcome score, aggregated step scores, or
//! an external consistency verdict, with Pass@K as the oracle upper bound.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

mod format;

pub use format::{
    format_orm_example, format_prm_example, format_pairwise_example, parse_prm_example,
    segment_steps, Seq2Seq, StepLabel,
};

/// Consistency verdict from an external checker (a formal-language
/// round-trip in the source setting).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExternalVerdict {
    Consistent,
    Inconsistent,
    #[default]
    Unavailable,
}

/// One sampled solution to a problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Candidate {
    pub problem_id: String,
    pub response: String,
    /// Filled by [`extract_answer`] when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extracted_answer: Option<String>,
    /// Whole-answer score in [0, 1].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub outcome_score: Option<f64>,
    /// Per-step scores in [0, 1], one per segmented response step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step_scores: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "is_unavailable")]
    pub external_verdict: ExternalVerdict,
}

fn is_unavailable(v: &ExternalVerdict) -> bool {
    *v == ExternalVerdict::Unavailable
}

impl Candidate {
    pub fn new(problem_id: impl Into<String>, response: impl Into<String>) -> Self {
        Candidate {
            problem_id: problem_id.into(),
            response: response.into(),
            extracted_answer: None,
            outcome_score: None,
            step_scores: None,
            external_verdict: ExternalVerdict::Unavailable,
        }
    }

    /// The candidate's answer: the cached extraction, or a fresh one.
    pub fn answer(&self) -> Option<String> {
        self.extracted_answer
            .clone()
            .or_else(|| extract_answer(&self.response))
    }
}

/// Pulls the final answer out of a response: the last `\boxed{...}`
/// payload, else the tail of the last "the answer is:" marker. Trailing
/// punctuation is stripped. `None` when neither marker appears.
pub fn extract_answer(response: &str) -> Option<String> {
    if let Some(payload) = last_boxed_payload(response) {
        return Some(tidy_answer(&payload));
    }
    let lower = response.to_lowercase();
    let marker = "the answer is";
    if let Some(pos) = lower.rfind(marker) {
        let mut tail = &response[pos + marker.len()..];
        tail = tail.trim_start_matches([':', ' ']);
        let end = tail.find('\n').unwrap_or(tail.len());
        let cleaned = tidy_answer(&tail[..end]);
        if !cleaned.is_empty() {
            return Some(cleaned);
        }
    }
    None
}

fn last_boxed_payload(text: &str) -> Option<String> {
    let start = text.rfind("\\boxed{")?;
    let inner_start = start + "\\boxed{".len();
    let mut depth = 1usize;
    for (i, c) in text[inner_start..].char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return Some(text[inner_start..inner_start + i].to_string());
                }
            }
            _ => {}
        }
    }
    None
}

fn tidy_answer(raw: &str) -> String {
    raw.trim()
        .trim_end_matches(['.', ',', ';', '!', '?', '$'])
        .trim_start_matches('$')
        .trim()
        .to_string()
}

/// Answer equivalence: numeric answers compare as exact numbers, so
/// `\frac{1}{2}`, `1/2`, and `0.5` coincide; everything else falls back to
/// a normalized string comparison with whitespace, braces, and LaTeX
/// spacing commands stripped.
pub fn answers_equivalent(a: &str, b: &str) -> bool {
    let ta = tidy_answer(a);
    let tb = tidy_answer(b);
    match (parse_numeric(&ta), parse_numeric(&tb)) {
        (Some(x), Some(y)) => x == y,
        _ => normalize_string(&ta) == normalize_string(&tb),
    }
}

fn parse_numeric(s: &str) -> Option<crate::exact::ExactNumber> {
    crate::exact::parse_number(s).ok()
}

fn normalize_string(s: &str) -> String {
    let mut t = s.to_string();
    for cmd in ["\\ ", "\\,", "\\;", "\\:", "\\!", "\\quad", "\\qquad", "\\left", "\\right"] {
        t = t.replace(cmd, "");
    }
    t.chars()
        .filter(|c| !c.is_whitespace() && *c != '{' && *c != '}')
        .collect()
}

/// Reranking method tags.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Maj,
    Orm,
    Prm,
    Lrm,
    Oracle,
}

impl Method {
    pub const RERANKERS: [Method; 4] = [Method::Maj, Method::Orm, Method::Prm, Method::Lrm];

    pub fn tag(&self) -> &'static str {
        match self {
            Method::Maj => "MAJ",
            Method::Orm => "ORM",
            Method::Prm => "PRM",
            Method::Lrm => "LRM",
            Method::Oracle => "Oracle",
        }
    }
}

/// Aggregation of step scores into one candidate score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    #[default]
    Min,
    Product,
    Last,
}

impl std::str::FromStr for Aggregation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min" => Ok(Aggregation::Min),
            "product" => Ok(Aggregation::Product),
            "last" => Ok(Aggregation::Last),
            other => Err(format!("unknown aggregation `{other}`")),
        }
    }
}

impl Aggregation {
    pub fn apply(&self, scores: &[f64]) -> Option<f64> {
        if scores.is_empty() {
            return None;
        }
        Some(match self {
            Aggregation::Min => scores.iter().copied().fold(f64::INFINITY, f64::min),
            Aggregation::Product => scores.iter().product(),
            Aggregation::Last => *scores.last().unwrap(),
        })
    }
}

/// How the external-verdict reranker combines the surviving candidates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LrmCombine {
    /// Majority vote over consistent candidates.
    #[default]
    Vote,
    /// Outcome-score argmax over consistent candidates.
    Orm,
}

/// Result of one reranking call.
#[derive(Debug, Clone, PartialEq)]
pub struct RerankResult {
    pub method: Method,
    pub k: usize,
    /// Chosen candidate index within the K-prefix.
    pub chosen: usize,
    pub diagnostic: Diagnostic,
}

/// Per-method diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagnostic {
    /// Vote count of the winning equivalence class.
    Votes { winning: usize, classes: usize },
    /// Winning score.
    Score(f64),
    /// Consistent-candidate count; `fallback` set when no candidate was
    /// consistent and the vote ran over the whole prefix.
    Filtered { consistent: usize, fallback: bool },
}

/// Errors from reranking calls.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RerankError {
    #[error("empty candidate pool")]
    EmptyPool,
    #[error("candidate {index} is missing {what}")]
    MissingScores { index: usize, what: &'static str },
    #[error("step prefix {index} has no completions")]
    NoCompletions { index: usize },
}

fn check_k(cands: &[Candidate], k: usize) -> Result<usize, RerankError> {
    if k == 0 || cands.is_empty() {
        return Err(RerankError::EmptyPool);
    }
    Ok(k.min(cands.len()))
}

/// Groups the K-prefix into answer-equivalence classes and returns each
/// class as candidate indices, in first-appearance order.
fn equivalence_classes(cands: &[Candidate], k: usize) -> Vec<Vec<usize>> {
    let mut classes: Vec<(Option<String>, Vec<usize>)> = Vec::new();
    for (i, cand) in cands.iter().take(k).enumerate() {
        let answer = cand.answer();
        let slot = match &answer {
            // Unanswered candidates never merge into a class.
            None => None,
            Some(a) => classes
                .iter()
                .position(|(repr, _)| repr.as_deref().is_some_and(|r| answers_equivalent(r, a))),
        };
        match slot {
            Some(idx) => classes[idx].1.push(i),
            None => classes.push((answer, vec![i])),
        }
    }
    classes.into_iter().map(|(_, members)| members).collect()
}

/// Majority voting over the first K candidates. The largest equivalence
/// class wins; ties break to the class that appeared first; the chosen
/// index is the winning class's first member.
pub fn majority_vote(cands: &[Candidate], k: usize) -> Result<RerankResult, RerankError> {
    let k = check_k(cands, k)?;
    let classes = equivalence_classes(cands, k);
    let winning = classes
        .iter()
        .enumerate()
        .max_by(|(ia, a), (ib, b)| a.len().cmp(&b.len()).then(ib.cmp(ia)))
        .expect("k >= 1 yields at least one class");
    Ok(RerankResult {
        method: Method::Maj,
        k,
        chosen: winning.1[0],
        diagnostic: Diagnostic::Votes {
            winning: winning.1.len(),
            classes: classes.len(),
        },
    })
}

fn argmax_scores(scores: &[f64]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate().skip(1) {
        if *s > scores[best] {
            best = i;
        }
    }
    best
}

/// Outcome-score argmax over the first K candidates; ties pick the
/// earliest.
pub fn orm_rerank(cands: &[Candidate], k: usize) -> Result<RerankResult, RerankError> {
    let k = check_k(cands, k)?;
    let scores: Vec<f64> = cands
        .iter()
        .take(k)
        .enumerate()
        .map(|(index, c)| {
            c.outcome_score.ok_or(RerankError::MissingScores {
                index,
                what: "outcome_score",
            })
        })
        .collect::<Result<_, _>>()?;
    let chosen = argmax_scores(&scores);
    Ok(RerankResult {
        method: Method::Orm,
        k,
        chosen,
        diagnostic: Diagnostic::Score(scores[chosen]),
    })
}

/// Aggregated step-score argmax over the first K candidates.
pub fn prm_rerank(
    cands: &[Candidate],
    k: usize,
    aggregation: Aggregation,
) -> Result<RerankResult, RerankError> {
    let k = check_k(cands, k)?;
    let scores: Vec<f64> = cands
        .iter()
        .take(k)
        .enumerate()
        .map(|(index, c)| {
            c.step_scores
                .as_deref()
                .and_then(|s| aggregation.apply(s))
                .ok_or(RerankError::MissingScores {
                    index,
                    what: "step_scores",
                })
        })
        .collect::<Result<_, _>>()?;
    let chosen = argmax_scores(&scores);
    Ok(RerankResult {
        method: Method::Prm,
        k,
        chosen,
        diagnostic: Diagnostic::Score(scores[chosen]),
    })
}

/// Restricts to externally-consistent candidates, then combines. An empty
/// restriction falls back to the whole prefix with the fallback flagged.
pub fn lrm_filter_rerank(
    cands: &[Candidate],
    k: usize,
    combine: LrmCombine,
) -> Result<RerankResult, RerankError> {
    let k = check_k(cands, k)?;
    let consistent: Vec<usize> = (0..k)
        .filter(|&i| cands[i].external_verdict == ExternalVerdict::Consistent)
        .collect();
    let (pool_indices, fallback) = if consistent.is_empty() {
        ((0..k).collect::<Vec<_>>(), true)
    } else {
        (consistent.clone(), false)
    };
    let pool: Vec<Candidate> = pool_indices.iter().map(|&i| cands[i].clone()).collect();
    let inner = match combine {
        LrmCombine::Vote => majority_vote(&pool, pool.len())?,
        LrmCombine::Orm => orm_rerank(&pool, pool.len())?,
    };
    Ok(RerankResult {
        method: Method::Lrm,
        k,
        chosen: pool_indices[inner.chosen],
        diagnostic: Diagnostic::Filtered {
            consistent: consistent.len(),
            fallback,
        },
    })
}

/// Pass@K: true when any of the first K candidates answers equivalently
/// to gold. The upper bound for every reranker.
pub fn pass_at_k_oracle(cands: &[Candidate], gold: &str, k: usize) -> bool {
    cands
        .iter()
        .take(k)
        .any(|c| c.answer().is_some_and(|a| answers_equivalent(&a, gold)))
}

/// One problem's candidate pool plus its gold answer.
#[derive(Debug, Clone)]
pub struct Pool {
    pub problem_id: String,
    pub candidates: Vec<Candidate>,
}

/// Settings for [`rerank_curve`].
#[derive(Debug, Clone)]
pub struct CurveConfig {
    pub methods: Vec<Method>,
    pub ks: Vec<usize>,
    pub aggregation: Aggregation,
    pub lrm_combine: LrmCombine,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            methods: vec![Method::Maj, Method::Orm, Method::Prm, Method::Lrm, Method::Oracle],
            ks: vec![1, 2, 4, 8, 16, 32, 64, 100],
            aggregation: Aggregation::Min,
            lrm_combine: LrmCombine::Vote,
        }
    }
}

/// Accuracy table: per method and K, the fraction of problems whose chosen
/// candidate matches gold (Pass@K for the oracle row).
#[derive(Debug, Clone)]
pub struct CurveTable {
    pub ks: Vec<usize>,
    /// Row per method, in config order.
    pub rows: Vec<(Method, Vec<f64>)>,
    /// Pools smaller than the largest K, reported once.
    pub clipped_pools: usize,
}

impl CurveTable {
    /// Renders as CSV: header `method,K1,K2,...`, one row per method.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method");
        for k in &self.ks {
            out.push(',');
            out.push_str(&k.to_string());
        }
        out.push('\n');
        for (method, cells) in &self.rows {
            out.push_str(method.tag());
            for cell in cells {
                out.push(',');
                out.push_str(&format!("{cell:.4}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Computes the accuracy table over problem pools. Problems are processed
/// in id order, so the result is deterministic.
pub fn rerank_curve(
    pools: &[Pool],
    gold: &BTreeMap<String, String>,
    config: &CurveConfig,
) -> Result<CurveTable, RerankError> {
    let mut sorted: Vec<&Pool> = pools.iter().collect();
    sorted.sort_by(|a, b| a.problem_id.cmp(&b.problem_id));

    let max_k = config.ks.iter().copied().max().unwrap_or(1);
    let clipped_pools = sorted
        .iter()
        .filter(|p| p.candidates.len() < max_k)
        .count();

    let mut rows = Vec::new();
    for &method in &config.methods {
        let mut cells = Vec::new();
        for &k in &config.ks {
            let mut correct = 0usize;
            let mut total = 0usize;
            for pool in &sorted {
                let Some(gold_answer) = gold.get(&pool.problem_id) else {
                    continue;
                };
                total += 1;
                let k_eff = k.min(pool.candidates.len());
                let ok = match method {
                    Method::Oracle => pass_at_k_oracle(&pool.candidates, gold_answer, k_eff),
                    _ => {
                        let result = match method {
                            Method::Maj => majority_vote(&pool.candidates, k_eff)?,
                            Method::Orm => orm_rerank(&pool.candidates, k_eff)?,
                            Method::Prm => prm_rerank(&pool.candidates, k_eff, config.aggregation)?,
                            Method::Lrm => {
                                lrm_filter_rerank(&pool.candidates, k_eff, config.lrm_combine)?
                            }
                            Method::Oracle => unreachable!(),
                        };
                        pool.candidates[result.chosen]
                            .answer()
                            .is_some_and(|a| answers_equivalent(&a, gold_answer))
                    }
                };
                if ok {
                    correct += 1;
                }
            }
            cells.push(if total == 0 {
                0.0
            } else {
                correct as f64 / total as f64
            });
        }
        rows.push((method, cells));
    }

    Ok(CurveTable {
        ks: config.ks.clone(),
        rows,
        clipped_pools,
    })
}

/// A reasoning-step prefix with the final answers of completions sampled
/// from it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StepCompletions {
    pub step_text: String,
    pub completion_answers: Vec<String>,
}

/// Hard estimation of per-step labels: a step is positive iff at least one
/// completion from it reaches the gold answer. Labels are independent per
/// step; a negative step may be followed by a positive one.
pub fn label_steps_from_completions(
    prefixes: &[StepCompletions],
    gold: &str,
) -> Result<Vec<StepLabel>, RerankError> {
    prefixes
        .iter()
        .enumerate()
        .map(|(index, p)| {
            if p.completion_answers.is_empty() {
                return Err(RerankError::NoCompletions { index });
            }
            let positive = p
                .completion_answers
                .iter()
                .any(|a| answers_equivalent(a, gold));
            Ok(if positive {
                StepLabel::Positive
            } else {
                StepLabel::Negative
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cand(answer: &str) -> Candidate {
        Candidate::new("p", format!("Working...\nThe answer is: {answer}."))
    }

    #[test]
    fn extract_answer_marker_and_boxed() {
        assert_eq!(
            extract_answer("Therefore, there are 24 ways. The answer is: 24."),
            Some("24".to_string())
        );
        assert_eq!(
            extract_answer("we get $120 + 360 + 480 + 600 + 1080 = \\boxed{2880}$"),
            Some("2880".to_string())
        );
        assert_eq!(extract_answer("no marker anywhere"), None);
        // Last occurrence wins.
        assert_eq!(
            extract_answer("The answer is: 3. Wait. The answer is: 7."),
            Some("7".to_string())
        );
        // Nested braces survive.
        assert_eq!(
            extract_answer("so $x = \\boxed{\\frac{1}{2}}$"),
            Some("\\frac{1}{2}".to_string())
        );
    }

    #[test]
    fn equivalence_cases() {
        assert!(answers_equivalent("24", "24."));
        assert!(answers_equivalent("\\frac{1}{2}", "0.5"));
        assert!(answers_equivalent("1/2", "0.5"));
        assert!(!answers_equivalent("24", "23"));
        assert!(answers_equivalent("x + y", "x+y"));
        assert!(!answers_equivalent("x + y", "x - y"));
        assert!(answers_equivalent("composite", "composite"));
    }

    #[test]
    fn majority_vote_basics() {
        let cands = vec![cand("24"), cand("24"), cand("7")];
        let result = majority_vote(&cands, 3).unwrap();
        assert_eq!(result.chosen, 0);
        assert_eq!(result.diagnostic, Diagnostic::Votes { winning: 2, classes: 2 });

        // K=1 degenerates to candidate 0.
        let result = majority_vote(&cands, 1).unwrap();
        assert_eq!(result.chosen, 0);

        // Two distinct answers: earliest wins the tie.
        let cands = vec![cand("5"), cand("9")];
        assert_eq!(majority_vote(&cands, 2).unwrap().chosen, 0);

        assert_eq!(majority_vote(&[], 1), Err(RerankError::EmptyPool));
    }

    #[test]
    fn orm_rerank_basics() {
        let mut a = cand("5");
        a.outcome_score = Some(0.2);
        let mut b = cand("9");
        b.outcome_score = Some(0.9);
        let cands = vec![a, b];
        assert_eq!(orm_rerank(&cands, 2).unwrap().chosen, 1);
        assert_eq!(orm_rerank(&cands, 1).unwrap().chosen, 0);

        // Equal scores pick the earliest.
        let mut c = cand("1");
        c.outcome_score = Some(0.5);
        let mut d = cand("2");
        d.outcome_score = Some(0.5);
        assert_eq!(orm_rerank(&[c, d], 2).unwrap().chosen, 0);

        let missing = vec![cand("5")];
        assert!(matches!(
            orm_rerank(&missing, 1),
            Err(RerankError::MissingScores { .. })
        ));
    }

    #[test]
    fn prm_aggregations_diverge() {
        let mut a = cand("5");
        a.step_scores = Some(vec![0.9, 0.9]);
        let mut b = cand("9");
        b.step_scores = Some(vec![0.85]);
        let cands = vec![a, b];
        // min: 0.9 vs 0.85 picks the first; product: 0.81 vs 0.85 picks the second.
        assert_eq!(prm_rerank(&cands, 2, Aggregation::Min).unwrap().chosen, 0);
        assert_eq!(prm_rerank(&cands, 2, Aggregation::Product).unwrap().chosen, 1);
    }

    #[test]
    fn prm_single_step_collapses_to_orm() {
        let mut a = cand("5");
        a.outcome_score = Some(0.3);
        a.step_scores = Some(vec![0.3]);
        let mut b = cand("9");
        b.outcome_score = Some(0.8);
        b.step_scores = Some(vec![0.8]);
        let cands = vec![a, b];
        for agg in [Aggregation::Min, Aggregation::Product, Aggregation::Last] {
            assert_eq!(
                prm_rerank(&cands, 2, agg).unwrap().chosen,
                orm_rerank(&cands, 2).unwrap().chosen
            );
        }
    }

    #[test]
    fn lrm_filters_then_votes() {
        let mut a = cand("7");
        a.external_verdict = ExternalVerdict::Inconsistent;
        let mut b = cand("7");
        b.external_verdict = ExternalVerdict::Inconsistent;
        let mut c = cand("24");
        c.external_verdict = ExternalVerdict::Consistent;
        // 7 is the global majority, but only 24 is consistent.
        let cands = vec![a, b, c];
        let result = lrm_filter_rerank(&cands, 3, LrmCombine::Vote).unwrap();
        assert_eq!(result.chosen, 2);
        assert_eq!(
            result.diagnostic,
            Diagnostic::Filtered { consistent: 1, fallback: false }
        );
    }

    #[test]
    fn lrm_fallback_matches_majority() {
        let mut a = cand("7");
        a.external_verdict = ExternalVerdict::Inconsistent;
        let mut b = cand("7");
        b.external_verdict = ExternalVerdict::Unavailable;
        let mut c = cand("24");
        c.external_verdict = ExternalVerdict::Inconsistent;
        let cands = vec![a, b, c];
        let result = lrm_filter_rerank(&cands, 3, LrmCombine::Vote).unwrap();
        let maj = majority_vote(&cands, 3).unwrap();
        assert_eq!(result.chosen, maj.chosen);
        assert_eq!(
            result.diagnostic,
            Diagnostic::Filtered { consistent: 0, fallback: true }
        );
    }

    #[test]
    fn pass_at_k_prefix_and_monotone() {
        let cands = vec![cand("9"), cand("24")];
        assert!(!pass_at_k_oracle(&cands, "24", 1));
        assert!(pass_at_k_oracle(&cands, "24", 2));
        // Monotone in K by the prefix property.
        for k in 2..=5 {
            assert!(pass_at_k_oracle(&cands, "24", k));
        }
    }

    #[test]
    fn step_labels_hard_estimation() {
        let prefixes = vec![
            StepCompletions {
                step_text: "s1".into(),
                completion_answers: vec!["7".into(), "24".into()],
            },
            StepCompletions {
                step_text: "s2".into(),
                completion_answers: vec!["7".into(), "9".into()],
            },
            StepCompletions {
                step_text: "s3".into(),
                completion_answers: vec!["24".into()],
            },
        ];
        let labels = label_steps_from_completions(&prefixes, "24").unwrap();
        // Independent per step: a negative may be followed by a positive.
        assert_eq!(
            labels,
            vec![StepLabel::Positive, StepLabel::Negative, StepLabel::Positive]
        );

        let empty = vec![StepCompletions {
            step_text: "s".into(),
            completion_answers: vec![],
        }];
        assert!(matches!(
            label_steps_from_completions(&empty, "24"),
            Err(RerankError::NoCompletions { index: 0 })
        ));
    }

    #[test]
    fn curve_all_correct_and_k1_degeneracy() {
        let mut pools = Vec::new();
        for p in 0..4 {
            let mut cands = Vec::new();
            for i in 0..4 {
                let mut c = cand("24");
                c.problem_id = format!("p{p}");
                c.outcome_score = Some(0.1 * i as f64);
                c.step_scores = Some(vec![0.5, 0.1 * i as f64]);
                c.external_verdict = ExternalVerdict::Consistent;
                cands.push(c);
            }
            pools.push(Pool {
                problem_id: format!("p{p}"),
                candidates: cands,
            });
        }
        let gold: BTreeMap<String, String> = (0..4)
            .map(|p| (format!("p{p}"), "24".to_string()))
            .collect();
        let config = CurveConfig {
            ks: vec![1, 2, 4],
            ..CurveConfig::default()
        };
        let table = rerank_curve(&pools, &gold, &config).unwrap();
        for (_, cells) in &table.rows {
            assert!(cells.iter().all(|&c| (c - 1.0).abs() < 1e-12));
        }
        let csv = table.to_csv();
        assert!(csv.starts_with("method,1,2,4\n"), "{csv}");
        assert!(csv.contains("Oracle,1.0000"), "{csv}");
    }
}
