//! Reward-model training formats.
//!
//! Outcome, process, and pairwise examples all share one seq2seq shape: a
//! natural-language query holding the problem and answer(s), and a response
//! that is either a whole-answer judgment, per-step `<PRM +>` / `<PRM ->`
//! markers, or a preference sentence.

use serde::{Deserialize, Serialize};

/// A query/response training pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Seq2Seq {
    pub query: String,
    pub response: String,
}

/// Per-step label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StepLabel {
    #[serde(rename = "+")]
    Positive,
    #[serde(rename = "-")]
    Negative,
}

impl StepLabel {
    fn marker(&self) -> &'static str {
        match self {
            StepLabel::Positive => "<PRM +>",
            StepLabel::Negative => "<PRM ->",
        }
    }
}

/// Formatting failures.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormatError {
    #[error("{steps} steps but {labels} labels")]
    LengthMismatch { steps: usize, labels: usize },
    #[error("preferred answer must be 1 or 2, got {0}")]
    BadPreference(usize),
    #[error("unparseable step line: {0}")]
    BadStepLine(String),
}

/// Whole-answer judgment pair.
pub fn format_orm_example(question: &str, answer: &str, correct: bool) -> Seq2Seq {
    Seq2Seq {
        query: format!(
            "Given a question and an answer, check is it correct?\nQuestion: {question}\nAnswer: {answer}"
        ),
        response: if correct {
            "This answer is correct.".to_string()
        } else {
            "This answer is wrong.".to_string()
        },
    }
}

/// Per-step judgment pair: the response marks every step with
/// `<PRM +>` or `<PRM ->`.
pub fn format_prm_example(
    question: &str,
    steps: &[String],
    labels: &[StepLabel],
) -> Result<Seq2Seq, FormatError> {
    if steps.len() != labels.len() {
        return Err(FormatError::LengthMismatch {
            steps: steps.len(),
            labels: labels.len(),
        });
    }
    let answer = steps.join("\n");
    let response = steps
        .iter()
        .zip(labels)
        .enumerate()
        .map(|(i, (step, label))| format!("Step {}: {} {}", i + 1, step, label.marker()))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(Seq2Seq {
        query: format!(
            "Given a question and an answer, check is it correct?\nQuestion: {question}\nAnswer: {answer}"
        ),
        response,
    })
}

/// Preference pair between two answers to the same question.
pub fn format_pairwise_example(
    question: &str,
    answer_1: &str,
    answer_2: &str,
    preferred: usize,
) -> Result<Seq2Seq, FormatError> {
    if preferred != 1 && preferred != 2 {
        return Err(FormatError::BadPreference(preferred));
    }
    Ok(Seq2Seq {
        query: format!(
            "Given a question and two answers, which one is better?\nQuestion: {question}\nAnswer 1: {answer_1}\nAnswer 2: {answer_2}"
        ),
        response: format!("Answer {preferred} is better."),
    })
}

/// Recovers steps and labels from a PRM response. Exact inverse of
/// [`format_prm_example`] on its own output.
pub fn parse_prm_example(response: &str) -> Result<(Vec<String>, Vec<StepLabel>), FormatError> {
    let mut steps = Vec::new();
    let mut labels = Vec::new();
    for (i, line) in response.lines().enumerate() {
        let prefix = format!("Step {}: ", i + 1);
        let rest = line
            .strip_prefix(&prefix)
            .ok_or_else(|| FormatError::BadStepLine(line.to_string()))?;
        let (step, label) = if let Some(s) = rest.strip_suffix(" <PRM +>") {
            (s, StepLabel::Positive)
        } else if let Some(s) = rest.strip_suffix(" <PRM ->") {
            (s, StepLabel::Negative)
        } else {
            return Err(FormatError::BadStepLine(line.to_string()));
        };
        steps.push(step.to_string());
        labels.push(label);
    }
    Ok((steps, labels))
}

/// Splits a response into reasoning steps: newline boundaries first, then
/// sentence boundaries outside inline math. Segmentation version 1.
pub fn segment_steps(text: &str) -> Vec<String> {
    let mut steps = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let mut start = 0usize;
        let mut in_math = false;
        let bytes = line.as_bytes();
        let mut i = 0usize;
        while i < bytes.len() {
            match bytes[i] {
                b'$' => in_math = !in_math,
                b'.' if !in_math => {
                    // Sentence boundary: a period followed by whitespace
                    // and an uppercase start, not a decimal point.
                    let next = bytes.get(i + 1).copied();
                    let prev_digit = i > 0 && bytes[i - 1].is_ascii_digit();
                    let next_digit = next.is_some_and(|b| b.is_ascii_digit());
                    if !(prev_digit && next_digit) && next.is_none_or(|b| b == b' ') {
                        let upper_follows = line[i + 1..]
                            .trim_start()
                            .chars()
                            .next()
                            .is_some_and(|c| c.is_uppercase() || c == '$');
                        if next.is_none() || upper_follows {
                            let piece = line[start..=i].trim();
                            if !piece.is_empty() {
                                steps.push(piece.to_string());
                            }
                            start = i + 1;
                        }
                    }
                }
                _ => {}
            }
            i += 1;
        }
        let tail = line[start..].trim();
        if !tail.is_empty() {
            steps.push(tail.to_string());
        }
    }
    steps
}
