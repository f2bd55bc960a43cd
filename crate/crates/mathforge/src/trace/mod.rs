//! Oracle-verifiable calculation traces.
//!
//! A [`CalcTrace`] is an ordered list of small steps ending in an answer.
//! Each step's text carries claims the claim scanner can re-check exactly,
//! and `depends_on` only ever points backwards, so a trace can be generated
//! left to right without knowledge of later steps. [`verify_trace`] replays
//! every claim and re-derives the answer through a direct evaluation that
//! bypasses the step machinery.

use serde::{Deserialize, Serialize};

use num_bigint::BigInt;

use crate::claims::{scan_claims, Claim};
use crate::exact::{ExactNumber, NumberStyle};
use crate::expr::Expr;

mod arith;
mod game;
mod oracle;
mod prime;
mod triangle;

pub use arith::{
    expansion_chain, trace_bracket_expr, trace_decimal, trace_fraction, trace_fraction_reduce,
    trace_polynomial_eval, trace_power, trace_remainder,
};
pub use game::{enumerate_reachable, solve_game_of_k, GameConfig};
pub use oracle::direct_answer;
pub use prime::{primes_up_to, trace_factorize, trace_prime_check};
pub use triangle::{trace_triangle_area, TriangleConfig};

/// Synthetic task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Bracket,
    Decimal,
    Fraction,
    FractionReduce,
    Remainder,
    Power,
    Polynomial,
    Prime,
    Factorize,
    Triangle,
    GameOfK,
}

impl Family {
    pub const ALL: [Family; 11] = [
        Family::Bracket,
        Family::Decimal,
        Family::Fraction,
        Family::FractionReduce,
        Family::Remainder,
        Family::Power,
        Family::Polynomial,
        Family::Prime,
        Family::Factorize,
        Family::Triangle,
        Family::GameOfK,
    ];

    pub fn tag(&self) -> &'static str {
        match self {
            Family::Bracket => "bracket",
            Family::Decimal => "decimal",
            Family::Fraction => "fraction",
            Family::FractionReduce => "fraction-reduce",
            Family::Remainder => "remainder",
            Family::Power => "power",
            Family::Polynomial => "polynomial",
            Family::Prime => "prime",
            Family::Factorize => "factorize",
            Family::Triangle => "triangle",
            Family::GameOfK => "game-of-k",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Family::ALL.iter().copied().find(|f| f.tag() == tag)
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.tag())
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::from_tag(s).ok_or_else(|| format!("unknown task family `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// An exact rewrite: every claim in the text is an equality.
    Rewrite,
    /// A comparison whose stated relation must hold.
    Compare,
    /// A control-flow decision justified by earlier steps.
    Branch,
    /// A tried combination during search, including dead ends.
    Search,
    /// The concluding step.
    Result,
}

/// One trace step. Only `kind`, `text`, and `depends_on` serialize; the
/// optional values are in-memory conveniences for builders and checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceStep {
    pub kind: StepKind,
    pub text: String,
    #[serde(skip)]
    pub lhs_value: Option<ExactNumber>,
    #[serde(skip)]
    pub rhs_value: Option<ExactNumber>,
    #[serde(default)]
    pub depends_on: Vec<usize>,
}

impl TraceStep {
    pub fn new(kind: StepKind, text: impl Into<String>, depends_on: Vec<usize>) -> Self {
        TraceStep {
            kind,
            text: text.into(),
            lhs_value: None,
            rhs_value: None,
            depends_on,
        }
    }

    pub fn with_values(mut self, lhs: ExactNumber, rhs: ExactNumber) -> Self {
        self.lhs_value = Some(lhs);
        self.rhs_value = Some(rhs);
        self
    }
}

/// Verdict tokens for families whose answer is not a number.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Prime,
    Composite { witness: BigInt },
    Solvable { expression: String },
    Unsolvable,
    InvalidTriangle,
}

/// The answer of a trace: a number, a quotient/remainder pair, a factor
/// multiset, or a verdict token.
#[derive(Debug, Clone, PartialEq)]
pub enum Answer {
    Value(ExactNumber),
    QuotRem {
        quotient: BigInt,
        remainder: BigInt,
    },
    Factors(Vec<BigInt>),
    Verdict(Verdict),
}

impl Answer {
    /// Canonical text used in "The answer is: ..." sentences.
    pub fn display_text(&self) -> String {
        match self {
            Answer::Value(v) => v.to_string(),
            Answer::QuotRem {
                quotient,
                remainder,
            } => format!("{quotient} remainder {remainder}"),
            Answer::Factors(fs) => fs
                .iter()
                .map(|f| f.to_string())
                .collect::<Vec<_>>()
                .join(" * "),
            Answer::Verdict(v) => match v {
                Verdict::Prime => "prime".to_string(),
                Verdict::Composite { .. } => "composite".to_string(),
                Verdict::Solvable { expression } => expression.clone(),
                Verdict::Unsolvable => "unsolvable".to_string(),
                Verdict::InvalidTriangle => "invalid triangle".to_string(),
            },
        }
    }
}

/// A complete calculation trace.
#[derive(Debug, Clone)]
pub struct CalcTrace {
    pub task: Family,
    /// Input expressions; plain numbers are leaf expressions. For
    /// `game-of-k` the final entry is the target.
    pub inputs: Vec<Expr>,
    pub steps: Vec<TraceStep>,
    pub answer: Answer,
}

impl CalcTrace {
    /// Rendered step texts, one line per step.
    pub fn step_texts(&self) -> Vec<&str> {
        self.steps.iter().map(|s| s.text.as_str()).collect()
    }
}

/// Why a step failed verification.
#[derive(Debug, Clone, PartialEq)]
pub enum StepFailure {
    /// `depends_on` references this step or a later one.
    PrefixViolation { offending_index: usize },
    /// A claim in the step text does not hold.
    FalseClaim { claim: String },
    /// A claim could not be evaluated (division by zero and similar).
    ClaimError { detail: String },
    /// Recorded lhs/rhs values of a rewrite step disagree.
    ValueMismatch,
}

/// Outcome of [`verify_trace`].
#[derive(Debug, Clone)]
pub struct VerifyReport {
    /// First failing step, if any.
    pub first_failure: Option<(usize, StepFailure)>,
    /// True when the answer re-derives from the inputs by direct evaluation.
    pub answer_matches_oracle: bool,
    /// Total claims re-checked across all steps.
    pub checked_claims: usize,
}

impl VerifyReport {
    pub fn pass(&self) -> bool {
        self.first_failure.is_none() && self.answer_matches_oracle
    }
}

/// Re-checks every step relation exactly, checks prefix determinism of
/// `depends_on`, and re-derives the answer with [`direct_answer`].
pub fn verify_trace(trace: &CalcTrace) -> VerifyReport {
    let mut checked_claims = 0;
    let mut first_failure = None;

    'steps: for (index, step) in trace.steps.iter().enumerate() {
        for &dep in &step.depends_on {
            if dep >= index {
                first_failure = Some((index, StepFailure::PrefixViolation { offending_index: dep }));
                break 'steps;
            }
        }
        if step.kind == StepKind::Rewrite {
            if let (Some(lhs), Some(rhs)) = (&step.lhs_value, &step.rhs_value) {
                if lhs != rhs {
                    first_failure = Some((index, StepFailure::ValueMismatch));
                    break;
                }
            }
        }
        for claim in scan_claims(&step.text) {
            checked_claims += 1;
            match claim.check() {
                Ok(true) => {}
                Ok(false) => {
                    first_failure = Some((index, StepFailure::FalseClaim { claim: claim.to_string() }));
                    break 'steps;
                }
                Err(e) => {
                    first_failure = Some((index, StepFailure::ClaimError { detail: e.to_string() }));
                    break 'steps;
                }
            }
        }
    }

    let answer_matches_oracle = oracle::answer_agrees(trace);

    VerifyReport {
        first_failure,
        answer_matches_oracle,
        checked_claims,
    }
}

/// Claims found in a single rendered line; used by tests and the book.
pub fn line_claims(text: &str) -> Vec<Claim> {
    scan_claims(text)
}

// --- serialization (frozen JSON schema) ---

#[derive(Serialize, Deserialize)]
struct AnswerRepr {
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    remainder: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    factors: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    verdict: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    expression: Option<String>,
}

impl Serialize for Answer {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut repr = AnswerRepr {
            value: None,
            quotient: None,
            remainder: None,
            factors: None,
            verdict: None,
            witness: None,
            expression: None,
        };
        match self {
            Answer::Value(v) => repr.value = Some(v.to_string()),
            Answer::QuotRem {
                quotient,
                remainder,
            } => {
                repr.quotient = Some(quotient.to_string());
                repr.remainder = Some(remainder.to_string());
            }
            Answer::Factors(fs) => {
                repr.factors = Some(fs.iter().map(|f| f.to_string()).collect());
            }
            Answer::Verdict(v) => match v {
                Verdict::Prime => repr.verdict = Some("prime".into()),
                Verdict::Composite { witness } => {
                    repr.verdict = Some("composite".into());
                    repr.witness = Some(witness.to_string());
                }
                Verdict::Solvable { expression } => {
                    repr.verdict = Some("solvable".into());
                    repr.expression = Some(expression.clone());
                }
                Verdict::Unsolvable => repr.verdict = Some("unsolvable".into()),
                Verdict::InvalidTriangle => repr.verdict = Some("invalid-triangle".into()),
            },
        }
        repr.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Answer {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let repr = AnswerRepr::deserialize(deserializer)?;
        if let Some(v) = repr.value {
            let value = crate::exact::parse_number(&v).map_err(D::Error::custom)?;
            return Ok(Answer::Value(value));
        }
        if let (Some(q), Some(r)) = (&repr.quotient, &repr.remainder) {
            let quotient = q.parse().map_err(D::Error::custom)?;
            let remainder = r.parse().map_err(D::Error::custom)?;
            return Ok(Answer::QuotRem {
                quotient,
                remainder,
            });
        }
        if let Some(fs) = repr.factors {
            let factors = fs
                .iter()
                .map(|f| f.parse().map_err(D::Error::custom))
                .collect::<Result<Vec<BigInt>, _>>()?;
            return Ok(Answer::Factors(factors));
        }
        match repr.verdict.as_deref() {
            Some("prime") => Ok(Answer::Verdict(Verdict::Prime)),
            Some("composite") => {
                let witness = repr
                    .witness
                    .ok_or_else(|| D::Error::custom("composite verdict without witness"))?
                    .parse()
                    .map_err(D::Error::custom)?;
                Ok(Answer::Verdict(Verdict::Composite { witness }))
            }
            Some("solvable") => Ok(Answer::Verdict(Verdict::Solvable {
                expression: repr
                    .expression
                    .ok_or_else(|| D::Error::custom("solvable verdict without expression"))?,
            })),
            Some("unsolvable") => Ok(Answer::Verdict(Verdict::Unsolvable)),
            Some("invalid-triangle") => Ok(Answer::Verdict(Verdict::InvalidTriangle)),
            other => Err(D::Error::custom(format!("unrecognized answer {other:?}"))),
        }
    }
}

impl Serialize for CalcTrace {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("CalcTrace", 4)?;
        s.serialize_field("task", &self.task)?;
        let inputs: Vec<String> = self
            .inputs
            .iter()
            .map(|e| e.render(NumberStyle::Plain))
            .collect();
        s.serialize_field("inputs", &inputs)?;
        s.serialize_field("steps", &self.steps)?;
        s.serialize_field("answer", &self.answer)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for CalcTrace {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        #[derive(Deserialize)]
        struct Repr {
            task: Family,
            inputs: Vec<String>,
            steps: Vec<TraceStep>,
            answer: Answer,
        }
        let repr = Repr::deserialize(deserializer)?;
        let inputs = repr
            .inputs
            .iter()
            .map(|s| crate::expr::parse_expr(s).map_err(D::Error::custom))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CalcTrace {
            task: repr.task,
            inputs,
            steps: repr.steps,
            answer: repr.answer,
        })
    }
}

/// Errors from trace construction.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TraceError {
    #[error("division by zero in `{0}`")]
    DivisionByZeroInExpr(String),
    #[error("division by zero")]
    DivisionByZero,
    #[error("input {0} is too small; need n ≥ 2")]
    InputTooSmall(String),
    #[error("{0}")]
    Invalid(String),
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_built_false_step_fails_at_index() {
        let trace = CalcTrace {
            task: Family::Bracket,
            inputs: vec![crate::expr::parse_expr("2 + 2").unwrap()],
            steps: vec![
                TraceStep::new(StepKind::Rewrite, "2 + 2 = 4", vec![]),
                TraceStep::new(StepKind::Rewrite, "2 + 2 = 5", vec![0]),
            ],
            answer: Answer::Value(ExactNumber::int(4)),
        };
        let report = verify_trace(&trace);
        match report.first_failure {
            Some((1, StepFailure::FalseClaim { .. })) => {}
            other => panic!("expected false claim at step 1, got {other:?}"),
        }
    }

    #[test]
    fn future_dependency_fails_prefix_determinism() {
        // The "bad response" ordering: asserting a right triangle before
        // the squares have been computed.
        let trace = CalcTrace {
            task: Family::Triangle,
            inputs: vec![Expr::int(3), Expr::int(4), Expr::int(5)],
            steps: vec![
                TraceStep::new(
                    StepKind::Branch,
                    "Since this triangle is a right triangle, the area is 3 * 4 / 2 = 6.",
                    vec![1],
                ),
                TraceStep::new(StepKind::Compare, "3^2 + 4^2 = 5^2", vec![]),
            ],
            answer: Answer::Value(ExactNumber::int(6)),
        };
        let report = verify_trace(&trace);
        match report.first_failure {
            Some((0, StepFailure::PrefixViolation { offending_index: 1 })) => {}
            other => panic!("expected prefix violation, got {other:?}"),
        }
    }

    #[test]
    fn trace_json_schema_round_trip() {
        let trace = CalcTrace {
            task: Family::Prime,
            inputs: vec![Expr::int(2)],
            steps: vec![TraceStep::new(StepKind::Result, "2 is a prime number.", vec![])],
            answer: Answer::Verdict(Verdict::Prime),
        };
        let json = serde_json::to_string(&trace).unwrap();
        assert!(json.contains("\"task\":\"prime\""));
        assert!(json.contains("\"verdict\":\"prime\""));
        let back: CalcTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back.answer, trace.answer);
        assert_eq!(back.steps.len(), 1);
    }

    #[test]
    fn answer_repr_variants_round_trip() {
        let answers = [
            Answer::Value(ExactNumber::rational(5, 6).unwrap()),
            Answer::QuotRem {
                quotient: BigInt::from(311),
                remainder: BigInt::from(0),
            },
            Answer::Factors(vec![BigInt::from(2), BigInt::from(2), BigInt::from(3)]),
            Answer::Verdict(Verdict::Composite {
                witness: BigInt::from(17),
            }),
            Answer::Verdict(Verdict::Solvable {
                expression: "4 * 6".into(),
            }),
            Answer::Verdict(Verdict::Unsolvable),
            Answer::Verdict(Verdict::InvalidTriangle),
        ];
        for answer in answers {
            let json = serde_json::to_string(&answer).unwrap();
            let back: Answer = serde_json::from_str(&json).unwrap();
            assert_eq!(back, answer, "via {json}");
        }
    }
}
