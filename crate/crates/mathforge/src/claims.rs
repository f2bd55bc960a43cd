//! Extracting checkable calculation claims from free text.
//!
//! A claim is a relation between arithmetic expressions that can be
//! re-checked exactly: an equality chain (`a = b = c`), a comparison
//! (`3 + 4 > 5`), or a division-with-remainder line (`5287 / 17 = 311 ... 0`).
//! The scanner walks a line of prose, finds maximal relation runs, and
//! ignores everything it cannot ground — list commas, sentence periods,
//! step numbers, and any run containing symbolic variables.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exact::ExactNumber;
use crate::expr::{Expr, ExprParser};

/// Relation operators recognized between chain elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Gt,
}

impl RelOp {
    pub fn holds(&self, a: &ExactNumber, b: &ExactNumber) -> bool {
        match self {
            RelOp::Eq => a == b,
            RelOp::Ne => a != b,
            RelOp::Lt => a < b,
            RelOp::Gt => a > b,
        }
    }

    pub fn symbol(&self) -> &'static str {
        match self {
            RelOp::Eq => "=",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Gt => ">",
        }
    }
}

/// One verifiable claim.
#[derive(Debug, Clone, PartialEq)]
pub enum Claim {
    /// `lhs rel rhs` where both sides evaluate exactly.
    Relation { lhs: Expr, op: RelOp, rhs: Expr },
    /// `dividend / divisor = quotient ... remainder` with the floor-division
    /// identity `dividend = quotient · divisor + remainder`, `0 ≤ r < divisor`.
    DivRem {
        dividend: Expr,
        divisor: Expr,
        quotient: Expr,
        remainder: Expr,
    },
}

impl Claim {
    /// Re-checks the claim with exact arithmetic. `Ok(true)` means it holds;
    /// evaluation failures (division by zero, non-integer isqrt operand)
    /// come back as `Err` with the rendered subexpression.
    pub fn check(&self) -> Result<bool, crate::expr::EvalError> {
        match self {
            Claim::Relation { lhs, op, rhs } => {
                let a = lhs.eval()?;
                let b = rhs.eval()?;
                Ok(op.holds(&a, &b))
            }
            Claim::DivRem {
                dividend,
                divisor,
                quotient,
                remainder,
            } => {
                let a = dividend.eval()?;
                let b = divisor.eval()?;
                let q = quotient.eval()?;
                let r = remainder.eval()?;
                let (a, b, q, r) = match (a.as_integer(), b.as_integer(), q.as_integer(), r.as_integer()) {
                    (Some(a), Some(b), Some(q), Some(r)) => (a.clone(), b.clone(), q.clone(), r.clone()),
                    _ => return Ok(false),
                };
                if b.is_zero() || b.is_negative() {
                    return Ok(false);
                }
                Ok(a == &q * &b + &r && !r.is_negative() && r < b)
            }
        }
    }
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Claim::Relation { lhs, op, rhs } => {
                write!(f, "{} {} {}", lhs, op.symbol(), rhs)
            }
            Claim::DivRem {
                dividend,
                divisor,
                quotient,
                remainder,
            } => write!(f, "{dividend} / {divisor} = {quotient} ... {remainder}"),
        }
    }
}

/// A maximal relation run found in text.
#[derive(Debug, Clone)]
pub struct Run {
    /// Byte range of the run in the scanned text.
    pub start: usize,
    pub end: usize,
    /// Chain elements, in order.
    pub elements: Vec<Expr>,
    /// Relations between adjacent elements (`elements.len() - 1` entries).
    pub rels: Vec<RelOp>,
    /// Present when the run ends `... r` (division with remainder).
    pub remainder: Option<Expr>,
    /// True when the run sits inside `$ ... $` delimiters.
    pub in_math: bool,
}

impl Run {
    /// True when every relation in the run is `=` and there is no
    /// remainder tail: the shape of a rewritable calculation.
    pub fn is_equality_chain(&self) -> bool {
        self.remainder.is_none() && self.rels.iter().all(|r| *r == RelOp::Eq)
    }

    /// Expands the run into independently checkable claims.
    pub fn claims(&self) -> Vec<Claim> {
        if let Some(rem) = &self.remainder {
            // `a / b = q ... r`: the dividend expression must be a division.
            if self.elements.len() == 2 && self.rels == [RelOp::Eq] {
                if let Expr::Bin {
                    op: crate::expr::BinOp::Div,
                    lhs,
                    rhs,
                } = &self.elements[0]
                {
                    return vec![Claim::DivRem {
                        dividend: (**lhs).clone(),
                        divisor: (**rhs).clone(),
                        quotient: self.elements[1].clone(),
                        remainder: rem.clone(),
                    }];
                }
            }
            return Vec::new();
        }
        self.elements
            .windows(2)
            .zip(&self.rels)
            .map(|(pair, op)| Claim::Relation {
                lhs: pair[0].clone(),
                op: *op,
                rhs: pair[1].clone(),
            })
            .collect()
    }
}

/// Scans text for relation runs. Runs never overlap and appear in
/// document order.
pub fn scan_runs(text: &str) -> Vec<Run> {
    let bytes = text.as_bytes();
    let mut runs = Vec::new();
    let mut pos = 0;
    let mut in_math = false;
    while pos < bytes.len() {
        let b = bytes[pos];
        if b == b'$' {
            in_math = !in_math;
            pos += 1;
            continue;
        }
        if !is_run_start(text, pos) || embedded_on_left(text, pos) {
            pos += next_char_len(text, pos);
            continue;
        }
        match try_run(text, pos, in_math) {
            Some(run) if !embedded_on_right(text, run.end) => {
                pos = run.end;
                runs.push(run);
            }
            _ => pos += next_char_len(text, pos),
        }
    }
    runs
}

/// Extracts all claims from text: the concatenation of each run's claims.
pub fn scan_claims(text: &str) -> Vec<Claim> {
    scan_runs(text).iter().flat_map(Run::claims).collect()
}

fn next_char_len(text: &str, pos: usize) -> usize {
    text[pos..].chars().next().map_or(1, char::len_utf8)
}

/// A run start glued to the tail of a larger token sequence (as in the
/// `1=0` inside `3x-1=0`) is not a standalone claim.
fn embedded_on_left(text: &str, pos: usize) -> bool {
    let Some(prev) = text[..pos].chars().next_back() else {
        return false;
    };
    prev.is_ascii_alphanumeric()
        || matches!(prev, ')' | ']' | '}' | '^' | '_' | '.' | '+' | '-' | '*' | '/' | '=' | '<' | '>')
        || matches!(prev, '−' | '×' | '·' | '÷' | '≠')
}

/// A run that continues into alphabetic or grouping characters was clipped
/// out of something symbolic; reject it whole.
fn embedded_on_right(text: &str, end: usize) -> bool {
    match text[end..].chars().next() {
        Some(c) => c.is_alphabetic() || c == '(',
        None => false,
    }
}

fn is_run_start(text: &str, pos: usize) -> bool {
    let rest = &text[pos..];
    let Some(c) = rest.chars().next() else {
        return false;
    };
    if c.is_ascii_digit() || c == '(' {
        return true;
    }
    if rest.starts_with("\\frac") || rest.starts_with("[sqrt(") || rest.starts_with("[\\sqrt") {
        return true;
    }
    if rest.starts_with("gcd(") || rest.starts_with("isqrt(") {
        return true;
    }
    if c == '-' || c == '−' {
        let after = &rest[c.len_utf8()..];
        return after.chars().next().is_some_and(|d| d.is_ascii_digit());
    }
    false
}

fn try_run(text: &str, start: usize, in_math: bool) -> Option<Run> {
    let mut p = ExprParser::at(text, start);
    let first = p.expr().ok()?;
    let mut elements = vec![first];
    let mut rels = Vec::new();
    let mut end = p.pos;
    let mut remainder = None;

    loop {
        let mut q = ExprParser::at(text, end);
        q.skip_ws();
        let rel_pos = q.pos;
        let rel = parse_relop(text, rel_pos);
        let Some((op, rel_len)) = rel else {
            break;
        };
        let mut r = ExprParser::at(text, rel_pos + rel_len);
        r.skip_ws();
        let Ok(next) = r.expr() else {
            break;
        };
        rels.push(op);
        elements.push(next);
        end = r.pos;

        // A `... r` tail ends the run as a division-with-remainder claim.
        let mut t = ExprParser::at(text, end);
        t.skip_ws();
        let tail_pos = t.pos;
        if text[tail_pos..].starts_with("...") || text[tail_pos..].starts_with('…') {
            let skip = if text[tail_pos..].starts_with("...") { 3 } else { '…'.len_utf8() };
            let mut u = ExprParser::at(text, tail_pos + skip);
            u.skip_ws();
            if let Ok(rem) = u.expr() {
                remainder = Some(rem);
                end = u.pos;
            }
            break;
        }
    }

    if rels.is_empty() {
        return None;
    }
    Some(Run {
        start,
        end,
        elements,
        rels,
        remainder,
        in_math,
    })
}

fn parse_relop(text: &str, pos: usize) -> Option<(RelOp, usize)> {
    let rest = &text[pos..];
    if rest.starts_with("!=") || rest.starts_with("\\neq") || rest.starts_with("\\ne ") {
        let len = if rest.starts_with("!=") {
            2
        } else if rest.starts_with("\\neq") {
            4
        } else {
            3
        };
        return Some((RelOp::Ne, len));
    }
    if rest.starts_with('≠') {
        return Some((RelOp::Ne, '≠'.len_utf8()));
    }
    if rest.starts_with('=') {
        return Some((RelOp::Eq, 1));
    }
    if rest.starts_with('<') {
        return Some((RelOp::Lt, 1));
    }
    if rest.starts_with('>') {
        return Some((RelOp::Gt, 1));
    }
    None
}

/// True when `text` contains an `=` adjacent to arithmetic structure that
/// the scanner nevertheless could not ground — the signature of an equation
/// over symbolic variables.
pub fn looks_like_ungrounded_equation(text: &str) -> bool {
    if !text.contains('=') {
        return false;
    }
    let has_arith_op = text.contains('+')
        || text.contains('^')
        || text.contains('*')
        || text.contains("\\cdot")
        || text.contains("\\times")
        || text.contains("\\frac")
        || text.contains("\\div")
        || text.contains('-')
        || text.contains('/');
    if !has_arith_op {
        return false;
    }
    // Grounded runs cover fully numeric equations; letters outside known
    // function/command names mean symbols we cannot evaluate.
    let cleaned = text
        .replace("\\cdot", " ")
        .replace("\\times", " ")
        .replace("\\div", " ")
        .replace("\\frac", " ")
        .replace("\\left", " ")
        .replace("\\right", " ")
        .replace("\\neq", " ")
        .replace("\\sqrt", " ")
        .replace("gcd(", " ")
        .replace("isqrt(", " ")
        .replace("sqrt(", " ");
    cleaned.chars().any(|c| c.is_alphabetic())
}

/// Convenience: the exact value of `n` as a claim-friendly integer literal.
pub fn int_expr(n: &BigInt) -> Expr {
    Expr::Num(ExactNumber::int(n.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_all_hold(text: &str, expected_claims: usize) {
        let claims = scan_claims(text);
        assert_eq!(claims.len(), expected_claims, "claims in {text:?}: {claims:?}");
        for claim in &claims {
            assert_eq!(claim.check(), Ok(true), "claim {claim} from {text:?}");
        }
    }

    #[test]
    fn triangle_box_lines_verify() {
        assert_all_hold("As $3 + 4 > 5$, they can form a triangle.", 1);
        assert_all_hold("$3^2=9, 4^2=16, 5^2=25, 9+16=25.$", 4);
        assert_all_hold("So $3^2 + 4^2 = 5^2$, it is a right triangle.", 1);
        assert_all_hold("The area is $3*4/2 =12/2=6.$", 2);
    }

    #[test]
    fn prime_case_lines() {
        let claims = scan_claims("5287 / 3 = 1762 ... 1");
        assert_eq!(claims.len(), 1);
        assert!(matches!(claims[0], Claim::DivRem { .. }));
        assert_eq!(claims[0].check(), Ok(true));

        assert_all_hold("5287 / 17 = 311 ... 0", 1);
        assert_all_hold("$[\\sqrt(5287)] = 72$", 1);

        // Prime list is not a claim.
        assert_all_hold("Prime numbers: 3,5,7,11,13,17,19,23,29,31,37", 0);
    }

    #[test]
    fn false_claim_detected() {
        let claims = scan_claims("so 2+2 = 5 holds");
        assert_eq!(claims.len(), 1);
        assert_eq!(claims[0].check(), Ok(false));
    }

    #[test]
    fn wrong_remainder_detected() {
        let claims = scan_claims("5287 / 3 = 1762 ... 2");
        assert_eq!(claims[0].check(), Ok(false));
        // Remainder must be < divisor.
        let claims = scan_claims("10 / 3 = 2 ... 4");
        assert_eq!(claims[0].check(), Ok(false));
    }

    #[test]
    fn paper_rewrite_chain_is_one_run() {
        let text = "$(12+17)^3 = 29 ^ 3 = 841 * 29 = (800 + 40 + 1) * 29 = 23200 + 1160 + 29 = 24389$";
        let runs = scan_runs(text);
        assert_eq!(runs.len(), 1);
        let run = &runs[0];
        assert!(run.is_equality_chain());
        assert_eq!(run.elements.len(), 6);
        assert!(run.in_math);
        for claim in run.claims() {
            assert_eq!(claim.check(), Ok(true));
        }
    }

    #[test]
    fn symbolic_equations_are_not_runs() {
        let text = "We solve $x^3-3x^2+3x-1=0$, and obtain $x=1$";
        assert!(scan_claims(text).is_empty());
        assert!(looks_like_ungrounded_equation("x^3-3x^2+3x-1=0"));
        // `x=1` carries no arithmetic operator on clean inspection: the
        // detector keys on operators, and `x=1` has none outside `-`/`/`
        // which do not appear here.
        assert!(!looks_like_ungrounded_equation("x=1"));
    }

    #[test]
    fn step_numbers_do_not_become_claims() {
        assert_all_hold("Step 3: For the ones place, the sum is $1 \\cdot 120 = 120$.", 1);
    }

    #[test]
    fn mixed_relation_chain() {
        // Both comparisons verify: 2.9047² < 135/16 < 2.9048².
        assert_all_hold("Since 2.9047^2 < 135/16 < 2.9048^2, the area is approximately 2.9047.", 2);
    }

    #[test]
    fn runs_are_ordered_and_disjoint() {
        let text = "First $1+1=2$ then $2*2=4$ and finally 10/4 = 2 ... 2";
        let runs = scan_runs(text);
        assert_eq!(runs.len(), 3);
        for pair in runs.windows(2) {
            assert!(pair[0].end <= pair[1].start);
        }
    }
}
