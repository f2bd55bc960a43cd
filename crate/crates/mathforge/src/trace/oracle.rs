//! Direct answer derivation, independent of the step machinery.
//!
//! Every family's answer can be recomputed straight from the trace inputs:
//! expression families evaluate their input tree recursively, remainder
//! uses floor division, primality and factoring use direct trial division,
//! triangles recompute the area formula, and game-of-k answers are checked
//! against the card multiset (solvable) or full enumeration (unsolvable).

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};

use crate::exact::{floordiv_mod, ExactNumber};
use crate::expr::Expr;

use super::game::{enumerate_reachable, literal_cards};
use super::prime::is_prime_u64;
use super::triangle::floor_sqrt_scaled;
use super::{Answer, CalcTrace, Family, Verdict};

/// Recomputes the answer for a trace's inputs. `None` when the inputs are
/// malformed for the family.
pub fn direct_answer(task: Family, inputs: &[Expr]) -> Option<Answer> {
    match task {
        Family::Bracket
        | Family::Decimal
        | Family::Fraction
        | Family::FractionReduce
        | Family::Power
        | Family::Polynomial => {
            let value = inputs.first()?.eval().ok()?;
            Some(Answer::Value(value))
        }
        Family::Remainder => {
            let a = inputs.first()?.as_literal()?.as_integer()?.clone();
            let b = inputs.get(1)?.as_literal()?.as_integer()?.clone();
            let (quotient, remainder) = floordiv_mod(&a, &b).ok()?;
            Some(Answer::QuotRem {
                quotient,
                remainder,
            })
        }
        Family::Prime => {
            let n = inputs.first()?.as_literal()?.as_integer()?.to_u64()?;
            if is_prime_u64(n) {
                Some(Answer::Verdict(Verdict::Prime))
            } else {
                // The witness is checked separately; any composite verdict
                // with a dividing witness agrees.
                Some(Answer::Verdict(Verdict::Composite {
                    witness: BigInt::zero(),
                }))
            }
        }
        Family::Factorize | Family::Triangle | Family::GameOfK => None,
    }
}

/// Whether the trace's recorded answer agrees with a from-scratch
/// derivation. Families with non-unique answers (factor lists, chosen
/// expressions, truncated decimals) are checked by their defining property
/// instead of answer equality.
pub fn answer_agrees(trace: &CalcTrace) -> bool {
    match trace.task {
        Family::Bracket
        | Family::Decimal
        | Family::Fraction
        | Family::FractionReduce
        | Family::Power
        | Family::Polynomial
        | Family::Remainder => match direct_answer(trace.task, &trace.inputs) {
            Some(expected) => expected == trace.answer,
            None => false,
        },
        Family::Prime => {
            let Some(n) = trace
                .inputs
                .first()
                .and_then(|e| e.as_literal())
                .and_then(|v| v.as_integer().cloned())
            else {
                return false;
            };
            let Some(v) = n.to_u64() else { return false };
            match &trace.answer {
                Answer::Verdict(Verdict::Prime) => is_prime_u64(v),
                Answer::Verdict(Verdict::Composite { witness }) => {
                    let Some(w) = witness.to_u64() else { return false };
                    !is_prime_u64(v) && w > 1 && w < v && v % w == 0
                }
                _ => false,
            }
        }
        Family::Factorize => {
            let Some(n) = trace
                .inputs
                .first()
                .and_then(|e| e.as_literal())
                .and_then(|v| v.as_integer().cloned())
            else {
                return false;
            };
            match &trace.answer {
                Answer::Factors(fs) => {
                    if fs.is_empty() {
                        return false;
                    }
                    let product: BigInt = fs.iter().product();
                    product == n
                        && fs.iter().all(|f| {
                            f.to_u64().is_some_and(is_prime_u64)
                        })
                }
                _ => false,
            }
        }
        Family::Triangle => triangle_agrees(trace),
        Family::GameOfK => game_agrees(trace),
    }
}

fn triangle_agrees(trace: &CalcTrace) -> bool {
    if trace.inputs.len() != 3 {
        return false;
    }
    let mut sides: Vec<ExactNumber> = Vec::with_capacity(3);
    for input in &trace.inputs {
        match input.as_literal() {
            Some(v) if !v.is_negative() && !v.is_zero() => sides.push(v),
            _ => return false,
        }
    }
    sides.sort();
    let (s1, s2, s3) = (&sides[0], &sides[1], &sides[2]);

    if s1.add(s2) <= *s3 {
        return trace.answer == Answer::Verdict(Verdict::InvalidTriangle);
    }

    let Answer::Value(area) = &trace.answer else {
        return false;
    };

    // Squared area by Heron's formula (covers the right-triangle case too).
    let two = ExactNumber::int(2);
    let s = s1.add(s2).add(s3).div(&two).expect("two is nonzero");
    let squared = s
        .mul(&s.sub(s1))
        .mul(&s.sub(s2))
        .mul(&s.sub(s3));

    if &area.mul(area) == &squared {
        return !area.is_negative();
    }
    // Truncated decimal: area ≤ √squared < area + 10^-scale.
    let scale = match area {
        ExactNumber::Decimal(d) => d.scale(),
        _ => return false,
    };
    let mantissa = floor_sqrt_scaled(&squared, scale);
    &ExactNumber::decimal(mantissa, scale) == area
}

fn game_agrees(trace: &CalcTrace) -> bool {
    if trace.inputs.len() < 3 {
        return false;
    }
    let (card_exprs, target_expr) = trace.inputs.split_at(trace.inputs.len() - 1);
    let mut cards: Vec<BigInt> = Vec::new();
    for e in card_exprs {
        match e.as_literal().and_then(|v| v.as_integer().cloned()) {
            Some(c) => cards.push(c),
            None => return false,
        }
    }
    let Some(target) = target_expr[0]
        .as_literal()
        .and_then(|v| v.as_integer().cloned())
    else {
        return false;
    };

    match &trace.answer {
        Answer::Verdict(Verdict::Solvable { expression }) => {
            let Ok(expr) = crate::expr::parse_expr(expression) else {
                return false;
            };
            let Ok(value) = expr.eval() else { return false };
            if value != ExactNumber::int(target) {
                return false;
            }
            let mut used = literal_cards(&expr);
            used.sort();
            let mut expected = cards.clone();
            expected.sort();
            used == expected
        }
        Answer::Verdict(Verdict::Unsolvable) => !enumerate_reachable(&cards, &target),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::{StepKind, TraceStep};

    #[test]
    fn tampered_answer_fails_oracle() {
        let mut trace = super::super::trace_power(&BigInt::from(29), 3).unwrap();
        trace.answer = Answer::Value(ExactNumber::int(24388));
        assert!(!answer_agrees(&trace));
    }

    #[test]
    fn tampered_factors_fail() {
        let mut trace = super::super::trace_factorize(&BigInt::from(12)).unwrap();
        trace.answer = Answer::Factors(vec![BigInt::from(4), BigInt::from(3)]);
        assert!(!answer_agrees(&trace), "4 is not prime");
    }

    #[test]
    fn fake_solvable_expression_fails() {
        let cards: Vec<BigInt> = [3i64, 3, 8, 8].iter().map(|&v| BigInt::from(v)).collect();
        let mut trace = super::super::solve_game_of_k(
            &cards,
            &BigInt::from(24),
            super::super::GameConfig::default(),
        )
        .unwrap();
        // Claim a different hand's solution.
        trace.answer = Answer::Verdict(Verdict::Solvable {
            expression: "4 * 6".into(),
        });
        trace.steps = vec![TraceStep::new(StepKind::Result, "So 4 * 6 = 24.", vec![])];
        assert!(!answer_agrees(&trace), "4 and 6 are not in the hand");
    }
}
