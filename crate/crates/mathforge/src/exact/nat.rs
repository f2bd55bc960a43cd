//! Natural-number arithmetic as a formal proof assistant evaluates it:
//! subtraction truncates at zero and division floors.
//!
//! These semantics silently diverge from exact arithmetic, which is the
//! usual failure mode when a calculation is transcribed into typed natural
//! numbers. [`eval_divergence`] walks an expression under both semantics
//! and reports every node where they part ways.

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

use super::{ExactNumber, NumError};
use crate::expr::Expr;

/// Truncated subtraction: `max(a - b, 0)`.
pub fn nat_sub(a: &BigUint, b: &BigUint) -> BigUint {
    if a >= b {
        a - b
    } else {
        BigUint::zero()
    }
}

/// Floor division over naturals. Requires `b > 0`.
pub fn nat_div(a: &BigUint, b: &BigUint) -> Result<BigUint, NumError> {
    if b.is_zero() {
        return Err(NumError::DivisionByZero);
    }
    Ok(a / b)
}

/// One place where natural-number evaluation differs from exact evaluation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Divergence {
    /// Rendered subexpression where the semantics split.
    pub at: String,
    pub rule: DivergenceRule,
    /// Value under natural semantics.
    pub nat_value: BigUint,
    /// Exact value of the same subexpression.
    pub exact_value: ExactNumber,
}

/// Which truncation caused a divergence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DivergenceRule {
    /// `a - b = 0` when `a < b`.
    TruncatedSub,
    /// `a / b = ⌊a / b⌋` when `b` does not divide `a`.
    FlooredDiv,
}

/// Report from evaluating an expression under natural semantics alongside
/// exact semantics.
#[derive(Debug, Clone)]
pub struct DivergenceReport {
    /// `None` when the expression leaves the naturals entirely
    /// (negative or fractional leaf, power of a non-natural, ...).
    pub nat_value: Option<BigUint>,
    pub exact_value: Option<ExactNumber>,
    pub divergences: Vec<Divergence>,
}

impl DivergenceReport {
    /// True when both evaluations complete and agree with no truncations.
    pub fn agrees(&self) -> bool {
        self.divergences.is_empty()
            && match (&self.nat_value, &self.exact_value) {
                (Some(n), Some(e)) => &ExactNumber::int(BigInt::from(n.clone())) == e,
                _ => false,
            }
    }
}

/// Evaluates `expr` under natural-number semantics (truncated subtraction,
/// floor division) and exact semantics, recording every divergence.
pub fn eval_divergence(expr: &Expr) -> DivergenceReport {
    let mut divergences = Vec::new();
    let nat_value = eval_nat(expr, &mut divergences);
    let exact_value = expr.eval().ok();
    DivergenceReport {
        nat_value,
        exact_value,
        divergences,
    }
}

fn eval_nat(expr: &Expr, out: &mut Vec<Divergence>) -> Option<BigUint> {
    use crate::expr::BinOp;
    match expr {
        Expr::Num(n) => match n {
            ExactNumber::Integer(i) => i.to_biguint(),
            _ => None,
        },
        Expr::DecLit { .. } | Expr::Neg(_) => None,
        Expr::Bin { op, lhs, rhs } => {
            let a = eval_nat(lhs, out)?;
            let b = eval_nat(rhs, out)?;
            match op {
                BinOp::Add => Some(a + b),
                BinOp::Mul => Some(a * b),
                BinOp::Sub => {
                    let value = nat_sub(&a, &b);
                    if a < b {
                        out.push(Divergence {
                            at: expr.to_string(),
                            rule: DivergenceRule::TruncatedSub,
                            nat_value: value.clone(),
                            exact_value: ExactNumber::int(BigInt::from(a))
                                .sub(&ExactNumber::int(BigInt::from(b))),
                        });
                    }
                    Some(value)
                }
                BinOp::Div => {
                    if b.is_zero() {
                        return None;
                    }
                    let value = nat_div(&a, &b).ok()?;
                    if !(&a % &b).is_zero() {
                        out.push(Divergence {
                            at: expr.to_string(),
                            rule: DivergenceRule::FlooredDiv,
                            nat_value: value.clone(),
                            exact_value: ExactNumber::int(BigInt::from(a))
                                .div(&ExactNumber::int(BigInt::from(b)))
                                .expect("nonzero divisor"),
                        });
                    }
                    Some(value)
                }
            }
        }
        Expr::Pow { base, exp } => {
            let b = eval_nat(base, out)?;
            Some(b.pow(*exp))
        }
        Expr::Isqrt(inner) => {
            let n = eval_nat(inner, out)?;
            Some(n.sqrt())
        }
        Expr::Gcd(a, b) => {
            let a = eval_nat(a, out)?;
            let b = eval_nat(b, out)?;
            use num_integer::Integer;
            Some(a.gcd(&b))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn u(v: u64) -> BigUint {
        BigUint::from(v)
    }

    #[test]
    fn truncated_subtraction() {
        assert_eq!(nat_sub(&u(2), &u(3)), u(0));
        assert_eq!(nat_sub(&u(3), &u(2)), u(1));
        assert_eq!(nat_sub(&u(5), &u(0)), u(5));
    }

    #[test]
    fn floored_division() {
        assert_eq!(nat_div(&u(7), &u(2)).unwrap(), u(3));
        assert_eq!(nat_div(&u(6), &u(3)).unwrap(), u(2));
        assert!(nat_div(&u(1), &u(0)).is_err());
    }

    #[test]
    fn divergence_detected_for_truncation() {
        let expr = parse_expr("(2 - 3) + 1").unwrap();
        let report = eval_divergence(&expr);
        assert_eq!(report.divergences.len(), 1);
        assert_eq!(report.divergences[0].rule, DivergenceRule::TruncatedSub);
        assert_eq!(report.nat_value, Some(u(1)));
        assert!(!report.agrees());
    }

    #[test]
    fn agreement_when_operations_stay_natural() {
        let expr = parse_expr("(6 - 2) / 2").unwrap();
        let report = eval_divergence(&expr);
        assert!(report.agrees());
        assert_eq!(report.nat_value, Some(u(2)));
    }

    #[test]
    fn floor_division_divergence() {
        let expr = parse_expr("7 / 2").unwrap();
        let report = eval_divergence(&expr);
        assert_eq!(report.divergences.len(), 1);
        assert_eq!(report.divergences[0].rule, DivergenceRule::FlooredDiv);
        assert_eq!(report.nat_value, Some(u(3)));
    }
}
