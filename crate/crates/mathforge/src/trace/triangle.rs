//! Triangle area traces.
//!
//! Order matters: the trace checks the triangle inequality first, then
//! whether the triangle is right-angled, and only then states an area.
//! Asserting "right triangle" before the squares are on the page would
//! make a step depend on future tokens.

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::exact::ExactNumber;
use crate::expr::{BinOp, Expr};

use super::{Answer, CalcTrace, Family, StepKind, TraceError, TraceStep, Verdict};

/// Knobs for the non-right-triangle path.
#[derive(Debug, Clone, Copy, serde::Serialize, serde::Deserialize)]
pub struct TriangleConfig {
    /// Fractional digits of the truncated decimal approximation emitted
    /// when the squared area is not a perfect square.
    pub approx_scale: u32,
}

impl Default for TriangleConfig {
    fn default() -> Self {
        TriangleConfig { approx_scale: 4 }
    }
}

/// `floor(sqrt(value) · 10^scale)` for a non-negative rational `value`,
/// computed exactly.
pub(super) fn floor_sqrt_scaled(value: &ExactNumber, scale: u32) -> BigInt {
    let (num, den) = value.as_ratio();
    debug_assert!(!num.is_negative());
    let shifted = num * BigInt::from(10).pow(2 * scale);
    // Initial guess from integer sqrt of the floor, then exact adjustment.
    let mut r = (&shifted / &den).sqrt();
    while (&r + 1u32).pow(2) * &den <= shifted {
        r += 1u32;
    }
    while r.pow(2) * &den > shifted {
        r -= 1u32;
    }
    r
}

/// Exact square root of a rational when it is itself rational.
fn exact_sqrt(value: &ExactNumber) -> Option<ExactNumber> {
    let (num, den) = value.as_ratio();
    if num.is_negative() {
        return None;
    }
    // Reduce first so numerator and denominator are coprime.
    let reduced = ExactNumber::rational(num, den).ok()?;
    let (num, den) = reduced.as_ratio();
    let rn = num.sqrt();
    let rd = den.sqrt();
    (rn.pow(2) == num && rd.pow(2) == den)
        .then(|| ExactNumber::rational(rn, rd).expect("denominator positive"))
}

/// Step-by-step triangle area: inequality check, right-angle check, then
/// the area (legs product over two, or Heron's formula).
pub fn trace_triangle_area(
    a: &ExactNumber,
    b: &ExactNumber,
    c: &ExactNumber,
    config: TriangleConfig,
) -> Result<CalcTrace, TraceError> {
    let positive = |x: &ExactNumber| !x.is_negative() && !x.is_zero();
    if !positive(a) || !positive(b) || !positive(c) {
        return Err(TraceError::Invalid("sides must be positive".into()));
    }
    let inputs = vec![Expr::lit(a.clone()), Expr::lit(b.clone()), Expr::lit(c.clone())];

    let mut sides = [a.clone(), b.clone(), c.clone()];
    sides.sort();
    let [s1, s2, s3] = sides;
    let mut steps = Vec::new();

    // Triangle inequality on the two smaller sides against the largest.
    let sum = s1.add(&s2);
    if sum <= s3 {
        let rel = if sum == s3 { "=" } else { "<" };
        steps.push(TraceStep::new(
            StepKind::Compare,
            format!("As {s1} + {s2} {rel} {s3}, they cannot form a triangle."),
            vec![],
        ));
        return Ok(CalcTrace {
            task: Family::Triangle,
            inputs,
            steps,
            answer: Answer::Verdict(Verdict::InvalidTriangle),
        });
    }
    steps.push(TraceStep::new(
        StepKind::Compare,
        format!("As {s1} + {s2} > {s3}, they can form a triangle."),
        vec![],
    ));

    // Squares of all three sides, plus the sum of the two smaller squares.
    let (q1, q2, q3) = (s1.pow(2), s2.pow(2), s3.pow(2));
    let qsum = q1.add(&q2);
    let sq = |s: &ExactNumber| Expr::pow(Expr::lit(s.clone()), 2);
    steps.push(TraceStep::new(
        StepKind::Rewrite,
        format!(
            "{} = {q1}, {} = {q2}, {} = {q3}, {q1} + {q2} = {qsum}.",
            sq(&s1),
            sq(&s2),
            sq(&s3)
        ),
        vec![0],
    ));

    let is_right = qsum == q3;
    if is_right {
        steps.push(TraceStep::new(
            StepKind::Branch,
            format!("So {} + {} = {}, it is a right triangle.", sq(&s1), sq(&s2), sq(&s3)),
            vec![1],
        ));
        // Legs are the two smaller sides.
        let product = s1.mul(&s2);
        let area = product.div(&ExactNumber::int(2)).expect("two is not zero");
        let chain_mid = Expr::bin(
            BinOp::Div,
            Expr::lit(product.clone()),
            Expr::int(2),
        );
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("The area is {} * {} / 2 = {} = {area}.", s1, s2, chain_mid),
            vec![2],
        ));
        return Ok(CalcTrace {
            task: Family::Triangle,
            inputs,
            steps,
            answer: Answer::Value(area),
        });
    }

    let rel = if qsum < q3 { "<" } else { ">" };
    steps.push(TraceStep::new(
        StepKind::Branch,
        format!(
            "Since {} + {} = {qsum} and {qsum} {rel} {q3}, it is not a right triangle.",
            sq(&s1),
            sq(&s2)
        ),
        vec![1],
    ));

    // Heron's formula with exact arithmetic.
    let two = ExactNumber::int(2);
    let perimeter = s1.add(&s2).add(&s3);
    let s = perimeter.div(&two).expect("two is not zero");
    let half_expr = Expr::bin(
        BinOp::Div,
        Expr::bin(
            BinOp::Add,
            Expr::bin(BinOp::Add, Expr::lit(s1.clone()), Expr::lit(s2.clone())),
            Expr::lit(s3.clone()),
        ),
        Expr::int(2),
    );
    steps.push(TraceStep::new(
        StepKind::Rewrite,
        format!(
            "The half perimeter is {half_expr} = {} = {s}.",
            Expr::bin(BinOp::Div, Expr::lit(perimeter), Expr::int(2))
        ),
        vec![2],
    ));

    let (f1, f2, f3) = (s.sub(&s1), s.sub(&s2), s.sub(&s3));
    let squared_area = s.mul(&f1).mul(&f2).mul(&f3);
    let sub = |x: &ExactNumber| {
        Expr::bin(BinOp::Sub, Expr::lit(s.clone()), Expr::lit(x.clone()))
    };
    let heron_expr = Expr::bin(
        BinOp::Mul,
        Expr::bin(
            BinOp::Mul,
            Expr::bin(BinOp::Mul, Expr::lit(s.clone()), sub(&s1)),
            sub(&s2),
        ),
        sub(&s3),
    );
    let factored = Expr::bin(
        BinOp::Mul,
        Expr::bin(
            BinOp::Mul,
            Expr::bin(BinOp::Mul, Expr::lit(s.clone()), Expr::lit(f1.clone())),
            Expr::lit(f2.clone()),
        ),
        Expr::lit(f3.clone()),
    );
    steps.push(TraceStep::new(
        StepKind::Rewrite,
        format!("The squared area is {heron_expr} = {factored} = {squared_area}."),
        vec![3],
    ));

    let answer = match exact_sqrt(&squared_area) {
        Some(area) => {
            let text = if let Some(n) = area.as_integer() {
                format!(
                    "[sqrt({squared_area})] = {n} and {}^2 = {squared_area}, so the area is {area}.",
                    n
                )
            } else {
                format!(
                    "{} = {squared_area}, so the area is {area}.",
                    Expr::pow(Expr::lit(area.clone()), 2)
                )
            };
            steps.push(TraceStep::new(StepKind::Result, text, vec![4]));
            Answer::Value(area)
        }
        None => {
            let scale = config.approx_scale;
            let mantissa = floor_sqrt_scaled(&squared_area, scale);
            let lo = Expr::DecLit {
                mantissa: mantissa.clone(),
                scale,
            };
            let hi = Expr::DecLit {
                mantissa: &mantissa + BigInt::one(),
                scale,
            };
            steps.push(TraceStep::new(
                StepKind::Result,
                format!(
                    "Since {} < {squared_area} < {}, the area is approximately {}.",
                    Expr::pow(lo.clone(), 2),
                    Expr::pow(hi, 2),
                    lo
                ),
                vec![4],
            ));
            Answer::Value(ExactNumber::decimal(mantissa, scale))
        }
    };

    Ok(CalcTrace {
        task: Family::Triangle,
        inputs,
        steps,
        answer,
    })
}
