//! Arithmetic expression trees and their text grammar.
//!
//! The grammar covers everything a trace step or an inline calculation can
//! contain: integers, decimals, fractions (`a/b` or `\frac{a}{b}`), the four
//! binary operators (with `*`, `×`, `·`, `\cdot`, `\times` for products and
//! `/`, `÷`, `\div` for quotients), small non-negative integer powers with
//! `^`, parentheses, `gcd(a, b)`, and the floor square root `[sqrt(n)]`.
//! Anything containing other letters is not an arithmetic expression.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::exact::{ExactNumber, NumberStyle};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    pub fn symbol(&self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }
}

/// A numeric expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(ExactNumber),
    /// A decimal literal that keeps its written scale, so `0.50` stays
    /// `0.50` through a render round-trip. Denotes `mantissa · 10^-scale`.
    DecLit { mantissa: BigInt, scale: u32 },
    Neg(Box<Expr>),
    Bin {
        op: BinOp,
        lhs: Box<Expr>,
        rhs: Box<Expr>,
    },
    Pow {
        base: Box<Expr>,
        exp: u32,
    },
    /// Floor square root, written `[sqrt(n)]`.
    Isqrt(Box<Expr>),
    Gcd(Box<Expr>, Box<Expr>),
}

/// Errors surfaced while evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    /// Carries the rendered offending subexpression.
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("`{0}` requires an integer operand")]
    NonIntegerOperand(String),
    #[error("negative operand in `{0}`")]
    NegativeOperand(String),
    #[error("gcd(0, 0) in `{0}`")]
    GcdOfZeros(String),
}

impl Expr {
    pub fn num(n: ExactNumber) -> Self {
        Expr::Num(n)
    }

    pub fn int<T: Into<BigInt>>(n: T) -> Self {
        Expr::Num(ExactNumber::int(n))
    }

    /// A literal for any exact number; decimals keep their canonical scale.
    pub fn lit(n: ExactNumber) -> Self {
        match n {
            ExactNumber::Decimal(ref d) => Expr::DecLit {
                mantissa: d.mantissa().clone(),
                scale: d.scale(),
            },
            other => Expr::Num(other),
        }
    }

    /// The literal value of a leaf, if this is one.
    pub fn as_literal(&self) -> Option<ExactNumber> {
        match self {
            Expr::Num(n) => Some(n.clone()),
            Expr::DecLit { mantissa, scale } => {
                Some(ExactNumber::decimal(mantissa.clone(), *scale))
            }
            _ => None,
        }
    }

    pub fn bin(op: BinOp, lhs: Expr, rhs: Expr) -> Self {
        Expr::Bin {
            op,
            lhs: Box::new(lhs),
            rhs: Box::new(rhs),
        }
    }

    pub fn pow(base: Expr, exp: u32) -> Self {
        Expr::Pow {
            base: Box::new(base),
            exp,
        }
    }

    /// Exact evaluation; division by zero anywhere fails with the offending
    /// subexpression in the error.
    pub fn eval(&self) -> Result<ExactNumber, EvalError> {
        match self {
            Expr::Num(n) => Ok(n.clone()),
            Expr::DecLit { mantissa, scale } => {
                Ok(ExactNumber::decimal(mantissa.clone(), *scale))
            }
            Expr::Neg(inner) => Ok(inner.eval()?.neg()),
            Expr::Bin { op, lhs, rhs } => {
                let a = lhs.eval()?;
                let b = rhs.eval()?;
                match op {
                    BinOp::Add => Ok(a.add(&b)),
                    BinOp::Sub => Ok(a.sub(&b)),
                    BinOp::Mul => Ok(a.mul(&b)),
                    BinOp::Div => a
                        .div(&b)
                        .map_err(|_| EvalError::DivisionByZero(self.to_string())),
                }
            }
            Expr::Pow { base, exp } => Ok(base.eval()?.pow(*exp)),
            Expr::Isqrt(inner) => {
                let v = inner.eval()?;
                let n = v
                    .as_integer()
                    .ok_or_else(|| EvalError::NonIntegerOperand(self.to_string()))?;
                if n.is_negative() {
                    return Err(EvalError::NegativeOperand(self.to_string()));
                }
                Ok(ExactNumber::int(crate::exact::isqrt(n).expect("non-negative")))
            }
            Expr::Gcd(a, b) => {
                let va = a.eval()?;
                let vb = b.eval()?;
                let (ia, ib) = match (va.as_integer(), vb.as_integer()) {
                    (Some(x), Some(y)) => (x.clone(), y.clone()),
                    _ => return Err(EvalError::NonIntegerOperand(self.to_string())),
                };
                if ia.is_zero() && ib.is_zero() {
                    return Err(EvalError::GcdOfZeros(self.to_string()));
                }
                Ok(ExactNumber::int(crate::exact::gcd(&ia, &ib).expect("not both zero")))
            }
        }
    }

    /// Count of internal operation nodes.
    pub fn op_count(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::DecLit { .. } => 0,
            Expr::Neg(inner) | Expr::Isqrt(inner) => 1 + inner.op_count(),
            Expr::Bin { lhs, rhs, .. } => 1 + lhs.op_count() + rhs.op_count(),
            Expr::Pow { base, .. } => 1 + base.op_count(),
            Expr::Gcd(a, b) => 1 + a.op_count() + b.op_count(),
        }
    }

    pub fn is_leaf(&self) -> bool {
        matches!(self, Expr::Num(_) | Expr::DecLit { .. })
    }

    pub fn render(&self, style: NumberStyle) -> String {
        let mut out = String::new();
        self.render_into(&mut out, 0, style);
        out
    }

    fn render_into(&self, out: &mut String, parent_prec: u8, style: NumberStyle) {
        match self {
            Expr::Num(n) => {
                // A negative or fractional literal below a binary operator
                // needs brackets to re-parse unambiguously.
                let text = n.render(style);
                let needs_parens = parent_prec > 0
                    && (n.is_negative()
                        || (matches!(n, ExactNumber::Rational(_))
                            && style == NumberStyle::Plain
                            && parent_prec >= 2));
                if needs_parens {
                    out.push('(');
                    out.push_str(&text);
                    out.push(')');
                } else {
                    out.push_str(&text);
                }
            }
            Expr::DecLit { mantissa, scale } => {
                let text = render_scaled_decimal(mantissa, *scale);
                if parent_prec > 0 && mantissa.is_negative() {
                    out.push('(');
                    out.push_str(&text);
                    out.push(')');
                } else {
                    out.push_str(&text);
                }
            }
            Expr::Neg(inner) => {
                out.push_str("-(");
                inner.render_into(out, 0, style);
                out.push(')');
            }
            Expr::Bin { op, lhs, rhs } => {
                // A quotient of two plain non-negative integers is written
                // as a tight fraction: `3/6`, not `3 / 6`.
                let fraction_like = *op == BinOp::Div
                    && matches!(&**lhs, Expr::Num(ExactNumber::Integer(n)) if !n.is_negative())
                    && matches!(&**rhs, Expr::Num(ExactNumber::Integer(n)) if n.is_positive());
                let prec = op.precedence();
                let wrap = prec < parent_prec;
                if wrap {
                    out.push('(');
                }
                lhs.render_into(out, prec, style);
                if !fraction_like {
                    out.push(' ');
                }
                out.push_str(op.symbol());
                if !fraction_like {
                    out.push(' ');
                }
                // Right operand of - and / binds tighter.
                let rhs_prec = match op {
                    BinOp::Sub | BinOp::Div => prec + 1,
                    _ => prec,
                };
                rhs.render_into(out, rhs_prec, style);
                if wrap {
                    out.push(')');
                }
            }
            Expr::Pow { base, exp } => {
                // Only a non-negative integer literal may stand unbracketed
                // as a base; `1/2^2` would re-parse as `1/(2^2)`.
                let bare = matches!(
                    &**base,
                    Expr::Num(ExactNumber::Integer(n)) if !n.is_negative()
                );
                if bare {
                    base.render_into(out, 3, style);
                } else {
                    out.push('(');
                    base.render_into(out, 0, style);
                    out.push(')');
                }
                out.push('^');
                out.push_str(&exp.to_string());
            }
            Expr::Isqrt(inner) => {
                out.push_str("[sqrt(");
                inner.render_into(out, 0, style);
                out.push_str(")]");
            }
            Expr::Gcd(a, b) => {
                out.push_str("gcd(");
                a.render_into(out, 0, style);
                out.push_str(", ");
                b.render_into(out, 0, style);
                out.push(')');
            }
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.render(NumberStyle::Plain))
    }
}

/// Renders `mantissa · 10^-scale` keeping exactly `scale` fractional digits.
fn render_scaled_decimal(mantissa: &BigInt, scale: u32) -> String {
    if scale == 0 {
        return mantissa.to_string();
    }
    let negative = mantissa.is_negative();
    let digits = mantissa.magnitude().to_string();
    let scale = scale as usize;
    let (int_part, frac_part) = if digits.len() > scale {
        let split = digits.len() - scale;
        (digits[..split].to_string(), digits[split..].to_string())
    } else {
        ("0".to_string(), format!("{:0>width$}", digits, width = scale))
    };
    format!("{}{}.{}", if negative { "-" } else { "" }, int_part, frac_part)
}

/// Parse failure with byte position relative to the parsed slice.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("expression parse error at byte {pos}: {msg}")]
pub struct ExprParseError {
    pub pos: usize,
    pub msg: String,
}

/// Parses a complete expression; trailing input is an error.
pub fn parse_expr(s: &str) -> Result<Expr, ExprParseError> {
    let mut p = ExprParser::new(s);
    p.skip_ws();
    let expr = p.expr()?;
    p.skip_ws();
    if p.pos != s.len() {
        return Err(p.err("trailing input"));
    }
    Ok(expr)
}

/// Recursive-descent parser over a byte slice, also used incrementally by
/// the claim scanner (which needs the end position of a parsed expression).
pub(crate) struct ExprParser<'a> {
    input: &'a str,
    pub(crate) pos: usize,
}

impl<'a> ExprParser<'a> {
    pub(crate) fn new(input: &'a str) -> Self {
        ExprParser { input, pos: 0 }
    }

    pub(crate) fn at(input: &'a str, pos: usize) -> Self {
        ExprParser { input, pos }
    }

    fn err(&self, msg: &str) -> ExprParseError {
        ExprParseError {
            pos: self.pos,
            msg: msg.to_string(),
        }
    }

    fn rest(&self) -> &'a str {
        &self.input[self.pos..]
    }

    pub(crate) fn skip_ws(&mut self) {
        while self
            .rest()
            .as_bytes()
            .first()
            .is_some_and(|b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn eat_ws(&mut self, token: &str) -> bool {
        let save = self.pos;
        self.skip_ws();
        if self.eat(token) {
            true
        } else {
            self.pos = save;
            false
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ExprParseError> {
        let mut lhs = self.term()?;
        loop {
            let save = self.pos;
            self.skip_ws();
            let op = if self.eat("+") {
                BinOp::Add
            } else if self.eat("−") || self.eat("-") {
                BinOp::Sub
            } else {
                self.pos = save;
                break;
            };
            self.skip_ws();
            let rhs = self.term()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprParseError> {
        let mut lhs = self.factor()?;
        loop {
            let save = self.pos;
            self.skip_ws();
            let op = if self.eat("*")
                || self.eat("×")
                || self.eat("·")
                || self.eat("\\cdot")
                || self.eat("\\times")
            {
                BinOp::Mul
            } else if self.eat("÷") || self.eat("\\div") || self.eat("/") {
                BinOp::Div
            } else {
                self.pos = save;
                break;
            };
            self.skip_ws();
            let rhs = self.factor()?;
            lhs = Expr::bin(op, lhs, rhs);
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr, ExprParseError> {
        let base = self.atom()?;
        if self.eat_ws("^") {
            self.skip_ws();
            let braced = self.eat("{");
            let start = self.pos;
            while self
                .rest()
                .as_bytes()
                .first()
                .is_some_and(|b| b.is_ascii_digit())
            {
                self.pos += 1;
            }
            if self.pos == start {
                return Err(self.err("expected exponent digits"));
            }
            let exp: u32 = self.input[start..self.pos]
                .parse()
                .map_err(|_| self.err("exponent too large"))?;
            if braced && !self.eat("}") {
                return Err(self.err("expected '}'"));
            }
            return Ok(Expr::pow(base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ExprParseError> {
        self.skip_ws();
        if self.eat("(") || self.eat("\\left(") {
            let inner = self.expr()?;
            self.skip_ws();
            if !(self.eat(")") || self.eat("\\right)")) {
                return Err(self.err("expected ')'"));
            }
            return Ok(inner);
        }
        if self.eat("[sqrt(") || self.eat("[\\sqrt(") {
            let inner = self.expr()?;
            self.skip_ws();
            if !self.eat(")]") {
                return Err(self.err("expected ')]'"));
            }
            return Ok(Expr::Isqrt(Box::new(inner)));
        }
        if self.eat("[\\sqrt{") {
            let inner = self.expr()?;
            self.skip_ws();
            if !self.eat("}]") {
                return Err(self.err("expected '}]'"));
            }
            return Ok(Expr::Isqrt(Box::new(inner)));
        }
        if self.eat("isqrt(") {
            let inner = self.expr()?;
            self.skip_ws();
            if !self.eat(")") {
                return Err(self.err("expected ')'"));
            }
            return Ok(Expr::Isqrt(Box::new(inner)));
        }
        if self.eat("gcd(") {
            let a = self.expr()?;
            self.skip_ws();
            if !self.eat(",") {
                return Err(self.err("expected ','"));
            }
            let b = self.expr()?;
            self.skip_ws();
            if !self.eat(")") {
                return Err(self.err("expected ')'"));
            }
            return Ok(Expr::Gcd(Box::new(a), Box::new(b)));
        }
        if self.rest().starts_with("\\frac") {
            return self.latex_fraction(false);
        }
        if self.eat("−") || self.eat("-") {
            // Unary minus over one atom (not a whole sum).
            if self.rest().starts_with("\\frac") {
                return self.latex_fraction(true);
            }
            let inner = self.atom()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.number_literal()
    }

    fn latex_fraction(&mut self, negate: bool) -> Result<Expr, ExprParseError> {
        if !self.eat("\\frac") {
            return Err(self.err("expected \\frac"));
        }
        if !self.eat("{") {
            return Err(self.err("expected '{'"));
        }
        let num = self.expr()?;
        if !self.eat("}") {
            return Err(self.err("expected '}'"));
        }
        if !self.eat("{") {
            return Err(self.err("expected '{'"));
        }
        let den = self.expr()?;
        if !self.eat("}") {
            return Err(self.err("expected '}'"));
        }
        let frac = Expr::bin(BinOp::Div, num, den);
        Ok(if negate { Expr::Neg(Box::new(frac)) } else { frac })
    }

    fn number_literal(&mut self) -> Result<Expr, ExprParseError> {
        let start = self.pos;
        while self
            .rest()
            .as_bytes()
            .first()
            .is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected a number"));
        }
        // Decimal point must be followed by a digit; a bare trailing dot is
        // sentence punctuation.
        if self.rest().starts_with('.')
            && self.input.as_bytes().get(self.pos + 1).is_some_and(|b| b.is_ascii_digit())
        {
            let dot = self.pos;
            self.pos += 1;
            while self
                .rest()
                .as_bytes()
                .first()
                .is_some_and(|b| b.is_ascii_digit())
            {
                self.pos += 1;
            }
            let int_digits = &self.input[start..dot];
            let frac_digits = &self.input[dot + 1..self.pos];
            let mantissa: BigInt = format!("{int_digits}{frac_digits}")
                .parse()
                .map_err(|_| self.err("bad number"))?;
            return Ok(Expr::DecLit {
                mantissa,
                scale: frac_digits.len() as u32,
            });
        }
        let text = &self.input[start..self.pos];
        let value = crate::exact::parse_number(text).map_err(|_| self.err("bad number"))?;
        Ok(Expr::Num(value))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_str(s: &str) -> ExactNumber {
        parse_expr(s).unwrap().eval().unwrap()
    }

    #[test]
    fn paper_power_chain_links_evaluate_equal() {
        let links = [
            "(12+17)^3",
            "29 ^ 3",
            "841 * 29",
            "(800 + 40 + 1) * 29",
            "23200 + 1160 + 29",
            "24389",
        ];
        let expected = ExactNumber::int(24389);
        for link in links {
            assert_eq!(eval_str(link), expected, "link {link}");
        }
    }

    #[test]
    fn precedence_and_division() {
        assert_eq!(eval_str("3 * 4 / 2"), ExactNumber::int(6));
        assert_eq!(eval_str("2 + 3 * 4"), ExactNumber::int(14));
        assert_eq!(eval_str("(2 + 3) * 4"), ExactNumber::int(20));
        assert_eq!(eval_str("1/2 + 1/3"), ExactNumber::rational(5, 6).unwrap());
    }

    #[test]
    fn latex_operators() {
        assert_eq!(eval_str("1 \\cdot 120"), ExactNumber::int(120));
        assert_eq!(eval_str("285 \\div 3"), ExactNumber::int(95));
        assert_eq!(eval_str("\\frac{1}{2} + \\frac{1}{3}"), eval_str("5/6"));
        assert_eq!(eval_str("4 × 6"), ExactNumber::int(24));
    }

    #[test]
    fn isqrt_and_gcd_atoms() {
        assert_eq!(eval_str("[sqrt(5287)]"), ExactNumber::int(72));
        assert_eq!(eval_str("gcd(12, 8)"), ExactNumber::int(4));
        assert_eq!(eval_str("isqrt(144)"), ExactNumber::int(12));
    }

    #[test]
    fn division_by_zero_reports_subexpression() {
        let expr = parse_expr("1 + 2 / (3 - 3)").unwrap();
        match expr.eval() {
            Err(EvalError::DivisionByZero(at)) => assert_eq!(at, "2 / (3 - 3)"),
            other => panic!("expected division by zero, got {other:?}"),
        }
    }

    #[test]
    fn render_parse_round_trip() {
        for text in [
            "(2 + 3) * (4 - 1)",
            "841 * 29",
            "8 / (3 - 8 / 3)",
            "[sqrt(5287)]",
            "0.25 + 0.5",
            "29^3",
        ] {
            let expr = parse_expr(text).unwrap();
            let rendered = expr.render(NumberStyle::Plain);
            let reparsed = parse_expr(&rendered).unwrap();
            assert_eq!(
                reparsed.eval().unwrap(),
                expr.eval().unwrap(),
                "round trip of {text} via {rendered}"
            );
        }
    }

    #[test]
    fn unary_minus_binds_one_atom() {
        assert_eq!(eval_str("-3 + 5"), ExactNumber::int(2));
        assert_eq!(eval_str("4 - -2"), ExactNumber::int(6));
    }

    #[test]
    fn pow_of_bracketed_sum() {
        let expr = parse_expr("(12 + 17)^3").unwrap();
        assert_eq!(expr.op_count(), 2);
        assert_eq!(expr.render(NumberStyle::Plain), "(12 + 17)^3");
    }
}
