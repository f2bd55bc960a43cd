//! Text grammar for exact numbers.
//!
//! Accepted forms: `-?digits`, `-?digits.digits`, `a/b`, and `\frac{a}{b}`
//! (numerator and denominator integers, optionally signed). Rendering is
//! style-dependent: traces use the plain forms, SFT records may use LaTeX
//! fractions. Round-tripping a canonical rendering is the identity.

use num_bigint::BigInt;
use num_traits::Zero;

use super::{ExactNumber, NumError};

/// Output channel style for rendered numbers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NumberStyle {
    /// `3/2`, `0.75`, `-12`
    #[default]
    Plain,
    /// `\frac{3}{2}` for rationals; integers and decimals as in `Plain`.
    Latex,
}

pub(super) fn render_number(n: &ExactNumber, style: NumberStyle) -> String {
    match n {
        ExactNumber::Integer(i) => i.to_string(),
        ExactNumber::Rational(r) => match style {
            NumberStyle::Plain => format!("{}/{}", r.num, r.den),
            NumberStyle::Latex => {
                if r.num.is_negative() {
                    format!("-\\frac{{{}}}{{{}}}", -&r.num, r.den)
                } else {
                    format!("\\frac{{{}}}{{{}}}", r.num, r.den)
                }
            }
        },
        ExactNumber::Decimal(d) => {
            let negative = d.mantissa.is_negative();
            let digits = d.mantissa.magnitude().to_string();
            let scale = d.scale as usize;
            let (int_part, frac_part) = if digits.len() > scale {
                let split = digits.len() - scale;
                (digits[..split].to_string(), digits[split..].to_string())
            } else {
                ("0".to_string(), format!("{:0>width$}", digits, width = scale))
            };
            format!("{}{}.{}", if negative { "-" } else { "" }, int_part, frac_part)
        }
    }
}

use num_traits::Signed;

/// Parses a number in the canonical grammar. Fractions normalize, so
/// `"3/6"` parses to the rational 1/2.
pub fn parse_number(s: &str) -> Result<ExactNumber, NumError> {
    let trimmed = s.trim();
    let offset = s.len() - s.trim_start().len();
    let mut p = Parser {
        input: trimmed,
        pos: 0,
        offset,
    };
    let value = p.number()?;
    if p.pos != p.input.len() {
        return Err(p.error("trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
    offset: usize,
}

impl<'a> Parser<'a> {
    fn error(&self, msg: &str) -> NumError {
        NumError::Parse {
            pos: self.offset + self.pos,
            msg: msg.to_string(),
        }
    }

    fn rest(&self) -> &str {
        &self.input[self.pos..]
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<ExactNumber, NumError> {
        if self.rest().starts_with("\\frac") || self.rest().starts_with("-\\frac") {
            return self.latex_fraction();
        }
        let numerator = self.decimal_or_int()?;
        if self.eat("/") {
            let denominator = self.decimal_or_int()?;
            let (num_int, den_int) = match (&numerator, &denominator) {
                (ExactNumber::Integer(a), ExactNumber::Integer(b)) => (a.clone(), b.clone()),
                _ => return Err(self.error("fraction parts must be integers")),
            };
            if den_int.is_zero() {
                return Err(self.error("zero denominator"));
            }
            return ExactNumber::rational(num_int, den_int);
        }
        Ok(numerator)
    }

    fn latex_fraction(&mut self) -> Result<ExactNumber, NumError> {
        let negate = self.eat("-");
        if !self.eat("\\frac") {
            return Err(self.error("expected \\frac"));
        }
        let num = self.braced_int()?;
        let den = self.braced_int()?;
        if den.is_zero() {
            return Err(self.error("zero denominator"));
        }
        let value = ExactNumber::rational(num, den)?;
        Ok(if negate { value.neg() } else { value })
    }

    fn braced_int(&mut self) -> Result<BigInt, NumError> {
        if !self.eat("{") {
            return Err(self.error("expected '{'"));
        }
        let sign = if self.eat("-") { -1 } else { 1 };
        let digits = self.digits()?;
        if !self.eat("}") {
            return Err(self.error("expected '}'"));
        }
        Ok(BigInt::from(sign) * digits)
    }

    fn decimal_or_int(&mut self) -> Result<ExactNumber, NumError> {
        let negative = self.eat("-");
        let int_digits = self.digits_str()?;
        if self.rest().starts_with('.')
            && self.rest().as_bytes().get(1).is_some_and(|b| b.is_ascii_digit())
        {
            self.pos += 1;
            let frac_digits = self.digits_str()?;
            let mantissa: BigInt = format!("{int_digits}{frac_digits}")
                .parse()
                .map_err(|_| self.error("bad digits"))?;
            let mantissa = if negative { -mantissa } else { mantissa };
            return Ok(ExactNumber::decimal(mantissa, frac_digits.len() as u32));
        }
        let value: BigInt = int_digits.parse().map_err(|_| self.error("bad digits"))?;
        Ok(ExactNumber::Integer(if negative { -value } else { value }))
    }

    fn digits(&mut self) -> Result<BigInt, NumError> {
        let s = self.digits_str()?;
        s.parse().map_err(|_| self.error("bad digits"))
    }

    fn digits_str(&mut self) -> Result<String, NumError> {
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
            return Err(self.error("expected digits"));
        }
        Ok(self.input[start..self.pos].to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_latex_fraction() {
        assert_eq!(
            parse_number("\\frac{1}{2}").unwrap(),
            ExactNumber::rational(1, 2).unwrap()
        );
        assert_eq!(
            parse_number("-\\frac{3}{4}").unwrap(),
            ExactNumber::rational(-3, 4).unwrap()
        );
    }

    #[test]
    fn parses_integer_and_decimal() {
        assert_eq!(parse_number("24389").unwrap(), ExactNumber::int(24389));
        assert_eq!(parse_number("-7").unwrap(), ExactNumber::int(-7));
        assert_eq!(parse_number("0.75").unwrap(), ExactNumber::decimal(75, 2));
        assert_eq!(parse_number("-0.5").unwrap(), ExactNumber::decimal(-5, 1));
    }

    #[test]
    fn fraction_normalizes() {
        assert_eq!(
            parse_number("3/6").unwrap(),
            ExactNumber::rational(1, 2).unwrap()
        );
        assert_eq!(parse_number("4/2").unwrap(), ExactNumber::int(2));
    }

    #[test]
    fn parse_errors_carry_position() {
        match parse_number("12x") {
            Err(NumError::Parse { pos, .. }) => assert_eq!(pos, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("").is_err());
    }

    #[test]
    fn render_round_trips() {
        for text in ["5/6", "-3/2", "0.75", "-0.5", "24389", "0", "0.006"] {
            let value = parse_number(text).unwrap();
            assert_eq!(value.render(NumberStyle::Plain), text);
            let latex = value.render(NumberStyle::Latex);
            assert_eq!(parse_number(&latex).unwrap(), value);
        }
    }

    #[test]
    fn decimal_rendering_pads_leading_zeros() {
        assert_eq!(ExactNumber::decimal(6, 3).render(NumberStyle::Plain), "0.006");
        assert_eq!(ExactNumber::decimal(-6, 3).render(NumberStyle::Plain), "-0.006");
        assert_eq!(ExactNumber::decimal(1234, 2).render(NumberStyle::Plain), "12.34");
    }
}
