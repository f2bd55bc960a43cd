//! Seeded synthetic SFT record generation.
//!
//! Operands mix a fixed traversal of commonly used values with uniform
//! draws at a sampled digit length (up to ten digits). Record `i` of a
//! batch derives its RNG from `(master_seed, i)` alone, so generation is
//! order-independent and parallelizable, and two runs with the same seed
//! emit byte-identical JSONL.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::exact::{digit_count, ExactNumber};
use crate::expr::{BinOp, Expr};
use crate::trace::{
    solve_game_of_k, trace_bracket_expr, trace_decimal, trace_fraction, trace_fraction_reduce,
    trace_factorize, trace_polynomial_eval, trace_power, trace_prime_check, trace_remainder,
    trace_triangle_area, CalcTrace, Family, GameConfig, TriangleConfig,
};

mod templates;

pub use templates::{
    answer_from_response, inputs_from_captures, invert_query, placeholder_values, render_query,
    render_response, QueryStyle, Template, TemplateError, TemplatePack,
};

/// Commonly used values traversed alongside uniform sampling.
pub const COMMON_VALUES: [u64; 24] = [
    0, 1, 2, 10, 100, 3, 4, 5, 6, 7, 8, 9, 11, 12, 15, 16, 20, 24, 25, 32, 50, 64, 1000, 10000,
];

/// Generator configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Upper bound on sampled digit lengths, within [1, 10].
    pub max_digits: u32,
    /// Fractional digits of decimal operands, within [1, 4] by default.
    pub decimal_scale: u32,
    /// Probability of drawing from the common-value traversal instead of a
    /// uniform digit draw.
    pub common_value_weight: f64,
    pub game: GameKnobs,
    pub triangle: TriangleConfig,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct GameKnobs {
    pub cards: usize,
    pub target: i64,
    pub max_dead_ends: usize,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        GeneratorConfig {
            max_digits: 10,
            decimal_scale: 4,
            common_value_weight: 0.25,
            game: GameKnobs {
                cards: 4,
                target: 24,
                max_dead_ends: 12,
            },
            triangle: TriangleConfig::default(),
        }
    }
}

/// Configuration errors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConfigError {
    #[error("max_digits {0} outside [1, 10]")]
    ConfigOutOfRange(u32),
}

impl GeneratorConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_digits < 1 || self.max_digits > 10 {
            return Err(ConfigError::ConfigOutOfRange(self.max_digits));
        }
        Ok(())
    }
}

/// Record metadata; the seed alone reproduces the record under the same
/// config and template pack.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordMeta {
    pub task: Family,
    pub template_id: String,
    pub seed: u64,
    pub operand_digits: u32,
    pub locale: String,
    pub pack_hash: String,
    /// Set when 32 resampling attempts still collided with an earlier
    /// query; downstream dedup removes the survivor's duplicates.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub dedup_marker: bool,
}

/// One rendered query/response pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftRecord {
    pub query: String,
    pub response: String,
    pub meta: RecordMeta,
}

/// Generation errors.
#[derive(Debug, thiserror::Error)]
pub enum SynthError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Template(#[from] TemplateError),
    #[error("trace construction failed: {0}")]
    Trace(#[from] crate::trace::TraceError),
}

/// Sampled operands for one record, family-tagged.
#[derive(Debug, Clone)]
pub enum Operands {
    Expression(Expr),
    Pair(BigInt, BigInt),
    PairWithOp(ExactNumber, BinOp, ExactNumber),
    Single(BigInt),
    Power { base: BigInt, exp: u32 },
    Polynomial { coeffs: Vec<BigInt>, x: ExactNumber },
    Sides(ExactNumber, ExactNumber, ExactNumber),
    Hand { cards: Vec<BigInt>, target: BigInt },
}

impl Operands {
    /// Largest decimal digit count among the sampled integers/mantissas.
    pub fn digit_width(&self) -> u32 {
        fn num_width(n: &ExactNumber) -> u32 {
            let (num, den) = n.as_ratio();
            (digit_count(&num).max(digit_count(&den))) as u32
        }
        match self {
            Operands::Expression(e) => expr_width(e),
            Operands::Pair(a, b) => (digit_count(a).max(digit_count(b))) as u32,
            Operands::PairWithOp(a, _, b) => num_width(a).max(num_width(b)),
            Operands::Single(n) => digit_count(n) as u32,
            Operands::Power { base, .. } => digit_count(base) as u32,
            Operands::Polynomial { coeffs, x } => coeffs
                .iter()
                .map(|c| digit_count(c) as u32)
                .max()
                .unwrap_or(1)
                .max(num_width(x)),
            Operands::Sides(a, b, c) => num_width(a).max(num_width(b)).max(num_width(c)),
            Operands::Hand { cards, target } => cards
                .iter()
                .map(|c| digit_count(c) as u32)
                .max()
                .unwrap_or(1)
                .max(digit_count(target) as u32),
        }
    }
}

fn expr_width(e: &Expr) -> u32 {
    match e.as_literal() {
        Some(v) => {
            let (num, den) = v.as_ratio();
            (digit_count(&num).max(digit_count(&den))) as u32
        }
        None => match e {
            Expr::Neg(x) | Expr::Isqrt(x) => expr_width(x),
            Expr::Pow { base, .. } => expr_width(base),
            Expr::Bin { lhs, rhs, .. } => expr_width(lhs).max(expr_width(rhs)),
            Expr::Gcd(a, b) => expr_width(a).max(expr_width(b)),
            Expr::Num(_) | Expr::DecLit { .. } => 1,
        },
    }
}

/// Uniform positive integer with exactly `digits` decimal digits (1-digit
/// draws include 0).
fn uniform_digits(rng: &mut ChaCha8Rng, digits: u32) -> u64 {
    if digits <= 1 {
        return rng.gen_range(0..10);
    }
    let low = 10u64.pow(digits - 1);
    let high = 10u64.pow(digits);
    rng.gen_range(low..high)
}

/// A value from the common traversal or a uniform digit draw.
fn sample_value(rng: &mut ChaCha8Rng, config: &GeneratorConfig, max_digits: u32) -> u64 {
    if rng.gen_bool(config.common_value_weight) {
        let cap = 10u64.saturating_pow(max_digits);
        let pool: Vec<u64> = COMMON_VALUES.iter().copied().filter(|&v| v < cap).collect();
        pool[rng.gen_range(0..pool.len())]
    } else {
        let digits = rng.gen_range(1..=max_digits);
        uniform_digits(rng, digits)
    }
}

/// Samples the operands for one record of a family. Deterministic in
/// `seed`.
pub fn sample_operands(
    task: Family,
    seed: u64,
    config: &GeneratorConfig,
) -> Result<Operands, ConfigError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(sample_operands_with(&mut rng, task, config))
}

fn sample_operands_with(rng: &mut ChaCha8Rng, task: Family, config: &GeneratorConfig) -> Operands {
    match task {
        Family::Bracket => Operands::Expression(random_bracket_expr(rng, config)),
        Family::Decimal => {
            let op = random_op(rng);
            let scale_a = rng.gen_range(1..=config.decimal_scale);
            let scale_b = rng.gen_range(1..=config.decimal_scale);
            let digits = config.max_digits.min(6);
            let a = ExactNumber::decimal(
                BigInt::from(sample_value(rng, config, digits).max(1)),
                scale_a,
            );
            let b = ExactNumber::decimal(
                BigInt::from(sample_value(rng, config, digits).max(1)),
                scale_b,
            );
            if op == BinOp::Div {
                // Keep quotients exact: dividend = quotient * divisor.
                let q = ExactNumber::decimal(BigInt::from(rng.gen_range(1..=999u64)), rng.gen_range(0..=2));
                let a = q.mul(&b);
                Operands::PairWithOp(a, op, b)
            } else {
                Operands::PairWithOp(a, op, b)
            }
        }
        Family::Fraction => {
            let op = random_op(rng);
            let frac = |rng: &mut ChaCha8Rng| {
                let den = rng.gen_range(2..=30u64);
                let num = rng.gen_range(1..=99u64);
                ExactNumber::rational(BigInt::from(num), BigInt::from(den)).expect("den > 0")
            };
            Operands::PairWithOp(frac(rng), op, frac(rng))
        }
        Family::FractionReduce => {
            let g = rng.gen_range(1..=1000u64);
            let p = rng.gen_range(1..=99_999u64) * g;
            let q = rng.gen_range(1..=99_999u64) * g;
            Operands::Pair(BigInt::from(p), BigInt::from(q))
        }
        Family::Remainder => {
            let a = sample_value(rng, config, config.max_digits);
            let b_digits = rng.gen_range(1..=config.max_digits.div_ceil(2));
            let b = uniform_digits(rng, b_digits).max(1);
            Operands::Pair(BigInt::from(a), BigInt::from(b))
        }
        Family::Power => {
            let base = BigInt::from(rng.gen_range(2..=999u64));
            let exp = if base < BigInt::from(100) {
                rng.gen_range(2..=5)
            } else {
                rng.gen_range(2..=3)
            };
            Operands::Power { base, exp }
        }
        Family::Polynomial => {
            let degree = rng.gen_range(1..=3usize);
            let mut coeffs: Vec<BigInt> = (0..=degree)
                .map(|_| BigInt::from(rng.gen_range(-9i64..=9)))
                .collect();
            if coeffs[degree] == BigInt::from(0) {
                coeffs[degree] = BigInt::from(rng.gen_range(1..=9i64));
            }
            let x = ExactNumber::int(rng.gen_range(-9i64..=9));
            Operands::Polynomial { coeffs, x }
        }
        Family::Prime => {
            // Half of the draws follow the last-digit convention so trial
            // division actually runs; the rest cover the shortcuts.
            let digits = rng.gen_range(1..=config.max_digits);
            let mut n = uniform_digits(rng, digits).max(2);
            if rng.gen_bool(0.5) {
                let endings = [1u64, 3, 7, 9];
                n = (n / 10) * 10 + endings[rng.gen_range(0..4)];
                if n < 11 {
                    n += 10;
                }
            }
            Operands::Single(BigInt::from(n.max(2)))
        }
        Family::Factorize => {
            let digits = rng.gen_range(1..=config.max_digits.min(9));
            let n = uniform_digits(rng, digits).max(2);
            Operands::Single(BigInt::from(n))
        }
        Family::Triangle => sample_triangle(rng),
        Family::GameOfK => {
            let cards = (0..config.game.cards)
                .map(|_| BigInt::from(rng.gen_range(1..=13u64)))
                .collect();
            Operands::Hand {
                cards,
                target: BigInt::from(config.game.target),
            }
        }
    }
}

fn random_op(rng: &mut ChaCha8Rng) -> BinOp {
    match rng.gen_range(0..4) {
        0 => BinOp::Add,
        1 => BinOp::Sub,
        2 => BinOp::Mul,
        _ => BinOp::Div,
    }
}

/// Random bracket expression: 2 to 5 operations over small integer leaves,
/// divisions constrained to divide exactly.
fn random_bracket_expr(rng: &mut ChaCha8Rng, config: &GeneratorConfig) -> Expr {
    let ops = rng.gen_range(2..=5usize);
    let leaf_digits = config.max_digits.min(3);
    let mut nodes: Vec<Expr> = (0..=ops)
        .map(|_| {
            let digits = rng.gen_range(1..=leaf_digits);
            Expr::int(BigInt::from(uniform_digits(rng, digits).max(1)))
        })
        .collect();
    while nodes.len() > 1 {
        let i = rng.gen_range(0..nodes.len() - 1);
        let rhs = nodes.remove(i + 1);
        let lhs = nodes.remove(i);
        let op = match rng.gen_range(0..8) {
            0 | 1 | 2 => BinOp::Add,
            3 | 4 => BinOp::Sub,
            5 | 6 => BinOp::Mul,
            _ => BinOp::Div,
        };
        let node = if op == BinOp::Div {
            // Divide exactly: lhs value must be a multiple of a small rhs.
            let value = lhs.eval().expect("integer subtree");
            let v = value.as_integer().expect("integer family").clone();
            let divisor = small_divisor_of(&v, rng);
            Expr::bin(BinOp::Div, lhs, Expr::int(divisor))
        } else {
            Expr::bin(op, lhs, rhs)
        };
        nodes.insert(i, node);
    }
    nodes.pop().expect("one root remains")
}

fn small_divisor_of(v: &BigInt, rng: &mut ChaCha8Rng) -> BigInt {
    use num_traits::Zero;
    let magnitude = if v.is_zero() {
        return BigInt::from(rng.gen_range(1..=9u64));
    } else {
        // Collect divisors up to 99.
        let mut divisors = Vec::new();
        let mut d = BigInt::from(1);
        while d <= BigInt::from(99) {
            if (v % &d).is_zero() {
                divisors.push(d.clone());
            }
            d += 1;
        }
        divisors
    };
    magnitude[rng.gen_range(0..magnitude.len())].clone()
}

fn sample_triangle(rng: &mut ChaCha8Rng) -> Operands {
    const TRIPLES: [(u64, u64, u64); 4] = [(3, 4, 5), (5, 12, 13), (8, 15, 17), (7, 24, 25)];
    let style = rng.gen_range(0..10);
    if style < 4 {
        // Right triangle, optionally scaled, occasionally shrunk to a
        // decimal by a factor of ten.
        let (a, b, c) = TRIPLES[rng.gen_range(0..TRIPLES.len())];
        let scale = rng.gen_range(1..=8u64);
        if rng.gen_bool(0.25) {
            let dec = |v: u64| ExactNumber::decimal(BigInt::from(v * scale), 1);
            Operands::Sides(dec(a), dec(b), dec(c))
        } else {
            let int = |v: u64| ExactNumber::int(BigInt::from(v * scale));
            Operands::Sides(int(a), int(b), int(c))
        }
    } else if style < 8 {
        // Any valid triangle.
        loop {
            let a = rng.gen_range(1..=50u64);
            let b = rng.gen_range(1..=50u64);
            let c = rng.gen_range(1..=50u64);
            let (mut s, mut m, mut l) = (a, b, c);
            if s > m {
                std::mem::swap(&mut s, &mut m);
            }
            if m > l {
                std::mem::swap(&mut m, &mut l);
            }
            if s > m {
                std::mem::swap(&mut s, &mut m);
            }
            if s + m > l {
                return Operands::Sides(
                    ExactNumber::int(BigInt::from(a)),
                    ExactNumber::int(BigInt::from(b)),
                    ExactNumber::int(BigInt::from(c)),
                );
            }
        }
    } else {
        // Invalid: force a + b <= c.
        let a = rng.gen_range(1..=20u64);
        let b = rng.gen_range(1..=20u64);
        let c = a + b + rng.gen_range(0..=5u64);
        Operands::Sides(
            ExactNumber::int(BigInt::from(a)),
            ExactNumber::int(BigInt::from(b)),
            ExactNumber::int(BigInt::from(c)),
        )
    }
}

/// Builds the trace for sampled operands.
pub fn trace_from_operands(
    task: Family,
    operands: &Operands,
    config: &GeneratorConfig,
) -> Result<CalcTrace, crate::trace::TraceError> {
    match (task, operands) {
        (Family::Bracket, Operands::Expression(e)) => trace_bracket_expr(e),
        (Family::Decimal, Operands::PairWithOp(a, op, b)) => trace_decimal(a, *op, b),
        (Family::Fraction, Operands::PairWithOp(a, op, b)) => trace_fraction(a, *op, b),
        (Family::FractionReduce, Operands::Pair(p, q)) => trace_fraction_reduce(p, q),
        (Family::Remainder, Operands::Pair(a, b)) => trace_remainder(a, b),
        (Family::Power, Operands::Power { base, exp }) => trace_power(base, *exp),
        (Family::Polynomial, Operands::Polynomial { coeffs, x }) => {
            trace_polynomial_eval(coeffs, x)
        }
        (Family::Prime, Operands::Single(n)) => trace_prime_check(n),
        (Family::Factorize, Operands::Single(n)) => trace_factorize(n),
        (Family::Triangle, Operands::Sides(a, b, c)) => {
            trace_triangle_area(a, b, c, config.triangle)
        }
        (Family::GameOfK, Operands::Hand { cards, target }) => solve_game_of_k(
            cards,
            target,
            GameConfig {
                max_dead_ends: config.game.max_dead_ends,
            },
        ),
        _ => Err(crate::trace::TraceError::Invalid(
            "operands do not fit the family".into(),
        )),
    }
}

/// Renders a trace through a template into an SFT record.
pub fn render(
    template: &Template,
    trace: &CalcTrace,
    seed: u64,
    operand_digits: u32,
    pack_hash: &str,
) -> Result<SftRecord, TemplateError> {
    let query = render_query(template, trace)?;
    let response = render_response(template, trace);
    Ok(SftRecord {
        query,
        response,
        meta: RecordMeta {
            task: trace.task,
            template_id: template.id.clone(),
            seed,
            operand_digits,
            locale: template.locale.clone(),
            pack_hash: pack_hash.to_string(),
        dedup_marker: false,
        },
    })
}

/// Mixes the batch seed, record index, and resample attempt into one
/// record seed (splitmix64 over the packed inputs).
pub fn record_seed(master_seed: u64, index: u64, attempt: u32) -> u64 {
    let mut z = master_seed
        .wrapping_add(0x9E3779B97F4A7C15u64.wrapping_mul(index.wrapping_add(1)))
        .wrapping_add(0x100000001B3u64.wrapping_mul(attempt as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

const MAX_RESAMPLE_ATTEMPTS: u32 = 32;

/// Generates one record deterministically from its seed.
pub fn generate_record(
    task: Family,
    seed: u64,
    config: &GeneratorConfig,
    pack: &TemplatePack,
    pack_hash: &str,
) -> Result<SftRecord, SynthError> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let operands = sample_operands_with(&mut rng, task, config);
    let trace = trace_from_operands(task, &operands, config)?;
    let candidates = pack.for_family(task);
    if candidates.is_empty() {
        return Err(SynthError::Template(TemplateError::TooFewTemplates(task, 1)));
    }
    let template = candidates[rng.gen_range(0..candidates.len())];
    Ok(render(template, &trace, seed, operands.digit_width(), pack_hash)?)
}

/// Generates `count` records. Exact duplicate queries are resampled up to
/// 32 times; a survivor that still collides is emitted with its dedup
/// marker set. Output is a pure function of the arguments: first attempts
/// run in parallel, collisions resolve in index order, so the result is
/// byte-identical at any parallelism degree.
pub fn generate_batch(
    task: Family,
    count: usize,
    master_seed: u64,
    config: &GeneratorConfig,
    pack: &TemplatePack,
    pack_hash: &str,
) -> Result<Vec<SftRecord>, SynthError> {
    use rayon::prelude::*;
    let first_attempts: Vec<Result<SftRecord, SynthError>> = (0..count as u64)
        .into_par_iter()
        .map(|index| generate_record(task, record_seed(master_seed, index, 0), config, pack, pack_hash))
        .collect();

    let mut records = Vec::with_capacity(count);
    let mut seen = std::collections::HashSet::with_capacity(count);
    for (index, first) in first_attempts.into_iter().enumerate() {
        let first = first?;
        if seen.insert(first.query.clone()) {
            records.push(first);
            continue;
        }
        let mut record = None;
        for attempt in 1..MAX_RESAMPLE_ATTEMPTS {
            let seed = record_seed(master_seed, index as u64, attempt);
            let candidate = generate_record(task, seed, config, pack, pack_hash)?;
            if seen.insert(candidate.query.clone()) {
                record = Some(candidate);
                break;
            }
        }
        let record = match record {
            Some(r) => r,
            None => {
                let seed = record_seed(master_seed, index as u64, MAX_RESAMPLE_ATTEMPTS - 1);
                let mut r = generate_record(task, seed, config, pack, pack_hash)?;
                r.meta.dedup_marker = true;
                r
            }
        };
        records.push(record);
    }
    Ok(records)
}

/// Re-parses a rendered record back into a verifiable trace: inputs from
/// the query (via its template), steps from the response lines, and the
/// answer from the final answer sentence.
pub fn parse_record(record: &SftRecord, pack: &TemplatePack) -> Result<CalcTrace, TemplateError> {
    use crate::trace::{StepKind, TraceStep};
    let template = pack.by_id(&record.meta.template_id)?;
    let captures = invert_query(template, &record.query)?;
    let inputs = inputs_from_captures(template.task, &captures)?;
    let answer = answer_from_response(template.task, &record.response)?;
    let steps = record
        .response
        .lines()
        .filter(|l| !l.trim().is_empty())
        .enumerate()
        .map(|(i, line)| {
            TraceStep::new(
                StepKind::Rewrite,
                line,
                if i == 0 { vec![] } else { vec![i - 1] },
            )
        })
        .collect();
    Ok(CalcTrace {
        task: template.task,
        inputs,
        steps,
        answer,
    })
}
