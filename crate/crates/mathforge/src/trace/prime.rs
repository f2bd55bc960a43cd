//! Primality checking and factorization traces.
//!
//! Trial division follows the written convention: the last digit rules out
//! 2 and 5, then odd primes up to the integer square root are tried in
//! ascending order, stopping at the first witness.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::expr::Expr;

use super::{Answer, CalcTrace, Family, StepKind, TraceError, TraceStep, Verdict};

/// Inputs above this bound would need sieving past 10^6.
pub const MAX_PRIME_INPUT: u64 = 1_000_000_000_000;

/// Primes listed verbatim in the enumeration step when there are at most
/// this many; larger lists are elided.
const LIST_LIMIT: usize = 25;

/// Simple sieve of Eratosthenes.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut is_prime = vec![true; n + 1];
    is_prime[0] = false;
    if n >= 1 {
        is_prime[1] = false;
    }
    let mut p = 2;
    while p * p <= n {
        if is_prime[p] {
            let mut m = p * p;
            while m <= n {
                is_prime[m] = false;
                m += p;
            }
        }
        p += 1;
    }
    is_prime
        .iter()
        .enumerate()
        .filter_map(|(i, &ok)| ok.then_some(i as u64))
        .collect()
}

fn shared_primes() -> &'static Vec<u64> {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| primes_up_to(1_000_000))
}

fn isqrt_u64(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r.checked_mul(r).map_or(true, |sq| sq > n) {
        r -= 1;
    }
    while (r + 1).checked_mul(r + 1).is_some_and(|sq| sq <= n) {
        r += 1;
    }
    r
}

/// Trial-division primality for inputs within [`MAX_PRIME_INPUT`].
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let bound = isqrt_u64(n);
    for &p in shared_primes() {
        if p > bound {
            break;
        }
        if n % p == 0 {
            return n == p;
        }
    }
    true
}

fn to_checked_u64(n: &BigInt) -> Result<u64, TraceError> {
    let v = n
        .to_u64()
        .filter(|&v| v <= MAX_PRIME_INPUT)
        .ok_or_else(|| TraceError::Invalid(format!("{n} exceeds the 12-digit cap")))?;
    Ok(v)
}

fn prime_list_text(bound: u64) -> String {
    let primes: Vec<u64> = shared_primes()
        .iter()
        .copied()
        .take_while(|&p| p <= bound)
        .filter(|&p| p > 2)
        .collect();
    if primes.is_empty() {
        return "There are no odd primes up to the bound.".to_string();
    }
    if primes.len() <= LIST_LIMIT {
        format!(
            "Prime numbers: {}",
            primes
                .iter()
                .map(|p| p.to_string())
                .collect::<Vec<_>>()
                .join(",")
        )
    } else {
        let head: Vec<String> = primes.iter().take(8).map(|p| p.to_string()).collect();
        format!(
            "Prime numbers: {},... ({} odd primes up to {})",
            head.join(","),
            primes.len(),
            primes.last().unwrap()
        )
    }
}

/// Step-by-step primality check: last-digit shortcut, square-root bound,
/// prime enumeration, ascending trial divisions stopping at the first
/// witness.
pub fn trace_prime_check(n: &BigInt) -> Result<CalcTrace, TraceError> {
    if n < &BigInt::from(2) {
        return Err(TraceError::InputTooSmall(n.to_string()));
    }
    let v = to_checked_u64(n)?;
    let inputs = vec![Expr::int(n.clone())];
    let mut steps = Vec::new();

    if v == 2 || v == 3 || v == 5 {
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("{v} is a prime number."),
            vec![],
        ));
        return Ok(CalcTrace {
            task: Family::Prime,
            inputs,
            steps,
            answer: Answer::Verdict(Verdict::Prime),
        });
    }

    // Last-digit shortcut for 2 and 5.
    let last = v % 10;
    let head = v / 10;
    steps.push(TraceStep::new(
        StepKind::Compare,
        format!("{v} = {head} * 10 + {last}, so {v} ends with {last}."),
        vec![],
    ));
    if last % 2 == 0 || last == 5 {
        let witness = if last % 2 == 0 { 2u64 } else { 5 };
        let q = v / witness;
        steps.push(TraceStep::new(
            StepKind::Branch,
            format!("A number ending with {last} is divisible by {witness}."),
            vec![0],
        ));
        steps.push(TraceStep::new(
            StepKind::Rewrite,
            format!("{v} / {witness} = {q} ... 0."),
            vec![1],
        ));
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("{v} can be divided by {witness}. {v} is a composite number."),
            vec![2],
        ));
        return Ok(CalcTrace {
            task: Family::Prime,
            inputs,
            steps,
            answer: Answer::Verdict(Verdict::Composite {
                witness: BigInt::from(witness),
            }),
        });
    }
    steps.push(TraceStep::new(
        StepKind::Branch,
        format!("A number ending with {last} is not divisible by 2 or 5."),
        vec![0],
    ));

    let bound = isqrt_u64(v);
    steps.push(TraceStep::new(
        StepKind::Rewrite,
        format!("[sqrt({v})] = {bound}."),
        vec![],
    ));
    steps.push(TraceStep::new(
        StepKind::Branch,
        format!("We need to check prime numbers between 3 to {bound}."),
        vec![2],
    ));
    steps.push(TraceStep::new(StepKind::Branch, prime_list_text(bound), vec![3]));

    let mut witness: Option<u64> = None;
    for &p in shared_primes() {
        if p > bound {
            break;
        }
        if p == 2 || p == 5 {
            continue;
        }
        let (q, r) = (v / p, v % p);
        steps.push(TraceStep::new(
            StepKind::Search,
            format!("{v} / {p} = {q} ... {r}"),
            vec![steps.len() - 1],
        ));
        if r == 0 {
            witness = Some(p);
            break;
        }
    }

    let answer = match witness {
        Some(w) => {
            steps.push(TraceStep::new(
                StepKind::Branch,
                format!("{v} can be divided by {w}."),
                vec![steps.len() - 1],
            ));
            steps.push(TraceStep::new(
                StepKind::Result,
                format!("{v} is a composite number."),
                vec![steps.len() - 1],
            ));
            Answer::Verdict(Verdict::Composite {
                witness: BigInt::from(w),
            })
        }
        None => {
            steps.push(TraceStep::new(
                StepKind::Result,
                format!("No prime between 3 and {bound} divides {v}. {v} is a prime number."),
                vec![steps.len() - 1],
            ));
            Answer::Verdict(Verdict::Prime)
        }
    };

    Ok(CalcTrace {
        task: Family::Prime,
        inputs,
        steps,
        answer,
    })
}

/// Repeated smallest-prime-factor extraction.
pub fn trace_factorize(n: &BigInt) -> Result<CalcTrace, TraceError> {
    if n < &BigInt::from(2) {
        return Err(TraceError::InputTooSmall(n.to_string()));
    }
    let v = to_checked_u64(n)?;
    let inputs = vec![Expr::int(n.clone())];
    let mut steps = Vec::new();
    let mut factors: Vec<u64> = Vec::new();

    let mut m = v;
    while m > 1 {
        let bound = isqrt_u64(m);
        let mut smallest: Option<u64> = None;
        for &p in shared_primes() {
            if p > bound {
                break;
            }
            if m % p == 0 {
                smallest = Some(p);
                break;
            }
        }
        let deps = if steps.is_empty() { vec![] } else { vec![steps.len() - 1] };
        match smallest {
            Some(p) => {
                let q = m / p;
                steps.push(TraceStep::new(
                    StepKind::Rewrite,
                    format!("{m} / {p} = {q} ... 0, so {p} is a factor."),
                    deps,
                ));
                factors.push(p);
                m = q;
            }
            None => {
                steps.push(TraceStep::new(
                    StepKind::Branch,
                    format!("[sqrt({m})] = {bound} and no prime up to {bound} divides {m}, so {m} is prime."),
                    deps,
                ));
                factors.push(m);
                m = 1;
            }
        }
    }

    let product = factors
        .iter()
        .map(|f| f.to_string())
        .collect::<Vec<_>>()
        .join(" * ");
    if factors.len() > 1 {
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("{v} = {product}."),
            vec![steps.len() - 1],
        ));
    } else {
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("{v} is prime, so its only prime factor is itself."),
            vec![steps.len() - 1],
        ));
    }

    Ok(CalcTrace {
        task: Family::Factorize,
        inputs,
        steps,
        answer: Answer::Factors(factors.into_iter().map(BigInt::from).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trace::verify_trace;

    #[test]
    fn paper_prime_case_study() {
        let trace = trace_prime_check(&BigInt::from(5287)).unwrap();
        let joined = trace.step_texts().join("\n");
        assert!(joined.contains("[sqrt(5287)] = 72"), "{joined}");
        assert!(joined.contains("between 3 to 72"), "{joined}");
        // Exact remainders throughout; trial divisors 3, 7, 11, 13 fail,
        // then 17 divides.
        assert!(joined.contains("5287 / 3 = 1762 ... 1"), "{joined}");
        assert!(joined.contains("5287 / 7 = 755 ... 2"), "{joined}");
        assert!(joined.contains("5287 / 11 = 480 ... 7"), "{joined}");
        assert!(joined.contains("5287 / 13 = 406 ... 9"), "{joined}");
        assert!(joined.contains("5287 / 17 = 311 ... 0"), "{joined}");
        assert!(joined.contains("5287 can be divided by 17"), "{joined}");
        assert!(joined.contains("5287 is a composite number"), "{joined}");
        assert_eq!(
            trace.answer,
            Answer::Verdict(Verdict::Composite {
                witness: BigInt::from(17)
            })
        );
        // Divisions stop at the witness: no trial beyond 17.
        assert!(!joined.contains("5287 / 19"), "{joined}");
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn two_is_prime_with_no_divisions() {
        let trace = trace_prime_check(&BigInt::from(2)).unwrap();
        assert_eq!(trace.answer, Answer::Verdict(Verdict::Prime));
        assert_eq!(trace.steps.len(), 1);
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn even_number_shortcut() {
        let trace = trace_prime_check(&BigInt::from(5286)).unwrap();
        assert_eq!(
            trace.answer,
            Answer::Verdict(Verdict::Composite {
                witness: BigInt::from(2)
            })
        );
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn verdicts_match_sieve_up_to_10000() {
        let primes: std::collections::HashSet<u64> =
            primes_up_to(10_000).into_iter().collect();
        for n in 2..=10_000u64 {
            let trace = trace_prime_check(&BigInt::from(n)).unwrap();
            let is_prime = matches!(trace.answer, Answer::Verdict(Verdict::Prime));
            assert_eq!(is_prime, primes.contains(&n), "disagreement at {n}");
        }
    }

    #[test]
    fn divisions_strictly_ascending() {
        let trace = trace_prime_check(&BigInt::from(999_983)).unwrap();
        assert_eq!(trace.answer, Answer::Verdict(Verdict::Prime));
        let mut last = 0u64;
        for step in &trace.steps {
            if matches!(step.kind, StepKind::Search) {
                let divisor: u64 = step
                    .text
                    .split('/')
                    .nth(1)
                    .unwrap()
                    .split('=')
                    .next()
                    .unwrap()
                    .trim()
                    .parse()
                    .unwrap();
                assert!(divisor > last, "non-ascending divisor {divisor}");
                last = divisor;
            }
        }
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn factorize_basics() {
        let trace = trace_factorize(&BigInt::from(12)).unwrap();
        assert_eq!(
            trace.answer,
            Answer::Factors(vec![BigInt::from(2), BigInt::from(2), BigInt::from(3)])
        );
        assert!(verify_trace(&trace).pass());

        let trace = trace_factorize(&BigInt::from(17)).unwrap();
        assert_eq!(trace.answer, Answer::Factors(vec![BigInt::from(17)]));
        assert!(verify_trace(&trace).pass());

        assert!(trace_factorize(&BigInt::from(1)).is_err());
    }

    #[test]
    fn factorize_product_and_primality() {
        for n in [360u64, 97, 1024, 999_999, 5287] {
            let trace = trace_factorize(&BigInt::from(n)).unwrap();
            if let Answer::Factors(fs) = &trace.answer {
                let product: BigInt = fs.iter().product();
                assert_eq!(product, BigInt::from(n));
                for f in fs {
                    assert!(is_prime_u64(f.to_u64().unwrap()), "{f} not prime");
                }
            } else {
                panic!("expected factors");
            }
            assert!(verify_trace(&trace).pass());
        }
    }
}
