//! Arithmetic trace families: bracket expressions, decimals, fractions,
//! fraction reduction, remainders, powers, and polynomial evaluation.

use num_bigint::BigInt;
use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::exact::{digit_count, digit_decompose, floordiv_mod, ExactNumber};
use crate::expr::{BinOp, EvalError, Expr};

use super::{Answer, CalcTrace, Family, StepKind, TraceError, TraceStep};

/// Expands an expression into a chain of value-equal expressions ending in
/// a literal: the inline scratchpad shape
/// `(12+17)^3 = 29^3 = 841 * 29 = (800 + 40 + 1) * 29 = 23200 + 1160 + 29 = 24389`.
///
/// Every adjacent pair of chain elements evaluates to the same exact value.
pub fn expansion_chain(expr: &Expr) -> Result<Vec<Expr>, EvalError> {
    expr.eval()?; // surface division by zero before emitting anything
    let mut chain = vec![expr.clone()];
    let mut current = expr.clone();
    while current.as_literal().is_none() {
        let links = reduce_once(&current)?;
        for link in links {
            if stripped(&link.to_string()) != stripped(&chain.last().unwrap().to_string()) {
                chain.push(link.clone());
            }
            current = link;
        }
    }
    Ok(chain)
}

fn stripped(s: &str) -> String {
    s.chars().filter(|c| !c.is_whitespace()).collect()
}

/// One reduction pass: returns the replacement links, the last of which is
/// the new current expression.
fn reduce_once(expr: &Expr) -> Result<Vec<Expr>, EvalError> {
    // Reduce an inner all-literal node first, so brackets collapse before
    // the root operation is expanded.
    if let Some(inner) = find_inner_reducible(expr) {
        let reduced = replace_node(expr, &inner, &Expr::lit(inner_value(expr, &inner)?))?;
        return Ok(vec![reduced]);
    }
    // Root node with all-literal children.
    match expr {
        Expr::Pow { base, exp } => {
            let b = base.eval()?;
            match exp {
                0 => Ok(vec![Expr::lit(ExactNumber::one())]),
                1 => Ok(vec![Expr::lit(b)]),
                e => {
                    let m = b.pow(e - 1);
                    Ok(vec![Expr::bin(BinOp::Mul, Expr::lit(m), Expr::lit(b))])
                }
            }
        }
        Expr::Bin { op, lhs, rhs } => {
            let a = lhs.eval()?;
            let b = rhs.eval()?;
            reduce_binary(expr, *op, &a, &b)
        }
        Expr::Neg(_) | Expr::Isqrt(_) | Expr::Gcd(_, _) => Ok(vec![Expr::lit(expr.eval()?)]),
        Expr::Num(_) | Expr::DecLit { .. } => unreachable!("literal reached reduce_once"),
    }
}

fn reduce_binary(expr: &Expr, op: BinOp, a: &ExactNumber, b: &ExactNumber) -> Result<Vec<Expr>, EvalError> {
    let value = expr.eval()?;
    let rational = matches!(a, ExactNumber::Rational(_)) || matches!(b, ExactNumber::Rational(_));
    let decimal = matches!(a, ExactNumber::Decimal(_)) || matches!(b, ExactNumber::Decimal(_));
    if rational {
        return Ok(fraction_links(op, a, b, &value));
    }
    if decimal {
        return Ok(decimal_links(op, a, b, &value));
    }
    // Integer × integer: show the distributive expansion when a factor has
    // several digits.
    if op == BinOp::Mul {
        if let (Some(x), Some(y)) = (a.as_integer(), b.as_integer()) {
            if let Some(links) = decomposed_product(x, y, &value) {
                return Ok(links);
            }
        }
    }
    Ok(vec![Expr::lit(value)])
}

/// `841 * 29 → [(800 + 40 + 1) * 29, 23200 + 1160 + 29, 24389]`.
fn decomposed_product(x: &BigInt, y: &BigInt, value: &ExactNumber) -> Option<Vec<Expr>> {
    if !x.is_positive() || !y.is_positive() {
        return None;
    }
    // Decompose the factor with more digits; ties prefer the left.
    let (to_split, other, split_left) = if digit_count(y) > digit_count(x) {
        (y, x, false)
    } else {
        (x, y, true)
    };
    let parts = digit_decompose(to_split).ok()?;
    if parts.len() < 2 {
        return None;
    }
    let sum_expr = sum_of(parts.iter().map(|p| Expr::int(p.clone())).collect());
    let grouped = if split_left {
        Expr::bin(BinOp::Mul, sum_expr, Expr::int(other.clone()))
    } else {
        Expr::bin(BinOp::Mul, Expr::int(other.clone()), sum_expr)
    };
    let partials = sum_of(parts.iter().map(|p| Expr::int(p * other)).collect());
    Some(vec![grouped, partials, Expr::lit(value.clone())])
}

fn sum_of(terms: Vec<Expr>) -> Expr {
    let mut it = terms.into_iter();
    let first = it.next().expect("non-empty sum");
    it.fold(first, |acc, t| Expr::bin(BinOp::Add, acc, t))
}

/// Ratio view of an integer or rational operand.
fn ratio_of(n: &ExactNumber) -> (BigInt, BigInt) {
    n.as_ratio()
}

fn frac_expr(num: &BigInt, den: &BigInt) -> Expr {
    if den.is_one() {
        Expr::int(num.clone())
    } else {
        Expr::bin(BinOp::Div, Expr::int(num.clone()), Expr::int(den.clone()))
    }
}

/// Common-denominator and cross-multiplication links for fraction chains.
fn fraction_links(op: BinOp, a: &ExactNumber, b: &ExactNumber, value: &ExactNumber) -> Vec<Expr> {
    let (an, ad) = ratio_of(a);
    let (bn, bd) = ratio_of(b);
    let mut links = Vec::new();
    match op {
        BinOp::Add | BinOp::Sub => {
            let lcm = ad.lcm(&bd);
            if ad != lcm || bd != lcm {
                let aligned_a = frac_expr(&(&an * (&lcm / &ad)), &lcm);
                let aligned_b = frac_expr(&(&bn * (&lcm / &bd)), &lcm);
                links.push(Expr::bin(op, aligned_a, aligned_b));
            }
            let num = if op == BinOp::Add {
                &an * (&lcm / &ad) + &bn * (&lcm / &bd)
            } else {
                &an * (&lcm / &ad) - &bn * (&lcm / &bd)
            };
            links.push(frac_expr(&num, &lcm));
        }
        BinOp::Mul => {
            links.push(frac_expr(&(&an * &bn), &(&ad * &bd)));
        }
        BinOp::Div => {
            // Flip and multiply.
            links.push(Expr::bin(
                BinOp::Mul,
                frac_expr(&an, &ad),
                frac_expr(&bd, &bn),
            ));
            let (mut num, mut den) = (&an * &bd, &ad * &bn);
            if den.is_negative() {
                num = -num;
                den = -den;
            }
            links.push(frac_expr(&num, &den));
        }
    }
    links.push(Expr::lit(value.clone()));
    links
}

/// Scale-alignment links for decimal chains.
fn decimal_links(op: BinOp, a: &ExactNumber, b: &ExactNumber, value: &ExactNumber) -> Vec<Expr> {
    let (ma, sa) = mantissa_scale(a);
    let (mb, sb) = mantissa_scale(b);
    let mut links = Vec::new();
    match op {
        BinOp::Add | BinOp::Sub => {
            let scale = sa.max(sb);
            let la = &ma * BigInt::from(10).pow(scale - sa);
            let lb = &mb * BigInt::from(10).pow(scale - sb);
            if sa != sb {
                links.push(Expr::bin(
                    op,
                    Expr::DecLit { mantissa: la.clone(), scale },
                    Expr::DecLit { mantissa: lb.clone(), scale },
                ));
            }
            if scale > 0 {
                let pow10 = BigInt::from(10).pow(scale);
                links.push(Expr::bin(
                    BinOp::Div,
                    wrap_parens(Expr::bin(op, Expr::int(la.clone()), Expr::int(lb.clone()))),
                    Expr::int(pow10.clone()),
                ));
                let num = if op == BinOp::Add { la + lb } else { la - lb };
                links.push(Expr::bin(BinOp::Div, Expr::int(num), Expr::int(pow10)));
            }
        }
        BinOp::Mul => {
            let pow10 = BigInt::from(10).pow(sa + sb);
            if sa + sb > 0 {
                links.push(Expr::bin(
                    BinOp::Div,
                    wrap_parens(Expr::bin(BinOp::Mul, Expr::int(ma.clone()), Expr::int(mb.clone()))),
                    Expr::int(pow10.clone()),
                ));
                links.push(Expr::bin(BinOp::Div, Expr::int(&ma * &mb), Expr::int(pow10)));
            }
        }
        BinOp::Div => {
            // Lift both operands to integers at the common scale.
            let scale = sa.max(sb);
            let la = &ma * BigInt::from(10).pow(scale - sa);
            let lb = &mb * BigInt::from(10).pow(scale - sb);
            links.push(Expr::bin(BinOp::Div, Expr::int(la), Expr::int(lb)));
        }
    }
    links.push(Expr::lit(value.clone()));
    links
}

fn wrap_parens(e: Expr) -> Expr {
    // Rendering adds brackets by precedence; a sum under a division already
    // brackets itself, so this is the identity.
    e
}

fn mantissa_scale(n: &ExactNumber) -> (BigInt, u32) {
    match n {
        ExactNumber::Integer(i) => (i.clone(), 0),
        ExactNumber::Decimal(d) => (d.mantissa().clone(), d.scale()),
        ExactNumber::Rational(_) => unreachable!("decimal path on rational"),
    }
}

/// Deepest-leftmost internal node whose children are all literals, when it
/// is not the root. Returned as a path of child indices.
fn find_inner_reducible(expr: &Expr) -> Option<Vec<usize>> {
    fn walk(e: &Expr, path: &mut Vec<usize>, out: &mut Option<Vec<usize>>) {
        if out.is_some() {
            return;
        }
        let children = children_of(e);
        for (i, child) in children.iter().enumerate() {
            if child.as_literal().is_none() {
                path.push(i);
                walk(child, path, out);
                path.pop();
                if out.is_some() {
                    return;
                }
            }
        }
        // All children literal: reducible, but only counts if not the root.
        if !path.is_empty() && !children.is_empty() {
            *out = Some(path.clone());
        }
    }
    let mut out = None;
    walk(expr, &mut Vec::new(), &mut out);
    out
}

fn children_of(e: &Expr) -> Vec<&Expr> {
    match e {
        Expr::Num(_) | Expr::DecLit { .. } => Vec::new(),
        Expr::Neg(x) | Expr::Isqrt(x) => vec![x],
        Expr::Pow { base, .. } => vec![base],
        Expr::Bin { lhs, rhs, .. } => vec![lhs, rhs],
        Expr::Gcd(a, b) => vec![a, b],
    }
}

fn inner_value(root: &Expr, path: &[usize]) -> Result<ExactNumber, EvalError> {
    node_at(root, path).eval()
}

fn node_at<'a>(root: &'a Expr, path: &[usize]) -> &'a Expr {
    let mut node = root;
    for &i in path {
        node = children_of(node)[i];
    }
    node
}

fn replace_node(root: &Expr, path: &[usize], replacement: &Expr) -> Result<Expr, EvalError> {
    if path.is_empty() {
        return Ok(replacement.clone());
    }
    let rebuild = |child: &Expr, idx: usize| -> Result<Expr, EvalError> {
        if idx == path[0] {
            replace_node(child, &path[1..], replacement)
        } else {
            Ok(child.clone())
        }
    };
    Ok(match root {
        Expr::Neg(x) => Expr::Neg(Box::new(rebuild(x, 0)?)),
        Expr::Isqrt(x) => Expr::Isqrt(Box::new(rebuild(x, 0)?)),
        Expr::Pow { base, exp } => Expr::Pow {
            base: Box::new(rebuild(base, 0)?),
            exp: *exp,
        },
        Expr::Bin { op, lhs, rhs } => Expr::Bin {
            op: *op,
            lhs: Box::new(rebuild(lhs, 0)?),
            rhs: Box::new(rebuild(rhs, 1)?),
        },
        Expr::Gcd(a, b) => Expr::Gcd(Box::new(rebuild(a, 0)?), Box::new(rebuild(b, 1)?)),
        Expr::Num(_) | Expr::DecLit { .. } => unreachable!("path into literal"),
    })
}

// --- trace builders ---

/// Working tree for stepwise reduction: literals remember which step
/// produced them so `depends_on` carries real provenance.
#[derive(Clone)]
enum WNode {
    Lit(ExactNumber, Option<usize>),
    Op {
        op: BinOp,
        lhs: Box<WNode>,
        rhs: Box<WNode>,
    },
}

impl WNode {
    fn from_expr(e: &Expr) -> Result<WNode, TraceError> {
        if let Some(v) = e.as_literal() {
            return Ok(WNode::Lit(v, None));
        }
        match e {
            Expr::Bin { op, lhs, rhs } => Ok(WNode::Op {
                op: *op,
                lhs: Box::new(WNode::from_expr(lhs)?),
                rhs: Box::new(WNode::from_expr(rhs)?),
            }),
            Expr::Neg(x) => {
                // Fold unary minus into the literal when possible.
                let inner = WNode::from_expr(x)?;
                match inner {
                    WNode::Lit(v, p) => Ok(WNode::Lit(v.neg(), p)),
                    _ => Err(TraceError::Invalid(
                        "bracket expressions use +, -, *, / over literals".into(),
                    )),
                }
            }
            _ => Err(TraceError::Invalid(
                "bracket expressions use +, -, *, / over literals".into(),
            )),
        }
    }
}

/// Step-by-step reduction of a bracket expression, innermost first, one
/// binary operation per step.
pub fn trace_bracket_expr(expr: &Expr) -> Result<CalcTrace, TraceError> {
    let answer_value = expr
        .eval()
        .map_err(|e| match e {
            EvalError::DivisionByZero(at) => TraceError::DivisionByZeroInExpr(at),
            other => TraceError::Invalid(other.to_string()),
        })?;

    let mut root = WNode::from_expr(expr)?;
    let mut steps: Vec<TraceStep> = Vec::new();

    loop {
        if let WNode::Lit(..) = root {
            break;
        }
        // Deepest-leftmost operation with two literal operands, as a path
        // of left/right turns from the root.
        fn find(node: &WNode, path: &mut Vec<bool>) -> bool {
            match node {
                WNode::Lit(..) => false,
                WNode::Op { lhs, rhs, .. } => {
                    if !matches!(**lhs, WNode::Lit(..)) {
                        path.push(false);
                        return find(lhs, path);
                    }
                    if !matches!(**rhs, WNode::Lit(..)) {
                        path.push(true);
                        return find(rhs, path);
                    }
                    true
                }
            }
        }
        let mut path = Vec::new();
        assert!(find(&root, &mut path), "non-literal root has a reducible node");
        let mut target = &mut root;
        for right in path {
            target = match target {
                WNode::Op { lhs, rhs, .. } => {
                    if right {
                        rhs
                    } else {
                        lhs
                    }
                }
                WNode::Lit(..) => unreachable!(),
            };
        }
        let (op, a, pa, b, pb) = match &*target {
            WNode::Op { op, lhs, rhs } => match (&**lhs, &**rhs) {
                (WNode::Lit(a, pa), WNode::Lit(b, pb)) => {
                    (*op, a.clone(), *pa, b.clone(), *pb)
                }
                _ => unreachable!(),
            },
            WNode::Lit(..) => unreachable!(),
        };
        let claim_expr = Expr::bin(op, Expr::lit(a.clone()), Expr::lit(b.clone()));
        let value = claim_expr
            .eval()
            .map_err(|e| TraceError::DivisionByZeroInExpr(e.to_string()))?;
        let index = steps.len();
        let mut deps: Vec<usize> = [pa, pb].iter().flatten().copied().collect();
        deps.sort_unstable();
        deps.dedup();
        steps.push(
            TraceStep::new(StepKind::Rewrite, format!("{claim_expr} = {value}."), deps)
                .with_values(claim_expr.eval().unwrap(), value.clone()),
        );
        *target = WNode::Lit(value, Some(index));
    }

    Ok(CalcTrace {
        task: Family::Bracket,
        inputs: vec![expr.clone()],
        steps,
        answer: Answer::Value(answer_value),
    })
}

fn chain_trace(
    family: Family,
    expr: Expr,
    err_map: fn(EvalError) -> TraceError,
) -> Result<CalcTrace, TraceError> {
    let chain = expansion_chain(&expr).map_err(err_map)?;
    let value = expr.eval().map_err(err_map)?;
    let mut steps = Vec::new();
    for (i, pair) in chain.windows(2).enumerate() {
        let deps = if i == 0 { vec![] } else { vec![i - 1] };
        steps.push(
            TraceStep::new(
                StepKind::Rewrite,
                format!("{} = {}.", pair[0], pair[1]),
                deps,
            )
            .with_values(pair[0].eval().map_err(err_map)?, pair[1].eval().map_err(err_map)?),
        );
    }
    Ok(CalcTrace {
        task: family,
        inputs: vec![expr],
        steps,
        answer: Answer::Value(value),
    })
}

fn binop_err(e: EvalError) -> TraceError {
    match e {
        EvalError::DivisionByZero(_) => TraceError::DivisionByZero,
        other => TraceError::Invalid(other.to_string()),
    }
}

/// Decimal arithmetic trace: scale alignment, then integer arithmetic.
pub fn trace_decimal(a: &ExactNumber, op: BinOp, b: &ExactNumber) -> Result<CalcTrace, TraceError> {
    let expr = Expr::bin(op, Expr::lit(a.clone()), Expr::lit(b.clone()));
    chain_trace(Family::Decimal, expr, binop_err)
}

/// Fraction arithmetic trace: common denominator or cross-multiplication,
/// then reduction.
pub fn trace_fraction(a: &ExactNumber, op: BinOp, b: &ExactNumber) -> Result<CalcTrace, TraceError> {
    let expr = Expr::bin(op, Expr::lit(a.clone()), Expr::lit(b.clone()));
    chain_trace(Family::Fraction, expr, binop_err)
}

/// Reduces `p/q` to lowest terms, showing the gcd computation.
pub fn trace_fraction_reduce(p: &BigInt, q: &BigInt) -> Result<CalcTrace, TraceError> {
    if q.is_zero() {
        return Err(TraceError::DivisionByZero);
    }
    let input = Expr::bin(BinOp::Div, Expr::int(p.clone()), Expr::int(q.clone()));
    let answer = input.eval().expect("nonzero denominator");
    let mut steps = Vec::new();

    let (mut p_work, mut q_work) = (p.clone(), q.clone());
    if q_work.is_negative() || p_work.is_negative() && q_work.is_negative() {
        // Normalize the sign into the numerator.
        let normalized = Expr::bin(
            BinOp::Div,
            Expr::int(-p.clone()),
            Expr::int(-q.clone()),
        );
        steps.push(TraceStep::new(
            StepKind::Rewrite,
            format!("{input} = {normalized}."),
            vec![],
        ));
        p_work = -p_work;
        q_work = -q_work;
    }

    if p_work.is_zero() {
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("0 / {q_work} = 0."),
            vec![],
        ));
        return Ok(CalcTrace {
            task: Family::FractionReduce,
            inputs: vec![input],
            steps,
            answer: Answer::Value(answer),
        });
    }

    // Euclid's algorithm on the magnitudes.
    let (mut a, mut b) = (p_work.abs(), q_work.abs());
    let euclid_start = steps.len();
    while !b.is_zero() {
        let (quot, rem) = a.div_mod_floor(&b);
        let deps = if steps.len() > euclid_start {
            vec![steps.len() - 1]
        } else {
            vec![]
        };
        steps.push(TraceStep::new(
            StepKind::Rewrite,
            format!("{a} / {b} = {quot} ... {rem}."),
            deps,
        ));
        a = std::mem::replace(&mut b, rem);
    }
    let g = a;
    let gcd_dep = steps.len() - 1;
    steps.push(TraceStep::new(
        StepKind::Rewrite,
        format!("So gcd({}, {}) = {g}.", p_work.abs(), q_work.abs()),
        vec![gcd_dep],
    ));

    if g.is_one() {
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("{p_work}/{q_work} is already in lowest terms."),
            vec![steps.len() - 1],
        ));
    } else {
        let rp = &p_work / &g;
        let rq = &q_work / &g;
        steps.push(TraceStep::new(
            StepKind::Rewrite,
            format!("{p_work} / {g} = {rp}, {q_work} / {g} = {rq}."),
            vec![steps.len() - 1],
        ));
        let reduced = frac_expr(&rp, &rq);
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("{p_work}/{q_work} = {reduced}."),
            vec![steps.len() - 1],
        ));
    }

    Ok(CalcTrace {
        task: Family::FractionReduce,
        inputs: vec![input],
        steps,
        answer: Answer::Value(answer),
    })
}

/// Quotient and remainder with the floor-division identity as a
/// verification step.
pub fn trace_remainder(a: &BigInt, b: &BigInt) -> Result<CalcTrace, TraceError> {
    if a.is_negative() {
        return Err(TraceError::Invalid(format!("dividend {a} must be non-negative")));
    }
    let (q, r) = floordiv_mod(a, b).map_err(|_| TraceError::DivisionByZero)?;
    let steps = vec![
        TraceStep::new(StepKind::Rewrite, format!("{a} / {b} = {q} ... {r}."), vec![]),
        TraceStep::new(
            StepKind::Compare,
            format!("Check: {b} * {q} + {r} = {a}."),
            vec![0],
        ),
        TraceStep::new(
            StepKind::Result,
            format!("{a} divided by {b} is {q} with remainder {r}."),
            vec![0, 1],
        ),
    ];
    Ok(CalcTrace {
        task: Family::Remainder,
        inputs: vec![Expr::int(a.clone()), Expr::int(b.clone())],
        steps,
        answer: Answer::QuotRem {
            quotient: q,
            remainder: r,
        },
    })
}

/// Repeated multiplication with digit-decomposed products:
/// `29^3` runs through `29^2 = 29 * 29 = (20 + 9) * 29 = 580 + 261 = 841`
/// and `29^3 = 841 * 29 = (800 + 40 + 1) * 29 = 23200 + 1160 + 29 = 24389`.
pub fn trace_power(base: &BigInt, exp: u32) -> Result<CalcTrace, TraceError> {
    if exp < 1 {
        return Err(TraceError::Invalid("exponent must be at least 1".into()));
    }
    let input = Expr::pow(Expr::int(base.clone()), exp);
    let answer = input.eval().expect("integer power");
    let mut steps = Vec::new();

    if exp == 1 {
        steps.push(TraceStep::new(
            StepKind::Result,
            format!("{input} = {base}."),
            vec![],
        ));
    } else {
        let mut acc = ExactNumber::int(base.clone());
        for e in 2..=exp {
            let product = Expr::bin(
                BinOp::Mul,
                Expr::lit(acc.clone()),
                Expr::int(base.clone()),
            );
            let chain = expansion_chain(&product).map_err(binop_err)?;
            let mut elements = vec![Expr::pow(Expr::int(base.clone()), e).to_string()];
            elements.extend(chain.iter().map(|c| c.to_string()));
            let deps = if steps.is_empty() { vec![] } else { vec![steps.len() - 1] };
            steps.push(TraceStep::new(
                StepKind::Rewrite,
                format!("{}.", elements.join(" = ")),
                deps,
            ));
            acc = product.eval().expect("integer product");
        }
    }

    Ok(CalcTrace {
        task: Family::Power,
        inputs: vec![input],
        steps,
        answer: Answer::Value(answer),
    })
}

/// Horner-scheme evaluation, one multiply-add per step. Coefficients are
/// lowest-degree first.
pub fn trace_polynomial_eval(coeffs: &[BigInt], x: &ExactNumber) -> Result<CalcTrace, TraceError> {
    if coeffs.is_empty() {
        return Err(TraceError::Invalid("empty coefficient list".into()));
    }
    let input = polynomial_expr(coeffs, x);
    let answer = input.eval().expect("polynomial evaluation is total");
    let mut steps = Vec::new();

    if coeffs.len() > 1 {
        let mut acc = ExactNumber::int(coeffs.last().unwrap().clone());
        for c in coeffs.iter().rev().skip(1) {
            let product = Expr::bin(BinOp::Mul, Expr::lit(acc.clone()), Expr::lit(x.clone()));
            let claim = if c.is_negative() {
                Expr::bin(BinOp::Sub, product.clone(), Expr::int(-c))
            } else {
                Expr::bin(BinOp::Add, product.clone(), Expr::int(c.clone()))
            };
            let value = claim.eval().expect("multiply-add is total");
            let deps = if steps.is_empty() { vec![] } else { vec![steps.len() - 1] };
            steps.push(
                TraceStep::new(StepKind::Rewrite, format!("{claim} = {value}."), deps)
                    .with_values(value.clone(), value.clone()),
            );
            acc = value;
        }
    }

    Ok(CalcTrace {
        task: Family::Polynomial,
        inputs: vec![input],
        steps,
        answer: Answer::Value(answer),
    })
}

/// The polynomial written out at `x`, highest degree first.
fn polynomial_expr(coeffs: &[BigInt], x: &ExactNumber) -> Expr {
    let mut terms: Vec<(Expr, bool)> = Vec::new(); // (term, negative)
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() && coeffs.len() > 1 {
            continue;
        }
        let mag = c.abs();
        let base = match k {
            0 => Expr::int(mag.clone()),
            1 if mag.is_one() => Expr::lit(x.clone()),
            1 => Expr::bin(BinOp::Mul, Expr::int(mag.clone()), Expr::lit(x.clone())),
            _ if mag.is_one() => Expr::pow(Expr::lit(x.clone()), k as u32),
            _ => Expr::bin(
                BinOp::Mul,
                Expr::int(mag.clone()),
                Expr::pow(Expr::lit(x.clone()), k as u32),
            ),
        };
        terms.push((base, c.is_negative()));
    }
    if terms.is_empty() {
        return Expr::int(0);
    }
    let mut it = terms.into_iter();
    let (first, neg) = it.next().unwrap();
    let mut acc = if neg { Expr::Neg(Box::new(first)) } else { first };
    for (term, neg) in it {
        acc = Expr::bin(if neg { BinOp::Sub } else { BinOp::Add }, acc, term);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::trace::verify_trace;

    #[test]
    fn bracket_three_step_example() {
        let expr = parse_expr("(2 + 3) * (4 - 1)").unwrap();
        let trace = trace_bracket_expr(&expr).unwrap();
        let texts = trace.step_texts();
        assert_eq!(texts, vec!["2 + 3 = 5.", "4 - 1 = 3.", "5 * 3 = 15."]);
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(15)));
        assert_eq!(trace.steps[2].depends_on, vec![0, 1]);
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn bracket_single_leaf() {
        let trace = trace_bracket_expr(&Expr::int(7)).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(7)));
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn bracket_division_by_zero_reports_subexpression() {
        let expr = parse_expr("1 + 2 / (3 - 3)").unwrap();
        match trace_bracket_expr(&expr) {
            Err(TraceError::DivisionByZeroInExpr(at)) => assert!(at.contains("2 / (3 - 3)")),
            other => panic!("expected division-by-zero error, got {other:?}"),
        }
    }

    #[test]
    fn power_paper_chain() {
        let trace = trace_power(&BigInt::from(29), 3).unwrap();
        let texts = trace.step_texts();
        assert_eq!(
            texts,
            vec![
                "29^2 = 29 * 29 = (20 + 9) * 29 = 580 + 261 = 841.",
                "29^3 = 841 * 29 = (800 + 40 + 1) * 29 = 23200 + 1160 + 29 = 24389.",
            ]
        );
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(24389)));
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn power_exponent_one() {
        let trace = trace_power(&BigInt::from(6), 1).unwrap();
        assert_eq!(trace.step_texts(), vec!["6^1 = 6."]);
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn power_12_to_4() {
        let trace = trace_power(&BigInt::from(12), 4).unwrap();
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(20736)));
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn fraction_common_denominator() {
        let a = ExactNumber::rational(1, 2).unwrap();
        let b = ExactNumber::rational(1, 3).unwrap();
        let trace = trace_fraction(&a, BinOp::Add, &b).unwrap();
        let joined = trace.step_texts().join(" ");
        assert!(joined.contains("3/6 + 2/6"), "steps: {joined}");
        assert_eq!(trace.answer, Answer::Value(ExactNumber::rational(5, 6).unwrap()));
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn fraction_times_one_single_step() {
        let a = ExactNumber::rational(3, 7).unwrap();
        let trace = trace_fraction(&a, BinOp::Mul, &ExactNumber::one()).unwrap();
        assert!(verify_trace(&trace).pass());
        assert_eq!(trace.answer, Answer::Value(a));
    }

    #[test]
    fn decimal_scale_alignment() {
        let a = ExactNumber::decimal(25, 2);
        let b = ExactNumber::decimal(5, 1);
        let trace = trace_decimal(&a, BinOp::Add, &b).unwrap();
        let joined = trace.step_texts().join(" ");
        assert!(joined.contains("0.25 + 0.50"), "steps: {joined}");
        assert!(joined.contains("(25 + 50) / 100"), "steps: {joined}");
        assert_eq!(trace.answer, Answer::Value(ExactNumber::decimal(75, 2)));
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn fraction_reduce_gcd_steps() {
        let trace = trace_fraction_reduce(&BigInt::from(12), &BigInt::from(8)).unwrap();
        let joined = trace.step_texts().join(" ");
        assert!(joined.contains("gcd(12, 8) = 4"), "steps: {joined}");
        assert!(joined.contains("12/8 = 3/2"), "steps: {joined}");
        assert_eq!(trace.answer, Answer::Value(ExactNumber::rational(3, 2).unwrap()));
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn fraction_reduce_already_lowest() {
        let trace = trace_fraction_reduce(&BigInt::from(8), &BigInt::from(1)).unwrap();
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(8)));
        assert!(verify_trace(&trace).pass());
        assert!(trace_fraction_reduce(&BigInt::from(1), &BigInt::from(0)).is_err());
    }

    #[test]
    fn remainder_paper_values() {
        let trace = trace_remainder(&BigInt::from(5287), &BigInt::from(17)).unwrap();
        assert_eq!(
            trace.answer,
            Answer::QuotRem {
                quotient: BigInt::from(311),
                remainder: BigInt::from(0)
            }
        );
        assert!(verify_trace(&trace).pass());

        let trace = trace_remainder(&BigInt::from(5287), &BigInt::from(11)).unwrap();
        assert_eq!(
            trace.answer,
            Answer::QuotRem {
                quotient: BigInt::from(480),
                remainder: BigInt::from(7)
            }
        );
        assert!(verify_trace(&trace).pass());

        let trace = trace_remainder(&BigInt::from(42), &BigInt::from(1)).unwrap();
        assert_eq!(
            trace.answer,
            Answer::QuotRem {
                quotient: BigInt::from(42),
                remainder: BigInt::from(0)
            }
        );
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn polynomial_horner() {
        // x^2 + 2x + 1 at 3.
        let coeffs = [BigInt::from(1), BigInt::from(2), BigInt::from(1)];
        let trace = trace_polynomial_eval(&coeffs, &ExactNumber::int(3)).unwrap();
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(16)));
        assert_eq!(trace.step_texts(), vec!["1 * 3 + 2 = 5.", "5 * 3 + 1 = 16."]);
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn polynomial_constant_and_zero_x() {
        let trace = trace_polynomial_eval(&[BigInt::from(9)], &ExactNumber::int(5)).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(9)));

        let coeffs = [BigInt::from(4), BigInt::from(-7), BigInt::from(2)];
        let trace = trace_polynomial_eval(&coeffs, &ExactNumber::zero()).unwrap();
        assert_eq!(trace.answer, Answer::Value(ExactNumber::int(4)));
        assert!(verify_trace(&trace).pass());
    }

    #[test]
    fn expansion_chain_matches_paper() {
        let expr = parse_expr("(12+17)^3").unwrap();
        let chain = expansion_chain(&expr).unwrap();
        let rendered: Vec<String> = chain.iter().map(|e| e.to_string()).collect();
        assert_eq!(
            rendered,
            vec![
                "(12 + 17)^3",
                "29^3",
                "841 * 29",
                "(800 + 40 + 1) * 29",
                "23200 + 1160 + 29",
                "24389",
            ]
        );
    }
}
