//! Game-of-k search traces.
//!
//! Combine the given cards with +, -, *, / (exact rationals allowed as
//! intermediates) to reach the target. The emitted trace records tried
//! combinations, including top-level dead ends, and either the final
//! expression over the original cards or an unsolvable verdict after
//! exhaustion.

use num_bigint::BigInt;
use num_traits::Signed;

use crate::exact::ExactNumber;
use crate::expr::{BinOp, Expr};

use super::{Answer, CalcTrace, Family, StepKind, TraceError, TraceStep, Verdict};

/// Search-trace verbosity knobs.
#[derive(Debug, Clone, Copy)]
pub struct GameConfig {
    /// Dead-end steps recorded before the remainder is summarized in one
    /// line. Bounds response length without hiding that search happened.
    pub max_dead_ends: usize,
}

impl Default for GameConfig {
    fn default() -> Self {
        GameConfig { max_dead_ends: 12 }
    }
}

#[derive(Clone)]
struct Item {
    value: ExactNumber,
    expr: Expr,
}

const OP_ORDER: [(BinOp, bool); 6] = [
    (BinOp::Add, false),
    (BinOp::Sub, false),
    (BinOp::Sub, true),
    (BinOp::Mul, false),
    (BinOp::Div, false),
    (BinOp::Div, true),
];

fn combine(a: &Item, b: &Item, op: BinOp, swap: bool) -> Option<Item> {
    let (x, y) = if swap { (b, a) } else { (a, b) };
    let value = match op {
        BinOp::Add => x.value.add(&y.value),
        BinOp::Sub => x.value.sub(&y.value),
        BinOp::Mul => x.value.mul(&y.value),
        BinOp::Div => x.value.div(&y.value).ok()?,
    };
    Some(Item {
        value,
        expr: Expr::bin(op, x.expr.clone(), y.expr.clone()),
    })
}

/// Exhaustive enumeration: can the cards reach the target at all?
pub fn enumerate_reachable(cards: &[BigInt], target: &BigInt) -> bool {
    fn recurse(values: &[ExactNumber], target: &ExactNumber) -> bool {
        if values.len() == 1 {
            return &values[0] == target;
        }
        for i in 0..values.len() {
            for j in (i + 1)..values.len() {
                let mut rest: Vec<ExactNumber> = values
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, v)| v.clone())
                    .collect();
                for (op, swap) in OP_ORDER {
                    let (x, y) = if swap {
                        (&values[j], &values[i])
                    } else {
                        (&values[i], &values[j])
                    };
                    let combined = match op {
                        BinOp::Add => x.add(y),
                        BinOp::Sub => x.sub(y),
                        BinOp::Mul => x.mul(y),
                        BinOp::Div => match x.div(y) {
                            Ok(v) => v,
                            Err(_) => continue,
                        },
                    };
                    rest.push(combined);
                    if recurse(&rest, target) {
                        return true;
                    }
                    rest.pop();
                }
            }
        }
        false
    }
    let values: Vec<ExactNumber> = cards.iter().map(|c| ExactNumber::int(c.clone())).collect();
    recurse(&values, &ExactNumber::int(target.clone()))
}

/// Depth-first search over unordered pairs and the four operations,
/// recording the trace along the way.
pub fn solve_game_of_k(
    cards: &[BigInt],
    target: &BigInt,
    config: GameConfig,
) -> Result<CalcTrace, TraceError> {
    if cards.len() < 2 || cards.len() > 6 {
        return Err(TraceError::Invalid(format!(
            "need 2 to 6 cards, got {}",
            cards.len()
        )));
    }
    if cards.iter().any(|c| !c.is_positive()) {
        return Err(TraceError::Invalid("cards must be positive".into()));
    }

    let mut inputs: Vec<Expr> = cards.iter().map(|c| Expr::int(c.clone())).collect();
    inputs.push(Expr::int(target.clone()));
    let target_value = ExactNumber::int(target.clone());

    let items: Vec<Item> = cards
        .iter()
        .map(|c| Item {
            value: ExactNumber::int(c.clone()),
            expr: Expr::int(c.clone()),
        })
        .collect();

    // Each search node tries pairs in index order and operations in the
    // fixed order above. The successful path is reported step by step; a
    // failed top-level choice becomes a single dead-end line.
    fn dfs(items: &[Item], target: &ExactNumber, path: &mut Vec<(Item, Item, Item)>) -> bool {
        if items.len() == 1 {
            return &items[0].value == target;
        }
        for i in 0..items.len() {
            for j in (i + 1)..items.len() {
                for (op, swap) in OP_ORDER {
                    let Some(combined) = combine(&items[i], &items[j], op, swap) else {
                        continue;
                    };
                    let mut rest: Vec<Item> = items
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != i && k != j)
                        .map(|(_, it)| it.clone())
                        .collect();
                    let (a, b) = if swap {
                        (items[j].clone(), items[i].clone())
                    } else {
                        (items[i].clone(), items[j].clone())
                    };
                    rest.push(combined.clone());
                    path.push((a, b, combined));
                    if dfs(&rest, target, path) {
                        return true;
                    }
                    path.pop();
                }
            }
        }
        false
    }

    let mut steps: Vec<TraceStep> = Vec::new();
    let mut dead_ends_recorded = 0usize;
    let mut dead_ends_omitted = 0usize;
    let mut solution: Option<Vec<(Item, Item, Item)>> = None;

    'outer: for i in 0..items.len() {
        for j in (i + 1)..items.len() {
            for (op, swap) in OP_ORDER {
                let Some(combined) = combine(&items[i], &items[j], op, swap) else {
                    continue;
                };
                let mut rest: Vec<Item> = items
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != i && k != j)
                    .map(|(_, it)| it.clone())
                    .collect();
                let (a, b) = if swap {
                    (items[j].clone(), items[i].clone())
                } else {
                    (items[i].clone(), items[j].clone())
                };
                rest.push(combined.clone());
                let mut path = vec![(a, b, combined)];
                if dfs(&rest, &target_value, &mut path) {
                    solution = Some(path);
                    break 'outer;
                }
                // Top-level dead end.
                let (a, b, combined) = (&path[0].0, &path[0].1, &path[0].2);
                if dead_ends_recorded < config.max_dead_ends {
                    let remaining: Vec<String> = rest.iter().map(|it| it.value.to_string()).collect();
                    steps.push(TraceStep::new(
                        StepKind::Search,
                        format!(
                            "Try {} {} {} = {}: cannot reach {target} with [{}].",
                            a.value,
                            op.symbol(),
                            b.value,
                            combined.value,
                            remaining.join(", ")
                        ),
                        vec![],
                    ));
                    dead_ends_recorded += 1;
                } else {
                    dead_ends_omitted += 1;
                }
            }
        }
    }

    if dead_ends_omitted > 0 {
        steps.push(TraceStep::new(
            StepKind::Search,
            format!("Tried {dead_ends_omitted} more combinations without success."),
            vec![],
        ));
    }

    let answer = match solution {
        Some(path) => {
            let final_expr = path.last().unwrap().2.expr.clone();
            for (a, b, combined) in &path {
                let claim = Expr::bin(
                    binop_of(&combined.expr),
                    Expr::lit(a.value.clone()),
                    Expr::lit(b.value.clone()),
                );
                let deps = if steps.is_empty() { vec![] } else { vec![steps.len() - 1] };
                steps.push(TraceStep::new(
                    StepKind::Search,
                    format!("Try {claim} = {}.", combined.value),
                    deps,
                ));
            }
            let expression = final_expr.to_string();
            steps.push(TraceStep::new(
                StepKind::Result,
                format!("So {expression} = {target}."),
                vec![steps.len() - 1],
            ));
            Answer::Verdict(Verdict::Solvable { expression })
        }
        None => {
            steps.push(TraceStep::new(
                StepKind::Result,
                format!("No combination of the cards reaches {target}. It is unsolvable."),
                vec![],
            ));
            Answer::Verdict(Verdict::Unsolvable)
        }
    };

    Ok(CalcTrace {
        task: Family::GameOfK,
        inputs,
        steps,
        answer,
    })
}

fn binop_of(expr: &Expr) -> BinOp {
    match expr {
        Expr::Bin { op, .. } => *op,
        _ => unreachable!("combined expressions are binary"),
    }
}

/// Integer literals appearing in an expression, in in-order traversal.
pub(super) fn literal_cards(expr: &Expr) -> Vec<BigInt> {
    fn walk(e: &Expr, out: &mut Vec<BigInt>) {
        match e {
            Expr::Num(n) => {
                if let Some(i) = n.as_integer() {
                    out.push(i.clone());
                }
            }
            Expr::DecLit { .. } => {}
            Expr::Neg(x) | Expr::Isqrt(x) => walk(x, out),
            Expr::Pow { base, .. } => walk(base, out),
            Expr::Bin { lhs, rhs, .. } => {
                walk(lhs, out);
                walk(rhs, out);
            }
            Expr::Gcd(a, b) => {
                walk(a, out);
                walk(b, out);
            }
        }
    }
    let mut out = Vec::new();
    walk(expr, &mut out);
    out
}
