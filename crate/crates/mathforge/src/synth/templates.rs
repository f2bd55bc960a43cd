//! Template packs: diversified natural-language query patterns per task
//! family, shipped as data with a content hash for reproducibility.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::exact::NumberStyle;
use crate::expr::Expr;
use crate::trace::{Answer, CalcTrace, Family};

/// One query template. `{placeholder}`s are bound from trace inputs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Template {
    pub id: String,
    pub task: Family,
    #[serde(default = "default_locale")]
    pub locale: String,
    pub query: String,
    /// Number style for query substitution; responses always use the plain
    /// trace grammar.
    #[serde(default)]
    pub style: QueryStyle,
    /// Optional line prepended to the response.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preamble: Option<String>,
}

fn default_locale() -> String {
    "en".to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum QueryStyle {
    #[default]
    Plain,
    Latex,
}

impl QueryStyle {
    fn number_style(&self) -> NumberStyle {
        match self {
            QueryStyle::Plain => NumberStyle::Plain,
            QueryStyle::Latex => NumberStyle::Latex,
        }
    }
}

/// A versioned set of templates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TemplatePack {
    pub version: u32,
    pub templates: Vec<Template>,
}

/// Pack and template errors.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("invalid template pack: {0}")]
    BadPack(String),
    #[error("template `{template}` uses placeholder `{placeholder}` not bound by family `{family}`")]
    UnboundPlaceholder {
        template: String,
        placeholder: String,
        family: Family,
    },
    #[error("template `{0}` not found")]
    UnknownTemplate(String),
    #[error("template `{template}` is for family `{expected}`, trace is `{actual}`")]
    PlaceholderMismatch {
        template: String,
        expected: Family,
        actual: Family,
    },
    #[error("family `{0}` has fewer than {1} templates")]
    TooFewTemplates(Family, usize),
    #[error("query does not match template `{0}`")]
    QueryMismatch(String),
    #[error("cannot reconstruct inputs: {0}")]
    BadInputs(String),
}

/// Placeholders each family binds.
fn family_placeholders(family: Family) -> &'static [&'static str] {
    match family {
        Family::Bracket
        | Family::Decimal
        | Family::Fraction
        | Family::Power
        | Family::Polynomial => &["expr"],
        Family::FractionReduce => &["p", "q"],
        Family::Remainder => &["a", "b"],
        Family::Prime | Family::Factorize => &["n"],
        Family::Triangle => &["a", "b", "c"],
        Family::GameOfK => &["cards", "target"],
    }
}

fn placeholders_in(pattern: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut rest = pattern;
    while let Some(open) = rest.find('{') {
        let Some(close) = rest[open..].find('}') else { break };
        out.push(rest[open + 1..open + close].to_string());
        rest = &rest[open + close + 1..];
    }
    out
}

impl TemplatePack {
    /// Parses, validates, and hashes a pack from its JSON text.
    pub fn from_json(json: &str) -> Result<(TemplatePack, String), TemplateError> {
        let pack: TemplatePack =
            serde_json::from_str(json).map_err(|e| TemplateError::BadPack(e.to_string()))?;
        pack.validate()?;
        let hash = hex_digest(json.as_bytes());
        Ok((pack, hash))
    }

    /// The pack shipped with the crate.
    pub fn builtin() -> (TemplatePack, String) {
        TemplatePack::from_json(include_str!("templates.json"))
            .expect("builtin template pack is valid")
    }

    pub fn validate(&self) -> Result<(), TemplateError> {
        let mut per_family: HashMap<Family, usize> = HashMap::new();
        let mut ids: HashMap<&str, ()> = HashMap::new();
        for t in &self.templates {
            if ids.insert(t.id.as_str(), ()).is_some() {
                return Err(TemplateError::BadPack(format!("duplicate template id `{}`", t.id)));
            }
            let allowed = family_placeholders(t.task);
            for p in placeholders_in(&t.query) {
                if !allowed.contains(&p.as_str()) {
                    return Err(TemplateError::UnboundPlaceholder {
                        template: t.id.clone(),
                        placeholder: p,
                        family: t.task,
                    });
                }
            }
            *per_family.entry(t.task).or_default() += 1;
        }
        // Diversely constructed: at least 5 per shipped family.
        for family in Family::ALL {
            let count = per_family.get(&family).copied().unwrap_or(0);
            if count < 5 {
                return Err(TemplateError::TooFewTemplates(family, 5));
            }
        }
        Ok(())
    }

    pub fn for_family(&self, family: Family) -> Vec<&Template> {
        self.templates.iter().filter(|t| t.task == family).collect()
    }

    pub fn by_id(&self, id: &str) -> Result<&Template, TemplateError> {
        self.templates
            .iter()
            .find(|t| t.id == id)
            .ok_or_else(|| TemplateError::UnknownTemplate(id.to_string()))
    }
}

fn hex_digest(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    let digest = hasher.finalize();
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

/// Binds a trace's inputs to the placeholder names of its family.
pub fn placeholder_values(trace: &CalcTrace, style: QueryStyle) -> Result<HashMap<&'static str, String>, TemplateError> {
    let ns = style.number_style();
    let mut map = HashMap::new();
    let input = |i: usize| -> Result<&Expr, TemplateError> {
        trace
            .inputs
            .get(i)
            .ok_or_else(|| TemplateError::BadInputs(format!("missing input {i}")))
    };
    match trace.task {
        Family::Bracket
        | Family::Decimal
        | Family::Fraction
        | Family::Power
        | Family::Polynomial => {
            map.insert("expr", input(0)?.render(ns));
        }
        Family::FractionReduce => {
            let Expr::Bin { lhs, rhs, .. } = input(0)? else {
                return Err(TemplateError::BadInputs("expected p/q input".into()));
            };
            map.insert("p", lhs.render(ns));
            map.insert("q", rhs.render(ns));
        }
        Family::Remainder => {
            map.insert("a", input(0)?.render(ns));
            map.insert("b", input(1)?.render(ns));
        }
        Family::Prime | Family::Factorize => {
            map.insert("n", input(0)?.render(ns));
        }
        Family::Triangle => {
            map.insert("a", input(0)?.render(ns));
            map.insert("b", input(1)?.render(ns));
            map.insert("c", input(2)?.render(ns));
        }
        Family::GameOfK => {
            let (cards, target) = trace
                .inputs
                .split_last()
                .map(|(t, cs)| (cs, t))
                .ok_or_else(|| TemplateError::BadInputs("no inputs".into()))?;
            let list = cards
                .iter()
                .map(|c| c.render(ns))
                .collect::<Vec<_>>()
                .join(", ");
            map.insert("cards", list);
            map.insert("target", target.render(ns));
        }
    }
    Ok(map)
}

/// Substitutes the trace's inputs into the template's query pattern.
pub fn render_query(template: &Template, trace: &CalcTrace) -> Result<String, TemplateError> {
    if template.task != trace.task {
        return Err(TemplateError::PlaceholderMismatch {
            template: template.id.clone(),
            expected: template.task,
            actual: trace.task,
        });
    }
    let values = placeholder_values(trace, template.style)?;
    let mut query = template.query.clone();
    for (name, value) in &values {
        query = query.replace(&format!("{{{name}}}"), value);
    }
    Ok(query)
}

/// Renders the response: optional preamble, the step texts in order, then
/// a final answer sentence.
pub fn render_response(template: &Template, trace: &CalcTrace) -> String {
    let mut lines: Vec<String> = Vec::new();
    if let Some(p) = &template.preamble {
        lines.push(p.clone());
    }
    for step in &trace.steps {
        lines.push(step.text.clone());
    }
    lines.push(format!("The answer is: {}.", trace.answer.display_text()));
    lines.join("\n")
}

/// Recovers the placeholder captures of a query rendered from `template`.
pub fn invert_query(template: &Template, query: &str) -> Result<HashMap<String, String>, TemplateError> {
    // Build a regex from the pattern: literals escaped, placeholders lazy.
    let mut pattern = String::from("^");
    let mut names = Vec::new();
    let mut rest = template.query.as_str();
    while let Some(open) = rest.find('{') {
        let close = rest[open..]
            .find('}')
            .ok_or_else(|| TemplateError::BadPack("unbalanced placeholder".into()))?;
        pattern.push_str(&regex::escape(&rest[..open]));
        let name = &rest[open + 1..open + close];
        names.push(name.to_string());
        pattern.push_str("(.+?)");
        rest = &rest[open + close + 1..];
    }
    pattern.push_str(&regex::escape(rest));
    pattern.push('$');
    let re = regex::Regex::new(&pattern).map_err(|e| TemplateError::BadPack(e.to_string()))?;
    let caps = re
        .captures(query)
        .ok_or_else(|| TemplateError::QueryMismatch(template.id.clone()))?;
    Ok(names
        .into_iter()
        .enumerate()
        .map(|(i, name)| (name, caps[i + 1].to_string()))
        .collect())
}

/// Rebuilds trace inputs from inverted query captures.
pub fn inputs_from_captures(
    family: Family,
    captures: &HashMap<String, String>,
) -> Result<Vec<Expr>, TemplateError> {
    let get = |name: &str| -> Result<&String, TemplateError> {
        captures
            .get(name)
            .ok_or_else(|| TemplateError::BadInputs(format!("missing capture `{name}`")))
    };
    let parse = |s: &str| -> Result<Expr, TemplateError> {
        crate::expr::parse_expr(s.trim())
            .map_err(|e| TemplateError::BadInputs(format!("`{s}`: {e}")))
    };
    Ok(match family {
        Family::Bracket
        | Family::Decimal
        | Family::Fraction
        | Family::Power
        | Family::Polynomial => vec![parse(get("expr")?)?],
        Family::FractionReduce => {
            let p = parse(get("p")?)?;
            let q = parse(get("q")?)?;
            vec![Expr::bin(crate::expr::BinOp::Div, p, q)]
        }
        Family::Remainder => vec![parse(get("a")?)?, parse(get("b")?)?],
        Family::Prime | Family::Factorize => vec![parse(get("n")?)?],
        Family::Triangle => vec![parse(get("a")?)?, parse(get("b")?)?, parse(get("c")?)?],
        Family::GameOfK => {
            let mut inputs: Vec<Expr> = get("cards")?
                .split(',')
                .map(|c| parse(c))
                .collect::<Result<_, _>>()?;
            inputs.push(parse(get("target")?)?);
            inputs
        }
    })
}

/// Parses the family-specific answer out of a rendered response.
pub fn answer_from_response(family: Family, response: &str) -> Result<Answer, TemplateError> {
    use crate::trace::Verdict;
    let tail = crate::rerank::extract_answer(response)
        .ok_or_else(|| TemplateError::BadInputs("no answer sentence".into()))?;
    let bad = |msg: String| TemplateError::BadInputs(msg);
    match family {
        Family::Bracket
        | Family::Decimal
        | Family::Fraction
        | Family::FractionReduce
        | Family::Power
        | Family::Polynomial
        | Family::Triangle => {
            if family == Family::Triangle && tail == "invalid triangle" {
                return Ok(Answer::Verdict(Verdict::InvalidTriangle));
            }
            let value = crate::exact::parse_number(&tail)
                .map_err(|e| bad(format!("`{tail}`: {e}")))?;
            Ok(Answer::Value(value))
        }
        Family::Remainder => {
            let (q, r) = tail
                .split_once(" remainder ")
                .ok_or_else(|| bad(format!("`{tail}` is not a quotient/remainder")))?;
            Ok(Answer::QuotRem {
                quotient: q.trim().parse().map_err(|_| bad(format!("bad quotient `{q}`")))?,
                remainder: r.trim().parse().map_err(|_| bad(format!("bad remainder `{r}`")))?,
            })
        }
        Family::Prime => match tail.as_str() {
            "prime" => Ok(Answer::Verdict(Verdict::Prime)),
            "composite" => {
                // Witness sits in the body: "... can be divided by W." or
                // "... is divisible by W."
                let witness = ["can be divided by ", "is divisible by "]
                    .iter()
                    .find_map(|marker| {
                        response.rfind(marker).map(|pos| {
                            response[pos + marker.len()..]
                                .chars()
                                .take_while(|c| c.is_ascii_digit())
                                .collect::<String>()
                        })
                    })
                    .filter(|w| !w.is_empty())
                    .ok_or_else(|| bad("composite verdict without witness".into()))?;
                Ok(Answer::Verdict(Verdict::Composite {
                    witness: witness.parse().expect("digits"),
                }))
            }
            other => Err(bad(format!("`{other}` is not a primality verdict"))),
        },
        Family::Factorize => {
            let factors = tail
                .split('*')
                .map(|f| f.trim().parse())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| bad(format!("bad factor list `{tail}`")))?;
            Ok(Answer::Factors(factors))
        }
        Family::GameOfK => {
            if tail == "unsolvable" {
                return Ok(Answer::Verdict(Verdict::Unsolvable));
            }
            crate::expr::parse_expr(&tail).map_err(|e| bad(format!("`{tail}`: {e}")))?;
            Ok(Answer::Verdict(Verdict::Solvable { expression: tail }))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn builtin_pack_validates_with_hash() {
        let (pack, hash) = TemplatePack::builtin();
        assert!(pack.templates.len() >= 55);
        assert_eq!(hash.len(), 64);
        for family in Family::ALL {
            assert!(pack.for_family(family).len() >= 5, "{family}");
        }
    }

    #[test]
    fn render_and_invert_round_trip() {
        let (pack, _) = TemplatePack::builtin();
        let trace = crate::trace::trace_prime_check(&BigInt::from(5287)).unwrap();
        for template in pack.for_family(Family::Prime) {
            let query = render_query(template, &trace).unwrap();
            assert!(query.contains("5287"), "{query}");
            let captures = invert_query(template, &query).unwrap();
            assert_eq!(captures["n"], "5287");
        }
    }

    #[test]
    fn mismatched_family_rejected() {
        let (pack, _) = TemplatePack::builtin();
        let trace = crate::trace::trace_prime_check(&BigInt::from(7)).unwrap();
        let wrong = pack.for_family(Family::Triangle)[0];
        assert!(matches!(
            render_query(wrong, &trace),
            Err(TemplateError::PlaceholderMismatch { .. })
        ));
    }

    #[test]
    fn pack_rejects_unbound_placeholder() {
        let json = r#"{"version":1,"templates":[
            {"id":"x","task":"prime","query":"Check {m}."}
        ]}"#;
        assert!(matches!(
            TemplatePack::from_json(json),
            Err(TemplateError::UnboundPlaceholder { .. })
        ));
    }

    #[test]
    fn answer_parsing_by_family() {
        let a = answer_from_response(Family::Power, "steps\nThe answer is: 24389.").unwrap();
        assert_eq!(a, Answer::Value(crate::exact::ExactNumber::int(24389)));

        let a = answer_from_response(
            Family::Remainder,
            "x\nThe answer is: 311 remainder 0.",
        )
        .unwrap();
        assert!(matches!(a, Answer::QuotRem { .. }));

        let a = answer_from_response(
            Family::Prime,
            "5287 can be divided by 17.\nThe answer is: composite.",
        )
        .unwrap();
        assert_eq!(
            a,
            Answer::Verdict(crate::trace::Verdict::Composite {
                witness: BigInt::from(17)
            })
        );

        let a = answer_from_response(Family::Factorize, "The answer is: 2 * 2 * 3.").unwrap();
        assert_eq!(
            a,
            Answer::Factors(vec![BigInt::from(2), BigInt::from(2), BigInt::from(3)])
        );

        let a = answer_from_response(Family::GameOfK, "The answer is: unsolvable.").unwrap();
        assert_eq!(a, Answer::Verdict(crate::trace::Verdict::Unsolvable));

        let a = answer_from_response(Family::Triangle, "The answer is: invalid triangle.").unwrap();
        assert_eq!(a, Answer::Verdict(crate::trace::Verdict::InvalidTriangle));
    }
}
