use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Formula, Io};
use super::dnf::{dnf_to_formula, pad_clause, to_dnf, DnfClause};
use super::FormulaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum PatternId {
    P1,
    P2,
    P3,
    P4,
    P5,
    P6,
}

impl PatternId {
    /// Patterns that write an output through a resolution actor.
    pub fn writes_output(self) -> bool {
        matches!(
            self,
            PatternId::P1 | PatternId::P2 | PatternId::P3 | PatternId::P4
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            PatternId::P1 => "Initial-Until",
            PatternId::P2 => "Trigger-Until",
            PatternId::P3 => "If-Then",
            PatternId::P4 => "Iff",
            PatternId::P5 => "Invariance",
            PatternId::P6 => "Assumption",
        }
    }
}

impl fmt::Display for PatternId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// `v` or `!v` for an output variable `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct OutLit {
    pub var: String,
    pub positive: bool,
}

impl OutLit {
    pub fn to_formula(&self) -> Formula {
        let v = Formula::output(&self.var);
        if self.positive {
            v
        } else {
            Formula::not(v)
        }
    }
}

impl fmt::Display for OutLit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "{}", self.var)
        } else {
            write!(f, "!{}", self.var)
        }
    }
}

/// The sub-formulas bound to the placeholders of a pattern.
///
/// * P1 `out W trigger`: `trigger` is the releasing event, clauses unpadded.
/// * P2 `G(trigger -> X^depth(out W (release_in | release_out)))`.
/// * P3 `G(trigger -> X^depth out)`, P4 `G(trigger <-> X^depth out)`.
/// * P5/P6 `G(body)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternParts {
    pub pattern: PatternId,
    pub depth: u32,
    pub trigger: Vec<DnfClause>,
    pub out: Option<OutLit>,
    pub release_in: Vec<DnfClause>,
    pub release_out: Vec<DnfClause>,
    #[serde(skip)]
    pub body: Option<Formula>,
}

impl PatternParts {
    pub fn out(&self) -> &OutLit {
        self.out.as_ref().expect("pattern without output literal")
    }

    /// Release clauses in the order they meet the release OR: inputs first.
    pub fn release(&self) -> impl Iterator<Item = &DnfClause> {
        self.release_in.iter().chain(self.release_out.iter())
    }
}

fn no_match(f: &Formula, reason: impl Into<String>) -> FormulaError {
    FormulaError::NoMatch {
        formula: f.to_string(),
        reason: reason.into(),
    }
}

/// Peels `X` and `!` around a single output variable: `(x_count, positive, var)`.
fn output_literal(f: &Formula) -> Option<(u32, OutLit)> {
    let mut xs = 0;
    let mut positive = true;
    let mut cur = f;
    loop {
        match cur {
            Formula::X(a) => {
                xs += 1;
                cur = a;
            }
            Formula::Not(a) => {
                positive = !positive;
                cur = a;
            }
            Formula::Var {
                name,
                io: Io::Output,
            } => {
                return Some((
                    xs,
                    OutLit {
                        var: name.clone(),
                        positive,
                    },
                ))
            }
            _ => return None,
        }
    }
}

fn peel_x(f: &Formula) -> (u32, &Formula) {
    let mut n = 0;
    let mut cur = f;
    while let Formula::X(a) = cur {
        n += 1;
        cur = a;
    }
    (n, cur)
}

fn input_prop(f: &Formula) -> bool {
    f.is_propositional() && !f.mentions(Io::Output)
}

enum Shape<'a> {
    P1 {
        out: OutLit,
        event: &'a Formula,
    },
    P2 {
        trigger: &'a Formula,
        depth: u32,
        out: OutLit,
        release: &'a Formula,
    },
    P3 {
        trigger: &'a Formula,
        depth: u32,
        out: OutLit,
    },
    P4 {
        trigger: &'a Formula,
        depth: u32,
        out: OutLit,
    },
    P5(&'a Formula),
    P6(&'a Formula),
}

fn shape(f: &Formula) -> Result<Shape<'_>, FormulaError> {
    match f {
        Formula::G(body) => {
            if body.is_propositional() {
                if !body.mentions(Io::Output) {
                    if body.depth() > 0 {
                        return Err(no_match(
                            f,
                            "assumptions are restricted to depth 0 (no X inside G over inputs)",
                        ));
                    }
                    return Ok(Shape::P6(body));
                }
                if !body.mentions(Io::Input) {
                    if body.depth() > 0 {
                        return Err(no_match(f, "invariants over outputs must not use X"));
                    }
                    return Ok(Shape::P5(body));
                }
            }
            match body.as_ref() {
                Formula::Iff(a, b) => {
                    let (trigger, lit) = if let Some(l) = output_literal(b) {
                        (a.as_ref(), l)
                    } else if let Some(l) = output_literal(a) {
                        (b.as_ref(), l)
                    } else {
                        return Err(no_match(f, "<-> needs a single output literal on one side"));
                    };
                    if !input_prop(trigger) {
                        return Err(no_match(f, "the input side of <-> must be propositional over inputs"));
                    }
                    let (depth, out) = lit;
                    Ok(Shape::P4 {
                        trigger,
                        depth,
                        out,
                    })
                }
                Formula::Implies(a, b) => {
                    if !input_prop(a) {
                        return Err(no_match(
                            f,
                            "the trigger must be propositional over input variables",
                        ));
                    }
                    let (depth, inner) = peel_x(b);
                    if let Formula::W(l, r) = inner {
                        let Some((0, out)) = output_literal(l) else {
                            return Err(no_match(f, "left of W must be a single output literal"));
                        };
                        if !r.is_propositional() {
                            return Err(no_match(f, "release must be propositional"));
                        }
                        return Ok(Shape::P2 {
                            trigger: a,
                            depth,
                            out,
                            release: r,
                        });
                    }
                    match output_literal(b) {
                        Some((depth, out)) => Ok(Shape::P3 {
                            trigger: a,
                            depth,
                            out,
                        }),
                        None => Err(no_match(
                            f,
                            "consequent must be X^i of an output literal or of an output W release",
                        )),
                    }
                }
                _ => Err(no_match(f, "G body is not an implication, equivalence or invariant")),
            }
        }
        Formula::W(l, r) => {
            let Some((0, out)) = output_literal(l) else {
                return Err(no_match(f, "left of W must be a single output literal"));
            };
            if !input_prop(r) {
                return Err(no_match(f, "the releasing event must be propositional over inputs"));
            }
            Ok(Shape::P1 { out, event: r })
        }
        _ => Err(no_match(f, "top level is neither G nor W")),
    }
}

/// Classifies one top-level conjunct. Checks run in the order P6, P5, P4, P2, P3, P1.
pub fn detect_pattern(f: &Formula) -> Result<PatternId, FormulaError> {
    Ok(match shape(f)? {
        Shape::P6(_) => PatternId::P6,
        Shape::P5(_) => PatternId::P5,
        Shape::P4 { .. } => PatternId::P4,
        Shape::P2 { .. } => PatternId::P2,
        Shape::P3 { .. } => PatternId::P3,
        Shape::P1 { .. } => PatternId::P1,
    })
}

fn padded_trigger(f: &Formula, trigger: &Formula, depth: u32) -> Result<Vec<DnfClause>, FormulaError> {
    let clauses = to_dnf(trigger)?;
    clauses
        .iter()
        .map(|c| {
            pad_clause(c, depth).map_err(|_| {
                no_match(
                    f,
                    format!(
                        "trigger clause `{c}` looks {} steps ahead but the output is only {} steps ahead",
                        c.depth, depth
                    ),
                )
            })
        })
        .collect()
}

/// Splits a formula into its placeholder parts. `p` must be the detected pattern.
pub fn project_parts(f: &Formula, p: PatternId) -> Result<PatternParts, FormulaError> {
    let sh = shape(f)?;
    let mut parts = PatternParts {
        pattern: p,
        depth: 0,
        trigger: vec![],
        out: None,
        release_in: vec![],
        release_out: vec![],
        body: None,
    };
    match (sh, p) {
        (Shape::P1 { out, event }, PatternId::P1) => {
            parts.trigger = to_dnf(event)?;
            parts.depth = parts.trigger.iter().map(|c| c.depth).max().unwrap_or(0);
            parts.out = Some(out);
        }
        (
            Shape::P2 {
                trigger,
                depth,
                out,
                release,
            },
            PatternId::P2,
        ) => {
            parts.trigger = padded_trigger(f, trigger, depth)?;
            parts.depth = depth;
            parts.out = Some(out);
            for c in to_dnf(release)? {
                if c.input_only() {
                    parts.release_in.push(c);
                } else if c.output_only() {
                    if c.depth > 0 {
                        return Err(no_match(f, format!("output release clause `{c}` must not use X")));
                    }
                    parts.release_out.push(c);
                } else {
                    return Err(FormulaError::MixedClause(c.to_string()));
                }
            }
        }
        (
            Shape::P3 {
                trigger,
                depth,
                out,
            },
            PatternId::P3,
        )
        | (
            Shape::P4 {
                trigger,
                depth,
                out,
            },
            PatternId::P4,
        ) => {
            parts.trigger = padded_trigger(f, trigger, depth)?;
            parts.depth = depth;
            parts.out = Some(out);
        }
        (Shape::P5(body), PatternId::P5) | (Shape::P6(body), PatternId::P6) => {
            parts.body = Some(body.clone());
        }
        _ => return Err(no_match(f, format!("formula is not of pattern {p}"))),
    }
    Ok(parts)
}

/// Rebuilds a formula from its parts; classification of the result yields equal parts.
pub fn reassemble(parts: &PatternParts) -> Formula {
    let trig = || dnf_to_formula(&parts.trigger);
    match parts.pattern {
        PatternId::P1 => Formula::weak_until(parts.out().to_formula(), trig()),
        PatternId::P2 => {
            let rel: Vec<DnfClause> = parts.release().cloned().collect();
            let body = Formula::weak_until(parts.out().to_formula(), dnf_to_formula(&rel));
            Formula::globally(Formula::implies(trig(), Formula::next_n(body, parts.depth)))
        }
        PatternId::P3 => Formula::globally(Formula::implies(
            trig(),
            Formula::next_n(parts.out().to_formula(), parts.depth),
        )),
        PatternId::P4 => Formula::globally(Formula::iff(
            trig(),
            Formula::next_n(parts.out().to_formula(), parts.depth),
        )),
        PatternId::P5 | PatternId::P6 => {
            Formula::globally(parts.body.clone().unwrap_or(Formula::True))
        }
    }
}
