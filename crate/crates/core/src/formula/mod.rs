//! LTL syntax, DNF normalization, pattern classification and the Ω bound.

mod ast;
mod dnf;
mod parse;
mod pattern;

use std::collections::BTreeSet;
use std::fmt;

pub use ast::{Formula, Io};
pub use dnf::{
    display_dnf, dnf_to_formula, eval3_dnf, pad_clause, prime_implicants, to_dnf, DnfClause, Literal,
    DNF_CLAUSE_LIMIT, PRIME_IMPLICANT_LIMIT,
};
pub use parse::{parse_file, parse_formula, Item, ParseError, SpecFile};
pub use pattern::{detect_pattern, project_parts, reassemble, OutLit, PatternId, PatternParts};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error("temporal operator {0} in a propositional context")]
    TemporalOperatorInPropositionalContext(String),
    #[error("clause depth {depth} exceeds the required depth {limit}")]
    DepthExceeded { depth: u32, limit: u32 },
    #[error("release clause `{0}` mixes input and output variables")]
    MixedClause(String),
    #[error("`{formula}` matches no GXW pattern: {reason}")]
    NoMatch { formula: String, reason: String },
    #[error("DNF expansion exceeds {0} clauses")]
    DnfTooLarge(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("parse error at {0}")]
    Parse(#[from] ParseError),
    #[error("{label}: {source}")]
    Formula {
        label: String,
        #[source]
        source: FormulaError,
    },
    #[error("{0}")]
    Invalid(String),
}

impl SpecError {
    /// True for errors that reject the specification as outside the fragment.
    pub fn is_pattern_rejection(&self) -> bool {
        matches!(self, SpecError::Formula { .. })
    }
}

/// One classified conjunct `η_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubSpec {
    /// 1-based position among the non-assumption conjuncts.
    pub index: usize,
    pub label: String,
    pub formula: Formula,
    pub parts: PatternParts,
}

impl SubSpec {
    pub fn pattern(&self) -> PatternId {
        self.parts.pattern
    }

    /// Input-part depth `i_m` used by the Ω bound (0 for P5).
    pub fn input_depth(&self) -> u32 {
        if self.pattern().writes_output() {
            self.parts.depth
        } else {
            0
        }
    }

    /// A P2/P3 conjunct whose trigger normalizes to `false` constrains nothing.
    pub fn is_vacuous(&self) -> bool {
        matches!(self.pattern(), PatternId::P2 | PatternId::P3) && self.parts.trigger.is_empty()
    }
}

/// A validated specification `ϱ -> η_1 & ... & η_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct GxwSpec {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    /// Conjunction of all assumption bodies (depth 0, inputs only).
    pub assumption: Formula,
    pub subspecs: Vec<SubSpec>,
}

impl GxwSpec {
    /// Classifies and validates labelled conjuncts. Top-level conjunctions are split.
    pub fn new(
        inputs: Vec<String>,
        outputs: Vec<String>,
        assumptions: Vec<Formula>,
        formulas: Vec<(Option<String>, Formula)>,
    ) -> Result<GxwSpec, SpecError> {
        let mut seen = BTreeSet::new();
        for v in inputs.iter().chain(outputs.iter()) {
            if !seen.insert(v.clone()) {
                return Err(SpecError::Invalid(format!("variable `{v}` declared twice")));
            }
        }
        let mut assumption_parts = Vec::new();
        for a in assumptions {
            let g = Formula::globally(a);
            match detect_pattern(&g) {
                Ok(PatternId::P6) => {
                    if let Formula::G(body) = g {
                        assumption_parts.push(*body);
                    }
                }
                Ok(p) => {
                    return Err(SpecError::Formula {
                        label: "assume".into(),
                        source: FormulaError::NoMatch {
                            formula: g.to_string(),
                            reason: format!("an assumption must be over inputs only (found {p})"),
                        },
                    })
                }
                Err(e) => {
                    return Err(SpecError::Formula {
                        label: "assume".into(),
                        source: e,
                    })
                }
            }
        }
        let mut flat = Vec::new();
        for (n, (label, f)) in formulas.into_iter().enumerate() {
            let base = label.unwrap_or_else(|| format!("#{}", n + 1));
            let mut conj = Vec::new();
            split_conjunction(f, &mut conj);
            if conj.len() == 1 {
                flat.push((base, conj.pop().unwrap()));
            } else {
                for (k, c) in conj.into_iter().enumerate() {
                    flat.push((format!("{base}.{}", k + 1), c));
                }
            }
        }
        let mut labels = BTreeSet::new();
        let mut subspecs = Vec::new();
        for (label, formula) in flat {
            if !labels.insert(label.clone()) {
                return Err(SpecError::Invalid(format!("duplicate label `{label}`")));
            }
            let wrap = |source| SpecError::Formula {
                label: label.clone(),
                source,
            };
            let p = detect_pattern(&formula).map_err(wrap)?;
            let parts = project_parts(&formula, p).map_err(wrap)?;
            if p == PatternId::P6 {
                assumption_parts.push(parts.body.clone().unwrap_or(Formula::True));
                continue;
            }
            let sub = SubSpec {
                index: subspecs.len() + 1,
                label: label.clone(),
                formula,
                parts,
            };
            if sub.is_vacuous() {
                log::warn!("{label}: trigger is unsatisfiable, the conjunct is skipped");
            }
            if sub.pattern() == PatternId::P1 && sub.parts.trigger.is_empty() {
                log::info!("{label}: releasing event is unsatisfiable, output held forever");
            }
            subspecs.push(sub);
        }
        Ok(GxwSpec {
            inputs,
            outputs,
            assumption: Formula::and_all(assumption_parts),
            subspecs,
        })
    }

    pub fn from_file(file: SpecFile) -> Result<GxwSpec, SpecError> {
        let mut assumptions = Vec::new();
        let mut formulas = Vec::new();
        for item in file.items {
            match item {
                Item::Assume(f) => assumptions.push(f),
                Item::Formula { label, formula } => formulas.push((label, formula)),
            }
        }
        GxwSpec::new(file.inputs, file.outputs, assumptions, formulas)
    }

    pub fn has_assumption(&self) -> bool {
        self.assumption != Formula::True
    }

    pub fn subspec(&self, index: usize) -> &SubSpec {
        &self.subspecs[index - 1]
    }

    pub fn by_label(&self, label: &str) -> Option<&SubSpec> {
        self.subspecs.iter().find(|s| s.label == label)
    }

    /// All P2 releases are input-only and no P5 conjunct exists.
    pub fn unroll_exact(&self) -> bool {
        self.subspecs.iter().all(|s| match s.pattern() {
            PatternId::P2 => s.parts.release_out.is_empty(),
            PatternId::P5 => false,
            _ => true,
        })
    }

    /// Largest window depth over every clause in the specification.
    pub fn max_window(&self) -> u32 {
        self.subspecs
            .iter()
            .flat_map(|s| s.parts.trigger.iter().chain(s.parts.release()))
            .map(|c| c.depth)
            .chain(self.subspecs.iter().map(|s| s.parts.depth))
            .max()
            .unwrap_or(0)
    }
}

fn split_conjunction(f: Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) if !(a.is_propositional() && b.is_propositional()) => {
            split_conjunction(*a, out);
            split_conjunction(*b, out);
        }
        other => out.push(other),
    }
}

/// Parses, expands macros, classifies and validates a `.gxw` source text.
pub fn parse_spec(src: &str) -> Result<GxwSpec, SpecError> {
    GxwSpec::from_file(parse_file(src)?)
}

/// `Ω = k' + Σ i_m` over the conjuncts of patterns P1 to P4.
pub fn compute_omega(spec: &GxwSpec) -> u32 {
    spec.subspecs
        .iter()
        .filter(|s| s.pattern().writes_output())
        .map(|s| 1 + s.input_depth())
        .sum()
}

impl fmt::Display for GxwSpec {
    /// Renders a `.gxw` file that parses back to an equivalent specification.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.inputs.is_empty() {
            writeln!(f, "input {};", self.inputs.join(", "))?;
        }
        if !self.outputs.is_empty() {
            writeln!(f, "output {};", self.outputs.join(", "))?;
        }
        if self.has_assumption() {
            writeln!(f, "assume {};", self.assumption)?;
        }
        for s in &self.subspecs {
            if s.label.starts_with('#') || s.label.contains('.') {
                writeln!(f, "{};", s.formula)?;
            } else {
                writeln!(f, "{}: {};", s.label, s.formula)?;
            }
        }
        Ok(())
    }
}
