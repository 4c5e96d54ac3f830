use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::ast::{Formula, Io};
use super::FormulaError;

/// Upper bound on intermediate clause counts during DNF expansion.
pub const DNF_CLAUSE_LIMIT: usize = 1 << 16;

/// `X^depth var` or `!X^depth var`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Literal {
    pub depth: u32,
    pub var: String,
    pub positive: bool,
    pub io: Io,
}

impl Literal {
    pub fn new(depth: u32, var: &str, positive: bool, io: Io) -> Literal {
        Literal {
            depth,
            var: var.to_string(),
            positive,
            io,
        }
    }

    pub fn to_formula(&self) -> Formula {
        let v = Formula::Var {
            name: self.var.clone(),
            io: self.io,
        };
        let v = if self.positive { v } else { Formula::not(v) };
        Formula::next_n(v, self.depth)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            write!(f, "!")?;
        }
        for _ in 0..self.depth {
            write!(f, "X ")?;
        }
        write!(f, "{}", self.var)
    }
}

/// A conjunction of literals. `depth` may exceed the deepest literal after padding.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DnfClause {
    pub lits: Vec<Literal>,
    pub depth: u32,
}

impl DnfClause {
    /// Builds a clause from literals, sorting them; `None` if two literals contradict.
    pub fn from_lits(lits: impl IntoIterator<Item = Literal>) -> Option<DnfClause> {
        let set: BTreeSet<Literal> = lits.into_iter().collect();
        let lits: Vec<Literal> = set.into_iter().collect();
        for w in lits.windows(2) {
            if w[0].depth == w[1].depth && w[0].var == w[1].var && w[0].positive != w[1].positive {
                return None;
            }
        }
        let depth = lits.iter().map(|l| l.depth).max().unwrap_or(0);
        Some(DnfClause { lits, depth })
    }

    pub fn max_lit_depth(&self) -> u32 {
        self.lits.iter().map(|l| l.depth).max().unwrap_or(0)
    }

    pub fn input_only(&self) -> bool {
        self.lits.iter().all(|l| l.io == Io::Input)
    }

    pub fn output_only(&self) -> bool {
        self.lits.iter().all(|l| l.io == Io::Output)
    }

    /// Sorted distinct variable names, `In(c)`.
    pub fn vars(&self) -> Vec<String> {
        let set: BTreeSet<&str> = self.lits.iter().map(|l| l.var.as_str()).collect();
        set.into_iter().map(str::to_string).collect()
    }

    /// Three-valued evaluation: `lookup` answers `None` for unknown values.
    pub fn eval3(&self, lookup: &mut dyn FnMut(u32, &str) -> Option<bool>) -> Option<bool> {
        let mut unknown = false;
        for l in &self.lits {
            match lookup(l.depth, &l.var) {
                Some(v) if v != l.positive => return Some(false),
                Some(_) => {}
                None => unknown = true,
            }
        }
        if unknown {
            None
        } else {
            Some(true)
        }
    }

    pub fn to_formula(&self) -> Formula {
        Formula::and_all(self.lits.iter().map(Literal::to_formula))
    }
}

impl fmt::Display for DnfClause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lits.is_empty() {
            return write!(f, "true");
        }
        for (k, l) in self.lits.iter().enumerate() {
            if k > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// Three-valued disjunction over a clause list.
pub fn eval3_dnf(
    clauses: &[DnfClause],
    lookup: &mut dyn FnMut(u32, &str) -> Option<bool>,
) -> Option<bool> {
    let mut unknown = false;
    for c in clauses {
        match c.eval3(lookup) {
            Some(true) => return Some(true),
            Some(false) => {}
            None => unknown = true,
        }
    }
    if unknown {
        None
    } else {
        Some(false)
    }
}

pub fn dnf_to_formula(clauses: &[DnfClause]) -> Formula {
    Formula::or_all(clauses.iter().map(DnfClause::to_formula))
}

pub fn display_dnf(clauses: &[DnfClause]) -> String {
    if clauses.is_empty() {
        return "false".to_string();
    }
    clauses
        .iter()
        .map(|c| {
            if clauses.len() > 1 && c.lits.len() > 1 {
                format!("({c})")
            } else {
                c.to_string()
            }
        })
        .collect::<Vec<_>>()
        .join(" | ")
}

type RawDnf = BTreeSet<BTreeSet<Literal>>;

/// Normalizes a propositional formula (X allowed) into a sorted, duplicate-free
/// clause list. Contradictory clauses are dropped with a warning.
pub fn to_dnf(formula: &Formula) -> Result<Vec<DnfClause>, FormulaError> {
    let raw = expand(formula, false, 0)?;
    let mut out: Vec<DnfClause> = raw
        .into_iter()
        .map(|set| {
            let lits: Vec<Literal> = set.into_iter().collect();
            let depth = lits.iter().map(|l| l.depth).max().unwrap_or(0);
            DnfClause { lits, depth }
        })
        .collect();
    out.sort();
    out.dedup();
    Ok(out)
}

fn expand(f: &Formula, neg: bool, d: u32) -> Result<RawDnf, FormulaError> {
    Ok(match f {
        Formula::True => {
            if neg {
                RawDnf::new()
            } else {
                RawDnf::from([BTreeSet::new()])
            }
        }
        Formula::False => {
            if neg {
                RawDnf::from([BTreeSet::new()])
            } else {
                RawDnf::new()
            }
        }
        Formula::Var { name, io } => {
            RawDnf::from([BTreeSet::from([Literal::new(d, name, !neg, *io)])])
        }
        Formula::Not(a) => expand(a, !neg, d)?,
        Formula::X(a) => expand(a, neg, d + 1)?,
        Formula::And(a, b) => {
            if neg {
                union(expand(a, true, d)?, expand(b, true, d)?)
            } else {
                product(expand(a, false, d)?, expand(b, false, d)?)?
            }
        }
        Formula::Or(a, b) => {
            if neg {
                product(expand(a, true, d)?, expand(b, true, d)?)?
            } else {
                union(expand(a, false, d)?, expand(b, false, d)?)
            }
        }
        Formula::Implies(a, b) => {
            if neg {
                product(expand(a, false, d)?, expand(b, true, d)?)?
            } else {
                union(expand(a, true, d)?, expand(b, false, d)?)
            }
        }
        Formula::Iff(a, b) => {
            let (pa, na, pb, nb) = (
                expand(a, false, d)?,
                expand(a, true, d)?,
                expand(b, false, d)?,
                expand(b, true, d)?,
            );
            if neg {
                union(product(pa, nb)?, product(na, pb)?)
            } else {
                union(product(pa, pb)?, product(na, nb)?)
            }
        }
        Formula::G(_) => {
            return Err(FormulaError::TemporalOperatorInPropositionalContext(
                "G".into(),
            ))
        }
        Formula::W(_, _) => {
            return Err(FormulaError::TemporalOperatorInPropositionalContext(
                "W".into(),
            ))
        }
    })
}

fn union(mut a: RawDnf, b: RawDnf) -> RawDnf {
    a.extend(b);
    a
}

fn product(a: RawDnf, b: RawDnf) -> Result<RawDnf, FormulaError> {
    if a.len().saturating_mul(b.len()) > DNF_CLAUSE_LIMIT {
        return Err(FormulaError::DnfTooLarge(DNF_CLAUSE_LIMIT));
    }
    let mut out = RawDnf::new();
    for x in &a {
        for y in &b {
            let merged: BTreeSet<Literal> = x.union(y).cloned().collect();
            if contradictory(&merged) {
                log::warn!(
                    "dropping contradictory clause {}",
                    merged
                        .iter()
                        .map(|l| l.to_string())
                        .collect::<Vec<_>>()
                        .join(" & ")
                );
                continue;
            }
            out.insert(merged);
        }
    }
    Ok(out)
}

fn contradictory(set: &BTreeSet<Literal>) -> bool {
    let lits: Vec<&Literal> = set.iter().collect();
    lits.windows(2)
        .any(|w| w[0].depth == w[1].depth && w[0].var == w[1].var && w[0].positive != w[1].positive)
}

/// Raises a clause to depth `i` (conceptually conjoining `X^i true`).
pub fn pad_clause(c: &DnfClause, i: u32) -> Result<DnfClause, FormulaError> {
    if c.depth > i {
        return Err(FormulaError::DepthExceeded {
            depth: c.depth,
            limit: i,
        });
    }
    Ok(DnfClause {
        lits: c.lits.clone(),
        depth: i,
    })
}

/// Upper bound on the clause set while computing prime implicants.
pub const PRIME_IMPLICANT_LIMIT: usize = 4096;

/// All prime implicants of the disjunction (iterated consensus with
/// absorption). Every partial assignment that forces the disjunction contains
/// one of the returned clauses. `None` if the cover exceeds
/// [`PRIME_IMPLICANT_LIMIT`] clauses.
pub fn prime_implicants(clauses: &[DnfClause]) -> Option<Vec<DnfClause>> {
    let key = |l: &Literal| (l.depth, l.var.clone(), l.io);
    let mut set: Vec<BTreeSet<Literal>> = Vec::new();
    let add = |set: &mut Vec<BTreeSet<Literal>>, c: BTreeSet<Literal>| -> bool {
        if set.iter().any(|s| s.is_subset(&c)) {
            return false;
        }
        set.retain(|s| !c.is_subset(s));
        set.push(c);
        true
    };
    for c in clauses {
        add(&mut set, c.lits.iter().cloned().collect());
    }
    let mut changed = true;
    while changed {
        changed = false;
        let snapshot = set.clone();
        for (a_ix, a) in snapshot.iter().enumerate() {
            for b in &snapshot[a_ix + 1..] {
                let opposed: Vec<&Literal> = a
                    .iter()
                    .filter(|l| b.iter().any(|m| key(m) == key(l) && m.positive != l.positive))
                    .collect();
                if opposed.len() != 1 {
                    continue;
                }
                let pivot = key(opposed[0]);
                let resolvent: BTreeSet<Literal> = a
                    .iter()
                    .chain(b.iter())
                    .filter(|l| key(l) != pivot)
                    .cloned()
                    .collect();
                if add(&mut set, resolvent) {
                    changed = true;
                    if set.len() > PRIME_IMPLICANT_LIMIT {
                        return None;
                    }
                }
            }
        }
    }
    let mut out: Vec<DnfClause> = set
        .into_iter()
        .filter_map(DnfClause::from_lits)
        .collect();
    out.sort();
    Some(out)
}
