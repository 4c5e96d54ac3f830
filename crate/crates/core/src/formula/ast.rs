use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Which side of the I/O partition a variable belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Io {
    Input,
    Output,
}

/// LTL syntax tree restricted to the operators the fragment uses.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Var { name: String, io: Io },
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    X(Box<Formula>),
    G(Box<Formula>),
    W(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn input(name: &str) -> Formula {
        Formula::Var {
            name: name.to_string(),
            io: Io::Input,
        }
    }

    pub fn output(name: &str) -> Formula {
        Formula::Var {
            name: name.to_string(),
            io: Io::Output,
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn next(f: Formula) -> Formula {
        Formula::X(Box::new(f))
    }

    pub fn next_n(mut f: Formula, n: u32) -> Formula {
        for _ in 0..n {
            f = Formula::next(f);
        }
        f
    }

    pub fn globally(f: Formula) -> Formula {
        Formula::G(Box::new(f))
    }

    pub fn weak_until(a: Formula, b: Formula) -> Formula {
        Formula::W(Box::new(a), Box::new(b))
    }

    /// Conjunction of a list; `true` when empty.
    pub fn and_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::and)
            .unwrap_or(Formula::True)
    }

    /// Disjunction of a list; `false` when empty.
    pub fn or_all(items: impl IntoIterator<Item = Formula>) -> Formula {
        items
            .into_iter()
            .reduce(Formula::or)
            .unwrap_or(Formula::False)
    }

    /// True when no G or W occurs.
    pub fn is_propositional(&self) -> bool {
        match self {
            Formula::True | Formula::False | Formula::Var { .. } => true,
            Formula::Not(a) | Formula::X(a) => a.is_propositional(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.is_propositional() && b.is_propositional()
            }
            Formula::G(_) | Formula::W(_, _) => false,
        }
    }

    /// Maximal X nesting.
    pub fn depth(&self) -> u32 {
        match self {
            Formula::True | Formula::False | Formula::Var { .. } => 0,
            Formula::Not(a) | Formula::G(a) => a.depth(),
            Formula::X(a) => 1 + a.depth(),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::W(a, b) => a.depth().max(b.depth()),
        }
    }

    pub fn vars(&self) -> BTreeSet<(String, Io)> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<(String, Io)>) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Var { name, io } => {
                out.insert((name.clone(), *io));
            }
            Formula::Not(a) | Formula::X(a) | Formula::G(a) => a.collect_vars(out),
            Formula::And(a, b)
            | Formula::Or(a, b)
            | Formula::Implies(a, b)
            | Formula::Iff(a, b)
            | Formula::W(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn mentions(&self, io: Io) -> bool {
        self.vars().iter().any(|(_, k)| *k == io)
    }

    /// Evaluate a propositional formula. `lookup(depth, name)` returns the value of
    /// `name` at offset `depth` from the evaluation point.
    ///
    /// Panics on G or W; callers check `is_propositional` first.
    pub fn eval_prop(&self, lookup: &mut dyn FnMut(u32, &str) -> bool) -> bool {
        self.eval_at(0, lookup)
    }

    fn eval_at(&self, d: u32, lookup: &mut dyn FnMut(u32, &str) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Var { name, .. } => lookup(d, name),
            Formula::Not(a) => !a.eval_at(d, lookup),
            Formula::And(a, b) => a.eval_at(d, lookup) & b.eval_at(d, lookup),
            Formula::Or(a, b) => a.eval_at(d, lookup) | b.eval_at(d, lookup),
            Formula::Implies(a, b) => !a.eval_at(d, lookup) | b.eval_at(d, lookup),
            Formula::Iff(a, b) => a.eval_at(d, lookup) == b.eval_at(d, lookup),
            Formula::X(a) => a.eval_at(d + 1, lookup),
            Formula::G(_) | Formula::W(_, _) => panic!("eval_prop on temporal formula"),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::G(_) => 0,
            Formula::Implies(_, _) | Formula::Iff(_, _) => 1,
            Formula::W(_, _) => 2,
            Formula::Or(_, _) => 3,
            Formula::And(_, _) => 4,
            Formula::Not(_) | Formula::X(_) => 5,
            Formula::True | Formula::False | Formula::Var { .. } => 6,
        }
    }

    fn fmt_child(&self, child: &Formula, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if child.precedence() < min {
            write!(f, "({child})")
        } else {
            write!(f, "{child}")
        }
    }
}

/// Prints in the `.gxw` surface syntax; the output parses back to an equal tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "true"),
            Formula::False => write!(f, "false"),
            Formula::Var { name, .. } => write!(f, "{name}"),
            Formula::Not(a) => {
                write!(f, "!")?;
                self.fmt_child(a, 5, f)
            }
            Formula::X(a) => {
                write!(f, "X ")?;
                self.fmt_child(a, 5, f)
            }
            Formula::G(a) => {
                write!(f, "G ")?;
                self.fmt_child(a, 6, f)
            }
            Formula::And(a, b) => {
                self.fmt_child(a, 4, f)?;
                write!(f, " & ")?;
                self.fmt_child(b, 5, f)
            }
            Formula::Or(a, b) => {
                self.fmt_child(a, 3, f)?;
                write!(f, " | ")?;
                self.fmt_child(b, 4, f)
            }
            Formula::W(a, b) => {
                self.fmt_child(a, 3, f)?;
                write!(f, " W ")?;
                self.fmt_child(b, 3, f)
            }
            Formula::Implies(a, b) => {
                self.fmt_child(a, 2, f)?;
                write!(f, " -> ")?;
                self.fmt_child(b, 1, f)
            }
            Formula::Iff(a, b) => {
                self.fmt_child(a, 2, f)?;
                write!(f, " <-> ")?;
                self.fmt_child(b, 1, f)
            }
        }
    }
}
