//! Conflict detection and parameter synthesis as 2QBF: `∃A ∀U: Υa → Υg`, where the
//! `A` are the resolution parameters and `U` the inputs (and, statically, the states).

mod cnf;
mod encode;
pub mod sat;

use std::collections::BTreeMap;
use std::fmt::Write as _;

pub use cnf::Circuit;
pub use encode::{encode_static, encode_unrolled, formula_lit, inductive_invariants, StateClause};
use sat::{Lit, Solver};

use crate::sdf::ActorSystem;
use crate::synthesis::PartialSystem;

/// A 2QBF instance in clausal form.
///
/// The matrix is `defs ∧ (assume → guarantee)`. Every variable of `inner` is
/// functionally determined by the quantified ones through `defs`, so the
/// instance reads `∃ exists ∀ forall ∃ inner`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QbfProblem {
    pub num_vars: u32,
    /// One parameter per resolution actor, named by its output variable.
    pub exists: Vec<(String, Lit)>,
    pub forall: Vec<(String, Lit)>,
    pub inner: Vec<Lit>,
    pub defs: Vec<Vec<Lit>>,
    /// Literal for the conjunction of all assumptions.
    pub assume: Lit,
    pub guarantee: Vec<Vec<Lit>>,
}

impl Default for QbfProblem {
    /// The empty instance, which is true.
    fn default() -> Self {
        QbfProblem {
            num_vars: 0,
            exists: Vec::new(),
            forall: Vec::new(),
            inner: Vec::new(),
            defs: Vec::new(),
            assume: cnf::TRUE,
            guarantee: Vec::new(),
        }
    }
}

pub type Witness = BTreeMap<String, bool>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QbfResult {
    Sat(Witness),
    Unsat,
}

impl QbfResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, QbfResult::Sat(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Counterexample-guided refinement of parameter candidates.
    #[default]
    Cegar,
    /// Tries all parameter vectors in lexicographic order.
    Enumerate,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum QbfError {
    #[error("witness names unknown parameter `{0}`")]
    UnknownWitnessVariable(String),
    #[error("witness lacks a value for `{0}`")]
    MissingWitnessVariable(String),
    #[error("witness line {0}: expected `name=0` or `name=1`")]
    BadWitnessLine(usize),
}

impl QbfProblem {
    /// Matrix clauses: the definitions, then each guarantee clause weakened by `¬assume`.
    pub fn matrix(&self) -> Vec<Vec<Lit>> {
        let mut m = self.defs.clone();
        for g in &self.guarantee {
            let mut c = g.clone();
            if self.assume != cnf::TRUE {
                c.push(-self.assume);
            }
            m.push(c);
        }
        m
    }

    pub fn num_clauses(&self) -> usize {
        self.defs.len() + self.guarantee.len()
    }
}

/// Checks `A = a` against all universal values: `None` if valid, otherwise the
/// values of the universal variables in a counterexample.
struct Verifier {
    solver: Solver,
    trivial: bool,
}

impl Verifier {
    fn new(p: &QbfProblem) -> Verifier {
        let mut solver = Solver::new();
        // variable 1 stands for `true` even when the problem declares none
        solver.ensure_vars((p.num_vars as usize).max(1));
        for c in &p.defs {
            solver.add_clause(c);
        }
        solver.add_clause(&[p.assume]);
        // ¬guarantee: some clause has all literals false.
        let mut any = Vec::new();
        for g in &p.guarantee {
            let e = solver.new_var();
            for &l in g {
                solver.add_clause(&[-e, -l]);
            }
            any.push(e);
        }
        let trivial = any.is_empty() || !solver.add_clause(&any);
        Verifier { solver, trivial }
    }

    fn counterexample(&mut self, p: &QbfProblem, a: &[bool]) -> Option<Vec<bool>> {
        if self.trivial {
            return None;
        }
        let assumps: Vec<Lit> = p
            .exists
            .iter()
            .zip(a)
            .map(|(&(_, l), &v)| if v { l } else { -l })
            .collect();
        if self.solver.solve_with(&assumps) {
            Some(p.forall.iter().map(|&(_, l)| self.solver.model_value(l)).collect())
        } else {
            None
        }
    }
}

/// Candidate generator: parameters consistent with every counterexample seen so far.
struct Candidates {
    solver: Solver,
    rounds: usize,
}

impl Candidates {
    fn new(p: &QbfProblem) -> Candidates {
        let mut solver = Solver::new();
        solver.ensure_vars(p.num_vars as usize);
        Candidates { solver, rounds: 0 }
    }

    /// Instantiates the matrix with the universal variables fixed to `u`.
    fn refine(&mut self, p: &QbfProblem, u: &[bool]) {
        self.rounds += 1;
        let mut map: BTreeMap<u32, Lit> = BTreeMap::new();
        map.insert(1, 1);
        for &(_, l) in &p.exists {
            map.insert(l.unsigned_abs(), l.abs());
        }
        for (&(_, l), &v) in p.forall.iter().zip(u) {
            map.insert(l.unsigned_abs(), if v { 1 } else { -1 });
        }
        for &v in &p.inner {
            if v != 1 {
                let f = self.solver.new_var();
                map.insert(v.unsigned_abs(), f);
            }
        }
        let tr = |l: Lit| {
            let m = map[&l.unsigned_abs()];
            if l < 0 {
                -m
            } else {
                m
            }
        };
        for c in p.matrix() {
            let c: Vec<Lit> = c.into_iter().map(tr).collect();
            self.solver.add_clause(&c);
        }
    }

    fn next(&mut self, p: &QbfProblem, prefix: &[bool]) -> Option<Vec<bool>> {
        let assumps: Vec<Lit> = p
            .exists
            .iter()
            .zip(prefix)
            .map(|(&(_, l), &v)| if v { l } else { -l })
            .collect();
        if self.solver.solve_with(&assumps) {
            Some(p.exists.iter().map(|&(_, l)| self.solver.model_value(l)).collect())
        } else {
            None
        }
    }
}

fn cegar_with_prefix(
    p: &QbfProblem,
    ver: &mut Verifier,
    cand: &mut Candidates,
    prefix: &[bool],
) -> Option<Vec<bool>> {
    loop {
        let a = cand.next(p, prefix)?;
        match ver.counterexample(p, &a) {
            None => return Some(a),
            Some(u) => cand.refine(p, &u),
        }
    }
}

/// Statistics of the last solve, for reporting.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub refinements: usize,
    pub candidates_checked: usize,
}

/// Decides the instance and returns the lexicographically smallest witness
/// (parameters in `exists` order, false before true).
pub fn solve_2qbf(p: &QbfProblem) -> QbfResult {
    solve_2qbf_with(p, Strategy::Cegar).0
}

pub fn solve_2qbf_with(p: &QbfProblem, strategy: Strategy) -> (QbfResult, SolveStats) {
    let mut ver = Verifier::new(p);
    let mut stats = SolveStats::default();
    let n = p.exists.len();
    let result = match strategy {
        Strategy::Enumerate => {
            let mut found = None;
            for code in 0u64..(1u64 << n) {
                let a: Vec<bool> = (0..n).map(|k| code >> (n - 1 - k) & 1 == 1).collect();
                stats.candidates_checked += 1;
                if ver.counterexample(p, &a).is_none() {
                    found = Some(a);
                    break;
                }
            }
            found
        }
        Strategy::Cegar => {
            let mut cand = Candidates::new(p);
            let out = match cegar_with_prefix(p, &mut ver, &mut cand, &[]) {
                None => None,
                Some(mut best) => {
                    let mut prefix = Vec::with_capacity(n);
                    for k in 0..n {
                        if best[k] {
                            let mut trial = prefix.clone();
                            trial.push(false);
                            if let Some(w) = cegar_with_prefix(p, &mut ver, &mut cand, &trial) {
                                best = w;
                            }
                        }
                        prefix.push(best[k]);
                    }
                    Some(best)
                }
            };
            stats.refinements = cand.rounds;
            out
        }
    };
    let r = match result {
        Some(a) => QbfResult::Sat(
            p.exists
                .iter()
                .map(|(name, _)| name.clone())
                .zip(a)
                .collect(),
        ),
        None => QbfResult::Unsat,
    };
    (r, stats)
}

/// QDIMACS text: `e` parameters, `a` universals, `e` gate variables.
pub fn export_qdimacs(p: &QbfProblem) -> String {
    let m = p.matrix();
    let mut s = String::new();
    if !p.exists.is_empty() {
        let names: Vec<String> = p.exists.iter().map(|(n, l)| format!("{l}={n}")).collect();
        let _ = writeln!(s, "c parameters {}", names.join(" "));
    }
    let _ = writeln!(s, "p cnf {} {}", p.num_vars, m.len());
    let block = |s: &mut String, q: char, vs: &mut dyn Iterator<Item = Lit>| {
        let vs: Vec<String> = vs.map(|v| v.to_string()).collect();
        if !vs.is_empty() {
            let _ = writeln!(s, "{q} {} 0", vs.join(" "));
        }
    };
    block(&mut s, 'e', &mut p.exists.iter().map(|(_, l)| *l));
    block(&mut s, 'a', &mut p.forall.iter().map(|(_, l)| *l));
    block(&mut s, 'e', &mut p.inner.iter().copied());
    for c in m {
        let lits: Vec<String> = c.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(s, "{} 0", lits.join(" "));
    }
    s
}

/// Fixes every resolution parameter from `w` (keyed by output variable).
pub fn apply_witness(ps: &PartialSystem, w: &Witness) -> Result<ActorSystem, QbfError> {
    for k in w.keys() {
        if !ps.res.contains_key(k) {
            return Err(QbfError::UnknownWitnessVariable(k.clone()));
        }
    }
    let mut values = BTreeMap::new();
    for (v, id) in &ps.res {
        let b = w
            .get(v)
            .ok_or_else(|| QbfError::MissingWitnessVariable(v.clone()))?;
        values.insert(id.clone(), *b);
    }
    let mut sys = ps.sys.clone();
    sys.set_res_params(&values);
    Ok(sys)
}

pub fn witness_to_text(w: &Witness) -> String {
    w.iter()
        .map(|(k, v)| format!("{k}={}\n", *v as u8))
        .collect()
}

pub fn witness_from_text(src: &str) -> Result<Witness, QbfError> {
    let mut w = Witness::new();
    for (n, line) in src.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(QbfError::BadWitnessLine(n + 1))?;
        let v = match v.trim() {
            "0" => false,
            "1" => true,
            _ => return Err(QbfError::BadWitnessLine(n + 1)),
        };
        w.insert(k.trim().to_string(), v);
    }
    Ok(w)
}
