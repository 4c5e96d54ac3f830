use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::cnf::{Circuit, FALSE, TRUE};
use super::sat::{Lit, Solver};
use super::QbfProblem;
use crate::formula::{Formula, GxwSpec, Io, PatternId};
use crate::logic::{Concrete, Logic};
use crate::sdf::{SdfError, Simulator, TieBreak};
use crate::synthesis::PartialSystem;

/// Propositional, depth-0 formula as a circuit over `lookup`.
pub fn formula_lit<L: Logic>(l: &mut L, f: &Formula, lookup: &mut dyn FnMut(&str, Io) -> L::B) -> L::B {
    match f {
        Formula::True => l.constant(true),
        Formula::False => l.constant(false),
        Formula::Var { name, io } => lookup(name, *io),
        Formula::Not(a) => {
            let x = formula_lit(l, a, lookup);
            l.not(x)
        }
        Formula::And(a, b) => {
            let x = formula_lit(l, a, lookup);
            let y = formula_lit(l, b, lookup);
            l.and(x, y)
        }
        Formula::Or(a, b) => {
            let x = formula_lit(l, a, lookup);
            let y = formula_lit(l, b, lookup);
            l.or(x, y)
        }
        Formula::Implies(a, b) => {
            let x = formula_lit(l, a, lookup);
            let y = formula_lit(l, b, lookup);
            let nx = l.not(x);
            l.or(nx, y)
        }
        Formula::Iff(a, b) => {
            let x = formula_lit(l, a, lookup);
            let y = formula_lit(l, b, lookup);
            l.eq(x, y)
        }
        Formula::X(_) | Formula::G(_) | Formula::W(_, _) => {
            panic!("temporal operator in a depth-0 constraint: {f}")
        }
    }
}

/// A clause over state bits: `(bit index, polarity)` pairs.
pub type StateClause = Vec<(usize, bool)>;

fn clause_holds(c: &StateClause, s: &[bool]) -> bool {
    c.iter().any(|&(b, p)| s[b] == p)
}

fn state_clause_lit(c: &mut Circuit, cl: &StateClause, s: &[Lit]) -> Lit {
    let lits: Vec<Lit> = cl.iter().map(|&(b, p)| if p { s[b] } else { -s[b] }).collect();
    c.or_all(&lits)
}

struct Encoder<'a> {
    sim: Simulator,
    /// Output variable of each resolution actor, in actor order.
    res_vars: Vec<String>,
    spec: &'a GxwSpec,
    p5: Vec<Formula>,
}

impl<'a> Encoder<'a> {
    fn new(ps: &PartialSystem, spec: &'a GxwSpec) -> Result<Encoder<'a>, SdfError> {
        let sim = Simulator::compile(&ps.sys, TieBreak::Forward)?;
        let p5 = spec
            .subspecs
            .iter()
            .filter(|s| s.pattern() == PatternId::P5)
            .filter_map(|s| s.parts.body.clone())
            .collect();
        let res_vars = sim
            .res_ids()
            .into_iter()
            .map(|id| {
                ps.res
                    .iter()
                    .find(|(_, r)| r.as_str() == id)
                    .map(|(v, _)| v.clone())
                    .unwrap_or_else(|| id.to_string())
            })
            .collect();
        Ok(Encoder {
            sim,
            res_vars,
            spec,
            p5,
        })
    }

    fn exists(&self, c: &mut Circuit) -> (Vec<(String, Lit)>, Vec<Lit>) {
        let named: Vec<(String, Lit)> = self.res_vars.iter().map(|v| (v.clone(), c.fresh())).collect();
        let lits = named.iter().map(|(_, l)| *l).collect();
        (named, lits)
    }

    fn assumption(&self, c: &mut Circuit, x: &[Lit]) -> Lit {
        let names = self.sim.inputs().to_vec();
        formula_lit(c, &self.spec.assumption, &mut |n, _| {
            x[names.iter().position(|v| v == n).expect("declared input")]
        })
    }

    /// Adds one frame; returns its guarantee literals and the next state.
    fn frame(&self, c: &mut Circuit, x: &[Lit], s: &[Lit], a: &[Lit]) -> (Vec<Lit>, Vec<Lit>) {
        let fr = self.sim.eval_frame(c, x, s, a);
        let mut g: Vec<Lit> = fr.conflicts.iter().map(|&k| -k).collect();
        let outs = self.sim.outputs().to_vec();
        for f in &self.p5 {
            let lit = formula_lit(c, f, &mut |n, _| {
                fr.outputs[outs.iter().position(|v| v == n).expect("declared output")].val
            });
            g.push(lit);
        }
        (g, fr.next)
    }
}

fn finish(c: Circuit, exists: Vec<(String, Lit)>, forall: Vec<(String, Lit)>, assume: Lit, guarantee: Vec<Lit>) -> QbfProblem {
    let mut quantified = vec![false; c.num_vars as usize + 1];
    for (_, l) in exists.iter().chain(&forall) {
        quantified[l.unsigned_abs() as usize] = true;
    }
    let inner = (1..=c.num_vars as Lit)
        .filter(|&v| !quantified[v as usize])
        .collect();
    QbfProblem {
        num_vars: c.num_vars,
        exists,
        forall,
        inner,
        defs: c.clauses,
        assume,
        guarantee: guarantee
            .into_iter()
            .filter(|&g| g != TRUE)
            .map(|g| vec![g])
            .collect(),
    }
}

/// Static encoding: one transition, inputs and all state bits universal, no
/// initial state. `invariants` (clauses over state bits known to hold in every
/// reachable state) restrict the universal states.
pub fn encode_static(
    ps: &PartialSystem,
    spec: &GxwSpec,
    invariants: &[StateClause],
) -> Result<QbfProblem, SdfError> {
    let enc = Encoder::new(ps, spec)?;
    let mut c = Circuit::new();
    let (exists, a) = enc.exists(&mut c);
    let mut forall = Vec::new();
    let x: Vec<Lit> = enc
        .sim
        .inputs()
        .iter()
        .map(|n| {
            let l = c.fresh();
            forall.push((n.clone(), l));
            l
        })
        .collect();
    let s: Vec<Lit> = enc
        .sim
        .state_vars()
        .iter()
        .flat_map(|v| {
            if v.three_valued {
                vec![format!("{}.def", v.name), format!("{}.val", v.name)]
            } else {
                vec![v.name.clone()]
            }
        })
        .map(|n| {
            let l = c.fresh();
            forall.push((n, l));
            l
        })
        .collect();
    let mut assume = enc.assumption(&mut c, &x);
    for cl in invariants {
        let k = state_clause_lit(&mut c, cl, &s);
        assume = c.and(assume, k);
    }
    let (g, _) = enc.frame(&mut c, &x, &s, &a);
    Ok(finish(c, exists, forall, assume, g))
}

/// Bounded unroll over cycles `0..=depth` from the initial state.
pub fn encode_unrolled(ps: &PartialSystem, spec: &GxwSpec, depth: u32) -> Result<QbfProblem, SdfError> {
    let enc = Encoder::new(ps, spec)?;
    let mut c = Circuit::new();
    let (exists, a) = enc.exists(&mut c);
    let mut forall = Vec::new();
    let mut s: Vec<Lit> = enc
        .sim
        .initial_state()
        .iter()
        .map(|&b| if b { TRUE } else { FALSE })
        .collect();
    let mut assume = TRUE;
    let mut guarantee = Vec::new();
    for t in 0..=depth {
        let x: Vec<Lit> = enc
            .sim
            .inputs()
            .iter()
            .map(|n| {
                let l = c.fresh();
                forall.push((format!("{n}@{t}"), l));
                l
            })
            .collect();
        let r = enc.assumption(&mut c, &x);
        assume = c.and(assume, r);
        let (g, next) = enc.frame(&mut c, &x, &s, &a);
        guarantee.extend(g);
        s = next;
    }
    Ok(finish(c, exists, forall, assume, guarantee))
}

fn candidates(n: usize) -> Vec<StateClause> {
    let mut out = Vec::new();
    for i in 0..n {
        out.push(vec![(i, true)]);
        out.push(vec![(i, false)]);
    }
    for i in 0..n {
        for j in i + 1..n {
            for (p, q) in [(true, true), (true, false), (false, true), (false, false)] {
                out.push(vec![(i, p), (j, q)]);
            }
        }
    }
    out
}

/// Unit and binary clauses over the state bits that hold initially and are
/// preserved by every transition, for every parameter choice and every input
/// allowed by the assumption (greatest inductive subset of the candidates).
pub fn inductive_invariants(ps: &PartialSystem, spec: &GxwSpec, seed: u64) -> Result<Vec<StateClause>, SdfError> {
    let enc = Encoder::new(ps, spec)?;
    let init = enc.sim.initial_state();
    let n = init.len();
    let mut alive: Vec<StateClause> = candidates(n)
        .into_iter()
        .filter(|c| clause_holds(c, &init))
        .collect();
    // Cheap pruning with random runs under random parameters.
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nin = enc.sim.inputs().len();
    let nres = enc.sim.res_ids().len();
    let names = enc.sim.inputs().to_vec();
    for _ in 0..64 {
        let params: Vec<bool> = (0..nres).map(|_| rng.gen()).collect();
        let mut s = init.clone();
        for _ in 0..64 {
            let x = loop {
                let x: Vec<bool> = (0..nin).map(|_| rng.gen()).collect();
                let ok = formula_lit(&mut Concrete, &spec.assumption, &mut |v, _| {
                    x[names.iter().position(|n| n == v).expect("input")]
                });
                if ok {
                    break x;
                }
            };
            s = enc.sim.eval_frame(&mut Concrete, &x, &s, &params).next;
            alive.retain(|c| clause_holds(c, &s));
        }
    }
    // Houdini: drop every candidate some step out of the current conjunction breaks.
    loop {
        let mut c = Circuit::new();
        let (_, a) = enc.exists(&mut c);
        let x: Vec<Lit> = (0..nin).map(|_| c.fresh()).collect();
        let s: Vec<Lit> = (0..n).map(|_| c.fresh()).collect();
        let r = enc.assumption(&mut c, &x);
        let fr = enc.sim.eval_frame(&mut c, &x, &s, &a);
        let mut solver = Solver::new();
        solver.ensure_vars(c.num_vars as usize);
        for cl in &c.clauses {
            solver.add_clause(cl);
        }
        solver.add_clause(&[r]);
        for cl in &alive {
            let lits: Vec<Lit> = cl.iter().map(|&(b, p)| if p { s[b] } else { -s[b] }).collect();
            solver.add_clause(&lits);
        }
        // Some candidate fails in the successor state.
        let mut any = Vec::new();
        let mut next_var = c.num_vars as Lit;
        for cl in &alive {
            next_var += 1;
            let e = next_var;
            for &(b, p) in cl {
                let l = fr.next[b];
                let l = if p { l } else { -l };
                solver.add_clause(&[-e, -l]);
            }
            any.push(e);
        }
        if any.is_empty() || !solver.add_clause(&any) || !solver.solve() {
            break;
        }
        let succ: Vec<bool> = fr.next.iter().map(|&l| solver.model_value(l)).collect();
        let before = alive.len();
        alive.retain(|cl| clause_holds(cl, &succ));
        debug_assert!(alive.len() < before);
    }
    Ok(prune_implied(alive))
}

/// Drops binary clauses subsumed by unit clauses.
fn prune_implied(cls: Vec<StateClause>) -> Vec<StateClause> {
    let units: BTreeMap<usize, bool> = cls
        .iter()
        .filter(|c| c.len() == 1)
        .map(|c| (c[0].0, c[0].1))
        .collect();
    cls.into_iter()
        .filter(|c| c.len() == 1 || !c.iter().any(|&(b, p)| units.get(&b) == Some(&p)))
        .collect()
}
