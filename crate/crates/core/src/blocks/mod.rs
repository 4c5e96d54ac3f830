//! The actor library. Every actor's cycle behavior is written once over a generic
//! [`Logic`] carrier; concrete simulation, explicit Mealy tables and the clause
//! encoding all evaluate the same code.

use crate::formula::{pad_clause, DnfClause, FormulaError};
use crate::logic::{Concrete, Logic, Sig};
use crate::sdf::{ActorKind, MealyMachine, PortValue, SdfError, StateVar};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BlockError {
    #[error("Θ_h needs h >= 1, got {0}")]
    InvalidH(i64),
    #[error("resolution actor needs at least one input")]
    EmptyRes,
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Sdf(#[from] SdfError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HighLevelKind {
    InUB,
    TrUB,
    IfTB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GateKind {
    Not,
    Or(usize),
    And(usize),
}

/// One evaluated cycle of an actor.
#[derive(Debug, Clone)]
pub struct Eval<B> {
    pub outputs: Vec<Sig<B>>,
    pub next: Vec<B>,
    /// Set when a resolution actor sees true and false together.
    pub conflict: B,
}

pub fn make_highlevel(kind: HighLevelKind) -> ActorKind {
    match kind {
        HighLevelKind::InUB => ActorKind::InUB,
        HighLevelKind::TrUB => ActorKind::TrUB,
        HighLevelKind::IfTB => ActorKind::IfTB,
    }
}

pub fn make_res(n: usize) -> Result<ActorKind, BlockError> {
    if n == 0 {
        return Err(BlockError::EmptyRes);
    }
    Ok(ActorKind::Res { n, a: None })
}

pub fn make_gate(kind: GateKind) -> ActorKind {
    match kind {
        GateKind::Not => ActorKind::Not,
        GateKind::Or(n) => ActorKind::Or { n },
        GateKind::And(n) => ActorKind::And { n },
    }
}

fn indexed(n: usize) -> Vec<String> {
    (0..n).map(|k| format!("in{k}")).collect()
}

/// Bits needed to count down from `h - 1`.
fn counter_bits(h: u32) -> usize {
    (32 - h.leading_zeros()) as usize
}

fn history_vars(clause: &DnfClause) -> Vec<StateVar> {
    let i = clause.depth;
    let vars = clause.vars();
    if vars.is_empty() {
        return (1..=i).map(|d| StateVar::two(format!("w@-{d}"))).collect();
    }
    let mut out = Vec::new();
    for v in &vars {
        for d in 1..=i {
            out.push(StateVar::three(format!("{v}@-{d}")));
        }
    }
    out
}

impl ActorKind {
    pub fn input_ports(&self) -> Vec<String> {
        match self {
            ActorKind::Not => vec!["in".into()],
            ActorKind::Or { n } | ActorKind::And { n } | ActorKind::Res { n, .. } => indexed(*n),
            ActorKind::Const { .. } => vec![],
            ActorKind::IfTB | ActorKind::InUB => vec!["input".into()],
            ActorKind::TrUB => vec!["input".into(), "release".into()],
            ActorKind::Monitor { clause } | ActorKind::P4Monitor { clause } => clause.vars(),
            ActorKind::Theta { .. } => vec!["set".into(), "in".into()],
        }
    }

    pub fn output_ports(&self) -> Vec<String> {
        match self {
            ActorKind::IfTB | ActorKind::InUB | ActorKind::TrUB => vec!["output".into()],
            _ => vec!["out".into()],
        }
    }

    pub fn state_vars(&self) -> Vec<StateVar> {
        match self {
            ActorKind::InUB | ActorKind::TrUB => vec![StateVar::two("lock")],
            ActorKind::Monitor { clause } | ActorKind::P4Monitor { clause } => {
                history_vars(clause)
            }
            ActorKind::Theta { h } => {
                let mut v = vec![StateVar::two("started")];
                v.extend((0..counter_bits(*h)).map(|b| StateVar::two(format!("cnt{b}"))));
                v
            }
            _ => vec![],
        }
    }

    pub fn state_bits(&self) -> usize {
        self.state_vars().iter().map(StateVar::bits).sum()
    }

    /// Packed initial state; 3-valued history starts at `u`.
    pub fn init_bits(&self) -> Vec<bool> {
        match self {
            ActorKind::InUB => vec![true],
            _ => vec![false; self.state_bits()],
        }
    }

    pub fn has_state(&self) -> bool {
        self.state_bits() > 0
    }

    /// Evaluates one cycle. `a` supplies the resolution parameter when the kind
    /// does not fix it; machine inputs read a dash as false.
    pub fn eval<L: Logic>(
        &self,
        l: &mut L,
        inputs: &[Sig<L::B>],
        state: &[L::B],
        a: Option<L::B>,
    ) -> Eval<L::B> {
        let f = l.constant(false);
        let plain = |outputs: Vec<Sig<L::B>>| Eval {
            outputs,
            next: vec![],
            conflict: f,
        };
        match self {
            ActorKind::Not => {
                let s = inputs[0];
                let nd = l.not(s.dash);
                let nv = l.not(s.val);
                let val = l.and(nd, nv);
                plain(vec![Sig { dash: s.dash, val }])
            }
            ActorKind::Or { .. } => {
                let t: Vec<_> = inputs.iter().map(|s| s.is_true(l)).collect();
                let fs: Vec<_> = inputs.iter().map(|s| s.is_false(l)).collect();
                let any_t = l.or_all(&t);
                let all_f = l.and_all(&fs);
                let known = l.or(any_t, all_f);
                let dash = l.not(known);
                plain(vec![Sig { dash, val: any_t }])
            }
            ActorKind::And { .. } => {
                let t: Vec<_> = inputs.iter().map(|s| s.is_true(l)).collect();
                let fs: Vec<_> = inputs.iter().map(|s| s.is_false(l)).collect();
                let all_t = l.and_all(&t);
                let any_f = l.or_all(&fs);
                let known = l.or(all_t, any_f);
                let dash = l.not(known);
                plain(vec![Sig { dash, val: all_t }])
            }
            ActorKind::Res { a: fixed, .. } => {
                let a = match (a, fixed) {
                    (Some(a), _) => a,
                    (None, Some(v)) => l.constant(*v),
                    (None, None) => panic!("resolution parameter not set"),
                };
                let t: Vec<_> = inputs.iter().map(|s| s.is_true(l)).collect();
                let fs: Vec<_> = inputs.iter().map(|s| s.is_false(l)).collect();
                let any_t = l.or_all(&t);
                let any_f = l.or_all(&fs);
                let nf = l.not(any_f);
                let dflt = l.and(nf, a);
                let val = l.or(any_t, dflt);
                let conflict = l.and(any_t, any_f);
                let dash = l.constant(false);
                Eval {
                    outputs: vec![Sig { dash, val }],
                    next: vec![],
                    conflict,
                }
            }
            ActorKind::Const { value } => {
                let v = l.constant(*value);
                plain(vec![Sig::boolean(l, v)])
            }
            ActorKind::IfTB => {
                let out = Sig::true_or_dash(l, inputs[0].val);
                plain(vec![out])
            }
            ActorKind::InUB => {
                let lock = state[0];
                let nx = l.not(inputs[0].val);
                let keep = l.and(lock, nx);
                Eval {
                    outputs: vec![Sig::true_or_dash(l, keep)],
                    next: vec![keep],
                    conflict: f,
                }
            }
            ActorKind::TrUB => {
                let x = inputs[0].val;
                let nrel = l.not(inputs[1].val);
                let held = l.or(x, state[0]);
                let t = l.and(nrel, held);
                Eval {
                    outputs: vec![Sig::true_or_dash(l, t)],
                    next: vec![t],
                    conflict: f,
                }
            }
            ActorKind::Monitor { clause } => {
                let (valid, conj, next) = monitor_eval(l, clause, inputs, state);
                let out = l.and(valid, conj);
                Eval {
                    outputs: vec![Sig::boolean(l, out)],
                    next,
                    conflict: f,
                }
            }
            ActorKind::P4Monitor { clause } => {
                let (valid, conj, next) = monitor_eval(l, clause, inputs, state);
                let val = l.and(valid, conj);
                let dash = l.not(valid);
                Eval {
                    outputs: vec![Sig { dash, val }],
                    next,
                    conflict: f,
                }
            }
            ActorKind::Theta { h } => theta_eval(l, *h, inputs[0].val, inputs[1].val, state),
        }
    }
}

/// Algorithm-1 monitor core: `(valid, clause holds on the window, next state)`.
fn monitor_eval<L: Logic>(
    l: &mut L,
    clause: &DnfClause,
    inputs: &[Sig<L::B>],
    state: &[L::B],
) -> (L::B, L::B, Vec<L::B>) {
    let i = clause.depth as usize;
    let vars = clause.vars();
    let t = l.constant(true);
    if vars.is_empty() {
        let valid = if i == 0 { t } else { state[i - 1] };
        let mut next = vec![t];
        next.extend_from_slice(&state[..i.saturating_sub(1)]);
        next.truncate(i);
        return (valid, t, next);
    }
    // History of variable `k` at distance `d`: bits (def, val) at 2*(k*i + d-1).
    let slot = |k: usize, d: usize| 2 * (k * i + d - 1);
    let mut terms = Vec::with_capacity(clause.lits.len());
    for lit in &clause.lits {
        let k = vars.binary_search(&lit.var).expect("literal variable in clause vars");
        let d = i - lit.depth as usize;
        let (def, val) = if d == 0 {
            (t, inputs[k].val)
        } else {
            (state[slot(k, d)], state[slot(k, d) + 1])
        };
        let matches = if lit.positive { val } else { l.not(val) };
        terms.push(l.and(def, matches));
    }
    let conj = l.and_all(&terms);
    let valid = if i == 0 { t } else { state[slot(0, i)] };
    let mut next = Vec::with_capacity(state.len());
    for k in 0..vars.len() {
        if i == 0 {
            break;
        }
        next.push(t);
        next.push(inputs[k].val);
        for d in 1..i {
            let s = slot(k, d);
            next.push(state[s]);
            next.push(state[s + 1]);
        }
    }
    (valid, conj, next)
}

fn theta_eval<L: Logic>(l: &mut L, h: u32, set: L::B, x: L::B, state: &[L::B]) -> Eval<L::B> {
    let started = state[0];
    let cnt = &state[1..];
    let nz: Vec<_> = cnt.iter().map(|&c| l.not(c)).collect();
    let zero = l.and_all(&nz);
    let nset = l.not(set);
    let live = l.and_all(&[nset, started, zero, x]);
    let started2 = l.or(set, started);
    // Decrement with borrow; held at zero once reached.
    let mut borrow = l.constant(true);
    let mut next = vec![started2];
    for (b, &c) in cnt.iter().enumerate() {
        let dec = l.xor(c, borrow);
        let nc = l.not(c);
        borrow = l.and(nc, borrow);
        let f = l.constant(false);
        let counted = l.ite(zero, f, dec);
        let load = l.constant((h - 1) >> b & 1 == 1);
        next.push(l.ite(set, load, counted));
    }
    let f = l.constant(false);
    Eval {
        outputs: vec![Sig::boolean(l, live)],
        next,
        conflict: f,
    }
}

/// Concrete cycle of a kind on packed bits.
pub fn step_concrete(
    kind: &ActorKind,
    inputs: &[PortValue],
    state: &[bool],
) -> (Vec<PortValue>, Vec<bool>, bool) {
    let mut l = Concrete;
    let sigs: Vec<Sig<bool>> = inputs.iter().map(|&v| port_to_sig(v)).collect();
    let e = kind.eval(&mut l, &sigs, state, None);
    (e.outputs.into_iter().map(sig_to_port).collect(), e.next, e.conflict)
}

pub fn port_to_sig(v: PortValue) -> Sig<bool> {
    match v {
        PortValue::True => Sig {
            dash: false,
            val: true,
        },
        PortValue::Dash => Sig {
            dash: true,
            val: false,
        },
        _ => Sig {
            dash: false,
            val: false,
        },
    }
}

pub fn sig_to_port(s: Sig<bool>) -> PortValue {
    if s.dash {
        PortValue::Dash
    } else {
        PortValue::from_bool(s.val)
    }
}

/// Explicit table of a stateful (or stateless, boolean-input) kind, reachable part only.
/// A P4 monitor's table has the two Boolean outputs `out` and `dc`.
pub fn machine_of(kind: &ActorKind) -> Result<MealyMachine, BlockError> {
    let p4 = matches!(kind, ActorKind::P4Monitor { .. });
    let outputs = if p4 {
        vec!["out".to_string(), "dc".to_string()]
    } else {
        kind.output_ports()
    };
    let k = kind.clone();
    let m = MealyMachine::explore(
        kind.input_ports(),
        outputs,
        kind.state_vars(),
        kind.init_bits(),
        1 << 20,
        |s, x| {
            let ins: Vec<PortValue> = x.iter().map(|&b| PortValue::from_bool(b)).collect();
            let (out, next, _) = step_concrete(&k, &ins, s);
            let out = if p4 {
                vec![
                    PortValue::from_bool(out[0] == PortValue::True),
                    PortValue::from_bool(out[0] == PortValue::Dash),
                ]
            } else {
                out
            };
            Ok((out, next))
        },
    )?;
    Ok(m)
}

/// Algorithm-1 monitor for `c` padded to depth `i`.
pub fn syn_monitor(c: &DnfClause, i: u32) -> Result<MealyMachine, BlockError> {
    machine_of(&ActorKind::Monitor {
        clause: pad_clause(c, i)?,
    })
}

pub fn syn_p4_monitor(c: &DnfClause, i: u32) -> Result<MealyMachine, BlockError> {
    machine_of(&ActorKind::P4Monitor {
        clause: pad_clause(c, i)?,
    })
}

pub fn theta_kind(h: i64) -> Result<ActorKind, BlockError> {
    if h <= 0 || h > u32::MAX as i64 {
        return Err(BlockError::InvalidH(h));
    }
    Ok(ActorKind::Theta { h: h as u32 })
}

pub fn make_theta(h: i64) -> Result<MealyMachine, BlockError> {
    machine_of(&theta_kind(h)?)
}
