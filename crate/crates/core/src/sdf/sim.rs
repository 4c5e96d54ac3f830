use std::collections::BTreeMap;

use super::mealy::{MealyMachine, StateVar};
use super::order::{evaluation_order_with, port_graph, Step, TieBreak};
use super::system::{ActorKind, ActorSystem, Endpoint, PortValue, SdfError};
use crate::blocks::step_concrete;
use crate::logic::{Logic, Sig};

#[derive(Debug, Clone)]
enum Op {
    Copy { from: usize, to: usize, wire: usize },
    Fire { actor: usize },
}

/// Per-cycle firing counts, for checking that each actor fires and each wire
/// transfers exactly once.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FireCounts {
    pub actors: Vec<usize>,
    pub wires: Vec<usize>,
}

/// A system compiled against a fixed evaluation ordering: every port is a slot,
/// and one cycle is a single pass over Ξ.
#[derive(Debug, Clone)]
pub struct Simulator {
    ids: Vec<String>,
    kinds: Vec<ActorKind>,
    ins: Vec<Vec<usize>>,
    outs: Vec<Vec<usize>>,
    state_at: Vec<usize>,
    state_len: Vec<usize>,
    state_bits: usize,
    ext_in: Vec<usize>,
    ext_out: Vec<usize>,
    output_names: Vec<String>,
    input_names: Vec<String>,
    ops: Vec<Op>,
    n_slots: usize,
    n_wires: usize,
    res_actors: Vec<usize>,
}

/// One symbolic (or concrete) cycle of a compiled system.
#[derive(Debug, Clone)]
pub struct Frame<B> {
    pub outputs: Vec<Sig<B>>,
    pub next: Vec<B>,
    /// Conflict flag per resolution actor, in actor order.
    pub conflicts: Vec<B>,
}

impl Simulator {
    pub fn new(sys: &ActorSystem) -> Result<Simulator, SdfError> {
        Simulator::with_order(sys, TieBreak::Forward)
    }

    pub fn with_order(sys: &ActorSystem, tie: TieBreak) -> Result<Simulator, SdfError> {
        for a in &sys.actors {
            if let ActorKind::Res { a: None, .. } = a.kind {
                return Err(SdfError::UnsetParameter(a.id.clone()));
            }
        }
        Simulator::compile(sys, tie)
    }

    /// Compiles without requiring resolution parameters; only [`Simulator::eval_frame`]
    /// with explicit parameters may then be used on systems with open ones.
    pub fn compile(sys: &ActorSystem, tie: TieBreak) -> Result<Simulator, SdfError> {
        let order = evaluation_order_with(sys, tie)?;
        let g = port_graph(sys)?;
        let slot = |e: &Endpoint| g.index[e];
        let ins = sys
            .actors
            .iter()
            .map(|a| {
                a.kind
                    .input_ports()
                    .iter()
                    .map(|p| slot(&Endpoint::port(&a.id, p)))
                    .collect()
            })
            .collect();
        let outs = sys
            .actors
            .iter()
            .map(|a| {
                a.kind
                    .output_ports()
                    .iter()
                    .map(|p| slot(&Endpoint::port(&a.id, p)))
                    .collect()
            })
            .collect();
        let mut state_at = Vec::new();
        let mut state_len = Vec::new();
        let mut bits = 0;
        for a in &sys.actors {
            state_at.push(bits);
            state_len.push(a.kind.state_bits());
            bits += a.kind.state_bits();
        }
        let ops = order
            .iter()
            .map(|s| match *s {
                Step::Wire(w) => Op::Copy {
                    from: slot(&sys.wires[w].from),
                    to: slot(&sys.wires[w].to),
                    wire: w,
                },
                Step::Actor(a) => Op::Fire { actor: a },
            })
            .collect();
        Ok(Simulator {
            ids: sys.actors.iter().map(|a| a.id.clone()).collect(),
            kinds: sys.actors.iter().map(|a| a.kind.clone()).collect(),
            ins,
            outs,
            state_at,
            state_len,
            state_bits: bits,
            ext_in: sys.inputs.iter().map(|v| slot(&Endpoint::ext(v))).collect(),
            ext_out: sys.outputs.iter().map(|v| slot(&Endpoint::ext(v))).collect(),
            output_names: sys.outputs.clone(),
            input_names: sys.inputs.clone(),
            ops,
            n_slots: g.names.len(),
            n_wires: sys.wires.len(),
            res_actors: sys
                .actors
                .iter()
                .enumerate()
                .filter(|(_, a)| matches!(a.kind, ActorKind::Res { .. }))
                .map(|(k, _)| k)
                .collect(),
        })
    }

    pub fn initial_state(&self) -> Vec<bool> {
        let mut s = Vec::with_capacity(self.state_bits);
        for k in &self.kinds {
            s.extend(k.init_bits());
        }
        s
    }

    /// Names of the packed state bits, `actor.var` (3-valued variables as one entry).
    pub fn state_vars(&self) -> Vec<StateVar> {
        let mut v = Vec::new();
        for (id, k) in self.ids.iter().zip(&self.kinds) {
            for s in k.state_vars() {
                v.push(StateVar {
                    name: format!("{id}.{}", s.name),
                    three_valued: s.three_valued,
                });
            }
        }
        v
    }

    pub fn inputs(&self) -> &[String] {
        &self.input_names
    }

    pub fn outputs(&self) -> &[String] {
        &self.output_names
    }

    /// One cycle. `cycle` only labels errors.
    pub fn step(
        &self,
        state: &[bool],
        inputs: &[bool],
        cycle: usize,
    ) -> Result<(Vec<bool>, Vec<bool>), SdfError> {
        self.step_inner(state, inputs, cycle, None)
    }

    pub fn step_counted(
        &self,
        state: &[bool],
        inputs: &[bool],
        counts: &mut FireCounts,
    ) -> Result<(Vec<bool>, Vec<bool>), SdfError> {
        self.step_inner(state, inputs, 0, Some(counts))
    }

    pub fn step_map(
        &self,
        state: &[bool],
        inputs: &BTreeMap<String, bool>,
        cycle: usize,
    ) -> Result<(BTreeMap<String, bool>, Vec<bool>), SdfError> {
        let x: Vec<bool> = self
            .input_names
            .iter()
            .map(|n| {
                inputs
                    .get(n)
                    .copied()
                    .ok_or_else(|| SdfError::MissingInput(n.clone()))
            })
            .collect::<Result<_, _>>()?;
        let (y, s) = self.step(state, &x, cycle)?;
        Ok((self.output_names.iter().cloned().zip(y).collect(), s))
    }

    fn step_inner(
        &self,
        state: &[bool],
        inputs: &[bool],
        cycle: usize,
        mut counts: Option<&mut FireCounts>,
    ) -> Result<(Vec<bool>, Vec<bool>), SdfError> {
        if inputs.len() != self.ext_in.len() {
            return Err(SdfError::InputArity {
                expected: self.ext_in.len(),
                got: inputs.len(),
            });
        }
        if let Some(c) = counts.as_deref_mut() {
            c.actors = vec![0; self.kinds.len()];
            c.wires = vec![0; self.n_wires];
        }
        let mut slots = vec![PortValue::Undefined; self.n_slots];
        for (&s, &v) in self.ext_in.iter().zip(inputs) {
            slots[s] = PortValue::from_bool(v);
        }
        let mut next = state.to_vec();
        let mut ins = Vec::new();
        for op in &self.ops {
            match *op {
                Op::Copy { from, to, wire } => {
                    debug_assert_ne!(slots[from], PortValue::Undefined);
                    slots[to] = slots[from];
                    if let Some(c) = counts.as_deref_mut() {
                        c.wires[wire] += 1;
                    }
                }
                Op::Fire { actor } => {
                    ins.clear();
                    ins.extend(self.ins[actor].iter().map(|&s| slots[s]));
                    debug_assert!(ins.iter().all(|v| *v != PortValue::Undefined));
                    let kind = &self.kinds[actor];
                    let at = self.state_at[actor];
                    let nb = self.state_len[actor];
                    let (out, ns, conflict) = step_concrete(kind, &ins, &state[at..at + nb]);
                    if conflict {
                        return Err(SdfError::ConflictAtRuntime {
                            actor: self.ids[actor].clone(),
                            cycle,
                        });
                    }
                    next[at..at + nb].copy_from_slice(&ns);
                    for (&s, v) in self.outs[actor].iter().zip(out) {
                        slots[s] = v;
                    }
                    if let Some(c) = counts.as_deref_mut() {
                        c.actors[actor] += 1;
                    }
                }
            }
        }
        let mut y = Vec::with_capacity(self.ext_out.len());
        for (k, &s) in self.ext_out.iter().enumerate() {
            match slots[s] {
                PortValue::True => y.push(true),
                PortValue::False => y.push(false),
                _ => {
                    return Err(SdfError::DashAtExternalOutput {
                        port: self.output_names[k].clone(),
                        cycle,
                    })
                }
            }
        }
        Ok((y, next))
    }

    /// Ids of the resolution actors, in actor order.
    pub fn res_ids(&self) -> Vec<&str> {
        self.res_actors.iter().map(|&k| self.ids[k].as_str()).collect()
    }

    pub fn state_len(&self) -> usize {
        self.state_bits
    }

    /// Evaluates one cycle over any carrier. `params` gives the parameter of every
    /// resolution actor (in actor order); if empty, the fixed parameters are used.
    /// Conflicts are reported, not raised.
    pub fn eval_frame<L: Logic>(
        &self,
        l: &mut L,
        inputs: &[L::B],
        state: &[L::B],
        params: &[L::B],
    ) -> Frame<L::B> {
        let mut slots: Vec<Option<Sig<L::B>>> = vec![None; self.n_slots];
        for (&s, &v) in self.ext_in.iter().zip(inputs) {
            slots[s] = Some(Sig::boolean(l, v));
        }
        let mut next = state.to_vec();
        let mut conflicts = Vec::with_capacity(self.res_actors.len());
        let mut res_k = 0;
        let mut ins = Vec::new();
        for op in &self.ops {
            match *op {
                Op::Copy { from, to, .. } => slots[to] = slots[from],
                Op::Fire { actor } => {
                    ins.clear();
                    ins.extend(self.ins[actor].iter().map(|&s| slots[s].expect("scheduled input")));
                    let kind = &self.kinds[actor];
                    let at = self.state_at[actor];
                    let nb = self.state_len[actor];
                    let a = if matches!(kind, ActorKind::Res { .. }) && !params.is_empty() {
                        let k = self.res_actors.iter().position(|&r| r == actor).expect("res");
                        Some(params[k])
                    } else {
                        None
                    };
                    let e = kind.eval(l, &ins, &state[at..at + nb], a);
                    if matches!(kind, ActorKind::Res { .. }) {
                        conflicts.push((actor, e.conflict));
                        res_k += 1;
                    }
                    next[at..at + nb].copy_from_slice(&e.next);
                    for (&s, v) in self.outs[actor].iter().zip(e.outputs) {
                        slots[s] = Some(v);
                    }
                }
            }
        }
        debug_assert_eq!(res_k, self.res_actors.len());
        conflicts.sort_by_key(|&(a, _)| a);
        Frame {
            outputs: self.ext_out.iter().map(|&s| slots[s].expect("output driven")).collect(),
            next,
            conflicts: conflicts.into_iter().map(|(_, c)| c).collect(),
        }
    }

    pub fn run(&self, trace: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, SdfError> {
        let mut s = self.initial_state();
        let mut out = Vec::with_capacity(trace.len());
        for (t, x) in trace.iter().enumerate() {
            let (y, n) = self.step(&s, x, t)?;
            out.push(y);
            s = n;
        }
        Ok(out)
    }
}

/// One cycle of `sys` from `state`; inputs keyed by external port name.
pub fn step(
    sys: &ActorSystem,
    state: &[bool],
    inputs: &BTreeMap<String, bool>,
) -> Result<(BTreeMap<String, bool>, Vec<bool>), SdfError> {
    Simulator::new(sys)?.step_map(state, inputs, 0)
}

/// Runs `sys` from its initial state over a trace of external input rows.
pub fn run(sys: &ActorSystem, trace: &[Vec<bool>]) -> Result<Vec<Vec<bool>>, SdfError> {
    Simulator::new(sys)?.run(trace)
}

/// Explicit product machine of an acyclic, fully parameterized system.
pub fn compose_to_mealy(sys: &ActorSystem) -> Result<MealyMachine, SdfError> {
    const LIMIT: usize = 1 << 20;
    let sim = Simulator::new(sys)?;
    MealyMachine::explore(
        sys.inputs.clone(),
        sys.outputs.clone(),
        sim.state_vars(),
        sim.initial_state(),
        LIMIT,
        |s, x| {
            let (y, n) = sim.step(s, x, 0)?;
            Ok((y.into_iter().map(PortValue::from_bool).collect(), n))
        },
    )
}
