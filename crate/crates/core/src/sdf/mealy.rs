use std::collections::{HashMap, VecDeque};
use std::fmt;

use super::system::{PortValue, SdfError};

/// Value of a state variable; `U` is the "not yet observed" value of 3-valued ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tri {
    F,
    T,
    U,
}

impl Tri {
    pub fn symbol(self) -> char {
        match self {
            Tri::F => '0',
            Tri::T => '1',
            Tri::U => 'u',
        }
    }

    pub fn from_symbol(c: char) -> Option<Tri> {
        Some(match c {
            '0' => Tri::F,
            '1' => Tri::T,
            'u' => Tri::U,
            _ => return None,
        })
    }
}

impl fmt::Display for Tri {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StateVar {
    pub name: String,
    pub three_valued: bool,
}

impl StateVar {
    pub fn two(name: impl Into<String>) -> StateVar {
        StateVar {
            name: name.into(),
            three_valued: false,
        }
    }

    pub fn three(name: impl Into<String>) -> StateVar {
        StateVar {
            name: name.into(),
            three_valued: true,
        }
    }

    pub fn bits(&self) -> usize {
        if self.three_valued {
            2
        } else {
            1
        }
    }
}

/// Decodes packed state bits; a 3-valued variable uses `(defined, value)`.
pub fn bits_to_tri(vars: &[StateVar], bits: &[bool]) -> Vec<Tri> {
    let mut out = Vec::with_capacity(vars.len());
    let mut k = 0;
    for v in vars {
        if v.three_valued {
            out.push(match (bits[k], bits[k + 1]) {
                (false, _) => Tri::U,
                (true, b) => {
                    if b {
                        Tri::T
                    } else {
                        Tri::F
                    }
                }
            });
            k += 2;
        } else {
            out.push(if bits[k] { Tri::T } else { Tri::F });
            k += 1;
        }
    }
    out
}

pub fn tri_to_bits(vars: &[StateVar], tri: &[Tri]) -> Vec<bool> {
    let mut out = Vec::new();
    for (v, t) in vars.iter().zip(tri) {
        if v.three_valued {
            out.push(*t != Tri::U);
            out.push(*t == Tri::T);
        } else {
            out.push(*t == Tri::T);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub state: Vec<Tri>,
    pub input: Vec<bool>,
    pub output: Vec<PortValue>,
    pub next: Vec<Tri>,
}

/// Explicit deterministic Mealy machine over Boolean inputs; transitions are
/// listed for reachable states only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MealyMachine {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub vars: Vec<StateVar>,
    pub init: Vec<Tri>,
    pub transitions: Vec<Transition>,
}

/// Per-state transition lookup built from a machine.
pub struct MealyIndex<'a> {
    machine: &'a MealyMachine,
    map: HashMap<(&'a [Tri], &'a [bool]), usize>,
}

impl<'a> MealyIndex<'a> {
    pub fn new(machine: &'a MealyMachine) -> MealyIndex<'a> {
        let map = machine
            .transitions
            .iter()
            .enumerate()
            .map(|(i, t)| ((t.state.as_slice(), t.input.as_slice()), i))
            .collect();
        MealyIndex { machine, map }
    }

    pub fn step(&self, state: &[Tri], input: &[bool]) -> Option<&'a Transition> {
        self.map
            .get(&(state, input))
            .map(|&i| &self.machine.transitions[i])
    }
}

impl MealyMachine {
    /// Enumerates the reachable part of a machine given by a bit-level step function.
    pub fn explore(
        inputs: Vec<String>,
        outputs: Vec<String>,
        vars: Vec<StateVar>,
        init_bits: Vec<bool>,
        state_limit: usize,
        mut step: impl FnMut(&[bool], &[bool]) -> Result<(Vec<PortValue>, Vec<bool>), SdfError>,
    ) -> Result<MealyMachine, SdfError> {
        let n_in = inputs.len();
        if n_in > 20 {
            return Err(SdfError::StateExplosion(state_limit));
        }
        let mut seen: HashMap<Vec<bool>, ()> = HashMap::new();
        let mut queue = VecDeque::new();
        seen.insert(init_bits.clone(), ());
        queue.push_back(init_bits.clone());
        let mut transitions = Vec::new();
        while let Some(s) = queue.pop_front() {
            for code in 0u64..(1u64 << n_in) {
                let input: Vec<bool> = (0..n_in).map(|k| code >> (n_in - 1 - k) & 1 == 1).collect();
                let (output, next) = step(&s, &input)?;
                if !seen.contains_key(&next) {
                    if seen.len() >= state_limit {
                        return Err(SdfError::StateExplosion(state_limit));
                    }
                    seen.insert(next.clone(), ());
                    queue.push_back(next.clone());
                }
                transitions.push(Transition {
                    state: bits_to_tri(&vars, &s),
                    input,
                    output,
                    next: bits_to_tri(&vars, &next),
                });
            }
        }
        let init = bits_to_tri(&vars, &init_bits);
        Ok(MealyMachine {
            inputs,
            outputs,
            vars,
            init,
            transitions,
        })
    }

    pub fn num_states(&self) -> usize {
        let mut s: Vec<&Vec<Tri>> = self.transitions.iter().map(|t| &t.state).collect();
        s.sort();
        s.dedup();
        s.len().max(1)
    }

    /// Runs the machine from its initial state; `None` if a transition is missing.
    pub fn run(&self, inputs: &[Vec<bool>]) -> Option<Vec<Vec<PortValue>>> {
        let idx = MealyIndex::new(self);
        let mut state = self.init.clone();
        let mut out = Vec::with_capacity(inputs.len());
        for x in inputs {
            let t = idx.step(&state, x)?;
            out.push(t.output.clone());
            state = t.next.clone();
        }
        Some(out)
    }
}
