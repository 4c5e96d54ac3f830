use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{check_trace, Trace, ValidateError, Violation};
use crate::formula::GxwSpec;
use crate::sdf::{ActorSystem, SdfError, Simulator};

/// Above this many inputs the assumption is sampled by rejection.
const ENUMERATE_INPUTS: usize = 16;
const REJECTION_TRIES: usize = 1 << 20;

/// Per-cycle sampler over the input valuations allowed by the assumption.
pub struct InputSampler {
    nin: usize,
    allowed: Option<Vec<u64>>,
    spec: GxwSpec,
}

impl InputSampler {
    pub fn new(spec: &GxwSpec) -> Result<InputSampler, ValidateError> {
        let nin = spec.inputs.len();
        let allowed = if spec.has_assumption() && nin <= ENUMERATE_INPUTS {
            let ok: Vec<u64> = (0..1u64 << nin)
                .filter(|&x| admits(spec, x))
                .collect();
            if ok.is_empty() {
                return Err(ValidateError::UnsatisfiableAssumption);
            }
            Some(ok)
        } else {
            None
        };
        Ok(InputSampler {
            nin,
            allowed,
            spec: spec.clone(),
        })
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Result<Vec<bool>, ValidateError> {
        match &self.allowed {
            Some(ok) => {
                let code = *ok.choose(rng).expect("non-empty");
                Ok((0..self.nin).map(|b| code >> b & 1 == 1).collect())
            }
            None if !self.spec.has_assumption() => Ok((0..self.nin).map(|_| rng.gen()).collect()),
            None => (0..REJECTION_TRIES)
                .map(|_| (0..self.nin).map(|_| rng.gen()).collect::<Vec<bool>>())
                .find(|x| admits_vec(&self.spec, x))
                .ok_or(ValidateError::UnsatisfiableAssumption),
        }
    }
}

fn admits_vec(spec: &GxwSpec, x: &[bool]) -> bool {
    spec.assumption.eval_prop(&mut |_, v| {
        x[spec.inputs.iter().position(|n| n == v).expect("declared input")]
    })
}

/// Bit `b` of `x` is input `b` in declaration order.
fn admits(spec: &GxwSpec, x: u64) -> bool {
    spec.assumption.eval_prop(&mut |_, v| {
        let b = spec.inputs.iter().position(|n| n == v).expect("declared input");
        x >> b & 1 == 1
    })
}

/// Inputs-only trace of `length` cycles, uniform over the assumption per cycle.
pub fn random_trace(spec: &GxwSpec, length: usize, seed: u64) -> Result<Trace, ValidateError> {
    let sampler = InputSampler::new(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tr = Trace::new(spec.inputs.clone());
    for _ in 0..length {
        tr.rows.push(sampler.sample(&mut rng)?);
    }
    Ok(tr)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EquivResult {
    Ok { traces: u64, exhaustive: bool },
    Counterexample(Counterexample),
}

impl EquivResult {
    pub fn is_ok(&self) -> bool {
        matches!(self, EquivResult::Ok { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    /// Joint trace up to and including the failing cycle.
    pub trace: Trace,
    pub violations: Vec<Violation>,
    /// Simulation error (conflict or dash at an output), if that is the failure.
    pub runtime: Option<SdfError>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivOptions {
    /// Enumerate every input trace when there are at most this many.
    pub max_exhaustive: u64,
    /// Random traces otherwise.
    pub samples: u64,
    pub seed: u64,
}

impl Default for EquivOptions {
    fn default() -> Self {
        EquivOptions {
            max_exhaustive: 1 << 22,
            samples: 10_000,
            seed: 0,
        }
    }
}

/// Simulates `sys` on input traces of `depth` cycles and checks the joint
/// traces against `spec`.
pub fn equivalence_check(sys: &ActorSystem, spec: &GxwSpec, depth: usize) -> Result<EquivResult, ValidateError> {
    equivalence_check_with(sys, spec, depth, EquivOptions::default())
}

pub fn equivalence_check_with(
    sys: &ActorSystem,
    spec: &GxwSpec,
    depth: usize,
    opts: EquivOptions,
) -> Result<EquivResult, ValidateError> {
    let sim = Simulator::new(sys)?;
    let run = Runner::new(&sim, spec)?;
    let sampler = InputSampler::new(spec)?;
    let per_cycle = match &sampler.allowed {
        Some(ok) => ok.len() as u64,
        None => 1u64.checked_shl(spec.inputs.len() as u32).unwrap_or(u64::MAX),
    };
    let total = (0..depth).try_fold(1u64, |acc, _| acc.checked_mul(per_cycle));
    match total {
        Some(total) if total <= opts.max_exhaustive => {
            let choices: Vec<Vec<bool>> = match &sampler.allowed {
                Some(ok) => ok
                    .iter()
                    .map(|&c| (0..spec.inputs.len()).map(|b| c >> b & 1 == 1).collect())
                    .collect(),
                None => (0..per_cycle)
                    .map(|c| (0..spec.inputs.len()).map(|b| c >> b & 1 == 1).collect())
                    .collect(),
            };
            let mut inputs = Vec::with_capacity(depth);
            if let Some(cx) = run.exhaustive(&choices, depth, &mut inputs)? {
                return Ok(EquivResult::Counterexample(cx));
            }
            Ok(EquivResult::Ok {
                traces: total,
                exhaustive: true,
            })
        }
        _ => {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..opts.samples {
                let mut inputs = Vec::with_capacity(depth);
                for _ in 0..depth {
                    inputs.push(sampler.sample(&mut rng)?);
                }
                if let Some(cx) = run.check(&inputs)? {
                    return Ok(EquivResult::Counterexample(cx));
                }
            }
            Ok(EquivResult::Ok {
                traces: opts.samples,
                exhaustive: false,
            })
        }
    }
}

/// Simulates and checks input traces given in spec input order.
pub struct Runner<'a> {
    sim: &'a Simulator,
    spec: &'a GxwSpec,
    /// Simulator input `k` is spec input `in_map[k]`.
    in_map: Vec<usize>,
    /// Spec output `k` is simulator output `out_map[k]`.
    out_map: Vec<usize>,
}

impl<'a> Runner<'a> {
    pub fn new(sim: &'a Simulator, spec: &'a GxwSpec) -> Result<Runner<'a>, ValidateError> {
        let find = |names: &[String], v: &str| {
            names
                .iter()
                .position(|n| n == v)
                .ok_or_else(|| ValidateError::MissingColumn(v.to_string()))
        };
        let in_map = sim
            .inputs()
            .iter()
            .map(|v| find(&spec.inputs, v))
            .collect::<Result<_, _>>()?;
        let out_map = spec
            .outputs
            .iter()
            .map(|v| find(sim.outputs(), v))
            .collect::<Result<_, _>>()?;
        Ok(Runner {
            sim,
            spec,
            in_map,
            out_map,
        })
    }

    fn step(&self, s: &[bool], x: &[bool], t: usize) -> Result<(Vec<bool>, Vec<bool>), SdfError> {
        let xs: Vec<bool> = self.in_map.iter().map(|&k| x[k]).collect();
        let (y, n) = self.sim.step(s, &xs, t)?;
        Ok((self.out_map.iter().map(|&k| y[k]).collect(), n))
    }

    fn joint(&self, inputs: &[Vec<bool>], outputs: &[Vec<bool>]) -> Trace {
        let vars = self.spec.inputs.iter().chain(&self.spec.outputs).cloned().collect();
        let rows = inputs
            .iter()
            .zip(outputs)
            .map(|(x, y)| x.iter().chain(y).copied().collect())
            .collect();
        Trace { vars, rows }
    }

    /// Joint trace of the system on `inputs`, or the runtime error with the
    /// trace up to the failing cycle.
    pub fn simulate(&self, inputs: &[Vec<bool>]) -> (Trace, Option<SdfError>) {
        let mut s = self.sim.initial_state();
        let mut outs = Vec::with_capacity(inputs.len());
        for (t, x) in inputs.iter().enumerate() {
            match self.step(&s, x, t) {
                Ok((y, n)) => {
                    outs.push(y);
                    s = n;
                }
                Err(e) => {
                    outs.push(vec![false; self.spec.outputs.len()]);
                    return (self.joint(&inputs[..=t], &outs), Some(e));
                }
            }
        }
        (self.joint(inputs, &outs), None)
    }

    pub fn check(&self, inputs: &[Vec<bool>]) -> Result<Option<Counterexample>, ValidateError> {
        let (trace, err) = self.simulate(inputs);
        let violations = check_trace(self.spec, &trace)?;
        if err.is_some() || !violations.is_empty() {
            return Ok(Some(Counterexample {
                trace,
                violations,
                runtime: err,
            }));
        }
        Ok(None)
    }

    /// Depth-first over all input traces, simulating shared prefixes once.
    fn exhaustive(
        &self,
        choices: &[Vec<bool>],
        depth: usize,
        inputs: &mut Vec<Vec<bool>>,
    ) -> Result<Option<Counterexample>, ValidateError> {
        struct Frame {
            state: Vec<bool>,
            outputs: Vec<Vec<bool>>,
        }
        fn rec(
            r: &Runner,
            choices: &[Vec<bool>],
            depth: usize,
            inputs: &mut Vec<Vec<bool>>,
            f: &Frame,
        ) -> Result<Option<Counterexample>, ValidateError> {
            let t = inputs.len();
            if t == depth {
                let trace = r.joint(inputs, &f.outputs);
                let violations = check_trace(r.spec, &trace)?;
                if violations.is_empty() {
                    return Ok(None);
                }
                return Ok(Some(Counterexample {
                    trace,
                    violations,
                    runtime: None,
                }));
            }
            for x in choices {
                inputs.push(x.clone());
                let res = match r.step(&f.state, x, t) {
                    Ok((y, n)) => {
                        let mut outputs = f.outputs.clone();
                        outputs.push(y);
                        rec(r, choices, depth, inputs, &Frame { state: n, outputs })?
                    }
                    Err(e) => {
                        let mut outputs = f.outputs.clone();
                        outputs.push(vec![false; r.spec.outputs.len()]);
                        let trace = r.joint(inputs, &outputs);
                        Some(Counterexample {
                            violations: check_trace(r.spec, &trace)?,
                            trace,
                            runtime: Some(e),
                        })
                    }
                };
                inputs.pop();
                if res.is_some() {
                    return Ok(res);
                }
            }
            Ok(None)
        }
        let root = Frame {
            state: self.sim.initial_state(),
            outputs: Vec::new(),
        };
        rec(self, choices, depth, inputs, &root)
    }
}
