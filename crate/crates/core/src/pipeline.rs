//! End-to-end synthesis: parse, build, order, encode, solve, concretize, fuzz.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::formula::{compute_omega, parse_spec, GxwSpec, SpecError};
use crate::qbf::{
    apply_witness, encode_static, encode_unrolled, inductive_invariants, solve_2qbf_with, QbfProblem,
    QbfResult, Strategy, Witness,
};
use crate::sdf::{evaluation_order, ActorSystem, SdfError, Simulator};
use crate::synthesis::{build_with, BuildOptions, PartialSystem};
use crate::validate::{InputSampler, Runner, ValidateError, Violation};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Synthesized,
    Unknown,
    Unrealizable,
    RejectedCycle,
    RejectedPattern,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Synthesized => 0,
            Verdict::Unknown => 2,
            Verdict::Unrealizable => 3,
            Verdict::RejectedCycle | Verdict::RejectedPattern => 4,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Synthesized => "synthesized",
            Verdict::Unknown => "unknown",
            Verdict::Unrealizable => "unrealizable",
            Verdict::RejectedCycle => "rejected-cycle",
            Verdict::RejectedPattern => "rejected-pattern",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum UnrollMode {
    /// Unroll to Ω when every P2 release is input-only and no P5 is present.
    #[default]
    Auto,
    Depth(u32),
    Off,
}

impl std::str::FromStr for UnrollMode {
    type Err = String;

    fn from_str(s: &str) -> Result<UnrollMode, String> {
        match s {
            "auto" => Ok(UnrollMode::Auto),
            "off" => Ok(UnrollMode::Off),
            n => n
                .parse()
                .map(UnrollMode::Depth)
                .map_err(|_| format!("expected `auto`, `off` or a depth, got `{n}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Options {
    pub unroll: UnrollMode,
    /// Strengthen the static encoding with inductive state invariants.
    pub invariants: bool,
    pub strategy: Strategy,
    /// Random traces simulated after synthesis (0 disables).
    pub fuzz: u64,
    pub fuzz_length: usize,
    pub seed: u64,
    pub build: BuildOptions,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            unroll: UnrollMode::Auto,
            invariants: true,
            strategy: Strategy::Cegar,
            fuzz: 0,
            fuzz_length: 50,
            seed: 0,
            build: BuildOptions::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Timings {
    pub parse_ms: f64,
    pub build_ms: f64,
    pub encode_ms: f64,
    pub solve_ms: f64,
    pub validate_ms: f64,
}

impl Timings {
    pub fn total_ms(&self) -> f64 {
        self.parse_ms + self.build_ms + self.encode_ms + self.solve_ms + self.validate_ms
    }
}

/// One 2QBF query of the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Stage {
    /// `static`, `static+invariants` or `unrolled@N`.
    pub encoding: String,
    pub vars: u32,
    pub clauses: usize,
    pub sat: bool,
    pub refinements: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FuzzSummary {
    pub traces: u64,
    pub length: usize,
    pub failures: u64,
    pub first_failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub verdict: Verdict,
    pub exit_code: i32,
    pub message: String,
    pub omega: Option<u32>,
    pub unroll_exact: Option<bool>,
    pub timings: Timings,
    pub stages: Vec<Stage>,
    pub invariants: usize,
    pub witness: Option<Witness>,
    /// Conjunct label to the actors realizing it.
    pub provenance: BTreeMap<String, BTreeSet<String>>,
    /// Ports on the offending loop for `rejected-cycle`.
    pub cycle: Vec<String>,
    pub fuzz: Option<FuzzSummary>,
    /// Filled in by the front-end.
    pub artifacts: BTreeMap<String, String>,
}

/// Everything a run produced, for writing artifacts.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub report: RunReport,
    pub spec: Option<GxwSpec>,
    pub partial: Option<PartialSystem>,
    /// The concrete controller when synthesized.
    pub system: Option<ActorSystem>,
    /// The query that decided the verdict.
    pub problem: Option<QbfProblem>,
}

#[derive(Debug, thiserror::Error)]
pub enum PipelineError {
    #[error(transparent)]
    Parse(SpecError),
    #[error(transparent)]
    Sdf(#[from] SdfError),
    #[error(transparent)]
    Validate(#[from] ValidateError),
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

impl Outcome {
    fn new(verdict: Verdict, message: String) -> Outcome {
        Outcome {
            report: RunReport {
                verdict,
                exit_code: verdict.exit_code(),
                message,
                omega: None,
                unroll_exact: None,
                timings: Timings::default(),
                stages: Vec::new(),
                invariants: 0,
                witness: None,
                provenance: BTreeMap::new(),
                cycle: Vec::new(),
                fuzz: None,
                artifacts: BTreeMap::new(),
            },
            spec: None,
            partial: None,
            system: None,
            problem: None,
        }
    }

    fn set_verdict(&mut self, v: Verdict, message: impl Into<String>) {
        self.report.verdict = v;
        self.report.exit_code = v.exit_code();
        self.report.message = message.into();
    }
}

/// Parses `src` and synthesizes; syntax errors are the only hard failure
/// besides internal ones, everything else is a verdict.
pub fn synthesize_source(src: &str, opts: &Options) -> Result<Outcome, PipelineError> {
    let t = Instant::now();
    let spec = match parse_spec(src) {
        Ok(s) => s,
        Err(e) if e.is_pattern_rejection() => {
            let mut o = Outcome::new(Verdict::RejectedPattern, e.to_string());
            o.report.timings.parse_ms = ms(t);
            return Ok(o);
        }
        Err(e) => return Err(PipelineError::Parse(e)),
    };
    let parse_ms = ms(t);
    let mut o = synthesize(&spec, opts)?;
    o.report.timings.parse_ms = parse_ms;
    Ok(o)
}

fn solve(
    o: &mut Outcome,
    p: QbfProblem,
    encoding: String,
    strategy: Strategy,
    encode_ms: f64,
) -> QbfResult {
    o.report.timings.encode_ms += encode_ms;
    let t = Instant::now();
    let (r, stats) = solve_2qbf_with(&p, strategy);
    o.report.timings.solve_ms += ms(t);
    log::info!(
        "{encoding}: {} vars, {} clauses, {}",
        p.num_vars,
        p.num_clauses(),
        if r.is_sat() { "sat" } else { "unsat" }
    );
    o.report.stages.push(Stage {
        encoding,
        vars: p.num_vars,
        clauses: p.num_clauses(),
        sat: r.is_sat(),
        refinements: stats.refinements,
    });
    o.problem = Some(p);
    r
}

/// Build, order, encode and solve an already validated specification.
pub fn synthesize(spec: &GxwSpec, opts: &Options) -> Result<Outcome, PipelineError> {
    let mut o = Outcome::new(Verdict::Unknown, String::new());
    let omega = compute_omega(spec);
    let restricted = spec.unroll_exact();
    o.report.omega = Some(omega);
    o.report.unroll_exact = Some(restricted);
    o.spec = Some(spec.clone());

    let t = Instant::now();
    let ps = build_with(spec, &opts.build);
    o.report.provenance = ps.provenance();
    let order = evaluation_order(&ps.sys);
    o.report.timings.build_ms = ms(t);
    o.partial = Some(ps.clone());
    if let Err(SdfError::CycleError { scc }) = order {
        o.report.cycle = scc.clone();
        o.set_verdict(
            Verdict::RejectedCycle,
            format!("wiring forms a directed loop through {}", scc.join(", ")),
        );
        return Ok(o);
    }
    order?;

    let t = Instant::now();
    let p = encode_static(&ps, spec, &[])?;
    let mut result = solve(&mut o, p, "static".into(), opts.strategy, ms(t));

    if !result.is_sat() && opts.invariants {
        let t = Instant::now();
        let inv = inductive_invariants(&ps, spec, opts.seed)?;
        o.report.invariants = inv.len();
        let p = encode_static(&ps, spec, &inv)?;
        result = solve(&mut o, p, "static+invariants".into(), opts.strategy, ms(t));
    }

    let mut message = if o.report.stages.len() > 1 {
        format!(
            "static encoding with {} state invariants is satisfiable",
            o.report.invariants
        )
    } else {
        String::from("static encoding is satisfiable")
    };
    if !result.is_sat() {
        let depth = match opts.unroll {
            UnrollMode::Auto if restricted => Some(omega),
            UnrollMode::Depth(n) => Some(n),
            _ => None,
        };
        let Some(depth) = depth else {
            let why = if opts.unroll == UnrollMode::Off {
                "unrolling disabled"
            } else {
                "unrolling skipped: a P2 release reads outputs or a P5 invariant is present"
            };
            o.set_verdict(
                Verdict::Unknown,
                format!("static encoding found a possible conflict; {why}"),
            );
            return Ok(o);
        };
        let t = Instant::now();
        let p = encode_unrolled(&ps, spec, depth)?;
        result = solve(&mut o, p, format!("unrolled@{depth}"), opts.strategy, ms(t));
        match (&result, restricted) {
            (QbfResult::Unsat, true) => {
                o.set_verdict(
                    Verdict::Unrealizable,
                    format!("every parameter choice leads to a conflict within {depth} cycles"),
                );
                return Ok(o);
            }
            (QbfResult::Sat(_), true) if depth >= omega => {
                message = format!("conflict-free for {depth} >= Ω = {omega} cycles from reset");
            }
            _ => {
                o.set_verdict(
                    Verdict::Unknown,
                    format!(
                        "unrolled check at depth {depth} is {} but is not conclusive here",
                        if result.is_sat() { "sat" } else { "unsat" }
                    ),
                );
                return Ok(o);
            }
        }
    }
    let QbfResult::Sat(w) = result else {
        unreachable!("unsat results returned above")
    };
    let sys = apply_witness(&ps, &w).expect("witness names every resolution actor");
    o.report.witness = Some(w);
    o.system = Some(sys.clone());
    o.set_verdict(Verdict::Synthesized, message);

    if opts.fuzz > 0 {
        let t = Instant::now();
        let summary = fuzz(&sys, spec, opts.fuzz, opts.fuzz_length, opts.seed)?;
        o.report.timings.validate_ms = ms(t);
        if summary.failures > 0 {
            let first = summary.first_failure.clone().unwrap_or_default();
            o.set_verdict(
                Verdict::Unknown,
                format!("fuzzing found {} failing traces: {first}", summary.failures),
            );
        }
        o.report.fuzz = Some(summary);
    }
    Ok(o)
}

fn describe(v: &[Violation], e: &Option<SdfError>) -> String {
    if let Some(e) = e {
        return e.to_string();
    }
    v.iter()
        .map(|v| format!("{}@{}: {}", v.label, v.cycle, v.reason))
        .collect::<Vec<_>>()
        .join("; ")
}

/// Simulates `traces` random assumption-respecting input traces and checks them.
pub fn fuzz(
    sys: &ActorSystem,
    spec: &GxwSpec,
    traces: u64,
    length: usize,
    seed: u64,
) -> Result<FuzzSummary, PipelineError> {
    let sim = Simulator::new(sys)?;
    let runner = Runner::new(&sim, spec)?;
    let sampler = InputSampler::new(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first_failure = None;
    for _ in 0..traces {
        let inputs = (0..length)
            .map(|_| sampler.sample(&mut rng))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(cx) = runner.check(&inputs)? {
            failures += 1;
            first_failure.get_or_insert_with(|| describe(&cx.violations, &cx.runtime));
        }
    }
    Ok(FuzzSummary {
        traces,
        length,
        failures,
        first_failure,
    })
}
