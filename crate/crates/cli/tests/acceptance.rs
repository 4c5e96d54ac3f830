//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use gxw_core::formula::{compute_omega, parse_spec, GxwSpec};
use gxw_core::pipeline::{synthesize, Options, Verdict};
use gxw_core::qbf::{
    encode_static, encode_unrolled, export_qdimacs, inductive_invariants, solve_2qbf_with, QbfProblem, Strategy,
};
use gxw_core::sdf::{evaluation_order, import_json, ActorKind};
use gxw_core::synthesis::build;
use gxw_core::validate::{brute_force_realizability, equivalence_check, gen, EquivResult, InputSampler, Runner};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn load(name: &str) -> GxwSpec {
    parse_spec(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn gxw(args: &[&str]) -> (Option<i32>, String, Duration) {
    let t = Instant::now();
    let o = Command::new(env!("CARGO_BIN_EXE_gxw")).args(args).output().unwrap();
    (o.status.code(), String::from_utf8_lossy(&o.stdout).into_owned(), t.elapsed())
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

const FIXTURES: [&str; 9] = [
    "door.gxw",
    "door_no_s6.gxw",
    "eq3.gxw",
    "assume.gxw",
    "p4.gxw",
    "single_p3.gxw",
    "conflict_p2.gxw",
    "conflict_p3.gxw",
    "fig8.gxw",
];

fn door_end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (code, out, elapsed) = gxw(&["synth", fixture("door.gxw").to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    ensure(code == Some(0), format!("exit {code:?}"))?;
    ensure(out.contains("A(out0) = false"), "witness lacks A(out0)=false")?;
    let witness = std::fs::read_to_string(dir.path().join("door.witness")).map_err(|e| e.to_string())?;
    ensure(witness.lines().any(|l| l == "out0=0"), "witness file lacks out0=0")?;
    let net = std::fs::read_to_string(dir.path().join("door.netlist.json")).map_err(|e| e.to_string())?;
    let sys = import_json(&net).map_err(|e| e.to_string())?;
    let prov = |kind: &str| -> Vec<Vec<String>> {
        let mut v: Vec<Vec<String>> = sys
            .actors
            .iter()
            .filter(|a| a.kind.name() == kind)
            .map(|a| a.provenance.clone())
            .collect();
        v.sort();
        v
    };
    let s = |x: &str| vec![x.to_string()];
    ensure(prov("TrUB") == vec![s("S1"), s("S2")], format!("TrUB {:?}", prov("TrUB")))?;
    ensure(prov("InUB") == vec![s("S3")], format!("InUB {:?}", prov("InUB")))?;
    ensure(prov("IfTB") == vec![s("S4"), s("S6")], format!("IfTB {:?}", prov("IfTB")))?;
    ensure(elapsed < Duration::from_secs(1), format!("took {elapsed:?}"))?;
    Ok(format!("exit 0, A(out0)=false, 2 TrUB/1 InUB/2 IfTB, {:.0} ms", elapsed.as_secs_f64() * 1e3))
}

fn monitor_reproduction() -> Outcome {
    use gxw_core::blocks::syn_monitor;
    use gxw_core::formula::{DnfClause, Io, Literal};
    use gxw_core::sdf::PortValue;
    let l = |d, v: &str, p| Literal::new(d, v, p, Io::Input);
    let c = DnfClause::from_lits([l(0, "in1", false), l(1, "in1", true), l(1, "in2", true), l(2, "in2", false)])
        .ok_or("contradictory clause")?;
    let m = syn_monitor(&c, 2).map_err(|e| e.to_string())?;
    let out = m
        .run(&[vec![false, false], vec![true, true], vec![true, false]])
        .ok_or("missing transition")?;
    let got: Vec<PortValue> = out.into_iter().map(|r| r[0]).collect();
    ensure(got == [PortValue::False, PortValue::False, PortValue::True], format!("outputs {got:?}"))?;
    Ok(format!("outputs F,F,T ({} states)", m.num_states()))
}

fn lookahead_hazard() -> Outcome {
    let spec = load("eq3.gxw");
    let o = synthesize(&spec, &Options::default()).map_err(|e| e.to_string())?;
    let sys = o.system.ok_or("eq3 not synthesized")?;
    ensure(
        sys.actors.iter().any(|a| matches!(a.kind, ActorKind::Theta { h: 1 })),
        "no phase adjuster",
    )?;
    match equivalence_check(&sys, &spec, 6).map_err(|e| e.to_string())? {
        EquivResult::Ok { traces, exhaustive: true } if traces == 4096 => {
            Ok("4096 of 4096 depth-6 traces clean, simultaneous edges included".into())
        }
        EquivResult::Ok { traces, exhaustive } => Err(format!("{traces} traces, exhaustive {exhaustive}")),
        EquivResult::Counterexample(c) => Err(format!("violation {:?}", c.violations)),
    }
}

fn soundness_fuzz() -> Outcome {
    const TRACES: u64 = 10_000;
    const LEN: usize = 50;
    let mut fixtures = 0;
    for name in FIXTURES {
        let spec = load(name);
        let o = synthesize(&spec, &Options::default()).map_err(|e| e.to_string())?;
        let Some(sys) = o.system else { continue };
        fixtures += 1;
        let sim = gxw_core::sdf::Simulator::new(&sys).map_err(|e| e.to_string())?;
        let runner = Runner::new(&sim, &spec).map_err(|e| e.to_string())?;
        let sampler = InputSampler::new(&spec).map_err(|e| e.to_string())?;
        let mut rng = ChaCha8Rng::seed_from_u64(2024);
        for k in 0..TRACES {
            let inputs: Vec<Vec<bool>> = (0..LEN)
                .map(|_| sampler.sample(&mut rng))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            if let Some(c) = runner.check(&inputs).map_err(|e| e.to_string())? {
                return Err(format!("{name} trace {k}: {:?} {:?}", c.violations, c.runtime));
            }
        }
    }
    Ok(format!("{fixtures} synthesized fixtures x {TRACES} traces of length {LEN}, 0 violations"))
}

fn oracle_agreement() -> Outcome {
    const SPECS: usize = 200;
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let params = gen::SmallSpecParams::default();
    let mut checked = 0;
    let mut disagreements = Vec::new();
    let mut realizable = 0;
    while checked < SPECS {
        let src = gen::small_spec(&mut rng, &params);
        let Ok(spec) = parse_spec(&src) else { continue };
        if !spec.unroll_exact() {
            continue;
        }
        checked += 1;
        let omega = compute_omega(&spec);
        let oracle = brute_force_realizability(&spec, omega).map_err(|e| e.to_string())?.is_realizable();
        realizable += oracle as usize;
        let v = synthesize(&spec, &Options::default()).map_err(|e| e.to_string())?.report.verdict;
        let agrees = matches!((v, oracle), (Verdict::Synthesized, true) | (Verdict::Unrealizable, false));
        if !agrees {
            disagreements.push(format!("{} vs oracle {oracle}: {}", v.as_str(), src.replace('\n', " ")));
        }
    }
    ensure(disagreements.is_empty(), format!("{} disagreements, first: {}", disagreements.len(), disagreements.first().cloned().unwrap_or_default()))?;
    Ok(format!("{checked} specs ({realizable} realizable), 0 disagreements"))
}

fn incompleteness_boundary() -> Outcome {
    let spec = load("fig8.gxw");
    let realizable = brute_force_realizability(&spec, compute_omega(&spec))
        .map_err(|e| e.to_string())?
        .is_realizable();
    ensure(realizable, "oracle says unrealizable")?;
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (code, out, _) = gxw(&["synth", fixture("fig8.gxw").to_str().unwrap(), "-o", dir.path().to_str().unwrap()]);
    ensure(code == Some(4), format!("exit {code:?}"))?;
    ensure(out.contains("rejected-cycle"), "verdict is not rejected-cycle")?;
    Ok("oracle realizable, pipeline exit 4 (rejected-cycle)".into())
}

fn scaling_smoke() -> Outcome {
    let (code, out, elapsed) = gxw(&["bench", "--inputs", "20", "--outputs", "16", "--k", "16"]);
    ensure(code == Some(0), format!("exit {code:?}"))?;
    let row = out.lines().nth(1).ok_or("no CSV row")?;
    ensure(row.split(',').nth(4) == Some("synthesized"), format!("row {row}"))?;
    ensure(elapsed < Duration::from_secs(10), format!("took {elapsed:?}"))?;
    let total = row.rsplit(',').next().unwrap_or("?");
    Ok(format!("20 inputs / 16 outputs / 16 P2 synthesized in {total} ms"))
}

/// An external QDIMACS solver from `GXW_QBF_SOLVER` or a few common names on `PATH`.
fn external_solver() -> Option<String> {
    if let Ok(s) = std::env::var("GXW_QBF_SOLVER") {
        return Some(s);
    }
    ["depqbf", "caqe", "qfun", "rareqs", "cadet"]
        .into_iter()
        .find(|b| Command::new("which").arg(b).output().map(|o| o.status.success()).unwrap_or(false))
        .map(String::from)
}

/// QDIMACS convention: exit 10 true, 20 false.
fn run_external(solver: &str, p: &QbfProblem) -> Result<bool, String> {
    let mut f = tempfile::Builder::new().suffix(".qdimacs").tempfile().map_err(|e| e.to_string())?;
    std::io::Write::write_all(&mut f, export_qdimacs(p).as_bytes()).map_err(|e| e.to_string())?;
    let o = Command::new(solver).arg(f.path()).output().map_err(|e| e.to_string())?;
    match o.status.code() {
        Some(10) => Ok(true),
        Some(20) => Ok(false),
        c => Err(format!("{solver} exited with {c:?}")),
    }
}

fn fixture_encodings() -> Result<Vec<(String, QbfProblem)>, String> {
    let mut out = Vec::new();
    for name in FIXTURES {
        let spec = load(name);
        let ps = build(&spec);
        if evaluation_order(&ps.sys).is_err() {
            continue;
        }
        let e = |r: Result<QbfProblem, _>| r.map_err(|e: gxw_core::sdf::SdfError| e.to_string());
        out.push((format!("{name}/static"), e(encode_static(&ps, &spec, &[]))?));
        let inv = inductive_invariants(&ps, &spec, 0).map_err(|e| e.to_string())?;
        out.push((format!("{name}/invariants"), e(encode_static(&ps, &spec, &inv))?));
        out.push((format!("{name}/unrolled"), e(encode_unrolled(&ps, &spec, compute_omega(&spec)))?));
    }
    Ok(out)
}

fn differential_qbf() -> Outcome {
    let fixtures = fixture_encodings()?;
    let external = external_solver();
    let mut compared = 0;
    for (name, p) in &fixtures {
        let (a, _) = solve_2qbf_with(p, Strategy::Cegar);
        let (b, _) = solve_2qbf_with(p, Strategy::Enumerate);
        ensure(a == b, format!("{name}: strategies differ"))?;
        if let Some(s) = &external {
            let ext = run_external(s, p)?;
            ensure(ext == a.is_sat(), format!("{name}: {s} says {ext}"))?;
            compared += 1;
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let params = gen::SmallSpecParams { max_depth: 2, unrestricted: true, ..Default::default() };
    let mut random = 0;
    let mut sat = 0;
    let mut kinds = BTreeSet::new();
    while random < 100 {
        let Ok(spec) = parse_spec(&gen::small_spec(&mut rng, &params)) else { continue };
        let ps = build(&spec);
        if evaluation_order(&ps.sys).is_err() {
            continue;
        }
        let p = if random % 2 == 0 {
            kinds.insert("static");
            encode_static(&ps, &spec, &[])
        } else {
            kinds.insert("unrolled");
            encode_unrolled(&ps, &spec, compute_omega(&spec))
        }
        .map_err(|e| e.to_string())?;
        let (a, _) = solve_2qbf_with(&p, Strategy::Cegar);
        let (b, _) = solve_2qbf_with(&p, Strategy::Enumerate);
        ensure(a == b, format!("random encoding {random}: strategies differ"))?;
        sat += a.is_sat() as usize;
        random += 1;
    }
    let ext = match &external {
        Some(s) => format!("{compared} fixture encodings agree with {s}"),
        None => "no external QDIMACS solver found (set GXW_QBF_SOLVER), external comparison skipped".into(),
    };
    Ok(format!(
        "{} fixture encodings and 100 random encodings ({sat} true): CEGAR = enumeration; {ext}",
        fixtures.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("door fixture end-to-end", door_end_to_end),
        ("two-step edge monitor", monitor_reproduction),
        ("lookahead release with hazard", lookahead_hazard),
        ("soundness fuzz", soundness_fuzz),
        ("oracle agreement", oracle_agreement),
        ("incompleteness boundary", incompleteness_boundary),
        ("scaling smoke test", scaling_smoke),
        ("differential QBF check", differential_qbf),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let r = f();
        let secs = t.elapsed().as_secs_f64();
        match r {
            Ok(msg) => println!("criterion {}: PASS  {name}: {msg} [{secs:.2} s]", k + 1),
            Err(msg) => {
                failed += 1;
                println!("criterion {}: FAIL  {name}: {msg} [{secs:.2} s]", k + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
