//! `gxw`: batch front-end of the controller synthesizer.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use gxw_core::formula::{compute_omega, parse_spec, GxwSpec};
use gxw_core::pipeline::{self, Options, Outcome, UnrollMode, Verdict};
use gxw_core::qbf::{encode_static, encode_unrolled, export_qdimacs, witness_to_text};
use gxw_core::sdf::{export_dot, export_json, import_dot, import_json, ActorSystem, Simulator};
use gxw_core::synthesis::build;
use gxw_core::validate::{check_trace, gen, Trace};
use serde::Serialize;

/// Exit status of `check` when the trace violates the specification.
const EXIT_VIOLATIONS: u8 = 5;

#[derive(Parser)]
#[command(name = "gxw", version, about = "Synthesize actor-based controllers from GXW specifications")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Synthesize a controller and write netlist, witness and report.
    Synth {
        spec: PathBuf,
        /// Output directory.
        #[arg(short = 'o', long = "out", default_value = ".")]
        out: PathBuf,
        /// Also write a Graphviz rendering of the netlist.
        #[arg(long)]
        dot: bool,
        /// Write the 2QBF query that decided the verdict.
        #[arg(long, value_name = "FILE")]
        qdimacs: Option<PathBuf>,
        /// Bounded unroll: `auto`, a depth, or `off`.
        #[arg(long, default_value = "auto")]
        unroll: UnrollMode,
        /// Random traces simulated against the specification after synthesis.
        #[arg(long, default_value_t = 0)]
        fuzz: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Report path (default: `<out>/<stem>.report.json`).
        #[arg(long, value_name = "FILE")]
        json_report: Option<PathBuf>,
        /// Skip the invariant-strengthened static query.
        #[arg(long)]
        no_invariants: bool,
    },
    /// Run a netlist on an input trace and print the joint trace as CSV.
    Simulate {
        netlist: PathBuf,
        trace: PathBuf,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Check a joint trace against a specification.
    Check { spec: PathBuf, trace: PathBuf },
    /// Convert a netlist (or a specification's controller) to DOT, or export
    /// the static or unrolled 2QBF query of a specification.
    Export {
        /// A `.gxw` specification or a netlist (`.json` or `.dot`).
        input: PathBuf,
        #[arg(long)]
        dot: bool,
        #[arg(long, value_name = "FILE")]
        qdimacs: Option<PathBuf>,
        /// Depth of the exported query; `off` exports the static one.
        #[arg(long, default_value = "off")]
        unroll: UnrollMode,
        #[arg(short = 'o', long = "out")]
        out: Option<PathBuf>,
    },
    /// Print the Ω bound of a specification.
    Omega { spec: PathBuf },
    /// Time synthesis of generated trigger-until specifications (CSV on stdout).
    Bench {
        #[arg(long, default_value_t = 20)]
        inputs: usize,
        #[arg(long, default_value_t = 16)]
        outputs: usize,
        /// Number of P2 conjuncts.
        #[arg(long, default_value_t = 16)]
        k: usize,
        #[arg(long, default_value_t = 1)]
        repeat: usize,
        #[arg(long, default_value = "auto")]
        unroll: UnrollMode,
    },
}

/// Writes through a temporary file in the target directory and renames.
fn write_atomic(path: &Path, data: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(data.as_bytes())?;
    tmp.persist(path)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_spec(path: &Path) -> Result<GxwSpec> {
    parse_spec(&read(path)?).with_context(|| format!("in {}", path.display()))
}

fn load_netlist(path: &Path) -> Result<ActorSystem> {
    let src = read(path)?;
    let sys = if path.extension().is_some_and(|e| e == "dot") {
        import_dot(&src)?
    } else {
        import_json(&src)?
    };
    Ok(sys)
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "spec".into())
}

#[allow(clippy::too_many_arguments)]
fn synth(
    spec: &Path,
    out: &Path,
    dot: bool,
    qdimacs: Option<&Path>,
    unroll: UnrollMode,
    fuzz: u64,
    seed: u64,
    json_report: Option<&Path>,
    no_invariants: bool,
) -> Result<u8> {
    let opts = Options {
        unroll,
        invariants: !no_invariants,
        fuzz,
        seed,
        ..Options::default()
    };
    let src = read(spec)?;
    let mut o: Outcome =
        pipeline::synthesize_source(&src, &opts).with_context(|| format!("in {}", spec.display()))?;
    let name = stem(spec);
    let mut artifacts = Vec::new();
    if let Some(sys) = &o.system {
        let p = out.join(format!("{name}.netlist.json"));
        write_atomic(&p, &export_json(sys))?;
        artifacts.push(("netlist", p));
        if dot {
            let p = out.join(format!("{name}.dot"));
            write_atomic(&p, &export_dot(sys))?;
            artifacts.push(("dot", p));
        }
    }
    if let Some(w) = &o.report.witness {
        let p = out.join(format!("{name}.witness"));
        write_atomic(&p, &witness_to_text(w))?;
        artifacts.push(("witness", p));
    }
    if let Some(q) = qdimacs {
        match &o.problem {
            Some(p) => {
                write_atomic(q, &export_qdimacs(p))?;
                artifacts.push(("qdimacs", q.to_path_buf()));
            }
            None => log::warn!("no 2QBF query was built, {} not written", q.display()),
        }
    }
    let report = json_report
        .map(Path::to_path_buf)
        .unwrap_or_else(|| out.join(format!("{name}.report.json")));
    artifacts.push(("report", report.clone()));
    o.report.artifacts = artifacts
        .iter()
        .map(|(k, p)| (k.to_string(), p.display().to_string()))
        .collect();
    write_atomic(&report, &serde_json::to_string_pretty(&o.report)?)?;

    let r = &o.report;
    println!("verdict: {}", r.verdict.as_str());
    if !r.message.is_empty() {
        println!("reason: {}", r.message);
    }
    if let Some(om) = r.omega {
        println!("omega: {om}");
    }
    if let Some(w) = &r.witness {
        for (k, v) in w {
            println!("A({k}) = {v}");
        }
    }
    if !r.cycle.is_empty() {
        println!("cycle: {}", r.cycle.join(" -> "));
    }
    if let Some(f) = &r.fuzz {
        println!("fuzz: {} traces of length {}, {} failing", f.traces, f.length, f.failures);
    }
    println!("time: {:.3} ms", r.timings.total_ms());
    for (k, p) in &artifacts {
        println!("{k}: {}", p.display());
    }
    Ok(r.verdict.exit_code() as u8)
}

fn simulate(netlist: &Path, trace: &Path, out: Option<&Path>) -> Result<u8> {
    let sys = load_netlist(netlist)?;
    let sim = Simulator::new(&sys)?;
    let tr = Trace::from_csv(&read(trace)?)?;
    let inputs = tr.project(sim.inputs())?;
    let outs = sim.run(&inputs)?;
    let mut y = Trace::new(sim.outputs().to_vec());
    y.rows = outs;
    let x = Trace {
        vars: sim.inputs().to_vec(),
        rows: inputs,
    };
    let csv = x.join(&y).to_csv();
    match out {
        Some(p) => write_atomic(p, &csv)?,
        None => print!("{csv}"),
    }
    Ok(0)
}

fn check(spec: &Path, trace: &Path) -> Result<u8> {
    let spec = load_spec(spec)?;
    let tr = Trace::from_csv(&read(trace)?)?;
    let v = check_trace(&spec, &tr)?;
    for x in &v {
        println!("{} @ cycle {}: {}", x.label, x.cycle, x.reason);
    }
    if v.is_empty() {
        println!("no violations in {} cycles", tr.len());
        Ok(0)
    } else {
        Ok(EXIT_VIOLATIONS)
    }
}

fn export(input: &Path, dot: bool, qdimacs: Option<&Path>, unroll: UnrollMode, out: Option<&Path>) -> Result<u8> {
    let is_spec = input.extension().is_some_and(|e| e == "gxw");
    if !dot && qdimacs.is_none() {
        bail!("nothing to export: pass --dot and/or --qdimacs FILE");
    }
    if let Some(q) = qdimacs {
        if !is_spec {
            bail!("--qdimacs needs a .gxw specification");
        }
        let spec = load_spec(input)?;
        let ps = build(&spec);
        let p = match unroll {
            UnrollMode::Off => encode_static(&ps, &spec, &[])?,
            UnrollMode::Depth(n) => encode_unrolled(&ps, &spec, n)?,
            UnrollMode::Auto => encode_unrolled(&ps, &spec, compute_omega(&spec))?,
        };
        write_atomic(q, &export_qdimacs(&p))?;
    }
    if dot {
        let sys = if is_spec {
            build(&load_spec(input)?).sys
        } else {
            load_netlist(input)?
        };
        let text = export_dot(&sys);
        match out {
            Some(p) => write_atomic(p, &text)?,
            None => print!("{text}"),
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct BenchRow {
    inputs: usize,
    outputs: usize,
    k: usize,
    actors: usize,
    verdict: &'static str,
    parse_ms: f64,
    build_ms: f64,
    encode_ms: f64,
    solve_ms: f64,
    validate_ms: f64,
    total_ms: f64,
}

fn bench(inputs: usize, outputs: usize, k: usize, repeat: usize, unroll: UnrollMode) -> Result<u8> {
    if inputs == 0 || outputs == 0 {
        bail!("bench needs at least one input and one output");
    }
    let src = gen::scaling_spec(inputs, outputs, k);
    println!("inputs,outputs,k,actors,verdict,parse_ms,build_ms,encode_ms,solve_ms,validate_ms,total_ms");
    let opts = Options {
        unroll,
        ..Options::default()
    };
    for _ in 0..repeat.max(1) {
        let t = Instant::now();
        let o = pipeline::synthesize_source(&src, &opts)?;
        let r = &o.report;
        let row = BenchRow {
            inputs,
            outputs,
            k,
            actors: o.partial.as_ref().map_or(0, |p| p.sys.actors.len()),
            verdict: r.verdict.as_str(),
            parse_ms: r.timings.parse_ms,
            build_ms: r.timings.build_ms,
            encode_ms: r.timings.encode_ms,
            solve_ms: r.timings.solve_ms,
            validate_ms: r.timings.validate_ms,
            total_ms: t.elapsed().as_secs_f64() * 1e3,
        };
        println!(
            "{},{},{},{},{},{:.3},{:.3},{:.3},{:.3},{:.3},{:.3}",
            row.inputs,
            row.outputs,
            row.k,
            row.actors,
            row.verdict,
            row.parse_ms,
            row.build_ms,
            row.encode_ms,
            row.solve_ms,
            row.validate_ms,
            row.total_ms
        );
        log::info!("{}", serde_json::to_string(&row)?);
        if r.verdict != Verdict::Synthesized {
            log::warn!("benchmark instance not synthesized: {}", r.message);
        }
    }
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.cmd {
        Cmd::Synth {
            spec,
            out,
            dot,
            qdimacs,
            unroll,
            fuzz,
            seed,
            json_report,
            no_invariants,
        } => synth(
            &spec,
            &out,
            dot,
            qdimacs.as_deref(),
            unroll,
            fuzz,
            seed,
            json_report.as_deref(),
            no_invariants,
        ),
        Cmd::Simulate { netlist, trace, out } => simulate(&netlist, &trace, out.as_deref()),
        Cmd::Check { spec, trace } => check(&spec, &trace),
        Cmd::Export {
            input,
            dot,
            qdimacs,
            unroll,
            out,
        } => export(&input, dot, qdimacs.as_deref(), unroll, out.as_deref()),
        Cmd::Omega { spec } => {
            println!("{}", compute_omega(&load_spec(&spec)?));
            Ok(0)
        }
        Cmd::Bench {
            inputs,
            outputs,
            k,
            repeat,
            unroll,
        } => bench(inputs, outputs, k, repeat, unroll),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GXW_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
