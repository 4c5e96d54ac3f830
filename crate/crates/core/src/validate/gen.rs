use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng;

/// Shape of the random small specifications.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmallSpecParams {
    pub max_conjuncts: usize,
    pub max_inputs: usize,
    pub max_outputs: usize,
    pub max_depth: u32,
    /// Allow P2 releases over outputs and P5 invariants.
    pub unrestricted: bool,
    /// Probability of an assumption.
    pub assume_rate: f64,
}

impl Default for SmallSpecParams {
    fn default() -> Self {
        SmallSpecParams {
            max_conjuncts: 3,
            max_inputs: 3,
            max_outputs: 2,
            max_depth: 1,
            unrestricted: false,
            assume_rate: 0.15,
        }
    }
}

const INPUTS: [&str; 3] = ["a", "b", "c"];
const OUTPUTS: [&str; 2] = ["o", "p"];

fn x_prefix(d: u32) -> String {
    "X ".repeat(d as usize)
}

fn literal(rng: &mut impl Rng, vars: &[&str], max_depth: u32) -> String {
    let v = vars.choose(rng).expect("variables");
    let d = rng.gen_range(0..=max_depth);
    let neg = if rng.gen_bool(0.5) { "!" } else { "" };
    format!("{neg}{}{v}", x_prefix(d))
}

fn clause(rng: &mut impl Rng, vars: &[&str], max_depth: u32) -> String {
    let n = rng.gen_range(1..=2);
    let lits: Vec<String> = (0..n).map(|_| literal(rng, vars, max_depth)).collect();
    lits.join(" & ")
}

fn dnf(rng: &mut impl Rng, vars: &[&str], max_depth: u32) -> String {
    let n = if rng.gen_bool(0.75) { 1 } else { 2 };
    let cls: Vec<String> = (0..n)
        .map(|_| format!("({})", clause(rng, vars, max_depth)))
        .collect();
    cls.join(" | ")
}

/// A random `.gxw` text over at most three inputs and two outputs, using
/// patterns P1 to P4 (plus output releases and P5 when `unrestricted`).
pub fn small_spec(rng: &mut impl Rng, p: &SmallSpecParams) -> String {
    let nin = rng.gen_range(1..=p.max_inputs.min(INPUTS.len()));
    let nout = rng.gen_range(1..=p.max_outputs.min(OUTPUTS.len()));
    let ins = &INPUTS[..nin];
    let outs = &OUTPUTS[..nout];
    let mut s = String::new();
    let _ = writeln!(s, "input {};", ins.join(", "));
    let _ = writeln!(s, "output {};", outs.join(", "));
    if nin > 1 && rng.gen_bool(p.assume_rate) {
        let _ = writeln!(s, "assume !({} & {});", ins[0], ins[1]);
    }
    let k = rng.gen_range(1..=p.max_conjuncts);
    for m in 0..k {
        let o = outs.choose(rng).expect("outputs");
        let lit = if rng.gen_bool(0.5) {
            o.to_string()
        } else {
            format!("!{o}")
        };
        let i = rng.gen_range(0..=p.max_depth);
        let trig = dnf(rng, ins, i);
        let choice = rng.gen_range(0..if p.unrestricted { 5 } else { 4 });
        let f = match choice {
            0 => format!("{lit} W ({})", dnf(rng, ins, p.max_depth)),
            1 => {
                let mut rel = dnf(rng, ins, p.max_depth);
                if p.unrestricted && rng.gen_bool(0.5) {
                    let other = outs.choose(rng).expect("outputs");
                    rel = format!("{rel} | {other}");
                }
                format!("G(({trig}) -> {}({lit} W ({rel})))", x_prefix(i))
            }
            2 => format!("G(({trig}) -> {}{lit})", x_prefix(i)),
            3 => format!("G(({trig}) <-> {}{lit})", x_prefix(i)),
            _ => {
                let a = outs.choose(rng).expect("outputs");
                let b = outs.choose(rng).expect("outputs");
                format!("G(!{a} | !{b})")
            }
        };
        let _ = writeln!(s, "S{}: {f};", m + 1);
    }
    s
}

/// Synthetic scaling instance: `k` trigger-until conjuncts
/// `G((!in_j & X in_j) -> X(out_j W (in_{j+3} | (!in_{j+1} & X in_{j+1}))))`
/// with indices taken modulo the port counts.
pub fn scaling_spec(inputs: usize, outputs: usize, k: usize) -> String {
    assert!(inputs > 0 && outputs > 0, "need at least one input and one output");
    let names = |p: &str, n: usize| (0..n).map(|j| format!("{p}{j}")).collect::<Vec<_>>().join(", ");
    let mut s = String::new();
    let _ = writeln!(s, "input {};", names("in", inputs));
    let _ = writeln!(s, "output {};", names("out", outputs));
    for j in 0..k {
        let i0 = j % inputs;
        let i1 = (j + 1) % inputs;
        let i3 = (j + 3) % inputs;
        let o = j % outputs;
        let _ = writeln!(
            s,
            "P{j}: G((!in{i0} & X in{i0}) -> X(out{o} W (in{i3} | (!in{i1} & X in{i1}))));"
        );
    }
    s
}
