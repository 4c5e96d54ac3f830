use gxw_core::formula::{compute_omega, parse_spec};
use gxw_core::qbf::sat::{Lit, Solver};
use gxw_core::qbf::*;
use gxw_core::qbf::Strategy as Solve;
use gxw_core::synthesis::build;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DOOR: &str = include_str!("../../../fixtures/door.gxw");

fn fixture(name: &str) -> String {
    std::fs::read_to_string(format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

/// `∃ e_1..e_ne ∀ u_1..u_nu: clauses`, no gate variables. Variable 1 is `true`.
fn raw_problem(ne: usize, nu: usize, clauses: Vec<Vec<Lit>>) -> QbfProblem {
    let exists = (0..ne).map(|k| (format!("e{k}"), 2 + k as Lit)).collect();
    let forall = (0..nu).map(|k| (format!("u{k}"), 2 + (ne + k) as Lit)).collect();
    QbfProblem {
        num_vars: (1 + ne + nu) as u32,
        exists,
        forall,
        inner: vec![],
        defs: vec![vec![1]],
        assume: 1,
        guarantee: clauses,
    }
}

/// Lexicographically smallest `e` such that every `u` satisfies the clauses.
fn brute_force(ne: usize, nu: usize, clauses: &[Vec<Lit>]) -> Option<Vec<bool>> {
    let holds = |e: u32, u: u32| {
        clauses.iter().all(|c| {
            c.iter().any(|&l| {
                let v = l.unsigned_abs() as usize;
                let val = if v == 1 {
                    true
                } else if v - 2 < ne {
                    e >> (ne - 1 - (v - 2)) & 1 == 1
                } else {
                    u >> (v - 2 - ne) & 1 == 1
                };
                val == (l > 0)
            })
        })
    };
    (0u32..1 << ne)
        .find(|&e| (0u32..1 << nu).all(|u| holds(e, u)))
        .map(|e| (0..ne).map(|k| e >> (ne - 1 - k) & 1 == 1).collect())
}

fn random_clauses(rng: &mut impl Rng, ne: usize, nu: usize) -> Vec<Vec<Lit>> {
    let n = rng.gen_range(1..8);
    (0..n)
        .map(|_| {
            let w = rng.gen_range(1..4);
            (0..w)
                .map(|_| {
                    let v = 2 + rng.gen_range(0..ne + nu) as Lit;
                    if rng.gen() { v } else { -v }
                })
                .collect()
        })
        .collect()
}

fn witness_bits(r: &QbfResult, p: &QbfProblem) -> Option<Vec<bool>> {
    match r {
        QbfResult::Sat(w) => Some(p.exists.iter().map(|(n, _)| w[n]).collect()),
        QbfResult::Unsat => None,
    }
}

proptest! {
    #[test]
    fn both_strategies_match_brute_force(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ne = rng.gen_range(1..5);
        let nu = rng.gen_range(1..5);
        let cl = random_clauses(&mut rng, ne, nu);
        let p = raw_problem(ne, nu, cl.clone());
        let want = brute_force(ne, nu, &cl);
        for s in [Solve::Cegar, Solve::Enumerate] {
            let (r, _) = solve_2qbf_with(&p, s);
            prop_assert_eq!(witness_bits(&r, &p), want.clone());
        }
    }
}

#[test]
fn biconditional_with_a_universal_is_false() {
    // ∃A ∀u: A <-> u
    let p = raw_problem(1, 1, vec![vec![2, -3], vec![-2, 3]]);
    assert_eq!(solve_2qbf(&p), QbfResult::Unsat);
    assert_eq!(solve_2qbf_with(&p, Solve::Enumerate).0, QbfResult::Unsat);
    // ∃A ∀u: A | u
    let p = raw_problem(1, 1, vec![vec![2, 3]]);
    assert_eq!(witness_bits(&solve_2qbf(&p), &p), Some(vec![true]));
}

#[test]
fn door_needs_invariants() {
    let spec = parse_spec(DOOR).unwrap();
    let ps = build(&spec);
    let plain = encode_static(&ps, &spec, &[]).unwrap();
    assert_eq!(solve_2qbf(&plain), QbfResult::Unsat);
    let inv = inductive_invariants(&ps, &spec, 0).unwrap();
    assert!(!inv.is_empty());
    let strong = encode_static(&ps, &spec, &inv).unwrap();
    let QbfResult::Sat(w) = solve_2qbf(&strong) else { panic!("door should be solvable") };
    assert_eq!(w.get("out0"), Some(&false));
    assert_eq!(w.len(), 3);
    // the unrolled query agrees on the same witness
    let unrolled = encode_unrolled(&ps, &spec, compute_omega(&spec)).unwrap();
    assert_eq!(solve_2qbf(&unrolled), QbfResult::Sat(w));
}

#[test]
fn conflicting_fixtures_are_unsat_when_unrolled() {
    for name in ["conflict_p3.gxw", "conflict_p2.gxw"] {
        let spec = parse_spec(&fixture(name)).unwrap();
        let ps = build(&spec);
        let p = encode_unrolled(&ps, &spec, compute_omega(&spec)).unwrap();
        assert_eq!(solve_2qbf(&p), QbfResult::Unsat, "{name}");
        assert_eq!(solve_2qbf_with(&p, Solve::Enumerate).0, QbfResult::Unsat, "{name}");
    }
}

#[test]
fn empty_problem_is_trivially_true() {
    let p = QbfProblem::default();
    assert_eq!(export_qdimacs(&p), "p cnf 0 0\n");
    assert_eq!(solve_2qbf(&p), QbfResult::Sat(Witness::new()));
}

#[test]
fn qdimacs_is_well_formed() {
    let spec = parse_spec(DOOR).unwrap();
    let ps = build(&spec);
    let p = encode_static(&ps, &spec, &[]).unwrap();
    let text = export_qdimacs(&p);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('c')).collect();
    let header: Vec<&str> = lines[0].split_whitespace().collect();
    assert_eq!(header[..2], ["p", "cnf"]);
    let nv: i64 = header[2].parse().unwrap();
    let nc: usize = header[3].parse().unwrap();
    assert_eq!(nc, p.matrix().len());
    let prefix: Vec<&str> = lines[1..4].iter().map(|l| &l[..1]).collect();
    assert_eq!(prefix, ["e", "a", "e"]);
    let mut quantified = std::collections::HashSet::new();
    for l in &lines[1..4] {
        let toks: Vec<i64> = l[2..].split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(*toks.last().unwrap(), 0);
        for &v in &toks[..toks.len() - 1] {
            assert!(quantified.insert(v), "variable {v} quantified twice");
        }
    }
    assert_eq!(lines.len(), 4 + nc);
    for l in &lines[4..] {
        let toks: Vec<i64> = l.split_whitespace().map(|t| t.parse().unwrap()).collect();
        assert_eq!(*toks.last().unwrap(), 0);
        assert!(toks[..toks.len() - 1].iter().all(|&x| x != 0 && x.abs() <= nv));
    }
}

#[test]
fn witness_text_round_trips() {
    let w: Witness = [("out0".to_string(), false), ("t0start".to_string(), true)].into_iter().collect();
    let text = witness_to_text(&w);
    assert_eq!(text, "out0=0\nt0start=1\n");
    assert_eq!(witness_from_text(&text).unwrap(), w);
    assert_eq!(witness_from_text("# note\n\nx = 1\n").unwrap().get("x"), Some(&true));
    assert_eq!(witness_from_text("x=2").unwrap_err(), QbfError::BadWitnessLine(1));
    assert_eq!(witness_from_text("a=1\nnope").unwrap_err(), QbfError::BadWitnessLine(2));
}

#[test]
fn witness_must_cover_exactly_the_parameters() {
    let spec = parse_spec(DOOR).unwrap();
    let ps = build(&spec);
    let mut w: Witness = ps.res.keys().map(|k| (k.clone(), false)).collect();
    assert!(apply_witness(&ps, &w).is_ok());
    w.insert("ghost".into(), true);
    assert_eq!(apply_witness(&ps, &w).unwrap_err(), QbfError::UnknownWitnessVariable("ghost".into()));
    w.remove("ghost");
    w.remove("out1");
    assert_eq!(apply_witness(&ps, &w).unwrap_err(), QbfError::MissingWitnessVariable("out1".into()));
}

#[test]
fn sat_solver_handles_pigeonhole() {
    // 4 pigeons, 3 holes
    let mut s = Solver::new();
    let v = |p: usize, h: usize| (1 + p * 3 + h) as Lit;
    s.ensure_vars(12);
    for p in 0..4 {
        s.add_clause(&[v(p, 0), v(p, 1), v(p, 2)]);
    }
    for h in 0..3 {
        for p in 0..4 {
            for q in p + 1..4 {
                s.add_clause(&[-v(p, h), -v(q, h)]);
            }
        }
    }
    assert!(!s.solve());
    let mut s = Solver::new();
    let a = s.new_var();
    let b = s.new_var();
    s.add_clause(&[a, b]);
    assert!(s.solve_with(&[-a]));
    assert!(s.model_value(b));
    assert!(!s.solve_with(&[-a, -b]));
    assert!(s.solve());
}
