use gxw_core::blocks::*;
use gxw_core::formula::{DnfClause, Io, Literal};
use gxw_core::sdf::{ActorKind, PortValue};
use proptest::prelude::*;

use PortValue::{Dash, False as F, True as T};

fn lit(d: u32, v: &str, pos: bool) -> Literal {
    Literal::new(d, v, pos, Io::Input)
}

fn run_kind(kind: &ActorKind, inputs: &[Vec<PortValue>]) -> Vec<Vec<PortValue>> {
    let mut s = kind.init_bits();
    inputs
        .iter()
        .map(|x| {
            let (y, n, _) = step_concrete(kind, x, &s);
            s = n;
            y
        })
        .collect()
}

fn bools(xs: &[bool]) -> Vec<PortValue> {
    xs.iter().map(|&b| PortValue::from_bool(b)).collect()
}

#[test]
fn two_step_edge_monitor_fires_on_third_cycle() {
    // ¬in1 ∧ X in1 ∧ X in2 ∧ XX ¬in2
    let c = DnfClause::from_lits([
        lit(0, "in1", false),
        lit(1, "in1", true),
        lit(1, "in2", true),
        lit(2, "in2", false),
    ])
    .unwrap();
    let m = syn_monitor(&c, 2).unwrap();
    assert_eq!(m.inputs, vec!["in1", "in2"]);
    let trace = vec![vec![false, false], vec![true, true], vec![true, false]];
    let out = m.run(&trace).unwrap();
    assert_eq!(out, vec![vec![F], vec![F], vec![T]]);
}

#[test]
fn rising_edge_monitor_is_exhaustively_right() {
    let c = DnfClause::from_lits([lit(0, "a", false), lit(1, "a", true)]).unwrap();
    let m = syn_monitor(&c, 1).unwrap();
    for code in 0u32..1 << 6 {
        let xs: Vec<bool> = (0..6).map(|t| code >> t & 1 == 1).collect();
        let rows: Vec<Vec<bool>> = xs.iter().map(|&b| vec![b]).collect();
        let out = m.run(&rows).unwrap();
        for t in 0..6 {
            let want = t >= 1 && !xs[t - 1] && xs[t];
            assert_eq!(out[t], vec![PortValue::from_bool(want)], "trace {xs:?} t {t}");
        }
    }
}

#[test]
fn padding_delays_the_monitor() {
    let c = DnfClause::from_lits([lit(0, "a", true)]).unwrap();
    let m = syn_monitor(&c, 2).unwrap();
    let out = m.run(&[vec![true], vec![false], vec![false], vec![false]]).unwrap();
    assert_eq!(out, vec![vec![F], vec![F], vec![T], vec![F]]);
    assert!(syn_monitor(&DnfClause::from_lits([lit(2, "a", true)]).unwrap(), 1).is_err());
}

#[test]
fn empty_clause_monitor_turns_valid_after_depth() {
    let c = DnfClause { lits: vec![], depth: 0 };
    let out = run_kind(&ActorKind::Monitor { clause: DnfClause { lits: vec![], depth: 2 } }, &[vec![], vec![], vec![], vec![]]);
    assert_eq!(out, vec![vec![F], vec![F], vec![T], vec![T]]);
    let m = syn_monitor(&c, 0).unwrap();
    assert_eq!(m.run(&[vec![]]).unwrap(), vec![vec![T]]);
}

fn arb_clause() -> impl Strategy<Value = (DnfClause, u32)> {
    let l = (0u32..3, prop::sample::select(vec!["a", "b"]), any::<bool>());
    (prop::collection::vec(l, 1..4), 0u32..2).prop_filter_map("contradictory", |(ls, pad)| {
        let c = DnfClause::from_lits(ls.into_iter().map(|(d, v, p)| lit(d, v, p)))?;
        let i = c.depth + pad;
        Some((c, i))
    })
}

proptest! {
    #[test]
    fn monitor_matches_window_semantics(
        (c, i) in arb_clause(),
        trace in prop::collection::vec((any::<bool>(), any::<bool>()), 1..9),
    ) {
        let m = syn_monitor(&c, i).unwrap();
        let vars = c.vars();
        let rows: Vec<Vec<bool>> = trace
            .iter()
            .map(|&(a, b)| vars.iter().map(|v| if v == "a" { a } else { b }).collect())
            .collect();
        let out = m.run(&rows).unwrap();
        for t in 0..rows.len() {
            let want = t >= i as usize && c.lits.iter().all(|l| {
                let (a, b) = trace[t - i as usize + l.depth as usize];
                (if l.var == "a" { a } else { b }) == l.positive
            });
            prop_assert_eq!(&out[t], &vec![PortValue::from_bool(want)]);
        }
    }

    #[test]
    fn p4_monitor_dashes_until_the_window_fills(
        (c, i) in arb_clause(),
        trace in prop::collection::vec((any::<bool>(), any::<bool>()), 1..8),
    ) {
        let plain = ActorKind::Monitor { clause: gxw_core::formula::pad_clause(&c, i).unwrap() };
        let p4 = ActorKind::P4Monitor { clause: gxw_core::formula::pad_clause(&c, i).unwrap() };
        let vars = c.vars();
        let rows: Vec<Vec<PortValue>> = trace
            .iter()
            .map(|&(a, b)| bools(&vars.iter().map(|v| if v == "a" { a } else { b }).collect::<Vec<_>>()))
            .collect();
        let y = run_kind(&plain, &rows);
        let z = run_kind(&p4, &rows);
        for t in 0..rows.len() {
            if t < i as usize {
                prop_assert_eq!(z[t][0], Dash);
            } else {
                prop_assert_eq!(z[t][0], y[t][0]);
            }
        }
    }

    #[test]
    fn machine_tables_agree_with_direct_steps(
        h in 1i64..5,
        trace in prop::collection::vec((any::<bool>(), any::<bool>()), 1..12),
    ) {
        for kind in [theta_kind(h).unwrap(), ActorKind::TrUB] {
            let m = machine_of(&kind).unwrap();
            let rows: Vec<Vec<bool>> = trace.iter().map(|&(a, b)| vec![a, b]).collect();
            let direct = run_kind(&kind, &rows.iter().map(|r| bools(r)).collect::<Vec<_>>());
            prop_assert_eq!(m.run(&rows).unwrap(), direct);
        }
    }
}

#[test]
fn theta_masks_h_cycles_after_each_set() {
    let kind = theta_kind(2).unwrap();
    // set at 0 and 3, `in` always true
    let set = [true, false, false, true, false, false, false];
    let rows: Vec<Vec<PortValue>> = set.iter().map(|&s| bools(&[s, true])).collect();
    let out: Vec<PortValue> = run_kind(&kind, &rows).into_iter().map(|y| y[0]).collect();
    assert_eq!(out, vec![F, F, T, F, F, T, T]);
    // never set: nothing passes
    let rows: Vec<Vec<PortValue>> = (0..4).map(|_| bools(&[false, true])).collect();
    assert!(run_kind(&kind, &rows).iter().all(|y| y[0] == F));
}

#[test]
fn theta_one_passes_from_the_next_cycle() {
    let kind = theta_kind(1).unwrap();
    let rows: Vec<Vec<PortValue>> = [(true, true), (false, true), (false, false), (false, true)]
        .iter()
        .map(|&(s, x)| bools(&[s, x]))
        .collect();
    let out: Vec<PortValue> = run_kind(&kind, &rows).into_iter().map(|y| y[0]).collect();
    assert_eq!(out, vec![F, T, F, T]);
}

#[test]
fn theta_rejects_nonpositive_h() {
    assert_eq!(make_theta(0).unwrap_err(), BlockError::InvalidH(0));
    assert_eq!(make_theta(-3).unwrap_err(), BlockError::InvalidH(-3));
    assert!(make_theta(3).is_ok());
}

#[test]
fn initial_until_releases_forever() {
    let kind = make_highlevel(HighLevelKind::InUB);
    let rows: Vec<Vec<PortValue>> = [false, false, true, false].iter().map(|&b| bools(&[b])).collect();
    let out: Vec<PortValue> = run_kind(&kind, &rows).into_iter().map(|y| y[0]).collect();
    assert_eq!(out, vec![T, T, Dash, Dash]);
}

#[test]
fn triggered_until_holds_until_release() {
    let kind = make_highlevel(HighLevelKind::TrUB);
    // (input, release)
    let rows: Vec<Vec<PortValue>> = [(false, false), (true, false), (false, false), (false, true), (false, false), (true, true)]
        .iter()
        .map(|&(x, r)| bools(&[x, r]))
        .collect();
    let out: Vec<PortValue> = run_kind(&kind, &rows).into_iter().map(|y| y[0]).collect();
    assert_eq!(out, vec![Dash, T, T, Dash, Dash, Dash]);
}

#[test]
fn if_then_is_pointwise() {
    let kind = make_highlevel(HighLevelKind::IfTB);
    assert_eq!(run_kind(&kind, &[bools(&[true]), bools(&[false])]), vec![vec![T], vec![Dash]]);
}

#[test]
fn resolution_actor_merges_demands() {
    assert_eq!(make_res(0).unwrap_err(), BlockError::EmptyRes);
    for a in [false, true] {
        let kind = ActorKind::Res { n: 3, a: Some(a) };
        let cases: &[(&[PortValue], PortValue, bool)] = &[
            (&[Dash, Dash, Dash], PortValue::from_bool(a), false),
            (&[T, Dash, Dash], T, false),
            (&[Dash, F, Dash], F, false),
            (&[T, Dash, T], T, false),
            (&[T, F, Dash], T, true),
        ];
        for (ins, want, conflict) in cases {
            let (y, _, c) = step_concrete(&kind, ins, &[]);
            assert_eq!(c, *conflict, "{ins:?}");
            if !conflict {
                assert_eq!(y[0], *want, "{ins:?}");
            }
            // symmetric in its inputs
            let rev: Vec<PortValue> = ins.iter().rev().copied().collect();
            let (y2, _, c2) = step_concrete(&kind, &rev, &[]);
            assert_eq!((y2, c2), (y, c));
        }
    }
}

#[test]
fn gates_treat_dash_as_false() {
    let (y, _, _) = step_concrete(&make_gate(GateKind::Not), &[T], &[]);
    assert_eq!(y, vec![F]);
    let (y, _, _) = step_concrete(&make_gate(GateKind::Or(2)), &[F, T], &[]);
    assert_eq!(y, vec![T]);
    let (y, _, _) = step_concrete(&make_gate(GateKind::And(2)), &[T, F], &[]);
    assert_eq!(y, vec![F]);
}

#[test]
fn p4_monitor_table_has_two_outputs() {
    let c = DnfClause::from_lits([lit(1, "a", true)]).unwrap();
    let m = syn_p4_monitor(&c, 1).unwrap();
    assert_eq!(m.outputs, vec!["out", "dc"]);
    let out = m.run(&[vec![false], vec![true]]).unwrap();
    assert_eq!(out, vec![vec![F, T], vec![T, F]]);
}

#[test]
fn port_conversions_round_trip() {
    for v in [T, F, Dash] {
        assert_eq!(sig_to_port(port_to_sig(v)), v);
    }
}
