use std::collections::BTreeSet;

use gxw_core::formula::{display_dnf, parse_spec};
use gxw_core::qbf::{apply_witness, Witness};
use gxw_core::sdf::{evaluation_order, ActorKind, Simulator};
use gxw_core::synthesis::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DOOR: &str = include_str!("../../../fixtures/door.gxw");
const EQ3: &str = include_str!("../../../fixtures/eq3.gxw");

fn labels_of(ps: &PartialSystem, kind: &str) -> Vec<BTreeSet<String>> {
    let mut v: Vec<BTreeSet<String>> = ps
        .sys
        .actors
        .iter()
        .filter(|a| a.kind.name() == kind)
        .map(|a| a.provenance.iter().cloned().collect())
        .collect();
    v.sort();
    v
}

fn set(xs: &[&str]) -> BTreeSet<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

#[test]
fn door_skeleton_matches_the_classification() {
    let spec = parse_spec(DOOR).unwrap();
    let ps = build(&spec);
    assert_eq!(labels_of(&ps, "TrUB"), vec![set(&["S1"]), set(&["S2"])]);
    assert_eq!(labels_of(&ps, "InUB"), vec![set(&["S3"])]);
    assert_eq!(labels_of(&ps, "IfTB"), vec![set(&["S4"]), set(&["S6"])]);
    // one resolution actor per written output
    assert_eq!(ps.sys.count("RES"), 3);
    assert_eq!(ps.res.keys().cloned().collect::<Vec<_>>(), vec!["out0", "out1", "t0start"]);
    assert_eq!(ps.map_out["out0"], vec![1, 3, 4]);
    assert_eq!(ps.map_out["out1"], vec![2, 6]);
    assert_eq!(ps.map_out["t0start"], vec![5]);
    assert!(evaluation_order(&ps.sys).is_ok());
    let prov = ps.provenance();
    assert!(prov.contains_key("S5"));
    assert!(!prov.contains_key("S7"));
}

#[test]
fn entering_monitor_is_shared() {
    let spec = parse_spec(DOOR).unwrap();
    let shared = build(&spec);
    let unshared = build_with(&spec, &BuildOptions { share_monitors: false, ..Default::default() });
    let monitors = |ps: &PartialSystem| ps.sys.count("Monitor");
    assert!(monitors(&shared) < monitors(&unshared));
    // S1's trigger and S3's event are both the entering edge
    let multi: Vec<_> = shared
        .sys
        .actors
        .iter()
        .filter(|a| matches!(a.kind, ActorKind::Monitor { .. }))
        .filter(|a| a.provenance.contains(&"S1".to_string()) && a.provenance.contains(&"S3".to_string()))
        .collect();
    assert_eq!(multi.len(), 1);
}

#[test]
fn sharing_preserves_behaviour() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for src in [DOOR, EQ3] {
        let spec = parse_spec(src).unwrap();
        for bits in 0u32..8 {
            let shared = build(&spec);
            let w: Witness = shared.res.keys().enumerate().map(|(k, v)| (v.clone(), bits >> k & 1 == 1)).collect();
            let a = Simulator::new(&apply_witness(&shared, &w).unwrap()).unwrap();
            let unshared = build_with(&spec, &BuildOptions { share_monitors: false, ..Default::default() });
            let b = Simulator::new(&apply_witness(&unshared, &w).unwrap()).unwrap();
            for _ in 0..30 {
                let tr: Vec<Vec<bool>> = (0..25).map(|_| (0..spec.inputs.len()).map(|_| rng.gen()).collect()).collect();
                let ra = a.run(&tr);
                let rb = b.run(&tr);
                assert_eq!(ra.is_ok(), rb.is_ok());
                if let (Ok(x), Ok(y)) = (ra, rb) {
                    assert_eq!(x, y);
                }
            }
        }
    }
}

#[test]
fn lookahead_release_gets_a_phase_adjuster() {
    let spec = parse_spec(EQ3).unwrap();
    let ps = build(&spec);
    let thetas: Vec<u32> = ps
        .sys
        .actors
        .iter()
        .filter_map(|a| match a.kind {
            ActorKind::Theta { h } => Some(h),
            _ => None,
        })
        .collect();
    assert_eq!(thetas, vec![1]);
    // Release input is not wired straight from the monitor into TrUB.release.
    let trub = ps.highlevel[&1].clone();
    let src = ps
        .sys
        .source_of(&gxw_core::sdf::Endpoint::port(&trub, "release"))
        .unwrap()
        .clone();
    if let gxw_core::sdf::Endpoint::Port { actor, .. } = src {
        assert!(!matches!(ps.sys.actor(&actor).unwrap().kind, ActorKind::Monitor { .. }));
    }
}

#[test]
fn completion_adds_forcing_prefixes() {
    let spec = parse_spec("input a; output o; S1: o W ((!X a) | (X a)); S2: G(a -> !o);").unwrap();
    let done = complete_releases(&spec);
    assert_eq!(display_dnf(&done.by_label("S1").unwrap().parts.trigger), "true");
    let spec = parse_spec("input a, b; output o; G(a -> X(o W ((!b & X b) | (b & X b))));").unwrap();
    let done = complete_releases(&spec);
    assert_eq!(display_dnf(&done.subspecs[0].parts.release_in), "X b");
    // already prime: unchanged
    let door = parse_spec(DOOR).unwrap();
    assert_eq!(complete_releases(&door).subspecs, door.subspecs);
}

#[test]
fn completion_respects_the_assumption() {
    // under !(a & b), X b alone already forces the release
    let spec = parse_spec("input a, b; output o; assume !(a & b); G(b -> X(o W (X b & !X a)));").unwrap();
    let done = complete_releases(&spec);
    let rel = display_dnf(&done.subspecs[0].parts.release_in);
    assert_eq!(rel, "X b");
    // without the assumption the clause stays as written
    let spec = parse_spec("input a, b; output o; G(b -> X(o W (X b & !X a)));").unwrap();
    let rel = display_dnf(&complete_releases(&spec).subspecs[0].parts.release_in);
    assert_eq!(rel, "!X a & X b");
}
