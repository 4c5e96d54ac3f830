use std::collections::BTreeMap;

use gxw_core::formula::*;
use proptest::prelude::*;

const DOOR: &str = include_str!("../../../fixtures/door.gxw");
const DOOR_NO_S6: &str = include_str!("../../../fixtures/door_no_s6.gxw");

fn arb_prop(max_depth: u32) -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        Just(Formula::True),
        Just(Formula::False),
        prop::sample::select(vec!["a", "b", "c"]).prop_map(Formula::input),
    ];
    leaf.prop_recursive(4, 24, 2, move |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::and(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::or(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::implies(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::iff(a, b)),
            inner.prop_map(move |a| if a.depth() < max_depth { Formula::next(a) } else { a }),
        ]
    })
}

fn valuation(bits: u32) -> impl FnMut(u32, &str) -> bool {
    move |d, v| {
        let k = ["a", "b", "c"].iter().position(|x| *x == v).unwrap() as u32;
        bits >> (d * 3 + k) & 1 == 1
    }
}

proptest! {
    #[test]
    fn dnf_preserves_the_truth_table(f in arb_prop(2)) {
        let dnf = to_dnf(&f).unwrap();
        let g = dnf_to_formula(&dnf);
        for bits in 0u32..1 << 9 {
            prop_assert_eq!(f.eval_prop(&mut valuation(bits)), g.eval_prop(&mut valuation(bits)), "{}", f);
        }
        for c in &dnf {
            prop_assert_eq!(c.depth, c.max_lit_depth());
        }
    }

    #[test]
    fn prime_implicants_are_equivalent_and_irredundant(f in arb_prop(1)) {
        let dnf = to_dnf(&f).unwrap();
        let pis = prime_implicants(&dnf).unwrap();
        let g = dnf_to_formula(&pis);
        for bits in 0u32..1 << 6 {
            prop_assert_eq!(f.eval_prop(&mut valuation(bits)), g.eval_prop(&mut valuation(bits)));
        }
        // dropping any literal of a prime implicant breaks implication
        for c in &pis {
            for k in 0..c.lits.len() {
                let mut weaker = c.lits.clone();
                weaker.remove(k);
                let w = DnfClause::from_lits(weaker).unwrap().to_formula();
                let implied = (0u32..1 << 6).all(|bits| !w.eval_prop(&mut valuation(bits)) || f.eval_prop(&mut valuation(bits)));
                prop_assert!(!implied, "{} is not prime for {}", c.to_formula(), f);
            }
        }
    }

    #[test]
    fn display_parses_back(f in arb_prop(2)) {
        let text = f.to_string();
        let g = parse_formula(&text, &["a", "b", "c"], &[]).unwrap();
        prop_assert_eq!(g, f);
    }

    #[test]
    fn omega_is_monotone_in_conjuncts(n in 1usize..6, d in 0u32..3) {
        let mut src = String::from("input a, b;\noutput o;\n");
        let mut last = 0;
        for k in 0..n {
            src.push_str(&format!("S{k}: G(a -> {}o);\n", "X ".repeat(d as usize)));
            let om = compute_omega(&parse_spec(&src).unwrap());
            prop_assert!(om > last);
            prop_assert_eq!(om, (k as u32 + 1) * (d + 1));
            last = om;
        }
    }
}

#[test]
fn dnf_of_edge_and_negation() {
    let f = parse_formula("!(a | !X b)", &["a", "b"], &[]).unwrap();
    let d = to_dnf(&f).unwrap();
    assert_eq!(display_dnf(&d), "!a & X b");
    let f = parse_formula("a & !a", &["a"], &[]).unwrap();
    assert!(to_dnf(&f).unwrap().is_empty());
    let f = parse_formula("a | !a", &["a"], &[]).unwrap();
    assert_eq!(to_dnf(&f).unwrap().len(), 2);
    let g = parse_formula("G a", &["a"], &[]).unwrap();
    assert!(matches!(to_dnf(&g), Err(FormulaError::TemporalOperatorInPropositionalContext(_))));
}

#[test]
fn consensus_finds_the_hidden_implicant() {
    let f = parse_formula("(a & b) | (!a & c)", &["a", "b", "c"], &[]).unwrap();
    let pis = prime_implicants(&to_dnf(&f).unwrap()).unwrap();
    assert_eq!(display_dnf(&pis).split(" | ").count(), 3);
    let t = parse_formula("a | !a", &["a"], &[]).unwrap();
    let pis = prime_implicants(&to_dnf(&t).unwrap()).unwrap();
    assert_eq!(pis, vec![DnfClause { lits: vec![], depth: 0 }]);
}

#[test]
fn padding_raises_depth_only() {
    let c = DnfClause::from_lits([Literal::new(1, "a", true, Io::Input)]).unwrap();
    let p = pad_clause(&c, 3).unwrap();
    assert_eq!((p.depth, p.lits.clone()), (3, c.lits.clone()));
    assert_eq!(
        pad_clause(&p, 2).unwrap_err(),
        FormulaError::DepthExceeded { depth: 3, limit: 2 }
    );
}

#[test]
fn door_conjuncts_are_classified() {
    let spec = parse_spec(DOOR).unwrap();
    let got: BTreeMap<&str, PatternId> = spec.subspecs.iter().map(|s| (s.label.as_str(), s.pattern())).collect();
    use PatternId::*;
    let want: BTreeMap<&str, PatternId> =
        [("S1", P2), ("S2", P2), ("S3", P1), ("S4", P3), ("S5", P4), ("S6", P3), ("S7", P5)].into_iter().collect();
    assert_eq!(got, want);
    assert_eq!(spec.inputs, vec!["in0", "in1", "in2", "t0expire"]);
    assert_eq!(spec.outputs, vec!["out0", "out1", "t0start"]);
    assert!(!spec.unroll_exact());

    let s1 = &spec.by_label("S1").unwrap().parts;
    assert_eq!(s1.depth, 1);
    assert_eq!(display_dnf(&s1.trigger), "!in0 & X in0");
    assert_eq!(display_dnf(&s1.release_in), "in2");
    assert!(s1.release_out.is_empty());
    assert_eq!(s1.out().to_string(), "out0");

    let s2 = &spec.by_label("S2").unwrap().parts;
    assert_eq!(display_dnf(&s2.release_in), "in0 | in1");
    assert_eq!(display_dnf(&s2.release_out), "out0");
    assert_eq!(&project_parts(&reassemble(s2), PatternId::P2).unwrap(), s2);
}

#[test]
fn omega_of_the_door() {
    assert_eq!(compute_omega(&parse_spec(DOOR).unwrap()), 10);
    assert_eq!(compute_omega(&parse_spec(DOOR_NO_S6).unwrap()), 9);
    let single = parse_spec("input a; output o; G(a -> o);").unwrap();
    assert_eq!(compute_omega(&single), 1);
    let two = parse_spec("input a, b; output o; G((!a & X a) -> X(o W b)); G((!b & X b) -> X(!o W a));").unwrap();
    assert_eq!(compute_omega(&two), 4);
}

#[test]
fn rejections_are_reported() {
    let e = parse_spec("input a; output o; G(o -> a);").unwrap_err();
    assert!(e.is_pattern_rejection(), "{e}");
    let e = parse_spec("input a; output o; G(a -> (o W X o));").unwrap_err();
    assert!(e.is_pattern_rejection(), "{e}");
    let e = parse_spec("input a; output o; G(a -> o").unwrap_err();
    assert!(matches!(e, SpecError::Parse(_)));
    assert!(!e.is_pattern_rejection());
    let e = parse_spec("input a; output a; G(a);").unwrap_err();
    assert!(!e.is_pattern_rejection());
    let e = parse_spec("input a; output o; G(a -> zz);").unwrap_err();
    assert!(matches!(e, SpecError::Parse(_)), "{e}");
}

#[test]
fn spec_display_parses_back() {
    for src in [DOOR, DOOR_NO_S6] {
        let spec = parse_spec(src).unwrap();
        let again = parse_spec(&spec.to_string()).unwrap();
        assert_eq!(again.subspecs.len(), spec.subspecs.len());
        for (a, b) in spec.subspecs.iter().zip(&again.subspecs) {
            assert_eq!(a.parts, b.parts);
        }
    }
}

#[test]
fn three_valued_clause_evaluation() {
    let c = DnfClause::from_lits([Literal::new(0, "a", true, Io::Input), Literal::new(1, "b", false, Io::Input)]).unwrap();
    let mut known_a = |d: u32, v: &str| if d == 0 && v == "a" { Some(true) } else { None };
    assert_eq!(c.eval3(&mut known_a), None);
    let mut a_false = |d: u32, v: &str| if d == 0 && v == "a" { Some(false) } else { None };
    assert_eq!(c.eval3(&mut a_false), Some(false));
    let mut all = |_: u32, v: &str| Some(v == "a");
    assert_eq!(c.eval3(&mut all), Some(true));
}
