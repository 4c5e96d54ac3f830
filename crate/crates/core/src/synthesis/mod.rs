//! Structural construction of the controller: high-level controllers, resolution
//! actors, monitors, Θ controllers and their wiring, followed by monitor sharing.

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::{
    prime_implicants, to_dnf, DnfClause, Formula, GxwSpec, Io, Literal, PatternId, SubSpec,
};
use crate::sdf::{ActorKind, ActorSystem, Endpoint};

/// A constructed system whose resolution parameters are still open.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialSystem {
    pub sys: ActorSystem,
    /// Output variable to the indices of the conjuncts writing it, in port order.
    pub map_out: BTreeMap<String, Vec<usize>>,
    /// Output variable to its resolution actor id.
    pub res: BTreeMap<String, String>,
    /// Conjunct index to its high-level controller id (P1 to P3).
    pub highlevel: BTreeMap<usize, String>,
}

impl PartialSystem {
    /// Conjunct label to the ids of actors introduced for it.
    pub fn provenance(&self) -> BTreeMap<String, BTreeSet<String>> {
        let mut m: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for a in &self.sys.actors {
            for p in &a.provenance {
                m.entry(p.clone()).or_default().insert(a.id.clone());
            }
        }
        m
    }

    /// The endpoint carrying the resolved value of output `v`.
    pub fn output_source(&self, v: &str) -> Option<Endpoint> {
        self.sys.source_of(&Endpoint::ext(v)).cloned()
    }

    /// Resolution actor ids in output declaration order.
    pub fn res_ids(&self) -> Vec<String> {
        self.sys
            .outputs
            .iter()
            .filter_map(|v| self.res.get(v).cloned())
            .collect()
    }
}

fn prov(s: &SubSpec) -> Vec<String> {
    vec![s.label.clone()]
}

fn active(s: &SubSpec) -> bool {
    s.pattern().writes_output() && !s.is_vacuous()
}

/// High-level controllers, resolution actors, negations and output wiring.
pub fn build_skeleton(spec: &GxwSpec) -> PartialSystem {
    let mut sys = ActorSystem::new(spec.inputs.clone(), spec.outputs.clone());
    let mut map_out: BTreeMap<String, Vec<usize>> = BTreeMap::new();
    let mut highlevel = BTreeMap::new();
    for s in spec.subspecs.iter().filter(|s| active(s)) {
        map_out
            .entry(s.parts.out().var.clone())
            .or_default()
            .push(s.index);
        let kind = match s.pattern() {
            PatternId::P1 => ActorKind::InUB,
            PatternId::P2 => ActorKind::TrUB,
            PatternId::P3 => ActorKind::IfTB,
            _ => continue,
        };
        let id = format!("{}_{}", kind.name(), s.index);
        sys.add_named(&id, kind, &prov(s));
        highlevel.insert(s.index, id);
    }
    let mut res = BTreeMap::new();
    for v in &spec.outputs {
        let Some(list) = map_out.get(v) else {
            log::warn!("output `{v}` is not constrained; it is driven constant false");
            let c = sys.add("CONST", ActorKind::Const { value: false }, &[]);
            sys.connect(Endpoint::port(&c, "out"), Endpoint::ext(v));
            continue;
        };
        let labels: Vec<String> = list.iter().map(|&m| spec.subspec(m).label.clone()).collect();
        let rid = format!("Res_{v}");
        sys.add_named(
            &rid,
            ActorKind::Res {
                n: list.len(),
                a: None,
            },
            &labels,
        );
        for (ind, &m) in list.iter().enumerate() {
            let s = spec.subspec(m);
            let Some(hl) = highlevel.get(&m) else { continue };
            let src = Endpoint::port(hl, "output");
            connect_polarity(&mut sys, src, s, Endpoint::port(&rid, &format!("in{ind}")));
        }
        sys.connect(Endpoint::port(&rid, "out"), Endpoint::ext(v));
        res.insert(v.clone(), rid);
    }
    PartialSystem {
        sys,
        map_out,
        res,
        highlevel,
    }
}

/// Wires `src` to `dst`, through a negation when the conjunct's output literal is negative.
fn connect_polarity(sys: &mut ActorSystem, src: Endpoint, s: &SubSpec, dst: Endpoint) {
    if s.parts.out().positive {
        sys.connect(src, dst);
    } else {
        let n = sys.add("NOT", ActorKind::Not, &prov(s));
        sys.connect(src, Endpoint::port(&n, "in"));
        sys.connect(Endpoint::port(&n, "out"), dst);
    }
}

fn add_monitor(sys: &mut ActorSystem, kind: ActorKind, prefix: &str, s: &SubSpec) -> Endpoint {
    let ports = kind.input_ports();
    let id = sys.add(prefix, kind, &prov(s));
    for v in ports {
        sys.connect(Endpoint::ext(&v), Endpoint::port(&id, &v));
    }
    Endpoint::port(&id, "out")
}

/// Joins `sources` by an OR gate (elided for a single source) and returns its output.
fn or_join(sys: &mut ActorSystem, sources: Vec<Endpoint>, s: &SubSpec) -> Endpoint {
    match sources.len() {
        0 => {
            let c = sys.add("CONST", ActorKind::Const { value: false }, &prov(s));
            Endpoint::port(&c, "out")
        }
        1 => sources.into_iter().next().unwrap(),
        n => {
            let g = sys.add("OR", ActorKind::Or { n }, &prov(s));
            for (k, e) in sources.into_iter().enumerate() {
                sys.connect(e, Endpoint::port(&g, &format!("in{k}")));
            }
            Endpoint::port(&g, "out")
        }
    }
}

/// The endpoint feeding `TrUB.input` etc.; the trigger OR output of conjunct `m`.
fn trigger_source(ps: &PartialSystem, m: usize) -> Option<Endpoint> {
    let hl = ps.highlevel.get(&m)?;
    ps.sys.source_of(&Endpoint::port(hl, "input")).cloned()
}

/// One monitor per trigger clause, joined by OR into the high-level controller input.
pub fn wire_input_parts(ps: &mut PartialSystem, spec: &GxwSpec) {
    for s in spec.subspecs.iter().filter(|s| active(s)) {
        let Some(hl) = ps.highlevel.get(&s.index).cloned() else {
            continue;
        };
        let mons: Vec<Endpoint> = s
            .parts
            .trigger
            .iter()
            .map(|c| {
                add_monitor(
                    &mut ps.sys,
                    ActorKind::Monitor { clause: c.clone() },
                    "Mon",
                    s,
                )
            })
            .collect();
        let src = or_join(&mut ps.sys, mons, s);
        ps.sys.connect(src, Endpoint::port(&hl, "input"));
    }
}

/// Release logic of every P2 conjunct: input clauses (through Θ_h when the clause
/// looks ahead) first, then output clauses read from the resolved outputs.
pub fn wire_release_parts(ps: &mut PartialSystem, spec: &GxwSpec) {
    for s in spec
        .subspecs
        .iter()
        .filter(|s| active(s) && s.pattern() == PatternId::P2)
    {
        let hl = ps.highlevel[&s.index].clone();
        let set = trigger_source(ps, s.index).expect("trigger wired before release");
        let mut items = Vec::new();
        for c in &s.parts.release_in {
            let mon = add_monitor(
                &mut ps.sys,
                ActorKind::Monitor { clause: c.clone() },
                "Mon",
                s,
            );
            if c.depth == 0 {
                items.push(mon);
            } else {
                let th = ps.sys.add("Theta", ActorKind::Theta { h: c.depth }, &prov(s));
                ps.sys.connect(set.clone(), Endpoint::port(&th, "set"));
                ps.sys.connect(mon, Endpoint::port(&th, "in"));
                items.push(Endpoint::port(&th, "out"));
            }
        }
        for c in &s.parts.release_out {
            let lits: Vec<Endpoint> = c
                .lits
                .iter()
                .map(|l| output_literal(ps, &l.var, l.positive, s))
                .collect();
            let e = match lits.len() {
                0 => {
                    let k = ps.sys.add("CONST", ActorKind::Const { value: true }, &prov(s));
                    Endpoint::port(&k, "out")
                }
                1 => lits.into_iter().next().unwrap(),
                n => {
                    let g = ps.sys.add("AND", ActorKind::And { n }, &prov(s));
                    for (k, e) in lits.into_iter().enumerate() {
                        ps.sys.connect(e, Endpoint::port(&g, &format!("in{k}")));
                    }
                    Endpoint::port(&g, "out")
                }
            };
            items.push(e);
        }
        let src = or_join(&mut ps.sys, items, s);
        ps.sys.connect(src, Endpoint::port(&hl, "release"));
    }
}

/// Source of `v` (or of its negation, through a shared `NOT_Res_v` actor).
fn output_literal(ps: &mut PartialSystem, v: &str, positive: bool, s: &SubSpec) -> Endpoint {
    let src = ps
        .output_source(v)
        .expect("every declared output is driven by the skeleton");
    if positive {
        return src;
    }
    let base = match &src {
        Endpoint::Port { actor, .. } => actor.clone(),
        Endpoint::Ext(x) => x.clone(),
    };
    let id = format!("NOT_{base}");
    if let Some(a) = ps.sys.actor_mut(&id) {
        if !a.provenance.contains(&s.label) {
            a.provenance.push(s.label.clone());
        }
    } else {
        ps.sys.add_named(&id, ActorKind::Not, &prov(s));
        ps.sys.connect(src, Endpoint::port(&id, "in"));
    }
    Endpoint::port(&id, "out")
}

/// P4 conjuncts: P4 monitors joined by OR into their resolution input.
pub fn wire_p4(ps: &mut PartialSystem, spec: &GxwSpec) {
    for s in spec
        .subspecs
        .iter()
        .filter(|s| active(s) && s.pattern() == PatternId::P4)
    {
        let mut clauses = s.parts.trigger.clone();
        let negate_all = clauses.is_empty();
        if negate_all {
            // G(false <-> X^i out): a P4 monitor of `true`, negated.
            clauses.push(DnfClause {
                lits: vec![],
                depth: s.parts.depth,
            });
        }
        let mons: Vec<Endpoint> = clauses
            .iter()
            .map(|c| {
                add_monitor(
                    &mut ps.sys,
                    ActorKind::P4Monitor { clause: c.clone() },
                    "P4Mon",
                    s,
                )
            })
            .collect();
        let mut src = or_join(&mut ps.sys, mons, s);
        if negate_all {
            let n = ps.sys.add("NOT", ActorKind::Not, &prov(s));
            ps.sys.connect(src, Endpoint::port(&n, "in"));
            src = Endpoint::port(&n, "out");
        }
        let v = &s.parts.out().var;
        let ind = ps.map_out[v].iter().position(|&m| m == s.index).unwrap();
        let rid = ps.res[v].clone();
        connect_polarity(&mut ps.sys, src, s, Endpoint::port(&rid, &format!("in{ind}")));
    }
}

/// Steps 1 to 3 without optimization.
pub fn build_unshared(spec: &GxwSpec) -> PartialSystem {
    let mut ps = build_skeleton(spec);
    wire_input_parts(&mut ps, spec);
    wire_release_parts(&mut ps, spec);
    wire_p4(&mut ps, spec);
    ps
}

/// The full construction, with monitor sharing and completed releases.
pub fn build(spec: &GxwSpec) -> PartialSystem {
    build_with(spec, &BuildOptions::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuildOptions {
    /// Replace P1 events and P2 input releases by all their prime implicants.
    pub complete_releases: bool,
    pub share_monitors: bool,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            complete_releases: true,
            share_monitors: true,
        }
    }
}

pub fn build_with(spec: &GxwSpec, opts: &BuildOptions) -> PartialSystem {
    let completed;
    let spec = if opts.complete_releases {
        completed = complete_releases(spec);
        &completed
    } else {
        spec
    };
    let mut ps = build_unshared(spec);
    if opts.share_monitors {
        share_monitors(&mut ps);
    }
    ps
}

/// A monitor reports its clause only once the whole window has been seen, so a
/// release that is already decided by a shorter prefix (say `X a | !X a`, or
/// `!X a | (!a & X a)` which implies `!a`) would reach the controller late.
/// With every prime implicant present, each forcing prefix has its own clause.
/// Implicants are taken modulo the assumption at every offset of the window,
/// and clauses the assumption rules out are dropped, so the rewritten parts are
/// equivalent to the originals on every assumption-respecting trace.
pub fn complete_releases(spec: &GxwSpec) -> GxwSpec {
    let mut out = spec.clone();
    for s in &mut out.subspecs {
        let cls = match s.pattern() {
            PatternId::P1 => &mut s.parts.trigger,
            PatternId::P2 => &mut s.parts.release_in,
            _ => continue,
        };
        let depth = cls.iter().map(|c| c.depth).max().unwrap_or(0);
        let Some(env) = AssumptionWindow::new(spec, depth) else {
            log::warn!("{}: assumption too large, release left as written", s.label);
            continue;
        };
        let mut all = cls.clone();
        all.extend(env.negated.iter().cloned());
        match prime_implicants(&all) {
            Some(p) => {
                let p: Vec<DnfClause> = p.into_iter().filter(|c| env.consistent(c)).collect();
                if p != *cls {
                    log::debug!("{}: release completed to {} clauses", s.label, p.len());
                }
                *cls = p;
            }
            None => log::warn!("{}: too many prime implicants, release left as written", s.label),
        }
    }
    out
}

/// The assumption at offsets `0..=depth` of a window.
struct AssumptionWindow<'a> {
    spec: &'a GxwSpec,
    depth: u32,
    vars: Vec<String>,
    /// DNF of the negated assumption, shifted to every offset.
    negated: Vec<DnfClause>,
}

impl<'a> AssumptionWindow<'a> {
    const MAX_VARS: usize = 16;

    fn new(spec: &'a GxwSpec, depth: u32) -> Option<AssumptionWindow<'a>> {
        let vars: Vec<String> = spec.assumption.vars().into_iter().map(|(v, _)| v).collect();
        if !spec.has_assumption() {
            return Some(AssumptionWindow {
                spec,
                depth,
                vars,
                negated: Vec::new(),
            });
        }
        if vars.len() > Self::MAX_VARS {
            return None;
        }
        let neg = to_dnf(&Formula::not(spec.assumption.clone())).ok()?;
        let negated = (0..=depth)
            .flat_map(|k| {
                neg.iter().filter_map(move |c| {
                    DnfClause::from_lits(c.lits.iter().map(|l| Literal {
                        depth: l.depth + k,
                        ..l.clone()
                    }))
                })
            })
            .collect();
        Some(AssumptionWindow {
            spec,
            depth,
            vars,
            negated,
        })
    }

    /// Whether some assumption-respecting window satisfies `c`.
    fn consistent(&self, c: &DnfClause) -> bool {
        if !self.spec.has_assumption() {
            return true;
        }
        (0..=self.depth.max(c.depth)).all(|k| {
            let fixed: Vec<(&str, bool)> = c
                .lits
                .iter()
                .filter(|l| l.depth == k)
                .map(|l| (l.var.as_str(), l.positive))
                .collect();
            let free: Vec<&String> = self
                .vars
                .iter()
                .filter(|v| !fixed.iter().any(|(f, _)| f == v))
                .collect();
            (0..1u64 << free.len()).any(|code| {
                self.spec.assumption.eval_prop(&mut |_, v| {
                    if let Some((_, b)) = fixed.iter().find(|(f, _)| *f == v) {
                        return *b;
                    }
                    let k = free.iter().position(|f| *f == v).expect("assumption variable");
                    code >> k & 1 == 1
                })
            })
        })
    }
}

fn sources_of(sys: &ActorSystem, id: &str, kind: &ActorKind) -> Vec<Option<Endpoint>> {
    kind.input_ports()
        .iter()
        .map(|p| sys.source_of(&Endpoint::port(id, p)).cloned())
        .collect()
}

fn shareable(k: &ActorKind) -> bool {
    matches!(
        k,
        ActorKind::Monitor { .. }
            | ActorKind::P4Monitor { .. }
            | ActorKind::Theta { .. }
            | ActorKind::Not
            | ActorKind::Or { .. }
            | ActorKind::And { .. }
            | ActorKind::Const { .. }
    )
}

/// Redirects every wire leaving `old` to leave `new` instead.
fn redirect(sys: &mut ActorSystem, old: &Endpoint, new: &Endpoint) {
    for w in &mut sys.wires {
        if &w.from == old {
            w.from = new.clone();
        }
    }
}

fn remove_actor(sys: &mut ActorSystem, id: &str) {
    sys.actors.retain(|a| a.id != id);
    sys.wires.retain(|w| {
        !matches!(&w.to, Endpoint::Port { actor, .. } if actor == id)
            && !matches!(&w.from, Endpoint::Port { actor, .. } if actor == id)
    });
}

fn merge_provenance(sys: &mut ActorSystem, into: &str, from: &[String]) {
    if let Some(a) = sys.actor_mut(into) {
        for p in from {
            if !a.provenance.contains(p) {
                a.provenance.push(p.clone());
            }
        }
    }
}

/// Merges actors with equal behavior and equal input sources. Returns true if
/// anything changed.
fn merge_duplicates(sys: &mut ActorSystem) -> bool {
    let mut seen: BTreeMap<String, String> = BTreeMap::new();
    let mut merges = Vec::new();
    for a in &sys.actors {
        if !shareable(&a.kind) {
            continue;
        }
        let key = format!("{:?}|{:?}", a.kind, sources_of(sys, &a.id, &a.kind));
        match seen.get(&key) {
            Some(keep) => merges.push((keep.clone(), a.id.clone())),
            None => {
                seen.insert(key, a.id.clone());
            }
        }
    }
    if merges.is_empty() {
        return false;
    }
    for (keep, dup) in merges {
        let p = sys.actor(&dup).map(|a| a.provenance.clone()).unwrap_or_default();
        merge_provenance(sys, &keep, &p);
        redirect(sys, &Endpoint::port(&dup, "out"), &Endpoint::port(&keep, "out"));
        remove_actor(sys, &dup);
    }
    true
}

/// Replaces depth-0 monitors by wires and gates over the external inputs.
fn flatten_combinational(sys: &mut ActorSystem) -> bool {
    let targets: Vec<(String, DnfClause, Vec<String>)> = sys
        .actors
        .iter()
        .filter_map(|a| match &a.kind {
            ActorKind::Monitor { clause } if clause.depth == 0 => {
                Some((a.id.clone(), clause.clone(), a.provenance.clone()))
            }
            _ => None,
        })
        .collect();
    let changed = !targets.is_empty();
    for (id, clause, prov) in targets {
        let lit_src = |sys: &mut ActorSystem, l: &Literal| -> Endpoint {
            debug_assert_eq!(l.io, Io::Input);
            let e = Endpoint::ext(&l.var);
            if l.positive {
                return e;
            }
            let n = sys.add("NOT", ActorKind::Not, &prov);
            sys.connect(e, Endpoint::port(&n, "in"));
            Endpoint::port(&n, "out")
        };
        let new = match clause.lits.len() {
            0 => {
                let c = sys.add("CONST", ActorKind::Const { value: true }, &prov);
                Endpoint::port(&c, "out")
            }
            1 => lit_src(sys, &clause.lits[0]),
            n => {
                let g = sys.add("AND", ActorKind::And { n }, &prov);
                for (k, l) in clause.lits.iter().enumerate() {
                    let e = lit_src(sys, l);
                    sys.connect(e, Endpoint::port(&g, &format!("in{k}")));
                }
                Endpoint::port(&g, "out")
            }
        };
        redirect(sys, &Endpoint::port(&id, "out"), &new);
        remove_actor(sys, &id);
    }
    changed
}

/// Shares identical monitors (and any other identical stateless or stateful
/// helper fed by the same sources) and turns depth-0 monitors into circuits.
/// Reaches a fixpoint, so applying it twice is the same as once.
pub fn share_monitors(ps: &mut PartialSystem) {
    flatten_combinational(&mut ps.sys);
    while merge_duplicates(&mut ps.sys) {}
}
