use std::collections::{BTreeSet, HashMap};

use super::system::{ActorSystem, Endpoint, SdfError};

/// One element of an evaluation ordering Ξ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    Wire(usize),
    Actor(usize),
}

/// Which ready actor Kahn's algorithm picks first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TieBreak {
    #[default]
    Forward,
    Reverse,
}

/// Index of a port in the port graph.
pub(crate) struct PortGraph {
    pub names: Vec<String>,
    pub index: HashMap<Endpoint, usize>,
    pub succ: Vec<Vec<usize>>,
}

fn port_name(e: &Endpoint) -> String {
    e.to_string()
}

/// Checks endpoints, directions and single drivers; builds the port graph with
/// wire edges plus every actor input to every actor output.
pub(crate) fn port_graph(sys: &ActorSystem) -> Result<PortGraph, SdfError> {
    let mut names = Vec::new();
    let mut index = HashMap::new();
    let mut sources = BTreeSet::new();
    let mut sinks = BTreeSet::new();
    let mut add = |e: Endpoint, names: &mut Vec<String>| {
        let n = names.len();
        names.push(port_name(&e));
        index.insert(e, n);
        n
    };
    let mut ids = BTreeSet::new();
    for a in &sys.actors {
        if !ids.insert(a.id.as_str()) {
            return Err(SdfError::DuplicateActor(a.id.clone()));
        }
    }
    for v in &sys.inputs {
        sources.insert(add(Endpoint::ext(v), &mut names));
    }
    for v in &sys.outputs {
        sinks.insert(add(Endpoint::ext(v), &mut names));
    }
    let mut internal = Vec::new();
    for a in &sys.actors {
        let ins: Vec<usize> = a
            .kind
            .input_ports()
            .iter()
            .map(|p| {
                let n = add(Endpoint::port(&a.id, p), &mut names);
                sinks.insert(n);
                n
            })
            .collect();
        let outs: Vec<usize> = a
            .kind
            .output_ports()
            .iter()
            .map(|p| {
                let n = add(Endpoint::port(&a.id, p), &mut names);
                sources.insert(n);
                n
            })
            .collect();
        internal.push((ins, outs));
    }
    let mut succ = vec![Vec::new(); names.len()];
    for (ins, outs) in &internal {
        for &i in ins {
            succ[i].extend(outs.iter().copied());
        }
    }
    let mut driven = vec![0usize; names.len()];
    for w in &sys.wires {
        let f = *index
            .get(&w.from)
            .ok_or_else(|| SdfError::UnknownEndpoint(w.from.to_string()))?;
        let t = *index
            .get(&w.to)
            .ok_or_else(|| SdfError::UnknownEndpoint(w.to.to_string()))?;
        if !sources.contains(&f) || !sinks.contains(&t) {
            return Err(SdfError::BadDirection(w.from.to_string(), w.to.to_string()));
        }
        driven[t] += 1;
        succ[f].push(t);
    }
    for &s in &sinks {
        match driven[s] {
            0 => return Err(SdfError::UnwiredPort(names[s].clone())),
            1 => {}
            _ => return Err(SdfError::MultiplyDriven(names[s].clone())),
        }
    }
    Ok(PortGraph { names, index, succ })
}

/// Tarjan's algorithm, iterative. Returns the non-trivial components
/// (more than one node, or a node with a self edge).
pub fn cyclic_components(succ: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let n = succ.len();
    const NONE: usize = usize::MAX;
    let mut idx = vec![NONE; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut next = 0;
    let mut out = Vec::new();
    for root in 0..n {
        if idx[root] != NONE {
            continue;
        }
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        idx[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;
        while let Some(&(v, k)) = call.last() {
            if k < succ[v].len() {
                let w = succ[v][k];
                if let Some(top) = call.last_mut() {
                    top.1 += 1;
                }
                if idx[w] == NONE {
                    idx[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(idx[w]);
                }
            } else {
                call.pop();
                if let Some(&(p, _)) = call.last() {
                    low[p] = low[p].min(low[v]);
                }
                if low[v] == idx[v] {
                    let mut comp = Vec::new();
                    loop {
                        let w = stack.pop().expect("tarjan stack");
                        on_stack[w] = false;
                        comp.push(w);
                        if w == v {
                            break;
                        }
                    }
                    if comp.len() > 1 || succ[v].contains(&v) {
                        comp.sort_unstable();
                        out.push(comp);
                    }
                }
            }
        }
    }
    out
}

/// Computes Ξ: for each actor in dependency order its incoming wires then the
/// actor itself, finally the wires into external outputs.
pub fn evaluation_order(sys: &ActorSystem) -> Result<Vec<Step>, SdfError> {
    evaluation_order_with(sys, TieBreak::Forward)
}

pub fn evaluation_order_with(sys: &ActorSystem, tie: TieBreak) -> Result<Vec<Step>, SdfError> {
    let g = port_graph(sys)?;
    if let Some(c) = cyclic_components(&g.succ).into_iter().next() {
        return Err(SdfError::CycleError {
            scc: c.into_iter().map(|n| g.names[n].clone()).collect(),
        });
    }
    let aidx = sys.actor_index();
    let na = sys.actors.len();
    let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); na];
    let mut deps: Vec<usize> = vec![0; na];
    let mut users: Vec<Vec<usize>> = vec![Vec::new(); na];
    let mut tail = Vec::new();
    for (wi, w) in sys.wires.iter().enumerate() {
        match &w.to {
            Endpoint::Port { actor, .. } => {
                let t = aidx[actor.as_str()];
                incoming[t].push(wi);
                if let Endpoint::Port { actor: src, .. } = &w.from {
                    let s = aidx[src.as_str()];
                    users[s].push(t);
                    deps[t] += 1;
                }
            }
            Endpoint::Ext(_) => tail.push(wi),
        }
    }
    let mut ready: BTreeSet<usize> = (0..na).filter(|&a| deps[a] == 0).collect();
    let mut steps = Vec::with_capacity(na + sys.wires.len());
    while let Some(a) = match tie {
        TieBreak::Forward => ready.pop_first(),
        TieBreak::Reverse => ready.pop_last(),
    } {
        steps.extend(incoming[a].iter().map(|&w| Step::Wire(w)));
        steps.push(Step::Actor(a));
        for &u in &users[a] {
            deps[u] -= 1;
            if deps[u] == 0 {
                ready.insert(u);
            }
        }
    }
    debug_assert_eq!(steps.len() + tail.len(), na + sys.wires.len());
    steps.extend(tail.into_iter().map(Step::Wire));
    Ok(steps)
}

/// Checks that `steps` is a dataflow-consistent ordering of the whole system.
pub fn is_valid_order(sys: &ActorSystem, steps: &[Step]) -> bool {
    if steps.len() != sys.actors.len() + sys.wires.len() {
        return false;
    }
    let aidx = sys.actor_index();
    let mut fired = vec![false; sys.actors.len()];
    let mut moved = vec![false; sys.wires.len()];
    for s in steps {
        match *s {
            Step::Wire(w) => {
                if moved[w] {
                    return false;
                }
                if let Endpoint::Port { actor, .. } = &sys.wires[w].from {
                    if !fired[aidx[actor.as_str()]] {
                        return false;
                    }
                }
                moved[w] = true;
            }
            Step::Actor(a) => {
                if fired[a] {
                    return false;
                }
                let id = &sys.actors[a].id;
                let all_in = sys.wires.iter().enumerate().all(|(wi, w)| match &w.to {
                    Endpoint::Port { actor, .. } if actor == id => moved[wi],
                    _ => true,
                });
                if !all_in {
                    return false;
                }
                fired[a] = true;
            }
        }
    }
    true
}
