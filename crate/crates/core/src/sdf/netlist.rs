//! JSON netlist and DOT export/import. Both round-trip exactly.

use serde::{Deserialize, Serialize};

use super::mealy::{MealyMachine, StateVar, Transition, Tri};
use super::system::{Actor, ActorKind, ActorSystem, Endpoint, PortValue, SdfError, Wire};
use crate::blocks::machine_of;
use crate::formula::DnfClause;

/// Tables are only emitted when `inputs + state bits` stays below this.
const TABLE_BITS_LIMIT: usize = 16;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetlistJson {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub actors: Vec<ActorJson>,
    pub wires: Vec<WireJson>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActorJson {
    pub id: String,
    pub kind: String,
    pub provenance: Vec<String>,
    pub params: Params,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mealy: Option<MealyJson>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params {
    #[serde(rename = "A", default, skip_serializing_if = "Option::is_none")]
    pub a: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arity: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub clause: Option<DnfClause>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub h: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarJson {
    pub name: String,
    /// 2 or 3.
    pub values: u8,
}

/// A transition is written `state/input/output/next` using `0 1 u -`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MealyJson {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub vars: Vec<VarJson>,
    pub init: String,
    pub transitions: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WireJson {
    pub from: String,
    pub to: String,
}

fn err(m: impl Into<String>) -> SdfError {
    SdfError::Netlist(m.into())
}

fn tri_str(v: &[Tri]) -> String {
    v.iter().map(|t| t.symbol()).collect()
}

fn bool_str(v: &[bool]) -> String {
    v.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

fn port_str(v: &[PortValue]) -> String {
    v.iter().map(|p| p.symbol()).collect()
}

impl MealyJson {
    pub fn from_machine(m: &MealyMachine) -> MealyJson {
        MealyJson {
            inputs: m.inputs.clone(),
            outputs: m.outputs.clone(),
            vars: m
                .vars
                .iter()
                .map(|v| VarJson {
                    name: v.name.clone(),
                    values: if v.three_valued { 3 } else { 2 },
                })
                .collect(),
            init: tri_str(&m.init),
            transitions: m
                .transitions
                .iter()
                .map(|t| {
                    format!(
                        "{}/{}/{}/{}",
                        tri_str(&t.state),
                        bool_str(&t.input),
                        port_str(&t.output),
                        tri_str(&t.next)
                    )
                })
                .collect(),
        }
    }

    pub fn to_machine(&self) -> Result<MealyMachine, SdfError> {
        let tris = |s: &str| -> Result<Vec<Tri>, SdfError> {
            s.chars()
                .map(|c| Tri::from_symbol(c).ok_or_else(|| err(format!("bad state symbol {c:?}"))))
                .collect()
        };
        let mut transitions = Vec::new();
        for t in &self.transitions {
            let parts: Vec<&str> = t.split('/').collect();
            if parts.len() != 4 {
                return Err(err(format!("bad transition `{t}`")));
            }
            let input = parts[1]
                .chars()
                .map(|c| match c {
                    '0' => Ok(false),
                    '1' => Ok(true),
                    _ => Err(err(format!("bad input symbol {c:?}"))),
                })
                .collect::<Result<_, _>>()?;
            let output = parts[2]
                .chars()
                .map(|c| PortValue::from_symbol(c).ok_or_else(|| err(format!("bad output {c:?}"))))
                .collect::<Result<_, _>>()?;
            transitions.push(Transition {
                state: tris(parts[0])?,
                input,
                output,
                next: tris(parts[3])?,
            });
        }
        Ok(MealyMachine {
            inputs: self.inputs.clone(),
            outputs: self.outputs.clone(),
            vars: self
                .vars
                .iter()
                .map(|v| StateVar {
                    name: v.name.clone(),
                    three_valued: v.values == 3,
                })
                .collect(),
            init: tris(&self.init)?,
            transitions,
        })
    }
}

fn is_machine(k: &ActorKind) -> bool {
    matches!(
        k,
        ActorKind::IfTB
            | ActorKind::InUB
            | ActorKind::TrUB
            | ActorKind::Monitor { .. }
            | ActorKind::P4Monitor { .. }
            | ActorKind::Theta { .. }
    )
}

pub fn actor_to_json(a: &Actor) -> ActorJson {
    let mut params = Params::default();
    match &a.kind {
        ActorKind::Or { n } | ActorKind::And { n } => params.arity = Some(*n),
        ActorKind::Res { n, a } => {
            params.arity = Some(*n);
            params.a = *a;
        }
        ActorKind::Const { value } => params.value = Some(*value),
        ActorKind::Monitor { clause } | ActorKind::P4Monitor { clause } => {
            params.clause = Some(clause.clone())
        }
        ActorKind::Theta { h } => params.h = Some(*h),
        _ => {}
    }
    let small = a.kind.input_ports().len() + a.kind.state_bits() <= TABLE_BITS_LIMIT;
    let mealy = if is_machine(&a.kind) && small {
        machine_of(&a.kind).ok().map(|m| MealyJson::from_machine(&m))
    } else {
        None
    };
    ActorJson {
        id: a.id.clone(),
        kind: a.kind.name().to_string(),
        provenance: a.provenance.clone(),
        params,
        mealy,
    }
}

pub fn actor_from_json(j: &ActorJson) -> Result<Actor, SdfError> {
    let p = &j.params;
    let need = |v: Option<usize>| v.ok_or_else(|| err(format!("{}: missing arity", j.id)));
    let kind = match j.kind.as_str() {
        "NOT" => ActorKind::Not,
        "OR" => ActorKind::Or { n: need(p.arity)? },
        "AND" => ActorKind::And { n: need(p.arity)? },
        "RES" => ActorKind::Res {
            n: need(p.arity)?,
            a: p.a,
        },
        "CONST" => ActorKind::Const {
            value: p.value.ok_or_else(|| err(format!("{}: missing value", j.id)))?,
        },
        "IfTB" => ActorKind::IfTB,
        "InUB" => ActorKind::InUB,
        "TrUB" => ActorKind::TrUB,
        "Monitor" | "P4Monitor" => {
            let clause = p
                .clause
                .clone()
                .ok_or_else(|| err(format!("{}: missing clause", j.id)))?;
            if clause.max_lit_depth() > clause.depth {
                return Err(err(format!("{}: clause deeper than its depth", j.id)));
            }
            if j.kind == "Monitor" {
                ActorKind::Monitor { clause }
            } else {
                ActorKind::P4Monitor { clause }
            }
        }
        "Theta" => ActorKind::Theta {
            h: p.h.filter(|&h| h >= 1).ok_or_else(|| err(format!("{}: bad h", j.id)))?,
        },
        other => return Err(err(format!("{}: unknown kind `{other}`", j.id))),
    };
    if let Some(mj) = &j.mealy {
        let given = mj.to_machine()?;
        let expected = machine_of(&kind).map_err(|e| err(e.to_string()))?;
        if given != expected {
            return Err(err(format!("{}: transition table does not match kind {}", j.id, j.kind)));
        }
    }
    Ok(Actor {
        id: j.id.clone(),
        kind,
        provenance: j.provenance.clone(),
    })
}

pub fn to_netlist(sys: &ActorSystem) -> NetlistJson {
    NetlistJson {
        inputs: sys.inputs.clone(),
        outputs: sys.outputs.clone(),
        actors: sys.actors.iter().map(actor_to_json).collect(),
        wires: sys
            .wires
            .iter()
            .map(|w| WireJson {
                from: w.from.to_string(),
                to: w.to.to_string(),
            })
            .collect(),
    }
}

pub fn from_netlist(n: &NetlistJson) -> Result<ActorSystem, SdfError> {
    let actors = n.actors.iter().map(actor_from_json).collect::<Result<_, _>>()?;
    let wires = n
        .wires
        .iter()
        .map(|w| {
            let e = |s: &str| Endpoint::parse(s).ok_or_else(|| SdfError::UnknownEndpoint(s.into()));
            Ok(Wire {
                from: e(&w.from)?,
                to: e(&w.to)?,
            })
        })
        .collect::<Result<_, SdfError>>()?;
    Ok(ActorSystem {
        inputs: n.inputs.clone(),
        outputs: n.outputs.clone(),
        actors,
        wires,
    })
}

pub fn export_json(sys: &ActorSystem) -> String {
    serde_json::to_string_pretty(&to_netlist(sys)).expect("netlist serializes")
}

pub fn import_json(src: &str) -> Result<ActorSystem, SdfError> {
    let n: NetlistJson = serde_json::from_str(src).map_err(|e| err(e.to_string()))?;
    from_netlist(&n)
}

fn dot_escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

/// Reads a quoted DOT string starting right after the opening quote.
fn dot_unescape(s: &str) -> Option<String> {
    let mut out = String::new();
    let mut it = s.chars();
    while let Some(c) = it.next() {
        match c {
            '\\' => out.push(it.next()?),
            '"' => return Some(out),
            c => out.push(c),
        }
    }
    None
}

fn gxw_attr(line: &str) -> Option<String> {
    let at = line.find("gxw=\"")?;
    dot_unescape(&line[at + 5..])
}

/// DOT rendering: one node per actor labeled with kind and provenance, one edge
/// per wire. Each element also carries its JSON form in a `gxw` attribute.
pub fn export_dot(sys: &ActorSystem) -> String {
    let mut s = String::from("digraph gxw {\n  rankdir=LR;\n");
    let io = serde_json::json!({"inputs": sys.inputs, "outputs": sys.outputs});
    s += &format!("  graph [gxw=\"{}\"];\n", dot_escape(&io.to_string()));
    for v in &sys.inputs {
        s += &format!("  \"${}\" [shape=invhouse, label=\"{}\"];\n", dot_escape(v), dot_escape(v));
    }
    for v in &sys.outputs {
        s += &format!("  \"${}\" [shape=house, label=\"{}\"];\n", dot_escape(v), dot_escape(v));
    }
    for a in &sys.actors {
        let j = serde_json::to_string(&ActorJson {
            mealy: None,
            ..actor_to_json(a)
        })
        .expect("actor serializes");
        let mut label = a.kind.name().to_string();
        match &a.kind {
            ActorKind::Monitor { clause } | ActorKind::P4Monitor { clause } => {
                label += &format!("\\n{clause}")
            }
            ActorKind::Theta { h } => label += &format!(" h={h}"),
            ActorKind::Res { a: Some(v), .. } => label += &format!(" A={v}"),
            _ => {}
        }
        if !a.provenance.is_empty() {
            label += &format!("\\n({})", a.provenance.join(","));
        }
        s += &format!(
            "  \"{}\" [shape=box, label=\"{}\", gxw=\"{}\"];\n",
            dot_escape(&a.id),
            label.replace('"', "\\\""),
            dot_escape(&j)
        );
    }
    let node = |e: &Endpoint| match e {
        Endpoint::Ext(v) => format!("${v}"),
        Endpoint::Port { actor, .. } => actor.clone(),
    };
    for w in &sys.wires {
        let j = serde_json::to_string(&WireJson {
            from: w.from.to_string(),
            to: w.to.to_string(),
        })
        .expect("wire serializes");
        let tail = match &w.from {
            Endpoint::Port { port, .. } => format!("taillabel=\"{}\", ", dot_escape(port)),
            _ => String::new(),
        };
        let head = match &w.to {
            Endpoint::Port { port, .. } => format!("headlabel=\"{}\", ", dot_escape(port)),
            _ => String::new(),
        };
        s += &format!(
            "  \"{}\" -> \"{}\" [{tail}{head}gxw=\"{}\"];\n",
            dot_escape(&node(&w.from)),
            dot_escape(&node(&w.to)),
            dot_escape(&j)
        );
    }
    s += "}\n";
    s
}

/// Reads back a graph written by [`export_dot`].
pub fn import_dot(src: &str) -> Result<ActorSystem, SdfError> {
    let mut sys = ActorSystem::default();
    let mut seen_io = false;
    for line in src.lines() {
        let t = line.trim_start();
        let Some(attr) = gxw_attr(t) else { continue };
        if t.starts_with("graph ") {
            #[derive(Deserialize)]
            struct Io {
                inputs: Vec<String>,
                outputs: Vec<String>,
            }
            let io: Io = serde_json::from_str(&attr).map_err(|e| err(e.to_string()))?;
            sys.inputs = io.inputs;
            sys.outputs = io.outputs;
            seen_io = true;
        } else if t.contains("->") {
            let w: WireJson = serde_json::from_str(&attr).map_err(|e| err(e.to_string()))?;
            let e = |s: &str| Endpoint::parse(s).ok_or_else(|| SdfError::UnknownEndpoint(s.into()));
            sys.wires.push(Wire {
                from: e(&w.from)?,
                to: e(&w.to)?,
            });
        } else {
            let a: ActorJson = serde_json::from_str(&attr).map_err(|e| err(e.to_string()))?;
            sys.actors.push(actor_from_json(&a)?);
        }
    }
    if !seen_io {
        return Err(err("DOT input lacks the gxw graph attribute"));
    }
    Ok(sys)
}
