use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::formula::DnfClause;

/// Value carried by a port within one cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PortValue {
    Undefined,
    False,
    True,
    Dash,
}

impl PortValue {
    pub fn from_bool(b: bool) -> PortValue {
        if b {
            PortValue::True
        } else {
            PortValue::False
        }
    }

    pub fn as_bool(self) -> Option<bool> {
        match self {
            PortValue::True => Some(true),
            PortValue::False => Some(false),
            _ => None,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            PortValue::Undefined => '?',
            PortValue::False => '0',
            PortValue::True => '1',
            PortValue::Dash => '-',
        }
    }

    pub fn from_symbol(c: char) -> Option<PortValue> {
        Some(match c {
            '?' => PortValue::Undefined,
            '0' => PortValue::False,
            '1' => PortValue::True,
            '-' => PortValue::Dash,
            _ => return None,
        })
    }
}

impl fmt::Display for PortValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PortValue::Undefined => write!(f, "undefined"),
            PortValue::False => write!(f, "false"),
            PortValue::True => write!(f, "true"),
            PortValue::Dash => write!(f, "\u{2013}"),
        }
    }
}

/// Behavior of an actor: a stateless gate or a library machine.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ActorKind {
    Not,
    Or { n: usize },
    And { n: usize },
    /// Resolution actor; `a` is the output when every input is a dash.
    Res { n: usize, a: Option<bool> },
    Const { value: bool },
    IfTB,
    InUB,
    TrUB,
    /// Clause monitor; the clause depth is the monitoring depth.
    Monitor { clause: DnfClause },
    /// Monitor emitting a dash during the first `clause.depth` cycles.
    P4Monitor { clause: DnfClause },
    Theta { h: u32 },
}

impl ActorKind {
    pub fn name(&self) -> &'static str {
        match self {
            ActorKind::Not => "NOT",
            ActorKind::Or { .. } => "OR",
            ActorKind::And { .. } => "AND",
            ActorKind::Res { .. } => "RES",
            ActorKind::Const { .. } => "CONST",
            ActorKind::IfTB => "IfTB",
            ActorKind::InUB => "InUB",
            ActorKind::TrUB => "TrUB",
            ActorKind::Monitor { .. } => "Monitor",
            ActorKind::P4Monitor { .. } => "P4Monitor",
            ActorKind::Theta { .. } => "Theta",
        }
    }

    pub fn is_gate(&self) -> bool {
        matches!(
            self,
            ActorKind::Not
                | ActorKind::Or { .. }
                | ActorKind::And { .. }
                | ActorKind::Res { .. }
                | ActorKind::Const { .. }
        )
    }

    pub fn is_high_level(&self) -> bool {
        matches!(self, ActorKind::IfTB | ActorKind::InUB | ActorKind::TrUB)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Actor {
    pub id: String,
    pub kind: ActorKind,
    /// Labels of the conjuncts this actor was introduced for.
    pub provenance: Vec<String>,
}

/// A wire endpoint: an external port or `actor.port`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Endpoint {
    Ext(String),
    Port { actor: String, port: String },
}

impl Endpoint {
    pub fn port(actor: &str, port: &str) -> Endpoint {
        Endpoint::Port {
            actor: actor.to_string(),
            port: port.to_string(),
        }
    }

    pub fn ext(name: &str) -> Endpoint {
        Endpoint::Ext(name.to_string())
    }

    pub fn parse(s: &str) -> Option<Endpoint> {
        if let Some(rest) = s.strip_prefix('$') {
            return Some(Endpoint::Ext(rest.to_string()));
        }
        let (a, p) = s.split_once('.')?;
        Some(Endpoint::port(a, p))
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::Ext(n) => write!(f, "${n}"),
            Endpoint::Port { actor, port } => write!(f, "{actor}.{port}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Wire {
    pub from: Endpoint,
    pub to: Endpoint,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SdfError {
    #[error("wiring forms a directed loop through {}", .scc.join(", "))]
    CycleError { scc: Vec<String> },
    #[error("port {0} is not driven by any wire")]
    UnwiredPort(String),
    #[error("port {0} is driven by more than one wire")]
    MultiplyDriven(String),
    #[error("unknown endpoint {0}")]
    UnknownEndpoint(String),
    #[error("wire {0} -> {1} has the wrong direction")]
    BadDirection(String, String),
    #[error("duplicate actor id {0}")]
    DuplicateActor(String),
    #[error("resolution actor {actor} received true and false in cycle {cycle}")]
    ConflictAtRuntime { actor: String, cycle: usize },
    #[error("a dash reached external output {port} in cycle {cycle}")]
    DashAtExternalOutput { port: String, cycle: usize },
    #[error("resolution actor {0} has no parameter value")]
    UnsetParameter(String),
    #[error("input valuation has {got} values, expected {expected}")]
    InputArity { expected: usize, got: usize },
    #[error("missing value for input {0}")]
    MissingInput(String),
    #[error("composition exceeds {0} states")]
    StateExplosion(usize),
    #[error("netlist: {0}")]
    Netlist(String),
}

/// Synchronous dataflow network: external ports, actors and wires.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ActorSystem {
    pub inputs: Vec<String>,
    pub outputs: Vec<String>,
    pub actors: Vec<Actor>,
    pub wires: Vec<Wire>,
}

impl ActorSystem {
    pub fn new(inputs: Vec<String>, outputs: Vec<String>) -> ActorSystem {
        ActorSystem {
            inputs,
            outputs,
            actors: Vec::new(),
            wires: Vec::new(),
        }
    }

    /// Adds an actor with the id `{prefix}_{n}` for the first free `n`.
    pub fn add(&mut self, prefix: &str, kind: ActorKind, provenance: &[String]) -> String {
        let mut n = self.actors.len() + 1;
        let taken: std::collections::HashSet<&str> =
            self.actors.iter().map(|a| a.id.as_str()).collect();
        let mut id = format!("{prefix}_{n}");
        while taken.contains(id.as_str()) {
            n += 1;
            id = format!("{prefix}_{n}");
        }
        self.add_named(&id, kind, provenance);
        id
    }

    /// Adds an actor with an explicit id; the id must be unused.
    pub fn add_named(&mut self, id: &str, kind: ActorKind, provenance: &[String]) {
        debug_assert!(self.actor(id).is_none(), "duplicate actor id {id}");
        self.actors.push(Actor {
            id: id.to_string(),
            kind,
            provenance: provenance.to_vec(),
        });
    }

    pub fn connect(&mut self, from: Endpoint, to: Endpoint) {
        self.wires.push(Wire { from, to });
    }

    pub fn actor(&self, id: &str) -> Option<&Actor> {
        self.actors.iter().find(|a| a.id == id)
    }

    pub fn actor_mut(&mut self, id: &str) -> Option<&mut Actor> {
        self.actors.iter_mut().find(|a| a.id == id)
    }

    pub fn actor_index(&self) -> HashMap<&str, usize> {
        self.actors
            .iter()
            .enumerate()
            .map(|(i, a)| (a.id.as_str(), i))
            .collect()
    }

    /// Number of actors per kind name.
    pub fn kind_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut m = BTreeMap::new();
        for a in &self.actors {
            *m.entry(a.kind.name()).or_insert(0) += 1;
        }
        m
    }

    pub fn count(&self, name: &str) -> usize {
        self.actors.iter().filter(|a| a.kind.name() == name).count()
    }

    /// Wires whose destination is `to`.
    pub fn drivers(&self, to: &Endpoint) -> Vec<&Wire> {
        self.wires.iter().filter(|w| &w.to == to).collect()
    }

    /// The source feeding `to`, if exactly one wire drives it.
    pub fn source_of(&self, to: &Endpoint) -> Option<&Endpoint> {
        let d = self.drivers(to);
        if d.len() == 1 {
            Some(&d[0].from)
        } else {
            None
        }
    }

    /// Ids of actors introduced for the conjunct `label`.
    pub fn actors_for(&self, label: &str) -> Vec<&str> {
        self.actors
            .iter()
            .filter(|a| a.provenance.iter().any(|p| p == label))
            .map(|a| a.id.as_str())
            .collect()
    }

    /// Sets every resolution parameter from `values` keyed by actor id.
    pub fn set_res_params(&mut self, values: &BTreeMap<String, bool>) {
        for a in &mut self.actors {
            if let ActorKind::Res { a: param, .. } = &mut a.kind {
                if let Some(v) = values.get(&a.id) {
                    *param = Some(*v);
                }
            }
        }
    }
}
