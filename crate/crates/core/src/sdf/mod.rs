//! Synchronous dataflow object model, evaluation ordering and simulation.

mod mealy;
mod netlist;
mod order;
mod sim;
mod system;

pub use mealy::{bits_to_tri, tri_to_bits, MealyIndex, MealyMachine, StateVar, Transition, Tri};
pub use netlist::{
    export_dot, export_json, from_netlist, import_dot, import_json, to_netlist, ActorJson, MealyJson,
    NetlistJson, Params, WireJson,
};
pub use order::{
    cyclic_components, evaluation_order, evaluation_order_with, is_valid_order, Step, TieBreak,
};
pub use sim::{compose_to_mealy, run, step, FireCounts, Frame, Simulator};
pub use system::{Actor, ActorKind, ActorSystem, Endpoint, PortValue, SdfError, Wire};
