//! Structural synthesis of actor-based controllers from GXW specifications.
//!
//! The pipeline parses a specification ([`formula`]), builds a synchronous dataflow
//! network of library actors ([`blocks`], [`synthesis`]), resolves conflicts between
//! conjuncts by 2QBF solving ([`qbf`]) and checks the result ([`validate`]).

pub mod formula;
pub mod logic;
pub mod sdf;
pub mod blocks;
pub mod synthesis;
pub mod qbf;
pub mod validate;
pub mod pipeline;
