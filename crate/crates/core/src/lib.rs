//! Thinging Machine modeling toolkit.
//!
//! - [`model`]: the static machine/stage/flow graph and its builder
//! - [`text`]: the `.tm` DSL parser and canonical printer
//! - [`check`]: well-formedness diagnostics
//! - [`engine`]: deterministic token-flow simulation, event detection and
//!   chronology checking
//! - [`inventory`]: the inventory-control reference model and its direct
//!   domain operations
//! - [`dot`]: Graphviz export

pub mod check;
pub mod dot;
pub mod engine;
pub mod inventory;
pub mod model;
pub mod span;
pub mod text;
