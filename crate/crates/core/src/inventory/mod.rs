//! Inventory control case study, both as a `.tm` model run by the engine
//! and as plain state transitions used to cross-check it.

mod corpus;
mod rfq;
mod stock;

pub use corpus::*;
pub use rfq::*;
pub use stock::*;
