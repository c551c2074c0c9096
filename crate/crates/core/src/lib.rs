#![no_std]

extern crate alloc;

pub mod accel;
pub mod arena;
pub mod attractor;
pub mod corpus;
pub mod error;
pub mod families;
pub mod mcr;
pub mod oracle;
pub mod strategies;
pub mod tp;
pub mod value;

pub use arena::{normalize_target, Arena, ArenaBuilder, ArenaError, Edge, Limits, Objective, Player, VertexId};
pub use error::Error;
pub use value::{ExtValue, ValueVector};
