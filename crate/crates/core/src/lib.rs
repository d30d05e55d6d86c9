//! Workbench for the Macdonald groups G(β) and the p-groups J_i(α), H_i(α), K_i(α).

pub mod error;
pub mod params;
pub mod presentations;
pub mod enumerate;
pub mod group;
pub mod construct;
pub mod cache;
pub mod collect;
pub mod iso;
mod lift;
pub mod verify;

pub use error::{Error, Result};
