pub mod chart;
pub mod cp_rep;
pub mod duality_shifts;
pub mod error;
pub mod linalg;
pub mod mod_arith;
pub mod tate_engine;

pub use error::{Error, Result};
