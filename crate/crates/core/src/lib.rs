pub mod bounds;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod measures;
pub mod qstate;
pub mod roof;
pub mod rng;

pub use error::{Error, Result};
