pub mod error;
pub mod linalg;
pub mod qstate;
pub mod engine;
pub mod thermo;
pub mod nonmarkov;
pub mod scenarios;
pub mod cli;

pub use error::{Error, Result};
