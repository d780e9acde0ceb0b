pub mod cli;
pub mod dot;
pub mod dsl;
pub mod error;
pub mod explorer;
pub mod kernel;
pub mod mapping;
pub mod protocols;
pub mod report;
pub mod specs;

pub use error::{Error, Result};
