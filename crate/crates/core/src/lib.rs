pub mod corpus;
pub mod dataset;
pub mod error;
pub mod io;
pub mod metrics;
pub mod numeric;
pub mod scorer;
pub mod stats;

pub use error::{Error, Result};
