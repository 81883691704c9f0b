pub mod error;
pub mod measure;
pub mod models;
pub mod moments;
pub mod optim;
pub mod pauli;
pub mod pds;
pub mod statesim;

pub use error::{Error, Result};
