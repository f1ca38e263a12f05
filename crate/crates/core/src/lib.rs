pub mod error;
pub mod experiment;
pub mod measurement;
pub mod noise;
pub mod protocol;
pub mod states;
pub mod tensor;

pub use error::{Error, Result};
pub use num_complex::Complex64;
