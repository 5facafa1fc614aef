pub mod combinatorics;
pub mod error;
pub mod field;
pub mod kostant;
pub mod linalg;
pub mod projective;
pub mod resolution;
pub mod schur_oracle;
pub mod skew_category;
pub mod transport;

pub use error::{Error, Result};
