pub mod bipoly;
pub mod coherent;
pub mod error;
pub mod fockbasis;
pub mod orthopoly;
pub mod quadrature;
mod sum;
pub mod transform;
pub mod verify;

pub use error::{Error, Result};
pub use sum::CompensatedSum;
