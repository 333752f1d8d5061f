pub mod arith;
pub mod error;

pub use error::{Error, Result};
pub mod series;
pub mod algroots;
pub mod logvalues;
pub mod ode;
pub mod asymptotics;
pub mod apery;
pub mod parse;
