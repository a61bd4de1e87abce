pub mod error;
pub mod game;
pub mod logic;
pub mod model;
pub mod negotiation;
pub mod rational;
pub mod suites;

pub use error::{Error, Result};
pub use rational::Q;
