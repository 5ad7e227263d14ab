pub mod certify;
pub mod cli;
pub mod derivative;
pub mod error;
pub mod funcs;
pub mod reduce;
pub mod sample;
pub mod seqspace;

pub use error::{Error, Result};
