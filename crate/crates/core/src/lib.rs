//! Model checking for guarded-command programs that are data independent in
//! two types `X` and `Y` and use `Y[X]` arrays without reset.

pub mod abstraction;
pub mod concrete;
pub mod corpus;
mod error;
pub mod lang;
pub mod mu;
pub mod oracle;
pub mod paramcheck;
pub mod partial;
pub mod quotient;
pub mod ts;
pub mod valuation;

pub use error::{Error, Result};
