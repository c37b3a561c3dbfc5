pub mod cli;
pub mod error;
pub mod fp;
pub mod graded;
pub mod groupalg;
pub mod identities;
pub mod linalg;
pub mod matgroup;
pub mod normality;
pub mod padic;

pub use error::{Error, Result};
pub use padic::Ctx;
