pub mod codec;
pub mod error;
pub mod gf;
pub mod layout;
pub mod linalg;
pub mod mbrr;
pub mod msrr;
pub mod params;
pub mod rack;
pub mod repair;
pub mod sim;

pub use error::{Error, Result};
