#![allow(clippy::needless_range_loop)]

pub mod adrep;
pub mod cli;
pub mod cosheaf;
pub mod davis;
pub mod error;
pub mod exactalg;
pub mod gcm;
pub mod kmalg;
pub mod weyl;

pub use error::{Error, Result};
