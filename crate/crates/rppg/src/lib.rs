//! Frame ingestion, file formats and the `rppg` command line on top of
//! [`rppg_core`].

pub mod cli;
mod error;
pub mod exec;
pub mod formats;
pub mod io;

pub use error::{Error, Result};
pub use rppg_core as core;
