#![no_std]
extern crate alloc;
#[cfg(test)]
extern crate std;

mod error;
pub mod exec;
pub mod fft;
pub mod imaging;
pub mod pad;
pub mod render;
pub mod scales;
pub mod signal;
pub mod synth;

pub use error::{Error, Result};
