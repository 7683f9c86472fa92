#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constellation;
pub mod coverage;
pub mod edgesim;
pub mod firedetect;
pub mod kepler;
mod math;
pub mod optimizer;
pub mod serde_float;
