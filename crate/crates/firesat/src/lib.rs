//! Std companion to `firesat-core`: configuration and file formats, rayon
//! parallel evaluation, CSV exporters, the reference replay and the `firesat`
//! command line.

pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod fixtures;
pub mod io;
pub mod parallel;
pub mod replay;
pub mod scene_file;

pub use firesat_core as core;

pub use error::AppError;
