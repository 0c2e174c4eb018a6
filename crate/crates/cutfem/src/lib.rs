//! File formats, parameter sweeps and the command-line driver for
//! [`cutfem_core`].

pub mod commands;
pub mod config;
pub mod diagnostics;
pub mod error;
pub mod observers;
pub mod output;
pub mod report;
pub mod sweep;
pub mod tables;
pub mod validate;
pub mod vtk;

pub use cutfem_core as core;
pub use error::{AppError, AppResult};
