//! Conservative Eulerian time stepping for transport-diffusion on moving
//! domains, discretised with unfitted (cut) P1 finite elements on a static
//! background triangulation.
//!
//! The crate is `no_std` and only needs `alloc`. File formats, the command
//! line driver and parameter sweeps live in the `cutfem` companion crate.
//!
//! Module map:
//! - [`mesh`]: structured background triangulation and adjacency.
//! - [`geometry`]: level-set interpolation, cut decomposition, cut quadrature,
//!   active/strip element sets and the stabilised facet set.
//! - [`assembly`]: dof maps, CSR operators, cut mass, convection-diffusion,
//!   direct ghost penalty and load vectors.
//! - [`solver`]: banded LU with reverse Cuthill-McKee ordering, ILU(0)-GMRES fallback.
//! - [`stepping`]: BDF1/BDF2 time loop and the mass ledger.
//! - [`analysis`]: error norms, space-time accumulation, EOC tables.
//! - [`cases`]: closed-form benchmark problems.
#![cfg_attr(not(test), no_std)]
// `!(a <= b)` rejects NaN on purpose; index loops mirror the linear algebra.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

extern crate alloc;

pub mod analysis;
pub mod assembly;
pub mod cases;
pub mod error;
pub mod geometry;
pub mod mesh;
pub mod solver;
pub mod stepping;

mod math;

pub use error::{Error, Result};

/// A point (or vector) in the plane.
pub type Point = [f64; 2];
