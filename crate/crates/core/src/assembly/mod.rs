//! Sparse operators of the fully discrete scheme over active dofs.

pub mod dofs;
pub mod element;
pub mod forms;
pub mod ghost;
pub mod sparse;

pub use dofs::DofMap;
pub use element::ElementMap;
pub use forms::{assemble_convection_diffusion, assemble_cut_mass, assemble_load};
pub use ghost::{assemble_ghost_penalty, GhostPenaltyParams};
pub use sparse::{SparseOperator, TripletBuilder};
