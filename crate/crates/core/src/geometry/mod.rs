//! Level-set geometry on the background mesh.

pub mod active;
pub mod cut;
pub mod levelset;
pub mod quadrature;
pub mod rules;

pub use active::{build_active_mesh, check_containment, strip_reachability, ActiveMeshData, DilationMode, Reachability};
pub use cut::{decompose_cut_element, decompose_side, interface_segment, Side};
pub use levelset::{
    boundary_distance_proxy, interpolate_levelset, signed_distance_proxy, ElementClass, LevelSetFrame, ZERO_SHIFT,
};
pub use quadrature::{build_cut_quadrature, build_element_quadrature, build_side_quadrature, CutQuadrature, ElementQuadrature};
pub use rules::{triangle_rule, TriangleRule, SUPPORTED_DEGREES};
