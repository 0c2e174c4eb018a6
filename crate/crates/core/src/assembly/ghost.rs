//! Direct (volumetric patch-jump) ghost penalty.

use super::dofs::DofMap;
use super::element::ElementMap;
use super::sparse::{SparseOperator, TripletBuilder};
use crate::geometry::active::ActiveMeshData;
use crate::geometry::rules::triangle_rule;
use crate::math::ceil;
use crate::mesh::BackgroundMesh;
use crate::{Error, Point, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GhostPenaltyParams {
    pub c_gamma: f64,
    /// Facet path bound.
    pub path_bound: usize,
    /// `c_gamma * path_bound`
    pub gamma_s: f64,
    pub h: f64,
    pub delta_h: f64,
}

impl GhostPenaltyParams {
    /// Uses the smallest admissible bound `ceil(1 + delta_h / h)`.
    pub fn new(c_gamma: f64, h: f64, delta_h: f64) -> Result<Self> {
        if !(c_gamma > 0.0 && c_gamma.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("c_gamma = {c_gamma}")));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::InvalidMeshSize(h));
        }
        if !(delta_h >= 0.0 && delta_h.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!("delta_h = {delta_h}")));
        }
        // tolerate rounding when delta_h is an exact multiple of h
        let path_bound = (ceil(1.0 + delta_h / h - 1e-10) as usize).max(1);
        Ok(Self {
            c_gamma,
            path_bound,
            gamma_s: c_gamma * path_bound as f64,
            h,
            delta_h,
        })
    }
}

/// Affine function `value + slope·(x − centre)`.
#[derive(Clone, Copy, Debug, Default)]
struct Affine {
    value: f64,
    slope: Point,
}

impl Affine {
    fn at(&self, x: Point, centre: Point) -> f64 {
        self.value + self.slope[0] * (x[0] - centre[0]) + self.slope[1] * (x[1] - centre[1])
    }
}

/// Patch data of one facet: the four patch vertices and, for each, the jump
/// `p_1 − p_2` of its hat functions extended from both elements.
struct PatchJumps {
    vertices: [usize; 4],
    jumps: [Affine; 4],
    centre: Point,
    elements: [usize; 2],
}

fn patch_jumps(mesh: &BackgroundMesh, facet: usize) -> Result<PatchJumps> {
    let (k1, k2) = mesh.facet_patch(facet)?;
    let f = mesh.facets[facet].vertices;
    let (a, b) = (mesh.vertices[f[0]], mesh.vertices[f[1]]);
    let centre = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let apex = |e: usize| *mesh.elements[e].iter().find(|v| !f.contains(v)).unwrap();
    let vertices = [f[0], f[1], apex(k1), apex(k2)];
    let mut jumps = [Affine::default(); 4];
    for (sign, element) in [(1.0, k1), (-1.0, k2)] {
        let map = ElementMap::of(mesh, element);
        let hats = map.barycentric(centre);
        for (local, &v) in mesh.elements[element].iter().enumerate() {
            let slot = vertices.iter().position(|&p| p == v).unwrap();
            let g = map.gradients[local];
            jumps[slot].value += sign * hats[local];
            jumps[slot].slope[0] += sign * g[0];
            jumps[slot].slope[1] += sign * g[1];
        }
    }
    Ok(PatchJumps {
        vertices,
        jumps,
        centre,
        elements: [k1, k2],
    })
}

/// Degree-2 quadrature points and weights over both elements of a patch.
fn patch_points(mesh: &BackgroundMesh, elements: [usize; 2]) -> Result<impl Iterator<Item = (Point, f64)> + '_> {
    let rule = triangle_rule(2)?;
    Ok(elements.into_iter().flat_map(move |element| {
        let tri = mesh.element_points(element);
        let area = mesh.element_area(element);
        rule.points.iter().zip(rule.weights).map(move |(l, &w)| {
            let x = [
                l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
                l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
            ];
            (x, w * area)
        })
    }))
}

/// `S[i, j] = γ_s / h² Σ_F ∫_{ω_F} [ψ_j][ψ_i]` over the stabilised facets.
pub fn assemble_ghost_penalty(
    mesh: &BackgroundMesh,
    active: &ActiveMeshData,
    params: &GhostPenaltyParams,
    dofs: &DofMap,
) -> Result<SparseOperator> {
    let scale = params.gamma_s / (params.h * params.h);
    let mut b = TripletBuilder::with_capacity(dofs.len(), dofs.len(), 16 * active.stabilized_facets.len());
    for &facet in &active.stabilized_facets {
        let patch = patch_jumps(mesh, facet)?;
        for &element in &patch.elements {
            if !active.is_active(element) {
                return Err(Error::InactiveFacetNeighbour { facet, element });
            }
        }
        let mut ids = [0usize; 4];
        for (slot, &vertex) in ids.iter_mut().zip(&patch.vertices) {
            *slot = dofs.local(vertex).ok_or(Error::MissingDof {
                step: active.step_index,
                element: patch.elements[0],
                vertex,
            })?;
        }
        let mut local = [[0.0; 4]; 4];
        for (x, w) in patch_points(mesh, patch.elements)? {
            let j = patch.jumps.map(|p| p.at(x, patch.centre));
            for r in 0..4 {
                for c in 0..4 {
                    local[r][c] += w * j[r] * j[c];
                }
            }
        }
        for r in 0..4 {
            for c in 0..4 {
                b.add(ids[r], ids[c], scale * local[r][c]);
            }
        }
    }
    Ok(b.build())
}
