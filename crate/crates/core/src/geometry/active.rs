//! Active mesh, extension strip and the stabilised facet set of one time step.

use alloc::collections::VecDeque;
use alloc::vec::Vec;

use super::cut::interface_segment;
use super::levelset::{boundary_distance_proxy, signed_distance_proxy, ElementClass, LevelSetFrame};
use crate::math::{dist, dot};
use crate::mesh::BackgroundMesh;
use crate::{Error, Point, Result};

/// How `dist(K, Omega_h)` and `dist(K, Gamma_h)` are evaluated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DilationMode {
    /// Nodal level-set values; exact for signed-distance level sets up to
    /// interpolation.
    #[default]
    LevelSetProxy,
    /// Euclidean distance to the piecewise-linear interface segments.
    Geometric,
}

/// Relative slack on `delta_h` absorbing rounding in `phi(x, t^n)`.
const DILATION_SLACK: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ActiveMeshData {
    pub step_index: usize,
    pub delta_h: f64,
    /// Sorted element ids of the active mesh.
    pub active_elements: Vec<usize>,
    /// Sorted element ids of the two-sided extension strip.
    pub strip_elements: Vec<usize>,
    /// Sorted interior facet ids carrying the ghost penalty.
    pub stabilized_facets: Vec<usize>,
    /// Sorted vertex ids of all active elements.
    pub active_dofs: Vec<usize>,
    pub is_active: Vec<bool>,
    pub is_strip: Vec<bool>,
}

impl ActiveMeshData {
    pub fn is_active(&self, element: usize) -> bool {
        self.is_active[element]
    }

    pub fn is_strip(&self, element: usize) -> bool {
        self.is_strip[element]
    }
}

fn point_segment_distance(p: Point, a: Point, b: Point) -> f64 {
    let ab = [b[0] - a[0], b[1] - a[1]];
    let ap = [p[0] - a[0], p[1] - a[1]];
    let len2 = dot(ab, ab);
    let t = if len2 > 0.0 { (dot(ap, ab) / len2).clamp(0.0, 1.0) } else { 0.0 };
    dist(p, [a[0] + t * ab[0], a[1] + t * ab[1]])
}

/// Distance between a triangle and a segment lying outside it (or touching).
fn triangle_segment_distance(tri: &[Point; 3], seg: &[Point; 2]) -> f64 {
    let mut d = f64::INFINITY;
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        d = d.min(point_segment_distance(seg[0], a, b));
        d = d.min(point_segment_distance(seg[1], a, b));
        d = d.min(point_segment_distance(a, seg[0], seg[1]));
    }
    d
}

/// Element distances `(to Omega_h, to Gamma_h)` from interface segments.
fn geometric_distances(frame: &LevelSetFrame, mesh: &BackgroundMesh, cutoff: f64) -> Vec<(f64, f64)> {
    let segments: Vec<[Point; 2]> = (0..mesh.num_elements())
        .filter(|&e| frame.class(e) == ElementClass::Cut)
        .filter_map(|e| interface_segment(mesh.element_points(e), frame.element_values(mesh, e)))
        .collect();
    (0..mesh.num_elements())
        .map(|e| {
            let class = frame.class(e);
            if class == ElementClass::Cut {
                return (0.0, 0.0);
            }
            let tri = mesh.element_points(e);
            let centre = [
                (tri[0][0] + tri[1][0] + tri[2][0]) / 3.0,
                (tri[0][1] + tri[1][1] + tri[2][1]) / 3.0,
            ];
            let reach = cutoff + mesh.element_diameter(e);
            let to_gamma = segments
                .iter()
                .filter(|s| point_segment_distance(centre, s[0], s[1]) <= reach)
                .map(|s| triangle_segment_distance(&tri, s))
                .fold(f64::INFINITY, f64::min);
            match class {
                ElementClass::Negative => (0.0, to_gamma),
                _ => (to_gamma, to_gamma),
            }
        })
        .collect()
}

/// Builds the active mesh (elements within `delta_h` of `Omega_h`), the
/// two-sided strip (active elements within `delta_h` of `Gamma_h`) and the
/// facets between a strip element and another active element.
pub fn build_active_mesh(
    frame: &LevelSetFrame,
    mesh: &BackgroundMesh,
    delta_h: f64,
    step_index: usize,
    mode: DilationMode,
) -> Result<ActiveMeshData> {
    if !(delta_h >= 0.0 && delta_h.is_finite()) {
        return Err(Error::InvalidParameter(alloc::format!("delta_h = {delta_h}")));
    }
    if frame.nodal_values.len() != mesh.num_vertices() {
        return Err(Error::DimensionMismatch {
            expected: mesh.num_vertices(),
            found: frame.nodal_values.len(),
        });
    }
    let threshold = delta_h * (1.0 + DILATION_SLACK);
    let ne = mesh.num_elements();
    let mut is_active = alloc::vec![false; ne];
    let mut is_strip = alloc::vec![false; ne];
    match mode {
        DilationMode::LevelSetProxy => {
            for e in 0..ne {
                is_active[e] = signed_distance_proxy(frame, mesh, e) <= threshold;
                is_strip[e] = is_active[e] && boundary_distance_proxy(frame, mesh, e) <= threshold;
            }
        }
        DilationMode::Geometric => {
            for (e, (to_domain, to_gamma)) in geometric_distances(frame, mesh, threshold).into_iter().enumerate() {
                is_active[e] = to_domain <= threshold;
                is_strip[e] = is_active[e] && to_gamma <= threshold;
            }
        }
    }
    for e in 0..ne {
        if frame.class(e).is_physical() {
            is_active[e] = true;
        }
        if frame.class(e) == ElementClass::Cut {
            is_strip[e] = true;
        }
    }

    let stabilized_facets = mesh
        .facets
        .iter()
        .enumerate()
        .filter_map(|(f, facet)| {
            let right = facet.right?;
            let left = facet.left;
            let both_active = is_active[left] && is_active[right];
            (both_active && (is_strip[left] || is_strip[right])).then_some(f)
        })
        .collect();

    let mut vertex_active = alloc::vec![false; mesh.num_vertices()];
    for e in (0..ne).filter(|&e| is_active[e]) {
        for &v in &mesh.elements[e] {
            vertex_active[v] = true;
        }
    }

    Ok(ActiveMeshData {
        step_index,
        delta_h,
        active_elements: (0..ne).filter(|&e| is_active[e]).collect(),
        strip_elements: (0..ne).filter(|&e| is_strip[e]).collect(),
        stabilized_facets,
        active_dofs: (0..mesh.num_vertices()).filter(|&v| vertex_active[v]).collect(),
        is_active,
        is_strip,
    })
}

/// Checks that every element of the physical domain of `old_frame` belongs to
/// the active mesh `active` (step `active.step_index`).
pub fn check_containment(old_frame: &LevelSetFrame, old_step: usize, active: &ActiveMeshData) -> Result<()> {
    match old_frame
        .classification
        .iter()
        .enumerate()
        .find(|(e, c)| c.is_physical() && !active.is_active[*e])
    {
        Some((element, _)) => Err(Error::ContainmentViolation {
            step: active.step_index,
            old_step,
            element,
        }),
        None => Ok(()),
    }
}

/// Outcome of the facet-path reachability check on the strip.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Reachability {
    /// Strip elements not fully inside the domain that cannot reach an uncut
    /// interior element through stabilised facets.
    pub unreachable: Vec<usize>,
    /// Longest shortest path (in facets) from such an element to an uncut
    /// interior element.
    pub max_path: usize,
}

/// Breadth-first search over stabilised facets from uncut interior elements.
pub fn strip_reachability(frame: &LevelSetFrame, mesh: &BackgroundMesh, active: &ActiveMeshData) -> Reachability {
    let ne = mesh.num_elements();
    let mut stabilised = alloc::vec![false; mesh.facets.len()];
    for &f in &active.stabilized_facets {
        stabilised[f] = true;
    }
    let mut depth = alloc::vec![usize::MAX; ne];
    let mut queue = VecDeque::new();
    for &e in &active.active_elements {
        if frame.class(e) == ElementClass::Negative {
            depth[e] = 0;
            queue.push_back(e);
        }
    }
    while let Some(e) = queue.pop_front() {
        for &f in &mesh.element_to_facets[e] {
            if !stabilised[f] {
                continue;
            }
            let facet = &mesh.facets[f];
            let other = if facet.left == e { facet.right } else { Some(facet.left) };
            if let Some(o) = other {
                if depth[o] == usize::MAX {
                    depth[o] = depth[e] + 1;
                    queue.push_back(o);
                }
            }
        }
    }
    let mut out = Reachability::default();
    for &e in &active.strip_elements {
        if frame.class(e) == ElementClass::Negative {
            continue;
        }
        if depth[e] == usize::MAX {
            out.unreachable.push(e);
        } else {
            out.max_path = out.max_path.max(depth[e]);
        }
    }
    out
}
