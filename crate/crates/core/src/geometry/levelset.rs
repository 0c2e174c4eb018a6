use alloc::vec::Vec;

use crate::mesh::BackgroundMesh;
use crate::{Error, Point, Result};

/// Nodal values with `|phi| < ZERO_SHIFT` are moved to `+ZERO_SHIFT`.
pub const ZERO_SHIFT: f64 = 1e-14;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ElementClass {
    /// All nodal values negative: the element lies in the discrete domain.
    Negative,
    /// All nodal values positive.
    Positive,
    Cut,
}

impl ElementClass {
    pub fn from_values(values: [f64; 3]) -> Self {
        if values.iter().all(|&v| v <= 0.0) {
            ElementClass::Negative
        } else if values.iter().all(|&v| v > 0.0) {
            ElementClass::Positive
        } else {
            ElementClass::Cut
        }
    }

    /// Element has a part of positive measure inside `{phi_h <= 0}`.
    pub fn is_physical(self) -> bool {
        !matches!(self, ElementClass::Positive)
    }
}

/// P1 interpolant of a level set at one time instant.
#[derive(Clone, Debug)]
pub struct LevelSetFrame {
    pub time: f64,
    pub nodal_values: Vec<f64>,
    pub classification: Vec<ElementClass>,
}

/// Interpolates `phi(., t)` at the mesh vertices and classifies elements.
pub fn interpolate_levelset<F>(mesh: &BackgroundMesh, t: f64, phi: F) -> Result<LevelSetFrame>
where
    F: Fn(Point, f64) -> f64,
{
    let mut nodal_values = Vec::with_capacity(mesh.num_vertices());
    for (vertex, &x) in mesh.vertices.iter().enumerate() {
        let value = phi(x, t);
        if !value.is_finite() {
            return Err(Error::NonFiniteLevelSet { vertex, value });
        }
        nodal_values.push(if value.abs() < ZERO_SHIFT { ZERO_SHIFT } else { value });
    }
    Ok(LevelSetFrame::from_nodal_values(mesh, t, nodal_values))
}

impl LevelSetFrame {
    /// Builds a frame from already perturbed nodal values.
    pub fn from_nodal_values(mesh: &BackgroundMesh, time: f64, nodal_values: Vec<f64>) -> Self {
        let classification = mesh
            .elements
            .iter()
            .map(|tri| ElementClass::from_values(tri.map(|v| nodal_values[v])))
            .collect();
        Self {
            time,
            nodal_values,
            classification,
        }
    }

    pub fn element_values(&self, mesh: &BackgroundMesh, element: usize) -> [f64; 3] {
        mesh.elements[element].map(|v| self.nodal_values[v])
    }

    pub fn class(&self, element: usize) -> ElementClass {
        self.classification[element]
    }

    pub fn count(&self, class: ElementClass) -> usize {
        self.classification.iter().filter(|&&c| c == class).count()
    }
}

/// Minimum nodal level-set value on an element; stands in for the signed
/// distance of the element to the discrete domain.
pub fn signed_distance_proxy(frame: &LevelSetFrame, mesh: &BackgroundMesh, element: usize) -> f64 {
    frame
        .element_values(mesh, element)
        .into_iter()
        .fold(f64::INFINITY, f64::min)
}

/// Level-set proxy for the distance of an element to the discrete boundary.
pub fn boundary_distance_proxy(
    frame: &LevelSetFrame,
    mesh: &BackgroundMesh,
    element: usize,
) -> f64 {
    let values = frame.element_values(mesh, element);
    match frame.class(element) {
        ElementClass::Cut => 0.0,
        ElementClass::Positive => values.into_iter().fold(f64::INFINITY, f64::min),
        ElementClass::Negative => -values.into_iter().fold(f64::NEG_INFINITY, f64::max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_structured_mesh, Rect};
    use crate::math::hypot;

    #[test]
    fn mesh_inside_disk_is_all_negative() {
        let mesh = build_structured_mesh(Rect::new(-0.2, 0.2, -0.2, 0.2), 0.1).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
        assert_eq!(frame.count(ElementClass::Negative), mesh.num_elements());
    }

    #[test]
    fn mixed_signs_are_cut() {
        assert_eq!(ElementClass::from_values([-1.0, 1.0, 1.0]), ElementClass::Cut);
        assert_eq!(ElementClass::from_values([-1.0, -1.0, -1.0]), ElementClass::Negative);
        assert_eq!(ElementClass::from_values([1.0, 2.0, 3.0]), ElementClass::Positive);
    }

    #[test]
    fn zero_values_pushed_outside() {
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), 1.0).unwrap();
        // x - 0.0 vanishes on the left column of vertices
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| x[0] - 1e-16).unwrap();
        for (v, &x) in mesh.vertices.iter().enumerate() {
            if x[0] == 0.0 {
                assert_eq!(frame.nodal_values[v], ZERO_SHIFT);
            }
        }
        assert_eq!(frame.count(ElementClass::Positive), 2);
    }

    #[test]
    fn non_finite_value_names_vertex() {
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), 1.0).unwrap();
        let err = interpolate_levelset(&mesh, 0.0, |x, _| if x == [1.0, 1.0] { f64::NAN } else { 1.0 })
            .unwrap_err();
        assert!(matches!(err, Error::NonFiniteLevelSet { vertex: 3, .. }));
    }

    #[test]
    fn proxies_take_min_and_max() {
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), 1.0).unwrap();
        let mut values = alloc::vec![0.0; 4];
        let tri = mesh.elements[0];
        for (v, val) in tri.iter().zip([-0.3, -0.2, -0.4]) {
            values[*v] = val;
        }
        let other = (0..4).find(|v| !tri.contains(v)).unwrap();
        values[other] = -0.1;
        let frame = LevelSetFrame::from_nodal_values(&mesh, 0.0, values.clone());
        assert_eq!(signed_distance_proxy(&frame, &mesh, 0), -0.4);
        assert_eq!(boundary_distance_proxy(&frame, &mesh, 0), 0.2);

        for (v, val) in tri.iter().zip([0.1, 0.2, 0.3]) {
            values[*v] = val;
        }
        let frame = LevelSetFrame::from_nodal_values(&mesh, 0.0, values);
        assert_eq!(signed_distance_proxy(&frame, &mesh, 0), 0.1);
        // element 1 shares two vertices with element 0 and one negative vertex
        assert_eq!(frame.class(1), ElementClass::Cut);
        assert!(signed_distance_proxy(&frame, &mesh, 1) <= 0.0);
        assert_eq!(boundary_distance_proxy(&frame, &mesh, 1), 0.0);
    }
}
