use crate::mesh::{signed_area, BackgroundMesh};
use crate::Point;

/// Affine map of one triangle: barycentric coordinates and the constant
/// gradients of the three P1 hat functions.
#[derive(Clone, Copy, Debug)]
pub struct ElementMap {
    pub vertices: [Point; 3],
    pub area: f64,
    pub gradients: [Point; 3],
}

impl ElementMap {
    pub fn new(vertices: [Point; 3]) -> Self {
        let area = signed_area(vertices[0], vertices[1], vertices[2]);
        let scale = 0.5 / area;
        let gradients = core::array::from_fn(|i| {
            let (a, b) = (vertices[(i + 1) % 3], vertices[(i + 2) % 3]);
            [(a[1] - b[1]) * scale, (b[0] - a[0]) * scale]
        });
        Self {
            vertices,
            area,
            gradients,
        }
    }

    pub fn of(mesh: &BackgroundMesh, element: usize) -> Self {
        Self::new(mesh.element_points(element))
    }

    /// Values of the three hat functions at `x` (affine, valid anywhere).
    pub fn barycentric(&self, x: Point) -> [f64; 3] {
        core::array::from_fn(|i| {
            let v = self.vertices[i];
            let g = self.gradients[i];
            1.0 + g[0] * (x[0] - v[0]) + g[1] * (x[1] - v[1])
        })
    }

    pub fn evaluate(&self, nodal: [f64; 3], x: Point) -> f64 {
        let l = self.barycentric(x);
        nodal[0] * l[0] + nodal[1] * l[1] + nodal[2] * l[2]
    }

    pub fn gradient(&self, nodal: [f64; 3]) -> Point {
        let g = &self.gradients;
        [
            nodal[0] * g[0][0] + nodal[1] * g[1][0] + nodal[2] * g[2][0],
            nodal[0] * g[0][1] + nodal[1] * g[1][1] + nodal[2] * g[2][1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hats_are_nodal_and_sum_to_one() {
        let map = ElementMap::new([[0.2, 0.1], [1.0, 0.3], [0.4, 0.9]]);
        for i in 0..3 {
            let l = map.barycentric(map.vertices[i]);
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((l[j] - expected).abs() < 1e-14);
            }
        }
        let l = map.barycentric([3.0, -2.0]);
        assert!((l.iter().sum::<f64>() - 1.0).abs() < 1e-13);
        let g = map.gradient([1.0, 1.0, 1.0]);
        assert!(g[0].abs() < 1e-14 && g[1].abs() < 1e-14);
    }

    #[test]
    fn linear_reproduced() {
        let map = ElementMap::new([[0.0, 0.0], [0.5, 0.0], [0.0, 0.25]]);
        let f = |x: Point| 2.0 * x[0] - 3.0 * x[1] + 0.5;
        let nodal = map.vertices.map(f);
        assert!((map.evaluate(nodal, [0.7, 0.9]) - f([0.7, 0.9])).abs() < 1e-13);
        let g = map.gradient(nodal);
        assert!((g[0] - 2.0).abs() < 1e-13 && (g[1] + 3.0).abs() < 1e-13);
    }
}
