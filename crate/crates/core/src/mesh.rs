//! Static background triangulation of an axis-aligned box.
//!
//! Each grid cell is split into two triangles. Local facet `k` of an element
//! is the edge opposite local vertex `k`. Vertex numbering is row-major and
//! never changes after construction, so every time level indexes the same
//! background vertices.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::math::{ceil, dist};
use crate::{Error, Point, Result};

/// Axis-aligned rectangle `[min, max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rect {
    pub min: Point,
    pub max: Point,
}

impl Rect {
    pub fn new(x0: f64, x1: f64, y0: f64, y1: f64) -> Self {
        Self {
            min: [x0, y0],
            max: [x1, y1],
        }
    }

    pub fn width(&self) -> f64 {
        self.max[0] - self.min[0]
    }

    pub fn height(&self) -> f64 {
        self.max[1] - self.min[1]
    }

    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn diameter(&self) -> f64 {
        dist(self.min, self.max)
    }
}

/// How grid cells are split into triangles.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum DiagonalPattern {
    /// Every cell is split along its lower-left to upper-right diagonal.
    #[default]
    Fixed,
    /// Diagonal direction alternates in a checkerboard pattern.
    Alternating,
}

/// An edge of the triangulation with its one or two adjacent elements.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Facet {
    /// Vertex indices, smaller index first.
    pub vertices: [usize; 2],
    pub left: usize,
    /// `None` for boundary facets.
    pub right: Option<usize>,
}

impl Facet {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }

    pub fn is_interior(&self) -> bool {
        self.right.is_some()
    }
}

#[derive(Clone, Debug)]
pub struct BackgroundMesh {
    pub vertices: Vec<Point>,
    /// Vertex triples with positive signed area.
    pub elements: Vec<[usize; 3]>,
    pub facets: Vec<Facet>,
    pub element_to_facets: Vec<[usize; 3]>,
    /// Maximum element diameter.
    pub h_max: f64,
    /// Minimum element diameter.
    pub h_min: f64,
    pub bounding_box: Rect,
    /// Number of grid cells in x and y.
    pub cells: [usize; 2],
    /// `true` for vertices on the box boundary.
    pub boundary_vertex: Vec<bool>,
}

/// Uniform `n_x x n_y` grid with cell size at most `target_h`, split with a
/// fixed diagonal.
pub fn build_structured_mesh(bbox: Rect, target_h: f64) -> Result<BackgroundMesh> {
    build_structured_mesh_with(bbox, target_h, DiagonalPattern::Fixed)
}

pub fn build_structured_mesh_with(
    bbox: Rect,
    target_h: f64,
    pattern: DiagonalPattern,
) -> Result<BackgroundMesh> {
    let (width, height) = (bbox.width(), bbox.height());
    if !(width > 0.0 && height > 0.0 && width.is_finite() && height.is_finite()) {
        return Err(Error::DegenerateBox { width, height });
    }
    if !(target_h > 0.0 && target_h.is_finite()) {
        return Err(Error::InvalidMeshSize(target_h));
    }
    // Small slack so that e.g. 1.0 / 0.5 does not round up to 3 cells.
    let count = |len: f64| (ceil(len / target_h - 1e-10) as usize).max(1);
    let (nx, ny) = (count(width), count(height));
    let (dx, dy) = (width / nx as f64, height / ny as f64);

    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    let mut boundary_vertex = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        let y = if j == ny { bbox.max[1] } else { bbox.min[1] + j as f64 * dy };
        for i in 0..=nx {
            let x = if i == nx { bbox.max[0] } else { bbox.min[0] + i as f64 * dx };
            vertices.push([x, y]);
            boundary_vertex.push(i == 0 || j == 0 || i == nx || j == ny);
        }
    }

    let vid = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::with_capacity(2 * nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let (v00, v10, v01, v11) = (vid(i, j), vid(i + 1, j), vid(i, j + 1), vid(i + 1, j + 1));
            let flip = pattern == DiagonalPattern::Alternating && (i + j) % 2 == 1;
            if flip {
                elements.push([v00, v10, v01]);
                elements.push([v10, v11, v01]);
            } else {
                elements.push([v00, v10, v11]);
                elements.push([v00, v11, v01]);
            }
        }
    }

    let (facets, element_to_facets) = build_facets(&elements);

    let mut h_max: f64 = 0.0;
    let mut h_min = f64::INFINITY;
    for tri in &elements {
        let d = element_diameter_of(&vertices, tri);
        h_max = h_max.max(d);
        h_min = h_min.min(d);
    }

    Ok(BackgroundMesh {
        vertices,
        elements,
        facets,
        element_to_facets,
        h_max,
        h_min,
        bounding_box: bbox,
        cells: [nx, ny],
        boundary_vertex,
    })
}

fn build_facets(elements: &[[usize; 3]]) -> (Vec<Facet>, Vec<[usize; 3]>) {
    let mut lookup: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut facets: Vec<Facet> = Vec::new();
    let mut element_to_facets = Vec::with_capacity(elements.len());
    for (e, tri) in elements.iter().enumerate() {
        let mut local = [0usize; 3];
        for (k, slot) in local.iter_mut().enumerate() {
            let a = tri[(k + 1) % 3];
            let b = tri[(k + 2) % 3];
            let key = (a.min(b), a.max(b));
            *slot = match lookup.get(&key) {
                Some(&f) => {
                    facets[f].right = Some(e);
                    f
                }
                None => {
                    let f = facets.len();
                    facets.push(Facet {
                        vertices: [key.0, key.1],
                        left: e,
                        right: None,
                    });
                    lookup.insert(key, f);
                    f
                }
            };
        }
        element_to_facets.push(local);
    }
    (facets, element_to_facets)
}

fn element_diameter_of(vertices: &[Point], tri: &[usize; 3]) -> f64 {
    let [a, b, c] = tri.map(|v| vertices[v]);
    dist(a, b).max(dist(b, c)).max(dist(c, a))
}

/// Signed area of the triangle `(a, b, c)`, positive for counter-clockwise order.
pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

impl BackgroundMesh {
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn element_points(&self, element: usize) -> [Point; 3] {
        self.elements[element].map(|v| self.vertices[v])
    }

    pub fn element_area(&self, element: usize) -> f64 {
        let [a, b, c] = self.element_points(element);
        signed_area(a, b, c)
    }

    pub fn element_diameter(&self, element: usize) -> f64 {
        element_diameter_of(&self.vertices, &self.elements[element])
    }

    /// Ratio of the largest to the smallest element diameter.
    pub fn quasi_uniformity(&self) -> f64 {
        self.h_max / self.h_min
    }

    /// The two elements whose closures form the patch of an interior facet.
    pub fn facet_patch(&self, facet: usize) -> Result<(usize, usize)> {
        let f = &self.facets[facet];
        match f.right {
            Some(r) => Ok((f.left, r)),
            None => Err(Error::NoPatch(facet)),
        }
    }

    /// Facet-neighbours of an element (boundary facets contribute nothing).
    pub fn neighbours(&self, element: usize) -> impl Iterator<Item = usize> + '_ {
        self.element_to_facets[element].iter().filter_map(move |&f| {
            let facet = &self.facets[f];
            match facet.right {
                Some(r) if facet.left == element => Some(r),
                Some(_) => Some(facet.left),
                None => None,
            }
        })
    }

    pub fn touches_boundary(&self, element: usize) -> bool {
        self.elements[element].iter().any(|&v| self.boundary_vertex[v])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Rect {
        Rect::new(0.0, 1.0, 0.0, 1.0)
    }

    #[test]
    fn minimal_square_split() {
        let mesh = build_structured_mesh(unit(), 1.0).unwrap();
        assert_eq!(mesh.num_elements(), 2);
        assert_eq!(mesh.num_vertices(), 4);
        assert_eq!(mesh.facets.len(), 5);
        assert_eq!(mesh.facets.iter().filter(|f| f.is_interior()).count(), 1);
    }

    #[test]
    fn two_by_two_grid() {
        let mesh = build_structured_mesh(unit(), 0.5).unwrap();
        assert_eq!(mesh.num_elements(), 8);
        assert_eq!(mesh.num_vertices(), 9);
        let area: f64 = (0..8).map(|e| mesh.element_area(e)).sum();
        assert!((area - 1.0).abs() < 1e-14);
    }

    #[test]
    fn travelling_circle_box_area_by_summation() {
        let bbox = Rect::new(-0.7, 0.9, -0.7, 0.7);
        let mesh = build_structured_mesh(bbox, 0.4).unwrap();
        // ceil(1.6/0.4) = 4, ceil(1.4/0.4) = 4 cells
        assert_eq!(mesh.cells, [4, 4]);
        assert_eq!(mesh.num_elements(), 32);
        let area: f64 = (0..mesh.num_elements()).map(|e| mesh.element_area(e)).sum();
        assert!((area - 2.24).abs() < 1e-12 * 2.24);
    }

    #[test]
    fn degenerate_box_rejected() {
        let err = build_structured_mesh(Rect::new(0.0, 0.0, 0.0, 1.0), 0.1).unwrap_err();
        assert!(matches!(err, Error::DegenerateBox { .. }));
        assert!(build_structured_mesh(unit(), 0.0).is_err());
        assert!(build_structured_mesh(unit(), f64::NAN).is_err());
    }

    #[test]
    fn patch_of_only_interior_facet() {
        let mesh = build_structured_mesh(unit(), 1.0).unwrap();
        let interior = mesh.facets.iter().position(|f| f.is_interior()).unwrap();
        let (a, b) = mesh.facet_patch(interior).unwrap();
        assert_ne!(a, b);
        let mut pair = [a, b];
        pair.sort();
        assert_eq!(pair, [0, 1]);
        for (f, facet) in mesh.facets.iter().enumerate() {
            if facet.is_boundary() {
                assert_eq!(mesh.facet_patch(f), Err(Error::NoPatch(f)));
            }
        }
    }

    #[test]
    fn patch_area_is_twice_element_area() {
        let mesh = build_structured_mesh(unit(), 0.5).unwrap();
        for f in (0..mesh.facets.len()).filter(|&f| mesh.facets[f].is_interior()) {
            let (a, b) = mesh.facet_patch(f).unwrap();
            let area = mesh.element_area(a) + mesh.element_area(b);
            assert!((area - 2.0 * 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn adjacency_invariants() {
        for pattern in [DiagonalPattern::Fixed, DiagonalPattern::Alternating] {
            let mesh =
                build_structured_mesh_with(Rect::new(-0.7, 0.9, -0.7, 0.7), 0.13, pattern).unwrap();
            // Euler relation for a simply connected planar triangulation.
            let v = mesh.num_vertices() as i64;
            let f = mesh.facets.len() as i64;
            let e = mesh.num_elements() as i64;
            assert_eq!(v - f + e, 1);
            for e in 0..mesh.num_elements() {
                assert!(mesh.element_area(e) > 0.0);
                for (k, &fid) in mesh.element_to_facets[e].iter().enumerate() {
                    let facet = mesh.facets[fid];
                    assert!(facet.left == e || facet.right == Some(e));
                    // local facet k is opposite local vertex k
                    assert!(!facet.vertices.contains(&mesh.elements[e][k]));
                }
            }
            for (fid, facet) in mesh.facets.iter().enumerate() {
                if let Ok((a, b)) = mesh.facet_patch(fid) {
                    assert!(mesh.element_to_facets[a].contains(&fid));
                    assert!(mesh.element_to_facets[b].contains(&fid));
                } else {
                    assert!(facet.vertices.iter().all(|&v| mesh.boundary_vertex[v]));
                }
            }
            assert!(mesh.quasi_uniformity() < 1.5);
        }
    }
}
