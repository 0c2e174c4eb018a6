use alloc::vec::Vec;

use super::cut::{decompose_side, Side};
use super::levelset::{ElementClass, LevelSetFrame};
use super::rules::{triangle_rule, TriangleRule};
use crate::mesh::{signed_area, BackgroundMesh};
use crate::{Point, Result};

/// Quadrature restricted to one background element.
#[derive(Clone, Debug)]
pub struct ElementQuadrature {
    pub element: usize,
    pub class: ElementClass,
    pub sub_triangles: Vec<[Point; 3]>,
    pub points: Vec<Point>,
    pub weights: Vec<f64>,
}

impl ElementQuadrature {
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// Quadrature over `{phi_h <= 0}` (or its complement), element by element in
/// increasing element order.
#[derive(Clone, Debug)]
pub struct CutQuadrature {
    pub degree: usize,
    pub side: Side,
    pub elements: Vec<ElementQuadrature>,
}

impl CutQuadrature {
    pub fn measure(&self) -> f64 {
        self.elements.iter().map(ElementQuadrature::measure).sum()
    }

    /// Exact area of the covered region, summed over sub-simplices.
    pub fn sub_simplex_area(&self) -> f64 {
        self.elements
            .iter()
            .flat_map(|eq| eq.sub_triangles.iter())
            .map(|t| signed_area(t[0], t[1], t[2]))
            .sum()
    }

    pub fn integrate<F: Fn(Point) -> f64>(&self, f: F) -> f64 {
        self.elements
            .iter()
            .flat_map(|eq| eq.points.iter().zip(&eq.weights))
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

fn push_rule(rule: &TriangleRule, tri: &[Point; 3], points: &mut Vec<Point>, weights: &mut Vec<f64>) {
    let area = signed_area(tri[0], tri[1], tri[2]);
    for (l, &w) in rule.points.iter().zip(rule.weights) {
        points.push([
            l[0] * tri[0][0] + l[1] * tri[1][0] + l[2] * tri[2][0],
            l[0] * tri[0][1] + l[1] * tri[1][1] + l[2] * tri[2][1],
        ]);
        weights.push(w * area);
    }
}

fn element_quadrature_for(
    mesh: &BackgroundMesh,
    frame: &LevelSetFrame,
    rule: &TriangleRule,
    element: usize,
    side: Side,
) -> Result<Option<ElementQuadrature>> {
    let class = frame.class(element);
    let whole = mesh.element_points(element);
    let sub_triangles = match (class, side) {
        (ElementClass::Cut, _) => decompose_side(whole, frame.element_values(mesh, element), side)?,
        (ElementClass::Negative, Side::Inside) | (ElementClass::Positive, Side::Outside) => {
            alloc::vec![whole]
        }
        _ => return Ok(None),
    };
    let mut points = Vec::with_capacity(sub_triangles.len() * rule.points.len());
    let mut weights = Vec::with_capacity(points.capacity());
    for tri in &sub_triangles {
        push_rule(rule, tri, &mut points, &mut weights);
    }
    Ok(Some(ElementQuadrature {
        element,
        class,
        sub_triangles,
        points,
        weights,
    }))
}

/// Quadrature over the discrete domain `{phi_h <= 0}`, exact to
/// `exactness_degree` on every sub-simplex.
pub fn build_cut_quadrature(
    frame: &LevelSetFrame,
    mesh: &BackgroundMesh,
    exactness_degree: usize,
) -> Result<CutQuadrature> {
    build_side_quadrature(frame, mesh, exactness_degree, Side::Inside, 0..mesh.num_elements())
}

/// Quadrature over one side of the zero level set, restricted to `elements`.
pub fn build_side_quadrature<I>(
    frame: &LevelSetFrame,
    mesh: &BackgroundMesh,
    exactness_degree: usize,
    side: Side,
    elements: I,
) -> Result<CutQuadrature>
where
    I: IntoIterator<Item = usize>,
{
    let rule = triangle_rule(exactness_degree)?;
    let mut out = Vec::new();
    for e in elements {
        if let Some(eq) = element_quadrature_for(mesh, frame, &rule, e, side)? {
            out.push(eq);
        }
    }
    Ok(CutQuadrature {
        degree: exactness_degree,
        side,
        elements: out,
    })
}

/// Quadrature over whole (uncut) elements, e.g. the active domain.
pub fn build_element_quadrature<I>(
    mesh: &BackgroundMesh,
    elements: I,
    exactness_degree: usize,
) -> Result<CutQuadrature>
where
    I: IntoIterator<Item = usize>,
{
    let rule = triangle_rule(exactness_degree)?;
    let elements = elements
        .into_iter()
        .map(|e| {
            let whole = mesh.element_points(e);
            let mut points = Vec::with_capacity(rule.points.len());
            let mut weights = Vec::with_capacity(rule.points.len());
            push_rule(&rule, &whole, &mut points, &mut weights);
            ElementQuadrature {
                element: e,
                class: ElementClass::Negative,
                sub_triangles: alloc::vec![whole],
                points,
                weights,
            }
        })
        .collect();
    Ok(CutQuadrature {
        degree: exactness_degree,
        side: Side::Inside,
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::levelset::interpolate_levelset;
    use crate::math::{hypot, log2};
    use crate::mesh::{build_structured_mesh, Rect};

    #[test]
    fn no_cut_gives_box_area() {
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), 0.3).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |_, _| -1.0).unwrap();
        let q = build_cut_quadrature(&frame, &mesh, 2).unwrap();
        assert_eq!(q.measure(), 1.0);
    }

    #[test]
    fn positive_elements_have_no_quadrature() {
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), 0.25).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| x[0] - 0.6).unwrap();
        let q = build_cut_quadrature(&frame, &mesh, 4).unwrap();
        for eq in &q.elements {
            assert_ne!(eq.class, ElementClass::Positive);
            if eq.class == ElementClass::Negative {
                assert_eq!(eq.sub_triangles.len(), 1);
            }
        }
        assert!((q.measure() - 0.6).abs() < 1e-14);
    }

    #[test]
    fn half_plane_linear_integral_exact() {
        // ∫_{x1 <= 0.5} (x1 + x2) over the unit square = 0.125 + 0.25 = 0.375
        for h in [1.0, 0.3, 0.25, 0.07] {
            let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), h).unwrap();
            let frame = interpolate_levelset(&mesh, 0.0, |x, _| x[0] - 0.5).unwrap();
            let q = build_cut_quadrature(&frame, &mesh, 2).unwrap();
            let value = q.integrate(|x| x[0] + x[1]);
            assert!((value - 0.375).abs() < 1e-13, "h = {h}: {value}");
        }
    }

    #[test]
    fn weights_match_sub_simplex_area() {
        let mesh = build_structured_mesh(Rect::new(-0.7, 0.9, -0.7, 0.7), 0.1).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
        for degree in [1, 2, 4, 6] {
            let q = build_cut_quadrature(&frame, &mesh, degree).unwrap();
            let (m, a) = (q.measure(), q.sub_simplex_area());
            assert!((m - a).abs() <= 1e-12 * a);
            for eq in q.elements.iter().filter(|eq| eq.class == ElementClass::Cut) {
                let exact: f64 = eq.sub_triangles.iter().map(|t| signed_area(t[0], t[1], t[2])).sum();
                assert!((eq.measure() - exact).abs() <= 1e-13 * exact);
            }
        }
    }

    #[test]
    fn disk_measure_converges_quadratically() {
        let exact = core::f64::consts::PI * 0.25;
        let mut log_h = alloc::vec::Vec::new();
        let mut log_e = alloc::vec::Vec::new();
        for level in 0..5 {
            let h = 0.4 / f64::from(1u32 << level);
            let mesh = build_structured_mesh(Rect::new(-0.7, 0.9, -0.7, 0.7), h).unwrap();
            let frame = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
            let q = build_cut_quadrature(&frame, &mesh, 2).unwrap();
            log_h.push(log2(h));
            log_e.push(log2((q.measure() - exact).abs()));
        }
        let n = log_h.len() as f64;
        let (mx, my) = (log_h.iter().sum::<f64>() / n, log_e.iter().sum::<f64>() / n);
        let sxy: f64 = log_h.iter().zip(&log_e).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = log_h.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        assert!((slope - 2.0).abs() <= 0.2, "slope {slope}");
    }

    #[test]
    fn outside_and_inside_partition_box() {
        let mesh = build_structured_mesh(Rect::new(-0.7, 0.9, -0.7, 0.7), 0.2).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
        let inside = build_cut_quadrature(&frame, &mesh, 2).unwrap();
        let outside =
            build_side_quadrature(&frame, &mesh, 2, Side::Outside, 0..mesh.num_elements()).unwrap();
        assert!((inside.measure() + outside.measure() - 2.24).abs() < 1e-12);
    }
}
