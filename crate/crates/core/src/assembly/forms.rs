//! Volume forms over cut quadratures: mass, convection-diffusion, load.

use alloc::vec::Vec;

use super::dofs::DofMap;
use super::element::ElementMap;
use super::sparse::{SparseOperator, TripletBuilder};
use crate::geometry::quadrature::CutQuadrature;
use crate::mesh::BackgroundMesh;
use crate::{Error, Point, Result};

fn local_dofs(mesh: &BackgroundMesh, element: usize, dofs: &DofMap, step: usize) -> Result<[usize; 3]> {
    let tri = mesh.elements[element];
    let mut out = [0; 3];
    for (slot, &vertex) in out.iter_mut().zip(&tri) {
        *slot = dofs.local(vertex).ok_or(Error::MissingDof { step, element, vertex })?;
    }
    Ok(out)
}

/// `M[i, j] = ∫ ψ_j ψ_i` over the quadrature region; rows index `test`,
/// columns index `trial`.
pub fn assemble_cut_mass(
    mesh: &BackgroundMesh,
    quadrature: &CutQuadrature,
    trial: &DofMap,
    test: &DofMap,
    step: usize,
) -> Result<SparseOperator> {
    let mut b = TripletBuilder::with_capacity(test.len(), trial.len(), 9 * quadrature.elements.len());
    for eq in &quadrature.elements {
        let rows = local_dofs(mesh, eq.element, test, step)?;
        let cols = local_dofs(mesh, eq.element, trial, step)?;
        let map = ElementMap::of(mesh, eq.element);
        let mut local = [[0.0; 3]; 3];
        for (&x, &w) in eq.points.iter().zip(&eq.weights) {
            let l = map.barycentric(x);
            for i in 0..3 {
                for j in 0..3 {
                    local[i][j] += w * l[i] * l[j];
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                b.add(rows[i], cols[j], local[i][j]);
            }
        }
    }
    Ok(b.build())
}

/// `A[i, j] = ∫ ν ∇ψ_j·∇ψ_i − ψ_j (w·∇ψ_i)`.
pub fn assemble_convection_diffusion<W>(
    mesh: &BackgroundMesh,
    quadrature: &CutQuadrature,
    velocity: W,
    nu: f64,
    dofs: &DofMap,
    step: usize,
) -> Result<SparseOperator>
where
    W: Fn(Point) -> Point,
{
    let mut b = TripletBuilder::with_capacity(dofs.len(), dofs.len(), 9 * quadrature.elements.len());
    for eq in &quadrature.elements {
        let ids = local_dofs(mesh, eq.element, dofs, step)?;
        let map = ElementMap::of(mesh, eq.element);
        let g = map.gradients;
        let area: f64 = eq.measure();
        let mut local = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                local[i][j] = nu * area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
            }
        }
        for (&x, &w) in eq.points.iter().zip(&eq.weights) {
            let l = map.barycentric(x);
            let vel = velocity(x);
            for i in 0..3 {
                let adv = vel[0] * g[i][0] + vel[1] * g[i][1];
                for j in 0..3 {
                    local[i][j] -= w * l[j] * adv;
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                b.add(ids[i], ids[j], local[i][j]);
            }
        }
    }
    Ok(b.build())
}

/// `b[i] = ∫ f ψ_i`.
pub fn assemble_load<F>(
    mesh: &BackgroundMesh,
    quadrature: &CutQuadrature,
    source: F,
    dofs: &DofMap,
    step: usize,
) -> Result<Vec<f64>>
where
    F: Fn(Point) -> f64,
{
    let mut out = alloc::vec![0.0; dofs.len()];
    for eq in &quadrature.elements {
        let ids = local_dofs(mesh, eq.element, dofs, step)?;
        let map = ElementMap::of(mesh, eq.element);
        let mut local = [0.0; 3];
        for (&x, &w) in eq.points.iter().zip(&eq.weights) {
            let l = map.barycentric(x);
            let fx = w * source(x);
            for i in 0..3 {
                local[i] += fx * l[i];
            }
        }
        for i in 0..3 {
            out[ids[i]] += local[i];
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_cut_quadrature, build_element_quadrature, interpolate_levelset};
    use crate::math::hypot;
    use crate::mesh::{build_structured_mesh, Rect};

    fn single_triangle() -> (BackgroundMesh, CutQuadrature, DofMap) {
        // the unit square split once; keep only element 0
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 2.0), 2.0).unwrap();
        let q = build_element_quadrature(&mesh, [0], 2).unwrap();
        let dofs = DofMap::new(&[0, 1, 2, 3], 4).unwrap();
        (mesh, q, dofs)
    }

    #[test]
    fn element_mass_matrix_closed_form() {
        let (mesh, q, dofs) = single_triangle();
        let m = assemble_cut_mass(&mesh, &q, &dofs, &dofs, 0).unwrap();
        let tri = mesh.elements[0];
        let area = mesh.element_area(0);
        assert!((area - 1.0).abs() < 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                let expected = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                let got = m.get(dofs.local(tri[i]).unwrap(), dofs.local(tri[j]).unwrap());
                assert!((got - expected).abs() < 1e-15, "{i},{j}: {got}");
            }
        }
        assert!(m.is_symmetric(0.0));
    }

    #[test]
    fn mass_sums_are_measures() {
        let mesh = build_structured_mesh(Rect::new(-0.7, 0.9, -0.7, 0.7), 0.1).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
        let q = build_cut_quadrature(&frame, &mesh, 2).unwrap();
        let all: Vec<usize> = (0..mesh.num_vertices()).collect();
        let dofs = DofMap::new(&all, mesh.num_vertices()).unwrap();
        let m = assemble_cut_mass(&mesh, &q, &dofs, &dofs, 0).unwrap();
        let load = assemble_load(&mesh, &q, |_| 1.0, &dofs, 0).unwrap();
        let rows = m.row_sums();
        for (r, l) in rows.iter().zip(&load) {
            assert!((r - l).abs() < 1e-15);
        }
        let total: f64 = rows.iter().sum();
        assert!((total - q.measure()).abs() < 1e-13);
        assert!(m.is_symmetric(1e-13));
        // vertices of purely outside elements carry nothing
        let far = mesh.vertices.iter().position(|x| x[0] > 0.85 && x[1] > 0.65).unwrap();
        assert_eq!(rows[dofs.local(far).unwrap()], 0.0);
        assert!(assemble_load(&mesh, &q, |_| 0.0, &dofs, 0).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn missing_dof_is_reported() {
        let (mesh, q, _) = single_triangle();
        let partial = DofMap::new(&[0, 1], 4).unwrap();
        let err = assemble_cut_mass(&mesh, &q, &partial, &partial, 7).unwrap_err();
        assert!(matches!(err, Error::MissingDof { step: 7, element: 0, .. }));
    }

    #[test]
    fn pure_diffusion_is_stiffness() {
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), 0.25).unwrap();
        let all: Vec<usize> = (0..mesh.num_vertices()).collect();
        let dofs = DofMap::new(&all, mesh.num_vertices()).unwrap();
        let q = build_element_quadrature(&mesh, 0..mesh.num_elements(), 4).unwrap();
        let a = assemble_convection_diffusion(&mesh, &q, |_| [0.0, 0.0], 0.3, &dofs, 0).unwrap();
        assert!(a.is_symmetric(1e-14));
        assert!(a.row_sums().iter().all(|s| s.abs() < 1e-14));
        // positive semidefinite on a few probe vectors
        for k in 1..5 {
            let v: Vec<f64> = (0..dofs.len()).map(|i| ((i * k) as f64 * 0.37).sin()).collect();
            assert!(a.bilinear(&v, &v) >= -1e-14);
        }
    }

    #[test]
    fn convection_against_constants() {
        // columns sum to -∫ w·∇ψ_i; testing with 1 kills the whole form
        let mesh = build_structured_mesh(Rect::new(-0.7, 0.9, -0.7, 0.7), 0.1).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
        let q = build_cut_quadrature(&frame, &mesh, 4).unwrap();
        let all: Vec<usize> = (0..mesh.num_vertices()).collect();
        let dofs = DofMap::new(&all, mesh.num_vertices()).unwrap();
        let w = |x: Point| [1.0 + x[1], -0.5 * x[0]];
        let a = assemble_convection_diffusion(&mesh, &q, w, 0.7, &dofs, 0).unwrap();
        let col = a.col_sums();
        let scale = a.max_abs();
        assert!(col.iter().all(|c| c.abs() < 1e-12 * scale));
        // row sums: -∫ w·∇ψ_i
        let rows = a.row_sums();
        let mut expected = alloc::vec![0.0; dofs.len()];
        for eq in &q.elements {
            let map = ElementMap::of(&mesh, eq.element);
            for (&x, &wt) in eq.points.iter().zip(&eq.weights) {
                let vel = w(x);
                for (k, &v) in mesh.elements[eq.element].iter().enumerate() {
                    let g = map.gradients[k];
                    expected[v] -= wt * (vel[0] * g[0] + vel[1] * g[1]);
                }
            }
        }
        for (r, e) in rows.iter().zip(&expected) {
            assert!((r - e).abs() < 1e-13);
        }
    }

    #[test]
    fn skew_part_is_boundary_only() {
        // constant w, u and v vanishing on the boundary of the square:
        // ∫ u w·∇v + v w·∇u = 0
        let mesh = build_structured_mesh(Rect::new(0.0, 1.0, 0.0, 1.0), 0.125).unwrap();
        let all: Vec<usize> = (0..mesh.num_vertices()).collect();
        let dofs = DofMap::new(&all, mesh.num_vertices()).unwrap();
        let q = build_element_quadrature(&mesh, 0..mesh.num_elements(), 2).unwrap();
        let a = assemble_convection_diffusion(&mesh, &q, |_| [0.3, -1.1], 0.0, &dofs, 0).unwrap();
        let bubble = |x: Point| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
        let u: Vec<f64> = mesh.vertices.iter().map(|&x| bubble(x) * (1.0 + x[0])).collect();
        let v: Vec<f64> = mesh.vertices.iter().map(|&x| bubble(x) * (2.0 - x[1] * x[1])).collect();
        let sym = a.bilinear(&v, &u) + a.bilinear(&u, &v);
        assert!(sym.abs() < 1e-14, "{sym}");
    }

    #[test]
    fn mixed_mass_uses_old_geometry() {
        let mesh = build_structured_mesh(Rect::new(-0.7, 0.9, -0.7, 0.7), 0.1).unwrap();
        let old = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
        let q = build_cut_quadrature(&old, &mesh, 2).unwrap();
        let all: Vec<usize> = (0..mesh.num_vertices()).collect();
        let wide = DofMap::new(&all, mesh.num_vertices()).unwrap();
        let narrow: Vec<usize> = all
            .iter()
            .copied()
            .filter(|&v| hypot(mesh.vertices[v][0], mesh.vertices[v][1]) < 0.75)
            .collect();
        let narrow = DofMap::new(&narrow, mesh.num_vertices()).unwrap();
        let m = assemble_cut_mass(&mesh, &q, &narrow, &wide, 1).unwrap();
        assert_eq!((m.rows, m.cols), (wide.len(), narrow.len()));
        let total: f64 = m.col_sums().iter().sum();
        assert!((total - q.measure()).abs() < 1e-13);
    }
}
