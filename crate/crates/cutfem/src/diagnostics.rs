//! Ghost-penalty consistency and extension diagnostics on one time level.

use cutfem_core::assembly::{assemble_convection_diffusion, assemble_ghost_penalty, DofMap, GhostPenaltyParams, SparseOperator};
use cutfem_core::cases::CaseSpec;
use cutfem_core::geometry::{build_active_mesh, build_cut_quadrature, build_element_quadrature, interpolate_levelset};
use cutfem_core::mesh::BackgroundMesh;
use cutfem_core::stepping::SchemeConfig;
use cutfem_core::Result;
use rand::Rng;

/// Stiffness on the active and the physical domain plus the penalty matrix,
/// all on the active dofs at one time.
pub struct GhostProbe {
    pub dofs: DofMap,
    pub active_stiffness: SparseOperator,
    pub physical_stiffness: SparseOperator,
    pub penalty: SparseOperator,
    pub stabilized_facets: usize,
}

fn stiffness(mesh: &BackgroundMesh, quad: &cutfem_core::geometry::CutQuadrature, dofs: &DofMap) -> Result<SparseOperator> {
    assemble_convection_diffusion(mesh, quad, |_| [0.0, 0.0], 1.0, dofs, 0)
}

impl GhostProbe {
    pub fn new(case: &CaseSpec, mesh: &BackgroundMesh, time: f64, config: &SchemeConfig) -> Result<Self> {
        let frame = interpolate_levelset(mesh, time, |x, t| case.phi(x, t))?;
        let active = build_active_mesh(&frame, mesh, config.delta_h(), 0, config.dilation)?;
        let dofs = DofMap::new(&active.active_dofs, mesh.num_vertices())?;
        let physical = build_cut_quadrature(&frame, mesh, 2)?;
        let whole = build_element_quadrature(mesh, active.active_elements.iter().copied(), 2)?;
        let params = GhostPenaltyParams::new(config.c_gamma, mesh.h_max, active.delta_h)?;
        Ok(Self {
            active_stiffness: stiffness(mesh, &whole, &dofs)?,
            physical_stiffness: stiffness(mesh, &physical, &dofs)?,
            penalty: assemble_ghost_penalty(mesh, &active, &params, &dofs)?,
            stabilized_facets: active.stabilized_facets.len(),
            dofs,
        })
    }

    /// `max_i |(S 1)_i|`
    pub fn constant_defect(&self) -> f64 {
        self.penalty.row_sums().iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `max_i |(S l)_i|` for the nodal interpolant of a linear function.
    pub fn linear_defect(&self, mesh: &BackgroundMesh, linear: impl Fn([f64; 2]) -> f64) -> f64 {
        let l: Vec<f64> = self.dofs.globals().iter().map(|&v| linear(mesh.vertices[v])).collect();
        self.penalty.matvec(&l).iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `‖∇u‖²_active / (‖∇u‖²_physical + s_h(u, u))`
    pub fn ratio(&self, u: &[f64]) -> f64 {
        let num = self.active_stiffness.bilinear(u, u);
        let den = self.physical_stiffness.bilinear(u, u) + self.penalty.bilinear(u, u);
        num / den
    }

    /// Largest ratio over `samples` coefficient vectors uniform in `[-1, 1]`.
    pub fn sampled_ratio<R: Rng>(&self, rng: &mut R, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        let mut u = vec![0.0; self.dofs.len()];
        for _ in 0..samples {
            u.iter_mut().for_each(|x| *x = rng.random_range(-1.0..1.0));
            worst = worst.max(self.ratio(&u));
        }
        worst
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cutfem_core::mesh::build_structured_mesh;
    use cutfem_core::stepping::BdfOrder;
    use rand::rngs::StdRng;
    use rand::SeedableRng;

    #[test]
    fn penalty_is_consistent_and_controls_the_strip() {
        let case = CaseSpec::travelling_circle();
        let mesh = build_structured_mesh(case.bbox, 0.1).unwrap();
        let cfg = SchemeConfig::for_case(&case, BdfOrder::One, 0.025);
        let probe = GhostProbe::new(&case, &mesh, 0.05, &cfg).unwrap();
        assert!(probe.stabilized_facets > 0);
        assert!(probe.constant_defect() < 1e-12);
        assert!(probe.linear_defect(&mesh, |x| 0.3 - x[0] + 2.0 * x[1]) < 1e-11);
        let mut rng = StdRng::seed_from_u64(5);
        let r = probe.sampled_ratio(&mut rng, 20);
        assert!(r.is_finite() && r > 0.0 && r < 10.0, "{r}");
    }
}
