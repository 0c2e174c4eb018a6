//! Start-up checks of case definitions at random space-time points.

use cutfem_core::cases::{gradient_mismatch, pde_residual, transport_residual, CaseKind, CaseSpec};
use cutfem_core::Point;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{AppError, AppResult};

pub const SAMPLES: usize = 100;
pub const PDE_TOLERANCE: f64 = 1e-4;
pub const GRADIENT_TOLERANCE: f64 = 1e-5;
pub const TRANSPORT_TOLERANCE: f64 = 1e-6;

const PDE_STEP: f64 = 1e-4;
const GRADIENT_STEP: f64 = 1e-6;
const TRANSPORT_STEP: f64 = 1e-6;
/// Exclusion radius around kinks of the level set and jumps of `w`.
const KINK_MARGIN: f64 = 1e-3;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CaseValidation {
    pub samples: usize,
    pub max_pde_residual: Option<f64>,
    pub max_gradient_mismatch: Option<f64>,
    pub max_transport_residual: f64,
    pub transport_samples: usize,
}

impl CaseValidation {
    pub fn passed(&self) -> bool {
        self.max_pde_residual.is_none_or(|r| r <= PDE_TOLERANCE)
            && self.max_gradient_mismatch.is_none_or(|g| g <= GRADIENT_TOLERANCE)
            && self.max_transport_residual <= TRANSPORT_TOLERANCE
    }
}

/// Points where `phi` or `w` is not smooth.
fn near_kink(case: &CaseSpec, x: Point, t: f64) -> bool {
    match case.kind {
        CaseKind::CollidingCircles => {
            x[1].abs() < KINK_MARGIN
                || (t - 0.5 * case.t_end).abs() < KINK_MARGIN
                || [t - 0.75, 0.75 - t]
                    .iter()
                    .any(|&c| x[0].hypot(x[1] - c) < KINK_MARGIN)
        }
        CaseKind::TravellingCircle | CaseKind::Kite(_) | CaseKind::StaticDisk { .. } => {
            let probe = case.phi(x, t) + case.radius;
            probe < KINK_MARGIN
        }
    }
}

/// Samples `samples` points uniformly in the box and in `(0, t_end)`.
pub fn validate_case(case: &CaseSpec, samples: usize, seed: u64) -> CaseValidation {
    let mut rng = StdRng::seed_from_u64(seed);
    let b = case.bbox;
    let mut out = CaseValidation {
        samples,
        ..CaseValidation::default()
    };
    let t_max = if case.t_end > 0.0 { case.t_end } else { 1.0 };
    for _ in 0..samples {
        let x = [
            rng.random_range(b.min[0]..b.max[0]),
            rng.random_range(b.min[1]..b.max[1]),
        ];
        let t = rng.random_range(0.01 * t_max..t_max);
        if let Some(r) = pde_residual(case, x, t, PDE_STEP) {
            let m = out.max_pde_residual.get_or_insert(0.0);
            *m = m.max(r.abs());
        }
        if let Some(g) = gradient_mismatch(case, x, t, GRADIENT_STEP) {
            let m = out.max_gradient_mismatch.get_or_insert(0.0);
            *m = m.max(g);
        }
        if !near_kink(case, x, t) {
            out.max_transport_residual = out
                .max_transport_residual
                .max(transport_residual(case, x, t, TRANSPORT_STEP).abs());
            out.transport_samples += 1;
        }
    }
    out
}

pub fn ensure_valid(case: &CaseSpec, seed: u64) -> AppResult<CaseValidation> {
    let v = validate_case(case, SAMPLES, seed);
    if v.passed() {
        Ok(v)
    } else {
        Err(AppError::Validation {
            case: case.name.clone(),
            message: format!(
                "pde residual {:?} (bound {PDE_TOLERANCE:e}), gradient mismatch {:?} (bound {GRADIENT_TOLERANCE:e}), \
                 transport residual {:e} (bound {TRANSPORT_TOLERANCE:e})",
                v.max_pde_residual, v.max_gradient_mismatch, v.max_transport_residual
            ),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use cutfem_core::cases::CASE_NAMES;

    #[test]
    fn shipped_cases_pass() {
        for name in CASE_NAMES {
            let case = CaseSpec::by_name(name).unwrap();
            let v = validate_case(&case, SAMPLES, 7);
            assert!(v.passed(), "{name}: {v:?}");
            assert!(v.transport_samples > SAMPLES / 2, "{name}: {v:?}");
            assert_eq!(v.max_pde_residual.is_some(), case.has_exact_solution());
        }
    }

    #[test]
    fn rejects_inconsistent_motion() {
        // velocity switches at t_end / 2 while the circles turn at t = 0.75
        let mut case = CaseSpec::colliding_circles();
        case.t_end = 3.0;
        assert!(ensure_valid(&case, 3).is_err());
    }
}
