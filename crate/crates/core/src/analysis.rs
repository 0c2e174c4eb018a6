//! Error norms, space-time accumulation, EOC tables and conservation checks.

use alloc::vec::Vec;

use crate::assembly::ElementMap;
use crate::geometry::quadrature::CutQuadrature;
use crate::math::{log2, sqrt};
use crate::mesh::BackgroundMesh;
use crate::Point;

fn nodal(mesh: &BackgroundMesh, element: usize, solution: &[f64]) -> [f64; 3] {
    mesh.elements[element].map(|v| solution[v])
}

/// `∫ u_h` over the quadrature region; `solution` is vertex indexed.
pub fn integral(mesh: &BackgroundMesh, quadrature: &CutQuadrature, solution: &[f64]) -> f64 {
    quadrature
        .elements
        .iter()
        .map(|eq| {
            let map = ElementMap::of(mesh, eq.element);
            let u = nodal(mesh, eq.element, solution);
            eq.points.iter().zip(&eq.weights).map(|(&x, &w)| w * map.evaluate(u, x)).sum::<f64>()
        })
        .sum()
}

/// `‖u_h‖²` over the quadrature region.
pub fn l2_norm_sq(mesh: &BackgroundMesh, quadrature: &CutQuadrature, solution: &[f64]) -> f64 {
    step_errors(mesh, quadrature, solution, |_| 0.0, |_| [0.0, 0.0]).0
}

/// `(∫ (u_h − u)², ∫ |∇u_h − ∇u|²)` over the quadrature region.
pub fn step_errors<U, G>(
    mesh: &BackgroundMesh,
    quadrature: &CutQuadrature,
    solution: &[f64],
    exact: U,
    exact_gradient: G,
) -> (f64, f64)
where
    U: Fn(Point) -> f64,
    G: Fn(Point) -> Point,
{
    let (mut l2, mut h1) = (0.0, 0.0);
    for eq in &quadrature.elements {
        let map = ElementMap::of(mesh, eq.element);
        let u = nodal(mesh, eq.element, solution);
        let grad = map.gradient(u);
        for (&x, &w) in eq.points.iter().zip(&eq.weights) {
            let e = map.evaluate(u, x) - exact(x);
            let g = exact_gradient(x);
            let (gx, gy) = (grad[0] - g[0], grad[1] - g[1]);
            l2 += w * e * e;
            h1 += w * (gx * gx + gy * gy);
        }
    }
    (l2, h1)
}

/// Running sums `Σ Δt ‖e‖²` in L2 and the H1 seminorm.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SpaceTimeErrorAccumulator {
    pub l2_sq_sum: f64,
    pub h1_sq_sum: f64,
    pub steps: usize,
}

impl SpaceTimeErrorAccumulator {
    pub fn add(&mut self, dt: f64, l2_sq: f64, h1_sq: f64) {
        self.l2_sq_sum += dt * l2_sq;
        self.h1_sq_sum += dt * h1_sq;
        self.steps += 1;
    }

    /// `‖e‖_{L2(L2)}`
    pub fn l2_l2(&self) -> f64 {
        sqrt(self.l2_sq_sum)
    }

    /// `‖∇e‖_{L2(L2)}`
    pub fn l2_h1(&self) -> f64 {
        sqrt(self.h1_sq_sum)
    }
}

/// `log2(coarse / fine)`; `None` unless both are positive and finite.
pub fn eoc(coarse: f64, fine: f64) -> Option<f64> {
    let valid = |e: f64| e.is_finite() && e > 0.0;
    (valid(coarse) && valid(fine)).then(|| log2(coarse / fine))
}

fn eoc_opt(coarse: Option<f64>, fine: Option<f64>) -> Option<f64> {
    eoc(coarse?, fine?)
}

/// Successive rates of a sequence of errors under halving; the first entry
/// is always `None`.
pub fn eoc_sequence(errors: &[f64]) -> Vec<Option<f64>> {
    (0..errors.len())
        .map(|k| if k == 0 { None } else { eoc(errors[k - 1], errors[k]) })
        .collect()
}

/// Errors on a grid of time levels (rows) and space levels (columns).
#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceTable {
    pub lt_levels: Vec<usize>,
    pub lx_levels: Vec<usize>,
    /// `errors[row][col]`; `None` marks a failed or skipped cell.
    pub errors: Vec<Vec<Option<f64>>>,
}

impl ConvergenceTable {
    pub fn new(lt_levels: Vec<usize>, lx_levels: Vec<usize>) -> Self {
        let errors = alloc::vec![alloc::vec![None; lx_levels.len()]; lt_levels.len()];
        Self {
            lt_levels,
            lx_levels,
            errors,
        }
    }

    pub fn set(&mut self, row: usize, col: usize, value: Option<f64>) {
        self.errors[row][col] = value;
    }

    fn at(&self, row: usize, col: usize) -> Option<f64> {
        *self.errors.get(row)?.get(col)?
    }

    fn rows(&self) -> usize {
        self.lt_levels.len()
    }

    fn cols(&self) -> usize {
        self.lx_levels.len()
    }

    /// Time rate per row on the finest mesh.
    pub fn eoc_t(&self) -> Vec<Option<f64>> {
        let last = self.cols().saturating_sub(1);
        (0..self.rows())
            .map(|r| if r == 0 { None } else { eoc_opt(self.at(r - 1, last), self.at(r, last)) })
            .collect()
    }

    /// Space rate per column with the smallest time step.
    pub fn eoc_x(&self) -> Vec<Option<f64>> {
        let last = self.rows().saturating_sub(1);
        (0..self.cols())
            .map(|c| if c == 0 { None } else { eoc_opt(self.at(last, c - 1), self.at(last, c)) })
            .collect()
    }

    /// Combined rate along the diagonal ending in the finest cell.
    pub fn eoc_xt(&self) -> Vec<Option<f64>> {
        let (rows, cols) = (self.rows(), self.cols());
        (0..cols)
            .map(|c| {
                if c == 0 || rows == 0 || rows + c < cols + 1 {
                    return None;
                }
                let r = rows + c - cols; // diagonal through (rows-1, cols-1)
                eoc_opt(self.at(r - 1, c - 1), self.at(r, c))
            })
            .collect()
    }

    /// Rate comparing `(L_x − 1, L_x − 2)` against `(L_x, L_x)`: one time
    /// refinement and two mesh refinements.
    pub fn eoc_xxt(&self) -> Vec<Option<f64>> {
        (0..self.cols())
            .map(|c| {
                if c < 2 || c >= self.rows() {
                    None
                } else {
                    eoc_opt(self.at(c - 1, c - 2), self.at(c, c))
                }
            })
            .collect()
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for row in &mut out.errors {
            for e in row.iter_mut().flatten() {
                *e *= factor;
            }
        }
        out
    }
}

/// Per-step mass balance entries as reported by the time stepper.
pub trait BalanceRecord {
    fn step(&self) -> usize;
    fn drift(&self) -> f64;
    fn balance_defect(&self) -> f64;
    fn mass(&self) -> f64;
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConservationReport {
    pub tolerance: f64,
    pub max_abs_drift: f64,
    pub max_abs_balance: f64,
    pub drifts: Vec<f64>,
    /// Steps whose drift or balance defect exceeds the scaled tolerance.
    pub failing_steps: Vec<usize>,
}

impl ConservationReport {
    pub fn passed(&self) -> bool {
        self.failing_steps.is_empty()
    }
}

/// Checks `|drift|` and the per-step balance defect against
/// `tolerance · max(1, |m_n|)`.
pub fn conservation_report<R: BalanceRecord>(entries: &[R], tolerance: f64) -> ConservationReport {
    let mut report = ConservationReport {
        tolerance,
        max_abs_drift: 0.0,
        max_abs_balance: 0.0,
        drifts: Vec::with_capacity(entries.len()),
        failing_steps: Vec::new(),
    };
    for e in entries {
        let (drift, balance) = (e.drift().abs(), e.balance_defect().abs());
        report.drifts.push(e.drift());
        report.max_abs_drift = report.max_abs_drift.max(drift);
        report.max_abs_balance = report.max_abs_balance.max(balance);
        let bound = tolerance * e.mass().abs().max(1.0);
        if !(drift <= bound && balance <= bound) {
            report.failing_steps.push(e.step());
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{build_cut_quadrature, interpolate_levelset};
    use crate::math::{cos, hypot, sin};
    use crate::mesh::{build_structured_mesh, Rect};
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn disk(h: f64) -> (BackgroundMesh, CutQuadrature) {
        let mesh = build_structured_mesh(Rect::new(-0.7, 0.9, -0.7, 0.7), h).unwrap();
        let frame = interpolate_levelset(&mesh, 0.0, |x, _| hypot(x[0], x[1]) - 0.5).unwrap();
        let q = build_cut_quadrature(&frame, &mesh, 6).unwrap();
        (mesh, q)
    }

    #[test]
    fn linears_are_reproduced() {
        let (mesh, q) = disk(0.1);
        let f = |x: Point| 1.0 + 2.0 * x[0] - x[1];
        let u: Vec<f64> = mesh.vertices.iter().map(|&x| f(x)).collect();
        let (l2, h1) = step_errors(&mesh, &q, &u, f, |_| [2.0, -1.0]);
        assert!(l2 < 1e-26 && h1 < 1e-26, "{l2} {h1}");
    }

    #[test]
    fn zero_against_one_is_measure() {
        let (mesh, q) = disk(0.1);
        let u = alloc::vec![0.0; mesh.num_vertices()];
        let (l2, h1) = step_errors(&mesh, &q, &u, |_| 1.0, |_| [0.0, 0.0]);
        assert!((l2 - q.measure()).abs() < 1e-13 * q.measure());
        assert_eq!(h1, 0.0);
        let ones = alloc::vec![1.0; mesh.num_vertices()];
        assert!((integral(&mesh, &q, &ones) - q.measure()).abs() < 1e-14);
        assert!((l2_norm_sq(&mesh, &q, &ones) - q.measure()).abs() < 1e-13);
    }

    #[test]
    fn interpolation_error_rates() {
        let u = |x: Point| {
            let c = cos(PI * hypot(x[0], x[1]));
            c * c
        };
        let grad = |x: Point| {
            let r = hypot(x[0], x[1]);
            let q = if r > 1e-12 { -PI * sin(2.0 * PI * r) / r } else { -2.0 * PI * PI };
            [q * x[0], q * x[1]]
        };
        let mut l2 = Vec::new();
        let mut h1 = Vec::new();
        for level in 0..4 {
            let (mesh, q) = disk(0.2 / f64::from(1u32 << level));
            let uh: Vec<f64> = mesh.vertices.iter().map(|&x| u(x)).collect();
            let (a, b) = step_errors(&mesh, &q, &uh, u, grad);
            l2.push(sqrt(a));
            h1.push(sqrt(b));
        }
        let rl2 = eoc_sequence(&l2);
        let rh1 = eoc_sequence(&h1);
        assert!((rl2[3].unwrap() - 2.0).abs() < 0.15, "{rl2:?}");
        assert!((rh1[3].unwrap() - 1.0).abs() < 0.15, "{rh1:?}");
    }

    #[test]
    fn simple_rates() {
        assert_eq!(eoc(4.0, 1.0), Some(2.0));
        assert_eq!(eoc(0.0, 1.0), None);
        assert_eq!(eoc(1.0, f64::NAN), None);
        assert_eq!(eoc_sequence(&[4.0, 1.0, 0.5]), [None, Some(2.0), Some(1.0)]);
    }

    fn square_table(n: usize, f: impl Fn(usize, usize) -> f64) -> ConvergenceTable {
        let mut t = ConvergenceTable::new((0..n).collect(), (0..n).collect());
        for r in 0..n {
            for c in 0..n {
                t.set(r, c, Some(f(r, c)));
            }
        }
        t
    }

    #[test]
    fn table_rates_on_model_errors() {
        // e = dt + h² with dt = 2^-r, h = 2^-c
        let t = square_table(4, |r, c| 0.5f64.powi(r as i32) + 0.25f64.powi(c as i32));
        let xt = t.eoc_xt();
        assert_eq!(xt[0], None);
        let expected = log2((0.25 + 1.0 / 16.0) / (0.125 + 1.0 / 64.0));
        assert!((xt[3].unwrap() - expected).abs() < 1e-14);
        let xxt = t.eoc_xxt();
        assert_eq!(&xxt[..2], [None, None]);
        let expected = log2((0.25 + 0.25) / (0.125 + 1.0 / 64.0)); // (2, 1) against (3, 3)
        assert!((xxt[3].unwrap() - expected).abs() < 1e-14);
        assert_eq!(t.eoc_t()[0], None);
        assert!(t.eoc_x()[1].unwrap() > 0.0);
    }

    fn published(rows: &[[f64; 6]]) -> ConvergenceTable {
        let mut t = ConvergenceTable::new((0..rows.len()).collect(), (0..6).collect());
        for (r, row) in rows.iter().enumerate() {
            for (c, &e) in row.iter().enumerate() {
                t.set(r, c, Some(e));
            }
        }
        t
    }

    fn assert_footer(computed: &[Option<f64>], footer: &[Option<f64>]) {
        for (c, f) in computed.iter().zip(footer) {
            match (c, f) {
                (Some(c), Some(f)) => assert!((c - f).abs() <= 0.021, "{computed:?} vs {footer:?}"),
                (None, None) => {}
                _ => panic!("{computed:?} vs {footer:?}"),
            }
        }
    }

    #[test]
    fn travelling_circle_bdf1_footers() {
        let t = published(&[
            [1.17e-01, 4.10e-02, 2.04e-02, 1.54e-02, 1.39e-02, 1.32e-02],
            [1.06e-01, 3.57e-02, 1.34e-02, 8.42e-03, 7.18e-03, 6.79e-03],
            [1.00e-01, 3.32e-02, 1.09e-02, 4.88e-03, 3.74e-03, 3.47e-03],
            [9.72e-02, 3.18e-02, 9.64e-03, 3.38e-03, 2.01e-03, 1.78e-03],
            [9.57e-02, 3.12e-02, 9.03e-03, 2.70e-03, 1.20e-03, 9.27e-04],
            [9.50e-02, 3.09e-02, 8.74e-03, 2.39e-03, 8.20e-04, 5.03e-04],
            [9.46e-02, 3.07e-02, 8.60e-03, 2.26e-03, 6.55e-04, 2.96e-04],
        ]);
        assert_footer(&t.eoc_x(), &[None, Some(1.62), Some(1.84), Some(1.93), Some(1.79), Some(1.14)]);
        assert_footer(&t.eoc_xt(), &[None, Some(1.68), Some(1.78), Some(1.84), Some(1.72), Some(1.47)]);
        assert_footer(
            &t.eoc_t(),
            &[None, Some(0.96), Some(0.97), Some(0.96), Some(0.94), Some(0.88), Some(0.76)],
        );
    }

    #[test]
    fn travelling_circle_bdf2_footers() {
        let l2 = published(&[
            [1.16e-01, 4.68e-02, 2.57e-02, 1.68e-02, 1.30e-02, 1.13e-02],
            [1.06e-01, 3.65e-02, 1.41e-02, 7.46e-03, 5.20e-03, 4.35e-03],
            [1.01e-01, 3.35e-02, 1.02e-02, 3.91e-03, 2.06e-03, 1.51e-03],
            [9.78e-02, 3.23e-02, 9.41e-03, 2.61e-03, 9.32e-04, 5.06e-04],
            [9.60e-02, 3.14e-02, 8.96e-03, 2.36e-03, 6.16e-04, 2.12e-04],
            [9.51e-02, 3.10e-02, 8.72e-03, 2.25e-03, 5.67e-04, 1.45e-04],
            [9.47e-02, 3.08e-02, 8.59e-03, 2.19e-03, 5.47e-04, 1.37e-04],
        ]);
        assert_footer(&l2.eoc_xt(), &[None, Some(1.66), Some(1.83), Some(1.99), Some(2.06), Some(2.05)]);
        let h1 = published(&[
            [5.53e-01, 3.69e-01, 2.48e-01, 1.66e-01, 1.16e-01, 8.87e-02],
            [5.49e-01, 3.23e-01, 1.93e-01, 1.16e-01, 7.20e-02, 4.78e-02],
            [5.47e-01, 3.17e-01, 1.77e-01, 9.91e-02, 5.60e-02, 3.24e-02],
            [5.39e-01, 3.16e-01, 1.76e-01, 9.13e-02, 4.86e-02, 2.61e-02],
            [5.34e-01, 3.15e-01, 1.75e-01, 9.07e-02, 4.57e-02, 2.36e-02],
            [5.31e-01, 3.14e-01, 1.75e-01, 9.02e-02, 4.55e-02, 2.28e-02],
            [5.30e-01, 3.14e-01, 1.74e-01, 8.98e-02, 4.53e-02, 2.27e-02],
        ]);
        assert_footer(&h1.eoc_x(), &[None, Some(0.76), Some(0.85), Some(0.96), Some(0.99), Some(1.00)]);
        assert_footer(&h1.eoc_xxt(), &[None, None, Some(1.63), Some(1.80), Some(1.95), Some(1.99)]);
    }

    #[test]
    fn missing_cells_are_undefined() {
        let mut t = square_table(3, |r, c| 1.0 / ((r + 1) * (c + 1)) as f64);
        t.set(1, 1, None);
        assert_eq!(t.eoc_xt()[1], None);
        assert_eq!(t.eoc_xt()[2], None);
        assert!(t.eoc_x()[2].is_some());
    }

    proptest! {
        #[test]
        fn rates_are_scale_invariant(values in prop::collection::vec(1e-6f64..1.0, 16), factor in 1e-3f64..1e3) {
            let t = square_table(4, |r, c| values[4 * r + c]);
            let s = t.scaled(factor);
            let close = |a: Vec<Option<f64>>, b: Vec<Option<f64>>| {
                a.iter().zip(&b).all(|(x, y)| match (x, y) {
                    (Some(x), Some(y)) => (x - y).abs() < 1e-10,
                    (None, None) => true,
                    _ => false,
                })
            };
            prop_assert!(close(t.eoc_t(), s.eoc_t()));
            prop_assert!(close(t.eoc_x(), s.eoc_x()));
            prop_assert!(close(t.eoc_xt(), s.eoc_xt()));
            prop_assert!(close(t.eoc_xxt(), s.eoc_xxt()));
        }
    }

    struct Entry(usize, f64);

    impl BalanceRecord for Entry {
        fn step(&self) -> usize {
            self.0
        }
        fn drift(&self) -> f64 {
            self.1
        }
        fn balance_defect(&self) -> f64 {
            0.0
        }
        fn mass(&self) -> f64 {
            0.0
        }
    }

    #[test]
    fn conservation_detector() {
        let clean: Vec<Entry> = (0..5).map(|k| Entry(k, 0.0)).collect();
        assert!(conservation_report(&clean, 1e-10).passed());
        let mut dirty = clean;
        dirty[3].1 = 1e-6;
        let report = conservation_report(&dirty, 1e-10);
        assert!(!report.passed());
        assert_eq!(report.failing_steps, [3]);
        assert_eq!(report.max_abs_drift, 1e-6);
    }
}
