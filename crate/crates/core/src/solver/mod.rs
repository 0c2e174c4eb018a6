//! Linear solves of one time step.

mod band;
mod gmres;
mod rcm;

use alloc::vec::Vec;

pub use band::BandLu;
pub use gmres::{gmres, Ilu0};
pub use rcm::{bandwidths, reverse_cuthill_mckee};

use crate::assembly::{SparseOperator, TripletBuilder};
use crate::error::{SolveError, SolveErrorKind};
use crate::math::norm2;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearSystem {
    pub matrix: SparseOperator,
    pub rhs: Vec<f64>,
}

impl LinearSystem {
    pub fn dofs(&self) -> usize {
        self.rhs.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SolverKind {
    /// Reverse Cuthill-McKee ordering, banded LU, iterative refinement.
    DirectBandLu,
    /// ILU(0)-preconditioned restarted GMRES.
    Gmres { restart: usize, max_iterations: usize },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    pub kind: SolverKind,
    /// Bound on `‖b − K x‖ / ‖b‖`, checked after every solve.
    pub tolerance: f64,
    /// Maximum refinement sweeps of the direct solver.
    pub refinements: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            kind: SolverKind::DirectBandLu,
            tolerance: 1e-12,
            refinements: 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport {
    pub solution: Vec<f64>,
    pub relative_residual: f64,
    /// Direct: refinement sweeps; GMRES: Krylov iterations.
    pub iterations: usize,
    pub bandwidth: Option<(usize, usize)>,
    pub residual_history: Vec<f64>,
}

fn relative_residual(a: &SparseOperator, x: &[f64], b: &[f64], bnorm: f64) -> (Vec<f64>, f64) {
    let ax = a.matvec(x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
    let rel = if bnorm > 0.0 { norm2(&r) / bnorm } else { norm2(&r) };
    (r, rel)
}

fn permuted(a: &SparseOperator, perm: &[usize]) -> SparseOperator {
    let mut inverse = alloc::vec![0; perm.len()];
    for (new, &old) in perm.iter().enumerate() {
        inverse[old] = new;
    }
    let mut b = TripletBuilder::with_capacity(a.rows, a.cols, a.nnz());
    for r in 0..a.rows {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            b.add(inverse[r], inverse[c], v);
        }
    }
    b.build()
}

fn direct(a: &SparseOperator, b: &[f64], options: &SolveOptions) -> Result<SolveReport, SolveError> {
    let n = a.rows;
    let perm = reverse_cuthill_mckee(a);
    let (lower, upper) = bandwidths(a, &perm);
    let lu = BandLu::factor(&permuted(a, &perm), lower, upper)?;
    let solve = |rhs: &[f64]| {
        let mut y: Vec<f64> = perm.iter().map(|&old| rhs[old]).collect();
        lu.solve_in_place(&mut y);
        let mut x = alloc::vec![0.0; n];
        for (new, &old) in perm.iter().enumerate() {
            x[old] = y[new];
        }
        x
    };
    let bnorm = norm2(b);
    let mut x = solve(b);
    let (mut r, mut rel) = relative_residual(a, &x, b, bnorm);
    let mut history = alloc::vec![rel];
    let mut sweeps = 0;
    while sweeps < options.refinements && rel > 0.0 {
        let dx = solve(&r);
        let candidate: Vec<f64> = x.iter().zip(&dx).map(|(x, d)| x + d).collect();
        let (r_new, rel_new) = relative_residual(a, &candidate, b, bnorm);
        sweeps += 1;
        if !(rel_new < rel) {
            break;
        }
        history.push(rel_new);
        x = candidate;
        r = r_new;
        rel = rel_new;
        if rel <= 0.01 * options.tolerance {
            break;
        }
    }
    Ok(SolveReport {
        solution: x,
        relative_residual: rel,
        iterations: sweeps,
        bandwidth: Some((lower, upper)),
        residual_history: history,
    })
}

/// Solves `system` and verifies the residual from scratch; a residual above
/// `options.tolerance` is an error, never a silent result.
pub fn solve(system: &LinearSystem, options: &SolveOptions) -> Result<SolveReport, SolveError> {
    let a = &system.matrix;
    let fail = |kind| SolveError {
        kind,
        residuals: Vec::new(),
    };
    if a.rows != a.cols {
        return Err(fail(SolveErrorKind::NotSquare {
            rows: a.rows,
            cols: a.cols,
        }));
    }
    if system.rhs.len() != a.rows {
        return Err(fail(SolveErrorKind::RhsLength {
            expected: a.rows,
            found: system.rhs.len(),
        }));
    }
    let mut report = match options.kind {
        SolverKind::DirectBandLu => direct(a, &system.rhs, options)?,
        SolverKind::Gmres {
            restart,
            max_iterations,
        } => {
            let ilu = Ilu0::new(a)?;
            let mut history = Vec::new();
            let (x, iterations) = gmres(a, &system.rhs, &ilu, restart, max_iterations, options.tolerance, &mut history)?;
            SolveReport {
                solution: x,
                relative_residual: f64::NAN,
                iterations,
                bandwidth: None,
                residual_history: history,
            }
        }
    };
    if report.solution.iter().any(|v| !v.is_finite()) {
        return Err(SolveError {
            kind: SolveErrorKind::NonFinite,
            residuals: report.residual_history,
        });
    }
    let (_, rel) = relative_residual(a, &report.solution, &system.rhs, norm2(&system.rhs));
    report.relative_residual = rel;
    if !(rel <= options.tolerance) {
        return Err(SolveError {
            kind: SolveErrorKind::ResidualTooLarge {
                achieved: rel,
                tolerance: options.tolerance,
            },
            residuals: report.residual_history,
        });
    }
    Ok(report)
}
