//! Eulerian BDF1/BDF2 time loop on a static background mesh.
//!
//! Every step re-interpolates the level set, rebuilds the active mesh with a
//! strip of width `delta_h = c_delta * w_inf * dt`, and assembles
//!
//! ```text
//! (c0/dt) M^n u^n + A^n u^n + nu S^n u^n = b^n + (1/dt) sum_k c_k M^{n-k→n} u^{n-k}
//! ```
//!
//! where `M^{n-k→n}` integrates over the old discrete domain with the old
//! dofs as trial and the new dofs as test functions. Solutions are stored by
//! background vertex, so old data enter the new step without any transfer.

use alloc::collections::VecDeque;
use alloc::string::String;
use alloc::vec::Vec;

use crate::analysis::{self, BalanceRecord, SpaceTimeErrorAccumulator};
use crate::assembly::{
    assemble_convection_diffusion, assemble_cut_mass, assemble_ghost_penalty, assemble_load, DofMap,
    GhostPenaltyParams, SparseOperator,
};
use crate::cases::CaseSpec;
use crate::geometry::quadrature::CutQuadrature;
use crate::geometry::{
    build_active_mesh, build_cut_quadrature, check_containment, interpolate_levelset, strip_reachability,
    ActiveMeshData, DilationMode, LevelSetFrame,
};
use crate::math::round;
use crate::mesh::BackgroundMesh;
use crate::solver::{solve, LinearSystem, SolveOptions, SolveReport};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BdfOrder {
    One,
    Two,
}

impl BdfOrder {
    pub fn from_int(order: u32) -> Result<Self> {
        match order {
            1 => Ok(BdfOrder::One),
            2 => Ok(BdfOrder::Two),
            other => Err(Error::InvalidParameter(alloc::format!("bdf order {other} (expected 1 or 2)"))),
        }
    }

    pub fn as_int(self) -> u32 {
        match self {
            BdfOrder::One => 1,
            BdfOrder::Two => 2,
        }
    }

    /// Strip-width factor used unless overridden.
    pub fn default_c_delta(self) -> f64 {
        match self {
            BdfOrder::One => 1.0,
            BdfOrder::Two => 2.0,
        }
    }
}

/// Exactness degrees of the quadratures used by each term.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureDegrees {
    pub mass: usize,
    pub operator: usize,
    pub load: usize,
    pub error: usize,
}

impl Default for QuadratureDegrees {
    fn default() -> Self {
        Self {
            mass: 2,
            operator: 4,
            load: 4,
            error: 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SchemeConfig {
    pub bdf_order: BdfOrder,
    pub dt: f64,
    pub t_end: f64,
    pub nu: f64,
    pub c_delta: f64,
    pub c_gamma: f64,
    pub w_inf: f64,
    pub degrees: QuadratureDegrees,
    pub solver: SolveOptions,
    /// Sequential fixed-order assembly; the core crate never reorders, the
    /// flag is carried for drivers that parallelise around it.
    pub deterministic: bool,
    pub dilation: DilationMode,
}

impl SchemeConfig {
    /// Case defaults with the given order and step size.
    pub fn for_case(case: &CaseSpec, bdf_order: BdfOrder, dt: f64) -> Self {
        Self {
            bdf_order,
            dt,
            t_end: case.t_end,
            nu: case.nu,
            c_delta: bdf_order.default_c_delta(),
            c_gamma: 1.0,
            w_inf: case.w_inf,
            degrees: QuadratureDegrees::default(),
            solver: SolveOptions::default(),
            deterministic: true,
            dilation: DilationMode::LevelSetProxy,
        }
    }

    /// `N = t_end / dt`, rejected unless integral.
    pub fn steps(&self) -> Result<usize> {
        let ratio = self.t_end / self.dt;
        let n = round(ratio);
        if !(ratio.is_finite() && n >= 0.0 && (ratio - n).abs() <= 1e-9 * n.max(1.0)) {
            return Err(Error::NonIntegralSteps { ratio });
        }
        Ok(n as usize)
    }

    pub fn delta_h(&self) -> f64 {
        self.c_delta * self.w_inf * self.dt
    }

    /// `dt ≥ nu / w_inf²`: outside the regime covered by the stability bound.
    pub fn violates_time_step_restriction(&self) -> bool {
        self.w_inf > 0.0 && self.dt >= self.nu / (self.w_inf * self.w_inf)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str, v: f64| Err(Error::InvalidParameter(alloc::format!("{what} = {v}")));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt", self.dt);
        }
        if !(self.t_end >= 0.0) {
            return bad("t_end", self.t_end);
        }
        if !(self.nu > 0.0 && self.nu.is_finite()) {
            return bad("nu", self.nu);
        }
        if !(self.c_delta >= 1.0) {
            return bad("c_delta", self.c_delta);
        }
        if !(self.c_gamma > 0.0 && self.c_gamma.is_finite()) {
            return bad("c_gamma", self.c_gamma);
        }
        if !(self.w_inf >= 0.0 && self.w_inf.is_finite()) {
            return bad("w_inf", self.w_inf);
        }
        if !(self.solver.tolerance > 0.0) {
            return bad("solver tolerance", self.solver.tolerance);
        }
        for d in [self.degrees.mass, self.degrees.operator, self.degrees.load, self.degrees.error] {
            crate::geometry::triangle_rule(d)?;
        }
        self.steps().map(|_| ())
    }
}

/// Geometry and solution of one time level.
#[derive(Clone, Debug)]
pub struct TimeLevel {
    pub step: usize,
    pub time: f64,
    pub frame: LevelSetFrame,
    pub active: ActiveMeshData,
    pub dofs: DofMap,
    /// Background-vertex indexed, zero outside `dofs`.
    pub solution: Vec<f64>,
    /// Quadrature over `Omega_h` at this level, reused by later old-domain
    /// mass terms.
    pub mass_quadrature: CutQuadrature,
}

impl TimeLevel {
    pub fn local_solution(&self) -> Vec<f64> {
        self.dofs.gather(&self.solution)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LedgerEntry {
    pub step: usize,
    pub time: f64,
    /// `∫_{Omega_h^n} u_h^n`
    pub mass: f64,
    /// `dt * 1ᵀ b^n`
    pub source: f64,
    /// Sum of `source` over steps 1..=n.
    pub source_sum: f64,
    /// Mass change implied by the sources through the BDF recursion.
    pub ideal_change: f64,
    /// `m_n − m_0 − ideal_change`
    pub drift: f64,
    /// BDF-weighted mass change minus `source` for this step.
    pub balance_defect: f64,
}

impl BalanceRecord for LedgerEntry {
    fn step(&self) -> usize {
        self.step
    }
    fn drift(&self) -> f64 {
        self.drift
    }
    fn balance_defect(&self) -> f64 {
        self.balance_defect
    }
    fn mass(&self) -> f64 {
        self.mass
    }
}

/// Per-step record of the total mass against the accumulated sources.
///
/// Testing the discrete equation with `v = 1` annihilates convection,
/// diffusion and the ghost penalty, leaving `m_n − m_{n−1} = dt 1ᵀb^n` for
/// BDF1 and `(3/2) m_n − 2 m_{n−1} + (1/2) m_{n−2} = dt 1ᵀb^n` for BDF2.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MassLedger {
    pub entries: Vec<LedgerEntry>,
    last_increment: f64,
}

impl MassLedger {
    fn seed(mass: f64, time: f64) -> Self {
        Self {
            entries: alloc::vec![LedgerEntry {
                step: 0,
                time,
                mass,
                source: 0.0,
                source_sum: 0.0,
                ideal_change: 0.0,
                drift: 0.0,
                balance_defect: 0.0,
            }],
            last_increment: 0.0,
        }
    }

    pub fn initial_mass(&self) -> f64 {
        self.entries[0].mass
    }

    pub fn last(&self) -> &LedgerEntry {
        self.entries.last().expect("ledger is seeded")
    }

    fn record(&mut self, step: usize, time: f64, mass: f64, source: f64, bdf2: bool) {
        let n = self.entries.len();
        let prev = self.entries[n - 1];
        let (increment, balance_defect) = if bdf2 {
            let before = self.entries[n - 2].mass;
            (
                self.last_increment / 3.0 + 2.0 * source / 3.0,
                1.5 * mass - 2.0 * prev.mass + 0.5 * before - source,
            )
        } else {
            (source, mass - prev.mass - source)
        };
        self.last_increment = increment;
        let ideal_change = prev.ideal_change + increment;
        self.entries.push(LedgerEntry {
            step,
            time,
            mass,
            source,
            source_sum: prev.source_sum + source,
            ideal_change,
            drift: mass - self.initial_mass() - ideal_change,
            balance_defect,
        });
    }

    pub fn max_abs_drift(&self) -> f64 {
        self.entries.iter().fold(0.0, |m, e| m.max(e.drift.abs()))
    }
}

#[derive(Clone, Debug)]
pub struct SchemeState {
    pub step: usize,
    /// Newest last; at most three levels are kept.
    pub levels: VecDeque<TimeLevel>,
    pub ledger: MassLedger,
}

impl SchemeState {
    pub fn current(&self) -> &TimeLevel {
        self.levels.back().expect("state holds a level")
    }
}

/// Operators of one step, kept for inspection and dumps.
#[derive(Clone, Debug)]
pub struct StepOperators {
    pub mass: SparseOperator,
    /// `(coefficient, old-domain mass)` pairs of the right-hand side.
    pub old_mass: Vec<(f64, SparseOperator)>,
    pub convection_diffusion: SparseOperator,
    pub ghost_penalty: SparseOperator,
    pub load: Vec<f64>,
    pub system: LinearSystem,
}

/// Diagnostics of one step.
#[derive(Clone, Debug, PartialEq)]
pub struct StepRecord {
    pub step: usize,
    pub time: f64,
    pub dofs: usize,
    pub active_elements: usize,
    pub strip_elements: usize,
    pub stabilized_facets: usize,
    pub measure: f64,
    pub mass: f64,
    pub drift: f64,
    pub balance_defect: f64,
    /// `‖u_h^n‖_{L2(Omega_h^n)}`
    pub l2_norm: f64,
    pub l2_error_sq: Option<f64>,
    pub h1_error_sq: Option<f64>,
    pub relative_residual: f64,
    pub solver_iterations: usize,
    /// Longest facet path from a strip element to an uncut interior element.
    pub max_extension_path: usize,
    pub unreachable_strip_elements: usize,
    pub touches_boundary: bool,
}

/// Read-only view handed to observers after every step (step 0 included).
pub struct StepView<'a> {
    pub case: &'a CaseSpec,
    pub mesh: &'a BackgroundMesh,
    pub config: &'a SchemeConfig,
    pub level: &'a TimeLevel,
    pub record: &'a StepRecord,
    pub ledger: &'a LedgerEntry,
    /// `None` at step 0.
    pub operators: Option<&'a StepOperators>,
}

pub trait Observer {
    fn observe(&mut self, view: &StepView<'_>) -> core::result::Result<(), String>;
}

#[derive(Clone, Debug)]
pub struct RunReport {
    pub case: String,
    pub config: SchemeConfig,
    pub steps: usize,
    pub records: Vec<StepRecord>,
    pub ledger: MassLedger,
    /// Present when the case has an exact solution.
    pub errors: Option<SpaceTimeErrorAccumulator>,
    pub final_state: SchemeState,
    pub warnings: Vec<String>,
}

impl RunReport {
    pub fn conservation(&self, tolerance: f64) -> analysis::ConservationReport {
        analysis::conservation_report(&self.ledger.entries, tolerance)
    }

    /// `max_n ‖u^n‖ / ‖u^0‖`
    pub fn norm_growth(&self) -> f64 {
        let initial = self.records[0].l2_norm;
        let max = self.records.iter().fold(0.0f64, |m, r| m.max(r.l2_norm));
        if initial > 0.0 {
            max / initial
        } else {
            max
        }
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.records.iter().skip(1).fold(0.0, |m, r| m.max(r.relative_residual))
    }
}

struct Geometry {
    frame: LevelSetFrame,
    active: ActiveMeshData,
    dofs: DofMap,
}

pub struct Scheme<'a> {
    pub case: &'a CaseSpec,
    pub config: SchemeConfig,
    pub mesh: &'a BackgroundMesh,
    steps: usize,
    warnings: Vec<String>,
}

impl<'a> Scheme<'a> {
    pub fn new(case: &'a CaseSpec, config: SchemeConfig, mesh: &'a BackgroundMesh) -> Result<Self> {
        config.validate()?;
        let steps = config.steps()?;
        let mut warnings = Vec::new();
        if config.violates_time_step_restriction() {
            let msg = alloc::format!(
                "dt = {} is not below nu / w_inf^2 = {}: outside the stability regime",
                config.dt,
                config.nu / (config.w_inf * config.w_inf)
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        Ok(Self {
            case,
            config,
            mesh,
            steps,
            warnings,
        })
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    fn time(&self, step: usize) -> f64 {
        step as f64 * self.config.dt
    }

    fn geometry(&self, step: usize) -> Result<Geometry> {
        let t = self.time(step);
        let case = self.case;
        let frame = interpolate_levelset(self.mesh, t, |x, s| case.phi(x, s))?;
        let active = build_active_mesh(&frame, self.mesh, self.config.delta_h(), step, self.config.dilation)?;
        let dofs = DofMap::new(&active.active_dofs, self.mesh.num_vertices())?;
        Ok(Geometry { frame, active, dofs })
    }

    fn record(&self, level: &TimeLevel, ledger: &LedgerEntry, solve: Option<&SolveReport>) -> Result<StepRecord> {
        let mesh = self.mesh;
        let l2_norm_sq = analysis::l2_norm_sq(mesh, &level.mass_quadrature, &level.solution);
        let (l2_error_sq, h1_error_sq) = if self.case.has_exact_solution() {
            let q = build_cut_quadrature(&level.frame, mesh, self.config.degrees.error)?;
            let t = level.time;
            let case = self.case;
            let (l2, h1) = analysis::step_errors(
                mesh,
                &q,
                &level.solution,
                |x| case.exact(x, t).unwrap_or(0.0),
                |x| case.exact_gradient(x, t).unwrap_or([0.0, 0.0]),
            );
            (Some(l2), Some(h1))
        } else {
            (None, None)
        };
        let reach = strip_reachability(&level.frame, mesh, &level.active);
        Ok(StepRecord {
            step: level.step,
            time: level.time,
            dofs: level.dofs.len(),
            active_elements: level.active.active_elements.len(),
            strip_elements: level.active.strip_elements.len(),
            stabilized_facets: level.active.stabilized_facets.len(),
            measure: level.mass_quadrature.measure(),
            mass: ledger.mass,
            drift: ledger.drift,
            balance_defect: ledger.balance_defect,
            l2_norm: crate::math::sqrt(l2_norm_sq),
            l2_error_sq,
            h1_error_sq,
            relative_residual: solve.map_or(0.0, |s| s.relative_residual),
            solver_iterations: solve.map_or(0, |s| s.iterations),
            max_extension_path: reach.max_path,
            unreachable_strip_elements: reach.unreachable.len(),
            touches_boundary: level.active.active_elements.iter().any(|&e| mesh.touches_boundary(e)),
        })
    }

    /// Nodal interpolation of the initial datum on the active mesh at `t = 0`.
    pub fn initialize(&self) -> Result<SchemeState> {
        let g = self.geometry(0)?;
        let mut solution = alloc::vec![0.0; self.mesh.num_vertices()];
        for &v in g.dofs.globals() {
            solution[v] = self.case.initial(self.mesh.vertices[v]);
        }
        let mass_quadrature = build_cut_quadrature(&g.frame, self.mesh, self.config.degrees.mass)?;
        let mass = analysis::integral(self.mesh, &mass_quadrature, &solution);
        let level = TimeLevel {
            step: 0,
            time: 0.0,
            frame: g.frame,
            active: g.active,
            dofs: g.dofs,
            solution,
            mass_quadrature,
        };
        Ok(SchemeState {
            step: 0,
            levels: VecDeque::from([level]),
            ledger: MassLedger::seed(mass, 0.0),
        })
    }

    /// Implicit Euler step.
    pub fn bdf1_step(&self, state: &mut SchemeState) -> Result<(StepOperators, SolveReport)> {
        self.advance(state, BdfOrder::One)
    }

    /// BDF2 step; the first step of a run falls back to BDF1.
    pub fn bdf2_step(&self, state: &mut SchemeState) -> Result<(StepOperators, SolveReport)> {
        if state.levels.len() < 2 {
            self.advance(state, BdfOrder::One)
        } else {
            self.advance(state, BdfOrder::Two)
        }
    }

    pub fn step(&self, state: &mut SchemeState) -> Result<(StepOperators, SolveReport)> {
        match self.config.bdf_order {
            BdfOrder::One => self.bdf1_step(state),
            BdfOrder::Two => self.bdf2_step(state),
        }
    }

    fn advance(&self, state: &mut SchemeState, order: BdfOrder) -> Result<(StepOperators, SolveReport)> {
        let n = state.step + 1;
        let t = self.time(n);
        let mesh = self.mesh;
        let case = self.case;
        let cfg = &self.config;
        let dt = cfg.dt;
        let g = self.geometry(n)?;

        // (coefficient on the rhs, level) pairs
        let (c0, history): (f64, Vec<(f64, &TimeLevel)>) = {
            let levels = &state.levels;
            let last = levels.len() - 1;
            match order {
                BdfOrder::One => (1.0, alloc::vec![(1.0, &levels[last])]),
                BdfOrder::Two => (1.5, alloc::vec![(2.0, &levels[last]), (-0.5, &levels[last - 1])]),
            }
        };
        for (_, old) in &history {
            check_containment(&old.frame, old.step, &g.active)?;
        }

        let mass_quadrature = build_cut_quadrature(&g.frame, mesh, cfg.degrees.mass)?;
        let operator_quadrature = build_cut_quadrature(&g.frame, mesh, cfg.degrees.operator)?;
        let load_quadrature = if cfg.degrees.load == cfg.degrees.operator {
            None
        } else {
            Some(build_cut_quadrature(&g.frame, mesh, cfg.degrees.load)?)
        };

        let mass = assemble_cut_mass(mesh, &mass_quadrature, &g.dofs, &g.dofs, n)?;
        let convection_diffusion =
            assemble_convection_diffusion(mesh, &operator_quadrature, |x| case.velocity(x, t), cfg.nu, &g.dofs, n)?;
        let params = GhostPenaltyParams::new(cfg.c_gamma, mesh.h_max, g.active.delta_h)?;
        let ghost_penalty = assemble_ghost_penalty(mesh, &g.active, &params, &g.dofs)?;
        let load = assemble_load(
            mesh,
            load_quadrature.as_ref().unwrap_or(&operator_quadrature),
            |x| case.forcing(x, t),
            &g.dofs,
            n,
        )?;

        let mut rhs = load.clone();
        let mut old_mass = Vec::with_capacity(history.len());
        for &(coeff, old) in &history {
            let m_old = assemble_cut_mass(mesh, &old.mass_quadrature, &old.dofs, &g.dofs, n)?;
            let contribution = m_old.matvec(&old.local_solution());
            for (r, c) in rhs.iter_mut().zip(&contribution) {
                *r += coeff / dt * c;
            }
            old_mass.push((coeff, m_old));
        }
        let matrix = SparseOperator::linear_combination(&[
            (c0 / dt, &mass),
            (1.0, &convection_diffusion),
            (cfg.nu, &ghost_penalty),
        ]);
        let system = LinearSystem { matrix, rhs };
        let report = solve(&system, &cfg.solver).map_err(|source| Error::Solve { step: n, source })?;

        let solution = g.dofs.scatter(&report.solution);
        let m = analysis::integral(mesh, &mass_quadrature, &solution);
        let source = dt * load.iter().sum::<f64>();
        state.ledger.record(n, t, m, source, order == BdfOrder::Two);

        state.levels.push_back(TimeLevel {
            step: n,
            time: t,
            frame: g.frame,
            active: g.active,
            dofs: g.dofs,
            solution,
            mass_quadrature,
        });
        while state.levels.len() > 2 {
            state.levels.pop_front();
        }
        state.step = n;
        Ok((
            StepOperators {
                mass,
                old_mass,
                convection_diffusion,
                ghost_penalty,
                load,
                system,
            },
            report,
        ))
    }

    /// Runs all steps, notifying `observers` after each (including step 0).
    pub fn run(&self, observers: &mut [&mut dyn Observer]) -> Result<RunReport> {
        let mut state = self.initialize()?;
        let mut warnings = self.warnings.clone();
        let mut errors = self.case.has_exact_solution().then(SpaceTimeErrorAccumulator::default);
        let mut records = Vec::with_capacity(self.steps + 1);

        let first = self.record(state.current(), state.ledger.last(), None)?;
        self.notify(observers, &state, &first, None)?;
        records.push(first);

        for _ in 0..self.steps {
            let (operators, report) = self.step(&mut state)?;
            let rec = self.record(state.current(), state.ledger.last(), Some(&report))?;
            if let (Some(acc), Some(l2), Some(h1)) = (errors.as_mut(), rec.l2_error_sq, rec.h1_error_sq) {
                acc.add(self.config.dt, l2, h1);
            }
            self.notify(observers, &state, &rec, Some(&operators))?;
            records.push(rec);
        }

        if let Some(r) = records.iter().find(|r| r.touches_boundary) {
            let msg = alloc::format!(
                "step {}: an active element touches the background boundary (natural condition applies there)",
                r.step
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }
        if let Some(r) = records.iter().find(|r| r.unreachable_strip_elements > 0) {
            let msg = alloc::format!(
                "step {}: {} strip elements are not connected to an uncut interior element",
                r.step,
                r.unreachable_strip_elements
            );
            log::warn!("{msg}");
            warnings.push(msg);
        }

        Ok(RunReport {
            case: self.case.name.clone(),
            config: self.config.clone(),
            steps: self.steps,
            records,
            ledger: state.ledger.clone(),
            errors,
            final_state: state,
            warnings,
        })
    }

    fn notify(
        &self,
        observers: &mut [&mut dyn Observer],
        state: &SchemeState,
        record: &StepRecord,
        operators: Option<&StepOperators>,
    ) -> Result<()> {
        if observers.is_empty() {
            return Ok(());
        }
        let view = StepView {
            case: self.case,
            mesh: self.mesh,
            config: &self.config,
            level: state.current(),
            record,
            ledger: state.ledger.last(),
            operators,
        };
        for obs in observers.iter_mut() {
            obs.observe(&view).map_err(|message| Error::Observer {
                step: record.step,
                message,
            })?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::build_structured_mesh;

    fn run(case: &CaseSpec, order: BdfOrder, h: f64, dt: f64) -> RunReport {
        let mesh = build_structured_mesh(case.bbox, h).unwrap();
        let config = SchemeConfig::for_case(case, order, dt);
        Scheme::new(case, config, &mesh).unwrap().run(&mut []).unwrap()
    }

    #[test]
    fn step_count_must_be_integral() {
        let case = CaseSpec::travelling_circle();
        assert_eq!(SchemeConfig::for_case(&case, BdfOrder::One, 0.05).steps().unwrap(), 4);
        assert!(matches!(
            SchemeConfig::for_case(&case, BdfOrder::One, 0.03).steps(),
            Err(Error::NonIntegralSteps { .. })
        ));
        let mut cfg = SchemeConfig::for_case(&case, BdfOrder::One, 0.05);
        cfg.t_end = 0.0;
        assert_eq!(cfg.steps().unwrap(), 0);
    }

    #[test]
    fn config_validation() {
        let case = CaseSpec::travelling_circle();
        let base = SchemeConfig::for_case(&case, BdfOrder::Two, 0.05);
        assert!(base.validate().is_ok());
        assert_eq!(base.c_delta, 2.0);
        assert!((base.delta_h() - 0.2).abs() < 1e-15);
        for broken in [
            SchemeConfig { nu: 0.0, ..base.clone() },
            SchemeConfig { c_delta: 0.5, ..base.clone() },
            SchemeConfig { c_gamma: -1.0, ..base.clone() },
            SchemeConfig { dt: 0.0, ..base.clone() },
        ] {
            assert!(broken.validate().is_err());
        }
        let mut degrees = base.clone();
        degrees.degrees.error = 5;
        assert!(matches!(degrees.validate(), Err(Error::UnsupportedDegree(5))));
    }

    #[test]
    fn time_step_restriction_flag() {
        let kite = CaseSpec::kite();
        assert!(SchemeConfig::for_case(&kite, BdfOrder::One, 0.5).violates_time_step_restriction());
        assert!(!SchemeConfig::for_case(&kite, BdfOrder::One, 0.125).violates_time_step_restriction());
        let disk = CaseSpec::static_disk(1.0);
        assert!(!SchemeConfig::for_case(&disk, BdfOrder::One, 10.0).violates_time_step_restriction());
    }

    #[test]
    fn zero_steps_reports_initial_state() {
        let mut case = CaseSpec::travelling_circle();
        case.t_end = 0.0;
        let report = run(&case, BdfOrder::One, 0.4, 0.1);
        assert_eq!(report.steps, 0);
        assert_eq!(report.records.len(), 1);
        assert_eq!(report.ledger.entries.len(), 1);
    }

    #[test]
    fn constants_are_preserved_on_a_fixed_domain() {
        let case = CaseSpec::static_disk(2.5);
        for order in [BdfOrder::One, BdfOrder::Two] {
            let report = run(&case, order, 0.1, 0.05);
            let level = report.final_state.current();
            for &v in level.dofs.globals() {
                assert!((level.solution[v] - 2.5).abs() < 1e-12, "{}", level.solution[v]);
            }
            let m0 = report.ledger.initial_mass();
            assert!((m0 - 2.5 * report.records[0].measure).abs() < 1e-13);
            assert!(report.ledger.max_abs_drift() < 1e-12);
            let errors = report.errors.unwrap();
            assert!(errors.l2_l2() < 1e-11 && errors.l2_h1() < 1e-10);
        }
    }

    #[test]
    fn travelling_circle_coarsest_run() {
        let case = CaseSpec::travelling_circle();
        let report = run(&case, BdfOrder::One, case.h0, case.dt0);
        assert_eq!(report.steps, 2);
        let e = report.errors.unwrap().l2_l2();
        assert!(e.is_finite() && e > 1e-2 && e < 1.0, "{e}");
        assert!(report.conservation(1e-10).passed());
        assert!(report.max_relative_residual() <= 1e-12);
    }

    #[test]
    fn balance_holds_every_step() {
        let case = CaseSpec::travelling_circle();
        for order in [BdfOrder::One, BdfOrder::Two] {
            let report = run(&case, order, 0.2, 0.025);
            for e in &report.ledger.entries {
                assert!(e.balance_defect.abs() <= 1e-12 * e.mass.abs().max(1.0), "{e:?}");
                assert!(e.drift.abs() <= 1e-12, "{e:?}");
            }
            // the sources are not negligible
            assert!(report.ledger.last().source_sum.abs() > 1e-2);
        }
    }

    #[test]
    fn bdf2_first_step_is_bdf1_with_wide_strip() {
        let case = CaseSpec::travelling_circle();
        let mesh = build_structured_mesh(case.bbox, 0.2).unwrap();
        let bdf2 = SchemeConfig::for_case(&case, BdfOrder::Two, 0.05);
        let bdf1 = SchemeConfig {
            bdf_order: BdfOrder::One,
            c_delta: 2.0,
            ..bdf2.clone()
        };
        let s2 = Scheme::new(&case, bdf2, &mesh).unwrap();
        let s1 = Scheme::new(&case, bdf1, &mesh).unwrap();
        let (mut a, mut b) = (s2.initialize().unwrap(), s1.initialize().unwrap());
        s2.step(&mut a).unwrap();
        s1.step(&mut b).unwrap();
        let (x, y) = (&a.current().solution, &b.current().solution);
        assert!(x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits()));
    }

    struct Counter(usize);

    impl Observer for Counter {
        fn observe(&mut self, view: &StepView<'_>) -> core::result::Result<(), String> {
            assert_eq!(view.record.step, self.0);
            assert_eq!(view.operators.is_some(), self.0 > 0);
            self.0 += 1;
            Ok(())
        }
    }

    struct Failing;

    impl Observer for Failing {
        fn observe(&mut self, view: &StepView<'_>) -> core::result::Result<(), String> {
            if view.record.step == 2 {
                Err("disk full".into())
            } else {
                Ok(())
            }
        }
    }

    #[test]
    fn observers_are_read_only() {
        let case = CaseSpec::travelling_circle();
        let mesh = build_structured_mesh(case.bbox, 0.2).unwrap();
        let config = SchemeConfig::for_case(&case, BdfOrder::Two, 0.05);
        let scheme = Scheme::new(&case, config, &mesh).unwrap();
        let plain = scheme.run(&mut []).unwrap();
        let mut counter = Counter(0);
        let observed = scheme.run(&mut [&mut counter]).unwrap();
        assert_eq!(counter.0, 5);
        assert_eq!(plain.records, observed.records);
        let (x, y) = (&plain.final_state.current().solution, &observed.final_state.current().solution);
        assert!(x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits()));
        let err = scheme.run(&mut [&mut Failing]).unwrap_err();
        assert!(matches!(err, Error::Observer { step: 2, .. }));
    }

    #[test]
    fn too_narrow_strip_is_fatal() {
        // strip narrower than the motion per step
        let case = CaseSpec::travelling_circle();
        let mesh = build_structured_mesh(case.bbox, 0.05).unwrap();
        let mut config = SchemeConfig::for_case(&case, BdfOrder::One, 0.05);
        config.w_inf = 0.0;
        let err = Scheme::new(&case, config, &mesh).unwrap().run(&mut []).unwrap_err();
        assert!(matches!(err, Error::ContainmentViolation { step: 1, old_step: 0, .. }), "{err:?}");
    }
}
