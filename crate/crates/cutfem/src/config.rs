//! Flat `key = value` run configuration.
//!
//! One assignment per line, `#` starts a comment, blank lines are ignored.
//! Later assignments win, so CLI overrides are applied by parsing them after
//! the file. Recognised keys:
//!
//! | key | value |
//! |-----|-------|
//! | `case` | case name |
//! | `bdf` | 1 or 2 |
//! | `lt`, `lx` | refinement levels of a single run |
//! | `h`, `dt` | explicit mesh size / time step (override `lx`, `lt`) |
//! | `dt_steps` | number of steps, `dt = t_end / dt_steps` |
//! | `lt_levels`, `lx_levels` | sweep levels, `a..b` (inclusive) or `a,b,c` |
//! | `t_end`, `nu`, `radius`, `w_inf`, `h0`, `dt0` | case constants |
//! | `forcing` | `true`/`false`, manufactured source on or off |
//! | `c_delta`, `c_gamma` | strip width and ghost-penalty factors |
//! | `quad_mass`, `quad_operator`, `quad_load`, `quad_error` | quadrature degrees |
//! | `solver` | `direct` or `gmres` |
//! | `tolerance` | relative residual bound |
//! | `refinements` | refinement sweeps of the direct solver |
//! | `gmres_restart`, `gmres_max_iterations` | GMRES limits |
//! | `dilation` | `levelset` or `geometric` |
//! | `diagonal` | `fixed` or `alternating` |
//! | `output` | output directory |
//! | `snapshot_every` | VTK cadence in steps, 0 disables |
//! | `dump_step` | write the linear system of this step in Matrix Market format |
//! | `deterministic` | `true`/`false` |
//! | `threads` | worker threads of a sweep |
//! | `validate` | check the case definition before running |

use std::path::{Path, PathBuf};

use cutfem_core::cases::CaseSpec;
use cutfem_core::geometry::DilationMode;
use cutfem_core::mesh::DiagonalPattern;
use cutfem_core::solver::{SolveOptions, SolverKind};
use cutfem_core::stepping::{BdfOrder, SchemeConfig};

use crate::error::{AppError, AppResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolverChoice {
    Direct,
    Gmres,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct CaseOverrides {
    pub t_end: Option<f64>,
    pub nu: Option<f64>,
    pub radius: Option<f64>,
    pub w_inf: Option<f64>,
    pub h0: Option<f64>,
    pub dt0: Option<f64>,
    pub forcing: Option<bool>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct DegreeOverrides {
    pub mass: Option<usize>,
    pub operator: Option<usize>,
    pub load: Option<usize>,
    pub error: Option<usize>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub case: String,
    pub bdf: u32,
    pub lt: usize,
    pub lx: usize,
    pub h: Option<f64>,
    pub dt: Option<f64>,
    pub dt_steps: Option<usize>,
    pub lt_levels: Vec<usize>,
    pub lx_levels: Vec<usize>,
    pub case_overrides: CaseOverrides,
    pub c_delta: Option<f64>,
    pub c_gamma: Option<f64>,
    pub degrees: DegreeOverrides,
    pub solver: SolverChoice,
    pub tolerance: Option<f64>,
    pub refinements: Option<usize>,
    pub gmres_restart: usize,
    pub gmres_max_iterations: usize,
    pub dilation: DilationMode,
    pub diagonal: DiagonalPattern,
    pub output: PathBuf,
    pub snapshot_every: usize,
    pub dump_step: Option<usize>,
    pub deterministic: bool,
    pub threads: Option<usize>,
    pub validate: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            case: "travelling-circle".into(),
            bdf: 1,
            lt: 0,
            lx: 0,
            h: None,
            dt: None,
            dt_steps: None,
            lt_levels: vec![0, 1, 2, 3],
            lx_levels: vec![0, 1, 2, 3],
            case_overrides: CaseOverrides::default(),
            c_delta: None,
            c_gamma: None,
            degrees: DegreeOverrides::default(),
            solver: SolverChoice::Direct,
            tolerance: None,
            refinements: None,
            gmres_restart: 50,
            gmres_max_iterations: 2000,
            dilation: DilationMode::LevelSetProxy,
            diagonal: DiagonalPattern::Fixed,
            output: PathBuf::from("out"),
            snapshot_every: 0,
            dump_step: None,
            deterministic: true,
            threads: None,
            validate: true,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool, String> {
    match value {
        "true" | "1" | "yes" | "on" => Ok(true),
        "false" | "0" | "no" | "off" => Ok(false),
        _ => Err(format!("invalid boolean `{value}` for `{key}`")),
    }
}

/// `a..b` (inclusive), `a,b,c` or a single level.
pub fn parse_levels(value: &str) -> Result<Vec<usize>, String> {
    let levels: Vec<usize> = if let Some((a, b)) = value.split_once("..") {
        let a: usize = parse_value("levels", a.trim())?;
        let b: usize = parse_value("levels", b.trim())?;
        (a..=b).collect()
    } else {
        value
            .split(',')
            .map(|s| parse_value("levels", s.trim()))
            .collect::<Result<_, _>>()?
    };
    if levels.is_empty() {
        return Err(format!("empty level range `{value}`"));
    }
    Ok(levels)
}

impl RunConfig {
    /// Applies one assignment.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let o = &mut self.case_overrides;
        let d = &mut self.degrees;
        match key {
            "case" => self.case = value.to_string(),
            "bdf" => self.bdf = parse_value(key, value)?,
            "lt" => self.lt = parse_value(key, value)?,
            "lx" => self.lx = parse_value(key, value)?,
            "h" => self.h = Some(parse_value(key, value)?),
            "dt" => self.dt = Some(parse_value(key, value)?),
            "dt_steps" => self.dt_steps = Some(parse_value(key, value)?),
            "lt_levels" => self.lt_levels = parse_levels(value)?,
            "lx_levels" => self.lx_levels = parse_levels(value)?,
            "t_end" => o.t_end = Some(parse_value(key, value)?),
            "nu" => o.nu = Some(parse_value(key, value)?),
            "radius" => o.radius = Some(parse_value(key, value)?),
            "w_inf" => o.w_inf = Some(parse_value(key, value)?),
            "h0" => o.h0 = Some(parse_value(key, value)?),
            "dt0" => o.dt0 = Some(parse_value(key, value)?),
            "forcing" => o.forcing = Some(parse_bool(key, value)?),
            "c_delta" => self.c_delta = Some(parse_value(key, value)?),
            "c_gamma" => self.c_gamma = Some(parse_value(key, value)?),
            "quad_mass" => d.mass = Some(parse_value(key, value)?),
            "quad_operator" => d.operator = Some(parse_value(key, value)?),
            "quad_load" => d.load = Some(parse_value(key, value)?),
            "quad_error" => d.error = Some(parse_value(key, value)?),
            "solver" => {
                self.solver = match value {
                    "direct" => SolverChoice::Direct,
                    "gmres" => SolverChoice::Gmres,
                    _ => return Err(format!("invalid solver `{value}` (direct, gmres)")),
                }
            }
            "tolerance" => self.tolerance = Some(parse_value(key, value)?),
            "refinements" => self.refinements = Some(parse_value(key, value)?),
            "gmres_restart" => self.gmres_restart = parse_value(key, value)?,
            "gmres_max_iterations" => self.gmres_max_iterations = parse_value(key, value)?,
            "dilation" => {
                self.dilation = match value {
                    "levelset" => DilationMode::LevelSetProxy,
                    "geometric" => DilationMode::Geometric,
                    _ => return Err(format!("invalid dilation `{value}` (levelset, geometric)")),
                }
            }
            "diagonal" => {
                self.diagonal = match value {
                    "fixed" => DiagonalPattern::Fixed,
                    "alternating" => DiagonalPattern::Alternating,
                    _ => return Err(format!("invalid diagonal `{value}` (fixed, alternating)")),
                }
            }
            "output" => self.output = PathBuf::from(value),
            "snapshot_every" => self.snapshot_every = parse_value(key, value)?,
            "dump_step" => self.dump_step = Some(parse_value(key, value)?),
            "deterministic" => self.deterministic = parse_bool(key, value)?,
            "threads" => self.threads = Some(parse_value(key, value)?),
            "validate" => self.validate = parse_bool(key, value)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }

    /// Applies every assignment of a config text.
    pub fn apply_text(&mut self, text: &str) -> AppResult<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| AppError::Config {
                line: i + 1,
                message: format!("expected `key = value`, found `{line}`"),
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|message| AppError::Config { line: i + 1, message })?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> AppResult<Self> {
        let mut cfg = Self::default();
        cfg.apply_text(text)?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> AppResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
        Self::parse(&text)
    }

    /// Applies a `key=value` override given on the command line.
    pub fn apply_assignment(&mut self, assignment: &str) -> AppResult<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| AppError::Usage(format!("expected KEY=VALUE, found `{assignment}`")))?;
        self.set(key.trim(), value.trim()).map_err(AppError::Usage)
    }

    /// Renders the configuration in the format accepted by [`RunConfig::parse`].
    pub fn render(&self) -> String {
        let mut out = String::new();
        let mut put = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        let join = |l: &[usize]| l.iter().map(usize::to_string).collect::<Vec<_>>().join(",");
        put("case", self.case.clone());
        put("bdf", self.bdf.to_string());
        put("lt", self.lt.to_string());
        put("lx", self.lx.to_string());
        let o = &self.case_overrides;
        let d = &self.degrees;
        let opt_f = [
            ("h", self.h),
            ("dt", self.dt),
            ("t_end", o.t_end),
            ("nu", o.nu),
            ("radius", o.radius),
            ("w_inf", o.w_inf),
            ("h0", o.h0),
            ("dt0", o.dt0),
            ("c_delta", self.c_delta),
            ("c_gamma", self.c_gamma),
            ("tolerance", self.tolerance),
        ];
        for (k, v) in opt_f {
            if let Some(v) = v {
                put(k, format!("{v:e}"));
            }
        }
        let opt_u = [
            ("dt_steps", self.dt_steps),
            ("quad_mass", d.mass),
            ("quad_operator", d.operator),
            ("quad_load", d.load),
            ("quad_error", d.error),
            ("refinements", self.refinements),
            ("dump_step", self.dump_step),
            ("threads", self.threads),
        ];
        for (k, v) in opt_u {
            if let Some(v) = v {
                put(k, v.to_string());
            }
        }
        if let Some(f) = o.forcing {
            put("forcing", f.to_string());
        }
        put("lt_levels", join(&self.lt_levels));
        put("lx_levels", join(&self.lx_levels));
        put(
            "solver",
            match self.solver {
                SolverChoice::Direct => "direct",
                SolverChoice::Gmres => "gmres",
            }
            .into(),
        );
        put("gmres_restart", self.gmres_restart.to_string());
        put("gmres_max_iterations", self.gmres_max_iterations.to_string());
        put(
            "dilation",
            match self.dilation {
                DilationMode::LevelSetProxy => "levelset",
                DilationMode::Geometric => "geometric",
            }
            .into(),
        );
        put(
            "diagonal",
            match self.diagonal {
                DiagonalPattern::Fixed => "fixed",
                DiagonalPattern::Alternating => "alternating",
            }
            .into(),
        );
        put("output", self.output.display().to_string());
        put("snapshot_every", self.snapshot_every.to_string());
        put("deterministic", self.deterministic.to_string());
        put("validate", self.validate.to_string());
        out
    }

    /// Case with all overrides applied.
    pub fn case_spec(&self) -> AppResult<CaseSpec> {
        let mut case = CaseSpec::by_name(&self.case).ok_or_else(|| AppError::UnknownCase {
            name: self.case.clone(),
        })?;
        let o = &self.case_overrides;
        if let Some(v) = o.t_end {
            case.t_end = v;
        }
        if let Some(v) = o.nu {
            case.nu = v;
        }
        if let Some(v) = o.radius {
            case.radius = v;
        }
        if let Some(v) = o.w_inf {
            case.w_inf = v;
        }
        if let Some(v) = o.h0 {
            case.h0 = v;
        }
        if let Some(v) = o.dt0 {
            case.dt0 = v;
        }
        if let Some(v) = o.forcing {
            case.forcing = v;
        }
        Ok(case)
    }

    pub fn bdf_order(&self) -> AppResult<BdfOrder> {
        BdfOrder::from_int(self.bdf).map_err(|e| AppError::Usage(e.to_string()))
    }

    /// Mesh size and time step at the given levels, explicit values first.
    pub fn resolution(&self, case: &CaseSpec, lt: usize, lx: usize) -> AppResult<(f64, f64)> {
        let h = self.h.unwrap_or(case.h0 / level_factor(lx)?);
        let dt = match (self.dt_steps, self.dt) {
            (Some(0), _) => return Err(AppError::Usage("dt_steps must be positive".into())),
            (Some(n), _) => case.t_end / n as f64,
            (None, Some(dt)) => dt,
            (None, None) => case.dt0 / level_factor(lt)?,
        };
        Ok((h, dt))
    }

    pub fn scheme_config(&self, case: &CaseSpec, dt: f64) -> AppResult<SchemeConfig> {
        let mut cfg = SchemeConfig::for_case(case, self.bdf_order()?, dt);
        if let Some(v) = self.c_delta {
            cfg.c_delta = v;
        }
        if let Some(v) = self.c_gamma {
            cfg.c_gamma = v;
        }
        let d = &self.degrees;
        cfg.degrees.mass = d.mass.unwrap_or(cfg.degrees.mass);
        cfg.degrees.operator = d.operator.unwrap_or(cfg.degrees.operator);
        cfg.degrees.load = d.load.unwrap_or(cfg.degrees.load);
        cfg.degrees.error = d.error.unwrap_or(cfg.degrees.error);
        cfg.solver = SolveOptions {
            kind: match self.solver {
                SolverChoice::Direct => SolverKind::DirectBandLu,
                SolverChoice::Gmres => SolverKind::Gmres {
                    restart: self.gmres_restart,
                    max_iterations: self.gmres_max_iterations,
                },
            },
            tolerance: self.tolerance.unwrap_or(cfg.solver.tolerance),
            refinements: self.refinements.unwrap_or(cfg.solver.refinements),
        };
        cfg.deterministic = self.deterministic;
        cfg.dilation = self.dilation;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn level_factor(level: usize) -> AppResult<f64> {
    if level > 30 {
        return Err(AppError::Usage(format!("refinement level {level} is too deep")));
    }
    Ok(f64::from(1u32 << level))
}
