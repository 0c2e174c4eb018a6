use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cutfem::commands::{cmd_convergence, cmd_export_mesh, cmd_run};
use cutfem::config::{parse_levels, RunConfig};
use cutfem::core::cases::{CaseSpec, CASE_NAMES};
use cutfem::{AppError, AppResult};

#[derive(Parser)]
#[command(name = "cutfem", version, about = "Conservative unfitted FEM for transport-diffusion on moving domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write its report.
    Run(Common),
    /// Run a grid of refinement levels and write convergence tables.
    Convergence {
        #[command(flatten)]
        common: Common,
        /// Time and space levels, `a..b` or `a,b,c` (sets both ranges).
        #[arg(long)]
        levels: Option<String>,
        #[arg(long)]
        lt_levels: Option<String>,
        #[arg(long)]
        lx_levels: Option<String>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Write the background mesh with initial element markers as VTK.
    ExportMesh {
        #[command(flatten)]
        common: Common,
        /// Target file (default: <output>/mesh.vtk).
        #[arg(long)]
        file: Option<PathBuf>,
    },
    /// List the available cases.
    Cases,
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` config file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    case: Option<String>,
    /// BDF order, 1 or 2.
    #[arg(long)]
    bdf: Option<u32>,
    /// Time refinement level: dt = dt0 / 2^lt.
    #[arg(long)]
    lt: Option<usize>,
    /// Space refinement level: h = h0 / 2^lx.
    #[arg(long)]
    lx: Option<usize>,
    /// Explicit mesh size.
    #[arg(long)]
    h: Option<f64>,
    /// Explicit time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Number of time steps over the case's final time.
    #[arg(long)]
    dt_steps: Option<usize>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// VTK snapshot cadence in steps, 0 disables.
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Further `key=value` overrides, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl Common {
    fn resolve(&self) -> AppResult<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let mut flags: Vec<(&str, String)> = Vec::new();
        if let Some(v) = &self.case {
            flags.push(("case", v.clone()));
        }
        let numbers = [
            ("bdf", self.bdf.map(|v| v.to_string())),
            ("lt", self.lt.map(|v| v.to_string())),
            ("lx", self.lx.map(|v| v.to_string())),
            ("h", self.h.map(|v| v.to_string())),
            ("dt", self.dt.map(|v| v.to_string())),
            ("dt_steps", self.dt_steps.map(|v| v.to_string())),
            ("snapshot_every", self.snapshot_every.map(|v| v.to_string())),
            ("output", self.output.as_ref().map(|v| v.display().to_string())),
        ];
        flags.extend(numbers.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))));
        for (key, value) in flags {
            cfg.set(key, &value).map_err(AppError::Usage)?;
        }
        for assignment in &self.set {
            cfg.apply_assignment(assignment)?;
        }
        Ok(cfg)
    }
}

fn print_files(files: &[PathBuf]) {
    for f in files {
        println!("wrote {}", f.display());
    }
}

fn dispatch(cli: Cli) -> AppResult<()> {
    match cli.command {
        Command::Run(common) => {
            let cfg = common.resolve()?;
            let outcome = cmd_run(&cfg)?;
            let s = &outcome.summary;
            println!(
                "{} bdf{}: h = {:e}, dt = {:e}, {} steps, {} dofs",
                s.case, s.bdf, s.h, s.dt, s.steps, s.final_dofs
            );
            println!(
                "mass {:e} -> {:e}, max drift {:e}, max residual {:e}, norm growth {:.4}",
                s.initial_mass, s.final_mass, s.max_abs_drift, s.max_relative_residual, s.norm_growth
            );
            if let (Some(l2), Some(h1)) = (s.l2_l2_error, s.l2_h1_error) {
                println!("L2(L2) error {l2:.3e}, L2(H1) error {h1:.3e}");
            }
            print_files(&outcome.files);
            Ok(())
        }
        Command::Convergence {
            common,
            levels,
            lt_levels,
            lx_levels,
            threads,
        } => {
            let mut cfg = common.resolve()?;
            if let Some(l) = levels {
                let parsed = parse_levels(&l).map_err(AppError::Usage)?;
                cfg.lt_levels = parsed.clone();
                cfg.lx_levels = parsed;
            }
            if let Some(l) = lt_levels {
                cfg.lt_levels = parse_levels(&l).map_err(AppError::Usage)?;
            }
            if let Some(l) = lx_levels {
                cfg.lx_levels = parse_levels(&l).map_err(AppError::Usage)?;
            }
            if threads.is_some() {
                cfg.threads = threads;
            }
            let outcome = cmd_convergence(&cfg)?;
            let r = &outcome.result;
            for (name, table, footers) in [
                ("L2(L2)", &r.l2_l2, r.footers_l2()),
                ("L2(H1)", &r.l2_h1, r.footers_h1()),
            ] {
                println!("{name}");
                print!("{}", cutfem::tables::render(table, &footers, cutfem::tables::Precision::Short));
            }
            print_files(&outcome.files);
            Ok(())
        }
        Command::ExportMesh { common, file } => {
            let cfg = common.resolve()?;
            let path = file.unwrap_or_else(|| cfg.output.join("mesh.vtk"));
            cmd_export_mesh(&cfg, &path)?;
            print_files(&[path]);
            Ok(())
        }
        Command::Cases => {
            for name in CASE_NAMES {
                let c = CaseSpec::by_name(name).expect("listed case exists");
                println!(
                    "{name}: T = {}, nu = {}, w_inf = {}, h0 = {}, dt0 = {}, exact solution: {}",
                    c.t_end,
                    c.nu,
                    c.w_inf,
                    c.h0,
                    c.dt0,
                    c.has_exact_solution()
                );
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
