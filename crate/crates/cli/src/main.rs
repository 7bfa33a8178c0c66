mod config;
mod output;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Parser, Subcommand};
use twostep::driver::{convergence_study, integrate, startup_study, IntegrationConfig, SolverFamily};
use twostep::problems::{AnalyticProblem, Preset};
use twostep::stencil::{format_rational, verify_catalogue};
use twostep::{CorrectorVariant, Problem};

use output::{resolve_output_dir, write_convergence, write_series, write_status};

#[derive(Parser)]
#[command(name = "twostep", version, about = "Adaptive two-step PECE integrators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the problem described by a key = value config file.
    Run {
        config: PathBuf,
        /// Output directory (overrides $TWOSTEP_OUTPUT_DIR and the config).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print residuals and exactness degrees of every catalogued formula.
    VerifyStencils,
    /// Measure the convergence slope on a closed-form problem.
    Convergence {
        /// first-order, second-order or dynamic
        family: SolverFamily,
        /// averaged, type1 or type2
        variant: CorrectorVariant,
        /// exp_decay, harmonic or forced_linear
        problem: AnalyticProblem,
        /// Largest step size; each further level halves it.
        #[arg(long, default_value_t = 0.1)]
        h: f64,
        #[arg(long, default_value_t = 4)]
        levels: u32,
        #[arg(long, default_value_t = 2.0)]
        t_end: f64,
        /// Single steps of the startup method only (local order).
        #[arg(long)]
        startup: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a named benchmark.
    Preset {
        /// brusselator-limit-cycle, brusselator-stiff or fsae-bumps
        name: Preset,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
        /// Number of global nodes.
        #[arg(long = "n")]
        n_global: Option<usize>,
        #[arg(long)]
        t_end: Option<f64>,
        /// Brusselator initial condition, e.g. `--ic 1.5,3.0`.
        #[arg(long, value_parser = config::parse_pair)]
        ic: Option<[f64; 2]>,
        #[arg(long)]
        variant: Option<CorrectorVariant>,
        /// Fixed local steps per global step; disables the controller.
        #[arg(long)]
        fixed_steps: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run { config, out } => cmd_run(&config, out.as_deref()),
        Command::VerifyStencils => Ok(cmd_verify_stencils()),
        Command::Convergence {
            family,
            variant,
            problem,
            h,
            levels,
            t_end,
            startup,
            out,
        } => cmd_convergence(family, variant, problem, h, levels, t_end, startup, out.as_deref()),
        Command::Preset {
            name,
            tol,
            n_global,
            t_end,
            ic,
            variant,
            fixed_steps,
            out,
        } => (|| {
            let problem = name.build(ic, t_end, n_global)?;
            let cfg = IntegrationConfig {
                tol,
                variant: variant.unwrap_or_default(),
                fixed_steps,
                ..Default::default()
            };
            execute(&problem, &cfg, &resolve_output_dir(out.as_deref(), None))
        })(),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn cmd_run(path: &Path, out: Option<&Path>) -> Result<ExitCode> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let cfg = config::parse(&text).map_err(|e| anyhow!("{}: {e}", path.display()))?;
    let problem = cfg.build_problem()?;
    let dir = resolve_output_dir(out, cfg.output_dir.as_deref());
    execute(&problem, &cfg.integration, &dir)
}

fn execute(problem: &Problem, cfg: &IntegrationConfig, dir: &Path) -> Result<ExitCode> {
    match integrate(problem, cfg) {
        Ok(series) => {
            write_series(dir, &series)?;
            write_status(dir, None)?;
            let s = series.stats;
            println!(
                "steps {}  halved {}  doubled {}  restarts {}  max eps {:.3e}",
                s.local_steps,
                s.halvings,
                s.doublings,
                s.restarts,
                series.max_eps()
            );
            println!("wrote {}", dir.display());
            Ok(ExitCode::SUCCESS)
        }
        Err(aborted) => {
            write_series(dir, &aborted.partial)?;
            write_status(dir, Some(&aborted.error.to_string()))?;
            eprintln!("error: {aborted}");
            eprintln!("partial output written to {} (see status.txt)", dir.display());
            Ok(ExitCode::FAILURE)
        }
    }
}

fn cmd_verify_stencils() -> ExitCode {
    let rows = verify_catalogue();
    let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(4);
    println!(
        "{:<width$}  {:>5}  {:>7} {:>7} {:>7} {:>7} {:>7}  {:>6}  note",
        "name", "claim", "r0", "r1", "r2", "r3", "r4", "degree"
    );
    let mut ok = true;
    for row in &rows {
        let r: Vec<String> = row.residual.coeffs.iter().map(format_rational).collect();
        let degree = row
            .exactness_degree
            .map_or_else(|| ">10".to_string(), |d| d.to_string());
        let note = match (row.meets_claim(), row.order_verified) {
            (true, _) => "",
            (false, true) => {
                ok = false;
                "FAILS-CLAIM"
            }
            (false, false) => "differs-from-claim",
        };
        println!(
            "{:<width$}  {:>5}  {:>7} {:>7} {:>7} {:>7} {:>7}  {:>6}  {}",
            row.name, row.claimed_order, r[0], r[1], r[2], r[3], r[4], degree, note
        );
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_convergence(
    family: SolverFamily,
    variant: CorrectorVariant,
    problem: AnalyticProblem,
    h: f64,
    levels: u32,
    t_end: f64,
    startup: bool,
    out: Option<&Path>,
) -> Result<ExitCode> {
    if levels < 2 {
        return Err(anyhow!("need at least two refinement levels"));
    }
    let hs: Vec<f64> = (0..levels).map(|k| h / f64::powi(2.0, k as i32)).collect();
    let study = if startup {
        startup_study(problem, family, &hs)?
    } else {
        convergence_study(problem, family, variant, t_end, &hs)?
    };
    let dir = resolve_output_dir(out, None);
    let path = dir.join("convergence.csv");
    write_convergence(&path, &study.points)?;
    for p in &study.points {
        println!("h {:.6e}  error {:.6e}", p.h, p.error);
    }
    println!("slope {:.4}", study.slope);
    println!("wrote {}", path.display());
    Ok(ExitCode::SUCCESS)
}
