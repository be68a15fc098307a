use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use setdecomp::architecture::Architecture;
use setdecomp::pipeline::{
    check_laws, design_point, exit_code, load_golden, load_requirements, run_pipeline, RunConfig,
};
use setdecomp::requirements::RefinementMode;
use setdecomp::simulation::{build_ode, integrate, DesignPoint};
use setdecomp::Error;

#[derive(Parser)]
#[command(name = "setdecomp", version, about = "Set-based requirements decomposition")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full decomposition on an architecture file.
    Decompose {
        arch: PathBuf,
        #[command(flatten)]
        run: RunArgs,
        /// Maximum trade-off solver iterations.
        #[arg(long, default_value_t = 10_000)]
        max_iters: usize,
        /// Also compare uncontrollables and controllables when checking refinement.
        #[arg(long)]
        strict_refinement: bool,
        /// Reference values to report relative deltas against.
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Emit::Md)]
        emit: Emit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check that the composition of PARTS refines TOP and that linked parts compose.
    CheckLaws {
        top: PathBuf,
        parts: Vec<PathBuf>,
        #[arg(long)]
        strict_refinement: bool,
    },
    /// Simulate one design point and write the trajectory as CSV.
    Simulate {
        arch: PathBuf,
        /// Override a design variable, e.g. `--set v_0=27`.
        #[arg(long = "set", value_parser = parse_assignment)]
        set: Vec<(String, f64)>,
        #[command(flatten)]
        run: RunArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Integration step in seconds.
    #[arg(long, default_value_t = 0.01)]
    step: f64,
    /// Simulated time span in seconds.
    #[arg(long, default_value_t = 100.0)]
    horizon: f64,
    /// Sample points per design-space axis.
    #[arg(long, default_value_t = 3)]
    grid: usize,
    /// Envelope padding as a fraction of each span.
    #[arg(long, default_value_t = 0.02)]
    padding: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Json,
    Md,
    Csv,
}

fn parse_assignment(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s.split_once('=').ok_or("expected NAME=VALUE")?;
    let v: f64 = v.parse().map_err(|e| format!("{v}: {e}"))?;
    Ok((k.trim().to_string(), v))
}

fn config(run: &RunArgs) -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.sim.step = run.step;
    cfg.sim.horizon = run.horizon;
    cfg.plan.grid = run.grid;
    cfg.plan.padding = run.padding;
    cfg
}

fn mode(strict: bool) -> RefinementMode {
    if strict {
        RefinementMode::Strict
    } else {
        RefinementMode::Standard
    }
}

fn write_out(out: Option<&PathBuf>, text: &str) -> Result<(), Error> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Decompose {
            arch,
            run,
            max_iters,
            strict_refinement,
            compare,
            emit,
            out,
        } => {
            let a = Architecture::load(&arch)?;
            let mut cfg = config(&run);
            cfg.solver.max_iters = max_iters;
            cfg.refinement = mode(strict_refinement);
            let mut report = run_pipeline(&a, &cfg)?;
            if let Some(g) = compare {
                report.compare(&load_golden(g)?);
            }
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            let text = match emit {
                Emit::Json => report.to_json(),
                Emit::Md => report.to_markdown(),
                Emit::Csv => report.to_csv(),
            };
            write_out(out.as_ref(), &text)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckLaws {
            top,
            parts,
            strict_refinement,
        } => {
            let top = load_requirements(&top)?;
            let [top] = <[_; 1]>::try_from(top)
                .map_err(|_| Error::Validation("TOP must hold exactly one requirement".into()))?;
            let mut frs = Vec::new();
            for p in &parts {
                frs.extend(load_requirements(p)?);
            }
            if frs.is_empty() {
                frs.push(top.clone());
            }
            let report = check_laws(&top, &frs, mode(strict_refinement))?;
            for l in &report.links {
                match &l.witness {
                    None => println!("compose {} -> {}: ok ({})", l.producer, l.consumer, l.shared.join(", ")),
                    Some(w) => println!("compose {} -> {}: FAIL {w}", l.producer, l.consumer),
                }
            }
            match &report.refinement.witness {
                None => println!("refines {}: ok", top.name),
                Some(w) => println!("refines {}: FAIL {w}", top.name),
            }
            Ok(if report.holds() { ExitCode::SUCCESS } else { ExitCode::from(4) })
        }
        Command::Simulate { arch, set, run, out } => {
            let a = Architecture::load(&arch)?;
            let cfg = config(&run);
            let overrides: DesignPoint = set.into_iter().collect();
            let point = design_point(&a, &overrides)?;
            let sys = build_ode(&a, &point)?;
            let traj = integrate(&sys, cfg.sim)?;
            let mut buf = Vec::new();
            traj.write_csv(&mut buf)?;
            write_out(out.as_ref(), &String::from_utf8_lossy(&buf))?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
