use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dglod::experiment::{run_convergence, run_decay, run_single, with_threads, ExperimentConfig};
use dglod::lod::Layers;

#[derive(Parser)]
#[command(name = "dglod", about = "Multiscale DG experiments for convection-diffusion")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Relative energy error against the fine reference for each coarse level.
    Convergence(RunArgs),
    /// Distance between ideal and localized correctors as the patch grows.
    Decay(RunArgs),
    /// One multiscale solve with VTK output.
    Single(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; overrides `output_dir` in the config.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

fn layers_label(l: Layers) -> String {
    match l {
        Layers::Ideal => "ideal".into(),
        Layers::Local(l) => l.to_string(),
    }
}

fn run(cli: Cli) -> dglod::Result<()> {
    let (Command::Convergence(args) | Command::Decay(args) | Command::Single(args)) = &cli.command;
    let cfg = ExperimentConfig::load(&args.config)?;
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    with_threads(args.threads, || match &cli.command {
        Command::Convergence(_) => {
            let report = run_convergence(&cfg)?;
            println!(
                "{:>10} {:>7} {:>6} {:>12} {:>9}",
                "H", "N_dof", "L", "rel_error", "seconds"
            );
            for r in &report.rows {
                println!(
                    "{:>10} {:>7} {:>6} {:>12.4e} {:>9.2}",
                    r.coarse_h,
                    r.coarse_dofs,
                    layers_label(r.layers),
                    r.rel_error,
                    r.wall_seconds
                );
            }
            match report.slope {
                Some(s) => println!("fitted slope {s:.3}"),
                None => println!("fitted slope n/a (single level)"),
            }
            report.write(&out, &cfg)
        }
        Command::Decay(_) => {
            let report = run_decay(&cfg)?;
            for (l, d) in &report.profile {
                println!("L={l:<3} distance={d:.4e}");
            }
            match report.gamma {
                Some(g) => println!("fitted decay rate {g:.4}"),
                None => println!("fitted decay rate n/a"),
            }
            report.write(&out, &cfg)
        }
        Command::Single(_) => {
            let report = run_single(&cfg)?;
            print!("{}", report.summary());
            println!("wall_seconds={:.2}", report.row.wall_seconds);
            report.write(&out, &cfg)
        }
    })??;
    println!("wrote {}", out.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            let mut source = std::error::Error::source(&e);
            while let Some(s) = source {
                eprintln!("  caused by: {s}");
                source = s.source();
            }
            ExitCode::FAILURE
        }
    }
}
