use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use dde_rigor::interval::Interval;
use dde_rigor::lohner::bench_block_vs_dense;
use dde_rigor::pnrep::PnParams;
use dde_rigor::proof::{emit_outputs, find, run_proof, write_find_output, ProofConfig};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "ddeproof", about = "Rigorous integration and periodic-orbit proofs for scalar delay equations")]
struct Cli {
    /// More log output (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Search for an orbit and write the anchor, normal, radii and section files.
    Find {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run the rigorous proof and write the report and CSV files.
    Prove {
        #[arg(long)]
        config: PathBuf,
    },
    /// Time block-structured against dense interval matrix products.
    Bench {
        #[arg(long, default_value_t = 128)]
        p: usize,
        #[arg(long, default_value_t = 4)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        reps: usize,
    },
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "info",
        1 => "debug",
        _ => "trace",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match cli.cmd {
        Cmd::Find { config } => {
            let cfg = ProofConfig::load(&config)?;
            let out = find(&cfg).context("search pipeline failed")?;
            write_find_output(&out, &cfg)?;
            println!("PERIOD_ESTIMATE = {}", out.period);
            println!("NEWTON_RESIDUAL = {:e}", out.newton_residual);
            println!("UNIT_EIGENVALUE = {}", out.unit_eigenvalue);
            let lead: Vec<String> = out.return_moduli.iter().take(10).map(|v| format!("{v:.4e}")).collect();
            println!("RETURN_MODULI = {}", lead.join(" "));
            println!("SHRINK_ITERATIONS = {}", out.shrink_iterations);
        }
        Cmd::Prove { config } => {
            let cfg = ProofConfig::load(&config)?;
            let run = run_proof(&cfg).context("proof failed")?;
            emit_outputs(&run, &cfg)?;
            print!("{}", run.report.to_text(&cfg.targets));
            if !run.report.passed(&cfg.targets) {
                bail!("one or more targets failed");
            }
        }
        Cmd::Bench { p, n, reps } => {
            let pr = PnParams::new(p, n, Interval::ONE)?;
            let b = bench_block_vs_dense(&pr, reps)?;
            println!("M = {}", b.m);
            println!("BLOCK_SECONDS = {:.6}", b.block_seconds);
            println!("DENSE_SECONDS = {:.6}", b.dense_seconds);
            println!("SPEEDUP = {:.1}", b.speedup());
            println!("BIT_IDENTICAL = {}", b.bit_identical);
        }
    }
    Ok(())
}
