//! Library behind the `tersoff` binary.

pub mod bench;
pub mod error;
pub mod gen;
pub mod options;
pub mod report;
pub mod run;
pub mod structure;
pub mod verify;

use std::io::Write;

use clap::{Parser, Subcommand};

pub use error::{CliError, Result};

#[derive(Parser, Debug)]
#[command(name = "tersoff", version, about = "Tersoff potential force kernels: generate, run, verify, bench")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a generated structure as XYZ.
    Gen(gen::GenArgs),
    /// NVE or stretching molecular dynamics.
    Run(run::RunArgs),
    /// Check gradients, cross-variant agreement, width independence and conservation.
    Verify(verify::VerifyArgs),
    /// Time the force kernels.
    Bench(bench::BenchArgs),
}

pub fn dispatch(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Gen(a) => gen::cmd_gen(a, stdout),
        Command::Run(a) => run::cmd_run(a, stdout),
        Command::Verify(a) => verify::cmd_verify(a, stdout),
        Command::Bench(a) => bench::cmd_bench(a, stdout),
    }
}
