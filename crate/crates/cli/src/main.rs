// SPDX-License-Identifier: Apache-2.0

//! `mtkink`: command-line front end for the dimer-chain kink toolkit.
//!
//! Exit codes: 0 ok, 2 validation, 3 kink regime, 4 numerical failure.

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
mod commands;
mod config;
mod output;

use std::fmt;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug)]
pub struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<mtkink_core::Error> for CliError {
    fn from(e: mtkink_core::Error) -> Self {
        CliError {
            code: e.exit_code() as u8,
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "mtkink",
    version,
    about = "Kink solitons on microtubule dimer chains"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form kink: roots, velocities, energetics, sampled profile
    Kink(commands::kink::KinkArgs),
    /// Integrate the lattice equation and measure the front speed
    Simulate(commands::simulate::SimulateArgs),
    /// String-theory diagnostic map of the friction coefficient
    Stringmap(commands::stringmap::StringmapArgs),
    /// Collapse-time estimates, dephasing traces, measurability bound
    Collapse(commands::collapse::CollapseArgs),
    /// Tabulate kink observables over a parameter range
    Sweep(commands::sweep::SweepArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Kink(a) => commands::kink::run(&a),
        Command::Simulate(a) => commands::simulate::run(&a),
        Command::Stringmap(a) => commands::stringmap::run(&a),
        Command::Collapse(a) => commands::collapse::run(&a),
        Command::Sweep(a) => commands::sweep::run(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code)
        }
    }
}
