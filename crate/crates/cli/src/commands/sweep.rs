// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::{Args, ValueEnum};
use mtkink_core::kink::{kink_velocity, VelocityMode};
use mtkink_core::string_map::{frame_from_rho, reality_condition};
use mtkink_core::{roots_from_params, Error, PhysicalParams};
use rayon::prelude::*;

use crate::config::ParamArgs;
use crate::output::{num, write_file, Csv};
use crate::CliError;

pub const HEADER: [&str; 12] = [
    "value",
    "sigma",
    "regime",
    "a",
    "d",
    "b",
    "v_consistent",
    "v_paper",
    "rho",
    "reality_printed",
    "reality_derived",
    "c_s",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepVar {
    #[value(name = "E_field")]
    EField,
    #[value(name = "T")]
    Temperature,
    #[value(name = "gamma")]
    Gamma,
}

impl std::str::FromStr for SweepVar {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        <SweepVar as ValueEnum>::from_str(s, false)
    }
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Parameter to vary
    #[arg(long, value_enum)]
    pub var: Option<SweepVar>,
    #[arg(long, allow_hyphen_values = true)]
    pub from: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub to: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Logarithmic spacing (bounds must be positive)
    #[arg(long)]
    pub log: bool,
    /// CSV path (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn grid(from: f64, to: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if !(from.is_finite() && to.is_finite()) || points == 0 {
        return Err(CliError::validation(
            "sweep bounds must be finite and points >= 1",
        ));
    }
    if log && !(from > 0.0 && to > 0.0) {
        return Err(CliError::validation(
            "logarithmic sweep needs positive bounds",
        ));
    }
    if points == 1 {
        return Ok(vec![from]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let s = i as f64 / last;
            if i == 0 {
                from
            } else if i + 1 == points {
                to
            } else if log {
                from * (to / from).powf(s)
            } else {
                from + s * (to - from)
            }
        })
        .collect())
}

fn regime_flag(e: &Error) -> &'static str {
    match e {
        Error::KinkRegimeLost { .. } => "regime-lost",
        Error::NotDoubleWell { .. } => "not-double-well",
        Error::NoPropagatingKink => "no-propagation",
        Error::SignMismatch { .. } => "sign-mismatch",
        _ => "invalid",
    }
}

fn with_value(base: &PhysicalParams, var: SweepVar, value: f64) -> Result<PhysicalParams, Error> {
    match var {
        SweepVar::EField => Ok(base.with_e_field(value)),
        SweepVar::Gamma => {
            let p = base.with_gamma(value);
            p.validate()?;
            Ok(p)
        }
        SweepVar::Temperature => {
            PhysicalParams::from_temperature(base.c_temp, value, base.t_critical, *base)
        }
    }
}

/// One sweep row; per-point failures become a regime flag with blank numbers.
fn row(base: &PhysicalParams, var: SweepVar, value: f64) -> Vec<String> {
    let mut cells = vec![num(value)];
    let params = match with_value(base, var, value) {
        Ok(p) => p,
        Err(e) => {
            cells.push(String::new());
            cells.push(regime_flag(&e).into());
            cells.resize(HEADER.len(), String::new());
            return cells;
        }
    };
    let derived = match params.derive() {
        Ok(d) => d,
        Err(e) => {
            cells.push(String::new());
            cells.push(regime_flag(&e).into());
            cells.resize(HEADER.len(), String::new());
            return cells;
        }
    };
    cells.push(num(derived.sigma));
    let roots = match roots_from_params(&params) {
        Ok(r) => r,
        Err(e) => {
            cells.push(regime_flag(&e).into());
            cells.resize(HEADER.len(), String::new());
            return cells;
        }
    };
    let velocities = kink_velocity(&params, roots.d, VelocityMode::Consistent)
        .and_then(|vc| Ok((vc, kink_velocity(&params, roots.d, VelocityMode::Paper)?)));
    let (flag, vc, vp) = match velocities {
        Ok((vc, vp)) => ("ok", Some(vc), Some(vp)),
        Err(Error::NoPropagatingKink) => ("no-propagation", Some(0.0), Some(0.0)),
        Err(e) => (regime_flag(&e), None, None),
    };
    cells.push(flag.into());
    cells.extend([num(roots.a), num(roots.d), num(roots.b)]);
    cells.push(vc.map(num).unwrap_or_default());
    cells.push(vp.map(num).unwrap_or_default());
    let rho = vc.and_then(|v| derived.rho(v).ok());
    cells.push(rho.map(num).unwrap_or_default());
    match reality_condition(&params, roots.d) {
        Ok(r) => cells.extend([r.printed.to_string(), r.derived.to_string()]),
        Err(_) => cells.extend([String::new(), String::new()]),
    }
    let c_s = rho.and_then(|r| frame_from_rho(r).ok()).and_then(|f| f.c_s);
    cells.push(c_s.map(num).unwrap_or_default());
    cells
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let config = args.params.config()?;
    let base = args.params.resolve(&config)?;
    let var = config
        .pick_opt(args.var, "var")?
        .ok_or_else(|| CliError::validation("missing --var (E_field, T or gamma)"))?;
    let from = config
        .pick_opt(args.from, "from")?
        .ok_or_else(|| CliError::validation("missing --from"))?;
    let to = config
        .pick_opt(args.to, "to")?
        .ok_or_else(|| CliError::validation("missing --to"))?;
    let points = config.pick(args.points, "points", 11)?;
    let log = args.log || config.get::<bool>("log")?.unwrap_or(false);
    let values = grid(from, to, points, log)?;

    // points run concurrently; collect keeps them in sweep order
    let rows: Vec<Vec<String>> = values.par_iter().map(|&v| row(&base, var, v)).collect();
    let mut csv = Csv::new(&HEADER);
    for r in rows {
        csv.row(r);
    }
    let text = csv.into_string();
    match &args.out {
        Some(path) => write_file(path, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}
