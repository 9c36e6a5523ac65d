// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::Args;
use mtkink_core::kink::{
    kink_energetics, kink_velocity, ode_residual, transfer_time, VelocityMode,
};
use mtkink_core::{solve_force_cubic, Error, KinkProfile, PhysicalParams};
use serde::Serialize;

use crate::config::ParamArgs;
use crate::output::{emit_json, num, Csv};
use crate::CliError;

const TRANSFER_LENGTH: f64 = 1e-6;

#[derive(Debug, Args)]
pub struct KinkArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Dimensionless forcing; skips the physical parameters entirely
    #[arg(long, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    /// Velocity law used for t_T, Delta and M* (paper | consistent)
    #[arg(long)]
    pub mode: Option<VelocityMode>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub xi_max: Option<f64>,
    /// Number of profile samples
    #[arg(long)]
    pub points: Option<usize>,
    /// Profile CSV: xi, psi, dpsi_dxi, residual
    #[arg(long)]
    pub profile_out: Option<PathBuf>,
    /// Summary JSON path (stdout when absent)
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct Roots {
    a: f64,
    d: f64,
    b: f64,
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
struct KinkSummary {
    sigma: f64,
    roots: Roots,
    width_rate: f64,
    rho_consistent: f64,
    mode: VelocityMode,
    v0: Option<f64>,
    v_paper: Option<f64>,
    v_consistent: Option<f64>,
    Delta_eV: Option<f64>,
    M_star_kg: Option<f64>,
    t_T_for_1um: Option<f64>,
}

/// A kink that cannot move (d = 0 with friction) has velocity 0.
fn velocity(params: &PhysicalParams, d: f64, mode: VelocityMode) -> Result<f64, Error> {
    match kink_velocity(params, d, mode) {
        Err(Error::NoPropagatingKink) => Ok(0.0),
        other => other,
    }
}

pub fn run(args: &KinkArgs) -> Result<(), CliError> {
    let config = args.params.config()?;
    let mode = config.pick(args.mode, "mode", VelocityMode::Consistent)?;
    let sigma_flag = config.pick_opt(args.sigma, "sigma")?;
    let params = match sigma_flag {
        Some(_) => None,
        None => Some(args.params.resolve(&config)?),
    };
    let sigma = match (&params, sigma_flag) {
        (_, Some(s)) => s,
        (Some(p), None) => p.derive()?.sigma,
        (None, None) => unreachable!(),
    };
    let roots = solve_force_cubic(sigma)?;
    let profile = KinkProfile::new(roots);

    let mut summary = KinkSummary {
        sigma,
        roots: Roots {
            a: roots.a,
            d: roots.d,
            b: roots.b,
        },
        width_rate: profile.width_rate,
        rho_consistent: profile.rho_consistent,
        mode,
        v0: None,
        v_paper: None,
        v_consistent: None,
        Delta_eV: None,
        M_star_kg: None,
        t_T_for_1um: None,
    };
    if let Some(p) = &params {
        let v0 = p.derive()?.v0;
        let v_paper = velocity(p, roots.d, VelocityMode::Paper)?;
        let v_consistent = velocity(p, roots.d, VelocityMode::Consistent)?;
        let v = match mode {
            VelocityMode::Paper => v_paper,
            VelocityMode::Consistent => v_consistent,
        };
        summary.v0 = Some(v0);
        summary.v_paper = Some(v_paper);
        summary.v_consistent = Some(v_consistent);
        summary.Delta_eV = Some(kink_energetics(p, 0.0)?.delta_ev());
        // M* diverges as v → v0 (frictionless kink)
        summary.M_star_kg = kink_energetics(p, v).ok().map(|e| e.m_star);
        summary.t_T_for_1um = transfer_time(TRANSFER_LENGTH, v).ok();
    }

    if let Some(path) = &args.profile_out {
        let xi_min = config.pick(args.xi_min, "xi_min", -20.0)?;
        let xi_max = config.pick(args.xi_max, "xi_max", 20.0)?;
        let points = config.pick(args.points, "points", 401)?;
        if !(xi_max > xi_min) || points < 2 {
            return Err(CliError::validation(
                "profile needs xi_max > xi_min and at least 2 points",
            ));
        }
        let mut csv = Csv::new(&["xi", "psi", "dpsi_dxi", "residual"]);
        for i in 0..points {
            let xi = xi_min + (xi_max - xi_min) * i as f64 / (points - 1) as f64;
            csv.row([
                num(xi),
                num(profile.value(xi)),
                num(profile.derivative(xi)),
                num(ode_residual(&profile, profile.rho_consistent, sigma, xi)),
            ]);
        }
        csv.write(path)?;
    }
    emit_json(&summary, args.summary_out.as_deref())
}
