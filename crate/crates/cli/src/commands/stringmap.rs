// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::Args;
use mtkink_core::kink::VelocityMode;
use mtkink_core::roots_from_params;
use mtkink_core::string_map::{
    adm_mass, frame_from_rho, reality_condition, RealityReport, StringFrame,
};
use serde::Serialize;

use crate::config::ParamArgs;
use crate::output::emit_json;
use crate::CliError;

#[derive(Debug, Args)]
pub struct StringmapArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    /// Map a bare friction coefficient instead of a parameter set
    #[arg(long)]
    pub rho: Option<f64>,
    /// Which velocity law fixes rho for a parameter set
    #[arg(long)]
    pub mode: Option<VelocityMode>,
    /// Report the ADM mass of the coset black hole instead
    #[arg(long)]
    pub adm: bool,
    /// Kac-Moody level (> 2)
    #[arg(long)]
    pub k: Option<f64>,
    /// Dilaton constant
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    /// Proportionality constant of the mass formula
    #[arg(long)]
    pub c_prop: Option<f64>,
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct MapOutput {
    #[serde(flatten)]
    frame: StringFrame,
    #[serde(skip_serializing_if = "Option::is_none")]
    reality: Option<RealityReport>,
}

#[derive(Debug, Serialize)]
struct AdmOutput {
    k: f64,
    a: f64,
    c_prop: f64,
    mass: f64,
}

pub fn run(args: &StringmapArgs) -> Result<(), CliError> {
    let config = args.params.config()?;
    let out = args.summary_out.as_deref();
    if args.adm || config.get::<bool>("adm")?.unwrap_or(false) {
        let k = config
            .pick_opt(args.k, "k")?
            .ok_or_else(|| CliError::validation("--adm requires --k"))?;
        let a = config.pick(args.a, "a", 0.0)?;
        let c_prop = config.pick(args.c_prop, "c_prop", 1.0)?;
        let mass = adm_mass(k, a, c_prop)?;
        return emit_json(&AdmOutput { k, a, c_prop, mass }, out);
    }
    if let Some(rho) = config.pick_opt(args.rho, "rho")? {
        let frame = frame_from_rho(rho)?;
        return emit_json(
            &MapOutput {
                frame,
                reality: None,
            },
            out,
        );
    }
    let params = args.params.resolve(&config)?;
    let roots = roots_from_params(&params)?;
    let report = reality_condition(&params, roots.d)?;
    let rho = match config.pick(args.mode, "mode", VelocityMode::Consistent)? {
        VelocityMode::Paper => report.rho_paper,
        VelocityMode::Consistent => report.rho_consistent,
    };
    let frame = frame_from_rho(rho)?;
    emit_json(
        &MapOutput {
            frame,
            reality: Some(report),
        },
        out,
    )
}
