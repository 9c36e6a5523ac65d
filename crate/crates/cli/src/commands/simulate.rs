// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;

use clap::Args;
use mtkink_core::chain::{
    self, auto_dt, init_velocity, measure_speed, InitialCondition, RunSpec, Trajectory,
    MIN_FIT_SAMPLES, TRANSIENT_FRACTION,
};
use mtkink_core::roots_from_params;
use serde::Serialize;

use crate::config::ParamArgs;
use crate::output::{emit_json, num, Csv};
use crate::CliError;

/// Default run length in lattice sites travelled.
const DEFAULT_SITES: f64 = 40.0;
/// Run length when the kink is not expected to move (s).
const STATIC_T_END: f64 = 2e-11;
const DEFAULT_SAMPLES: usize = 400;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub n_grid: Option<usize>,
    /// Lattice spacing (m); defaults to R0
    #[arg(long)]
    pub dx: Option<f64>,
    /// Time step (s); defaults to 0.9 of the stability limit
    #[arg(long)]
    pub dt: Option<f64>,
    /// Simulated time (s); defaults to 40 sites of travel
    #[arg(long)]
    pub t_end: Option<f64>,
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Initial kink centre as a site index
    #[arg(long)]
    pub center_site: Option<f64>,
    /// Initial kink velocity override (m/s)
    #[arg(long, allow_hyphen_values = true)]
    pub velocity: Option<f64>,
    /// Trajectory CSV: t, front_x, energy
    #[arg(long)]
    pub trajectory_out: Option<PathBuf>,
    /// Final state CSV: x, u, u_dot
    #[arg(long)]
    pub snapshot_out: Option<PathBuf>,
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct SimulateSummary {
    n_grid: usize,
    dx: f64,
    dt: f64,
    t_end: f64,
    samples: usize,
    v_measured: Option<f64>,
    v_std_error: Option<f64>,
    v_predicted: f64,
    relative_error: Option<f64>,
    energy_drift: f64,
    final_front_x: Option<f64>,
}

/// Whether the trajectory has enough samples left after the transient.
fn fittable(traj: &Trajectory) -> bool {
    let n = traj.len();
    n - ((TRANSIENT_FRACTION * n as f64).ceil() as usize).min(n) >= MIN_FIT_SAMPLES
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let config = args.params.config()?;
    let params = args.params.resolve(&config)?;
    let n_grid = config.pick(args.n_grid, "n_grid", 2048)?;
    let dx = config.pick(args.dx, "dx", params.r0)?;
    let dt_flag = config.pick_opt(args.dt, "dt")?;
    let velocity = config.pick_opt(args.velocity, "velocity")?;
    let center_site = config.pick(args.center_site, "center_site", 0.3 * n_grid as f64)?;
    if !(dx > 0.0 && dx.is_finite()) {
        return Err(CliError::validation("dx must be positive"));
    }

    let roots = roots_from_params(&params)?;
    let v_predicted = match velocity {
        Some(v) => v,
        None => init_velocity(&params, &roots)?,
    };
    let default_t_end = if v_predicted > 0.0 {
        DEFAULT_SITES * dx / v_predicted
    } else {
        STATIC_T_END
    };
    let t_end = config.pick(args.t_end, "t_end", default_t_end)?;
    let dt_max = dt_flag.unwrap_or_else(|| auto_dt(&params, dx));
    let steps = ((t_end / dt_max - 1e-9).ceil() as usize).max(1);
    let sample_every = config.pick(
        args.sample_every,
        "sample_every",
        (steps / DEFAULT_SAMPLES).max(1),
    )?;

    let spec = RunSpec {
        n_grid,
        dx,
        dt: dt_flag,
        initial: InitialCondition::Kink {
            center: center_site * dx,
            velocity,
        },
        t_end,
        sample_every,
        level: None,
    };
    let traj = chain::run(&params, &spec)?;

    let fit = if fittable(&traj) {
        Some(measure_speed(&traj)?)
    } else {
        None
    };
    let summary = SimulateSummary {
        n_grid,
        dx,
        dt: if t_end > 0.0 {
            t_end / steps as f64
        } else {
            dt_max
        },
        t_end,
        samples: traj.len(),
        v_measured: fit.map(|f| f.speed),
        v_std_error: fit.map(|f| f.std_error),
        v_predicted,
        relative_error: fit
            .filter(|_| v_predicted != 0.0)
            .map(|f| (f.speed / v_predicted - 1.0).abs()),
        energy_drift: traj.energy_drift(),
        final_front_x: traj.front_x.last().copied().filter(|x| x.is_finite()),
    };

    if let Some(path) = &args.trajectory_out {
        let mut csv = Csv::new(&["t", "front_x", "energy"]);
        for i in 0..traj.len() {
            csv.row([
                num(traj.times[i]),
                num(traj.front_x[i]),
                num(traj.energies[i]),
            ]);
        }
        csv.write(path)?;
    }
    if let (Some(path), Some(state)) = (&args.snapshot_out, &traj.final_state) {
        let mut csv = Csv::new(&["x", "u", "u_dot"]);
        for n in 0..state.len() {
            csv.row([num(state.position(n)), num(state.u[n]), num(state.u_dot[n])]);
        }
        csv.write(path)?;
    }
    emit_json(&summary, args.summary_out.as_deref())
}
