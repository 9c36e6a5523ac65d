// SPDX-License-Identifier: Apache-2.0

use std::f64::consts::LN_2;
use std::path::PathBuf;

use clap::Args;
use mtkink_core::decoherence::{
    measurability_bound, offdiag_halflife, trace_evolution, CollapseEstimate, DensityMatrix,
    DephasingSpec,
};
use mtkink_core::units::{convert_energy, EnergyUnit};
use num_complex::Complex64;
use serde::Serialize;

use crate::config::RunConfig;
use crate::output::{emit_json, num, Csv};
use crate::CliError;

/// Default step: this fraction of the predicted half-life...
const STEPS_PER_HALFLIFE: f64 = 500.0;
/// ...capped so dt·Λ·‖x‖² stays below this.
const STIFFNESS_TARGET: f64 = 0.05;
/// Default trace length in predicted half-lives.
const TRACE_HALFLIVES: f64 = 3.0;

#[derive(Debug, Args)]
pub struct CollapseArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// String scale in GeV
    #[arg(long)]
    pub mgus_gev: Option<f64>,
    /// Energy per tubulin in eV
    #[arg(long)]
    pub e_ev: Option<f64>,
    /// Collapse time (s); reports the coherent tubulin count
    #[arg(long)]
    pub t_sec: Option<f64>,
    /// Coherent tubulin count; reports the collapse time
    #[arg(long)]
    pub n: Option<f64>,

    /// Measurability bound sqrt(L·Ls)
    #[arg(long, conflicts_with = "trace")]
    pub bound: bool,
    #[arg(long = "L")]
    pub length: Option<f64>,
    #[arg(long = "Ls")]
    pub string_length: Option<f64>,

    /// Dephasing trace of a uniform superposition
    #[arg(long)]
    pub trace: bool,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Dephasing rate Λ (1/(s·unit²))
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Spacing between neighbouring position eigenvalues
    #[arg(long)]
    pub spacing: Option<f64>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long)]
    pub sample_every: Option<usize>,
    /// Entry to track as "i,j" (repeatable; default 0,1)
    #[arg(long = "pair")]
    pub pairs: Vec<String>,
    /// Trace CSV: t, |rho_ij|..., purity
    #[arg(long)]
    pub trace_out: Option<PathBuf>,

    #[arg(long)]
    pub summary_out: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
struct EstimateOutput {
    M_gus_eV: f64,
    E_scale_eV: f64,
    N: f64,
    t_col_s: f64,
    brain_fraction: f64,
}

#[derive(Debug, Serialize)]
#[allow(non_snake_case)]
struct BoundOutput {
    L_m: f64,
    L_s_m: f64,
    delta_L_m: f64,
}

#[derive(Debug, Serialize)]
struct TraceOutput {
    dim: usize,
    lambda: f64,
    spacing: f64,
    dt: f64,
    steps: usize,
    pair: [usize; 2],
    halflife_measured_s: f64,
    halflife_predicted_s: f64,
    relative_error: f64,
    final_purity: f64,
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::validation(format!("missing --{flag}")))
}

fn parse_pair(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::validation(format!("--pair expects i,j, got '{text}'"));
    let (i, j) = text.split_once(',').ok_or_else(bad)?;
    Ok((
        i.trim().parse().map_err(|_| bad())?,
        j.trim().parse().map_err(|_| bad())?,
    ))
}

pub fn run(args: &CollapseArgs) -> Result<(), CliError> {
    let config = RunConfig::load(args.config.as_deref())?;
    let out = args.summary_out.as_deref();
    if args.bound || config.get::<bool>("bound")?.unwrap_or(false) {
        let length = required(config.pick_opt(args.length, "L")?, "L")?;
        let string_length = required(config.pick_opt(args.string_length, "Ls")?, "Ls")?;
        let delta = measurability_bound(length, string_length)?;
        return emit_json(
            &BoundOutput {
                L_m: length,
                L_s_m: string_length,
                delta_L_m: delta,
            },
            out,
        );
    }
    if args.trace || config.get::<bool>("trace")?.unwrap_or(false) {
        return run_trace(args, &config);
    }

    let m_gus_gev = required(config.pick_opt(args.mgus_gev, "mgus_gev")?, "mgus-gev")?;
    let e_ev = required(config.pick_opt(args.e_ev, "e_ev")?, "e-ev")?;
    let m_gus = convert_energy(
        m_gus_gev,
        EnergyUnit::GigaElectronVolt,
        EnergyUnit::ElectronVolt,
    );
    let estimate = match (
        config.pick_opt(args.t_sec, "t_sec")?,
        config.pick_opt(args.n, "n")?,
    ) {
        (Some(t), None) => CollapseEstimate::from_time(m_gus, e_ev, t)?,
        (None, Some(n)) => CollapseEstimate::from_count(m_gus, e_ev, n)?,
        _ => return Err(CliError::validation("give exactly one of --t-sec and --n")),
    };
    emit_json(
        &EstimateOutput {
            M_gus_eV: estimate.m_gus,
            E_scale_eV: estimate.e_scale,
            N: estimate.n,
            t_col_s: estimate.t_col,
            brain_fraction: estimate.brain_fraction(),
        },
        out,
    )
}

fn run_trace(args: &CollapseArgs, config: &RunConfig) -> Result<(), CliError> {
    let dim = config.pick(args.dim, "dim", 2)?;
    let lambda = required(config.pick_opt(args.lambda, "lambda")?, "lambda")?;
    let spacing = config.pick(args.spacing, "spacing", 1.0)?;
    if dim < 2 {
        return Err(CliError::validation("--dim must be at least 2"));
    }
    let mut pairs = args
        .pairs
        .iter()
        .map(|p| parse_pair(p))
        .collect::<Result<Vec<_>, _>>()?;
    if pairs.is_empty() {
        pairs.push(match config.get::<String>("pair")? {
            Some(p) => parse_pair(&p)?,
            None => (0, 1),
        });
    }

    // positions centred on zero keep ‖x‖ small
    let positions: Vec<f64> = (0..dim)
        .map(|i| spacing * (i as f64 - 0.5 * (dim - 1) as f64))
        .collect();
    let spec = DephasingSpec::pure_dephasing(&positions, lambda)?;
    let (i, j) = pairs[0];
    if i >= dim || j >= dim || i == j {
        return Err(CliError::validation(format!(
            "pair ({i},{j}) must be off-diagonal and within dim"
        )));
    }
    let gap = positions[i] - positions[j];
    let predicted = LN_2 / (lambda * gap * gap);
    let radius = 0.5 * spacing * (dim - 1) as f64;
    let default_dt =
        (predicted / STEPS_PER_HALFLIFE).min(STIFFNESS_TARGET / (lambda * radius * radius));
    let dt = config.pick(args.dt, "dt", default_dt)?;
    let steps = config.pick(
        args.steps,
        "steps",
        (TRACE_HALFLIVES * predicted / dt).ceil() as usize,
    )?;
    let sample_every = config.pick(args.sample_every, "sample_every", 1)?;

    let amp = Complex64::new(1.0 / (dim as f64).sqrt(), 0.0);
    let rho0 = DensityMatrix::pure(&vec![amp; dim])?;
    let trace = trace_evolution(&rho0, &spec, dt, steps, sample_every, &pairs)?;
    let measured = offdiag_halflife(&trace.times, &trace.magnitudes[0])?;

    if let Some(path) = &args.trace_out {
        let mut header = vec!["t".to_string()];
        header.extend(pairs.iter().map(|(i, j)| format!("abs_rho_{i}_{j}")));
        header.push("purity".into());
        let header: Vec<&str> = header.iter().map(String::as_str).collect();
        let mut csv = Csv::new(&header);
        for s in 0..trace.times.len() {
            let mut row = vec![num(trace.times[s])];
            row.extend(trace.magnitudes.iter().map(|m| num(m[s])));
            row.push(num(trace.purity[s]));
            csv.row(row);
        }
        csv.write(path)?;
    }
    emit_json(
        &TraceOutput {
            dim,
            lambda,
            spacing,
            dt,
            steps,
            pair: [i, j],
            halflife_measured_s: measured,
            halflife_predicted_s: predicted,
            relative_error: (measured / predicted - 1.0).abs(),
            final_purity: *trace.purity.last().expect("trace has samples"),
        },
        args.summary_out.as_deref(),
    )
}
