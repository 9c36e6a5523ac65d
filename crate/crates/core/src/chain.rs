// SPDX-License-Identifier: Apache-2.0

//! Time-domain integration of the damped, field-driven dimer chain
//!
//! ```text
//! M ü_n = κ (u_{n+1} + u_{n−1} − 2u_n) + A u_n − B u_n³ + qE − γ u̇_n
//! ```
//!
//! with κ = M·v0²/dx². On a grid with dx = R0 this is the nearest-neighbour
//! lattice with κ = k_stiff; for other spacings it is the second-order
//! discretization of the continuum field equation whose traveling-wave
//! reduction is ψ'' + ρψ' − ψ³ + ψ + σ = 0.
//!
//! Each grid site stands for dx/R0 dimers, and every energy below carries
//! that weight.

use serde::Serialize;

use crate::cubic::{solve_force_cubic, CubicRoots};
use crate::error::{Error, Result};
use crate::kink::{kink_velocity, KinkProfile, VelocityMode};
use crate::units::PhysicalParams;

/// Minimum number of grid sites.
pub const MIN_GRID: usize = 8;
/// |u| beyond this many well scales counts as a blow-up.
pub const INSTABILITY_FACTOR: f64 = 1e3;
/// Leading fraction of front samples dropped by [`measure_speed`].
pub const TRANSIENT_FRACTION: f64 = 0.2;
/// Samples required after the transient for a speed fit.
pub const MIN_FIT_SAMPLES: usize = 10;
/// Resolution requirement: dx·α·μ must stay below this.
pub const MAX_DX_PER_WIDTH: f64 = 0.2;
/// Fraction of the stability limit used when dt is derived automatically.
pub const AUTO_DT_SAFETY: f64 = 0.9;
/// Steps between blow-up scans inside [`run`].
const STABILITY_CHECK_EVERY: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Boundary {
    /// Ghost sites held at fixed displacements beyond each end.
    Fixed {
        left: f64,
        right: f64,
    },
    Periodic,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChainState {
    pub u: Vec<f64>,
    pub u_dot: Vec<f64>,
    pub t: f64,
    /// Grid spacing (m).
    pub dx: f64,
    /// Lab position of site 0 (m).
    pub x_origin: f64,
    pub params: PhysicalParams,
    pub boundary: Boundary,
}

impl ChainState {
    pub fn new(
        u: Vec<f64>,
        u_dot: Vec<f64>,
        dx: f64,
        params: PhysicalParams,
        boundary: Boundary,
    ) -> Result<Self> {
        params.validate()?;
        if u.len() != u_dot.len() {
            return Err(Error::invalid("u_dot", "length differs from u"));
        }
        if u.len() < MIN_GRID {
            return Err(Error::invalid(
                "N_grid",
                format!("need at least {MIN_GRID} sites"),
            ));
        }
        if !(dx > 0.0 && dx.is_finite()) {
            return Err(Error::invalid("dx", "grid spacing must be positive"));
        }
        if u.iter().chain(&u_dot).any(|v| !v.is_finite()) {
            return Err(Error::invalid("u", "non-finite entry"));
        }
        Ok(ChainState {
            u,
            u_dot,
            t: 0.0,
            dx,
            x_origin: 0.0,
            params,
            boundary,
        })
    }

    /// Every site at rest in the vacuum `root·√(A/B)` (root is a, d or b).
    pub fn uniform(n_grid: usize, dx: f64, params: PhysicalParams, root: f64) -> Result<Self> {
        let value = root * params.well_scale();
        ChainState::new(
            vec![value; n_grid],
            vec![0.0; n_grid],
            dx,
            params,
            Boundary::Fixed {
                left: value,
                right: value,
            },
        )
    }

    pub fn len(&self) -> usize {
        self.u.len()
    }

    pub fn is_empty(&self) -> bool {
        self.u.is_empty()
    }

    pub fn position(&self, n: usize) -> f64 {
        self.x_origin + n as f64 * self.dx
    }

    /// Nearest-neighbour coupling κ = M·v0²/dx² (J/m²).
    pub fn coupling(&self) -> f64 {
        coupling(&self.params, self.dx)
    }

    /// Dimers represented by one grid site.
    pub fn site_weight(&self) -> f64 {
        self.dx / self.params.r0
    }

    fn neighbours(&self, n: usize) -> (f64, f64) {
        let last = self.u.len() - 1;
        match self.boundary {
            Boundary::Periodic => {
                let left = if n == 0 { self.u[last] } else { self.u[n - 1] };
                let right = if n == last { self.u[0] } else { self.u[n + 1] };
                (left, right)
            }
            Boundary::Fixed { left, right } => {
                let l = if n == 0 { left } else { self.u[n - 1] };
                let r = if n == last { right } else { self.u[n + 1] };
                (l, r)
            }
        }
    }
}

fn coupling(params: &PhysicalParams, dx: f64) -> f64 {
    let v0 = params.sound_velocity();
    params.mass * v0 * v0 / (dx * dx)
}

/// Acceleration of site `n`, friction included (m/s²).
pub fn equation_of_motion(state: &ChainState, n: usize) -> f64 {
    let p = &state.params;
    let (left, right) = state.neighbours(n);
    let u = state.u[n];
    let force = state.coupling() * (left + right - 2.0 * u) + p.a * u - p.b * u * u * u
        + p.q * p.e_field
        - p.gamma * state.u_dot[n];
    force / p.mass
}

/// Largest time step accepted by [`step`]: 0.5/ω_max with
/// ω_max² = (4κ + 2A)/M.
pub fn stable_dt_limit(params: &PhysicalParams, dx: f64) -> f64 {
    let omega_max = ((4.0 * coupling(params, dx) + 2.0 * params.a) / params.mass).sqrt();
    0.5 / omega_max
}

pub fn auto_dt(params: &PhysicalParams, dx: f64) -> f64 {
    AUTO_DT_SAFETY * stable_dt_limit(params, dx)
}

/// Conservative acceleration (no friction) of every site into `out`.
fn conservative_accel(state: &ChainState, out: &mut [f64]) {
    let p = &state.params;
    let kappa = state.coupling();
    let drive = p.q * p.e_field;
    let inv_m = 1.0 / p.mass;
    let u = &state.u;
    let n = u.len();
    let (ghost_l, ghost_r) = match state.boundary {
        Boundary::Periodic => (u[n - 1], u[0]),
        Boundary::Fixed { left, right } => (left, right),
    };
    let site = |l: f64, ui: f64, r: f64| {
        (kappa * (l + r - 2.0 * ui) + p.a * ui - p.b * ui * ui * ui + drive) * inv_m
    };
    for (o, w) in out[1..n - 1].iter_mut().zip(u.windows(3)) {
        *o = site(w[0], w[1], w[2]);
    }
    out[0] = site(ghost_l, u[0], u[1]);
    out[n - 1] = site(u[n - 2], u[n - 1], ghost_r);
}

/// Kick-drift-kick integrator with the friction sub-step solved exactly
/// (velocities scaled by exp(−γ·dt/(2M)) on either side). Keeps the
/// conservative acceleration of the current positions cached between steps.
struct Stepper {
    accel: Vec<f64>,
    dt: f64,
    damping: f64,
}

impl Stepper {
    fn new(state: &ChainState, dt: f64) -> Result<Self> {
        let limit = stable_dt_limit(&state.params, state.dx);
        if !(dt > 0.0 && dt < limit) {
            return Err(Error::StepTooLarge { dt, limit });
        }
        let mut accel = vec![0.0; state.len()];
        conservative_accel(state, &mut accel);
        Ok(Stepper {
            accel,
            dt,
            damping: (-state.params.gamma * dt / (2.0 * state.params.mass)).exp(),
        })
    }

    fn advance(&mut self, state: &mut ChainState) -> Result<()> {
        let half = 0.5 * self.dt;
        for (v, a) in state.u_dot.iter_mut().zip(&self.accel) {
            *v = *v * self.damping + half * a;
        }
        for (u, v) in state.u.iter_mut().zip(&state.u_dot) {
            *u += self.dt * v;
        }
        conservative_accel(state, &mut self.accel);
        for (v, a) in state.u_dot.iter_mut().zip(&self.accel) {
            *v = (*v + half * a) * self.damping;
        }
        state.t += self.dt;
        Ok(())
    }
}

fn check_stability(state: &ChainState) -> Result<()> {
    let bound = INSTABILITY_FACTOR * state.params.well_scale();
    for (site, (&u, &v)) in state.u.iter().zip(&state.u_dot).enumerate() {
        if !(u.abs() <= bound) || !v.is_finite() {
            return Err(Error::Instability {
                t: state.t,
                site,
                value: u.abs(),
            });
        }
    }
    Ok(())
}

/// Advances `state` by one step of length `dt` in place.
pub fn step(state: &mut ChainState, dt: f64) -> Result<()> {
    Stepper::new(state, dt)?.advance(state)?;
    check_stability(state)
}

/// Velocity used for co-moving kink initialization: the consistent-mode
/// kink velocity, or zero when the cubic is unforced or friction vanishes
/// (the static profile is then used).
pub fn init_velocity(params: &PhysicalParams, roots: &CubicRoots) -> Result<f64> {
    if params.gamma == 0.0 || roots.sigma == 0.0 {
        return Ok(0.0);
    }
    kink_velocity(params, roots.d, VelocityMode::Consistent)
}

/// Lab-frame samples of the closed-form kink.
struct LabKink {
    profile: KinkProfile,
    alpha: f64,
    scale: f64,
    v: f64,
}

impl LabKink {
    fn new(params: &PhysicalParams, dx: f64, velocity: Option<f64>) -> Result<Self> {
        let roots = solve_force_cubic(params.derive()?.sigma)?;
        let v = match velocity {
            Some(v) => v,
            None => init_velocity(params, &roots)?,
        };
        let alpha = params.derive()?.alpha(v.abs())?;
        let profile = KinkProfile::new(roots);
        let limit = MAX_DX_PER_WIDTH / (alpha * profile.width_rate);
        if dx >= limit {
            return Err(Error::GridTooCoarse { dx, limit });
        }
        Ok(LabKink {
            profile,
            alpha,
            scale: params.well_scale(),
            v,
        })
    }

    /// (u, u̇) at lab position x for a front centred at `center`;
    /// `orientation` −1 mirrors the profile (antikink moving the other way).
    fn sample(&self, x: f64, center: f64, orientation: f64) -> (f64, f64) {
        let xi = orientation * self.alpha * (x - center);
        let u = self.scale * self.profile.value(xi);
        let du_dx = orientation * self.scale * self.alpha * self.profile.derivative(xi);
        (u, -orientation * self.v * du_dx)
    }
}

/// Samples the closed-form kink on `n_grid` sites, u_n = √(A/B)·ψ(α(x_n − center)),
/// moving with u̇ = −v·∂ₓu. Ghost sites sit at the outer roots.
pub fn init_kink(
    params: &PhysicalParams,
    n_grid: usize,
    dx: f64,
    center: f64,
) -> Result<ChainState> {
    init_kink_with_velocity(params, n_grid, dx, center, None)
}

/// As [`init_kink`], with an explicit initial velocity instead of the
/// consistent-mode value.
pub fn init_kink_with_velocity(
    params: &PhysicalParams,
    n_grid: usize,
    dx: f64,
    center: f64,
    velocity: Option<f64>,
) -> Result<ChainState> {
    let kink = LabKink::new(params, dx, velocity)?;
    let (u, u_dot): (Vec<f64>, Vec<f64>) = (0..n_grid)
        .map(|n| kink.sample(n as f64 * dx, center, 1.0))
        .unzip();
    let roots = kink.profile.roots;
    let boundary = Boundary::Fixed {
        left: roots.b * kink.scale,
        right: roots.a * kink.scale,
    };
    ChainState::new(u, u_dot, dx, *params, boundary)
}

/// Kink at `kink_center` and mirrored antikink at `antikink_center` on a
/// periodic grid; the `b` vacuum surrounds an `a` domain between them.
pub fn init_kink_antikink(
    params: &PhysicalParams,
    n_grid: usize,
    dx: f64,
    kink_center: f64,
    antikink_center: f64,
) -> Result<ChainState> {
    let kink = LabKink::new(params, dx, None)?;
    let base = kink.profile.roots.a * kink.scale;
    let (u, u_dot): (Vec<f64>, Vec<f64>) = (0..n_grid)
        .map(|n| {
            let x = n as f64 * dx;
            let (u1, v1) = kink.sample(x, kink_center, 1.0);
            let (u2, v2) = kink.sample(x, antikink_center, -1.0);
            (u1 + u2 - base, v1 + v2)
        })
        .unzip();
    ChainState::new(u, u_dot, dx, *params, Boundary::Periodic)
}

/// Lab positions where u crosses `level·√(A/B)`, linearly interpolated.
pub fn front_positions(state: &ChainState, level: f64) -> Vec<f64> {
    let target = level * state.params.well_scale();
    let n = state.len();
    let pairs = match state.boundary {
        Boundary::Periodic => n,
        Boundary::Fixed { .. } => n - 1,
    };
    let mut out = Vec::new();
    for i in 0..pairs {
        let j = (i + 1) % n;
        let (lo, hi) = (state.u[i] - target, state.u[j] - target);
        // half-open test so a sample exactly on the level counts once
        if (lo > 0.0 && hi <= 0.0) || (lo < 0.0 && hi >= 0.0) {
            out.push(state.position(i) + state.dx * lo / (lo - hi));
        }
    }
    out
}

/// First crossing of u through `level·√(A/B)` (m).
pub fn front_position(state: &ChainState, level: f64) -> Result<f64> {
    front_positions(state, level)
        .first()
        .copied()
        .ok_or(Error::NoCrossing { level })
}

/// Weighted lattice energy (J):
/// Σ w[½Mu̇² − ½Au² + ¼Bu⁴ − qEu] + Σ_bonds w·½κ(Δu)², w = dx/R0.
pub fn total_energy(state: &ChainState) -> f64 {
    let p = &state.params;
    let kappa = state.coupling();
    let drive = p.q * p.e_field;
    let mut sum = 0.0;
    for (&u, &v) in state.u.iter().zip(&state.u_dot) {
        let u2 = u * u;
        sum += 0.5 * p.mass * v * v - 0.5 * p.a * u2 + 0.25 * p.b * u2 * u2 - drive * u;
    }
    let n = state.len();
    let mut bonds = 0.0;
    for w in state.u.windows(2) {
        let du = w[1] - w[0];
        bonds += du * du;
    }
    match state.boundary {
        Boundary::Periodic => {
            let du = state.u[0] - state.u[n - 1];
            bonds += du * du;
        }
        Boundary::Fixed { left, right } => {
            bonds += (state.u[0] - left).powi(2) + (right - state.u[n - 1]).powi(2);
        }
    }
    state.site_weight() * (sum + 0.5 * kappa * bonds)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum InitialCondition {
    /// Single kink; `velocity` overrides the consistent-mode value.
    Kink { center: f64, velocity: Option<f64> },
    /// Kink/antikink pair on a periodic grid.
    KinkAntikink {
        kink_center: f64,
        antikink_center: f64,
    },
    /// Uniform vacuum at the largest root.
    Vacuum,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RunSpec {
    pub n_grid: usize,
    pub dx: f64,
    /// `None` selects [`auto_dt`].
    pub dt: Option<f64>,
    pub initial: InitialCondition,
    pub t_end: f64,
    /// Record a sample every this many steps (the last step is always recorded).
    pub sample_every: usize,
    /// Front level in ψ units; `None` uses the midpoint (a + b)/2.
    pub level: Option<f64>,
}

impl RunSpec {
    pub fn initial_state(&self, params: &PhysicalParams) -> Result<ChainState> {
        match self.initial {
            InitialCondition::Kink { center, velocity } => {
                init_kink_with_velocity(params, self.n_grid, self.dx, center, velocity)
            }
            InitialCondition::KinkAntikink {
                kink_center,
                antikink_center,
            } => init_kink_antikink(params, self.n_grid, self.dx, kink_center, antikink_center),
            InitialCondition::Vacuum => {
                let roots = solve_force_cubic(params.derive()?.sigma)?;
                ChainState::uniform(self.n_grid, self.dx, *params, roots.b)
            }
        }
    }
}

/// One recorded point of a run.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub t: f64,
    /// NaN when no front crossing exists.
    pub front_x: f64,
    pub energy: f64,
    pub state: &'a ChainState,
}

/// Receives samples from the task that owns the running state.
pub trait TrajectorySink {
    fn record(&mut self, sample: &Sample<'_>) -> Result<()>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub front_x: Vec<f64>,
    pub energies: Vec<f64>,
    pub final_state: Option<ChainState>,
}

impl Trajectory {
    pub fn from_samples(times: Vec<f64>, front_x: Vec<f64>) -> Self {
        let energies = vec![f64::NAN; times.len()];
        Trajectory {
            times,
            front_x,
            energies,
            final_state: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest |E − E₀|/|E₀| over the samples.
    pub fn energy_drift(&self) -> f64 {
        let Some(&e0) = self.energies.first() else {
            return 0.0;
        };
        self.energies
            .iter()
            .map(|e| ((e - e0) / e0).abs())
            .fold(0.0, f64::max)
    }
}

impl TrajectorySink for Trajectory {
    fn record(&mut self, sample: &Sample<'_>) -> Result<()> {
        self.times.push(sample.t);
        self.front_x.push(sample.front_x);
        self.energies.push(sample.energy);
        Ok(())
    }
}

/// Runs `spec` from its initial condition, streaming samples to `sink`.
/// Returns the final state.
pub fn run_with_sink(
    params: &PhysicalParams,
    spec: &RunSpec,
    sink: &mut dyn TrajectorySink,
) -> Result<ChainState> {
    if !(spec.t_end >= 0.0 && spec.t_end.is_finite()) {
        return Err(Error::invalid("t_end", "must be finite and non-negative"));
    }
    if spec.sample_every == 0 {
        return Err(Error::invalid("sample_every", "must be at least 1"));
    }
    let mut state = spec.initial_state(params)?;
    let roots = solve_force_cubic(params.derive()?.sigma)?;
    let level = spec.level.unwrap_or(0.5 * (roots.a + roots.b));
    let dt_max = spec.dt.unwrap_or_else(|| auto_dt(params, spec.dx));
    let steps = if spec.t_end == 0.0 {
        0
    } else {
        ((spec.t_end / dt_max - 1e-9).ceil() as usize).max(1)
    };

    let emit = |state: &ChainState, sink: &mut dyn TrajectorySink| {
        sink.record(&Sample {
            t: state.t,
            front_x: front_position(state, level).unwrap_or(f64::NAN),
            energy: total_energy(state),
            state,
        })
    };
    emit(&state, sink)?;
    if steps == 0 {
        return Ok(state);
    }
    let dt = spec.t_end / steps as f64;
    let mut stepper = Stepper::new(&state, dt)?;
    for i in 1..=steps {
        stepper.advance(&mut state)?;
        if i % STABILITY_CHECK_EVERY == 0 || i == steps {
            check_stability(&state)?;
        }
        if i % spec.sample_every == 0 || i == steps {
            emit(&state, sink)?;
        }
    }
    Ok(state)
}

pub fn run(params: &PhysicalParams, spec: &RunSpec) -> Result<Trajectory> {
    let mut traj = Trajectory::from_samples(Vec::new(), Vec::new());
    traj.energies.clear();
    let last = run_with_sink(params, spec, &mut traj)?;
    traj.final_state = Some(last);
    Ok(traj)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpeedFit {
    /// Least-squares slope (m/s).
    pub speed: f64,
    /// Residual standard error of the slope (m/s).
    pub std_error: f64,
    pub intercept: f64,
    pub samples: usize,
}

/// Least-squares front speed after discarding the first
/// [`TRANSIENT_FRACTION`] of the samples.
pub fn measure_speed(trajectory: &Trajectory) -> Result<SpeedFit> {
    let n = trajectory.times.len();
    let skip = (TRANSIENT_FRACTION * n as f64).ceil() as usize;
    let t = &trajectory.times[skip.min(n)..];
    let x = &trajectory.front_x[skip.min(n)..];
    if t.len() < MIN_FIT_SAMPLES {
        return Err(Error::FrontLost(format!(
            "{} samples after transient, need {MIN_FIT_SAMPLES}",
            t.len()
        )));
    }
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::FrontLost(format!("no front at t = {}", t[i])));
    }
    let m = t.len() as f64;
    let t_mean = t.iter().sum::<f64>() / m;
    let x_mean = x.iter().sum::<f64>() / m;
    let (mut stt, mut stx) = (0.0, 0.0);
    for (ti, xi) in t.iter().zip(x) {
        stt += (ti - t_mean) * (ti - t_mean);
        stx += (ti - t_mean) * (xi - x_mean);
    }
    let speed = stx / stt;
    let intercept = x_mean - speed * t_mean;
    let sse: f64 = t
        .iter()
        .zip(x)
        .map(|(ti, xi)| (xi - intercept - speed * ti).powi(2))
        .sum();
    let std_error = (sse / (m - 2.0) / stt).sqrt();
    Ok(SpeedFit {
        speed,
        std_error,
        intercept,
        samples: t.len(),
    })
}
