// SPDX-License-Identifier: Apache-2.0

//! Density-matrix evolution under
//!
//! ```text
//! ∂ₜρ = −(i/ħ)[H, ρ] − Λ[x, [x, ρ]]
//! ```
//!
//! (a Liouville equation with a position-coupling dephasing term, the
//! high-temperature Caldeira–Leggett form), plus order-of-magnitude
//! estimators for the collapse time, the number of coherent tubulins and
//! the length measurability bound.
//!
//! Energies are in eV and times in seconds; ħ restores the units of the
//! natural-unit estimate t ~ M/(E²N).

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::HBAR_EV_S;

pub const HERMITICITY_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;
/// Bound on dt·(‖H‖/ħ + Λ‖x‖²) for the explicit scheme.
pub const STABILITY_LIMIT: f64 = 0.1;
/// Rough count of tubulin dimers in a human brain, for the fraction report.
pub const BRAIN_TUBULIN_COUNT: f64 = 1e19;

const POSITIVITY_CHECK_EVERY: usize = 100;

pub type CMatrix = DMatrix<Complex64>;

fn hermiticity_error(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * Complex64::new(0.5, 0.0)
}

/// Largest |eigenvalue| of a Hermitian matrix.
fn spectral_radius(m: &CMatrix) -> f64 {
    if m.nrows() == 0 {
        return 0.0;
    }
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0f64, |acc, v| acc.max(v.abs()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    entries: CMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(entries: CMatrix) -> Result<Self> {
        if entries.nrows() == 0 || !entries.is_square() {
            return Err(Error::invalid("rho", "must be a non-empty square matrix"));
        }
        let rho = DensityMatrix { entries };
        rho.check(true)?;
        Ok(rho)
    }

    /// Pure state |ψ⟩⟨ψ| from an (unnormalized) amplitude vector.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) {
            return Err(Error::invalid("amplitudes", "zero vector"));
        }
        let n = amplitudes.len();
        let entries = CMatrix::from_fn(n, n, |i, j| {
            amplitudes[i] * amplitudes[j].conj() / (norm * norm)
        });
        Self::new(hermitize(&entries))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        let w = Complex64::new(1.0 / dim as f64, 0.0);
        Self::new(CMatrix::from_diagonal_element(dim, dim, w))
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entry(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    /// Tr ρ².
    pub fn purity(&self) -> f64 {
        // Tr ρ² = Σ|ρ_ij|² for Hermitian ρ
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .fold(f64::INFINITY, |acc, &v| acc.min(v))
    }

    pub fn hermiticity_error(&self) -> f64 {
        hermiticity_error(&self.entries)
    }

    fn check(&self, positivity: bool) -> Result<()> {
        let herm = self.hermiticity_error();
        if !(herm <= HERMITICITY_TOL) {
            return Err(Error::InvariantDrift(format!("hermiticity error {herm:e}")));
        }
        let tr = self.trace();
        if !((tr.re - 1.0).abs() <= TRACE_TOL && tr.im.abs() <= TRACE_TOL) {
            return Err(Error::InvariantDrift(format!("trace {tr}")));
        }
        if positivity {
            let min = self.min_eigenvalue();
            if !(min >= -POSITIVITY_TOL) {
                return Err(Error::InvariantDrift(format!("minimum eigenvalue {min:e}")));
            }
        }
        Ok(())
    }
}

/// Hamiltonian (eV), coupling operator and dephasing rate Λ (1/(s·x²)).
#[derive(Debug, Clone, PartialEq)]
pub struct DephasingSpec {
    pub h: CMatrix,
    pub x_op: CMatrix,
    pub lambda: f64,
}

impl DephasingSpec {
    pub fn new(h: CMatrix, x_op: CMatrix, lambda: f64) -> Result<Self> {
        if !(lambda >= 0.0 && lambda.is_finite()) {
            return Err(Error::invalid("Lambda", "must be finite and non-negative"));
        }
        if !h.is_square() || h.shape() != x_op.shape() {
            return Err(Error::invalid(
                "H",
                "H and x must be square with equal shape",
            ));
        }
        let scale = |m: &CMatrix| m.iter().map(|z| z.norm()).fold(1.0f64, f64::max);
        if hermiticity_error(&h) > HERMITICITY_TOL * scale(&h) {
            return Err(Error::invalid("H", "not Hermitian"));
        }
        if hermiticity_error(&x_op) > HERMITICITY_TOL * scale(&x_op) {
            return Err(Error::invalid("x_op", "not Hermitian"));
        }
        Ok(DephasingSpec { h, x_op, lambda })
    }

    /// Pure dephasing: H = 0, x = diag(positions).
    pub fn pure_dephasing(positions: &[f64], lambda: f64) -> Result<Self> {
        let n = positions.len();
        let x = CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                Complex64::new(positions[i], 0.0)
            } else {
                Complex64::new(0.0, 0.0)
            }
        });
        Self::new(CMatrix::zeros(n, n), x, lambda)
    }

    pub fn dim(&self) -> usize {
        self.h.nrows()
    }

    /// dt·(‖H‖/ħ + Λ‖x‖²).
    pub fn stiffness(&self, dt: f64) -> f64 {
        let x = spectral_radius(&self.x_op);
        dt * (spectral_radius(&self.h) / HBAR_EV_S + self.lambda * x * x)
    }

    /// Right-hand side −(i/ħ)[H, ρ] − Λ[x, [x, ρ]].
    pub fn generator(&self, rho: &CMatrix) -> CMatrix {
        let comm = |a: &CMatrix, b: &CMatrix| a * b - b * a;
        let unitary = comm(&self.h, rho) * Complex64::new(0.0, -1.0 / HBAR_EV_S);
        let inner = comm(&self.x_op, rho);
        unitary - comm(&self.x_op, &inner) * Complex64::new(self.lambda, 0.0)
    }
}

/// Λ giving an off-diagonal e-folding time `t_col` across separation `delta_x`.
pub fn lambda_for_collapse_time(t_col: f64, delta_x: f64) -> Result<f64> {
    positive("t_col", t_col)?;
    positive("delta_x", delta_x)?;
    Ok(1.0 / (t_col * delta_x * delta_x))
}

/// Fourth-order Runge–Kutta in the interaction picture of H: the
/// commutator part is applied exactly through exp(−iH·dt/2ħ), only the
/// dephasing term is integrated. With Λ = 0 each step is exactly unitary.
struct Propagator<'a> {
    spec: &'a DephasingSpec,
    half: CMatrix,
    half_adj: CMatrix,
    dt: f64,
}

impl<'a> Propagator<'a> {
    fn new(spec: &'a DephasingSpec, dt: f64) -> Self {
        let eig = spec.h.clone().symmetric_eigen();
        let phases = eig
            .eigenvalues
            .map(|e| Complex64::from_polar(1.0, -e * 0.5 * dt / HBAR_EV_S));
        let half = &eig.eigenvectors * CMatrix::from_diagonal(&phases) * eig.eigenvectors.adjoint();
        let half_adj = half.adjoint();
        Propagator {
            spec,
            half,
            half_adj,
            dt,
        }
    }

    fn frame(&self, m: &CMatrix) -> CMatrix {
        &self.half * m * &self.half_adj
    }

    fn dephasing(&self, rho: &CMatrix) -> CMatrix {
        if self.spec.lambda == 0.0 {
            return CMatrix::zeros(rho.nrows(), rho.ncols());
        }
        let x = &self.spec.x_op;
        let inner = x * rho - rho * x;
        (x * &inner - &inner * x) * Complex64::new(-self.spec.lambda, 0.0)
    }

    fn step(&self, rho: &CMatrix) -> CMatrix {
        let h = Complex64::new(0.5 * self.dt, 0.0);
        let full = Complex64::new(self.dt, 0.0);
        let rho_i = self.frame(rho);
        let k1 = self.frame(&self.dephasing(rho));
        let k2 = self.dephasing(&(&rho_i + &k1 * h));
        let k3 = self.dephasing(&(&rho_i + &k2 * h));
        let k4 = self.dephasing(&self.frame(&(&rho_i + &k3 * full)));
        let sixth = Complex64::new(self.dt / 6.0, 0.0);
        let mid = &rho_i + (k1 + (k2 + k3) * Complex64::new(2.0, 0.0)) * sixth;
        let next = hermitize(&(self.frame(&mid) + k4 * sixth));
        // the generator is traceless; remove rounding drift from the basis change
        let tr = next.trace().re;
        next / Complex64::new(tr, 0.0)
    }
}

/// Integrates `steps` fixed steps, calling `observer(step, ρ)` after the
/// initial state (step 0) and after every step.
pub fn evolve_with<F>(
    rho0: &DensityMatrix,
    spec: &DephasingSpec,
    dt: f64,
    steps: usize,
    mut observer: F,
) -> Result<DensityMatrix>
where
    F: FnMut(usize, &DensityMatrix),
{
    if rho0.dim() != spec.dim() {
        return Err(Error::invalid("rho", "dimension differs from H"));
    }
    if !(dt > 0.0) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    let stiffness = spec.stiffness(dt);
    if !(stiffness < STABILITY_LIMIT) {
        return Err(Error::StepTooLarge {
            dt,
            limit: dt * STABILITY_LIMIT / stiffness,
        });
    }
    let propagator = Propagator::new(spec, dt);
    let mut rho = rho0.clone();
    observer(0, &rho);
    for i in 1..=steps {
        rho = DensityMatrix {
            entries: propagator.step(&rho.entries),
        };
        rho.check(i % POSITIVITY_CHECK_EVERY == 0 || i == steps)?;
        observer(i, &rho);
    }
    Ok(rho)
}

pub fn evolve(
    rho0: &DensityMatrix,
    spec: &DephasingSpec,
    dt: f64,
    steps: usize,
) -> Result<DensityMatrix> {
    evolve_with(rho0, spec, dt, steps, |_, _| {})
}

/// Sampled |ρ_ij| for a set of index pairs plus purity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecoherenceTrace {
    pub pairs: Vec<(usize, usize)>,
    pub times: Vec<f64>,
    /// `magnitudes[k][s]` is |ρ_ij| for pair k at sample s.
    pub magnitudes: Vec<Vec<f64>>,
    pub purity: Vec<f64>,
}

pub fn trace_evolution(
    rho0: &DensityMatrix,
    spec: &DephasingSpec,
    dt: f64,
    steps: usize,
    sample_every: usize,
    pairs: &[(usize, usize)],
) -> Result<DecoherenceTrace> {
    if sample_every == 0 {
        return Err(Error::invalid("sample_every", "must be at least 1"));
    }
    if let Some(&(i, j)) = pairs
        .iter()
        .find(|(i, j)| *i >= rho0.dim() || *j >= rho0.dim())
    {
        return Err(Error::invalid("pairs", format!("({i},{j}) out of range")));
    }
    let mut trace = DecoherenceTrace {
        pairs: pairs.to_vec(),
        times: Vec::new(),
        magnitudes: vec![Vec::new(); pairs.len()],
        purity: Vec::new(),
    };
    evolve_with(rho0, spec, dt, steps, |step, rho| {
        if step % sample_every == 0 || step == steps {
            trace.times.push(step as f64 * dt);
            for (k, &(i, j)) in pairs.iter().enumerate() {
                trace.magnitudes[k].push(rho.entry(i, j).norm());
            }
            trace.purity.push(rho.purity());
        }
    })?;
    Ok(trace)
}

/// Time at which `magnitudes` first drops below half of its first value,
/// linearly interpolated between samples.
pub fn offdiag_halflife(times: &[f64], magnitudes: &[f64]) -> Result<f64> {
    if times.len() != magnitudes.len() || times.is_empty() {
        return Err(Error::invalid(
            "trace",
            "times and values must be non-empty and equal length",
        ));
    }
    let half = 0.5 * magnitudes[0];
    if !(half > 0.0) {
        return Err(Error::NoDecay);
    }
    for k in 1..times.len() {
        let (prev, cur) = (magnitudes[k - 1], magnitudes[k]);
        if cur < half {
            let frac = (prev - half) / (prev - cur);
            return Ok(times[k - 1] + frac * (times[k] - times[k - 1]));
        }
    }
    Err(Error::NoDecay)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollapseEstimate {
    /// String scale (eV).
    pub m_gus: f64,
    /// Energy stored in the kink (eV).
    pub e_scale: f64,
    /// Number of coherent tubulins.
    pub n: f64,
    /// Collapse time (s).
    pub t_col: f64,
}

impl CollapseEstimate {
    pub fn from_count(m_gus: f64, e_scale: f64, n: f64) -> Result<Self> {
        Ok(CollapseEstimate {
            m_gus,
            e_scale,
            n,
            t_col: collapse_time(m_gus, e_scale, n)?,
        })
    }

    pub fn from_time(m_gus: f64, e_scale: f64, t_col: f64) -> Result<Self> {
        Ok(CollapseEstimate {
            m_gus,
            e_scale,
            n: coherent_tubulins(m_gus, e_scale, t_col)?,
            t_col,
        })
    }

    /// N relative to [`BRAIN_TUBULIN_COUNT`].
    pub fn brain_fraction(&self) -> f64 {
        self.n / BRAIN_TUBULIN_COUNT
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{v} must be positive")))
    }
}

/// t = ħ·M_gus/(E²N) in seconds; M_gus and E in eV.
pub fn collapse_time(m_gus: f64, e_scale: f64, n: f64) -> Result<f64> {
    positive("M_gus", m_gus)?;
    positive("E_scale", e_scale)?;
    positive("N", n)?;
    Ok(HBAR_EV_S * m_gus / (e_scale * e_scale * n))
}

/// N = ħ·M_gus/(E²t).
pub fn coherent_tubulins(m_gus: f64, e_scale: f64, t_col: f64) -> Result<f64> {
    positive("M_gus", m_gus)?;
    positive("E_scale", e_scale)?;
    positive("t_col", t_col)?;
    Ok(HBAR_EV_S * m_gus / (e_scale * e_scale * t_col))
}

/// Minimum resolvable length √(L·L_s).
pub fn measurability_bound(length: f64, string_length: f64) -> Result<f64> {
    positive("L", length)?;
    positive("L_s", string_length)?;
    Ok((length * string_length).sqrt())
}
