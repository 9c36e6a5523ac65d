// SPDX-License-Identifier: Apache-2.0

//! Closed-form traveling kink of ψ'' + ρψ' − ψ³ + ψ + σ = 0 together with
//! its velocity, energy and effective mass.
//!
//! The profile is the logistic front
//! `ψ(ξ) = a + (b − a) / (1 + exp((b − a)(ξ − ξ₀)/√2))`, which solves the
//! traveling-wave equation exactly when ρ = (a + b − 2d)/√2.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::cubic::CubicRoots;
use crate::error::{Error, Result};
use crate::units::{PhysicalParams, JOULE_PER_EV};

/// Logistic exponents beyond this magnitude saturate to the limit values.
pub const EXPONENT_SATURATION: f64 = 700.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinkProfile {
    pub roots: CubicRoots,
    /// μ = (b − a)/√2.
    pub width_rate: f64,
    /// ξ₀.
    pub center: f64,
    /// The friction for which the profile is an exact solution.
    pub rho_consistent: f64,
}

/// Logistic weights (f, 1 − f) with f = 1/(1 + eᶻ), evaluated without overflow.
fn logistic(z: f64) -> (f64, f64) {
    if z > EXPONENT_SATURATION {
        (0.0, 1.0)
    } else if z < -EXPONENT_SATURATION {
        (1.0, 0.0)
    } else if z >= 0.0 {
        let e = (-z).exp();
        (e / (1.0 + e), 1.0 / (1.0 + e))
    } else {
        let e = z.exp();
        (1.0 / (1.0 + e), e / (1.0 + e))
    }
}

impl KinkProfile {
    pub fn new(roots: CubicRoots) -> Self {
        Self::with_center(roots, 0.0)
    }

    pub fn with_center(roots: CubicRoots, center: f64) -> Self {
        KinkProfile {
            roots,
            width_rate: (roots.b - roots.a) / SQRT_2,
            center,
            rho_consistent: (roots.a + roots.b - 2.0 * roots.d) / SQRT_2,
        }
    }

    fn weights(&self, xi: f64) -> (f64, f64) {
        logistic(self.width_rate * (xi - self.center))
    }

    /// ψ(ξ).
    pub fn value(&self, xi: f64) -> f64 {
        let (f, g) = self.weights(xi);
        if g == 0.0 {
            return self.roots.b;
        }
        self.roots.a + (self.roots.b - self.roots.a) * f
    }

    /// dψ/dξ in closed form.
    pub fn derivative(&self, xi: f64) -> f64 {
        let (f, g) = self.weights(xi);
        -(self.roots.b - self.roots.a) * self.width_rate * f * g
    }

    /// d²ψ/dξ² in closed form.
    pub fn second_derivative(&self, xi: f64) -> f64 {
        let (f, g) = self.weights(xi);
        let mu = self.width_rate;
        (self.roots.b - self.roots.a) * mu * mu * f * g * (g - f)
    }
}

pub fn kink_value(profile: &KinkProfile, xi: f64) -> f64 {
    profile.value(xi)
}

/// ψ'' + ρψ' − ψ³ + ψ + σ evaluated on the closed-form profile.
pub fn ode_residual(profile: &KinkProfile, rho: f64, sigma: f64, xi: f64) -> f64 {
    let psi = profile.value(xi);
    profile.second_derivative(xi) + rho * profile.derivative(xi) - psi * psi * psi + psi + sigma
}

/// Which velocity law to use.
///
/// `Paper` is the printed formula with M·v0² under the friction term.
/// `Consistent` uses M·|A|, the value for which the closed-form profile
/// actually solves the traveling-wave equation. They agree only when
/// |A| = v0² numerically in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum VelocityMode {
    Paper,
    #[default]
    Consistent,
}

impl FromStr for VelocityMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "paper" => Ok(VelocityMode::Paper),
            "consistent" => Ok(VelocityMode::Consistent),
            other => Err(Error::invalid(
                "mode",
                format!("unknown velocity mode '{other}'"),
            )),
        }
    }
}

impl fmt::Display for VelocityMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VelocityMode::Paper => "paper",
            VelocityMode::Consistent => "consistent",
        })
    }
}

pub fn kink_velocity(params: &PhysicalParams, d: f64, mode: VelocityMode) -> Result<f64> {
    let derived = params.derive()?;
    let v0 = derived.v0;
    if params.gamma == 0.0 {
        return Ok(v0);
    }
    if d == 0.0 || !d.is_finite() {
        return Err(Error::NoPropagatingKink);
    }
    let stiffness = match mode {
        VelocityMode::Paper => params.mass * v0 * v0,
        VelocityMode::Consistent => {
            if d * derived.sigma > 0.0 {
                return Err(Error::SignMismatch {
                    d,
                    sigma: derived.sigma,
                });
            }
            params.mass * params.a.abs()
        }
    };
    let friction = 2.0 * params.gamma * params.gamma / (9.0 * d * d * stiffness);
    Ok(v0 / (1.0 + friction).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KinkEnergetics {
    /// Binding plus resonant-transfer energy (J).
    #[serde(rename = "Delta")]
    pub delta: f64,
    /// ½M*v² (J).
    pub kinetic: f64,
    /// Δ + ½M*v² (J).
    pub total: f64,
    /// Effective mass (kg).
    #[serde(rename = "M_star")]
    pub m_star: f64,
    /// Kink velocity (m/s).
    pub v: f64,
}

impl KinkEnergetics {
    pub fn delta_ev(&self) -> f64 {
        self.delta / JOULE_PER_EV
    }
}

pub fn kink_energetics(params: &PhysicalParams, v: f64) -> Result<KinkEnergetics> {
    let derived = params.derive()?;
    let alpha = derived.alpha(v)?;
    let (m, a, b) = (params.mass, params.a, params.b);
    let delta = (2.0 * SQRT_2 / 3.0) * a * a / b + (SQRT_2 / 3.0) * params.k_stiff * a / b;
    let m_star = 4.0 / (3.0 * SQRT_2) * m * a * alpha / (params.r0 * b);
    let kinetic = 0.5 * m_star * v * v;
    Ok(KinkEnergetics {
        delta,
        kinetic,
        total: delta + kinetic,
        m_star,
        v,
    })
}

/// Time for a kink at speed `v` to cross a length `length`.
pub fn transfer_time(length: f64, v: f64) -> Result<f64> {
    if !(length > 0.0) {
        return Err(Error::invalid("L", "length must be positive"));
    }
    if !(v > 0.0) {
        return Err(Error::invalid("v", "velocity must be positive"));
    }
    Ok(length / v)
}
