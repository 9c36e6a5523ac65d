// SPDX-License-Identifier: Apache-2.0

//! Real roots of the normalized force cubic ψ³ − ψ − σ.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::units::PhysicalParams;

/// Distance from σ_c inside which the roots are treated as merged.
pub const REGIME_MARGIN: f64 = 1e-9;

/// Ordered real roots `a ≤ d ≤ b` of ψ³ − ψ − σ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CubicRoots {
    /// Smallest root.
    pub a: f64,
    /// Middle root.
    pub d: f64,
    /// Largest root.
    pub b: f64,
    pub sigma: f64,
}

impl CubicRoots {
    pub fn as_array(&self) -> [f64; 3] {
        [self.a, self.d, self.b]
    }
}

/// σ_c = 2/(3√3): the forcing at which two roots merge.
pub fn critical_sigma() -> f64 {
    2.0 / (3.0 * 3f64.sqrt())
}

fn cubic(psi: f64, sigma: f64) -> f64 {
    psi * psi * psi - psi - sigma
}

fn newton(psi: f64, sigma: f64) -> f64 {
    let slope = 3.0 * psi * psi - 1.0;
    if slope == 0.0 {
        return psi;
    }
    let next = psi - cubic(psi, sigma) / slope;
    if next.is_finite() && cubic(next, sigma).abs() <= cubic(psi, sigma).abs() {
        next
    } else {
        psi
    }
}

/// The single real root when |σ| > σ_c (hyperbolic form of the depressed cubic).
fn lone_root(sigma: f64) -> f64 {
    let ratio = (sigma.abs() / critical_sigma()).max(1.0);
    let root = sigma.signum() * 2.0 / 3f64.sqrt() * (ratio.acosh() / 3.0).cosh();
    newton(root, sigma)
}

pub fn solve_force_cubic(sigma: f64) -> Result<CubicRoots> {
    let critical = critical_sigma();
    if !sigma.is_finite() {
        return Err(Error::invalid("sigma", "must be finite"));
    }
    if sigma.abs() >= critical - REGIME_MARGIN {
        return Err(Error::KinkRegimeLost {
            sigma,
            critical,
            lone_root: lone_root(sigma),
        });
    }
    // Trigonometric form: ψ_k = (2/√3)·cos(θ/3 − 2πk/3), cos θ = σ/σ_c.
    let theta = (sigma / critical).acos();
    let scale = 2.0 / 3f64.sqrt();
    let mut roots = [0, 1, 2].map(|k| {
        let psi = scale * (theta / 3.0 - 2.0 * PI * k as f64 / 3.0).cos();
        newton(psi, sigma)
    });
    roots.sort_by(f64::total_cmp);
    Ok(CubicRoots {
        a: roots[0],
        d: roots[1],
        b: roots[2],
        sigma,
    })
}

pub fn roots_from_params(params: &PhysicalParams) -> Result<CubicRoots> {
    solve_force_cubic(params.derive()?.sigma)
}
