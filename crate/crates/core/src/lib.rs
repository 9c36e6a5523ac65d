// SPDX-License-Identifier: Apache-2.0

//! Numerical toolkit for the microtubule dimer-chain kink model.
//!
//! - [`units`]: chain parameters, derived quantities, unit conversion, presets
//! - [`cubic`]: real roots of the force cubic ψ³ − ψ − σ
//! - [`kink`]: closed-form kink profile, velocity, energy, effective mass
//! - [`chain`]: lattice integrator for the damped, driven chain
//! - [`string_map`]: central-charge and boost diagnostics
//! - [`decoherence`]: dephasing density-matrix evolution and collapse estimates

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
pub mod chain;
pub mod cubic;
pub mod decoherence;
pub mod error;
pub mod kink;
pub mod string_map;
pub mod units;

pub use cubic::{critical_sigma, roots_from_params, solve_force_cubic, CubicRoots};
pub use error::{Error, Result};
pub use kink::{KinkEnergetics, KinkProfile, VelocityMode};
pub use units::{load_preset, PhysicalParams};
