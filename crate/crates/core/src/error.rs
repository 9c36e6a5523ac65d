// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("potential not double-well: A = {a} must be positive (T = {t} K, Tc = {tc} K)")]
    NotDoubleWell { a: f64, t: f64, tc: f64 },

    #[error(
        "kink regime lost: |sigma| = {sigma} >= critical {critical}; lone real root {lone_root}"
    )]
    KinkRegimeLost {
        sigma: f64,
        critical: f64,
        lone_root: f64,
    },

    #[error("no propagating kink: middle root d = 0 with gamma > 0")]
    NoPropagatingKink,

    #[error("middle root d = {d} has sign inconsistent with sigma = {sigma}")]
    SignMismatch { d: f64, sigma: f64 },

    #[error("velocity {v} m/s outside [0, v0 = {v0}) m/s")]
    VelocityOutOfRange { v: f64, v0: f64 },

    #[error("unknown energy unit '{0}' (expected J, eV or GeV)")]
    UnknownUnit(String),

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("grid too coarse: dx = {dx} m must be below {limit} m to resolve the kink")]
    GridTooCoarse { dx: f64, limit: f64 },

    #[error("time step {dt} s violates stability bound {limit} s")]
    StepTooLarge { dt: f64, limit: f64 },

    #[error("numerical instability at t = {t} s: |u| = {value} at site {site}")]
    Instability { t: f64, site: usize, value: f64 },

    #[error("no front crossing found at level {level}")]
    NoCrossing { level: f64 },

    #[error("front lost: {0}")]
    FrontLost(String),

    #[error("entry never decays below half its initial magnitude")]
    NoDecay,

    #[error("density matrix invariant drift: {0}")]
    InvariantDrift(String),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Exit-code class: 2 validation, 3 regime, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::KinkRegimeLost { .. }
            | Error::NoPropagatingKink
            | Error::SignMismatch { .. } => 3,
            Error::Instability { .. }
            | Error::NoCrossing { .. }
            | Error::FrontLost(_)
            | Error::NoDecay
            | Error::InvariantDrift(_)
            | Error::StepTooLarge { .. } => 4,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
