// SPDX-License-Identifier: Apache-2.0

//! Physical parameters of one protofilament chain, derived quantities,
//! energy-unit conversion and the named preset registry.
//!
//! Everything is SI internally. Energies in eV or GeV are only accepted at
//! the boundary through [`convert_energy`].

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Elementary charge (C), exact SI value.
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;
/// Joules per electronvolt.
pub const JOULE_PER_EV: f64 = ELEMENTARY_CHARGE;
/// Reduced Planck constant in eV·s (CODATA 2018).
pub const HBAR_EV_S: f64 = 6.582_119_569e-16;
/// Mobile charge of one dimer: 18 × 2e.
pub const MOBILE_CHARGE: f64 = 36.0 * ELEMENTARY_CHARGE;
/// Temperature-law constant used when A is supplied directly (J/(m²·K)).
pub const DEFAULT_C_TEMP: f64 = 1.0;

/// Dimensional constants of one chain. Field names on the wire match the
/// key=value preset files and the JSON form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams {
    /// Mass per dimer (kg).
    #[serde(rename = "M")]
    pub mass: f64,
    /// Quadratic coefficient of the double well (J/m²).
    #[serde(rename = "A")]
    pub a: f64,
    /// Quartic coefficient (J/m⁴).
    #[serde(rename = "B")]
    pub b: f64,
    /// Longitudinal stiffness (J/m²).
    pub k_stiff: f64,
    /// Equilibrium dimer spacing (m).
    #[serde(rename = "R0")]
    pub r0: f64,
    /// Friction coefficient (kg/s).
    pub gamma: f64,
    /// Mobile charge (C).
    pub q: f64,
    /// Electric field (V/m).
    #[serde(rename = "E_field")]
    pub e_field: f64,
    /// Temperature (K).
    #[serde(rename = "T")]
    pub temperature: f64,
    /// Critical temperature (K).
    #[serde(rename = "Tc")]
    pub t_critical: f64,
    /// Magnitude of the temperature-law constant (J/(m²·K)).
    #[serde(default = "default_c_temp")]
    pub c_temp: f64,
}

fn default_c_temp() -> f64 {
    DEFAULT_C_TEMP
}

impl PhysicalParams {
    /// Checks every invariant of the record.
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("M", self.mass),
            ("A", self.a),
            ("B", self.b),
            ("k_stiff", self.k_stiff),
            ("R0", self.r0),
            ("gamma", self.gamma),
            ("q", self.q),
            ("E_field", self.e_field),
            ("T", self.temperature),
            ("Tc", self.t_critical),
            ("c_temp", self.c_temp),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(Error::invalid(name, format!("{value} is not finite")));
            }
        }
        positive("M", self.mass)?;
        positive("B", self.b)?;
        positive("k_stiff", self.k_stiff)?;
        positive("R0", self.r0)?;
        positive("Tc", self.t_critical)?;
        positive("c_temp", self.c_temp)?;
        if self.gamma < 0.0 {
            return Err(Error::invalid("gamma", "friction must be non-negative"));
        }
        if self.a <= 0.0 {
            return Err(Error::NotDoubleWell {
                a: self.a,
                t: self.temperature,
                tc: self.t_critical,
            });
        }
        Ok(())
    }

    /// Builds a record whose A follows the linear temperature law
    /// `A = c_temp·(Tc − T)`. `rest` supplies every other field.
    pub fn from_temperature(c_temp: f64, t: f64, tc: f64, rest: PhysicalParams) -> Result<Self> {
        positive("Tc", tc)?;
        positive("c_temp", c_temp)?;
        if t >= tc {
            return Err(Error::NotDoubleWell {
                a: c_temp * (tc - t),
                t,
                tc,
            });
        }
        let params = PhysicalParams {
            a: c_temp * (tc - t),
            temperature: t,
            t_critical: tc,
            c_temp,
            ..rest
        };
        params.validate()?;
        Ok(params)
    }

    /// Sound velocity √(k/M)·R0 (m/s).
    pub fn sound_velocity(&self) -> f64 {
        (self.k_stiff / self.mass).sqrt() * self.r0
    }

    /// Dimensionless forcing σ = q·√B·|A|^(−3/2)·E.
    pub fn sigma(&self) -> f64 {
        self.q * self.b.sqrt() * self.a.abs().powf(-1.5) * self.e_field
    }

    /// Displacement scale √(A/B) of the double-well minima (m).
    pub fn well_scale(&self) -> f64 {
        (self.a.abs() / self.b).sqrt()
    }

    pub fn derive(&self) -> Result<DerivedQuantities> {
        self.validate()?;
        Ok(DerivedQuantities {
            v0: self.sound_velocity(),
            sigma: self.sigma(),
            mass: self.mass,
            a_abs: self.a.abs(),
            gamma: self.gamma,
        })
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        PhysicalParams { gamma, ..self }
    }

    pub fn with_e_field(self, e_field: f64) -> Self {
        PhysicalParams { e_field, ..self }
    }

    /// Applies a single `key = value` override using the wire field names.
    pub fn set_field(&mut self, key: &str, value: f64) -> Result<()> {
        let slot = match key {
            "M" => &mut self.mass,
            "A" => &mut self.a,
            "B" => &mut self.b,
            "k_stiff" => &mut self.k_stiff,
            "R0" => &mut self.r0,
            "gamma" => &mut self.gamma,
            "q" => &mut self.q,
            "E_field" => &mut self.e_field,
            "T" => &mut self.temperature,
            "Tc" => &mut self.t_critical,
            "c_temp" => &mut self.c_temp,
            _ => {
                return Err(Error::Parse {
                    line: 0,
                    reason: format!("unknown parameter '{key}'"),
                })
            }
        };
        *slot = value;
        Ok(())
    }

    /// Serializes to the key=value text form, one field per line.
    pub fn to_key_value(&self) -> String {
        let mut out = String::new();
        for (k, v) in self.entries() {
            out.push_str(&format!("{k} = {v:e}\n"));
        }
        out
    }

    fn entries(&self) -> [(&'static str, f64); 11] {
        [
            ("M", self.mass),
            ("A", self.a),
            ("B", self.b),
            ("k_stiff", self.k_stiff),
            ("R0", self.r0),
            ("gamma", self.gamma),
            ("q", self.q),
            ("E_field", self.e_field),
            ("T", self.temperature),
            ("Tc", self.t_critical),
            ("c_temp", self.c_temp),
        ]
    }

    /// Parses the key=value text form. `#` starts a comment; blank lines are
    /// skipped. Every field except `c_temp` is required.
    pub fn from_key_value(text: &str) -> Result<Self> {
        let map = parse_key_value(text)?;
        let mut params = PhysicalParams {
            c_temp: DEFAULT_C_TEMP,
            ..PhysicalParams::nan()
        };
        for (key, (line, raw)) in &map {
            let value: f64 = raw.parse().map_err(|_| Error::Parse {
                line: *line,
                reason: format!("'{raw}' is not a number"),
            })?;
            params.set_field(key, value).map_err(|_| Error::Parse {
                line: *line,
                reason: format!("unknown parameter '{key}'"),
            })?;
        }
        if let Some((name, _)) = params.entries().into_iter().find(|(_, v)| v.is_nan()) {
            return Err(Error::Parse {
                line: 0,
                reason: format!("missing parameter '{name}'"),
            });
        }
        params.validate()?;
        Ok(params)
    }

    fn nan() -> Self {
        PhysicalParams {
            mass: f64::NAN,
            a: f64::NAN,
            b: f64::NAN,
            k_stiff: f64::NAN,
            r0: f64::NAN,
            gamma: f64::NAN,
            q: f64::NAN,
            e_field: f64::NAN,
            temperature: f64::NAN,
            t_critical: f64::NAN,
            c_temp: f64::NAN,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let params: PhysicalParams = serde_json::from_str(text).map_err(|e| Error::Parse {
            line: e.line(),
            reason: e.to_string(),
        })?;
        params.validate()?;
        Ok(params)
    }

    /// Reads a preset file, choosing the format from the extension
    /// (`.json` is JSON, anything else key=value).
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        if path.extension().is_some_and(|e| e == "json") {
            Self::from_json(&text)
        } else {
            Self::from_key_value(&text)
        }
    }
}

/// Splits key=value text into a map of key → (line number, raw value).
/// Shared with the CLI's run-config reader.
pub fn parse_key_value(text: &str) -> Result<BTreeMap<String, (usize, String)>> {
    let mut map = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| Error::Parse {
            line,
            reason: format!("expected key = value, got '{content}'"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                line,
                reason: "empty key".into(),
            });
        }
        if map
            .insert(key.to_string(), (line, value.trim().to_string()))
            .is_some()
        {
            return Err(Error::Parse {
                line,
                reason: format!("duplicate key '{key}'"),
            });
        }
    }
    Ok(map)
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, format!("{value} must be positive")))
    }
}

/// Quantities derived from a validated [`PhysicalParams`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedQuantities {
    /// Sound velocity (m/s).
    pub v0: f64,
    /// Dimensionless forcing.
    pub sigma: f64,
    mass: f64,
    a_abs: f64,
    gamma: f64,
}

impl DerivedQuantities {
    fn check_velocity(&self, v: f64) -> Result<()> {
        if !(v >= 0.0 && v < self.v0) {
            return Err(Error::VelocityOutOfRange { v, v0: self.v0 });
        }
        Ok(())
    }

    /// Inverse width α(v) = √(|A| / (M(v0² − v²))) in 1/m.
    pub fn alpha(&self, v: f64) -> Result<f64> {
        self.check_velocity(v)?;
        Ok((self.a_abs / (self.mass * (self.v0 * self.v0 - v * v))).sqrt())
    }

    /// Traveling-frame friction ρ(v) = γv·[M|A|(v0² − v²)]^(−1/2).
    pub fn rho(&self, v: f64) -> Result<f64> {
        self.check_velocity(v)?;
        Ok(self.gamma * v / (self.mass * self.a_abs * (self.v0 * self.v0 - v * v)).sqrt())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnergyUnit {
    Joule,
    ElectronVolt,
    GigaElectronVolt,
}

impl EnergyUnit {
    fn in_joules(self) -> f64 {
        match self {
            EnergyUnit::Joule => 1.0,
            EnergyUnit::ElectronVolt => JOULE_PER_EV,
            EnergyUnit::GigaElectronVolt => 1e9 * JOULE_PER_EV,
        }
    }
}

impl FromStr for EnergyUnit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "J" => Ok(EnergyUnit::Joule),
            "eV" => Ok(EnergyUnit::ElectronVolt),
            "GeV" => Ok(EnergyUnit::GigaElectronVolt),
            other => Err(Error::UnknownUnit(other.to_string())),
        }
    }
}

impl fmt::Display for EnergyUnit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EnergyUnit::Joule => "J",
            EnergyUnit::ElectronVolt => "eV",
            EnergyUnit::GigaElectronVolt => "GeV",
        })
    }
}

pub fn convert_energy(value: f64, from: EnergyUnit, to: EnergyUnit) -> f64 {
    if from == to {
        return value;
    }
    // eV <-> GeV is an exact power of ten; avoid going through joules.
    match (from, to) {
        (EnergyUnit::ElectronVolt, EnergyUnit::GigaElectronVolt) => value * 1e-9,
        (EnergyUnit::GigaElectronVolt, EnergyUnit::ElectronVolt) => value * 1e9,
        _ => value * from.in_joules() / to.in_joules(),
    }
}

/// String-tagged variant of [`convert_energy`].
pub fn convert_energy_str(value: f64, from: &str, to: &str) -> Result<f64> {
    Ok(convert_energy(value, from.parse()?, to.parse()?))
}

/// Names of the built-in presets.
pub const PRESET_NAMES: [&str; 3] = ["paper", "zero-friction", "strong-field"];

/// The "paper" preset. Values come from `scripts/fit_paper_preset.py`
/// (rounded to six significant digits) and are mirrored in
/// `presets/paper.conf`.
pub fn paper_preset() -> PhysicalParams {
    let a = 1.0e6;
    PhysicalParams {
        mass: 1.2248e-20,
        a,
        b: 1.20774e34,
        k_stiff: 4.10275e9,
        r0: 1.72784e-12,
        gamma: 3.52164e-7,
        q: MOBILE_CHARGE,
        e_field: 4.73284e6,
        temperature: 300.0,
        t_critical: 301.0,
        c_temp: a,
    }
}

pub fn load_preset(name: &str) -> Result<PhysicalParams> {
    let paper = paper_preset();
    match name {
        "paper" => Ok(paper),
        "zero-friction" => Ok(paper.with_gamma(0.0)),
        "strong-field" => Ok(paper.with_e_field(100.0 * paper.e_field)),
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Looks `name` up among the built-ins, then as `<dir>/<name>.conf` or
/// `<dir>/<name>.json` in each directory in order.
pub fn load_preset_from_dirs<P: AsRef<Path>>(name: &str, dirs: &[P]) -> Result<PhysicalParams> {
    if let Ok(p) = load_preset(name) {
        return Ok(p);
    }
    for dir in dirs {
        for ext in ["conf", "json"] {
            let path = dir.as_ref().join(format!("{name}.{ext}"));
            if path.is_file() {
                return PhysicalParams::from_file(&path);
            }
        }
    }
    Err(Error::UnknownPreset(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_params() -> PhysicalParams {
        PhysicalParams {
            mass: 1.0,
            a: 1.0,
            b: 1.0,
            k_stiff: 1e6,
            r0: 1e-3,
            gamma: 0.5,
            q: 1.0,
            e_field: 0.1,
            temperature: 300.0,
            t_critical: 301.0,
            c_temp: 1.0,
        }
    }

    #[test]
    fn temperature_law() {
        let p = PhysicalParams::from_temperature(2.5, 299.0, 300.0, unit_params()).unwrap();
        assert_relative_eq!(p.a, 2.5);
        assert_eq!(p.temperature, 299.0);
        assert_eq!(p.gamma, 0.5);

        let err = PhysicalParams::from_temperature(2.5, 300.0, 300.0, unit_params()).unwrap_err();
        assert!(matches!(err, Error::NotDoubleWell { .. }));
        assert!(PhysicalParams::from_temperature(2.5, 310.0, 300.0, unit_params()).is_err());
    }

    #[test]
    fn sound_velocity_direct() {
        let d = unit_params().derive().unwrap();
        assert_relative_eq!(d.v0, 1.0, max_relative = 1e-15);
        let d = unit_params().with_e_field(0.0).derive().unwrap();
        assert_eq!(d.sigma, 0.0);
    }

    #[test]
    fn rho_at_rest_and_domain() {
        let d = unit_params().derive().unwrap();
        assert_eq!(d.rho(0.0).unwrap(), 0.0);
        assert!(d.rho(1.0).is_err());
        assert!(d.alpha(-0.1).is_err());
    }

    #[test]
    fn alpha_identity() {
        let p = unit_params();
        let d = p.derive().unwrap();
        for i in 0..50 {
            let v = d.v0 * i as f64 / 51.0;
            let alpha = d.alpha(v).unwrap();
            let lhs = alpha * alpha * p.mass * (d.v0 * d.v0 - v * v);
            assert_relative_eq!(lhs, p.a, max_relative = 1e-12);
        }
    }

    #[test]
    fn rho_increasing_and_divergent() {
        let d = unit_params().derive().unwrap();
        let mut prev = -1.0;
        for i in 0..1000 {
            let v = d.v0 * i as f64 / 1000.0;
            let rho = d.rho(v).unwrap();
            assert!(rho > prev);
            prev = rho;
        }
        assert!(d.rho(d.v0 * (1.0 - 1e-12)).unwrap() > 1e5);
    }

    #[test]
    fn sigma_linear_in_field_and_charge() {
        let p = unit_params();
        let s = p.sigma();
        assert_relative_eq!(
            p.with_e_field(3.0 * p.e_field).sigma(),
            3.0 * s,
            max_relative = 1e-14
        );
        let mut p2 = p;
        p2.q *= -2.0;
        assert_relative_eq!(p2.sigma(), -2.0 * s, max_relative = 1e-14);
    }

    #[test]
    fn energy_conversion() {
        use EnergyUnit::*;
        assert_eq!(convert_energy(1.0, ElectronVolt, Joule), 1.602176634e-19);
        assert_eq!(convert_energy(1e18, GigaElectronVolt, ElectronVolt), 1e27);
        assert_eq!(convert_energy(1.0, ElectronVolt, ElectronVolt), 1.0);
        for (from, to) in [
            (Joule, GigaElectronVolt),
            (ElectronVolt, Joule),
            (GigaElectronVolt, Joule),
        ] {
            let x = 3.7e-3;
            let back = convert_energy(convert_energy(x, from, to), to, from);
            assert_relative_eq!(back, x, max_relative = 1e-12);
        }
        assert!(matches!(
            convert_energy_str(1.0, "erg", "J"),
            Err(Error::UnknownUnit(_))
        ));
    }

    #[test]
    fn presets() {
        let paper = load_preset("paper").unwrap();
        paper.validate().unwrap();
        let v0 = paper.sound_velocity();
        assert!((v0 / 1e3 - 1.0).abs() < 1e-3);
        assert_eq!(paper.q, 36.0 * ELEMENTARY_CHARGE);
        assert_relative_eq!(
            paper.c_temp * (paper.t_critical - paper.temperature),
            paper.a
        );

        let zf = load_preset("zero-friction").unwrap();
        assert_eq!(zf, paper.with_gamma(0.0));
        let sf = load_preset("strong-field").unwrap();
        assert_relative_eq!(sf.sigma(), 100.0 * paper.sigma(), max_relative = 1e-14);
        assert!(matches!(load_preset("nope"), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn key_value_and_json_agree() {
        let p = paper_preset();
        let kv = PhysicalParams::from_key_value(&p.to_key_value()).unwrap();
        assert_eq!(kv, p);
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(PhysicalParams::from_json(&json).unwrap(), p);
    }

    #[test]
    fn key_value_errors() {
        let err = PhysicalParams::from_key_value("M = 1\nA 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = PhysicalParams::from_key_value("M = x\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }));
        assert!(PhysicalParams::from_key_value("M = 1\nM = 2\n").is_err());
        // missing fields
        assert!(PhysicalParams::from_key_value("# only a comment\nM = 1\n").is_err());
    }

    #[test]
    fn invariant_violations() {
        let mut p = unit_params();
        p.b = -1.0;
        assert!(p.validate().is_err());
        let mut p = unit_params();
        p.gamma = -1.0;
        assert!(p.validate().is_err());
        let mut p = unit_params();
        p.mass = f64::NAN;
        assert!(p.validate().is_err());
        let mut p = unit_params();
        p.a = 0.0;
        assert!(matches!(p.validate(), Err(Error::NotDoubleWell { .. })));
    }
}
