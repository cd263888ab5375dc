//! Physical and protocol parameters of the repeater setup.
//!
//! Units: distances in km, times in seconds, rates per second. Every
//! probability is dimensionless. The speed of light is a constant and is not
//! part of the configuration.
//!
//! Configuration files are UTF-8 text with one `key = value` pair per line.
//! Blank lines and `#` comments are ignored. Keys are the field names listed
//! in [`ExperimentParams::FIELD_NAMES`]; absent keys keep their default.

use std::fmt;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Speed of light in vacuum, km per second.
pub const SPEED_OF_LIGHT_KM_PER_S: f64 = 299_792.458;

/// Measurement setup and post-processing used for the key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProtocolKind {
    /// Fully asymmetric BB84, active basis choice, one-way post-processing.
    #[serde(rename = "bb84")]
    Bb84Active,
    /// Symmetric six-state, passive basis choice, advantage distillation.
    #[serde(rename = "six_state")]
    SixStatePassive,
}

impl ProtocolKind {
    pub const ALL: [ProtocolKind; 2] = [ProtocolKind::Bb84Active, ProtocolKind::SixStatePassive];

    /// Number of single-photon detectors in the measurement setup.
    pub fn detector_count(self) -> i32 {
        match self {
            ProtocolKind::Bb84Active => 2,
            ProtocolKind::SixStatePassive => 6,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::Bb84Active => "bb84",
            ProtocolKind::SixStatePassive => "six_state",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for ProtocolKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "bb84" | "bb84_active" => Ok(ProtocolKind::Bb84Active),
            "six_state" | "six-state" | "sixstate" | "six_state_passive" => {
                Ok(ProtocolKind::SixStatePassive)
            }
            other => Err(format!("unknown protocol '{other}' (expected bb84 or six_state)")),
        }
    }
}

/// Which end of the repeater a link connects to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    Alice,
    Bob,
}

/// The full hardware and protocol parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentParams {
    /// Dephasing per attempt.
    pub a0: f64,
    /// Dephasing per second of storage.
    pub a1: f64,
    /// Depolarisation per attempt.
    pub b0: f64,
    /// Depolarisation per second of storage.
    pub b1: f64,
    /// Memory-photon entanglement preparation time, s.
    pub t_prep: f64,
    /// Depolarising parameter of gates and measurements.
    #[serde(rename = "F_gm")]
    pub f_gm: f64,
    /// Dephasing parameter of the memory-photon state preparation.
    #[serde(rename = "F_prep")]
    pub f_prep: f64,
    pub p_em: f64,
    pub p_ps: f64,
    pub p_det: f64,
    pub p_bsm: f64,
    /// Detector dark counts per second.
    pub dark_rate: f64,
    /// Detection window, s.
    pub t_int: f64,
    /// Fibre attenuation length, km.
    #[serde(rename = "L0")]
    pub l0: f64,
    /// Refractive index of the fibre.
    pub n_ri: f64,
    /// Alice-Bob distance, km.
    #[serde(rename = "L_total")]
    pub l_total: f64,
    /// Alice-repeater distance, km.
    #[serde(rename = "L_A")]
    pub l_a: f64,
    /// Frequency-conversion efficiency folded into the emission probability.
    pub conversion_eff: f64,
}

impl Default for ExperimentParams {
    fn default() -> Self {
        default_expected_params()
    }
}

/// The "expected parameters" of the nitrogen-vacancy platform, with the
/// repeater half-way across a 9.6 L0 link.
pub fn default_expected_params() -> ExperimentParams {
    let l0 = 0.542;
    let l_total = 9.6 * l0;
    ExperimentParams {
        a0: 1.0 / 2000.0,
        a1: 1.0 / 3.0,
        b0: 1.0 / 5000.0,
        b1: 1.0 / 3.0,
        t_prep: 6e-6,
        f_gm: 0.9,
        f_prep: 0.99,
        p_em: 0.49,
        p_ps: 0.46,
        p_det: 0.8,
        p_bsm: 1.0,
        dark_rate: 10.0,
        t_int: 30e-9,
        l0,
        n_ri: 1.44,
        l_total,
        l_a: l_total / 2.0,
        conversion_eff: 1.0,
    }
}

impl ExperimentParams {
    /// Configuration keys, in file order.
    pub const FIELD_NAMES: [&'static str; 18] = [
        "a0",
        "a1",
        "b0",
        "b1",
        "t_prep",
        "F_gm",
        "F_prep",
        "p_em",
        "p_ps",
        "p_det",
        "p_bsm",
        "dark_rate",
        "t_int",
        "L0",
        "n_ri",
        "L_total",
        "L_A",
        "conversion_eff",
    ];

    /// Apparatus efficiency `p_em * p_det`, including frequency conversion.
    pub fn p_app(&self) -> f64 {
        self.p_em * self.p_det * self.conversion_eff
    }

    /// Emission probability after frequency conversion.
    pub fn effective_p_em(&self) -> f64 {
        self.p_em * self.conversion_eff
    }

    /// Mean thermal photons per detection window.
    pub fn n_bar(&self) -> f64 {
        self.dark_rate * self.t_int
    }

    /// Repeater-Bob distance, km.
    pub fn l_b(&self) -> f64 {
        self.l_total - self.l_a
    }

    /// Places the repeater half-way across `l_total` km.
    pub fn with_midpoint_distance(mut self, l_total: f64) -> Self {
        self.l_total = l_total;
        self.l_a = l_total / 2.0;
        self
    }

    pub fn get(&self, key: &str) -> Option<f64> {
        Some(match key {
            "a0" => self.a0,
            "a1" => self.a1,
            "b0" => self.b0,
            "b1" => self.b1,
            "t_prep" => self.t_prep,
            "F_gm" => self.f_gm,
            "F_prep" => self.f_prep,
            "p_em" => self.p_em,
            "p_ps" => self.p_ps,
            "p_det" => self.p_det,
            "p_bsm" => self.p_bsm,
            "dark_rate" => self.dark_rate,
            "t_int" => self.t_int,
            "L0" => self.l0,
            "n_ri" => self.n_ri,
            "L_total" => self.l_total,
            "L_A" => self.l_a,
            "conversion_eff" => self.conversion_eff,
            _ => return None,
        })
    }

    pub fn set(&mut self, key: &str, value: f64) -> Result<(), ConfigError> {
        let slot = match key {
            "a0" => &mut self.a0,
            "a1" => &mut self.a1,
            "b0" => &mut self.b0,
            "b1" => &mut self.b1,
            "t_prep" => &mut self.t_prep,
            "F_gm" => &mut self.f_gm,
            "F_prep" => &mut self.f_prep,
            "p_em" => &mut self.p_em,
            "p_ps" => &mut self.p_ps,
            "p_det" => &mut self.p_det,
            "p_bsm" => &mut self.p_bsm,
            "dark_rate" => &mut self.dark_rate,
            "t_int" => &mut self.t_int,
            "L0" => &mut self.l0,
            "n_ri" => &mut self.n_ri,
            "L_total" => &mut self.l_total,
            "L_A" => &mut self.l_a,
            "conversion_eff" => &mut self.conversion_eff,
            "c" => return Err(ConfigError::FixedConstant),
            _ => return Err(ConfigError::UnknownKey(key.to_string())),
        };
        *slot = value;
        Ok(())
    }

    /// Applies one `key = value` (or `key=value`) assignment.
    pub fn apply_assignment(&mut self, assignment: &str) -> Result<(), ConfigError> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| ConfigError::Syntax {
                line: 0,
                text: assignment.to_string(),
            })?;
        let key = key.trim();
        let value = value.trim();
        let parsed = value
            .parse::<f64>()
            .map_err(|_| ConfigError::InvalidNumber {
                key: key.to_string(),
                value: value.to_string(),
            })?;
        self.set(key, parsed)
    }

    /// Parses a configuration file body on top of the expected parameters.
    pub fn from_config_str(text: &str) -> Result<Self, ConfigError> {
        Self::default().merge_config_str(text)
    }

    /// Parses a configuration body, overriding fields of `self`.
    pub fn merge_config_str(mut self, text: &str) -> Result<Self, ConfigError> {
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            if !line.contains('=') {
                return Err(ConfigError::Syntax {
                    line: idx + 1,
                    text: raw.to_string(),
                });
            }
            self.apply_assignment(line).map_err(|e| match e {
                ConfigError::Syntax { text, .. } => ConfigError::Syntax {
                    line: idx + 1,
                    text,
                },
                other => other,
            })?;
        }
        Ok(self)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            reason: source.to_string(),
        })?;
        Self::from_config_str(&text)
    }

    /// Serialises every field; floats use the shortest representation that
    /// parses back to the same value.
    pub fn to_config_string(&self) -> String {
        let mut out = String::from("# seqrep experiment parameters (km, s, 1/s)\n");
        for key in Self::FIELD_NAMES {
            let value = self.get(key).expect("known field");
            out.push_str(&format!("{key} = {value:?}\n"));
        }
        out
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), ConfigError> {
        let path = path.as_ref();
        fs::write(path, self.to_config_string()).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            reason: source.to_string(),
        })
    }

    /// Checks every invariant. Hard violations make the set unusable; the
    /// warning flags the `eta_B >= eta_A` requirement of the analytic yield
    /// bounds.
    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();

        for key in Self::FIELD_NAMES {
            let v = self.get(key).expect("known field");
            if !v.is_finite() {
                report.error(key, format!("must be finite (got {v})"));
            }
        }

        for key in ["p_em", "p_ps", "p_det", "p_bsm", "conversion_eff"] {
            let v = self.get(key).expect("known field");
            if !(0.0..=1.0).contains(&v) {
                report.error(key, format!("probability must lie in [0, 1] (got {v})"));
            }
        }
        for key in ["a0", "a1", "b0", "b1", "t_prep", "dark_rate", "t_int", "L_total", "L_A"] {
            let v = self.get(key).expect("known field");
            if v < 0.0 {
                report.error(key, format!("must be non-negative (got {v})"));
            }
        }
        if !(self.f_gm > 0.0 && self.f_gm <= 1.0) {
            report.error("F_gm", format!("must lie in (0, 1] (got {})", self.f_gm));
        }
        if !(self.f_prep > 0.5 && self.f_prep <= 1.0) {
            report.error("F_prep", format!("must lie in (1/2, 1] (got {})", self.f_prep));
        }
        if self.l0 <= 0.0 {
            report.error("L0", format!("attenuation length must be positive (got {})", self.l0));
        }
        if self.n_ri <= 0.0 {
            report.error("n_ri", format!("refractive index must be positive (got {})", self.n_ri));
        }
        if self.l_a > self.l_total {
            report.error(
                "L_A",
                format!("must not exceed L_total = {} (got {})", self.l_total, self.l_a),
            );
        }
        let p_app = self.p_app();
        if !(0.0..=1.0).contains(&p_app) {
            report.error("p_em", format!("p_app = p_em*p_det*conversion_eff = {p_app} outside [0, 1]"));
        }

        if report.errors.is_empty() && self.l_a < self.l_b() {
            report.warn(
                "L_A",
                format!(
                    "repeater is closer to Alice (L_A = {} km < L_B = {} km): eta_B < eta_A, \
                     p_B >= p_A may fail and the analytic yield bounds will refuse",
                    self.l_a,
                    self.l_b()
                ),
            );
        }
        report
    }
}

/// One invariant violation, naming the offending field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub field: String,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub errors: Vec<Violation>,
    pub warnings: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }

    pub fn is_clean(&self) -> bool {
        self.errors.is_empty() && self.warnings.is_empty()
    }

    fn error(&mut self, field: &str, message: String) {
        self.errors.push(Violation {
            field: field.to_string(),
            message,
        });
    }

    fn warn(&mut self, field: &str, message: String) {
        self.warnings.push(Violation {
            field: field.to_string(),
            message,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {reason}")]
    Io { path: String, reason: String },
    #[error("line {line}: expected `key = value`, got '{text}'")]
    Syntax { line: usize, text: String },
    #[error("unknown parameter '{0}'")]
    UnknownKey(String),
    #[error("the speed of light is fixed at {SPEED_OF_LIGHT_KM_PER_S} km/s and cannot be configured")]
    FixedConstant,
    #[error("parameter '{key}': '{value}' is not a number")]
    InvalidNumber { key: String, value: String },
}
