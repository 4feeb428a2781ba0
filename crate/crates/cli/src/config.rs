//! Scenario configuration files.
//!
//! A config is a TOML document:
//!
//! ```toml
//! system = "qubit"          # qubit | fock
//! family = "rotations"      # rotations | u2 | displacements | disp_squeeze
//! seed = 0
//! n_max = 120               # optional, fock only
//! budget = 32000            # optional, minimize only
//!
//! [params]
//! beta = 1.0                # inf is accepted
//! omega = 1.0
//! t_abs = 0.5
//! t_phase = 0.0
//! theta_c = 1.5707963267948966
//! phi_c = 0.0
//! alpha_x = 1.5707963267948966
//! alpha_y = 3.141592653589793
//!
//! [[sweep]]
//! parameter = "beta"
//! start = 0.0
//! stop = 5.0
//! count = 51
//! ```
//!
//! `theta_m` and `phi_m` together configure a measurement of the control.
//! Unknown keys and parameters are rejected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SystemKind {
    Qubit,
    Fock,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    Rotations,
    U2,
    Displacements,
    DispSqueeze,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Rotations => "rotations",
            Family::U2 => "u2",
            Family::Displacements => "displacements",
            Family::DispSqueeze => "disp_squeeze",
        }
    }

    pub fn system(self) -> SystemKind {
        match self {
            Family::Rotations | Family::U2 => SystemKind::Qubit,
            Family::Displacements | Family::DispSqueeze => SystemKind::Fock,
        }
    }

    /// Parameters that must be given (or swept).
    pub fn required(self) -> &'static [&'static str] {
        match self {
            Family::Rotations => &["alpha_x", "alpha_y"],
            Family::U2 => &[],
            Family::Displacements => &["alpha1_abs", "alpha1_phase", "alpha2_abs", "alpha2_phase"],
            Family::DispSqueeze => &["alpha_abs", "alpha_phase", "z_abs", "z_phase"],
        }
    }

    /// Parameters that default to zero.
    pub fn optional(self) -> &'static [&'static str] {
        match self {
            Family::U2 => &[
                "u1_alpha",
                "u1_lambda",
                "u1_gamma",
                "u1_delta",
                "u2_alpha",
                "u2_lambda",
                "u2_gamma",
                "u2_delta",
            ],
            _ => &[],
        }
    }
}

pub const COMMON: [&str; 6] = ["beta", "omega", "t_abs", "t_phase", "theta_c", "phi_c"];
pub const MEASUREMENT: [&str; 2] = ["theta_m", "phi_m"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepAxis {
    pub parameter: String,
    pub start: f64,
    pub stop: f64,
    pub count: usize,
}

impl SweepAxis {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.start];
        }
        let step = (self.stop - self.start) / (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.stop
                } else {
                    self.start + step * i as f64
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub system: SystemKind,
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<usize>,
    pub params: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweep: Vec<SweepAxis>,
}

impl ScenarioConfig {
    /// Parses and validates.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn has_measurement(&self) -> bool {
        MEASUREMENT.iter().any(|k| self.is_set(k))
    }

    fn is_set(&self, name: &str) -> bool {
        self.params.contains_key(name) || self.sweep.iter().any(|a| a.parameter == name)
    }

    /// Every parameter name this config may set.
    pub fn known_parameters(&self) -> Vec<&'static str> {
        let mut names: Vec<&'static str> = COMMON.to_vec();
        names.extend(MEASUREMENT);
        names.extend(self.family.required());
        names.extend(self.family.optional());
        names
    }

    pub fn validate(&self) -> Result<()> {
        if self.family.system() != self.system {
            return Err(CliError::field(
                "family",
                format!(
                    "family `{}` requires system `{:?}`",
                    self.family.name(),
                    self.family.system()
                )
                .to_lowercase(),
            ));
        }
        if self.n_max.is_some() && self.system == SystemKind::Qubit {
            return Err(CliError::field(
                "n_max",
                "only meaningful for the fock system",
            ));
        }
        let known = self.known_parameters();
        for (name, value) in &self.params {
            if !known.contains(&name.as_str()) {
                return Err(CliError::field(
                    format!("params.{name}"),
                    format!("unknown parameter for family `{}`", self.family.name()),
                ));
            }
            if value.is_nan() || (value.is_infinite() && name != "beta") {
                return Err(CliError::field(format!("params.{name}"), "must be finite"));
            }
        }
        if self.sweep.len() > 2 {
            return Err(CliError::field("sweep", "at most 2 sweep axes are allowed"));
        }
        for (i, axis) in self.sweep.iter().enumerate() {
            let field = format!("sweep[{i}]");
            if !known.contains(&axis.parameter.as_str()) {
                return Err(CliError::field(
                    format!("{field}.parameter"),
                    format!(
                        "`{}` is not a parameter of family `{}`",
                        axis.parameter,
                        self.family.name()
                    ),
                ));
            }
            if self.sweep[..i]
                .iter()
                .any(|a| a.parameter == axis.parameter)
            {
                return Err(CliError::field(
                    format!("{field}.parameter"),
                    "axis repeated",
                ));
            }
            if axis.count == 0 {
                return Err(CliError::field(
                    format!("{field}.count"),
                    "must be at least 1",
                ));
            }
            if !axis.start.is_finite() || !axis.stop.is_finite() {
                return Err(CliError::field(field, "start and stop must be finite"));
            }
        }
        for name in COMMON.iter().chain(self.family.required()) {
            if !self.is_set(name) {
                return Err(CliError::field(format!("params.{name}"), "missing"));
            }
        }
        if self.has_measurement() {
            for name in MEASUREMENT {
                if !self.is_set(name) {
                    return Err(CliError::field(
                        format!("params.{name}"),
                        "theta_m and phi_m must be given together",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Row-major grid: the first axis varies slowest.
    pub fn grid(&self) -> Vec<BTreeMap<String, f64>> {
        let mut base = self.params.clone();
        for name in self.family.optional() {
            base.entry((*name).to_string()).or_insert(0.0);
        }
        let mut points = vec![base];
        for axis in &self.sweep {
            let values = axis.values();
            points = points
                .into_iter()
                .flat_map(|p| {
                    values.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.insert(axis.parameter.clone(), v);
                        q
                    })
                })
                .collect();
        }
        points
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ROTATIONS: &str = r#"
system = "qubit"
family = "rotations"
seed = 3

[params]
beta = inf
omega = 1.0
t_abs = 0.5
t_phase = 0.0
theta_c = 1.5707963267948966
phi_c = 0.0
alpha_x = 1.5707963267948966
alpha_y = 3.141592653589793

[[sweep]]
parameter = "t_abs"
start = 0.0
stop = 1.0
count = 3
"#;

    #[test]
    fn round_trip() {
        let cfg = ScenarioConfig::parse(ROTATIONS).unwrap();
        let again = ScenarioConfig::parse(&cfg.to_toml().unwrap()).unwrap();
        assert_eq!(cfg, again);
        assert!(cfg.params["beta"].is_infinite());
    }

    #[test]
    fn unknown_keys_rejected() {
        let typo = ROTATIONS.replace("seed = 3", "seed = 3\nsed = 4");
        assert!(matches!(
            ScenarioConfig::parse(&typo),
            Err(CliError::Parse(_))
        ));
        let bad = ROTATIONS.replace("alpha_y =", "alpha_z =");
        let err = ScenarioConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("params.alpha_z"), "{err}");
    }

    #[test]
    fn sweep_rules() {
        let bad = ROTATIONS.replace("parameter = \"t_abs\"", "parameter = \"z_abs\"");
        let err = ScenarioConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("sweep[0].parameter"), "{err}");
        let axis = "\n[[sweep]]\nparameter = \"beta\"\nstart = 0.0\nstop = 1.0\ncount = 2\n";
        let three = format!("{ROTATIONS}{axis}{}", axis.replace("beta", "omega"));
        assert!(ScenarioConfig::parse(&three).is_err());
    }

    #[test]
    fn grid_is_row_major() {
        let two = format!(
            "{ROTATIONS}\n[[sweep]]\nparameter = \"beta\"\nstart = 1.0\nstop = 2.0\ncount = 2\n"
        );
        let cfg = ScenarioConfig::parse(&two).unwrap();
        let g = cfg.grid();
        assert_eq!(g.len(), 6);
        assert_eq!((g[0]["t_abs"], g[0]["beta"]), (0.0, 1.0));
        assert_eq!((g[1]["t_abs"], g[1]["beta"]), (0.0, 2.0));
        assert_eq!((g[5]["t_abs"], g[5]["beta"]), (1.0, 2.0));
    }

    #[test]
    fn family_must_match_system() {
        let bad = ROTATIONS.replace("\"qubit\"", "\"fock\"");
        let err = ScenarioConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("family"), "{err}");
    }

    #[test]
    fn measurement_needs_both_angles() {
        let bad = ROTATIONS.replace("phi_c = 0.0", "phi_c = 0.0\ntheta_m = 1.0");
        let err = ScenarioConfig::parse(&bad).unwrap_err().to_string();
        assert!(err.contains("phi_m"), "{err}");
    }
}
