//! JSON scenario files.
//!
//! ```json
//! {
//!   "topology": "semi_infinite",
//!   "order": "second",
//!   "g1": 1.0,
//!   "g2": 0.5,
//!   "excitation": { "type": "multi_site", "sites": [{ "site": 10 }, { "site": 25 }] },
//!   "z_max": 10.0,
//!   "z_steps": 400,
//!   "window": [0, 100],
//!   "format": "csv",
//!   "mode": "closed_form"
//! }
//! ```

use std::path::Path;

use num_complex::Complex64;
use serde::Deserialize;
use waveguide_core::oracle::DEFAULT_DZ;
use waveguide_core::{CouplingConfig, Excitation, NeighborOrder, Topology};

use crate::CliError;

/// Default pass threshold on `max_abs_error` in compare mode.
pub const DEFAULT_COMPARE_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TopologySpec {
    Infinite,
    SemiInfinite,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderSpec {
    First,
    Second,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    #[default]
    ClosedForm,
    Oracle,
    Compare,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexSpec {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SiteSpec {
    pub site: i64,
    #[serde(default = "unit")]
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

fn unit() -> f64 {
    1.0
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExcitationSpec {
    SingleSite { site: i64 },
    MultiSite { sites: Vec<SiteSpec> },
    Coherent { alphas: Vec<ComplexSpec> },
}

/// Scenario file as written by the user.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub topology: TopologySpec,
    pub order: OrderSpec,
    pub g1: f64,
    #[serde(default)]
    pub g2: f64,
    pub excitation: ExcitationSpec,
    pub z_max: f64,
    #[serde(default = "default_z_steps")]
    pub z_steps: usize,
    pub window: [i64; 2],
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default)]
    pub oracle_dz: Option<f64>,
    /// Compare-mode pass threshold on the maximum deviation.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

fn default_z_steps() -> usize {
    400
}

/// Validated scenario, ready to run.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub coupling: CouplingConfig,
    pub excitation: Excitation,
    pub z_grid: Vec<f64>,
    pub window: (i64, i64),
    pub format: OutputFormat,
    pub mode: Mode,
    pub oracle_dz: f64,
    pub tolerance: f64,
    pub warnings: Vec<String>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<Scenario, CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if !(self.g1 > 0.0) || !self.g1.is_finite() {
            return bad(format!("g1 must be positive, got {}", self.g1));
        }
        if !(self.g2 >= 0.0) || !self.g2.is_finite() {
            return bad(format!("g2 must be non-negative, got {}", self.g2));
        }
        if !(self.z_max > 0.0) || !self.z_max.is_finite() {
            return bad(format!("z_max must be positive, got {}", self.z_max));
        }
        if self.z_steps < 2 {
            return bad(format!("z_steps must be at least 2, got {}", self.z_steps));
        }
        let [j_min, j_max] = self.window;
        if j_min > j_max {
            return bad(format!("window [{j_min}, {j_max}] is empty"));
        }
        let topology = match self.topology {
            TopologySpec::Infinite => Topology::Infinite,
            TopologySpec::SemiInfinite => Topology::SemiInfinite,
        };
        if topology == Topology::SemiInfinite && j_min < 0 {
            return bad(format!(
                "window [{j_min}, {j_max}] reaches below the edge j = 0"
            ));
        }
        let order = match self.order {
            OrderSpec::First => NeighborOrder::First,
            OrderSpec::Second => NeighborOrder::Second,
        };
        let coupling = CouplingConfig::new(topology, order, self.g1, self.g2)?;
        let excitation = match &self.excitation {
            ExcitationSpec::SingleSite { site } => Excitation::SingleSite(*site),
            ExcitationSpec::MultiSite { sites } => Excitation::MultiSite(
                sites
                    .iter()
                    .map(|s| (s.site, Complex64::new(s.re, s.im)))
                    .collect(),
            ),
            ExcitationSpec::Coherent { alphas } => {
                Excitation::Coherent(alphas.iter().map(|a| Complex64::new(a.re, a.im)).collect())
            }
        };
        excitation.validate(topology)?;
        let oracle_dz = self.oracle_dz.unwrap_or(DEFAULT_DZ);
        if !(oracle_dz > 0.0) || !oracle_dz.is_finite() {
            return bad(format!("oracle_dz must be positive, got {oracle_dz}"));
        }
        let tolerance = self.tolerance.unwrap_or(DEFAULT_COMPARE_TOL);
        if !(tolerance > 0.0) {
            return bad(format!("tolerance must be positive, got {tolerance}"));
        }
        let last = (self.z_steps - 1) as f64;
        let z_grid = (0..self.z_steps)
            .map(|i| self.z_max * i as f64 / last)
            .collect();
        let mut warnings = Vec::new();
        if self.g2 >= self.g1 {
            warnings.push(format!(
                "g2 = {} is not smaller than g1 = {}; couplings usually fall off with distance",
                self.g2, self.g1
            ));
        }
        Ok(Scenario {
            name: self.name.clone().unwrap_or_else(|| "scenario".into()),
            coupling,
            excitation,
            z_grid,
            window: (j_min, j_max),
            format: self.format,
            mode: self.mode,
            oracle_dz,
            tolerance,
            warnings,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "topology": "infinite", "order": "second", "g1": 1.0, "g2": 0.5,
        "excitation": {"type": "single_site", "site": 0},
        "z_max": 10.0, "window": [-80, 80]
    }"#;

    fn with(key: &str, value: &str) -> String {
        let mut v: serde_json::Value = serde_json::from_str(BASE).unwrap();
        v[key] = serde_json::from_str(value).unwrap();
        v.to_string()
    }

    fn validate(text: &str) -> Result<Scenario, CliError> {
        ScenarioConfig::from_json(text)?.validate()
    }

    #[test]
    fn defaults() {
        let s = validate(BASE).unwrap();
        assert_eq!(s.z_grid.len(), 400);
        assert_eq!(s.z_grid[0], 0.0);
        assert_eq!(*s.z_grid.last().unwrap(), 10.0);
        assert_eq!(s.mode, Mode::ClosedForm);
        assert_eq!(s.format, OutputFormat::Csv);
        assert_eq!(s.oracle_dz, 1e-3);
        assert!(s.warnings.is_empty());
    }

    #[test]
    fn rejects_invalid_values() {
        for (key, value) in [
            ("g1", "0.0"),
            ("g1", "-1.0"),
            ("g2", "-0.1"),
            ("z_max", "0.0"),
            ("z_steps", "1"),
            ("window", "[5, 4]"),
            ("oracle_dz", "0.0"),
            ("tolerance", "-1.0"),
            ("order", "\"first\""),
            (
                "excitation",
                r#"{"type": "coherent", "alphas": [{"re": 2.0}]}"#,
            ),
        ] {
            let err = validate(&with(key, value)).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{key} = {value}: {err}");
        }
        assert!(validate(&with("unknown", "1")).is_err());
        assert!(validate("{").is_err());
    }

    #[test]
    fn semi_infinite_window_must_start_at_edge() {
        let mut text = with("topology", "\"semi_infinite\"");
        assert!(validate(&text).is_err());
        text = text.replace("[-80,80]", "[0,80]");
        assert!(validate(&text).is_ok());
    }

    #[test]
    fn strong_second_neighbor_warns() {
        let s = validate(&with("g2", "1.5")).unwrap();
        assert_eq!(s.warnings.len(), 1);
    }

    #[test]
    fn excitation_forms() {
        let s = validate(&with(
            "excitation",
            r#"{"type": "multi_site", "sites": [{"site": -15}, {"site": 15, "re": 0.0, "im": 2.0}]}"#,
        ))
        .unwrap();
        assert_eq!(
            s.excitation,
            Excitation::MultiSite(vec![
                (-15, Complex64::new(1.0, 0.0)),
                (15, Complex64::new(0.0, 2.0))
            ])
        );
    }
}
