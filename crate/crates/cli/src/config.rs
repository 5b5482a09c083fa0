//! Run configuration, temperature grids and the figure presets.

use std::fmt;
use std::path::Path;

use mfspin_core::{FockPolicy, LorentzianBath, PvQuadratureSettings, Topology};
use serde::{Deserialize, Serialize};

/// Invalid run configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid configuration: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Engine {
    /// Quantum mean force (exact diagonalisation).
    Qmf,
    /// Quantum Gibbs state of the bare spin.
    Qg,
    /// Classical mean force.
    Cmf,
    /// Classical Gibbs state.
    Cg,
    /// First-order weak-coupling expansion.
    Weak,
}

impl Engine {
    pub fn label(self) -> &'static str {
        match self {
            Engine::Qmf => "qmf",
            Engine::Qg => "qg",
            Engine::Cmf => "cmf",
            Engine::Cg => "cg",
            Engine::Weak => "weak",
        }
    }

    /// Row label; the weak engine at `t = 0` uses the closed form.
    pub fn row_label(self, t: f64) -> &'static str {
        if self == Engine::Weak && t == 0.0 {
            "weak_t0"
        } else {
            self.label()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Spacing {
    #[default]
    Linear,
    Log,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TemperatureGrid {
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        count: usize,
        #[serde(default)]
        spacing: Spacing,
    },
}

impl TemperatureGrid {
    pub fn points(&self) -> Result<Vec<f64>, ConfigError> {
        let pts = match self {
            TemperatureGrid::List(v) => v.clone(),
            &TemperatureGrid::Range {
                start,
                stop,
                count,
                spacing,
            } => {
                if count == 0 {
                    return Err(invalid("temperature grid count must be positive"));
                }
                if count == 1 {
                    vec![start]
                } else {
                    let last = (count - 1) as f64;
                    match spacing {
                        Spacing::Linear => (0..count)
                            .map(|i| {
                                if i + 1 == count {
                                    stop
                                } else {
                                    start + (stop - start) * i as f64 / last
                                }
                            })
                            .collect(),
                        Spacing::Log => {
                            if !(start > 0.0) {
                                return Err(invalid("log-spaced grids need start > 0"));
                            }
                            let (a, b) = (start.ln(), stop.ln());
                            (0..count)
                                .map(|i| match i {
                                    0 => start,
                                    _ if i + 1 == count => stop,
                                    _ => (a + (b - a) * i as f64 / last).exp(),
                                })
                                .collect()
                        }
                    }
                }
            }
        };
        if pts.is_empty() {
            return Err(invalid("temperature grid is empty"));
        }
        if pts.iter().any(|t| !t.is_finite() || *t < 0.0) {
            return Err(invalid("temperatures must be finite and >= 0"));
        }
        if pts.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("temperature grid must be strictly increasing"));
        }
        Ok(pts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

fn default_lambda_cut() -> f64 {
    1e10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub topology: Topology,
    pub alpha: f64,
    pub omega0: f64,
    pub gamma: f64,
    #[serde(default = "default_lambda_cut")]
    pub lambda_cut: f64,
    pub temperatures: TemperatureGrid,
    pub engines: Vec<Engine>,
    /// Defaults to the per-topology policy.
    #[serde(default)]
    pub fock: Option<FockPolicy>,
    #[serde(default)]
    pub quadrature: PvQuadratureSettings,
    /// Output path without extension.
    pub output: String,
    #[serde(default)]
    pub format: OutputFormat,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|e| invalid(e.to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn bath(&self) -> Result<LorentzianBath, ConfigError> {
        LorentzianBath::new(self.omega0, self.gamma, self.alpha, self.lambda_cut)
            .map_err(|e| invalid(e.to_string()))
    }

    pub fn fock_policy(&self) -> FockPolicy {
        self.fock
            .unwrap_or_else(|| FockPolicy::for_topology(self.topology))
    }

    /// Copy with every defaulted field written out.
    pub fn resolved(&self) -> Self {
        Self {
            fock: Some(self.fock_policy()),
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bath = self.bath()?;
        self.temperatures.points()?;
        if self.engines.is_empty() {
            return Err(invalid("at least one engine is required"));
        }
        let mut seen = self.engines.clone();
        seen.sort();
        seen.dedup();
        if seen.len() != self.engines.len() {
            return Err(invalid("engines must not repeat"));
        }
        if self.output.trim().is_empty() {
            return Err(invalid("output path is empty"));
        }
        if self.engines.contains(&Engine::Qmf) {
            self.fock_policy()
                .validate(self.topology)
                .map_err(|e| invalid(e.to_string()))?;
        }
        if self.engines.contains(&Engine::Weak) {
            if self.topology != Topology::ThreeBath {
                return Err(invalid(
                    "the weak-coupling engine covers the three-bath model only",
                ));
            }
            self.quadrature
                .validate(&bath)
                .map_err(|e| invalid(e.to_string()))?;
        }
        Ok(())
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }
}

pub const PRESET_NAMES: [&str; 4] = ["fig2a", "fig2b", "fig3", "fig4"];

/// Figure-reproduction configurations: `t ∈ [0, 3]` on 61 points,
/// `Ω = 2`, `Γ = 0.6`, `α = 10` (`α = 0.1` for fig4).
pub fn preset(name: &str) -> Option<RunConfig> {
    let (topology, alpha, engines) = match name {
        "fig2a" => (Topology::ThreeBath, 10.0, vec![Engine::Qmf, Engine::Qg]),
        "fig2b" => (Topology::SingleBath, 10.0, vec![Engine::Qmf, Engine::Qg]),
        "fig3" => (
            Topology::ThreeBath,
            10.0,
            vec![Engine::Qmf, Engine::Qg, Engine::Cmf, Engine::Cg],
        ),
        "fig4" => (
            Topology::ThreeBath,
            0.1,
            vec![Engine::Qmf, Engine::Qg, Engine::Weak],
        ),
        _ => return None,
    };
    Some(RunConfig {
        topology,
        alpha,
        omega0: 2.0,
        gamma: 0.6,
        lambda_cut: 1e10,
        temperatures: TemperatureGrid::Range {
            start: 0.0,
            stop: 3.0,
            count: 61,
            spacing: Spacing::Linear,
        },
        engines,
        fock: None,
        quadrature: PvQuadratureSettings::default(),
        output: name.to_string(),
        format: OutputFormat::Csv,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_grid_hits_both_ends() {
        let g = TemperatureGrid::Range {
            start: 0.0,
            stop: 3.0,
            count: 61,
            spacing: Spacing::Linear,
        };
        let p = g.points().unwrap();
        assert_eq!(p.len(), 61);
        assert_eq!((p[0], p[60]), (0.0, 3.0));
        assert!((p[20] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn log_grid() {
        let g = TemperatureGrid::Range {
            start: 0.05,
            stop: 5.0,
            count: 21,
            spacing: Spacing::Log,
        };
        let p = g.points().unwrap();
        assert_eq!((p[0], p[20]), (0.05, 5.0));
        assert!((p[10] - 0.5).abs() < 1e-12);
        let bad = TemperatureGrid::Range {
            start: 0.0,
            stop: 1.0,
            count: 3,
            spacing: Spacing::Log,
        };
        assert!(bad.points().is_err());
    }

    #[test]
    fn grids_must_increase() {
        assert!(TemperatureGrid::List(vec![]).points().is_err());
        assert!(TemperatureGrid::List(vec![1.0, 1.0]).points().is_err());
        assert!(TemperatureGrid::List(vec![-1.0]).points().is_err());
        assert!(TemperatureGrid::List(vec![0.0, 0.5]).points().is_ok());
    }

    #[test]
    fn config_parses_both_grid_forms() {
        let c = RunConfig::from_json(
            r#"{"topology":"three_bath","alpha":10,"omega0":2,"gamma":0.6,
                "temperatures":[0.5],"engines":["qg"],"output":"x"}"#,
        )
        .unwrap();
        assert_eq!(c.lambda_cut, 1e10);
        c.validate().unwrap();
        let c = RunConfig::from_json(
            r#"{"topology":"single","alpha":0,"omega0":2,"gamma":0.6,
                "temperatures":{"start":0,"stop":1,"count":3},"engines":["qmf","cg"],"output":"x"}"#,
        )
        .unwrap();
        assert_eq!(c.temperatures.points().unwrap(), vec![0.0, 0.5, 1.0]);
    }

    #[test]
    fn validation_rejects_bad_configs() {
        let base = preset("fig2a").unwrap();
        assert!(base.validate().is_ok());
        assert!(RunConfig {
            engines: vec![],
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            engines: vec![Engine::Qg, Engine::Qg],
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            omega0: 0.0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            alpha: -1.0,
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig {
            topology: Topology::SingleBath,
            engines: vec![Engine::Weak],
            ..base.clone()
        }
        .validate()
        .is_err());
        assert!(RunConfig::from_json(r#"{"topology":"three_bath"}"#).is_err());
    }

    #[test]
    fn resolved_config_round_trips() {
        for name in PRESET_NAMES {
            let c = preset(name).unwrap().resolved();
            let back = RunConfig::from_json(&c.to_json_pretty()).unwrap();
            assert_eq!(back, c);
        }
    }
}
