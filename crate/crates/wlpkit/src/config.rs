//! JSON run configuration.
//!
//! A config names a preset, spells out the geometry records, or both (explicit
//! records replace the preset's). Unknown fields are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use wlpkit_core::geometry::{CpwGeometry, Dof, PackageDoF, Preset, SubstrateStack};
use wlpkit_core::network::FrequencyGrid;
use wlpkit_core::parasitics::ParasiticNetwork;
use wlpkit_core::sweep::{SweepAxis, TREND_DOFS};
use wlpkit_core::varactor::{BeamSegment, MeanderSpec, PlateSpec, Topology};

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub preset: Option<String>,
    #[serde(default)]
    pub geometry: Option<CpwGeometry>,
    #[serde(default)]
    pub stack: Option<SubstrateStack>,
    #[serde(default)]
    pub dof: Option<PackageDoF>,
    #[serde(default)]
    pub frequency: Option<GridSpec>,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub varactor: Option<VaractorSpec>,
    #[serde(default)]
    pub parasitics: Option<ParasiticNetwork>,
    /// Relative to the config file.
    #[serde(default)]
    pub output_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { start_hz: 0.5e9, stop_hz: 10e9, points: 20 }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub objective_frequency_hz: f64,
    #[serde(default)]
    pub axes: Vec<SweepAxis>,
    #[serde(default)]
    pub trend: Option<TrendSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendSpec {
    #[serde(default = "default_trend_dofs")]
    pub dofs: Vec<Dof>,
    #[serde(default = "default_trend_points")]
    pub points_per_axis: usize,
}

fn default_trend_dofs() -> Vec<Dof> {
    TREND_DOFS.to_vec()
}

fn default_trend_points() -> usize {
    5
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VaractorSpec {
    pub plate: PlateSpec,
    pub meander: MeanderSpec,
    /// Bias points for the C-V curve, volts.
    #[serde(default)]
    pub biases: Vec<f64>,
    /// Operating bias used when composing networks.
    #[serde(default)]
    pub bias: f64,
    #[serde(default)]
    pub loss_conductance: f64,
    #[serde(default)]
    pub topology: Topology,
}

impl Default for VaractorSpec {
    fn default() -> Self {
        Self {
            plate: PlateSpec {
                area: 4e-8,
                gap: 3e-6,
                dielectric_thickness: 0.1e-6,
                dielectric_permittivity: 7.0,
            },
            meander: MeanderSpec {
                meander_count: 4,
                segments: vec![BeamSegment { length: 200e-6, width: 10e-6, thickness: 2e-6 }; 3],
                youngs_modulus: 80e9,
            },
            biases: (0..=20).map(|i| 0.5 * i as f64).collect(),
            bias: 0.0,
            loss_conductance: 0.0,
            topology: Topology::Series,
        }
    }
}

/// Geometry after preset resolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub cpw: CpwGeometry,
    pub stack: SubstrateStack,
    pub dof: PackageDoF,
}

impl RunConfig {
    pub fn from_json(text: &str, path: &Path) -> Result<Self, ConfigError> {
        serde_json::from_str(text).map_err(|source| ConfigError::Parse { path: path.to_path_buf(), source })
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| ConfigError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, path)
    }

    pub fn resolve(&self) -> Result<Resolved, ConfigError> {
        let preset = self
            .preset
            .as_deref()
            .map(str::parse::<Preset>)
            .transpose()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let missing = |what: &str| {
            ConfigError::Invalid(format!("`{what}` is missing and no preset is given"))
        };
        Ok(Resolved {
            cpw: self.geometry.or(preset.map(Preset::cpw)).ok_or_else(|| missing("geometry"))?,
            stack: self.stack.or(preset.map(Preset::stack)).ok_or_else(|| missing("stack"))?,
            dof: self.dof.or(preset.map(Preset::dof)).ok_or_else(|| missing("dof"))?,
        })
    }

    pub fn grid(&self) -> Result<FrequencyGrid, ConfigError> {
        let g = self.frequency.unwrap_or_default();
        FrequencyGrid::linear(g.start_hz, g.stop_hz, g.points)
            .map_err(|e| ConfigError::Invalid(format!("frequency: {e}")))
    }

    pub fn output_dir(&self, config_path: &Path) -> PathBuf {
        let base = config_path.parent().unwrap_or(Path::new("."));
        match &self.output_dir {
            Some(p) if p.is_absolute() => p.clone(),
            Some(p) => base.join(p),
            None => base.to_path_buf(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn preset_only() {
        let c = RunConfig::from_json(r#"{"preset": "cpw_sweep"}"#, Path::new("x.json")).unwrap();
        assert_eq!(c.resolve().unwrap().cpw, Preset::CpwSweep.cpw());
    }

    #[test]
    fn unknown_field_rejected() {
        let e = RunConfig::from_json(r#"{"preset": "cpw_sweep", "colour": 1}"#, Path::new("x.json"));
        assert!(e.unwrap_err().to_string().contains("colour"));
    }

    #[test]
    fn alias_fields() {
        let c = RunConfig::from_json(
            r#"{"preset": "cpw_sweep", "dof": {"via_diameter": 70, "y_offset": 300, "x_offset": 70,
                "cap_thickness": 280, "recess_depth": 100, "z_bump": 25, "via_oxide_thickness": 1,
                "cap_resistivity": 2000}}"#,
            Path::new("x.json"),
        )
        .unwrap();
        assert_eq!(c.resolve().unwrap().dof, Preset::CpwSweep.dof());
    }
}
