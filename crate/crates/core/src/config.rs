//! Run configuration: TOML schema, the bundled default case, validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cost::CostParams;
use crate::error::PipelineError;
use crate::posterior::{PriorBox, TargetSpec};
use crate::thermo::{CaseSpec, CoefficientTable, DesignVector, LayoutAngle, LayoutConfig};

const DEFAULT_CONFIG_TOML: &str = include_str!("../data/default_config.toml");

/// `[layout]` section; converted to a [`LayoutConfig`] after parsing.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayoutSection {
    pub n_passes: u32,
    /// Layout angle in degrees: 30, 45 or 90.
    pub layout_angle: u32,
    #[serde(default)]
    pub sealing_strip_pairs: u32,
    #[serde(default)]
    pub pass_partition_width_m: f64,
    #[serde(default = "default_true")]
    pub f_correction_enabled: bool,
    /// Optional override for the bundled correlation coefficients.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coefficients_file: Option<PathBuf>,
}

fn default_true() -> bool {
    true
}

/// `[dram]` section.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DramSection {
    pub seed: u64,
    pub n_samples: u64,
    pub n0: u64,
    pub n_stages: usize,
    pub stage_scale: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s_d: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default)]
    pub checkpoint_interval: u64,
}

/// `[output]` section.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OutputSection {
    pub directory: PathBuf,
    #[serde(default = "default_true")]
    pub chain_csv: bool,
    #[serde(default = "default_true")]
    pub summary_json: bool,
    #[serde(default = "default_true")]
    pub ellipses_csv: bool,
    #[serde(default = "default_true")]
    pub decision_json: bool,
}

/// A named design to rate alongside the sampled ones.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReferenceDesign {
    pub name: String,
    #[serde(flatten)]
    pub design: DesignVector,
}

/// Full run configuration, one TOML file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub case: CaseSpec,
    pub layout: LayoutSection,
    #[serde(default)]
    pub cost: CostParams,
    pub target: TargetSpec,
    #[serde(default = "PriorBox::standard")]
    pub prior: PriorBox,
    pub dram: DramSection,
    pub output: OutputSection,
    #[serde(default)]
    pub reference_designs: Vec<ReferenceDesign>,
}

impl Default for RunConfig {
    fn default() -> Self {
        toml::from_str(DEFAULT_CONFIG_TOML).expect("bundled default config parses")
    }
}

impl RunConfig {
    /// The bundled default configuration as TOML text.
    pub fn default_toml() -> &'static str {
        DEFAULT_CONFIG_TOML
    }

    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        let cfg: Self =
            toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text)
    }

    /// Build the [`LayoutConfig`], loading an external coefficient table
    /// if one was configured.
    pub fn layout_config(&self) -> Result<LayoutConfig, PipelineError> {
        let angle = LayoutAngle::from_degrees(self.layout.layout_angle)
            .map_err(PipelineError::Model)?;
        let table = match &self.layout.coefficients_file {
            Some(path) => CoefficientTable::from_path(path).map_err(PipelineError::Model)?,
            None => CoefficientTable::builtin(),
        };
        let layout = LayoutConfig {
            n_passes: self.layout.n_passes,
            angle,
            sealing_strip_pairs: self.layout.sealing_strip_pairs,
            pass_partition_width_m: self.layout.pass_partition_width_m,
            f_correction_enabled: self.layout.f_correction_enabled,
            table,
        };
        layout.validate().map_err(PipelineError::Model)?;
        Ok(layout)
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        self.case.validate().map_err(PipelineError::Model)?;
        self.cost.validate().map_err(PipelineError::Model)?;
        self.target.validate().map_err(PipelineError::Model)?;
        self.prior.validate().map_err(PipelineError::Model)?;
        self.layout_config()?;
        if self.dram.n_samples == 0 {
            return Err(PipelineError::Config(
                "dram.n_samples must be positive".into(),
            ));
        }
        crate::dram::DramConfig {
            n0: self.dram.n0,
            n_stages: self.dram.n_stages,
            stage_scale: self.dram.stage_scale,
            sd: self.dram.s_d,
            epsilon: self.dram.epsilon.unwrap_or(1e-10),
            adapt: true,
        }
        .validate()
        .map_err(PipelineError::Sampler)?;
        // reference designs are rated, not sampled, so they only need to
        // be physically sensible, not inside the prior box
        for r in &self.reference_designs {
            r.design.validate().map_err(PipelineError::Model)?;
        }
        Ok(())
    }

    pub fn dram_config(&self) -> crate::dram::DramConfig {
        crate::dram::DramConfig {
            n0: self.dram.n0,
            n_stages: self.dram.n_stages,
            stage_scale: self.dram.stage_scale,
            sd: self.dram.s_d,
            epsilon: self.dram.epsilon.unwrap_or(1e-10),
            adapt: true,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn bundled_default_parses_and_validates() {
        let cfg = RunConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.dram.seed, 42);
        assert_eq!(cfg.dram.n_samples, 30_000);
        assert_relative_eq!(cfg.target.area_m2, 37.14);
        assert_relative_eq!(cfg.case.shell.mass_flow_kg_s, 2.7);
        assert_eq!(cfg.reference_designs.len(), 2);
        assert_eq!(cfg.layout.n_passes, 1);
    }

    #[test]
    fn round_trips_through_toml() {
        let cfg = RunConfig::default();
        let text = toml::to_string(&cfg).unwrap();
        let back = RunConfig::from_toml(&text).unwrap();
        assert_eq!(back.dram.seed, cfg.dram.seed);
        assert_eq!(back.case.tube.material, cfg.case.tube.material);
        assert_eq!(
            back.reference_designs[1].design.tube_length_m,
            cfg.reference_designs[1].design.tube_length_m
        );
    }

    #[test]
    fn rejects_nonsensical_reference_design() {
        let mut cfg = RunConfig::default();
        cfg.reference_designs[0].design.tube_length_m = -1.0;
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn rejects_unknown_angle() {
        let text = RunConfig::default_toml().replace("layout_angle = 30", "layout_angle = 60");
        assert!(RunConfig::from_toml(&text).is_err());
    }

    #[test]
    fn rejects_zero_samples() {
        let text = RunConfig::default_toml().replace("n_samples = 30000", "n_samples = 0");
        assert!(RunConfig::from_toml(&text).is_err());
    }
}
