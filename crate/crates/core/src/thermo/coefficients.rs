//! Layout configuration and the Bell-Delaware coefficient tables.
//!
//! The bundle-diameter constants (K1, n1) and the Colburn-j / ideal-friction
//! coefficient bands are loaded from a plain-text data file; a built-in copy
//! covering the 30/45/90 degree layouts ships with the crate.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

const BUILTIN_TABLE: &str = include_str!("../../data/bell_delaware_coefficients.txt");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LayoutAngle {
    Triangular30,
    RotatedSquare45,
    Square90,
}

impl LayoutAngle {
    pub fn degrees(self) -> u32 {
        match self {
            LayoutAngle::Triangular30 => 30,
            LayoutAngle::RotatedSquare45 => 45,
            LayoutAngle::Square90 => 90,
        }
    }

    pub fn from_degrees(deg: u32) -> Result<Self, ModelError> {
        match deg {
            30 => Ok(LayoutAngle::Triangular30),
            45 => Ok(LayoutAngle::RotatedSquare45),
            90 => Ok(LayoutAngle::Square90),
            other => Err(ModelError::InfeasibleConfiguration(format!(
                "unsupported layout angle {other} deg (expected 30, 45 or 90)"
            ))),
        }
    }

    /// Longitudinal tube pitch as a multiple of the transverse pitch.
    pub fn longitudinal_pitch_ratio(self) -> f64 {
        match self {
            LayoutAngle::Triangular30 => 3.0f64.sqrt() / 2.0,
            LayoutAngle::RotatedSquare45 => std::f64::consts::FRAC_1_SQRT_2,
            LayoutAngle::Square90 => 1.0,
        }
    }
}

impl fmt::Display for LayoutAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} deg", self.degrees())
    }
}

/// Tube bundle diameter constants (one row per layout and pass count).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BundleConstants {
    pub k1: f64,
    pub n1: f64,
}

/// One Reynolds band of Colburn-j / friction coefficients.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JfBand {
    pub re_lo: f64,
    pub re_hi: f64,
    /// a1..a4 of the j correlation.
    pub a: [f64; 4],
    /// b1..b4 of the f_id correlation.
    pub b: [f64; 4],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientTable {
    bundle: Vec<(u32, u32, BundleConstants)>,
    bands: Vec<(u32, JfBand)>,
}

impl CoefficientTable {
    /// The table shipped with the crate.
    pub fn builtin() -> Self {
        Self::parse(BUILTIN_TABLE).expect("builtin coefficient table must parse")
    }

    pub fn from_path(path: &Path) -> Result<Self, ModelError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            ModelError::InfeasibleConfiguration(format!(
                "cannot read coefficient file {}: {e}",
                path.display()
            ))
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ModelError> {
        let mut bundle = Vec::new();
        let mut bands = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |msg: &str| {
                ModelError::InfeasibleConfiguration(format!(
                    "coefficient table line {}: {msg}",
                    lineno + 1
                ))
            };
            let num = |s: &str| -> Result<f64, ModelError> {
                s.parse::<f64>().map_err(|_| bad(&format!("bad number '{s}'")))
            };
            match fields[0] {
                "bundle" => {
                    if fields.len() != 5 {
                        return Err(bad("expected: bundle <angle> <passes> <K1> <n1>"));
                    }
                    let angle = num(fields[1])? as u32;
                    let passes = num(fields[2])? as u32;
                    let k1 = num(fields[3])?;
                    let n1 = num(fields[4])?;
                    if k1 <= 0.0 || n1 <= 0.0 {
                        return Err(bad("K1 and n1 must be positive"));
                    }
                    bundle.push((angle, passes, BundleConstants { k1, n1 }));
                }
                "jf" => {
                    if fields.len() != 12 {
                        return Err(bad(
                            "expected: jf <angle> <re_lo> <re_hi> a1 a2 a3 a4 b1 b2 b3 b4",
                        ));
                    }
                    let angle = num(fields[1])? as u32;
                    let re_lo = num(fields[2])?;
                    let re_hi = num(fields[3])?;
                    let mut a = [0.0; 4];
                    let mut b = [0.0; 4];
                    for i in 0..4 {
                        a[i] = num(fields[4 + i])?;
                        b[i] = num(fields[8 + i])?;
                    }
                    bands.push((angle, JfBand { re_lo, re_hi, a, b }));
                }
                other => return Err(bad(&format!("unknown record kind '{other}'"))),
            }
        }
        if bundle.is_empty() || bands.is_empty() {
            return Err(ModelError::InfeasibleConfiguration(
                "coefficient table has no usable records".into(),
            ));
        }
        Ok(Self { bundle, bands })
    }

    /// Bundle constants for the given layout, using the largest tabulated
    /// pass count not exceeding `n_passes`.
    pub fn bundle_constants(
        &self,
        angle: LayoutAngle,
        n_passes: u32,
    ) -> Result<BundleConstants, ModelError> {
        let deg = angle.degrees();
        self.bundle
            .iter()
            .filter(|(a, p, _)| *a == deg && *p <= n_passes)
            .max_by_key(|(_, p, _)| *p)
            .map(|(_, _, c)| *c)
            .ok_or_else(|| {
                ModelError::InfeasibleConfiguration(format!(
                    "no bundle constants for layout {angle}, {n_passes} passes"
                ))
            })
    }

    /// Coefficient band containing `re_s`. Out-of-range Reynolds numbers are
    /// clamped to the nearest band; the second return value reports that.
    pub fn jf_band(&self, angle: LayoutAngle, re_s: f64) -> Result<(JfBand, bool), ModelError> {
        let deg = angle.degrees();
        let mut rows: Vec<&JfBand> = self
            .bands
            .iter()
            .filter(|(a, _)| *a == deg)
            .map(|(_, b)| b)
            .collect();
        if rows.is_empty() {
            return Err(ModelError::InfeasibleConfiguration(format!(
                "no j/f coefficients for layout {angle}"
            )));
        }
        rows.sort_by(|x, y| x.re_lo.total_cmp(&y.re_lo));
        if let Some(band) = rows.iter().find(|b| re_s >= b.re_lo && re_s < b.re_hi) {
            return Ok((**band, false));
        }
        let clamped = if re_s < rows[0].re_lo {
            rows[0]
        } else {
            rows[rows.len() - 1]
        };
        Ok((*clamped, true))
    }
}

/// Tube-field layout and shell-side construction details.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LayoutConfig {
    pub n_passes: u32,
    pub angle: LayoutAngle,
    pub sealing_strip_pairs: u32,
    pub pass_partition_width_m: f64,
    pub f_correction_enabled: bool,
    pub table: CoefficientTable,
}

impl LayoutConfig {
    pub fn new(n_passes: u32, angle: LayoutAngle) -> Self {
        Self {
            n_passes,
            angle,
            sealing_strip_pairs: 0,
            pass_partition_width_m: 0.0,
            f_correction_enabled: true,
            table: CoefficientTable::builtin(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n_passes < 1 {
            return Err(ModelError::InfeasibleConfiguration(
                "n_passes must be at least 1".into(),
            ));
        }
        if self.pass_partition_width_m < 0.0 {
            return Err(ModelError::InfeasibleConfiguration(
                "pass_partition_width_m must be non-negative".into(),
            ));
        }
        self.table.bundle_constants(self.angle, self.n_passes)?;
        Ok(())
    }
}

impl Default for LayoutConfig {
    /// Single-pass 30 degree triangular layout, no sealing strips.
    fn default() -> Self {
        Self::new(1, LayoutAngle::Triangular30)
    }
}
