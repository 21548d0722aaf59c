//! Thermal-hydraulic model of a shell-and-tube heat exchanger.
//!
//! Maps a seven-variable design vector plus the process-side case data to
//! exchanger geometry, heat-transfer coefficients, required area, pressure
//! drops and pumping power, using the Bell-Delaware rating method on the
//! shell side.

mod coefficients;
mod geometry;
mod htc;
mod pressure;

pub use coefficients::{BundleConstants, CoefficientTable, JfBand, LayoutAngle, LayoutConfig};
pub use geometry::{derive_geometry, Geometry};
pub use htc::{
    baffle_leakage_factor, baffle_window_factor, bundle_bypass_factor, overall_u, shell_htc,
    tube_htc, ShellHtc, TubeHtc,
};
pub use pressure::{pumping_power, shell_dp, tube_dp, ShellDp};

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Relative area tolerance for the sizing fixed point.
pub const AREA_TOLERANCE: f64 = 1e-6;
/// Iteration cap for the sizing fixed point.
pub const MAX_SIZING_ITERATIONS: usize = 100;
/// Initial overall-coefficient guess in W/(m2 K).
pub const DEFAULT_U_GUESS: f64 = 500.0;

/// The seven sampled design variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignVector {
    /// Baffle spacing at centre, inlet and outlet (equal), m.
    pub baffle_spacing_m: f64,
    /// Baffle cut as a fraction of the shell diameter.
    pub baffle_cut_frac: f64,
    /// Tube-to-baffle diametral clearance, m.
    pub tube_baffle_clearance_m: f64,
    /// Shell-to-baffle diametral clearance, m.
    pub shell_baffle_clearance_m: f64,
    /// Tube length, m.
    pub tube_length_m: f64,
    /// Tube outer diameter, m.
    pub tube_outer_diameter_m: f64,
    /// Tube wall thickness, m.
    pub tube_wall_thickness_m: f64,
}

impl DesignVector {
    pub const DIM: usize = 7;
    pub const FIELD_NAMES: [&'static str; 7] = ["Lbc", "Bc", "dtb", "dsb", "L", "do", "t"];

    pub fn inner_diameter(&self) -> f64 {
        self.tube_outer_diameter_m - 2.0 * self.tube_wall_thickness_m
    }

    pub fn to_array(&self) -> [f64; 7] {
        [
            self.baffle_spacing_m,
            self.baffle_cut_frac,
            self.tube_baffle_clearance_m,
            self.shell_baffle_clearance_m,
            self.tube_length_m,
            self.tube_outer_diameter_m,
            self.tube_wall_thickness_m,
        ]
    }

    pub fn from_array(a: [f64; 7]) -> Self {
        Self {
            baffle_spacing_m: a[0],
            baffle_cut_frac: a[1],
            tube_baffle_clearance_m: a[2],
            shell_baffle_clearance_m: a[3],
            tube_length_m: a[4],
            tube_outer_diameter_m: a[5],
            tube_wall_thickness_m: a[6],
        }
    }

    pub fn from_slice(s: &[f64]) -> Result<Self, ModelError> {
        if s.len() != Self::DIM {
            return Err(ModelError::InfeasibleConfiguration(format!(
                "design vector needs {} components, got {}",
                Self::DIM,
                s.len()
            )));
        }
        let mut a = [0.0; 7];
        a.copy_from_slice(s);
        Ok(Self::from_array(a))
    }

    /// Sanity checks independent of the prior box.
    pub fn validate(&self) -> Result<(), ModelError> {
        let a = self.to_array();
        if a.iter().any(|v| !v.is_finite() || *v <= 0.0) {
            return Err(ModelError::InfeasibleConfiguration(
                "design vector components must be positive and finite".into(),
            ));
        }
        if self.inner_diameter() <= 0.0 {
            return Err(ModelError::InfeasibleGeometry(format!(
                "inner diameter {} m is not positive",
                self.inner_diameter()
            )));
        }
        if self.baffle_cut_frac >= 0.5 {
            return Err(ModelError::InfeasibleGeometry(
                "baffle cut must be below half the shell diameter".into(),
            ));
        }
        Ok(())
    }
}

/// One process stream.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StreamSpec {
    /// Informational label, not used by the model.
    #[serde(default)]
    pub fluid: String,
    pub mass_flow_kg_s: f64,
    pub t_in_c: f64,
    pub t_out_c: f64,
    pub density_kg_m3: f64,
    pub heat_capacity_j_kg_k: f64,
    pub viscosity_pa_s: f64,
    pub thermal_conductivity_w_m_k: f64,
    pub design_pressure_pa: f64,
    pub fouling_resistance_m2_k_w: f64,
    pub material: String,
}

impl StreamSpec {
    fn validate(&self, side: &str) -> Result<(), ModelError> {
        let positives = [
            ("mass flow", self.mass_flow_kg_s),
            ("density", self.density_kg_m3),
            ("heat capacity", self.heat_capacity_j_kg_k),
            ("viscosity", self.viscosity_pa_s),
            ("thermal conductivity", self.thermal_conductivity_w_m_k),
            ("design pressure", self.design_pressure_pa),
        ];
        for (name, v) in positives {
            if !v.is_finite() || v <= 0.0 {
                return Err(ModelError::InvalidCase(format!(
                    "{side} {name} must be positive, got {v}"
                )));
            }
        }
        if self.fouling_resistance_m2_k_w < 0.0 {
            return Err(ModelError::InvalidCase(format!(
                "{side} fouling resistance must be non-negative"
            )));
        }
        Ok(())
    }
}

/// Process-side data: both streams plus wall and pump properties.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CaseSpec {
    pub tube: StreamSpec,
    pub shell: StreamSpec,
    pub wall_conductivity_w_m_k: f64,
    pub pump_efficiency: f64,
}

impl CaseSpec {
    pub fn validate(&self) -> Result<(), ModelError> {
        self.tube.validate("tube-side")?;
        self.shell.validate("shell-side")?;
        if !(self.pump_efficiency > 0.0 && self.pump_efficiency <= 1.0) {
            return Err(ModelError::InvalidCase(format!(
                "pump efficiency must be in (0, 1], got {}",
                self.pump_efficiency
            )));
        }
        if self.wall_conductivity_w_m_k <= 0.0 {
            return Err(ModelError::InvalidCase(
                "wall conductivity must be positive".into(),
            ));
        }
        let (hot, cold) = self.hot_cold()?;
        if hot.t_in_c <= hot.t_out_c {
            return Err(ModelError::InvalidCase(
                "hot stream must cool down (T_in > T_out)".into(),
            ));
        }
        if cold.t_out_c <= cold.t_in_c {
            return Err(ModelError::InvalidCase(
                "cold stream must heat up (T_out > T_in)".into(),
            ));
        }
        Ok(())
    }

    /// (hot, cold) stream references; the hot stream is the one that cools.
    pub fn hot_cold(&self) -> Result<(&StreamSpec, &StreamSpec), ModelError> {
        let shell_cools = self.shell.t_in_c > self.shell.t_out_c;
        let tube_cools = self.tube.t_in_c > self.tube.t_out_c;
        match (shell_cools, tube_cools) {
            (true, false) => Ok((&self.shell, &self.tube)),
            (false, true) => Ok((&self.tube, &self.shell)),
            _ => Err(ModelError::InvalidCase(
                "exactly one stream must cool and the other heat".into(),
            )),
        }
    }
}

/// Heat duty from the hot side of the energy balance plus the relative
/// hot/cold mismatch.
pub fn heat_duty(case: &CaseSpec) -> Result<(f64, f64), ModelError> {
    let (hot, cold) = case.hot_cold()?;
    let q_hot = hot.mass_flow_kg_s * hot.heat_capacity_j_kg_k * (hot.t_in_c - hot.t_out_c);
    let q_cold = cold.mass_flow_kg_s * cold.heat_capacity_j_kg_k * (cold.t_out_c - cold.t_in_c);
    if q_hot <= 0.0 {
        return Err(ModelError::InvalidCase(format!(
            "non-positive heat duty {q_hot} W"
        )));
    }
    Ok((q_hot, (q_hot - q_cold).abs() / q_hot))
}

/// Counter-current log-mean temperature difference in kelvin.
///
/// Falls back to the arithmetic mean when the two terminal differences are
/// nearly equal.
pub fn lmtd(t_hot_in: f64, t_hot_out: f64, t_cold_in: f64, t_cold_out: f64) -> Result<f64, ModelError> {
    let dt1 = t_hot_in - t_cold_out;
    let dt2 = t_hot_out - t_cold_in;
    if dt1 <= 0.0 || dt2 <= 0.0 {
        return Err(ModelError::TemperatureCross { dt1, dt2 });
    }
    let rel = (dt1 / dt2 - 1.0).abs();
    if rel < 1e-9 {
        Ok(0.5 * (dt1 + dt2))
    } else {
        Ok((dt1 - dt2) / (dt1 / dt2).ln())
    }
}

/// LMTD correction factor for one shell pass and an even number of tube
/// passes, with the analytic limit at R = 1.
pub fn f_correction(r: f64, s: f64) -> Result<f64, ModelError> {
    if !(s > 0.0 && s < 1.0) || r < 0.0 || r * s >= 1.0 {
        return Err(ModelError::InfeasibleConfiguration(format!(
            "F factor needs 0 < S < 1, R >= 0, R*S < 1; got R={r}, S={s}"
        )));
    }
    let root = (r * r + 1.0).sqrt();
    let denom_arg_num = 2.0 - s * (r + 1.0 - root);
    let denom_arg_den = 2.0 - s * (r + 1.0 + root);
    if denom_arg_num <= 0.0 || denom_arg_den <= 0.0 {
        return Err(ModelError::InfeasibleConfiguration(format!(
            "F factor bracket argument non-positive at R={r}, S={s}"
        )));
    }
    let bracket = (denom_arg_num / denom_arg_den).ln();
    let f = if (r - 1.0).abs() < 1e-6 {
        // limit of ln((1-S)/(1-RS))/(R-1) as R -> 1
        root * (s / (1.0 - s)) / bracket
    } else {
        root * ((1.0 - s) / (1.0 - r * s)).ln() / ((r - 1.0) * bracket)
    };
    if !(f.is_finite() && f > 0.0) {
        return Err(ModelError::InfeasibleConfiguration(format!(
            "F factor evaluated to {f} at R={r}, S={s}"
        )));
    }
    Ok(f.min(1.0))
}

/// Everything the model computes for one design.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizingResult {
    pub duty_w: f64,
    pub lmtd_k: f64,
    pub r_ratio: f64,
    pub s_ratio: f64,
    pub f_factor: f64,
    pub shell: ShellHtc,
    pub tube: TubeHtc,
    pub overall_u_w_m2k: f64,
    pub area_m2: f64,
    pub shell_dp: ShellDp,
    pub tube_dp_pa: f64,
    pub tube_friction_factor: f64,
    pub pumping_power_w: f64,
    pub geometry: Geometry,
    pub converged: bool,
    pub iterations: usize,
}

/// Size the exchanger for the given design: fixed-point iteration on the
/// required area, starting from `u_guess`.
pub fn size_exchanger_from(
    x: &DesignVector,
    case: &CaseSpec,
    layout: &LayoutConfig,
    u_guess: f64,
) -> Result<SizingResult, ModelError> {
    x.validate()?;
    case.validate()?;
    layout.validate()?;

    let (duty, _) = heat_duty(case)?;
    let (hot, cold) = case.hot_cold()?;
    let dt_lm = lmtd(hot.t_in_c, hot.t_out_c, cold.t_in_c, cold.t_out_c)?;
    let r = (hot.t_in_c - hot.t_out_c) / (cold.t_out_c - cold.t_in_c);
    let s = (cold.t_out_c - cold.t_in_c) / (hot.t_in_c - cold.t_in_c);
    let f = if layout.n_passes >= 2 && layout.f_correction_enabled {
        f_correction(r, s)?
    } else {
        1.0
    };

    let mut area = duty / (u_guess * dt_lm * f);
    let mut two_back = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;

    for iter in 1..=MAX_SIZING_ITERATIONS {
        iterations = iter;
        let geom = derive_geometry(x, layout, area)?;
        let shell = shell_htc(x, case, layout, &geom)?;
        let tube = tube_htc(x, case, &geom, layout)?;
        let u = overall_u(shell.h_s, tube.h_i, case, x)?;
        let new_area = duty / (u * dt_lm * f);
        if (new_area - area).abs() / area < AREA_TOLERANCE {
            area = new_area;
            converged = true;
            break;
        }
        // Nt is integer, so the area map is piecewise constant; a 2-cycle
        // between adjacent tube counts is resolved by keeping the larger area.
        if (new_area - two_back).abs() / new_area < AREA_TOLERANCE {
            area = area.max(new_area);
            converged = true;
            break;
        }
        two_back = area;
        area = new_area;
    }

    if !converged {
        return Err(ModelError::Diverged {
            iterations,
            last_area: area,
        });
    }

    // recompute at the final area so all outputs are self-consistent
    let geom = derive_geometry(x, layout, area)?;
    let shell = shell_htc(x, case, layout, &geom)?;
    let tube = tube_htc(x, case, &geom, layout)?;
    let u_final = overall_u(shell.h_s, tube.h_i, case, x)?;
    let shell_drop = shell_dp(x, case, layout, &geom, shell.re_s)?;
    let (dp_t, f_t) = tube_dp(x, case, &geom, layout, tube.re_t, tube.v_t)?;
    let power = pumping_power(dp_t, shell_drop.dp_s_pa, case)?;

    Ok(SizingResult {
        duty_w: duty,
        lmtd_k: dt_lm,
        r_ratio: r,
        s_ratio: s,
        f_factor: f,
        shell,
        tube,
        overall_u_w_m2k: u_final,
        area_m2: area,
        shell_dp: shell_drop,
        tube_dp_pa: dp_t,
        tube_friction_factor: f_t,
        pumping_power_w: power,
        geometry: geom,
        converged,
        iterations,
    })
}

/// [`size_exchanger_from`] with the default initial coefficient guess.
pub fn size_exchanger(
    x: &DesignVector,
    case: &CaseSpec,
    layout: &LayoutConfig,
) -> Result<SizingResult, ModelError> {
    size_exchanger_from(x, case, layout, DEFAULT_U_GUESS)
}
