//! Shell- and tube-side heat transfer coefficients and the overall
//! coefficient referred to the tube outer surface.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

use super::{CaseSpec, DesignVector, Geometry, LayoutConfig};

/// Shell-side coefficient with the Bell-Delaware correction factor set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellHtc {
    pub re_s: f64,
    pub pr_s: f64,
    pub colburn_j: f64,
    pub h_ideal: f64,
    pub j_c: f64,
    pub j_l: f64,
    pub j_b: f64,
    pub j_s: f64,
    pub j_r: f64,
    pub h_s: f64,
    /// The shell Reynolds number fell outside the coefficient table and the
    /// nearest band was used.
    pub band_clamped: bool,
}

/// Tube-side coefficient and flow state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TubeHtc {
    pub v_t: f64,
    pub re_t: f64,
    pub pr_t: f64,
    pub h_i: f64,
    /// Re_t below 2300: the turbulent correlation is extrapolated.
    pub laminar: bool,
}

/// Baffle-configuration correction factor.
pub fn baffle_window_factor(crossflow_tube_fraction: f64) -> f64 {
    0.55 + 0.72 * crossflow_tube_fraction
}

/// Baffle-leakage correction factor from the leakage area ratios.
pub fn baffle_leakage_factor(r_s: f64, r_lm: f64) -> f64 {
    let base = 0.44 * (1.0 - r_s);
    base + (1.0 - base) * (-2.2 * r_lm).exp()
}

/// Bundle-bypass correction factor.
pub fn bundle_bypass_factor(r_b: f64, n_ss_plus: f64, re_s: f64) -> f64 {
    if n_ss_plus >= 0.5 {
        return 1.0;
    }
    let c = if re_s <= 100.0 { 1.35 } else { 1.25 };
    (-c * r_b * (1.0 - (2.0 * n_ss_plus).cbrt())).exp()
}

/// Shell-side heat transfer coefficient.
pub fn shell_htc(
    _x: &DesignVector,
    case: &CaseSpec,
    layout: &LayoutConfig,
    geom: &Geometry,
) -> Result<ShellHtc, ModelError> {
    let s = &case.shell;
    let d_o = geom.tube_pitch_m / 1.25;
    let re_s = s.mass_flow_kg_s * d_o / (s.viscosity_pa_s * geom.area_crossflow_m2);
    let pr_s = s.heat_capacity_j_kg_k * s.viscosity_pa_s / s.thermal_conductivity_w_m_k;

    let (band, band_clamped) = layout.table.jf_band(layout.angle, re_s)?;
    let [a1, a2, a3, a4] = band.a;
    let a = a3 / (1.0 + 0.14 * re_s.powf(a4));
    let pitch_ratio = geom.tube_pitch_m / d_o;
    let j = a1 * (1.33 / pitch_ratio).powf(a) * re_s.powf(a2);

    let h_ideal =
        j * s.mass_flow_kg_s * s.heat_capacity_j_kg_k * pr_s.powf(-2.0 / 3.0)
            / geom.area_crossflow_m2;

    let j_c = baffle_window_factor(geom.crossflow_tube_fraction);
    let j_l = baffle_leakage_factor(geom.r_s, geom.r_lm);
    let j_b = bundle_bypass_factor(geom.r_b, geom.n_ss_plus, re_s);
    // equal inlet/centre/outlet baffle spacing and no laminar-gradient
    // correction, so both trailing factors are unity
    let j_s = 1.0;
    let j_r = 1.0;

    Ok(ShellHtc {
        re_s,
        pr_s,
        colburn_j: j,
        h_ideal,
        j_c,
        j_l,
        j_b,
        j_s,
        j_r,
        h_s: h_ideal * j_c * j_l * j_b * j_s * j_r,
        band_clamped,
    })
}

/// Tube-side heat transfer coefficient (Dittus-Boelter form with the
/// viscosity-ratio correction fixed to one).
pub fn tube_htc(
    x: &DesignVector,
    case: &CaseSpec,
    geom: &Geometry,
    layout: &LayoutConfig,
) -> Result<TubeHtc, ModelError> {
    let t = &case.tube;
    let d_i = x.inner_diameter();
    if d_i <= 0.0 || geom.tube_count < 1 {
        return Err(ModelError::InfeasibleGeometry(
            "tube side needs d_i > 0 and at least one tube".into(),
        ));
    }
    let flow_area = std::f64::consts::FRAC_PI_4 * d_i * d_i;
    let v_t = (layout.n_passes as f64 / geom.tube_count as f64) * t.mass_flow_kg_s
        / (flow_area * t.density_kg_m3);
    let re_t = t.density_kg_m3 * v_t * d_i / t.viscosity_pa_s;
    let pr_t = t.heat_capacity_j_kg_k * t.viscosity_pa_s / t.thermal_conductivity_w_m_k;
    let h_i = 0.023 * t.thermal_conductivity_w_m_k / d_i
        * pr_t.powf(1.0 / 3.0)
        * re_t.powf(0.8);

    Ok(TubeHtc {
        v_t,
        re_t,
        pr_t,
        h_i,
        laminar: re_t < 2300.0,
    })
}

/// Overall coefficient based on the tube outer surface.
pub fn overall_u(
    h_s: f64,
    h_i: f64,
    case: &CaseSpec,
    x: &DesignVector,
) -> Result<f64, ModelError> {
    if h_s <= 0.0 || h_i <= 0.0 {
        return Err(ModelError::InfeasibleConfiguration(format!(
            "heat transfer coefficients must be positive (h_s={h_s}, h_i={h_i})"
        )));
    }
    let d_o = x.tube_outer_diameter_m;
    let d_i = x.inner_diameter();
    let resistance = 1.0 / h_s
        + case.shell.fouling_resistance_m2_k_w
        + d_o * (d_o / d_i).ln() / (2.0 * case.wall_conductivity_w_m_k)
        + case.tube.fouling_resistance_m2_k_w * d_o / d_i
        + d_o / (d_i * h_i);
    Ok(1.0 / resistance)
}
