//! Shell- and tube-side pressure drops and pumping power.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

use super::{CaseSpec, DesignVector, Geometry, LayoutConfig};

/// Shell-side pressure drop with its ideal components and correction factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellDp {
    pub f_ideal: f64,
    pub dp_crossflow_ideal_pa: f64,
    pub dp_window_ideal_pa: f64,
    pub zeta_b: f64,
    pub zeta_l: f64,
    pub zeta_s: f64,
    pub dp_s_pa: f64,
}

/// Bypass correction factor for pressure drop.
pub fn bypass_dp_factor(r_b: f64, n_ss_plus: f64) -> f64 {
    if n_ss_plus >= 0.5 {
        return 1.0;
    }
    (-2.7 * r_b * (1.0 - (2.0 * n_ss_plus).cbrt())).exp()
}

/// Leakage correction factor for pressure drop.
pub fn leakage_dp_factor(r_s: f64, r_lm: f64) -> f64 {
    let p = -0.15 * (1.0 + r_s) + 0.8;
    if r_lm <= 0.0 {
        return 1.0;
    }
    (-1.33 * (1.0 + r_s) * r_lm.powf(p)).exp()
}

/// Shell-side pressure drop via the Bell-Delaware composition of cross-flow,
/// window and end-zone terms.
pub fn shell_dp(
    _x: &DesignVector,
    case: &CaseSpec,
    layout: &LayoutConfig,
    geom: &Geometry,
    re_s: f64,
) -> Result<ShellDp, ModelError> {
    if geom.baffle_count < 1 {
        return Err(ModelError::InfeasibleGeometry(
            "at least one baffle is required".into(),
        ));
    }
    let s = &case.shell;
    let g_s = s.mass_flow_kg_s / geom.area_crossflow_m2;
    let d_o = geom.tube_pitch_m / 1.25;

    let (band, _) = layout.table.jf_band(layout.angle, re_s)?;
    let [b1, b2, b3, b4] = band.b;
    let b = b3 / (1.0 + 0.14 * re_s.powf(b4));
    let pitch_ratio = geom.tube_pitch_m / d_o;
    let f_ideal = b1 * (1.33 / pitch_ratio).powf(b) * re_s.powf(b2);

    // viscosity wall correction fixed to one
    let dp_cross_ideal =
        4.0 * f_ideal * g_s * g_s * geom.rows_crossflow / (2.0 * s.density_kg_m3);
    let dp_window_ideal = (2.0 + 0.6 * geom.rows_window) * s.mass_flow_kg_s * s.mass_flow_kg_s
        / (2.0 * s.density_kg_m3 * geom.area_crossflow_m2 * geom.area_window_m2);

    let zeta_b = bypass_dp_factor(geom.r_b, geom.n_ss_plus);
    let zeta_l = leakage_dp_factor(geom.r_s, geom.r_lm);
    // equal baffle spacing at inlet, centre and outlet
    let zeta_s = 2.0;

    let n_b = geom.baffle_count as f64;
    let dp_s = ((n_b - 1.0) * dp_cross_ideal * zeta_b + n_b * dp_window_ideal) * zeta_l
        + 2.0 * dp_cross_ideal * (1.0 + geom.rows_window / geom.rows_crossflow) * zeta_b * zeta_s;

    Ok(ShellDp {
        f_ideal,
        dp_crossflow_ideal_pa: dp_cross_ideal,
        dp_window_ideal_pa: dp_window_ideal,
        zeta_b,
        zeta_l,
        zeta_s,
        dp_s_pa: dp_s,
    })
}

/// Tube-side pressure drop and the friction factor used.
pub fn tube_dp(
    x: &DesignVector,
    case: &CaseSpec,
    _geom: &Geometry,
    layout: &LayoutConfig,
    re_t: f64,
    v_t: f64,
) -> Result<(f64, f64), ModelError> {
    if re_t < 0.0 {
        return Err(ModelError::InfeasibleConfiguration(format!(
            "tube Reynolds number must be non-negative, got {re_t}"
        )));
    }
    if v_t == 0.0 {
        return Ok((0.0, 0.0));
    }
    let f = 0.046 * re_t.powf(-0.2);
    let d_i = x.inner_diameter();
    let dp = layout.n_passes as f64
        * (4.0 * f * x.tube_length_m / d_i + 2.5)
        * case.tube.density_kg_m3
        * v_t
        * v_t
        / 2.0;
    Ok((dp, f))
}

/// Total pumping power for both sides.
pub fn pumping_power(dp_t: f64, dp_s: f64, case: &CaseSpec) -> Result<f64, ModelError> {
    let eta = case.pump_efficiency;
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(ModelError::InvalidCase(format!(
            "pump efficiency must be in (0, 1], got {eta}"
        )));
    }
    Ok((dp_t * case.tube.mass_flow_kg_s / case.tube.density_kg_m3
        + dp_s * case.shell.mass_flow_kg_s / case.shell.density_kg_m3)
        / eta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::RunConfig;
    use approx::assert_relative_eq;

    #[test]
    fn friction_factor_at_re_ten_thousand() {
        let cfg = RunConfig::default();
        let layout = cfg.layout_config().unwrap();
        let x = cfg.reference_designs[0].design;
        // only the friction factor is checked, velocity chosen arbitrarily
        let geom = crate::thermo::derive_geometry(&x, &layout, 37.14).unwrap();
        let (_, f) = tube_dp(&x, &cfg.case, &geom, &layout, 1.0e4, 1.0).unwrap();
        assert_relative_eq!(f, 0.0072908, max_relative = 1e-4);
    }

    #[test]
    fn zero_velocity_means_zero_drop() {
        let cfg = RunConfig::default();
        let layout = cfg.layout_config().unwrap();
        let x = cfg.reference_designs[0].design;
        let geom = crate::thermo::derive_geometry(&x, &layout, 37.14).unwrap();
        assert_eq!(tube_dp(&x, &cfg.case, &geom, &layout, 0.0, 0.0).unwrap(), (0.0, 0.0));
    }

    #[test]
    fn pumping_power_matches_hand_calculation() {
        let cfg = RunConfig::default();
        let p = pumping_power(8600.0, 22600.0, &cfg.case).unwrap();
        assert_relative_eq!(p, 413.0, max_relative = 2e-3);
    }

    #[test]
    fn pumping_power_is_linear_in_pressure() {
        let cfg = RunConfig::default();
        let p1 = pumping_power(8600.0, 22600.0, &cfg.case).unwrap();
        let p3 = pumping_power(3.0 * 8600.0, 3.0 * 22600.0, &cfg.case).unwrap();
        assert_relative_eq!(p3, 3.0 * p1, max_relative = 1e-14);
    }

    #[test]
    fn correction_factors_stay_in_unit_interval() {
        assert_eq!(bypass_dp_factor(0.3, 0.5), 1.0);
        assert_eq!(leakage_dp_factor(0.2, 0.0), 1.0);
        for (r_s, r_lm) in [(0.0, 0.1), (0.4, 0.3), (1.0, 0.9)] {
            let zl = leakage_dp_factor(r_s, r_lm);
            assert!(zl > 0.0 && zl <= 1.0);
        }
        for (r_b, n) in [(0.1, 0.0), (0.5, 0.2), (0.9, 0.4)] {
            let zb = bypass_dp_factor(r_b, n);
            assert!(zb > 0.0 && zb <= 1.0);
        }
    }

    #[test]
    fn shell_drop_composition_uses_double_end_zones() {
        let cfg = RunConfig::default();
        let layout = cfg.layout_config().unwrap();
        let x = cfg.reference_designs[0].design;
        let geom = crate::thermo::derive_geometry(&x, &layout, 37.14).unwrap();
        let dp = shell_dp(&x, &cfg.case, &layout, &geom, 5000.0).unwrap();
        assert_eq!(dp.zeta_s, 2.0);
        assert!(dp.dp_s_pa > 0.0);
        assert!(dp.f_ideal > 0.0);
        assert!(dp.zeta_l > 0.0 && dp.zeta_l <= 1.0);
        assert!(dp.zeta_b > 0.0 && dp.zeta_b <= 1.0);
    }
}
