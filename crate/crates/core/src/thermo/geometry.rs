//! Tube-field and shell geometry derived from a design vector and a
//! required heat-transfer area.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

use super::{DesignVector, LayoutConfig};

/// Derived exchanger geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Geometry {
    /// Tube pitch, m.
    pub tube_pitch_m: f64,
    /// Total tube count.
    pub tube_count: u64,
    /// Outer tube limit diameter, m.
    pub d_otl_m: f64,
    /// Centre-line tube limit diameter, m.
    pub d_ctl_m: f64,
    /// Shell inner diameter, m.
    pub shell_diameter_m: f64,
    /// Baffle-cut depth, m.
    pub baffle_cut_depth_m: f64,
    /// Transverse tube pitch, m.
    pub pitch_transverse_m: f64,
    /// Longitudinal tube pitch, m.
    pub pitch_longitudinal_m: f64,
    /// Number of baffles.
    pub baffle_count: u64,
    /// Tube rows crossed in one cross-flow section.
    pub rows_crossflow: f64,
    /// Effective tube rows crossed in each baffle window.
    pub rows_window: f64,
    /// Baffle-cut angle at the tube centre-line circle, rad.
    pub theta_ctl_rad: f64,
    /// Fraction of tubes in one baffle window.
    pub window_tube_fraction: f64,
    /// Fraction of tubes in pure cross flow.
    pub crossflow_tube_fraction: f64,
    /// Cross-flow area at the shell centre line, m2.
    pub area_crossflow_m2: f64,
    /// Shell-to-baffle leakage area, m2.
    pub area_shell_baffle_m2: f64,
    /// Tube-to-baffle leakage area, m2.
    pub area_tube_baffle_m2: f64,
    /// Bundle bypass area, m2.
    pub area_bypass_m2: f64,
    /// Net window flow area, m2.
    pub area_window_m2: f64,
    /// Shell-to-baffle share of total leakage area.
    pub r_s: f64,
    /// Total leakage area over cross-flow area.
    pub r_lm: f64,
    /// Bypass area over cross-flow area.
    pub r_b: f64,
    /// Sealing strip pairs per row crossed.
    pub n_ss_plus: f64,
}

/// Derive all geometric quantities for the design `x` at required area `a_o`.
pub fn derive_geometry(
    x: &DesignVector,
    layout: &LayoutConfig,
    a_o: f64,
) -> Result<Geometry, ModelError> {
    if !(a_o.is_finite() && a_o > 0.0) {
        return Err(ModelError::InfeasibleGeometry(format!(
            "required area must be positive, got {a_o}"
        )));
    }
    let d_o = x.tube_outer_diameter_m;
    let length = x.tube_length_m;

    let pitch = 1.25 * d_o;
    let tubes_exact = a_o / (std::f64::consts::PI * d_o * length);
    let tube_count = tubes_exact.ceil() as i64;
    if tube_count < 1 {
        return Err(ModelError::InfeasibleGeometry(format!(
            "tube count {tube_count} below 1"
        )));
    }
    let tube_count = tube_count as u64;

    let bundle = layout.table.bundle_constants(layout.angle, layout.n_passes)?;
    let d_otl = d_o * (tube_count as f64 / bundle.k1).powf(1.0 / bundle.n1);
    let d_s = d_otl / 0.95 + x.shell_baffle_clearance_m;
    let d_ctl = d_otl - d_o;
    if d_ctl <= 0.0 {
        return Err(ModelError::InfeasibleGeometry(format!(
            "centre-line bundle diameter {d_ctl} m is not positive"
        )));
    }

    let cut_depth = x.baffle_cut_frac * d_s;
    if 2.0 * cut_depth >= d_s {
        return Err(ModelError::InfeasibleGeometry(
            "baffle cut deeper than the shell radius".into(),
        ));
    }

    let x_t = pitch;
    let x_l = pitch * layout.angle.longitudinal_pitch_ratio();

    // angle subtended by the baffle cut at the tube centre-line circle
    let cos_arg = ((d_s - 2.0 * cut_depth) / d_ctl).clamp(-1.0, 1.0);
    let theta_ctl = 2.0 * cos_arg.acos();
    let window_fraction = (theta_ctl - theta_ctl.sin()) / (2.0 * std::f64::consts::PI);
    let crossflow_fraction = 1.0 - 2.0 * window_fraction;

    let rows_crossflow = (d_s - 2.0 * cut_depth) / x_l;
    let rows_window = 0.8 * cut_depth / x_l;

    let area_crossflow =
        (d_s - d_otl + (d_ctl / x_t) * (x_t - d_o)) * x.baffle_spacing_m;
    if area_crossflow <= 0.0 {
        return Err(ModelError::InfeasibleGeometry(
            "non-positive cross-flow area".into(),
        ));
    }
    let area_bypass = x.baffle_spacing_m
        * (d_s - d_otl + 0.5 * layout.n_passes as f64 * layout.pass_partition_width_m);

    let dtb = x.tube_baffle_clearance_m;
    let area_tube_baffle = std::f64::consts::FRAC_PI_4
        * ((d_o + dtb).powi(2) - d_o * d_o)
        * tube_count as f64
        * (1.0 - window_fraction);

    // baffle-cut angle at the shell wall
    let theta_ds = 2.0 * (1.0 - 2.0 * x.baffle_cut_frac).clamp(-1.0, 1.0).acos();
    let area_shell_baffle = std::f64::consts::PI
        * d_s
        * (x.shell_baffle_clearance_m / 2.0)
        * (1.0 - theta_ds / (2.0 * std::f64::consts::PI));

    // gross window segment minus the tubes that sit in it
    let segment = d_s * d_s / 8.0 * (theta_ds - theta_ds.sin());
    let area_window = segment
        - window_fraction * tube_count as f64 * std::f64::consts::FRAC_PI_4 * d_o * d_o;
    if area_window <= 0.0 {
        return Err(ModelError::InfeasibleGeometry(
            "window area fully blocked by tubes".into(),
        ));
    }

    let leak_total = area_shell_baffle + area_tube_baffle;
    let r_s = area_shell_baffle / leak_total;
    let r_lm = leak_total / area_crossflow;
    let r_b = area_bypass / area_crossflow;
    let n_ss_plus = if rows_crossflow > 0.0 {
        layout.sealing_strip_pairs as f64 / rows_crossflow
    } else {
        0.0
    };

    let baffle_count = ((length / x.baffle_spacing_m).floor() as i64 - 1).max(1) as u64;

    Ok(Geometry {
        tube_pitch_m: pitch,
        tube_count,
        d_otl_m: d_otl,
        d_ctl_m: d_ctl,
        shell_diameter_m: d_s,
        baffle_cut_depth_m: cut_depth,
        pitch_transverse_m: x_t,
        pitch_longitudinal_m: x_l,
        baffle_count,
        rows_crossflow,
        rows_window,
        theta_ctl_rad: theta_ctl,
        window_tube_fraction: window_fraction,
        crossflow_tube_fraction: crossflow_fraction,
        area_crossflow_m2: area_crossflow,
        area_shell_baffle_m2: area_shell_baffle,
        area_tube_baffle_m2: area_tube_baffle,
        area_bypass_m2: area_bypass,
        area_window_m2: area_window,
        r_s,
        r_lm,
        r_b,
        n_ss_plus,
    })
}
