//! Purchase, bare-module, operating and total annual cost of a sized
//! exchanger.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::thermo::CaseSpec;

/// Cost correlation constants and economic parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CostParams {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub b1: f64,
    pub b2: f64,
    /// Material factor; derived from the case materials when `None`.
    pub material_factor: Option<f64>,
    pub cost_index_ratio: f64,
    pub electricity_cost_per_kwh: f64,
    pub interest_rate: f64,
    pub lifespan_years: u32,
    pub operating_hours: f64,
}

impl Default for CostParams {
    fn default() -> Self {
        Self {
            k1: 3.2138,
            k2: 0.2688,
            k3: 0.07961,
            c1: 0.0,
            c2: 0.0,
            c3: 0.0,
            b1: 1.8,
            b2: 1.5,
            material_factor: None,
            cost_index_ratio: 1.0,
            electricity_cost_per_kwh: 0.1,
            interest_rate: 0.05,
            lifespan_years: 20,
            operating_hours: 8232.0,
        }
    }
}

impl CostParams {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.interest_rate <= 0.0 {
            return Err(ModelError::InvalidCase(
                "interest rate must be positive".into(),
            ));
        }
        if self.lifespan_years < 1 {
            return Err(ModelError::InvalidCase(
                "lifespan must be at least one year".into(),
            ));
        }
        if self.electricity_cost_per_kwh < 0.0 || self.operating_hours < 0.0 {
            return Err(ModelError::InvalidCase(
                "electricity cost and operating hours must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Material factor from the construction material tags, unless
    /// overridden.
    pub fn resolve_material_factor(&self, case: &CaseSpec) -> f64 {
        if let Some(fm) = self.material_factor {
            return fm;
        }
        let tube = case.tube.material.to_ascii_lowercase();
        if tube.contains("stainless") || tube.contains("ss") {
            1.7
        } else if tube.contains("cu") || tube.contains("copper") {
            1.25
        } else {
            1.0
        }
    }
}

/// Cost stack for one design.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostBreakdown {
    pub purchase_cost: f64,
    pub pressure_factor: f64,
    pub bare_module_cost: f64,
    pub operating_cost_per_yr: f64,
    pub annuity_factor: f64,
    pub tac_per_yr: f64,
}

/// Purchase cost from the log-quadratic correlation, scaled by the cost
/// index ratio.
pub fn purchase_cost(area_m2: f64, p: &CostParams) -> Result<f64, ModelError> {
    if !(area_m2.is_finite() && area_m2 > 0.0) {
        return Err(ModelError::InvalidCase(format!(
            "area must be positive for the cost correlation, got {area_m2}"
        )));
    }
    let la = area_m2.log10();
    let log_cp = p.k1 + p.k2 * la + p.k3 * la * la;
    Ok(10f64.powf(log_cp) * p.cost_index_ratio)
}

/// Pressure factor from the log-quadratic correlation in bar gauge.
pub fn pressure_factor(pressure_barg: f64, p: &CostParams) -> Result<f64, ModelError> {
    if p.c1 == 0.0 && p.c2 == 0.0 && p.c3 == 0.0 {
        return Ok(1.0);
    }
    if pressure_barg <= 0.0 {
        return Err(ModelError::InvalidCase(format!(
            "pressure factor needs a positive gauge pressure, got {pressure_barg} barg"
        )));
    }
    let lp = pressure_barg.log10();
    Ok(10f64.powf(p.c1 + p.c2 * lp + p.c3 * lp * lp))
}

/// Bare-module cost; returns `(C_BM, F_P)`.
pub fn bare_module_cost(
    c_p: f64,
    pressure_barg: f64,
    material_factor: f64,
    p: &CostParams,
) -> Result<(f64, f64), ModelError> {
    if c_p <= 0.0 {
        return Err(ModelError::InvalidCase(format!(
            "purchase cost must be positive, got {c_p}"
        )));
    }
    let f_p = pressure_factor(pressure_barg, p)?;
    Ok((c_p * (p.b1 + p.b2 * material_factor * f_p), f_p))
}

/// Annual pumping electricity cost.
pub fn operating_cost(pumping_power_w: f64, p: &CostParams) -> Result<f64, ModelError> {
    if pumping_power_w < 0.0 {
        return Err(ModelError::InvalidCase(format!(
            "pumping power must be non-negative, got {pumping_power_w}"
        )));
    }
    Ok(p.operating_hours * (pumping_power_w / 1000.0) * p.electricity_cost_per_kwh)
}

/// Capital-recovery (equal-annuity) factor.
pub fn annuity_factor(interest_rate: f64, lifespan_years: u32) -> f64 {
    let i = interest_rate;
    let growth = (1.0 + i).powi(lifespan_years as i32);
    i * growth / (growth - 1.0)
}

/// Full cost breakdown from bare-module and operating costs.
pub fn total_annual_cost(
    c_bm: f64,
    f_p: f64,
    c_p: f64,
    oc: f64,
    p: &CostParams,
) -> Result<CostBreakdown, ModelError> {
    if c_bm < 0.0 || oc < 0.0 {
        return Err(ModelError::InvalidCase(
            "cost components must be non-negative".into(),
        ));
    }
    let annuity = annuity_factor(p.interest_rate, p.lifespan_years);
    Ok(CostBreakdown {
        purchase_cost: c_p,
        pressure_factor: f_p,
        bare_module_cost: c_bm,
        operating_cost_per_yr: oc,
        annuity_factor: annuity,
        tac_per_yr: c_bm * annuity + oc,
    })
}

/// Convert an absolute pressure in Pa to bar gauge.
pub fn pa_to_barg(pressure_pa: f64) -> f64 {
    (pressure_pa - 101_325.0) / 1e5
}

/// Cost a design from its heat-transfer area and pumping power.
pub fn cost_design(
    area_m2: f64,
    pumping_power_w: f64,
    case: &CaseSpec,
    p: &CostParams,
) -> Result<CostBreakdown, ModelError> {
    p.validate()?;
    let c_p = purchase_cost(area_m2, p)?;
    let fm = p.resolve_material_factor(case);
    let barg = pa_to_barg(case.shell.design_pressure_pa);
    let (c_bm, f_p) = bare_module_cost(c_p, barg, fm, p)?;
    let oc = operating_cost(pumping_power_w, p)?;
    total_annual_cost(c_bm, f_p, c_p, oc, p)
}
