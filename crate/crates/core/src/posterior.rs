//! Posterior over the seven design variables given target area and
//! pumping power.

use std::sync::atomic::{AtomicU64, Ordering};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::dram::{Evaluation, Target};
use crate::error::ModelError;
use crate::thermo::{size_exchanger, CaseSpec, DesignVector, LayoutConfig};

/// Targets and likelihood widths. Widths default to 5% of the targets.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TargetSpec {
    #[serde(rename = "target_area_m2")]
    pub area_m2: f64,
    #[serde(rename = "target_power_w")]
    pub pumping_power_w: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_area_m2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_power_w: Option<f64>,
}

impl TargetSpec {
    pub fn sigmas(&self) -> (f64, f64) {
        (
            self.sigma_area_m2.unwrap_or(0.05 * self.area_m2),
            self.sigma_power_w.unwrap_or(0.05 * self.pumping_power_w),
        )
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(self.area_m2 > 0.0 && self.pumping_power_w > 0.0) {
            return Err(ModelError::InvalidCase(
                "targets must be positive".into(),
            ));
        }
        let (sa, sp) = self.sigmas();
        if !(sa > 0.0 && sp > 0.0) {
            return Err(ModelError::InvalidCase(
                "likelihood widths must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Uniform box prior on the design variables.
///
/// The tube-to-baffle clearance bounds are coupled to the sampled tube
/// diameter (1% to 10% of `d_o`); the stored bounds for that coordinate
/// are the absolute extremes used for initialization only.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PriorBox {
    pub lower: [f64; DesignVector::DIM],
    pub upper: [f64; DesignVector::DIM],
}

const DTB_INDEX: usize = 2;

impl PriorBox {
    /// Standard TEMA-style ranges for a liquid-liquid exchanger.
    pub fn standard() -> Self {
        let do_lo = 0.015_88;
        let do_hi = 0.050_8;
        Self {
            lower: [0.050_8, 0.15, 0.01 * do_lo, 0.003_2, 2.438, do_lo, 0.001_651],
            upper: [0.254, 0.45, 0.10 * do_hi, 0.011, 11.58, do_hi, 0.004_572],
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        for i in 0..DesignVector::DIM {
            if !(self.lower[i].is_finite()
                && self.upper[i].is_finite()
                && self.lower[i] < self.upper[i])
            {
                return Err(ModelError::InvalidCase(format!(
                    "prior bounds for {} are not an interval: [{}, {}]",
                    DesignVector::FIELD_NAMES[i],
                    self.lower[i],
                    self.upper[i]
                )));
            }
        }
        Ok(())
    }

    /// Effective bounds for coordinate `i` given the rest of the point.
    pub fn bounds_at(&self, i: usize, x: &DesignVector) -> (f64, f64) {
        if i == DTB_INDEX {
            (
                self.lower[i].max(0.01 * x.tube_outer_diameter_m),
                self.upper[i].min(0.10 * x.tube_outer_diameter_m),
            )
        } else {
            (self.lower[i], self.upper[i])
        }
    }

    pub fn contains(&self, x: &DesignVector) -> bool {
        let arr = x.to_array();
        (0..DesignVector::DIM).all(|i| {
            let (lo, hi) = self.bounds_at(i, x);
            arr[i] >= lo && arr[i] <= hi
        })
    }

    /// Box midpoint, with the clearance placed mid-range for the midpoint
    /// tube diameter.
    pub fn midpoint(&self) -> DesignVector {
        let mut mid = [0.0; DesignVector::DIM];
        for i in 0..DesignVector::DIM {
            mid[i] = 0.5 * (self.lower[i] + self.upper[i]);
        }
        let mut x = DesignVector::from_array(mid);
        x.tube_baffle_clearance_m = 0.055 * x.tube_outer_diameter_m;
        x
    }

    /// Diagonal covariance with standard deviation a quarter of each range.
    pub fn initial_covariance(&self) -> DMatrix<f64> {
        let mut c = DMatrix::zeros(DesignVector::DIM, DesignVector::DIM);
        for i in 0..DesignVector::DIM {
            let s = (self.upper[i] - self.lower[i]) / 4.0;
            c[(i, i)] = s * s;
        }
        c
    }
}

/// The sampling target: flat prior inside the box, Gaussian likelihood on
/// the rated area and pumping power.
pub struct DesignPosterior {
    pub case: CaseSpec,
    pub layout: LayoutConfig,
    pub prior: PriorBox,
    pub target: TargetSpec,
    infeasible: AtomicU64,
}

impl DesignPosterior {
    pub fn new(
        case: CaseSpec,
        layout: LayoutConfig,
        prior: PriorBox,
        target: TargetSpec,
    ) -> Result<Self, ModelError> {
        case.validate()?;
        layout.validate()?;
        prior.validate()?;
        target.validate()?;
        Ok(Self {
            case,
            layout,
            prior,
            target,
            infeasible: AtomicU64::new(0),
        })
    }

    /// Rated designs that failed the thermal-hydraulic model so far.
    pub fn infeasible_count(&self) -> u64 {
        self.infeasible.load(Ordering::Relaxed)
    }

    pub fn log_prior(&self, x: &DesignVector) -> f64 {
        if self.prior.contains(x) {
            0.0
        } else {
            f64::NEG_INFINITY
        }
    }

    pub fn log_likelihood(&self, area_m2: f64, pumping_power_w: f64) -> f64 {
        let (sa, sp) = self.target.sigmas();
        let da = (area_m2 - self.target.area_m2) / sa;
        let dp = (pumping_power_w - self.target.pumping_power_w) / sp;
        -0.5 * (da * da + dp * dp)
    }

    pub fn initial_state(&self) -> DVector<f64> {
        DVector::from_row_slice(&self.prior.midpoint().to_array())
    }
}

impl Target for DesignPosterior {
    fn dim(&self) -> usize {
        DesignVector::DIM
    }

    fn evaluate(&self, x: &DVector<f64>) -> Evaluation {
        let design = DesignVector::from_slice(x.as_slice())
            .expect("sampler state has the posterior dimension");
        if self.log_prior(&design) == f64::NEG_INFINITY {
            return Evaluation {
                log_density: f64::NEG_INFINITY,
                observables: vec![f64::NAN, f64::NAN],
            };
        }
        match size_exchanger(&design, &self.case, &self.layout) {
            Ok(sized) => Evaluation {
                log_density: self.log_likelihood(sized.area_m2, sized.pumping_power_w),
                observables: vec![sized.area_m2, sized.pumping_power_w],
            },
            Err(_) => {
                self.infeasible.fetch_add(1, Ordering::Relaxed);
                Evaluation {
                    log_density: f64::NEG_INFINITY,
                    observables: vec![f64::NAN, f64::NAN],
                }
            }
        }
    }

    fn observable_names(&self) -> Vec<String> {
        vec!["Ao".into(), "Pst".into()]
    }
}
