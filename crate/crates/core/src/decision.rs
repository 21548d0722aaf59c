//! Post-processing of a finished chain: summaries, stability diagnostics,
//! confidence ellipses and the minimum-cost design pick.

use nalgebra::{DVector, Matrix2, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::cost::{cost_design, CostBreakdown, CostParams};
use crate::dram::SampleRecord;
use crate::error::DecisionError;
use crate::thermo::CaseSpec;

/// Default split-chain convergence threshold.
pub const RHAT_THRESHOLD: f64 = 1.05;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariableSummary {
    pub name: String,
    pub mean: f64,
    pub std: f64,
    pub q05: f64,
    pub q95: f64,
}

/// Linear-interpolation quantile of an unsorted sample.
pub fn quantile(values: &[f64], p: f64) -> Result<f64, DecisionError> {
    if values.is_empty() {
        return Err(DecisionError::InsufficientData(
            "quantile of an empty sample".into(),
        ));
    }
    assert!((0.0..=1.0).contains(&p), "quantile level out of range");
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let h = p * (sorted.len() as f64 - 1.0);
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    Ok(sorted[lo] + (h - h.floor()) * (sorted[hi] - sorted[lo]))
}

/// Per-variable mean, standard deviation and 5%/95% quantiles.
pub fn summarize(
    names: &[String],
    samples: &[DVector<f64>],
) -> Result<Vec<VariableSummary>, DecisionError> {
    if samples.len() < 2 {
        return Err(DecisionError::InsufficientData(format!(
            "need at least 2 samples, got {}",
            samples.len()
        )));
    }
    let dim = samples[0].len();
    assert_eq!(names.len(), dim, "one name per variable");
    let n = samples.len() as f64;
    let mut out = Vec::with_capacity(dim);
    for (i, name) in names.iter().enumerate() {
        let col: Vec<f64> = samples.iter().map(|s| s[i]).collect();
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        out.push(VariableSummary {
            name: name.clone(),
            mean,
            std: var.sqrt(),
            q05: quantile(&col, 0.05)?,
            q95: quantile(&col, 0.95)?,
        });
    }
    Ok(out)
}

/// Split-chain potential scale reduction factor for one scalar series.
///
/// The series is split into two halves treated as independent chains.
pub fn split_rhat(series: &[f64]) -> Result<f64, DecisionError> {
    let n = series.len() / 2;
    if n < 2 {
        return Err(DecisionError::InsufficientData(format!(
            "need at least 4 draws for split-chain diagnostics, got {}",
            series.len()
        )));
    }
    let halves = [&series[..n], &series[series.len() - n..]];
    let mut means = [0.0; 2];
    let mut vars = [0.0; 2];
    for (k, half) in halves.iter().enumerate() {
        let m = half.iter().sum::<f64>() / n as f64;
        means[k] = m;
        vars[k] = half.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    }
    let w = 0.5 * (vars[0] + vars[1]);
    let grand = 0.5 * (means[0] + means[1]);
    let b = n as f64 * ((means[0] - grand).powi(2) + (means[1] - grand).powi(2));
    if w <= 0.0 {
        // both halves constant: converged by definition if they agree
        return Ok(if b <= 0.0 { 1.0 } else { f64::INFINITY });
    }
    let var_plus = (n as f64 - 1.0) / n as f64 * w + b / n as f64;
    Ok((var_plus / w).sqrt())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityReport {
    pub rhat: Vec<f64>,
    pub max_rhat: f64,
    pub threshold: f64,
    pub stable: bool,
}

/// Split-chain diagnostics across all variables.
pub fn stability_check(
    samples: &[DVector<f64>],
    threshold: f64,
) -> Result<StabilityReport, DecisionError> {
    if samples.len() < 4 {
        return Err(DecisionError::InsufficientData(format!(
            "need at least 4 samples for stability diagnostics, got {}",
            samples.len()
        )));
    }
    let dim = samples[0].len();
    let mut rhat = Vec::with_capacity(dim);
    for i in 0..dim {
        let col: Vec<f64> = samples.iter().map(|s| s[i]).collect();
        rhat.push(split_rhat(&col)?);
    }
    let max_rhat = rhat.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    Ok(StabilityReport {
        rhat,
        max_rhat,
        threshold,
        stable: max_rhat < threshold,
    })
}

/// A probability-mass ellipse of a 2-D marginal.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Ellipse {
    pub mass: f64,
    pub center: [f64; 2],
    /// Semi-axis lengths, major first.
    pub semi_axes: [f64; 2],
    /// Orientation of the major axis, radians from the first coordinate.
    pub angle_rad: f64,
}

/// Gaussian confidence ellipse containing `mass` probability, from the
/// sample mean and covariance of two coordinates.
pub fn confidence_ellipse(
    xs: &[f64],
    ys: &[f64],
    mass: f64,
) -> Result<Ellipse, DecisionError> {
    assert_eq!(xs.len(), ys.len());
    if xs.len() < 3 {
        return Err(DecisionError::InsufficientData(format!(
            "need at least 3 points for an ellipse, got {}",
            xs.len()
        )));
    }
    assert!(mass > 0.0 && mass < 1.0, "mass must lie in (0, 1)");
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
        sxy += (x - mx) * (y - my);
    }
    let cov = Matrix2::new(sxx, sxy, sxy, syy) / (n - 1.0);
    let eig = SymmetricEigen::new(cov);
    let (mut l1, mut l2) = (eig.eigenvalues[0], eig.eigenvalues[1]);
    let mut v1 = eig.eigenvectors.column(0).into_owned();
    if l2 > l1 {
        std::mem::swap(&mut l1, &mut l2);
        v1 = eig.eigenvectors.column(1).into_owned();
    }
    if l1 <= 0.0 || l2 <= 0.0 {
        return Err(DecisionError::DegenerateEllipse);
    }
    // chi-square(2) quantile has the closed form -2 ln(1 - mass)
    let r2 = -2.0 * (1.0 - mass).ln();
    Ok(Ellipse {
        mass,
        center: [mx, my],
        semi_axes: [(l1 * r2).sqrt(), (l2 * r2).sqrt()],
        angle_rad: v1[1].atan2(v1[0]),
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinTacChoice {
    /// Index into the record slice.
    pub index: usize,
    pub step: u64,
    pub design: Vec<f64>,
    pub area_m2: f64,
    pub pumping_power_w: f64,
    pub cost: CostBreakdown,
}

/// Pick the sampled design with the lowest total annual cost. Records
/// whose observables are not finite are skipped; ties keep the earliest
/// index.
pub fn select_min_tac(
    records: &[SampleRecord],
    case: &CaseSpec,
    cost: &CostParams,
) -> Result<MinTacChoice, DecisionError> {
    let mut best: Option<MinTacChoice> = None;
    for (index, rec) in records.iter().enumerate() {
        let [area, power] = rec.observables[..] else {
            continue;
        };
        if !(area.is_finite() && power.is_finite()) {
            continue;
        }
        let Ok(breakdown) = cost_design(area, power, case, cost) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some(b) => breakdown.tac_per_yr < b.cost.tac_per_yr,
        };
        if better {
            best = Some(MinTacChoice {
                index,
                step: rec.step,
                design: rec.state.as_slice().to_vec(),
                area_m2: area,
                pumping_power_w: power,
                cost: breakdown,
            });
        }
    }
    best.ok_or(DecisionError::NoFeasibleDesign)
}
