//! Delayed-rejection adaptive-Metropolis sampler, generic over the target
//! density.

mod accept;
mod covariance;

pub use accept::{dr_log_alpha, log_sub_exp};
pub use covariance::{batch_covariance, RunningCovariance};

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::SamplerError;

/// Target evaluation at one point: the log density plus any derived
/// quantities worth recording alongside the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub log_density: f64,
    pub observables: Vec<f64>,
}

impl Evaluation {
    pub fn bare(log_density: f64) -> Self {
        Self {
            log_density,
            observables: Vec::new(),
        }
    }
}

/// A (possibly unnormalized) log density the sampler can explore.
pub trait Target {
    fn dim(&self) -> usize;
    fn evaluate(&self, x: &DVector<f64>) -> Evaluation;
    fn observable_names(&self) -> Vec<String> {
        Vec::new()
    }
}

/// Sampler tuning parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DramConfig {
    /// Steps before the adaptive covariance takes over from `C0`.
    pub n0: u64,
    /// Number of delayed-rejection stages per step (1 = plain Metropolis).
    pub n_stages: usize,
    /// Covariance shrink factor per extra stage.
    pub stage_scale: f64,
    /// Scaling of the empirical covariance; defaults to `2.4^2 / d`.
    pub sd: Option<f64>,
    /// Regularization added to the adapted covariance diagonal, relative
    /// to the mean diagonal of `C0`.
    pub epsilon: f64,
    /// Disable to keep proposing from `C0` forever.
    pub adapt: bool,
}

impl Default for DramConfig {
    fn default() -> Self {
        Self {
            n0: 1000,
            n_stages: 2,
            stage_scale: 0.25,
            sd: None,
            epsilon: 1e-10,
            adapt: true,
        }
    }
}

impl DramConfig {
    pub fn validate(&self) -> Result<(), SamplerError> {
        if self.n_stages == 0 {
            return Err(SamplerError::InvalidConfig(
                "need at least one proposal stage".into(),
            ));
        }
        if !(self.stage_scale > 0.0 && self.stage_scale <= 1.0) {
            return Err(SamplerError::InvalidConfig(format!(
                "stage scale must lie in (0, 1], got {}",
                self.stage_scale
            )));
        }
        if self.n0 == 0 {
            return Err(SamplerError::InvalidConfig(
                "adaptation start must be positive".into(),
            ));
        }
        if let Some(sd) = self.sd {
            if !(sd.is_finite() && sd > 0.0) {
                return Err(SamplerError::InvalidConfig(format!(
                    "covariance scaling must be positive, got {sd}"
                )));
            }
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            return Err(SamplerError::InvalidConfig(format!(
                "regularization must be non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }

    pub fn effective_sd(&self, dim: usize) -> f64 {
        self.sd.unwrap_or(2.4 * 2.4 / dim as f64)
    }
}

/// One accepted-or-repeated chain entry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampleRecord {
    pub step: u64,
    pub state: DVector<f64>,
    pub log_density: f64,
    pub observables: Vec<f64>,
    /// Stage that accepted the move, or 0 if every stage rejected.
    pub stage: usize,
}

/// Everything needed to continue a chain, RNG included.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DramSampler {
    cfg: DramConfig,
    dim: usize,
    c0: DMatrix<f64>,
    epsilon_abs: f64,
    step: u64,
    accepted: u64,
    current: DVector<f64>,
    current_eval: Evaluation,
    history: RunningCovariance,
    rng: ChaCha12Rng,
}

impl DramSampler {
    pub fn new<T: Target>(
        target: &T,
        cfg: DramConfig,
        initial: DVector<f64>,
        c0: DMatrix<f64>,
        rng: ChaCha12Rng,
    ) -> Result<Self, SamplerError> {
        cfg.validate()?;
        let dim = target.dim();
        if initial.len() != dim {
            return Err(SamplerError::InvalidStart(format!(
                "initial point has {} components, target expects {dim}",
                initial.len()
            )));
        }
        if c0.nrows() != dim || c0.ncols() != dim {
            return Err(SamplerError::InvalidConfig(format!(
                "initial covariance is {}x{}, target expects {dim}x{dim}",
                c0.nrows(),
                c0.ncols()
            )));
        }
        if Cholesky::new(c0.clone()).is_none() {
            return Err(SamplerError::NotPositiveDefinite);
        }
        let current_eval = target.evaluate(&initial);
        if !current_eval.log_density.is_finite() {
            return Err(SamplerError::InvalidStart(format!(
                "log density at the initial point is {}",
                current_eval.log_density
            )));
        }
        let epsilon_abs = cfg.epsilon * c0.diagonal().mean();
        let mut history = RunningCovariance::new(dim);
        history.push(&initial);
        Ok(Self {
            cfg,
            dim,
            c0,
            epsilon_abs,
            step: 0,
            accepted: 0,
            current: initial,
            current_eval,
            history,
            rng,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step_count(&self) -> u64 {
        self.step
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.step == 0 {
            0.0
        } else {
            self.accepted as f64 / self.step as f64
        }
    }

    pub fn current(&self) -> (&DVector<f64>, &Evaluation) {
        (&self.current, &self.current_eval)
    }

    /// Covariance of the chain history so far, if at least two points.
    pub fn history_covariance(&self) -> Option<DMatrix<f64>> {
        self.history.covariance()
    }

    /// Covariance the next proposal will be drawn from (first stage).
    pub fn proposal_covariance(&self) -> DMatrix<f64> {
        if self.cfg.adapt && self.step >= self.cfg.n0 {
            if let Some(cov) = self.history.covariance() {
                let sd = self.cfg.effective_sd(self.dim);
                let mut c = cov * sd;
                for i in 0..self.dim {
                    c[(i, i)] += sd * self.epsilon_abs;
                }
                if Cholesky::new(c.clone()).is_some() {
                    return c;
                }
            }
        }
        self.c0.clone()
    }

    /// Advance the chain by one step.
    pub fn step<T: Target>(&mut self, target: &T) -> SampleRecord {
        let c = self.proposal_covariance();
        let chol = Cholesky::new(c).expect("proposal covariance is positive definite");
        let l = chol.l();
        let log_det_l: f64 = l.diagonal().iter().map(|v| v.ln()).sum();

        let log_q = |stage: usize, from: &DVector<f64>, to: &DVector<f64>| {
            gaussian_log_density(
                from,
                to,
                &l,
                log_det_l,
                self.cfg.stage_scale.powi(stage as i32 - 1),
            )
        };

        let mut path: Vec<DVector<f64>> = vec![self.current.clone()];
        let mut log_pis: Vec<f64> = vec![self.current_eval.log_density];
        let mut accepted: Option<(usize, DVector<f64>, Evaluation)> = None;

        for stage in 1..=self.cfg.n_stages {
            let scale = self.cfg.stage_scale.powi(stage as i32 - 1).sqrt();
            let mut z = DVector::zeros(self.dim);
            for zi in z.iter_mut() {
                *zi = self.rng.sample(StandardNormal);
            }
            let u: f64 = self.rng.random();
            let y = &self.current + &l * z * scale;
            let eval = target.evaluate(&y);
            path.push(y);
            log_pis.push(eval.log_density);
            let refs: Vec<&DVector<f64>> = path.iter().collect();
            let log_alpha = dr_log_alpha(&refs, &log_pis, &log_q);
            if u.ln() < log_alpha {
                accepted = Some((stage, path.last().unwrap().clone(), eval));
                break;
            }
        }

        self.step += 1;
        let stage = match accepted {
            Some((stage, y, eval)) => {
                self.current = y;
                self.current_eval = eval;
                self.accepted += 1;
                stage
            }
            None => 0,
        };
        self.history.push(&self.current);
        SampleRecord {
            step: self.step,
            state: self.current.clone(),
            log_density: self.current_eval.log_density,
            observables: self.current_eval.observables.clone(),
            stage,
        }
    }

    /// Run `n` steps, handing each record to `sink`.
    pub fn run<T: Target, F: FnMut(&SampleRecord)>(&mut self, target: &T, n: u64, mut sink: F) {
        for _ in 0..n {
            let rec = self.step(target);
            sink(&rec);
        }
    }
}

fn gaussian_log_density(
    mean: &DVector<f64>,
    x: &DVector<f64>,
    l: &DMatrix<f64>,
    log_det_l: f64,
    cov_scale: f64,
) -> f64 {
    let d = mean.len() as f64;
    let diff = x - mean;
    let w = l.solve_lower_triangular(&diff).unwrap();
    -0.5 * d * (2.0 * std::f64::consts::PI * cov_scale).ln()
        - log_det_l
        - 0.5 * w.norm_squared() / cov_scale
}
