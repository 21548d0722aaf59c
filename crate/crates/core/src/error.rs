use thiserror::Error;

/// Errors raised by the thermal-hydraulic and cost models.
#[derive(Debug, Clone, Error)]
pub enum ModelError {
    #[error("invalid case: {0}")]
    InvalidCase(String),

    #[error("temperature cross: terminal differences {dt1:.3} K and {dt2:.3} K must both be positive")]
    TemperatureCross { dt1: f64, dt2: f64 },

    #[error("infeasible configuration: {0}")]
    InfeasibleConfiguration(String),

    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    #[error("sizing diverged after {iterations} iterations (last area {last_area:.4} m2)")]
    Diverged { iterations: usize, last_area: f64 },
}

/// Errors raised by the DRAM sampler.
#[derive(Debug, Clone, Error)]
pub enum SamplerError {
    #[error("invalid sampler configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid chain start: {0}")]
    InvalidStart(String),

    #[error("proposal covariance lost positive definiteness and could not be repaired")]
    NotPositiveDefinite,
}

/// Errors raised by the post-processing / decision stage.
#[derive(Debug, Clone, Error)]
pub enum DecisionError {
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate ellipse: sample covariance is singular")]
    DegenerateEllipse,

    #[error("no feasible design among the evaluated samples")]
    NoFeasibleDesign,
}

/// Configuration-file and pipeline errors.
#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error(transparent)]
    Sampler(#[from] SamplerError),

    #[error(transparent)]
    Decision(#[from] DecisionError),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}
