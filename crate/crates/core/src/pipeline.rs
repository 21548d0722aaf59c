//! End-to-end run: sample the posterior, stream the chain to disk, then
//! summarize and pick the cheapest design.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::cost::{cost_design, CostBreakdown};
use crate::decision::{
    confidence_ellipse, select_min_tac, stability_check, summarize, Ellipse, MinTacChoice,
    StabilityReport, VariableSummary, RHAT_THRESHOLD,
};
use crate::dram::{DramSampler, SampleRecord, Target};
use crate::error::PipelineError;
use crate::posterior::DesignPosterior;
use crate::thermo::{size_exchanger, DesignVector, SizingResult};

/// Ellipse masses emitted for plotting.
pub const ELLIPSE_MASSES: [f64; 2] = [0.5, 0.9];

/// Everything `summary.json` holds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub seed: u64,
    pub n_samples: u64,
    pub burn_in: u64,
    pub acceptance_rate: f64,
    pub infeasible_evaluations: u64,
    pub stability: StabilityReport,
    /// Whether the chain was extended once after a failed stability check.
    pub extended: bool,
    /// Design variables followed by the recorded observables.
    pub variables: Vec<VariableSummary>,
}

/// A rated design, as `decision.json` reports it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatedDesign {
    pub name: String,
    pub design: DesignVector,
    pub area_m2: f64,
    pub pumping_power_w: f64,
    pub tac_per_yr: f64,
}

/// Everything `decision.json` holds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Decision {
    pub chosen: MinTacChoice,
    pub chosen_design: DesignVector,
    pub reference_designs: Vec<RatedDesign>,
}

/// Full rating of one design, for the `evaluate` entry point.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignReport {
    pub design: DesignVector,
    pub sizing: SizingResult,
    pub cost: CostBreakdown,
}

/// Artifact paths plus the in-memory results.
#[derive(Debug)]
pub struct RunOutcome {
    pub summary: RunSummary,
    pub decision: Decision,
    pub chain_csv: Option<PathBuf>,
    pub summary_json: Option<PathBuf>,
    pub ellipses_csv: Option<PathBuf>,
    pub decision_json: Option<PathBuf>,
    pub checkpoints_json: Option<PathBuf>,
}

/// Rate a single design under a configuration: size it, then cost it.
pub fn evaluate_design(
    cfg: &RunConfig,
    design: &DesignVector,
) -> Result<DesignReport, PipelineError> {
    let layout = cfg.layout_config()?;
    let sizing = size_exchanger(design, &cfg.case, &layout).map_err(PipelineError::Model)?;
    let cost = cost_design(sizing.area_m2, sizing.pumping_power_w, &cfg.case, &cfg.cost)
        .map_err(PipelineError::Model)?;
    Ok(DesignReport {
        design: *design,
        sizing,
        cost,
    })
}

struct ChainWriter {
    w: Option<csv::Writer<BufWriter<File>>>,
}

impl ChainWriter {
    fn open(path: Option<&Path>) -> Result<Self, PipelineError> {
        let w = match path {
            Some(p) => {
                let mut w = csv::Writer::from_writer(BufWriter::new(File::create(p)?));
                let mut header = vec!["step".to_string()];
                header.extend(DesignVector::FIELD_NAMES.iter().map(|s| s.to_string()));
                header.extend(["Ao", "Pst", "logpi", "stage"].map(String::from));
                w.write_record(&header)?;
                Some(w)
            }
            None => None,
        };
        Ok(Self { w })
    }

    fn write(&mut self, rec: &SampleRecord) -> Result<(), PipelineError> {
        if let Some(w) = &mut self.w {
            let mut row = vec![rec.step.to_string()];
            row.extend(rec.state.iter().map(|v| format!("{v:.17e}")));
            row.extend(rec.observables.iter().map(|v| format!("{v:.17e}")));
            row.push(format!("{:.17e}", rec.log_density));
            row.push(rec.stage.to_string());
            w.write_record(&row)?;
        }
        Ok(())
    }

    fn finish(mut self) -> Result<(), PipelineError> {
        if let Some(w) = &mut self.w {
            w.flush()?;
        }
        Ok(())
    }
}

#[derive(Serialize)]
struct CovarianceCheckpoint {
    step: u64,
    proposal_covariance: Vec<Vec<f64>>,
}

fn covariance_rows(s: &DramSampler) -> Vec<Vec<f64>> {
    let c = s.proposal_covariance();
    (0..c.nrows())
        .map(|i| (0..c.ncols()).map(|j| c[(i, j)]).collect())
        .collect()
}

/// Run the whole pipeline for one configuration.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, PipelineError> {
    cfg.validate()?;
    let layout = cfg.layout_config()?;
    let posterior = DesignPosterior::new(
        cfg.case.clone(),
        layout,
        cfg.prior.clone(),
        cfg.target.clone(),
    )
    .map_err(PipelineError::Model)?;

    let out_dir = &cfg.output.directory;
    std::fs::create_dir_all(out_dir)?;
    let path_if = |on: bool, name: &str| on.then(|| out_dir.join(name));
    let chain_path = path_if(cfg.output.chain_csv, "chain.csv");
    let summary_path = path_if(cfg.output.summary_json, "summary.json");
    let ellipses_path = path_if(cfg.output.ellipses_csv, "ellipses.csv");
    let decision_path = path_if(cfg.output.decision_json, "decision.json");
    let checkpoints_path = out_dir.join("covariance_checkpoints.json");

    let mut sampler = DramSampler::new(
        &posterior,
        cfg.dram_config(),
        posterior.initial_state(),
        cfg.prior.initial_covariance(),
        ChaCha12Rng::seed_from_u64(cfg.dram.seed),
    )
    .map_err(PipelineError::Sampler)?;

    let mut writer = ChainWriter::open(chain_path.as_deref())?;
    let mut records: Vec<SampleRecord> = Vec::with_capacity(cfg.dram.n_samples as usize);
    let mut checkpoints: Vec<CovarianceCheckpoint> = Vec::new();
    let interval = cfg.dram.checkpoint_interval;

    let advance = |sampler: &mut DramSampler,
                       n: u64,
                       records: &mut Vec<SampleRecord>,
                       checkpoints: &mut Vec<CovarianceCheckpoint>,
                       writer: &mut ChainWriter|
     -> Result<(), PipelineError> {
        for _ in 0..n {
            let rec = sampler.step(&posterior);
            writer.write(&rec)?;
            if interval > 0 && rec.step % interval == 0 {
                checkpoints.push(CovarianceCheckpoint {
                    step: rec.step,
                    proposal_covariance: covariance_rows(sampler),
                });
            }
            records.push(rec);
        }
        Ok(())
    };

    advance(
        &mut sampler,
        cfg.dram.n_samples,
        &mut records,
        &mut checkpoints,
        &mut writer,
    )?;

    // stability on the post-adaptation part of the chain; one 50%
    // extension before conceding non-convergence
    let burn_in = cfg.dram.n0.min(cfg.dram.n_samples / 2);
    let post = |records: &[SampleRecord]| -> Vec<DVector<f64>> {
        records[burn_in as usize..]
            .iter()
            .map(|r| r.state.clone())
            .collect()
    };
    let mut stability = stability_check(&post(&records), RHAT_THRESHOLD)
        .map_err(PipelineError::Decision)?;
    let mut extended = false;
    if !stability.stable {
        extended = true;
        advance(
            &mut sampler,
            cfg.dram.n_samples / 2,
            &mut records,
            &mut checkpoints,
            &mut writer,
        )?;
        stability =
            stability_check(&post(&records), RHAT_THRESHOLD).map_err(PipelineError::Decision)?;
    }
    writer.finish()?;

    // summaries over design variables and observables together
    let kept = &records[burn_in as usize..];
    let mut names: Vec<String> = DesignVector::FIELD_NAMES
        .iter()
        .map(|s| s.to_string())
        .collect();
    names.extend(posterior.observable_names());
    let augmented: Vec<DVector<f64>> = kept
        .iter()
        .filter(|r| r.observables.iter().all(|v| v.is_finite()))
        .map(|r| {
            let mut v = r.state.as_slice().to_vec();
            v.extend_from_slice(&r.observables);
            DVector::from_vec(v)
        })
        .collect();
    let variables = summarize(&names, &augmented).map_err(PipelineError::Decision)?;

    let summary = RunSummary {
        seed: cfg.dram.seed,
        n_samples: records.len() as u64,
        burn_in,
        acceptance_rate: sampler.acceptance_rate(),
        infeasible_evaluations: posterior.infeasible_count(),
        stability,
        extended,
        variables,
    };

    // ellipses: each design variable against the rated area
    let mut ellipse_rows: Vec<(String, Ellipse)> = Vec::new();
    let areas: Vec<f64> = augmented.iter().map(|v| v[DesignVector::DIM]).collect();
    for (i, name) in DesignVector::FIELD_NAMES.iter().enumerate() {
        let xs: Vec<f64> = augmented.iter().map(|v| v[i]).collect();
        for mass in ELLIPSE_MASSES {
            match confidence_ellipse(&xs, &areas, mass) {
                Ok(e) => ellipse_rows.push((name.to_string(), e)),
                Err(crate::error::DecisionError::DegenerateEllipse) => {}
                Err(e) => return Err(PipelineError::Decision(e)),
            }
        }
    }

    // decision: cheapest post-burn-in design plus the configured references
    let chosen = select_min_tac(kept, &cfg.case, &cfg.cost).map_err(PipelineError::Decision)?;
    let chosen_design = DesignVector::from_slice(&chosen.design)
        .expect("chain states have the design dimension");
    let mut reference_designs = Vec::new();
    for r in &cfg.reference_designs {
        let report = evaluate_design(cfg, &r.design)?;
        reference_designs.push(RatedDesign {
            name: r.name.clone(),
            design: r.design,
            area_m2: report.sizing.area_m2,
            pumping_power_w: report.sizing.pumping_power_w,
            tac_per_yr: report.cost.tac_per_yr,
        });
    }
    let decision = Decision {
        chosen,
        chosen_design,
        reference_designs,
    };

    if let Some(p) = &summary_path {
        write_json(p, &summary)?;
    }
    if let Some(p) = &decision_path {
        write_json(p, &decision)?;
    }
    if let Some(p) = &ellipses_path {
        write_ellipses(p, &ellipse_rows)?;
    }
    write_json(&checkpoints_path, &checkpoints)?;

    Ok(RunOutcome {
        summary,
        decision,
        chain_csv: chain_path,
        summary_json: summary_path,
        ellipses_csv: ellipses_path,
        decision_json: decision_path,
        checkpoints_json: Some(checkpoints_path),
    })
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), PipelineError> {
    let mut f = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut f, value)
        .map_err(|e| PipelineError::Io(std::io::Error::other(e)))?;
    f.write_all(b"\n")?;
    Ok(())
}

fn write_ellipses(path: &Path, rows: &[(String, Ellipse)]) -> Result<(), PipelineError> {
    let mut w = csv::Writer::from_writer(BufWriter::new(File::create(path)?));
    w.write_record([
        "variable", "mass", "center_x", "center_y", "axis1", "axis2", "angle",
    ])?;
    for (name, e) in rows {
        w.write_record(&[
            name.clone(),
            format!("{}", e.mass),
            format!("{:.17e}", e.center[0]),
            format!("{:.17e}", e.center[1]),
            format!("{:.17e}", e.semi_axes[0]),
            format!("{:.17e}", e.semi_axes[1]),
            format!("{:.17e}", e.angle_rad),
        ])?;
    }
    w.flush()?;
    Ok(())
}
