use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sthx_core::error::{DecisionError, ModelError, PipelineError};
use sthx_core::thermo::DesignVector;
use sthx_core::RunConfig;

const EXIT_CONFIG: u8 = 2;
const EXIT_INVALID_CASE: u8 = 3;
const EXIT_NO_FEASIBLE_DESIGN: u8 = 4;

#[derive(Parser)]
#[command(name = "sthx", about = "Reverse-sampling design of shell-and-tube heat exchangers")]
struct Cli {
    /// Print the bundled default configuration (TOML) and exit.
    #[arg(long, exclusive = true)]
    print_default_config: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Sample the design posterior and write the decision artifacts.
    Run {
        /// Configuration file (TOML).
        config: PathBuf,
        /// Override the RNG seed from the config.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the sample count from the config.
        #[arg(long)]
        samples: Option<u64>,
        /// Override the output directory from the config.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Rate a single design: size it, cost it, print the report. No sampling.
    Evaluate {
        /// Configuration file (TOML).
        #[arg(long)]
        config: PathBuf,
        /// Seven comma-separated values: Lbc,Bc,dtb,dsb,L,do,t (SI units).
        #[arg(long)]
        design: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    if cli.print_default_config {
        print!("{}", RunConfig::default_toml());
        return ExitCode::SUCCESS;
    }

    let result = match cli.command {
        None => {
            eprintln!("error: no command given (try `sthx run <config>` or `sthx --help`)");
            return ExitCode::from(EXIT_CONFIG);
        }
        Some(Command::Run {
            config,
            seed,
            samples,
            out_dir,
        }) => run(&config, seed, samples, out_dir),
        Some(Command::Evaluate { config, design }) => evaluate(&config, &design),
    };

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn exit_code(err: &PipelineError) -> u8 {
    match err {
        PipelineError::Config(_) => EXIT_CONFIG,
        PipelineError::Model(ModelError::InvalidCase(_)) => EXIT_INVALID_CASE,
        PipelineError::Decision(DecisionError::NoFeasibleDesign) => EXIT_NO_FEASIBLE_DESIGN,
        _ => 1,
    }
}

fn run(
    config: &PathBuf,
    seed: Option<u64>,
    samples: Option<u64>,
    out_dir: Option<PathBuf>,
) -> Result<(), PipelineError> {
    let mut cfg = RunConfig::from_path(config)?;
    if let Some(seed) = seed {
        cfg.dram.seed = seed;
    }
    if let Some(samples) = samples {
        cfg.dram.n_samples = samples;
    }
    if let Some(dir) = out_dir {
        cfg.output.directory = dir;
    }

    let outcome = sthx_core::pipeline::run(&cfg)?;
    let summary = &outcome.summary;

    println!(
        "chain: {} samples (seed {}), acceptance {:.1}%, {} infeasible evaluations",
        summary.n_samples,
        summary.seed,
        100.0 * summary.acceptance_rate,
        summary.infeasible_evaluations,
    );
    println!(
        "stability: max split-Rhat {:.4} ({}{})",
        summary.stability.max_rhat,
        if summary.stability.stable {
            "converged"
        } else {
            "NOT converged"
        },
        if summary.extended {
            ", after one 50% extension"
        } else {
            ""
        },
    );
    println!("posterior (mean, 90% CI):");
    for v in &summary.variables {
        println!(
            "  {:>4}  {:>12.6}  [{:.6}, {:.6}]",
            v.name, v.mean, v.q05, v.q95
        );
    }

    let chosen = &outcome.decision.chosen;
    println!(
        "min-TAC design (step {}): area {:.2} m2, pumping power {:.1} W, TAC {:.2} $/yr",
        chosen.step, chosen.area_m2, chosen.pumping_power_w, chosen.cost.tac_per_yr
    );
    for r in &outcome.decision.reference_designs {
        let reduction = 100.0 * (1.0 - chosen.cost.tac_per_yr / r.tac_per_yr);
        println!(
            "  vs {}: TAC {:.2} $/yr ({:+.2}% reduction)",
            r.name, r.tac_per_yr, reduction
        );
    }

    for path in [
        &outcome.chain_csv,
        &outcome.summary_json,
        &outcome.ellipses_csv,
        &outcome.decision_json,
        &outcome.checkpoints_json,
    ]
    .into_iter()
    .flatten()
    {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn evaluate(config: &PathBuf, design: &str) -> Result<(), PipelineError> {
    let cfg = RunConfig::from_path(config)?;
    let values = design
        .split(',')
        .map(|s| s.trim().parse::<f64>())
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| PipelineError::Config(format!("bad --design: {e}")))?;
    let x = DesignVector::from_slice(&values)
        .map_err(|e| PipelineError::Config(format!("bad --design: {e}")))?;
    let report = sthx_core::pipeline::evaluate_design(&cfg, &x)?;
    let s = &report.sizing;
    println!(
        "sizing: Ao {:.4} m2, Uo {:.2} W/m2K, F {:.4}, {} tubes, Ds {:.4} m ({} iterations{})",
        s.area_m2,
        s.overall_u_w_m2k,
        s.f_factor,
        s.geometry.tube_count,
        s.geometry.shell_diameter_m,
        s.iterations,
        if s.converged { "" } else { ", NOT converged" },
    );
    println!(
        "pressure: shell dP {:.1} Pa, tube dP {:.1} Pa, pumping power {:.2} W",
        s.shell_dp.dp_s_pa, s.tube_dp_pa, s.pumping_power_w
    );
    let c = &report.cost;
    println!(
        "cost: purchase {:.2} $, bare module {:.2} $, operating {:.2} $/yr, TAC {:.2} $/yr",
        c.purchase_cost, c.bare_module_cost, c.operating_cost_per_yr, c.tac_per_yr
    );
    Ok(())
}
