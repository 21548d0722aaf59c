//! End-to-end acceptance checks against the published case study and
//! against analytically known sampler behavior. Each test prints a single
//! PASS/FAIL line (visible with `--nocapture` or on failure).

use nalgebra::{DMatrix, DVector};
use rand::prelude::*;
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

use sthx_core::cost::{annuity_factor, pressure_factor, purchase_cost, CostParams};
use sthx_core::decision::{confidence_ellipse, select_min_tac, Ellipse};
use sthx_core::dram::{
    batch_covariance, dr_log_alpha, DramConfig, DramSampler, Evaluation, RunningCovariance,
    SampleRecord, Target,
};
use sthx_core::thermo::DesignVector;
use sthx_core::RunConfig;

fn verdict(name: &str, ok: bool, detail: &str) {
    println!(
        "ACCEPTANCE {name}: {} — {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn within(actual: f64, expected: f64, rel: f64) -> bool {
    (actual - expected).abs() <= rel * expected.abs()
}

/// Deterministic rating of the three published designs against the
/// published area and pressure-drop figures (±15%).
///
/// Known deviation: the published pressure drops are mutually inconsistent
/// with the published equation chain (the three tube-side values are nearly
/// identical across radically different geometries, which no consistent
/// rating model reproduces); see README "Deviations from the published
/// case study". The area checks carry the same reconstructed-coefficient
/// uncertainty. This test states the published numbers verbatim and is
/// expected to stay partially red.
#[test]
fn criterion_1_published_design_ratings() {
    let cfg = RunConfig::default();
    let columns: [(&str, [f64; 7], [f64; 3]); 3] = [
        (
            "dram-mean",
            [0.0956, 0.2310, 0.00024864, 0.0034, 4.292, 0.0234, 0.00205],
            [37.16, 21632.0, 8697.0],
        ),
        (
            "single-objective",
            [0.06, 0.25, 0.000381, 0.003, 10.7, 0.0381, 0.003405],
            [37.14, 22600.0, 8600.0],
        ),
        (
            "multi-objective",
            [0.079, 0.16515, 0.000204, 0.003279, 3.426, 0.019578, 0.001652],
            [37.14, 20620.0, 8584.0],
        ),
    ];

    let start = std::time::Instant::now();
    let mut all_ok = true;
    let mut details = Vec::new();
    for (name, x, expected) in &columns {
        let x = DesignVector::from_slice(x).unwrap();
        let report = sthx_core::evaluate_design(&cfg, &x).unwrap();
        let got = [
            report.sizing.area_m2,
            report.sizing.shell_dp.dp_s_pa,
            report.sizing.tube_dp_pa,
        ];
        for ((label, actual), target) in ["Ao", "dPs", "dPt"].iter().zip(got).zip(expected) {
            let ok = within(actual, *target, 0.15);
            all_ok &= ok;
            details.push(format!(
                "{name} {label} {actual:.1} vs {target:.1} {}",
                if ok { "ok" } else { "OFF" }
            ));
        }
    }
    let elapsed = start.elapsed();
    let fast = elapsed.as_secs_f64() < 1.0;
    all_ok &= fast;

    verdict(
        "1 (published design ratings ±15%)",
        all_ok,
        &format!("{}; runtime {elapsed:?}", details.join("; ")),
    );
    assert!(fast, "rating three designs took {elapsed:?}");
    assert!(all_ok, "{}", details.join("\n"));
}

/// Full seeded pipeline on the bundled case: stability, posterior mean of
/// the rated area, and the min-TAC comparison against the re-rated
/// multi-objective reference.
///
/// Known deviation: the final sub-check is expected red. The published
/// 3.52% TAC reduction compares against the reference at its *published*
/// operating point (≈403 W of pumping power). Re-rating the reference
/// through this model yields ≈126 W and a TAC below anything in the
/// posterior's support, so the inequality cannot hold under a
/// self-consistent rating; see README.
#[test]
fn criterion_2_seeded_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = RunConfig::default();
    cfg.output.directory = dir.path().to_path_buf();
    assert_eq!(cfg.dram.n_samples, 30_000);

    let start = std::time::Instant::now();
    let outcome = sthx_core::run(&cfg).unwrap();
    let elapsed = start.elapsed();

    let stable = outcome.summary.stability.stable;
    let ao_mean = outcome
        .summary
        .variables
        .iter()
        .find(|v| v.name == "Ao")
        .unwrap()
        .mean;
    let ao_ok = (33.0..=41.0).contains(&ao_mean);
    let chosen_tac = outcome.decision.chosen.cost.tac_per_yr;
    let ref_tac = outcome
        .decision
        .reference_designs
        .iter()
        .find(|r| r.name == "multi-objective")
        .unwrap()
        .tac_per_yr;
    let tac_ok = chosen_tac <= ref_tac;
    let fast = elapsed.as_secs_f64() < 60.0;

    let ok = stable && ao_ok && tac_ok && fast;
    verdict(
        "2 (seeded 30k pipeline)",
        ok,
        &format!(
            "stable={stable} (max Rhat {:.4}); mean Ao {ao_mean:.2} in [33,41]={ao_ok}; \
             min TAC {chosen_tac:.2} vs multi-objective {ref_tac:.2} ({:+.2}%); runtime {elapsed:?}",
            outcome.summary.stability.max_rhat,
            100.0 * (1.0 - chosen_tac / ref_tac),
        ),
    );
    assert!(fast, "pipeline took {elapsed:?}");
    assert!(stable, "chain did not converge");
    assert!(ao_ok, "posterior mean area {ao_mean:.2} outside [33, 41]");
    assert!(
        tac_ok,
        "min TAC {chosen_tac:.2} exceeds re-rated multi-objective reference {ref_tac:.2}"
    );
}

struct Gaussian2d {
    precision: DMatrix<f64>,
}

impl Target for Gaussian2d {
    fn dim(&self) -> usize {
        2
    }
    fn evaluate(&self, x: &DVector<f64>) -> Evaluation {
        Evaluation::bare(-0.5 * (x.transpose() * &self.precision * x)[(0, 0)])
    }
}

/// Sampler accuracy on a correlated Gaussian with known moments.
#[test]
fn criterion_3_gaussian_moments() {
    let rho: f64 = 0.9;
    let cov = DMatrix::from_row_slice(2, 2, &[1.0, rho, rho, 1.0]);
    let target = Gaussian2d {
        precision: cov.clone().try_inverse().unwrap(),
    };

    let cfg = DramConfig::default();
    let c0 = DMatrix::identity(2, 2);
    let rng = ChaCha12Rng::seed_from_u64(2024);
    let mut sampler =
        DramSampler::new(&target, cfg.clone(), DVector::zeros(2), c0, rng).unwrap();

    let n = 50_000u64;
    let mut states = Vec::with_capacity(n as usize);
    sampler.run(&target, n, |r| states.push(r.state.clone()));

    let sample_cov = batch_covariance(&states).unwrap();
    let mean = states.iter().sum::<DVector<f64>>() / n as f64;

    // Standard error of the mean from batch means, to absorb chain
    // autocorrelation.
    let n_batches = 50;
    let batch = states.len() / n_batches;
    let mut se = [0.0f64; 2];
    for d in 0..2 {
        let means: Vec<f64> = (0..n_batches)
            .map(|b| states[b * batch..(b + 1) * batch].iter().map(|s| s[d]).sum::<f64>() / batch as f64)
            .collect();
        let m = means.iter().sum::<f64>() / n_batches as f64;
        let var = means.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n_batches - 1) as f64;
        se[d] = (var / n_batches as f64).sqrt();
    }
    let mean_ok = mean[0].abs() <= 3.0 * se[0] && mean[1].abs() <= 3.0 * se[1];

    let cov_ok = (0..2).all(|i| (0..2).all(|j| within(sample_cov[(i, j)], cov[(i, j)], 0.10)));

    // The adapted proposal should be the target covariance scaled by s_d
    // (plus a negligible regularization term).
    let adapted = sampler.proposal_covariance() / cfg.effective_sd(2);
    let adapted_ok = (0..2).all(|i| (0..2).all(|j| within(adapted[(i, j)], cov[(i, j)], 0.15)));

    let ok = mean_ok && cov_ok && adapted_ok;
    verdict(
        "3 (correlated Gaussian, 50k steps)",
        ok,
        &format!(
            "mean ({:.4}, {:.4}) vs 3se ({:.4}, {:.4}); cov [{:.3}, {:.3}; {:.3}, {:.3}]; \
             adapted/sd [{:.3}, {:.3}; {:.3}, {:.3}]",
            mean[0], mean[1], 3.0 * se[0], 3.0 * se[1],
            sample_cov[(0, 0)], sample_cov[(0, 1)], sample_cov[(1, 0)], sample_cov[(1, 1)],
            adapted[(0, 0)], adapted[(0, 1)], adapted[(1, 0)], adapted[(1, 1)],
        ),
    );
    assert!(mean_ok, "sample mean outside 3 standard errors");
    assert!(cov_ok, "sample covariance off by more than 10%");
    assert!(adapted_ok, "adapted proposal covariance off by more than 15%");
}

/// Brute-force two-stage delayed-rejection kernel on a 5-point state
/// space: detailed balance and stochasticity to 1e-12.
#[test]
fn criterion_4_discrete_detailed_balance() {
    const N: usize = 5;
    // Unnormalized target and two deliberately asymmetric proposal
    // matrices (zero diagonal, rows summing to 1).
    let pi: [f64; N] = [0.05, 0.30, 0.10, 0.35, 0.20];
    let mut rng = ChaCha12Rng::seed_from_u64(7);
    let mut random_proposal = || {
        let mut q = [[0.0f64; N]; N];
        for (a, row) in q.iter_mut().enumerate() {
            let mut total = 0.0;
            for (b, v) in row.iter_mut().enumerate() {
                if a != b {
                    *v = 0.1 + rng.random::<f64>();
                    total += *v;
                }
            }
            for v in row.iter_mut() {
                *v /= total;
            }
        }
        q
    };
    let q1 = random_proposal();
    let q2 = random_proposal();

    let point = |i: usize| DVector::from_vec(vec![i as f64]);
    let log_q = |stage: usize, x: &DVector<f64>, y: &DVector<f64>| -> f64 {
        let q = if stage == 1 { &q1 } else { &q2 };
        q[x[0] as usize][y[0] as usize].ln()
    };
    let alpha1 = |a: usize, b: usize| -> f64 {
        dr_log_alpha(
            &[&point(a), &point(b)],
            &[pi[a].ln(), pi[b].ln()],
            &log_q,
        )
        .exp()
    };
    let alpha2 = |a: usize, y1: usize, b: usize| -> f64 {
        dr_log_alpha(
            &[&point(a), &point(y1), &point(b)],
            &[pi[a].ln(), pi[y1].ln(), pi[b].ln()],
            &log_q,
        )
        .exp()
    };

    // K(a,b) = stage-1 path + sum over rejected first proposals, plus the
    // explicit rejection mass on the diagonal.
    let mut kernel = [[0.0f64; N]; N];
    for a in 0..N {
        for b in 0..N {
            if b != a {
                kernel[a][b] += q1[a][b] * alpha1(a, b);
            }
            for y1 in 0..N {
                if y1 == a {
                    continue;
                }
                let reject1 = q1[a][y1] * (1.0 - alpha1(a, y1));
                if b != a {
                    kernel[a][b] += reject1 * q2[a][b] * alpha2(a, y1, b);
                } else {
                    // stage 2 rejected as well
                    let stay: f64 = (0..N)
                        .filter(|&y2| y2 != a)
                        .map(|y2| q2[a][y2] * (1.0 - alpha2(a, y1, y2)))
                        .sum();
                    kernel[a][a] += reject1 * stay;
                }
            }
        }
    }

    let mut max_db = 0.0f64;
    let mut max_row = 0.0f64;
    for a in 0..N {
        let row: f64 = kernel[a].iter().sum();
        max_row = max_row.max((row - 1.0).abs());
        for b in 0..N {
            max_db = max_db.max((pi[a] * kernel[a][b] - pi[b] * kernel[b][a]).abs());
        }
    }

    let ok = max_db < 1e-12 && max_row < 1e-12;
    verdict(
        "4 (discrete delayed-rejection detailed balance)",
        ok,
        &format!("max |pi K - pi K'| = {max_db:.2e}; max |row sum - 1| = {max_row:.2e}"),
    );
    assert!(max_db < 1e-12);
    assert!(max_row < 1e-12);
}

/// Recursive covariance update equals the batch computation.
#[test]
fn criterion_5_covariance_recursion() {
    let mut rng = ChaCha12Rng::seed_from_u64(11);
    let dim = 4;
    let mut running = RunningCovariance::new(dim);
    let mut points = Vec::new();
    for _ in 0..200 {
        let x = DVector::from_fn(dim, |_, _| {
            let z: f64 = rng.sample(StandardNormal);
            3.0 * z + 0.5
        });
        running.push(&x);
        points.push(x);
    }
    let batch = batch_covariance(&points).unwrap();
    let recursive = running.covariance().unwrap();
    let max_err = (&batch - &recursive).abs().max();

    let ok = max_err < 1e-10;
    verdict(
        "5 (covariance recursion vs batch)",
        ok,
        &format!("max element error {max_err:.2e} over 200 points"),
    );
    assert!(ok);
}

/// Cost-correlation golden values.
#[test]
fn criterion_6_cost_goldens() {
    let p = CostParams::default();
    let cp = purchase_cost(37.14, &p).unwrap();
    let cp_ok = within(cp, 6791.0, 0.001);

    let fp = pressure_factor(10.0, &p).unwrap();
    let fp_ok = fp == 1.0;

    let annuity = annuity_factor(0.05, 20);
    let annuity_ok = within(annuity, 0.080243, 1e-4);

    // TAC identity: TAC = C_BM * annuity + OC exactly.
    let cfg = RunConfig::default();
    let x = DesignVector::from_slice(&[0.0956, 0.2310, 0.00024864, 0.0034, 4.292, 0.0234, 0.00205])
        .unwrap();
    let report = sthx_core::evaluate_design(&cfg, &x).unwrap();
    let c = &report.cost;
    let identity_ok =
        c.tac_per_yr == c.bare_module_cost * c.annuity_factor + c.operating_cost_per_yr;

    let ok = cp_ok && fp_ok && annuity_ok && identity_ok;
    verdict(
        "6 (cost goldens)",
        ok,
        &format!(
            "Cp(37.14) = {cp:.2}; F_P = {fp}; annuity(0.05, 20) = {annuity:.6}; TAC identity = {identity_ok}"
        ),
    );
    assert!(cp_ok, "purchase cost {cp:.2} vs 6791");
    assert!(fp_ok);
    assert!(annuity_ok);
    assert!(identity_ok);
}

/// Confidence-ellipse coverage on synthetic correlated Gaussian samples.
#[test]
fn criterion_7_ellipse_coverage() {
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    let n = 100_000;
    let mut xs = Vec::with_capacity(n);
    let mut ys = Vec::with_capacity(n);
    for _ in 0..n {
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        xs.push(1.0 + 2.0 * z1);
        ys.push(-3.0 + 0.5 * z1 + 1.5 * z2);
    }

    fn inside(e: &Ellipse, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - e.center[0], y - e.center[1]);
        let (s, c) = e.angle_rad.sin_cos();
        let u = c * dx + s * dy;
        let v = -s * dx + c * dy;
        (u / e.semi_axes[0]).powi(2) + (v / e.semi_axes[1]).powi(2) <= 1.0
    }

    let mut ok = true;
    let mut details = Vec::new();
    for mass in [0.5, 0.9] {
        let e = confidence_ellipse(&xs, &ys, mass).unwrap();
        let inside = xs
            .iter()
            .zip(&ys)
            .filter(|&(&x, &y)| inside(&e, x, y))
            .count();
        let fraction = inside as f64 / n as f64;
        ok &= (fraction - mass).abs() <= 0.02;
        details.push(format!("{:.0}% ellipse covers {:.2}%", 100.0 * mass, 100.0 * fraction));
    }

    verdict("7 (ellipse coverage)", ok, &details.join("; "));
    assert!(ok, "{}", details.join("; "));
}

/// Representative invariants, swept deterministically; the full randomized
/// suites live in tests/properties.rs.
#[test]
fn criterion_8_invariant_sweeps() {
    let cfg = RunConfig::default();
    let layout = cfg.layout_config().unwrap();

    // Rating is a pure function: identical inputs, identical outputs.
    let x = DesignVector::from_slice(&[0.12, 0.3, 0.001, 0.006, 6.0, 0.025, 0.002]).unwrap();
    let a = sthx_core::size_exchanger(&x, &cfg.case, &layout).unwrap();
    let b = sthx_core::size_exchanger(&x, &cfg.case, &layout).unwrap();
    let deterministic = a.area_m2.to_bits() == b.area_m2.to_bits()
        && a.pumping_power_w.to_bits() == b.pumping_power_w.to_bits();

    // Correction factors stay within their physical ranges over a grid.
    let mut factors_ok = true;
    for i in 0..6 {
        for j in 0..6 {
            let x = DesignVector::from_slice(&[
                0.06 + 0.03 * i as f64,
                0.16 + 0.05 * j as f64,
                0.0005,
                0.005,
                3.0 + i as f64,
                0.018 + 0.004 * j as f64,
                0.002,
            ])
            .unwrap();
            if let Ok(r) = sthx_core::size_exchanger(&x, &cfg.case, &layout) {
                // J_c = 0.55 + 0.72 F_c, capped at 1.15 for F_c <= 0.833
                let f_c = r.geometry.crossflow_tube_fraction;
                factors_ok &= (0.55..=1.27).contains(&r.shell.j_c);
                factors_ok &= f_c > 0.833 || r.shell.j_c <= 1.15;
                factors_ok &= r.shell.j_l > 0.0 && r.shell.j_l <= 1.0;
                factors_ok &= r.shell.j_b > 0.0 && r.shell.j_b <= 1.0;
                factors_ok &= r.shell_dp.zeta_b > 0.0 && r.shell_dp.zeta_b <= 1.0;
                factors_ok &= r.shell_dp.zeta_l > 0.0 && r.shell_dp.zeta_l <= 1.0;
                factors_ok &= r.shell_dp.zeta_s == 2.0;
                factors_ok &= r.overall_u_w_m2k < r.shell.h_s;
            }
        }
    }

    // Argmin invariance: scaling every TAC by a positive constant
    // (index ratio for capital, electricity price for operating cost)
    // cannot change the chosen design.
    let records: Vec<SampleRecord> = (0..20)
        .map(|i| SampleRecord {
            step: i as u64,
            state: DVector::from_element(7, 0.1 + 0.001 * i as f64),
            log_density: 0.0,
            observables: vec![30.0 + i as f64, 500.0 - 10.0 * i as f64],
            stage: 1,
        })
        .collect();
    let pick = |scale: f64| {
        let mut params = cfg.cost.clone();
        params.cost_index_ratio *= scale;
        params.electricity_cost_per_kwh *= scale;
        select_min_tac(&records, &cfg.case, &params).unwrap().index
    };
    let argmin_ok = pick(1.0) == pick(7.5);

    let ok = deterministic && factors_ok && argmin_ok;
    verdict(
        "8 (invariant sweeps)",
        ok,
        &format!("deterministic={deterministic}; factor bounds={factors_ok}; argmin invariance={argmin_ok}"),
    );
    assert!(deterministic);
    assert!(factors_ok);
    assert!(argmin_ok);
}
