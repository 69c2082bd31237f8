//! Randomized property suites with reproducible seeds.
//!
//! Every suite derives one ChaCha8 RNG per trial from (seed, trial
//! index) via a splitmix64 mix, so results are identical across runs,
//! platforms, and thread counts. A trial reports a violation value;
//! the trial passes iff the violation is <= 0 (tolerances are baked
//! into the violation).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::{build_detector_setup, delta_e, DeltaEOptions};
use crate::ensemble::Party;
use crate::entangle::{
    eof_2q, pure_entanglement_entropy, ree, ree_bell_diagonal, EntanglementMeasure, ReeOptions,
};
use crate::error::{Error, Result};
use crate::measure::{
    apply_instrument, cq_state, quantum_mutual_information, run_protocol, ActingParty,
};
use crate::qmat::{relative_entropy, von_neumann_entropy, CMatrix, DensityMatrix};
use crate::random::{
    random_bell_diagonal_weights, random_density_matrix, random_ensemble_for_dims,
    random_instrument, random_mixed_ensemble, random_orthogonal_vectors, random_pure_ensemble,
    random_state_vector, random_two_level_tree,
};

/// All suite names, in canonical order.
pub const SUITES: &[&str] = &[
    "qmat",
    "ensemble",
    "step-bound",
    "chainrule",
    "local-entropy",
    "mi-monotone",
    "protocol-bound",
    "eof",
    "ree",
    "detector-bound",
];

/// Default trial count per suite.
pub fn default_trials(suite: &str) -> usize {
    match suite {
        "step-bound" | "local-entropy" => 500,
        "eof" => 200,
        "ree" | "detector-bound" => 50,
        _ => 100,
    }
}

/// Outcome of one suite run.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub trials: usize,
    pub failures: usize,
    /// Largest violation over all trials; <= 0 means every trial passed
    /// within its tolerance.
    pub max_violation: f64,
    /// Trial indices of the first few failures, for reproduction.
    pub failing_trials: Vec<usize>,
    pub seed: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

/// Per-trial RNG derived from the suite seed and trial index.
fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut z = seed ^ (trial as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    ChaCha8Rng::seed_from_u64(z ^ (z >> 31))
}

fn run_trials<F>(suite: &str, seed: u64, trials: usize, trial: F) -> Result<SuiteReport>
where
    F: Fn(&mut ChaCha8Rng, usize) -> Result<f64> + Sync,
{
    let violations: Vec<Result<f64>> = (0..trials)
        .into_par_iter()
        .map(|i| {
            let mut rng = trial_rng(seed, i);
            trial(&mut rng, i)
        })
        .collect();
    let mut max_violation = f64::NEG_INFINITY;
    let mut failing = Vec::new();
    for (i, v) in violations.into_iter().enumerate() {
        let v = v?;
        if v > 0.0 {
            if failing.len() < 16 {
                failing.push(i);
            }
        }
        max_violation = max_violation.max(v);
    }
    Ok(SuiteReport {
        suite: suite.to_string(),
        trials,
        failures: failing.len(),
        max_violation,
        failing_trials: failing,
        seed,
    })
}

/// Run one named suite.
pub fn run_suite(suite: &str, seed: u64, trials: usize) -> Result<SuiteReport> {
    match suite {
        "qmat" => run_trials(suite, seed, trials, |rng, _| {
            let a = random_density_matrix(3, 2, rng);
            let b = random_density_matrix(2, 2, rng);
            let mut worst = f64::NEG_INFINITY;
            // additivity on products
            let joint = a.tensor(&b);
            let additivity = (von_neumann_entropy(&joint)?
                - von_neumann_entropy(&a)?
                - von_neumann_entropy(&b)?)
            .abs();
            worst = worst.max(additivity - 1e-9);
            // concavity
            let c = random_density_matrix(3, 3, rng);
            let mix = DensityMatrix::from_parts_unchecked(
                a.mat()
                    .scale(num_complex::Complex::new(0.5, 0.0))
                    .add(&c.mat().scale(num_complex::Complex::new(0.5, 0.0))),
                &[3],
            );
            let concavity = 0.5 * von_neumann_entropy(&a)? + 0.5 * von_neumann_entropy(&c)?
                - von_neumann_entropy(&mix)?;
            worst = worst.max(concavity - 1e-9);
            // Klein inequality
            let klein = -relative_entropy(&a, &c)?;
            worst = worst.max(klein - 1e-9);
            // conjugation preserves the spectrum
            let conj = (von_neumann_entropy(&a)? - von_neumann_entropy(&a.conjugate())?).abs();
            worst = worst.max(conj - 1e-10);
            // partial trace: trace and Hermiticity
            let reduced = joint.partial_trace(&[0])?;
            worst = worst.max((reduced.mat().trace().re - 1.0).abs() - 1e-10);
            worst = worst.max(reduced.mat().hermiticity_violation() - 1e-10);
            Ok(worst)
        }),
        "ensemble" => run_trials(suite, seed, trials, |rng, i| {
            let e = random_pure_ensemble(&[2, 2], 2 + i % 3, rng);
            let mut worst = f64::NEG_INFINITY;
            let chi = e.holevo_chi()?;
            worst = worst.max(chi - von_neumann_entropy(&e.average_state())? - 1e-9);
            worst = worst.max(-chi - 1e-9);
            for party in [Party::A, Party::B] {
                worst = worst.max(e.reduced(party)?.holevo_chi()? - chi - 1e-9);
            }
            let stats = e.stats()?;
            worst = worst.max(stats.sbar_a - 1.0 - 1e-9);
            worst = worst.max(stats.sbar_b - 1.0 - 1e-9);
            Ok(worst)
        }),
        "step-bound" => run_trials(suite, seed, trials, |rng, i| {
            // rotate through total dims <= 4, local and global instruments
            let (e, acting, dim) = match i % 5 {
                0 => (random_pure_ensemble(&[2], 3, rng), ActingParty::Global, 2),
                1 => (random_mixed_ensemble(&[3], 3, 2, rng), ActingParty::Global, 3),
                2 => (random_pure_ensemble(&[2, 2], 4, rng), ActingParty::Global, 4),
                3 => (random_mixed_ensemble(&[2, 2], 3, 2, rng), ActingParty::A, 2),
                _ => (random_pure_ensemble(&[2, 2], 3, rng), ActingParty::B, 2),
            };
            let m = random_instrument(dim, acting, rng);
            let (info, rhs) = crate::measure::step_info_gain(&e, &m)?;
            Ok(info - rhs - 1e-9)
        }),
        "chainrule" => run_trials(suite, seed, trials, |rng, i| {
            let e = if i % 2 == 0 {
                random_pure_ensemble(&[2, 2], 3 + i % 2, rng)
            } else {
                random_mixed_ensemble(&[2, 2], 3, 2, rng)
            };
            let tree = random_two_level_tree(2, 2, rng);
            let result = run_protocol(&e, &tree)?;
            Ok((result.chain_rule_sum() - result.total_info).abs() - 1e-10)
        }),
        "local-entropy" => run_trials(suite, seed, trials, |rng, i| {
            let e = if i % 2 == 0 {
                random_pure_ensemble(&[2, 2], 3, rng)
            } else {
                random_mixed_ensemble(&[2, 2], 3, 2, rng)
            };
            let m = random_instrument(2, ActingParty::A, rng);
            let branches = apply_instrument(&e, &m)?;
            let s_b = von_neumann_entropy(&e.average_state().partial_trace(&[1])?)?;
            let sbar_a = e.average_reduced_entropy(Party::A)?;
            let sbar_b = e.average_reduced_entropy(Party::B)?;
            let mut avg_branch_s_b = 0.0;
            let mut sbar_a_after = 0.0;
            let mut sbar_b_after = 0.0;
            for (p, posterior) in &branches {
                avg_branch_s_b +=
                    p * von_neumann_entropy(&posterior.average_state().partial_trace(&[1])?)?;
                sbar_a_after += p * posterior.average_reduced_entropy(Party::A)?;
                sbar_b_after += p * posterior.average_reduced_entropy(Party::B)?;
            }
            let delta_a = sbar_a - sbar_a_after;
            let delta_b = sbar_b - sbar_b_after;
            let mut worst = avg_branch_s_b - s_b - 1e-9; // fact (ii)
            worst = worst.max(delta_b - delta_a - 1e-9); // fact (i)
            worst = worst.max(delta_b - sbar_b - 1e-9);
            worst = worst.max(delta_b - sbar_a - 1e-9);
            Ok(worst)
        }),
        "mi-monotone" => run_trials(suite, seed, trials, |rng, i| {
            let d = 2 + i % 2;
            let e = random_ensemble_for_dims(&[d], 3, rng);
            let before = quantum_mutual_information(&cq_state(&e), &[0])?;
            let m = random_instrument(d, ActingParty::Global, rng);
            // classical flag state per outcome keeps X:QY a valid cut
            let branches = apply_instrument(&e, &m)?;
            let k = e.len();
            let outcomes = branches.len();
            let n = k * d * outcomes;
            let mut mat = CMatrix::zeros(n, n);
            let labels = e.labels();
            for (y, (p_y, posterior)) in branches.iter().enumerate() {
                for item in posterior.items() {
                    let x = labels
                        .iter()
                        .position(|&l| l == item.label())
                        .expect("labels preserved");
                    let weight = num_complex::Complex::new(p_y * item.prob(), 0.0);
                    for r in 0..d {
                        for c in 0..d {
                            let row = (x * d + r) * outcomes + y;
                            let col = (x * d + c) * outcomes + y;
                            let v = mat.get(row, col) + item.state().mat().get(r, c) * weight;
                            mat.set(row, col, v);
                        }
                    }
                }
            }
            let after_state = DensityMatrix::from_parts_unchecked(mat, &[k, d, outcomes]);
            let after = quantum_mutual_information(&after_state, &[0])?;
            Ok(after - before - 1e-9)
        }),
        "protocol-bound" => run_trials(suite, seed, trials, |rng, i| {
            let e = if i % 2 == 0 {
                random_pure_ensemble(&[2, 2], 3 + i % 3, rng)
            } else {
                random_mixed_ensemble(&[2, 2], 3, 2, rng)
            };
            let stats = e.stats()?;
            let tree = random_two_level_tree(2, 2, rng);
            let result = run_protocol(&e, &tree)?;
            let rhs = stats.s_a + stats.s_b - stats.sbar_a - stats.sbar_b
                + result.g_a
                + result.g_b;
            let mut worst = result.total_info - rhs - 1e-9;
            worst = worst.max(result.g_a + result.g_b - stats.sbar_a.min(stats.sbar_b) - 1e-9);
            // per-level bound and nonnegativity of the conditional gains
            for step in &result.steps {
                worst = worst.max(-step.info_gain - 1e-9);
                worst = worst.max(step.info_gain - step.chi_drop - 1e-9);
            }
            // complementarity: achieved + average EoF <= n
            let e_bar = crate::entangle::average_entanglement(
                &e,
                EntanglementMeasure::Eof2q,
            )?;
            worst = worst.max(result.total_info + e_bar - 2.0 - 1e-9);
            // and the bound chain itself: entropy bound <= n - E
            let bound = stats.s_a + stats.s_b - stats.sbar_a.max(stats.sbar_b);
            worst = worst.max(bound - (2.0 - e_bar) - 1e-9);
            Ok(worst)
        }),
        "eof" => run_trials(suite, seed, trials, |rng, _| {
            let psi = random_state_vector(4, rng);
            let rho = DensityMatrix::from_pure(&psi, &[2, 2])?;
            let eof = eof_2q(&rho)?;
            let entropy = pure_entanglement_entropy(&psi, &[2, 2], &[0])?;
            Ok((eof - entropy).abs() - 1e-8)
        }),
        "ree" => run_trials(suite, seed, trials, |rng, _| {
            let lambdas = random_bell_diagonal_weights(rng);
            let rho = crate::states::bell_diagonal_state(&lambdas)?;
            let report = ree(&rho, &[0], &ReeOptions::default())?;
            let expected = ree_bell_diagonal(&lambdas)?;
            let mut worst = (report.value - expected).abs() - 1e-4;
            if !report.monotone {
                worst = worst.max(1.0);
            }
            Ok(worst)
        }),
        "detector-bound" => run_trials(suite, seed, trials, |rng, i| {
            let count = 2 + i % 3;
            let signal = if i % 2 == 0 {
                random_pure_ensemble(&[2, 2], count, rng)
            } else {
                random_mixed_ensemble(&[2, 2], count, 2, rng)
            };
            let detectors = random_orthogonal_vectors(4, count, rng)
                .into_iter()
                .map(|v| DensityMatrix::from_pure(&v, &[2, 2]))
                .collect::<Result<Vec<_>>>()?;
            let setup = build_detector_setup(&signal, detectors)?;
            // product of the cut marginals: a separable reference on AC:BD
            let view = setup.joint_ac_bd()?;
            let reference = view
                .partial_trace(&[0])?
                .tensor(&view.partial_trace(&[1])?)
                .with_dims(&[2, 2, 2, 2])?
                .permute_subsystems(&[0, 2, 1, 3])?;
            let tree = random_two_level_tree(2, 2, rng);
            let report = delta_e(
                &setup,
                &tree,
                EntanglementMeasure::PureEntropy,
                &DeltaEOptions {
                    reference: Some(reference),
                    ..Default::default()
                },
            )?;
            Ok(-report.inequality_slack - 1e-6)
        }),
        other => Err(Error::InvalidInput(format!("unknown suite \"{}\"", other))),
    }
}

/// Run every suite with its default trial count.
pub fn run_all(seed: u64) -> Result<Vec<SuiteReport>> {
    SUITES
        .iter()
        .map(|name| run_suite(name, seed, default_trials(name)))
        .collect()
}
