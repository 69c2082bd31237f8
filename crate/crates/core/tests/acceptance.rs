//! Acceptance suite: one test per headline criterion, each printing a
//! pass line with the measured values. Run with `--nocapture` to see the
//! numbers; every tolerance is asserted in code.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use locc_info::bounds::{
    build_detector_setup, delta_e, entropy_bound, verify_protocol_with_result, DeltaEOptions,
};
use locc_info::ensemble::{binary_entropy, Ensemble, Party};
use locc_info::entangle::{ree, ree_bell_diagonal, EntanglementMeasure, ReeOptions};
use locc_info::measure::{optimize_two_round, run_protocol, GridResolution, ProtocolTree};
use locc_info::random::random_bell_diagonal_weights;
use locc_info::states::{
    bell_diagonal_state, bell_ensemble, bell_states, canonical_ensemble, conjugate_detectors,
    copy_classical, partial4_ensemble, tensor_power_ensemble,
};
use locc_info::verify::{run_suite, SuiteReport};

const SEED: u64 = 20250809;

fn assert_suite_clean(report: &SuiteReport) {
    assert_eq!(
        report.failures, 0,
        "suite {} had {} failures (trials {:?}, max violation {:.3e})",
        report.suite, report.failures, report.failing_trials, report.max_violation
    );
}

#[test]
fn criterion_four_bell_ensemble() {
    let start = Instant::now();
    let e = bell_ensemble(None).unwrap();
    let tree = ProtocolTree::two_round_computational(2, 2);
    let (report, result) = verify_protocol_with_result(&e, &tree, 1e-6).unwrap();

    assert!((report.chi - 2.0).abs() < 1e-9);
    assert!((report.entropy_bound - 1.0).abs() < 1e-9);
    let achieved = report.achieved_info.unwrap();
    assert!((achieved - 1.0).abs() < 1e-9);
    let gap = (report.entropy_bound - achieved).abs();
    assert!(gap < 1e-9, "saturation gap {}", gap);
    assert!((result.chain_rule_sum() - achieved).abs() < 1e-10);
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {:?}", elapsed);
    println!(
        "PASS four-bell: chi {:.12}, bound {:.12}, achieved {:.12}, gap {:.2e}, {} ms",
        report.chi,
        report.entropy_bound,
        achieved,
        gap,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_two_bell_states() {
    let bells = bell_states();
    let e = Ensemble::uniform_pure(vec![bells[0].clone(), bells[2].clone()], &[2, 2]).unwrap();
    let report = entropy_bound(&e).unwrap();
    assert!((report.n_minus_e.unwrap() - 1.0).abs() < 1e-9);

    // a two-round LOCC protocol found by grid search
    let (tree, predicted) = optimize_two_round(&e, Party::A, GridResolution::new(6, 6)).unwrap();
    let achieved = run_protocol(&e, &tree).unwrap().total_info;
    assert!((achieved - 1.0).abs() < 1e-9, "achieved {}", achieved);
    assert!((predicted - achieved).abs() < 1e-9);
    println!(
        "PASS two-bell: n-E {:.12}, found protocol achieves {:.12}",
        report.n_minus_e.unwrap(),
        achieved
    );
}

#[test]
fn criterion_saturating_family_sweep() {
    let start = Instant::now();
    let tree = ProtocolTree::two_round_computational(2, 2);
    let mut worst_gap = 0.0f64;
    for i in 0..21 {
        let a1 = i as f64 / 20.0;
        let e = partial4_ensemble(a1).unwrap();
        let report = entropy_bound(&e).unwrap();
        let achieved = run_protocol(&e, &tree).unwrap().total_info;
        let expected = 2.0 - binary_entropy(a1 * a1);
        assert!(
            (achieved - expected).abs() < 1e-9,
            "a1 {}: achieved {} expected {}",
            a1,
            achieved,
            expected
        );
        let n_minus_e = report.n_minus_e.unwrap();
        assert!((achieved - n_minus_e).abs() < 1e-9);
        worst_gap = worst_gap.max((achieved - n_minus_e).abs());
    }

    // one 4x4 instance with 16 states
    let (x, y) = (0.9f64, 0.75f64);
    let e = tensor_power_ensemble(&[x.sqrt(), y.sqrt()]).unwrap();
    assert_eq!(e.len(), 16);
    let tree4 = ProtocolTree::two_round_computational(4, 4);
    let achieved = run_protocol(&e, &tree4).unwrap().total_info;
    let expected = 4.0 - binary_entropy(x) - binary_entropy(y);
    assert!(
        (achieved - expected).abs() < 1e-9,
        "achieved {} expected {}",
        achieved,
        expected
    );
    let report = entropy_bound(&e).unwrap();
    assert!((report.n_minus_e.unwrap() - expected).abs() < 1e-9);

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {:?}", elapsed);
    println!(
        "PASS sweep: 21 partial4 points (worst gap {:.2e}) + 4x4 instance achieving {:.12}, {} ms",
        worst_gap,
        achieved,
        elapsed.as_millis()
    );
}

#[test]
fn criterion_step_bound_randomized() {
    let report = run_suite("step-bound", SEED, 500).unwrap();
    assert_eq!(report.trials, 500);
    assert_suite_clean(&report);
    println!(
        "PASS step-bound: {}/{} inequality holds (max violation {:.3e})",
        report.trials - report.failures,
        report.trials,
        report.max_violation
    );
}

#[test]
fn criterion_chain_rule_identity() {
    let report = run_suite("chainrule", SEED, 100).unwrap();
    assert_suite_clean(&report);
    // max_violation = max |sum - direct| - 1e-10
    assert!(report.max_violation <= 0.0);
    println!(
        "PASS chainrule: 100 random two-level trees, max residual {:.3e} (< 1e-10)",
        report.max_violation + 1e-10
    );
}

#[test]
fn criterion_local_entropy_suite() {
    let report = run_suite("local-entropy", SEED, 500).unwrap();
    assert_suite_clean(&report);
    println!(
        "PASS local-entropy: {}/{} hold (max violation {:.3e})",
        report.trials - report.failures,
        report.trials,
        report.max_violation
    );
}

#[test]
fn criterion_entanglement_oracle_equivalence() {
    let eof = run_suite("eof", SEED, 200).unwrap();
    assert_suite_clean(&eof);

    // REE against the closed form, with a per-state runtime budget
    let mut worst_diff = 0.0f64;
    let mut worst_time = 0.0f64;
    for trial in 0..50u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ (trial * 7919));
        let lambdas = random_bell_diagonal_weights(&mut rng);
        let rho = bell_diagonal_state(&lambdas).unwrap();
        let start = Instant::now();
        let report = ree(&rho, &[0], &ReeOptions::default()).unwrap();
        let elapsed = start.elapsed().as_secs_f64();
        let expected = ree_bell_diagonal(&lambdas).unwrap();
        let diff = (report.value - expected).abs();
        assert!(
            diff < 1e-4,
            "trial {}: REE {} vs closed form {}",
            trial,
            report.value,
            expected
        );
        assert!(elapsed < 2.0, "trial {} took {:.3}s", trial, elapsed);
        worst_diff = worst_diff.max(diff);
        worst_time = worst_time.max(elapsed);
    }
    println!(
        "PASS entangle-oracles: 200 EoF matches (max violation {:.3e}); 50 REE states, max |diff| {:.3e}, max time {:.3}s",
        eof.max_violation, worst_diff, worst_time
    );
}

#[test]
fn criterion_delta_e_experiment() {
    // uniform priors, conjugate detectors
    let signal = canonical_ensemble(2, None).unwrap();
    let detectors = conjugate_detectors(&signal).unwrap();
    let setup = build_detector_setup(&signal, detectors).unwrap();
    let tree = ProtocolTree::two_round_computational(2, 2);
    let report = delta_e(
        &setup,
        &tree,
        EntanglementMeasure::PureEntropy,
        &DeltaEOptions {
            reference: Some(setup.joint().clone()),
            run_ppt_optimizer: true,
            ree_options: None,
        },
    )
    .unwrap();
    assert!((report.h_s - 2.0).abs() < 1e-9);
    assert!((report.e_bar_det - 1.0).abs() < 1e-9);
    assert!(report.e_joint.abs() < 1e-4);
    let ppt = report.e_joint_ppt.expect("optimizer ran");
    assert!(ppt.abs() < 1e-4, "PPT optimizer value {}", ppt);
    assert!((report.delta_e - 1.0).abs() < 1e-4);
    assert!((report.i_locc - 1.0).abs() < 1e-9);
    assert!(report.inequality_slack.abs() < 1e-4);

    // nonuniform priors with the uniform joint as separable reference
    let priors = [0.4, 0.3, 0.2, 0.1];
    let signal_p = canonical_ensemble(2, Some(&priors)).unwrap();
    let detectors_p = conjugate_detectors(&signal_p).unwrap();
    let setup_p = build_detector_setup(&signal_p, detectors_p).unwrap();
    let report_p = delta_e(
        &setup_p,
        &tree,
        EntanglementMeasure::PureEntropy,
        &DeltaEOptions {
            reference: Some(setup.joint().clone()),
            ..Default::default()
        },
    )
    .unwrap();
    assert!((report_p.e_joint - (2.0 - report_p.h_s)).abs() < 1e-9);
    assert!(report_p.inequality_slack >= -1e-6);

    println!(
        "PASS delta-e: uniform (H_s {:.9}, Ebar {:.9}, E_joint {:.2e}, ppt {:.2e}, delta {:.9}, I {:.9}, slack {:.2e}); nonuniform slack {:.6}",
        report.h_s,
        report.e_bar_det,
        report.e_joint,
        ppt,
        report.delta_e,
        report.i_locc,
        report.inequality_slack,
        report_p.inequality_slack
    );
}

#[test]
fn criterion_copy_classical_ensemble() {
    let e = copy_classical(2).unwrap();
    let report = entropy_bound(&e).unwrap();
    assert!((report.chi - 1.0).abs() < 1e-9);

    // Alice alone extracts the full Holevo quantity
    let alice_only = ProtocolTree::computational_round(Party::A, 2);
    let alice_info = run_protocol(&e, &alice_only).unwrap().total_info;
    assert!((alice_info - 1.0).abs() < 1e-9);

    // two-round protocol records a non-positive cooperative gain for Bob
    let tree = ProtocolTree::two_round_computational(2, 2);
    let result = run_protocol(&e, &tree).unwrap();
    assert!((result.total_info - 1.0).abs() < 1e-9);
    assert!(result.g_b <= 1e-12, "g_b = {}", result.g_b);
    println!(
        "PASS copy-classical: chi {:.12}, Alice-only info {:.12}, g_B {:+.3e} (<= 0)",
        report.chi, alice_info, result.g_b
    );
}

#[test]
fn criterion_remaining_property_suites() {
    // the rest of the randomized invariants backing the bound machinery
    for (suite, trials) in [
        ("qmat", 100),
        ("ensemble", 100),
        ("mi-monotone", 100),
        ("protocol-bound", 100),
        ("detector-bound", 50),
    ] {
        let report = run_suite(suite, SEED, trials).unwrap();
        assert_suite_clean(&report);
        println!(
            "PASS {}: {}/{} (max violation {:.3e})",
            suite,
            report.trials - report.failures,
            report.trials,
            report.max_violation
        );
    }
}

#[test]
fn criterion_optimum_not_claimed() {
    // the achievability side is a constructed protocol, never a claimed
    // optimum: the sandwich lower bound must stay below every ceiling
    let e = bell_ensemble(None).unwrap();
    let tree = ProtocolTree::two_round_computational(2, 2);
    let (report, _) = verify_protocol_with_result(&e, &tree, 1e-6).unwrap();
    let achieved = report.achieved_info.unwrap();
    assert!(achieved <= report.operative_ceiling + 1e-9);
    assert!(achieved <= report.chi + 1e-9);
    println!(
        "PASS sandwich: achieved {:.12} <= ceiling {:.12} <= chi {:.12}",
        achieved, report.operative_ceiling, report.chi
    );
}

#[test]
fn criterion_entangled_basis_ceiling_below_n() {
    // a complete orthogonal basis containing an entangled member cannot
    // reach information n under LOCC
    for a1 in [0.3f64, 0.6, 0.9] {
        let e = partial4_ensemble(a1.sqrt()).unwrap();
        let report = entropy_bound(&e).unwrap();
        assert!(
            report.operative_ceiling < report.n - 1e-6,
            "a1^2 {}: ceiling {} vs n {}",
            a1,
            report.operative_ceiling,
            report.n
        );
    }
    println!("PASS entangled-basis: ceiling < n for all partially entangled bases");
}
