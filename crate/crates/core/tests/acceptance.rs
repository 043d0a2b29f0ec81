//! Acceptance suite: one test per numbered criterion, each printing a
//! PASS/FAIL line (visible with `--nocapture`). Criterion 9 pins a 2%
//! classical-limit band at q = 0.999 that the formulas themselves exceed by
//! 0.19 percentage points at a single lattice corner; that check and the
//! exit-status half of criterion 10 fail honestly rather than loosening the
//! thresholds.

use std::process::Command;

use qorderstats::report::IdentityCheck;
use qorderstats::suite::{
    classical_limit_suite, dq_suite, heine_conditional_suite, heine_pmf_suite, identity_suite,
    moment_suite, multinomial_suite, normalization_suite, specialization_suite, SuiteConfig,
};

const SEED: u64 = 42;
const TRIALS: u64 = 1_000_000;

fn config() -> SuiteConfig {
    SuiteConfig {
        seed: SEED,
        trials: TRIALS,
    }
}

fn assert_section(label: &str, checks: &[IdentityCheck]) {
    let asserted: Vec<&IdentityCheck> = checks.iter().filter(|c| c.asserted).collect();
    let failed: Vec<&&IdentityCheck> = asserted.iter().filter(|c| !c.passed).collect();
    if failed.is_empty() {
        println!("PASS {label} ({} checks)", asserted.len());
    } else {
        println!(
            "FAIL {label} ({} of {} checks failed)",
            failed.len(),
            asserted.len()
        );
        for f in &failed {
            println!(
                "  {} [{}]: lhs={} rhs={} rel_err={:.3e} abs_err={:.3e}",
                f.name, f.params, f.lhs, f.rhs, f.rel_err, f.abs_err
            );
        }
        panic!("{label}: {} checks failed", failed.len());
    }
}

#[test]
fn criterion_1_identity_suite() {
    let checks = identity_suite().expect("suite evaluates");
    assert_section("criterion 1: q-series identity lattice", &checks);
}

#[test]
fn criterion_2_multinomial_oracles() {
    let checks = multinomial_suite().expect("suite evaluates");
    assert_section(
        "criterion 2: q-multinomial oracles and Fubini counts",
        &checks,
    );
    // the literal weighting is reported but never asserted
    assert!(checks.iter().any(|c| !c.asserted));
}

#[test]
fn criterion_3_normalizations() {
    let checks = normalization_suite().expect("suite evaluates");
    assert_section("criterion 3: density normalizations", &checks);
}

#[test]
fn criterion_4_dq_consistency() {
    let checks = dq_suite().expect("suite evaluates");
    assert_section("criterion 4: d_q F = f consistency", &checks);
}

#[test]
fn criterion_5_specialization() {
    let checks = specialization_suite().expect("suite evaluates");
    assert_section("criterion 5: generic vs closed specialization", &checks);
}

#[test]
fn criterion_6_moments_and_sampler() {
    let checks = moment_suite(&config()).expect("suite evaluates");
    assert_section("criterion 6: q-uniform moments and sampler", &checks);
}

#[test]
fn criterion_7_heine_pmf() {
    let checks = heine_pmf_suite(&config()).expect("suite evaluates");
    assert_section("criterion 7: Heine pmf vs DP oracle and MC", &checks);
}

#[test]
fn criterion_8_conditional_waiting_time() {
    let checks = heine_conditional_suite(&config()).expect("suite evaluates");
    assert_section("criterion 8: conditional waiting-time theorem", &checks);
}

#[test]
fn criterion_9_classical_limit() {
    // Known infeasible corner: at (nu=5, k=1, y/t=0.8) the q = 0.999
    // deformation of the density is intrinsically 2.19% > 2%. The threshold
    // stays pinned; the failure is genuine and expected.
    let checks = classical_limit_suite().expect("suite evaluates");
    assert_section("criterion 9: classical limit", &checks);
}

#[test]
fn criterion_10_cli_verify() {
    let exe = env!("CARGO_BIN_EXE_qstat");
    let run = || {
        Command::new(exe)
            .args([
                "verify",
                "--q",
                "0.5",
                "--tolerance",
                "1e-8",
                "--seed",
                "42",
                "--reproducible",
            ])
            .output()
            .expect("qstat runs")
    };
    let first = run();
    let second = run();
    // byte-identical reruns in reproducible mode
    if first.stdout == second.stdout {
        println!("PASS criterion 10a: fixed-seed reruns are byte-identical");
    } else {
        println!("FAIL criterion 10a: reruns differ");
        panic!("reproducible reruns are not byte-identical");
    }
    assert!(!first.stdout.is_empty(), "verify emitted no report");
    // exit status 0 on the full suite; fails while criterion 9 pins an
    // unattainable band (see criterion_9_classical_limit)
    if first.status.code() == Some(0) {
        println!("PASS criterion 10b: verify exits 0 on the full suite");
    } else {
        println!(
            "FAIL criterion 10b: verify exited {:?} (criterion 9's pinned band fails by design)",
            first.status.code()
        );
        panic!("verify did not exit 0");
    }
}
