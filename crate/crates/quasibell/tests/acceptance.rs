//! End-to-end acceptance checks. Each test is one numbered criterion, so
//! the harness output reads as a per-criterion pass/fail report.

use std::time::Instant;

use num_complex::Complex64 as C64;

use quasibell::landau::{drift_over_periods, energy_level, ClassicalState, LandauParams};
use quasibell::oracle::{
    oracle_gram, oracle_reduced, oracle_teleport, verification, OracleConfig,
};
use quasibell::quasi_bell::{
    entanglement_entropy, gram_matrix, make_channel, reduced_eigs, ChannelSpec, StateIndex,
};
use quasibell::teleport::{
    channel_coeffs_for_angles, concurrence_for_angles, fidelity_for_angles, masfi_for_angles,
    probabilities_for_angles, report_for_angles, sample_from_probabilities, InputQubit,
};
use quasibell::Error;

const GRID: [f64; 4] = [0.3, 0.6, 1.0, 1.5];

fn real_channel(a: f64, b: f64) -> ChannelSpec {
    make_channel(C64::new(a, 0.0), C64::new(b, 0.0))
}

fn canonical_input(spec: &ChannelSpec) -> InputQubit {
    InputQubit::new(
        C64::new(spec.theta_mix.cos(), 0.0),
        C64::new(spec.theta_mix.sin(), 0.0),
    )
    .expect("canonical input is normalized")
}

fn grid_specs() -> Vec<ChannelSpec> {
    let mut specs = Vec::new();
    for &a in &GRID {
        for &b in &GRID {
            specs.push(real_channel(a, b));
        }
    }
    specs
}

#[test]
fn criterion_01_gram_matrix_matches_oracle_on_the_grid() {
    let start = Instant::now();
    let mut max_dev: f64 = 0.0;
    for spec in grid_specs() {
        let config = OracleConfig::recommended(&spec);
        let numeric = oracle_gram(&spec, &config).expect("grid labels fit the cutoff");
        let closed = gram_matrix(&spec)
            .to_array()
            .expect("grid points are non-degenerate");
        for i in 0..4 {
            for j in 0..4 {
                max_dev = max_dev.max((closed[i][j].abs() - numeric[i][j]).abs());
            }
        }
    }
    assert!(max_dev <= 1e-10, "gram deviation {max_dev:.3e}");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "gram grid took {elapsed:?}");
}

#[test]
fn criterion_02_reduced_spectra_are_rank_two_and_match_closed_forms() {
    for spec in grid_specs() {
        let config = OracleConfig::recommended(&spec);
        for i in StateIndex::ALL {
            let numeric = oracle_reduced(i, &spec, &config).expect("grid states exist");
            let heavy = numeric.spectrum.iter().filter(|&&l| l > 1e-10).count();
            assert_eq!(heavy, 2, "state {i:?} is not rank two");
            let total: f64 = numeric.spectrum.iter().sum();
            assert!((total - 1.0).abs() <= 1e-10, "spectrum sums to {total}");
            let (low, high) = numeric.leading_pair();
            let (l, lp) = reduced_eigs(i, &spec).unwrap();
            let (l, lp) = if l <= lp { (l, lp) } else { (lp, l) };
            assert!((low - l).abs() <= 1e-10 && (high - lp).abs() <= 1e-10);
        }
    }

    // Equal-label slice: the even-parity eigenvalues follow the published
    // squared form, and the odd-parity states are exactly balanced.
    for &a in &GRID {
        let spec = real_channel(a, a);
        let config = OracleConfig::recommended(&spec);
        let s = (-2.0 * a * a).exp();
        let denom = 2.0 * (1.0 + (-2.0 * (a * a + a * a)).exp());
        let printed = ((1.0 - s) * (1.0 - s) / denom, (1.0 + s) * (1.0 + s) / denom);
        for i in [StateIndex::Psi1, StateIndex::Psi3] {
            let (low, high) = oracle_reduced(i, &spec, &config).unwrap().leading_pair();
            assert!((low - printed.0).abs() <= 1e-10, "slice low eigenvalue");
            assert!((high - printed.1).abs() <= 1e-10, "slice high eigenvalue");
        }
        for i in [StateIndex::Psi2, StateIndex::Psi4] {
            let (low, high) = oracle_reduced(i, &spec, &config).unwrap().leading_pair();
            assert!((low - 0.5).abs() <= 1e-10 && (high - 0.5).abs() <= 1e-10);
        }
    }

    // The unequal-label outcome is recorded as a named decision in the
    // verification report.
    let report = verification::run(&verification::VerificationOptions {
        alpha_max: 1.5,
        ..Default::default()
    });
    let decision = report
        .checks
        .iter()
        .find(|c| c.name == "spectrum_form_decision")
        .expect("decision check is part of the suite");
    assert!(decision.pass);
    let detail = decision.detail.as_deref().expect("decision is recorded");
    assert!(detail.contains("product form"), "detail: {detail}");
}

#[test]
fn criterion_03_entropy_limits() {
    let strong = real_channel(3.0, 3.0);
    let one_bit = entanglement_entropy(StateIndex::Psi3, &strong).unwrap();
    assert!((one_bit - 1.0).abs() <= 1e-6, "entropy {one_bit}");

    let product = real_channel(0.6, 0.0);
    let zero = entanglement_entropy(StateIndex::Psi1, &product).unwrap();
    assert_eq!(zero, 0.0, "a product state must carry exactly no entropy");
}

#[test]
fn criterion_04_outcome_probabilities_match_oracle_and_sum_to_one() {
    for spec in grid_specs() {
        let config = OracleConfig::recommended(&spec);
        let numeric = oracle_teleport(&spec, &canonical_input(&spec), &config)
            .expect("grid channels teleport");
        let closed = probabilities_for_angles(spec.theta_mix, spec.theta_prime_mix);
        for (k, (c, n)) in closed.iter().zip(&numeric.probabilities).enumerate() {
            assert!(
                (c - n).abs() <= 1e-10,
                "P{} deviates at |alpha|={}, |beta|={}",
                k + 1,
                spec.alpha.norm(),
                spec.beta.norm()
            );
        }
        let total: f64 = numeric.probabilities.iter().sum();
        assert!((total - 1.0).abs() <= 1e-10);
        assert_eq!(closed[0], closed[2]);
        assert_eq!(closed[1], closed[3]);
    }
}

#[test]
fn criterion_05_fidelity_agrees_everywhere_and_hits_the_endpoint_exactly() {
    // label grid
    for spec in grid_specs() {
        let config = OracleConfig::recommended(&spec);
        let numeric = oracle_teleport(&spec, &canonical_input(&spec), &config).unwrap();
        let closed = fidelity_for_angles(spec.theta_mix, spec.theta_prime_mix);
        assert!((closed - numeric.fidelity).abs() <= 1e-9);
    }

    // 20x20 mixing-angle lattice, realized through actual coherent labels
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    for i in 0..20 {
        for j in 0..20 {
            let t = 0.07 + (quarter_pi - 0.09) * i as f64 / 19.0;
            let tp = 0.07 + (quarter_pi - 0.09) * j as f64 / 19.0;
            let a = (-(2.0 * t).sin().ln() / 2.0).sqrt();
            let b = (-(2.0 * tp).sin().ln() / 2.0).sqrt();
            let spec = real_channel(a, b);
            let config = OracleConfig::recommended(&spec);
            let numeric = oracle_teleport(&spec, &canonical_input(&spec), &config).unwrap();
            let closed = fidelity_for_angles(spec.theta_mix, spec.theta_prime_mix);
            assert!(
                (closed - numeric.fidelity).abs() <= 1e-9,
                "lattice point ({t}, {tp})"
            );
        }
    }

    // equal-angle reduction
    for k in 0..50 {
        let t = 0.01 + (quarter_pi - 0.01) * k as f64 / 49.0;
        let s2 = (2.0 * t).sin();
        let reduced = (1.0 + s2.powi(4)) / (1.0 + s2 * s2);
        assert!((fidelity_for_angles(t, t) - reduced).abs() <= 1e-12);
    }

    // exact formal endpoint
    assert_eq!(fidelity_for_angles(quarter_pi, quarter_pi), 1.0);
    assert_eq!(masfi_for_angles(quarter_pi, quarter_pi), 0.0);
    let report = report_for_angles(quarter_pi, quarter_pi).unwrap();
    assert_eq!(report.fidelity, 1.0);
    assert_eq!(report.masfi, 0.0);
}

#[test]
fn criterion_06_masfi_and_concurrence_identities() {
    let quarter_pi = std::f64::consts::FRAC_PI_4;
    for k in 0..40 {
        let t = 0.02 + (quarter_pi - 0.02) * k as f64 / 39.0;
        let expected = (2.0 * t).cos().powi(2);
        assert!((masfi_for_angles(t, t) - expected).abs() <= 1e-12);
    }
    for i in 0..20 {
        for j in 0..20 {
            let t = 0.05 + (quarter_pi - 0.1) * i as f64 / 19.0;
            let tp = 0.05 + (quarter_pi - 0.1) * j as f64 / 19.0;
            let d = channel_coeffs_for_angles(t, tp);
            let det = d[0] * d[3] - d[1] * d[2];
            assert!((concurrence_for_angles(t, tp) - 2.0 * det.abs()).abs() <= 1e-12);
        }
    }
}

#[test]
fn criterion_07_bell_limit_at_strong_labels() {
    let spec = real_channel(3.0, 3.0);
    let config = OracleConfig::recommended(&spec);
    let input = canonical_input(&spec);
    let numeric = oracle_teleport(&spec, &input, &config).unwrap();

    for p in numeric.probabilities {
        assert!((p - 0.25).abs() <= 1e-6, "probability {p}");
    }
    assert!((numeric.fidelity - 1.0).abs() <= 1e-6);
    assert!(
        (fidelity_for_angles(spec.theta_mix, spec.theta_prime_mix) - 1.0).abs() <= 1e-6
    );
    assert!((masfi_for_angles(spec.theta_mix, spec.theta_prime_mix) - 1.0).abs() <= 1e-6);

    // corrected states reproduce the input up to a global phase
    for state in numeric.corrected {
        let overlap = input.a1().conj() * state[0] + input.a2().conj() * state[1];
        assert!((overlap.norm() - 1.0).abs() <= 1e-6, "branch overlap {overlap}");
    }
}

#[test]
fn criterion_08_seeded_sampling_is_faithful_and_reproducible() {
    // |alpha|^2 = ln(2)/2 puts both overlaps at exactly one half
    let label = (0.5f64 * std::f64::consts::LN_2).sqrt();
    let spec = real_channel(label, label);
    let probs = probabilities_for_angles(spec.theta_mix, spec.theta_prime_mix);
    let expected = [0.35, 0.15, 0.35, 0.15];
    for k in 0..4 {
        assert!((probs[k] - expected[k]).abs() <= 1e-12);
    }

    let shots = 100_000u64;
    let counts = sample_from_probabilities(&probs, 7, shots);
    assert_eq!(counts.iter().sum::<u64>(), shots);
    for k in 0..4 {
        let sigma = (shots as f64 * expected[k] * (1.0 - expected[k])).sqrt();
        let dev = (counts[k] as f64 - shots as f64 * expected[k]).abs();
        assert!(dev <= 3.0 * sigma, "outcome {k} off by {dev} (3 sigma {})", 3.0 * sigma);
    }

    let rerun = sample_from_probabilities(&probs, 7, shots);
    assert_eq!(counts, rerun, "same seed must give identical counts");
}

#[test]
fn criterion_09_oscillator_drift_spacing_and_critical_rejection() {
    // parameter sets with e*theta_nc*B of 0, 0.3, and 0.7
    let sets = [
        (1.0, 1.0, 1.0, 0.0),
        (1.4, 1.0, 0.9, 0.3 / 0.9),
        (0.8, 1.2, 1.1, 0.7 / (1.2 * 1.1)),
    ];
    let init = ClassicalState::new(1.0, 0.5, 0.3, 1.0, 0.0);
    for (mass, charge, b_field, theta_nc) in sets {
        let params = LandauParams::new(mass, charge, b_field, theta_nc).unwrap();
        let drift = drift_over_periods(&init, &params, 10.0, 1000).unwrap();
        assert!(drift < 1e-8, "drift {drift:.3e} at theta_nc {theta_nc}");

        let spacing = params.hbar * params.omega_star();
        for n in 0..8u32 {
            let delta = energy_level(n + 1, &params) - energy_level(n, &params);
            assert!(
                (delta - spacing).abs() <= 1e-14 * spacing.abs(),
                "spacing drifts at level {n}"
            );
        }
    }

    match LandauParams::new(1.0, 2.0, 0.5, 1.0) {
        Err(Error::CriticalParameters { etb }) => assert_eq!(etb, 1.0),
        other => panic!("critical surface accepted: {other:?}"),
    }
}

#[test]
fn criterion_10_full_verification_command_passes_quickly() {
    let start = Instant::now();
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_quasibell"))
        .arg("verify")
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "verify took {elapsed:?}");
    assert!(output.status.success(), "verify exited nonzero");

    let stdout = String::from_utf8(output.stdout).unwrap();
    assert!(stdout.contains("verification PASSED"), "stdout:\n{stdout}");
    let checks = stdout.lines().filter(|l| l.contains("max deviation")).count();
    assert!(checks >= 20, "only {checks} per-check lines");
    assert!(!stdout.contains("FAIL"), "stdout:\n{stdout}");
}
