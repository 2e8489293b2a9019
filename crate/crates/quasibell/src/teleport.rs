//! Teleportation of a qubit through the symmetric two-mode channel state.
//!
//! Amy holds an abstract qubit `a1 |e1> + a2 |e2>` and one mode of the
//! channel; Bella holds the other. Expressed in the orthonormal bases
//! `{e1, e2}` (mode at angle theta) and `{f1, f2}` (angle theta'), the
//! channel is a real symmetric 2x2 amplitude matrix; a quasi-Bell
//! measurement on Amy's pair collapses Bella's mode into one of four
//! branches, each fixed up by a prescribed Pauli correction.
//!
//! All quantities here are closed forms in (theta, theta'). The fidelity and
//! MASFI formulas are total, including the formal endpoint theta = pi/4
//! where the basis construction itself breaks down; operational entry points
//! reject that endpoint instead.

use num_complex::Complex64 as C64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fock::TruncatedKet;
use crate::quasi_bell::{concurrence_channel, make_channel, ChannelSpec};

/// Angles this close to pi/4 make `cos 2theta` numerically useless.
const BASIS_ANGLE_TOL: f64 = 1e-8;

fn quarter_pi() -> f64 {
    std::f64::consts::FRAC_PI_4
}

/// True when the closed forms are being evaluated at (or numerically on top
/// of) the endpoint where no orthonormal basis exists.
pub fn is_formal_limit(theta: f64, theta_prime: f64) -> bool {
    theta >= quarter_pi() - BASIS_ANGLE_TOL || theta_prime >= quarter_pi() - BASIS_ANGLE_TOL
}

fn require_basis(spec: &ChannelSpec) -> Result<()> {
    for angle in [spec.theta_mix, spec.theta_prime_mix] {
        if angle >= quarter_pi() - BASIS_ANGLE_TOL {
            return Err(Error::BasisUndefined { angle });
        }
    }
    Ok(())
}

/// Change of basis for one mode between the coherent pair
/// `{|label>, |-label>}` and its orthonormal combination `{|e1>, |e2>}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnbBasis {
    pub angle: f64,
    /// Rows expand `e1`, `e2` over the coherent pair.
    pub forward: [[f64; 2]; 2],
    /// Rows expand `|label>`, `|-label>` over `e1`, `e2`.
    pub inverse: [[f64; 2]; 2],
}

impl OnbBasis {
    fn for_angle(angle: f64) -> Result<Self> {
        if angle >= quarter_pi() - BASIS_ANGLE_TOL {
            return Err(Error::BasisUndefined { angle });
        }
        let (s, c) = angle.sin_cos();
        let c2 = (2.0 * angle).cos();
        Ok(Self {
            angle,
            forward: [[c / c2, -s / c2], [-s / c2, c / c2]],
            inverse: [[c, s], [s, c]],
        })
    }

    /// Realizes `e1`, `e2` as truncated Fock kets built on the coherent pair
    /// at `label`.
    pub fn realize(&self, label: C64, cutoff: usize) -> Result<[TruncatedKet; 2]> {
        let plus = crate::fock::coherent_ket(label, cutoff, 1e-13)?.ket;
        let minus = crate::fock::coherent_ket(-label, cutoff, 1e-13)?.ket;
        let mut out = Vec::with_capacity(2);
        for row in self.forward {
            let e = plus
                .scaled(C64::new(row[0], 0.0))
                .add(&minus.scaled(C64::new(row[1], 0.0)))?;
            out.push(e);
        }
        Ok([out.remove(0), out.remove(0)])
    }
}

/// The two change-of-basis blocks, one per system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OnbCoeffs {
    pub system_a: OnbBasis,
    pub system_b: OnbBasis,
}

/// Orthonormal bases for both modes; fails if either mixing angle sits at
/// the pi/4 endpoint (zero label), where the coherent pair is collinear.
pub fn onb_coeffs(spec: &ChannelSpec) -> Result<OnbCoeffs> {
    Ok(OnbCoeffs {
        system_a: OnbBasis::for_angle(spec.theta_mix)?,
        system_b: OnbBasis::for_angle(spec.theta_prime_mix)?,
    })
}

/// Channel amplitudes over `{e_i (x) f_j}` for any angle pair:
/// `(cos(t - t'), sin(t + t'), sin(t + t'), cos(t - t')) / sqrt(2 (1 + sin 2t sin 2t'))`.
pub fn channel_coeffs_for_angles(theta: f64, theta_prime: f64) -> [f64; 4] {
    let k = 1.0 / (2.0 * (1.0 + (2.0 * theta).sin() * (2.0 * theta_prime).sin())).sqrt();
    let diag = (theta - theta_prime).cos() * k;
    let off = (theta + theta_prime).sin() * k;
    [diag, off, off, diag]
}

/// Same, guarded by the operational basis requirement.
pub fn channel_in_onb(spec: &ChannelSpec) -> Result<[f64; 4]> {
    require_basis(spec)?;
    Ok(channel_coeffs_for_angles(spec.theta_mix, spec.theta_prime_mix))
}

/// Amy's input qubit in the `{e1, e2}` coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InputQubit {
    a1: C64,
    a2: C64,
}

impl InputQubit {
    pub fn new(a1: C64, a2: C64) -> Result<Self> {
        let norm_sqr = a1.norm_sqr() + a2.norm_sqr();
        if (norm_sqr - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!(
                "input qubit norm^2 = {norm_sqr}, expected 1"
            )));
        }
        Ok(Self { a1, a2 })
    }

    /// `(cos theta, sin theta)` tied to the channel's own mixing angle.
    pub fn canonical(spec: &ChannelSpec) -> Self {
        let (s, c) = spec.theta_mix.sin_cos();
        Self {
            a1: C64::new(c, 0.0),
            a2: C64::new(s, 0.0),
        }
    }

    pub fn a1(&self) -> C64 {
        self.a1
    }

    pub fn a2(&self) -> C64 {
        self.a2
    }
}

/// Quasi-Bell measurement outcome labels, in the fixed sampling order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BellOutcome {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

pub const OUTCOME_ORDER: [BellOutcome; 4] = [
    BellOutcome::PhiPlus,
    BellOutcome::PhiMinus,
    BellOutcome::PsiPlus,
    BellOutcome::PsiMinus,
];

impl BellOutcome {
    pub fn label(&self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "phi_plus",
            BellOutcome::PhiMinus => "phi_minus",
            BellOutcome::PsiPlus => "psi_plus",
            BellOutcome::PsiMinus => "psi_minus",
        }
    }

    pub fn correction_name(&self) -> &'static str {
        match self {
            BellOutcome::PhiPlus => "identity",
            BellOutcome::PhiMinus => "sigma_z",
            BellOutcome::PsiPlus => "sigma_x",
            BellOutcome::PsiMinus => "i_sigma_y",
        }
    }

    /// The prescribed recovery unitary. Conventions are frozen as:
    /// `sigma_x (u, v) = (v, u)`, `sigma_z (u, v) = (u, -v)`,
    /// `i sigma_y (u, v) = (v, -u)`.
    pub fn apply_correction(&self, v: [C64; 2]) -> [C64; 2] {
        match self {
            BellOutcome::PhiPlus => v,
            BellOutcome::PhiMinus => [v[0], -v[1]],
            BellOutcome::PsiPlus => [v[1], v[0]],
            BellOutcome::PsiMinus => [v[1], -v[0]],
        }
    }
}

/// One measurement branch: probability, Bella's raw (unnormalized) state in
/// `{f1, f2}`, and the state after the prescribed correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementOutcome {
    pub label: BellOutcome,
    pub probability: f64,
    pub bella_state_raw: [C64; 2],
    /// Normalized when the branch has nonzero probability; the zero vector
    /// on a probability-zero branch (which is never sampled).
    pub bella_state_corrected: [C64; 2],
}

/// Measurement branches for any angle pair and input. The raw vectors carry
/// the full three-party weight, so their squared norms are the outcome
/// probabilities and sum to 1.
pub fn branches_for_angles(theta: f64, theta_prime: f64, input: &InputQubit) -> [MeasurementOutcome; 4] {
    let d = channel_coeffs_for_angles(theta, theta_prime);
    let inv_sqrt2 = 0.5_f64.sqrt();
    let a = [input.a1, input.a2];
    // Pre-measurement images of the input under each outcome's conjugation:
    // raw_i = d^T (U_i^dagger a) / sqrt(2) with d symmetric.
    let images: [[C64; 2]; 4] = [
        [a[0], a[1]],   // Phi+
        [a[0], -a[1]],  // Phi-: sigma_z
        [a[1], a[0]],   // Psi+: sigma_x
        [-a[1], a[0]],  // Psi-: (i sigma_y)^dagger
    ];
    let mut out = Vec::with_capacity(4);
    for (label, img) in OUTCOME_ORDER.iter().zip(images) {
        let raw = [
            (img[0] * d[0] + img[1] * d[2]) * inv_sqrt2,
            (img[0] * d[1] + img[1] * d[3]) * inv_sqrt2,
        ];
        let probability = raw[0].norm_sqr() + raw[1].norm_sqr();
        let corrected_raw = label.apply_correction(raw);
        let corrected = if probability > 1e-300 {
            let inv = 1.0 / probability.sqrt();
            [corrected_raw[0] * inv, corrected_raw[1] * inv]
        } else {
            [C64::new(0.0, 0.0); 2]
        };
        out.push(MeasurementOutcome {
            label: *label,
            probability,
            bella_state_raw: raw,
            bella_state_corrected: corrected,
        });
    }
    [out[0], out[1], out[2], out[3]]
}

/// The four branches for a concrete channel; operational, so the basis must
/// exist.
pub fn conditional_states(spec: &ChannelSpec, input: &InputQubit) -> Result<[MeasurementOutcome; 4]> {
    require_basis(spec)?;
    Ok(branches_for_angles(spec.theta_mix, spec.theta_prime_mix, input))
}

/// Closed-form outcome probabilities for the canonical input
/// `(cos theta, sin theta)`:
/// `P1 = P3 = 1/4 + (sin^2 2t + sin 2t sin 2t') / (4 (1 + sin 2t sin 2t'))`,
/// `P2 = P4 = 1/2 - P1`. Total in the angles.
pub fn probabilities_for_angles(theta: f64, theta_prime: f64) -> [f64; 4] {
    let s2 = (2.0 * theta).sin();
    let s2p = (2.0 * theta_prime).sin();
    let bump = 0.25 * (s2 * s2 + s2 * s2p) / (1.0 + s2 * s2p);
    let hi = 0.25 + bump;
    let lo = 0.25 - bump;
    [hi, lo, hi, lo]
}

/// Same, guarded by the operational basis requirement.
pub fn measurement_probabilities(spec: &ChannelSpec) -> Result<[f64; 4]> {
    require_basis(spec)?;
    Ok(probabilities_for_angles(spec.theta_mix, spec.theta_prime_mix))
}

/// Teleportation fidelity of the canonical input, total in the angles:
/// `(cos^2(t - t') + sin^2 2t sin^2(t + t')) / (1 + sin 2t sin 2t')`.
pub fn fidelity_for_angles(theta: f64, theta_prime: f64) -> f64 {
    let s2 = (2.0 * theta).sin();
    let s2p = (2.0 * theta_prime).sin();
    let cd = (theta - theta_prime).cos();
    let sp = (theta + theta_prime).sin();
    (cd * cd + s2 * s2 * sp * sp) / (1.0 + s2 * s2p)
}

/// Fidelity of the channel with the canonical input; pure formula, no
/// operational precondition.
pub fn fidelity(spec: &ChannelSpec) -> f64 {
    fidelity_for_angles(spec.theta_mix, spec.theta_prime_mix)
}

/// Channel concurrence `cos 2t cos 2t' / (1 + sin 2t sin 2t')` as a function
/// of the angles alone ([`concurrence_channel`] takes a [`ChannelSpec`]).
pub fn concurrence_for_angles(theta: f64, theta_prime: f64) -> f64 {
    let c2 = crate::quasi_bell::cos_two_theta(theta);
    let c2p = crate::quasi_bell::cos_two_theta(theta_prime);
    c2 * c2p / (1.0 + (2.0 * theta).sin() * (2.0 * theta_prime).sin())
}

/// Minimum assured fidelity `2C / (1 + C)` with `C` the channel concurrence.
pub fn masfi_for_angles(theta: f64, theta_prime: f64) -> f64 {
    let c = concurrence_for_angles(theta, theta_prime);
    2.0 * c / (1.0 + c)
}

/// MASFI of the channel; pure formula.
pub fn masfi(spec: &ChannelSpec) -> f64 {
    masfi_for_angles(spec.theta_mix, spec.theta_prime_mix)
}

/// Everything the protocol reports for one channel setting and the
/// canonical input.
#[derive(Debug, Clone)]
pub struct TeleportReport {
    pub spec: ChannelSpec,
    pub outcomes: [MeasurementOutcome; 4],
    pub fidelity: f64,
    pub concurrence: f64,
    pub masfi: f64,
    /// Set when the report was evaluated at the formal pi/4 endpoint, where
    /// the closed forms extend continuously but no measurement basis exists.
    pub formal_limit: bool,
}

/// Operational report; the basis must exist.
pub fn teleport_report(spec: &ChannelSpec) -> Result<TeleportReport> {
    let input = InputQubit::canonical(spec);
    let outcomes = conditional_states(spec, &input)?;
    Ok(TeleportReport {
        spec: *spec,
        outcomes,
        fidelity: fidelity(spec),
        concurrence: concurrence_channel(spec),
        masfi: masfi(spec),
        formal_limit: false,
    })
}

/// Closed-form report for explicit angles in `(0, pi/4]`, usable at the
/// formal endpoint. The equivalent real labels `|alpha|^2 = -ln(sin 2t)/2`
/// are materialized into the embedded spec.
pub fn report_for_angles(theta: f64, theta_prime: f64) -> Result<TeleportReport> {
    for angle in [theta, theta_prime] {
        if !(angle > 0.0 && angle <= quarter_pi() + 1e-15) {
            return Err(Error::InvalidArgument(format!(
                "mixing angle {angle} outside (0, pi/4]"
            )));
        }
    }
    let label = |t: f64| {
        let s2 = (2.0 * t).sin().min(1.0);
        C64::new((-0.5 * s2.ln()).sqrt(), 0.0)
    };
    let spec = make_channel(label(theta), label(theta_prime));
    let input = InputQubit::new(C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0))?;
    Ok(TeleportReport {
        spec,
        outcomes: branches_for_angles(theta, theta_prime, &input),
        fidelity: fidelity_for_angles(theta, theta_prime),
        concurrence: concurrence_for_angles(theta, theta_prime),
        masfi: masfi_for_angles(theta, theta_prime),
        formal_limit: is_formal_limit(theta, theta_prime),
    })
}

/// One seeded shot: samples an outcome by inverse CDF over the fixed order
/// and returns Bella's corrected state for that branch.
pub fn teleport_once(
    spec: &ChannelSpec,
    input: &InputQubit,
    seed: u64,
) -> Result<(BellOutcome, [C64; 2])> {
    let outcomes = conditional_states(spec, input)?;
    let probs = outcomes.map(|o| o.probability);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let k = draw_index(&probs, &mut rng);
    Ok((outcomes[k].label, outcomes[k].bella_state_corrected))
}

/// `shots` consecutive draws from one seeded generator; returns counts per
/// outcome in the fixed order.
pub fn sample_outcomes(
    spec: &ChannelSpec,
    input: &InputQubit,
    seed: u64,
    shots: u64,
) -> Result<[u64; 4]> {
    let outcomes = conditional_states(spec, input)?;
    Ok(sample_from_probabilities(
        &outcomes.map(|o| o.probability),
        seed,
        shots,
    ))
}

/// Seeded inverse-CDF sampling over the fixed outcome order, directly from a
/// probability vector. Identical seeds give identical counts.
pub fn sample_from_probabilities(probs: &[f64; 4], seed: u64, shots: u64) -> [u64; 4] {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = [0_u64; 4];
    for _ in 0..shots {
        counts[draw_index(probs, &mut rng)] += 1;
    }
    counts
}

fn draw_index(probs: &[f64; 4], rng: &mut ChaCha8Rng) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, p) in probs.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    3
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::coherent_ket;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn real_channel(a: f64, b: f64) -> ChannelSpec {
        make_channel(c(a, 0.0), c(b, 0.0))
    }

    fn half_overlap_channel() -> ChannelSpec {
        let a = (0.5 * std::f64::consts::LN_2).sqrt();
        real_channel(a, a)
    }

    #[test]
    fn forward_inverse_compose_to_identity() {
        let spec = real_channel(0.8, 1.2);
        let onb = onb_coeffs(&spec).unwrap();
        for basis in [onb.system_a, onb.system_b] {
            let (f, i) = (basis.forward, basis.inverse);
            for (r, f_row) in f.iter().enumerate() {
                for (cidx, (i0, i1)) in i[0].iter().zip(&i[1]).enumerate() {
                    let got = f_row[0] * i0 + f_row[1] * i1;
                    let want = if r == cidx { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(got, want, epsilon = 1e-12);
                }
            }
        }
    }

    #[test]
    fn realized_basis_is_orthonormal() {
        let spec = real_channel(0.8, 0.5);
        let onb = onb_coeffs(&spec).unwrap();
        let cutoff = spec.default_cutoff();
        let [e1, e2] = onb.system_a.realize(spec.alpha, cutoff).unwrap();
        assert_abs_diff_eq!(e1.inner(&e1).unwrap().re, 1.0, epsilon = 1e-10);
        assert_abs_diff_eq!(e2.inner(&e2).unwrap().re, 1.0, epsilon = 1e-10);
        assert!(e1.inner(&e2).unwrap().norm() < 1e-10);
    }

    #[test]
    fn inverse_rows_reproduce_the_coherent_states() {
        let spec = real_channel(0.9, 0.9);
        let onb = onb_coeffs(&spec).unwrap();
        let cutoff = spec.default_cutoff();
        let [e1, e2] = onb.system_a.realize(spec.alpha, cutoff).unwrap();
        let inv = onb.system_a.inverse;
        for (row, label) in [(inv[0], spec.alpha), (inv[1], -spec.alpha)] {
            let rebuilt = e1
                .scaled(c(row[0], 0.0))
                .add(&e2.scaled(c(row[1], 0.0)))
                .unwrap();
            let target = coherent_ket(label, cutoff, 1e-13).unwrap().ket;
            let diff: f64 = rebuilt
                .amps()
                .iter()
                .zip(target.amps())
                .map(|(x, y)| (x - y).norm_sqr())
                .sum::<f64>()
                .sqrt();
            assert!(diff < 1e-10, "reconstruction off by {diff}");
        }
    }

    #[test]
    fn nearly_orthogonal_pair_gives_identity_basis() {
        let spec = real_channel(3.0, 3.0);
        let onb = onb_coeffs(&spec).unwrap();
        assert_abs_diff_eq!(onb.system_a.forward[0][0], 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(onb.system_a.forward[0][1], 0.0, epsilon = 1e-7);
    }

    #[test]
    fn zero_label_has_no_basis() {
        let spec = real_channel(0.0, 1.0);
        assert!(matches!(
            onb_coeffs(&spec),
            Err(Error::BasisUndefined { .. })
        ));
        assert!(measurement_probabilities(&spec).is_err());
        assert!(channel_in_onb(&spec).is_err());
    }

    #[test]
    fn channel_coefficients_normalize_and_symmetrize() {
        for (a, b) in [(0.5, 1.0), (0.3, 0.3), (1.5, 0.7)] {
            let spec = real_channel(a, b);
            let d = channel_in_onb(&spec).unwrap();
            assert_abs_diff_eq!(d.iter().map(|x| x * x).sum::<f64>(), 1.0, epsilon = 1e-12);
            assert_eq!(d[0], d[3]);
            assert_eq!(d[1], d[2]);
            // normalization identity behind the prefactor
            let (t, tp) = (spec.theta_mix, spec.theta_prime_mix);
            let lhs = (t - tp).cos().powi(2) + (t + tp).sin().powi(2);
            let rhs = 1.0 + (2.0 * t).sin() * (2.0 * tp).sin();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-12);
        }
    }

    #[test]
    fn equal_angle_channel_coefficients() {
        let spec = half_overlap_channel();
        let d = channel_in_onb(&spec).unwrap();
        let s2 = (2.0 * spec.theta_mix).sin();
        let k = 1.0 / (2.0 * (1.0 + s2 * s2)).sqrt();
        assert_abs_diff_eq!(d[0], k, epsilon = 1e-12);
        assert_abs_diff_eq!(d[1], s2 * k, epsilon = 1e-12);
    }

    #[test]
    fn probabilities_at_half_overlap() {
        let p = measurement_probabilities(&half_overlap_channel()).unwrap();
        assert_abs_diff_eq!(p[0], 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(p[1], 0.15, epsilon = 1e-12);
        assert_abs_diff_eq!(p[2], 0.35, epsilon = 1e-12);
        assert_abs_diff_eq!(p[3], 0.15, epsilon = 1e-12);
    }

    #[test]
    fn probabilities_at_the_formal_endpoint() {
        let p = probabilities_for_angles(quarter_pi(), quarter_pi());
        assert_abs_diff_eq!(p[0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[1], 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p[2], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p[3], 0.0, epsilon = 1e-15);
    }

    #[test]
    fn probabilities_sum_to_one_and_pair_up() {
        for (a, b) in [(0.4, 0.9), (1.0, 0.2), (2.0, 2.0)] {
            let p = measurement_probabilities(&real_channel(a, b)).unwrap();
            assert_eq!(p[0], p[2]);
            assert_eq!(p[1], p[3]);
            assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-15);
        }
    }

    #[test]
    fn branch_norms_reproduce_the_closed_form_probabilities() {
        let spec = real_channel(0.7, 1.1);
        let input = InputQubit::canonical(&spec);
        let branches = conditional_states(&spec, &input).unwrap();
        let p = measurement_probabilities(&spec).unwrap();
        for (b, want) in branches.iter().zip(p) {
            assert_abs_diff_eq!(b.probability, want, epsilon = 1e-12);
            let n = (b.bella_state_corrected[0].norm_sqr()
                + b.bella_state_corrected[1].norm_sqr())
            .sqrt();
            assert_abs_diff_eq!(n, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn phi_plus_branch_matches_displayed_form_at_equal_angles() {
        let spec = real_channel(0.8, 0.8);
        let t = spec.theta_mix;
        let input = InputQubit::canonical(&spec);
        let b = &conditional_states(&spec, &input).unwrap()[0];
        let s2 = (2.0 * t).sin();
        let k = 1.0 / (2.0 * (1.0 + s2 * s2)).sqrt() * 0.5_f64.sqrt();
        assert_abs_diff_eq!(
            b.bella_state_raw[0].re,
            (t.cos() + t.sin() * s2) * k,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            b.bella_state_raw[1].re,
            (t.sin() + t.cos() * s2) * k,
            epsilon = 1e-12
        );
    }

    #[test]
    fn correction_conventions_are_frozen() {
        let u = c(0.3, 0.1);
        let v = c(-0.5, 0.9);
        assert_eq!(BellOutcome::PhiPlus.apply_correction([u, v]), [u, v]);
        assert_eq!(BellOutcome::PhiMinus.apply_correction([u, v]), [u, -v]);
        assert_eq!(BellOutcome::PsiPlus.apply_correction([u, v]), [v, u]);
        assert_eq!(BellOutcome::PsiMinus.apply_correction([u, v]), [v, -u]);
    }

    #[test]
    fn strong_channel_teleports_faithfully() {
        // |labels| = 5 puts the channel deep in the Bell regime
        let spec = real_channel(5.0, 5.0);
        let input = InputQubit::new(c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        for b in conditional_states(&spec, &input).unwrap() {
            assert_abs_diff_eq!(b.probability, 0.25, epsilon = 1e-10);
            assert!((b.bella_state_corrected[0] - input.a1()).norm() < 1e-10);
            assert!((b.bella_state_corrected[1] - input.a2()).norm() < 1e-10);
        }
    }

    #[test]
    fn fidelity_special_values() {
        assert_abs_diff_eq!(
            fidelity(&half_overlap_channel()),
            0.85,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            fidelity_for_angles(quarter_pi(), quarter_pi()),
            1.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            masfi(&half_overlap_channel()),
            0.75,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(masfi_for_angles(quarter_pi(), quarter_pi()), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn equal_angle_fidelity_reduction() {
        for t in [0.1f64, 0.3, 0.6, 0.78] {
            let s2 = (2.0 * t).sin();
            let reduced = (1.0 + s2.powi(4)) / (1.0 + s2 * s2);
            assert_abs_diff_eq!(fidelity_for_angles(t, t), reduced, epsilon = 1e-12);
            assert_abs_diff_eq!(
                masfi_for_angles(t, t),
                (2.0 * t).cos().powi(2),
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn fidelity_consistency_on_an_angle_grid() {
        // sum_i P_i |<psi|chi_i>|^2 must reproduce the closed form
        for i in 0..20 {
            for j in 0..20 {
                let t = 0.02 + (quarter_pi() - 0.04) * i as f64 / 19.0;
                let tp = 0.02 + (quarter_pi() - 0.04) * j as f64 / 19.0;
                let input = InputQubit::new(c(t.cos(), 0.0), c(t.sin(), 0.0)).unwrap();
                let branches = branches_for_angles(t, tp, &input);
                let mut f = 0.0;
                for b in branches {
                    let ov = input.a1().conj() * b.bella_state_corrected[0]
                        + input.a2().conj() * b.bella_state_corrected[1];
                    f += b.probability * ov.norm_sqr();
                }
                let closed = fidelity_for_angles(t, tp);
                assert_abs_diff_eq!(f, closed, epsilon = 1e-12);
                assert!(closed + 1e-12 >= masfi_for_angles(t, tp));
            }
        }
    }

    #[test]
    fn bell_limit_of_the_channel() {
        let spec = real_channel(3.0, 3.0);
        let d = channel_in_onb(&spec).unwrap();
        let inv_sqrt2 = 0.5_f64.sqrt();
        assert_abs_diff_eq!(d[0], inv_sqrt2, epsilon = 1e-6);
        assert_abs_diff_eq!(d[1], 0.0, epsilon = 1e-6);
        let p = measurement_probabilities(&spec).unwrap();
        for pk in p {
            assert_abs_diff_eq!(pk, 0.25, epsilon = 1e-6);
        }
        assert_abs_diff_eq!(fidelity(&spec), 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(masfi(&spec), 1.0, epsilon = 1e-6);
    }

    #[test]
    fn report_for_angles_covers_the_endpoint() {
        let r = report_for_angles(quarter_pi(), quarter_pi()).unwrap();
        assert!(r.formal_limit);
        assert_abs_diff_eq!(r.fidelity, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.masfi, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(r.outcomes[1].probability, 0.0, epsilon = 1e-15);
        assert_eq!(r.spec.alpha, c(0.0, 0.0));

        let op = report_for_angles(0.3, 0.25).unwrap();
        assert!(!op.formal_limit);
        assert_abs_diff_eq!(op.fidelity, fidelity_for_angles(0.3, 0.25), epsilon = 1e-15);
    }

    #[test]
    fn same_seed_reproduces_the_shot() {
        let spec = real_channel(0.6, 0.6);
        let input = InputQubit::canonical(&spec);
        let first = teleport_once(&spec, &input, 12345).unwrap();
        for _ in 0..3 {
            let again = teleport_once(&spec, &input, 12345).unwrap();
            assert_eq!(first.0, again.0);
            assert_eq!(first.1, again.1);
        }
    }

    #[test]
    fn sampling_matches_probabilities_within_three_sigma() {
        let spec = half_overlap_channel();
        let input = InputQubit::canonical(&spec);
        let shots = 100_000_u64;
        let counts = sample_outcomes(&spec, &input, 777, shots).unwrap();
        let p = measurement_probabilities(&spec).unwrap();
        for (k, pk) in p.iter().enumerate() {
            let sigma = (pk * (1.0 - pk) / shots as f64).sqrt();
            let freq = counts[k] as f64 / shots as f64;
            assert!(
                (freq - pk).abs() <= 3.0 * sigma,
                "outcome {k}: freq {freq} vs p {pk} (sigma {sigma})"
            );
        }
    }

    proptest! {
        #[test]
        fn global_phase_leaves_observables_alone(
            a in 0.2_f64..1.5,
            b in 0.2_f64..1.5,
            mix in 0.0_f64..std::f64::consts::FRAC_PI_2,
            rel in 0.0_f64..std::f64::consts::TAU,
            global in 0.0_f64..std::f64::consts::TAU,
        ) {
            let spec = real_channel(a, b);
            let base = InputQubit::new(
                c(mix.cos(), 0.0),
                C64::from_polar(mix.sin(), rel),
            ).unwrap();
            let ph = C64::from_polar(1.0, global);
            let shifted = InputQubit::new(base.a1() * ph, base.a2() * ph).unwrap();
            let b0 = conditional_states(&spec, &base).unwrap();
            let b1 = conditional_states(&spec, &shifted).unwrap();
            for (x, y) in b0.iter().zip(&b1) {
                prop_assert!((x.probability - y.probability).abs() < 1e-12);
                let ov0 = base.a1().conj() * x.bella_state_corrected[0]
                    + base.a2().conj() * x.bella_state_corrected[1];
                let ov1 = shifted.a1().conj() * y.bella_state_corrected[0]
                    + shifted.a2().conj() * y.bella_state_corrected[1];
                prop_assert!((ov0.norm() - ov1.norm()).abs() < 1e-12);
            }
        }

        #[test]
        fn general_input_probabilities_sum_to_one(
            a in 0.2_f64..1.5,
            b in 0.2_f64..1.5,
            mix in 0.0_f64..std::f64::consts::FRAC_PI_2,
            rel in 0.0_f64..std::f64::consts::TAU,
        ) {
            let spec = real_channel(a, b);
            let input = InputQubit::new(
                c(mix.cos(), 0.0),
                C64::from_polar(mix.sin(), rel),
            ).unwrap();
            let branches = conditional_states(&spec, &input).unwrap();
            let total: f64 = branches.iter().map(|o| o.probability).sum();
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
