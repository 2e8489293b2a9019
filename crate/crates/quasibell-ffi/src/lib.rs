//! C ABI for the quasibell library.
//!
//! Channels travel across the boundary as opaque `QbChannel` handles;
//! every fallible call returns a `QbStatus` and writes its result through
//! an out-pointer only on `QB_STATUS_OK`. Out-parameters are untouched on
//! failure. The header is generated into `include/quasibell.h` at build
//! time.

use std::os::raw::c_char;

use num_complex::Complex64 as C64;
use quasibell::landau::{energy_level, LandauParams};
use quasibell::quasi_bell::{
    concurrence_channel, entanglement_report, gram_matrix, make_channel, ChannelSpec, StateIndex,
};
use quasibell::teleport::{
    probabilities_for_angles, report_for_angles, sample_from_probabilities, teleport_report,
};
use quasibell::Error;

/// Result codes shared by every fallible call in this ABI.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    QbStatusOk = 0,
    /// A parameter is outside its documented domain.
    QbStatusInvalidArgument = 1,
    /// A Fock cutoff too small for the requested labels.
    QbStatusTruncationInsufficient = 2,
    /// The requested state has zero norm at these labels.
    QbStatusDegenerateState = 3,
    /// The two-dimensional basis degenerates at a pi/4 mixing angle.
    QbStatusBasisUndefined = 4,
    /// The effective mass vanishes at e*theta_nc*B = 1.
    QbStatusCriticalParameters = 5,
    /// The operation is outside the implemented regime.
    QbStatusUnsupported = 6,
    /// A required pointer argument was null.
    QbStatusNullPointer = 7,
}

impl From<&Error> for QbStatus {
    fn from(err: &Error) -> Self {
        match err {
            Error::InvalidArgument(_) => QbStatus::QbStatusInvalidArgument,
            Error::TruncationInsufficient { .. } => QbStatus::QbStatusTruncationInsufficient,
            Error::DegenerateState => QbStatus::QbStatusDegenerateState,
            Error::BasisUndefined { .. } => QbStatus::QbStatusBasisUndefined,
            Error::CriticalParameters { .. } => QbStatus::QbStatusCriticalParameters,
            Error::Unsupported(_) => QbStatus::QbStatusUnsupported,
        }
    }
}

/// An entangled two-mode channel fixed by its pair of coherent labels.
/// Construct with `qb_channel_new`, release with `qb_channel_free`.
pub struct QbChannel {
    spec: ChannelSpec,
}

/// Scalar channel invariants filled by `qb_channel_metrics`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbChannelMetrics {
    pub abs_alpha: f64,
    pub abs_beta: f64,
    /// Overlap of the first mode's opposite-label pair, in (0, 1].
    pub s: f64,
    /// Overlap of the second mode's pair.
    pub s_prime: f64,
    /// First-mode mixing angle, in (0, pi/4].
    pub theta: f64,
    /// Second-mode mixing angle.
    pub theta_prime: f64,
    /// Overlap between the two even-parity channel states.
    pub g13: f64,
    /// Overlap between the two odd-parity channel states; NaN at the
    /// degenerate point where those states have zero norm.
    pub g24: f64,
    /// Concurrence of the shared channel state.
    pub concurrence: f64,
}

/// Reduced-state data for one channel state, filled by `qb_entanglement`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbEntanglement {
    /// Smaller reduced eigenvalue.
    pub lambda: f64,
    /// Larger reduced eigenvalue; the pair sums to one.
    pub lambda_prime: f64,
    pub entropy_bits: f64,
    pub concurrence: f64,
}

/// Teleportation figures of merit filled by `qb_teleport` and
/// `qb_teleport_for_angles`. Probabilities are ordered as the outcomes
/// (phi+, phi-, psi+, psi-).
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbTeleport {
    pub probabilities: [f64; 4],
    pub fidelity: f64,
    pub concurrence: f64,
    pub masfi: f64,
}

/// Effective oscillator constants filled by `qb_landau`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbLandau {
    /// Effective mass m(1 - e*theta_nc*B).
    pub m_star: f64,
    /// Bare cyclotron frequency eB/m.
    pub omega: f64,
    /// Effective frequency omega / (1 - e*theta_nc*B).
    pub omega_star: f64,
    /// Momentum-space deformation theta_nc * m^2.
    pub kappa: f64,
    /// Uniform level spacing hbar * omega_star.
    pub level_spacing: f64,
}

/// Library version as a static NUL-terminated string; never null.
#[no_mangle]
pub extern "C" fn qb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Static NUL-terminated name for a status code; never null.
#[no_mangle]
pub extern "C" fn qb_status_name(status: QbStatus) -> *const c_char {
    let name: &'static str = match status {
        QbStatus::QbStatusOk => "ok\0",
        QbStatus::QbStatusInvalidArgument => "invalid_argument\0",
        QbStatus::QbStatusTruncationInsufficient => "truncation_insufficient\0",
        QbStatus::QbStatusDegenerateState => "degenerate_state\0",
        QbStatus::QbStatusBasisUndefined => "basis_undefined\0",
        QbStatus::QbStatusCriticalParameters => "critical_parameters\0",
        QbStatus::QbStatusUnsupported => "unsupported\0",
        QbStatus::QbStatusNullPointer => "null_pointer\0",
    };
    name.as_ptr() as *const c_char
}

/// Allocates a channel for the labels `alpha = alpha_re + i alpha_im`,
/// `beta = beta_re + i beta_im` and writes the handle to `out`.
///
/// # Safety
/// `out` must be a valid pointer. The handle must be released with
/// `qb_channel_free` exactly once.
#[no_mangle]
pub unsafe extern "C" fn qb_channel_new(
    alpha_re: f64,
    alpha_im: f64,
    beta_re: f64,
    beta_im: f64,
    out: *mut *mut QbChannel,
) -> QbStatus {
    if out.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    for v in [alpha_re, alpha_im, beta_re, beta_im] {
        if !v.is_finite() {
            return QbStatus::QbStatusInvalidArgument;
        }
    }
    let spec = make_channel(C64::new(alpha_re, alpha_im), C64::new(beta_re, beta_im));
    *out = Box::into_raw(Box::new(QbChannel { spec }));
    QbStatus::QbStatusOk
}

/// Releases a handle from `qb_channel_new`. A null pointer is a no-op.
///
/// # Safety
/// `channel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_channel_free(channel: *mut QbChannel) {
    if !channel.is_null() {
        drop(Box::from_raw(channel));
    }
}

/// Fills `out` with the channel's scalar invariants. `g24` is NaN at the
/// degenerate zero-label point; everything else is total.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_channel_metrics(
    channel: *const QbChannel,
    out: *mut QbChannelMetrics,
) -> QbStatus {
    if channel.is_null() || out.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    let spec = &(*channel).spec;
    let gram = gram_matrix(spec);
    *out = QbChannelMetrics {
        abs_alpha: spec.alpha.norm(),
        abs_beta: spec.beta.norm(),
        s: spec.s,
        s_prime: spec.s_prime,
        theta: spec.theta_mix,
        theta_prime: spec.theta_prime_mix,
        g13: gram.g13(),
        g24: gram.g24().unwrap_or(f64::NAN),
        concurrence: concurrence_channel(spec),
    };
    QbStatus::QbStatusOk
}

/// Returns 1 when the channel sits at the degenerate zero-label point
/// (the odd-parity states vanish there), 0 otherwise, -1 on null.
///
/// # Safety
/// `channel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qb_channel_is_degenerate(channel: *const QbChannel) -> i32 {
    if channel.is_null() {
        return -1;
    }
    (*channel).spec.is_degenerate() as i32
}

/// Fills `out` with the reduced spectrum, entropy, and concurrence of
/// channel state `index` (1 through 4).
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_entanglement(
    channel: *const QbChannel,
    index: u8,
    out: *mut QbEntanglement,
) -> QbStatus {
    if channel.is_null() || out.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    let i = match StateIndex::from_u8(index) {
        Ok(i) => i,
        Err(ref e) => return e.into(),
    };
    match entanglement_report(i, &(*channel).spec) {
        Ok(report) => {
            *out = QbEntanglement {
                lambda: report.eigen_pair.0,
                lambda_prime: report.eigen_pair.1,
                entropy_bits: report.entropy_bits,
                concurrence: report.concurrence,
            };
            QbStatus::QbStatusOk
        }
        Err(ref e) => e.into(),
    }
}

/// Fills `out` with the teleportation report for the channel's own mixing
/// angles. Fails with `QB_STATUS_BASIS_UNDEFINED` when either angle is
/// within 1e-8 of pi/4, where the protocol's qubit basis degenerates; use
/// `qb_teleport_for_angles` to evaluate the closed forms there.
///
/// # Safety
/// `channel` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_teleport(
    channel: *const QbChannel,
    out: *mut QbTeleport,
) -> QbStatus {
    if channel.is_null() || out.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    match teleport_report(&(*channel).spec) {
        Ok(report) => {
            *out = QbTeleport {
                probabilities: report.outcomes.map(|o| o.probability),
                fidelity: report.fidelity,
                concurrence: report.concurrence,
                masfi: report.masfi,
            };
            QbStatus::QbStatusOk
        }
        Err(ref e) => e.into(),
    }
}

/// Fills `out` with the closed-form teleportation report for an explicit
/// angle pair in (0, pi/4]; the pi/4 endpoint is allowed.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_teleport_for_angles(
    theta: f64,
    theta_prime: f64,
    out: *mut QbTeleport,
) -> QbStatus {
    if out.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    match report_for_angles(theta, theta_prime) {
        Ok(report) => {
            *out = QbTeleport {
                probabilities: report.outcomes.map(|o| o.probability),
                fidelity: report.fidelity,
                concurrence: report.concurrence,
                masfi: report.masfi,
            };
            QbStatus::QbStatusOk
        }
        Err(ref e) => e.into(),
    }
}

/// Draws `shots` seeded measurement outcomes from the channel's closed-form
/// probabilities and writes the four counts (phi+, phi-, psi+, psi-) to
/// `out_counts`. Identical seeds reproduce identical counts.
///
/// # Safety
/// `channel` must be a live handle and `out_counts` must point to at least
/// four writable u64 values.
#[no_mangle]
pub unsafe extern "C" fn qb_sample_outcomes(
    channel: *const QbChannel,
    seed: u64,
    shots: u64,
    out_counts: *mut u64,
) -> QbStatus {
    if channel.is_null() || out_counts.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    let spec = &(*channel).spec;
    let probs = probabilities_for_angles(spec.theta_mix, spec.theta_prime_mix);
    let counts = sample_from_probabilities(&probs, seed, shots);
    std::ptr::copy_nonoverlapping(counts.as_ptr(), out_counts, 4);
    QbStatus::QbStatusOk
}

/// Fills `out` with the effective oscillator constants for a charged
/// particle in a magnetic field with a noncommutative correction. Fails
/// with `QB_STATUS_CRITICAL_PARAMETERS` at e*theta_nc*b_field = 1.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_landau(
    mass: f64,
    charge: f64,
    b_field: f64,
    theta_nc: f64,
    hbar: f64,
    out: *mut QbLandau,
) -> QbStatus {
    if out.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    let params = match LandauParams::new(mass, charge, b_field, theta_nc)
        .and_then(|p| p.with_hbar(hbar))
    {
        Ok(p) => p,
        Err(ref e) => return e.into(),
    };
    *out = QbLandau {
        m_star: params.m_star(),
        omega: params.omega(),
        omega_star: params.omega_star(),
        kappa: params.kappa,
        level_spacing: params.hbar * params.omega_star(),
    };
    QbStatus::QbStatusOk
}

/// Writes the `n`-th oscillator energy hbar * omega_star * (n + 1/2) to
/// `out`, under the same parameter validation as `qb_landau`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn qb_landau_level(
    mass: f64,
    charge: f64,
    b_field: f64,
    theta_nc: f64,
    hbar: f64,
    n: u32,
    out: *mut f64,
) -> QbStatus {
    if out.is_null() {
        return QbStatus::QbStatusNullPointer;
    }
    let params = match LandauParams::new(mass, charge, b_field, theta_nc)
        .and_then(|p| p.with_hbar(hbar))
    {
        Ok(p) => p,
        Err(ref e) => return e.into(),
    };
    *out = energy_level(n, &params);
    QbStatus::QbStatusOk
}
