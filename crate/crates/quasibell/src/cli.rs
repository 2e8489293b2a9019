//! Command-line front end: single-point metrics, teleportation reports,
//! parameter sweeps, oscillator diagnostics, and the verification suite.
//!
//! Exit codes: 0 success, 1 verification failure, 2 invalid or degenerate
//! input. Values layer as flags > config file (`key=value` lines) >
//! defaults. Numeric CSV cells use 17-significant-digit scientific notation
//! so reruns are byte-identical; JSON uses `serde_json`'s shortest
//! round-trip formatting for the same reason.

use std::collections::HashMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde_json::json;

use crate::error::Error;
use crate::landau::{
    drift_over_periods, energy_level, ClassicalState, LandauParams,
};
use crate::oracle::verification::{run as run_verification, VerificationOptions};
use crate::quasi_bell::{
    entanglement_entropy, entanglement_report, gram_matrix, make_channel, ChannelSpec, StateIndex,
};
use crate::teleport::{
    concurrence_for_angles, fidelity_for_angles, is_formal_limit, masfi_for_angles,
    probabilities_for_angles, report_for_angles, sample_from_probabilities, teleport_report,
    TeleportReport,
};

/// Entry point used by the binary; returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.exit_code() == 0 { 0 } else { 2 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(failure) => failure.emit(),
    }
}

#[derive(Parser)]
#[command(
    name = "quasibell",
    version,
    about = "Qubit teleportation over nonorthogonal two-mode channels: metrics, sweeps, and a verification suite"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Overlap, Gram, spectrum, and entanglement numbers for one label pair
    Metrics(MetricsArgs),
    /// Full teleportation report, optionally with seeded outcome sampling
    Teleport(TeleportArgs),
    /// CSV/JSON table of channel quantities over a label range
    Sweep(SweepArgs),
    /// Effective oscillator parameters, level ladder, and integrator drift
    Landau(LandauArgs),
    /// Cross-check every closed form against the brute-force oracle
    Verify(VerifyArgs),
}

#[derive(Args, Clone)]
struct SharedArgs {
    /// First coherent label, as "re", "re+imi", or "imi"
    #[arg(long)]
    alpha: Option<String>,
    /// Second coherent label, same syntax as --alpha
    #[arg(long)]
    beta: Option<String>,
    /// Fock levels per mode (default: per-label heuristic)
    #[arg(long)]
    cutoff: Option<usize>,
    /// Comparison tolerance where one applies
    #[arg(long)]
    tolerance: Option<f64>,
    /// Output format (default: json; sweep defaults to csv)
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Write output here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
    /// Seed for sampled outcomes
    #[arg(long)]
    seed: Option<u64>,
    /// key=value file supplying defaults for any long flag of this subcommand
    #[arg(long)]
    config: Option<PathBuf>,
    /// Evaluate grids concurrently (same output, any scheduling)
    #[arg(long)]
    parallel: bool,
}

#[derive(Args)]
struct MetricsArgs {
    #[command(flatten)]
    shared: SharedArgs,
}

#[derive(Args)]
struct TeleportArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Number of seeded measurement draws to report
    #[arg(long)]
    shots: Option<u64>,
    /// Permit evaluating the closed forms at the pi/4 endpoint
    #[arg(long = "formal-limit")]
    formal_limit: bool,
    /// Mixing angle in (0, pi/4]; replaces --alpha/--beta
    #[arg(long)]
    theta: Option<f64>,
    /// Second mixing angle, or the literal "same"
    #[arg(long = "theta-prime")]
    theta_prime: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// First swept label modulus
    #[arg(long)]
    start: Option<f64>,
    /// Last swept label modulus
    #[arg(long)]
    stop: Option<f64>,
    /// Number of grid points (>= 2, endpoints included)
    #[arg(long)]
    count: Option<usize>,
    /// Sweep the diagonal |alpha| = |beta| (default unless --beta is given)
    #[arg(long)]
    diagonal: bool,
}

#[derive(Args)]
struct LandauArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Particle mass
    #[arg(long)]
    mass: Option<f64>,
    /// Charge
    #[arg(long = "e")]
    charge: Option<f64>,
    /// Magnetic field strength
    #[arg(long = "B")]
    b_field: Option<f64>,
    /// Noncommutativity parameter
    #[arg(long = "theta-nc")]
    theta_nc: Option<f64>,
    /// Planck constant scale
    #[arg(long)]
    hbar: Option<f64>,
    /// How many energy levels to list
    #[arg(long)]
    levels: Option<u32>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    shared: SharedArgs,
    /// Largest coherent label the suite exercises
    #[arg(long = "alpha-max")]
    alpha_max: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
}

/// A failure on its way to becoming process output: code 2 for bad or
/// degenerate input, 1 for verification failures.
#[derive(Debug)]
struct Failure {
    code: i32,
    error_code: &'static str,
    message: String,
    format: Option<OutputFormat>,
    output: Option<PathBuf>,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            error_code: "invalid_argument",
            message: message.into(),
            format: None,
            output: None,
        }
    }

    fn domain(err: Error) -> Self {
        Failure {
            code: 2,
            error_code: err.code(),
            message: err.to_string(),
            format: None,
            output: None,
        }
    }

    fn routed(mut self, format: OutputFormat, output: Option<&PathBuf>) -> Self {
        self.format = Some(format);
        self.output = output.cloned();
        self
    }

    /// Prints the failure (JSON error record when the invocation asked for
    /// JSON, stderr text otherwise) and returns the exit code.
    fn emit(self) -> i32 {
        if self.format == Some(OutputFormat::Json) {
            let record = json!({
                "error": { "code": self.error_code, "message": self.message }
            });
            let rendered = to_pretty(&record);
            if write_sink(self.output.as_deref(), &rendered).is_err() {
                eprintln!("error: {}", self.message);
            }
        } else {
            eprintln!("error: {}", self.message);
        }
        self.code
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::domain(err)
    }
}

fn dispatch(cli: Cli) -> Result<i32, Failure> {
    match cli.command {
        Command::Metrics(args) => cmd_metrics(args),
        Command::Teleport(args) => cmd_teleport(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Landau(args) => cmd_landau(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// Complex literal parser: "0.8", "-1.5", "0.5+0.3i", "2e-3-1e-4i", "0.7i".
pub fn parse_complex(text: &str) -> Result<C64, String> {
    let s = text.trim();
    if s.is_empty() {
        return Err("empty complex literal".into());
    }
    let bad = |s: &str| format!("cannot parse '{s}' as a complex number");
    if !s.ends_with('i') {
        return s.parse::<f64>().map(|re| C64::new(re, 0.0)).map_err(|_| bad(s));
    }
    let body = &s[..s.len() - 1];
    if body.is_empty() {
        return Err(bad(s));
    }
    // the imaginary part starts at the last sign that is not an exponent
    // sign and not the leading sign
    let mut split = None;
    for (idx, ch) in body.char_indices().skip(1) {
        if (ch == '+' || ch == '-')
            && !matches!(body.as_bytes()[idx - 1], b'e' | b'E')
        {
            split = Some(idx);
        }
    }
    match split {
        Some(idx) => {
            let re = body[..idx].parse::<f64>().map_err(|_| bad(s))?;
            let im = body[idx..].parse::<f64>().map_err(|_| bad(s))?;
            Ok(C64::new(re, im))
        }
        None => body.parse::<f64>().map(|im| C64::new(0.0, im)).map_err(|_| bad(s)),
    }
}

/// key=value pairs loaded from --config, with `#` comments and blank lines
/// skipped.
struct FileConfig(HashMap<String, String>);

impl FileConfig {
    fn load(path: Option<&Path>) -> Result<Self, Failure> {
        let mut map = HashMap::new();
        let Some(path) = path else {
            return Ok(Self(map));
        };
        let text = std::fs::read_to_string(path).map_err(|e| {
            Failure::invalid(format!("cannot read config {}: {e}", path.display()))
        })?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Failure::invalid(format!(
                    "config line {} is not key=value: '{line}'",
                    lineno + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Self(map))
    }

    fn reject_unknown(&self, allowed: &[&str]) -> Result<(), Failure> {
        for key in self.0.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(Failure::invalid(format!(
                    "config key '{key}' is not a flag of this subcommand"
                )));
            }
        }
        Ok(())
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    /// flag > file > absent, with the file value parsed on demand.
    fn layer<T, F>(&self, key: &str, flag: Option<T>, parse: F) -> Result<Option<T>, Failure>
    where
        F: FnOnce(&str) -> Result<T, String>,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.raw(key) {
            Some(text) => parse(text)
                .map(Some)
                .map_err(|e| Failure::invalid(format!("config key '{key}': {e}"))),
            None => Ok(None),
        }
    }

    fn layer_bool(&self, key: &str, flag: bool) -> Result<bool, Failure> {
        if flag {
            return Ok(true);
        }
        Ok(self
            .layer(key, None, |t| {
                t.parse::<bool>().map_err(|_| format!("'{t}' is not a bool"))
            })?
            .unwrap_or(false))
    }
}

fn parse_num<T: std::str::FromStr>(text: &str) -> Result<T, String> {
    text.parse::<T>()
        .map_err(|_| format!("cannot parse '{text}' as a number"))
}

fn parse_format(text: &str) -> Result<OutputFormat, String> {
    match text {
        "json" => Ok(OutputFormat::Json),
        "csv" => Ok(OutputFormat::Csv),
        other => Err(format!("unknown format '{other}' (expected json or csv)")),
    }
}

const SHARED_KEYS: [&str; 9] = [
    "alpha",
    "beta",
    "cutoff",
    "tolerance",
    "format",
    "output",
    "seed",
    "parallel",
    "config",
];

/// Shared flags after layering (config path itself never comes from a file).
struct ResolvedShared {
    alpha: Option<C64>,
    beta: Option<C64>,
    cutoff: Option<usize>,
    tolerance: f64,
    format: Option<OutputFormat>,
    output: Option<PathBuf>,
    seed: u64,
    parallel: bool,
}

fn resolve_shared(shared: &SharedArgs, file: &FileConfig) -> Result<ResolvedShared, Failure> {
    let alpha = file.layer(
        "alpha",
        shared.alpha.as_deref().map(str::to_string),
        |t| Ok(t.to_string()),
    )?;
    let beta = file.layer(
        "beta",
        shared.beta.as_deref().map(str::to_string),
        |t| Ok(t.to_string()),
    )?;
    let alpha = alpha
        .map(|t| parse_complex(&t).map_err(Failure::invalid))
        .transpose()?;
    let beta = beta
        .map(|t| parse_complex(&t).map_err(Failure::invalid))
        .transpose()?;
    let tolerance = file
        .layer("tolerance", shared.tolerance, parse_num::<f64>)?
        .unwrap_or(1e-10);
    if tolerance.is_nan() || tolerance <= 0.0 {
        return Err(Failure::invalid("tolerance must be positive"));
    }
    Ok(ResolvedShared {
        alpha,
        beta,
        cutoff: file.layer("cutoff", shared.cutoff, parse_num::<usize>)?,
        tolerance,
        format: file.layer("format", shared.format, parse_format)?,
        output: file.layer("output", shared.output.clone(), |t| Ok(PathBuf::from(t)))?,
        seed: file
            .layer("seed", shared.seed, parse_num::<u64>)?
            .unwrap_or(0),
        parallel: file.layer_bool("parallel", shared.parallel)?,
    })
}

fn write_sink(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    match path {
        Some(path) => std::fs::write(path, content).map_err(|e| {
            Failure::invalid(format!("cannot write {}: {e}", path.display()))
        }),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_pretty(value: &serde_json::Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("in-memory JSON serializes");
    text.push('\n');
    text
}

/// 17-significant-digit scientific notation, the fixed CSV number format.
fn sci(x: f64) -> String {
    format!("{x:.16e}")
}

fn render_csv(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

fn complex_json(z: C64) -> serde_json::Value {
    json!([z.re, z.im])
}

// ---------------------------------------------------------------------------
// metrics

fn cmd_metrics(args: MetricsArgs) -> Result<i32, Failure> {
    let file = FileConfig::load(args.shared.config.as_deref())?;
    file.reject_unknown(&SHARED_KEYS)?;
    let shared = resolve_shared(&args.shared, &file)?;
    let format = shared.format.unwrap_or(OutputFormat::Json);
    let route = |f: Failure| f.routed(format, shared.output.as_ref());

    let (Some(alpha), Some(beta)) = (shared.alpha, shared.beta) else {
        return Err(route(Failure::invalid(
            "metrics needs --alpha and --beta (flags or config file)",
        )));
    };
    let spec = make_channel(alpha, beta);
    let gram = gram_matrix(&spec);
    let reports: Vec<_> = StateIndex::ALL
        .iter()
        .map(|&i| (i, entanglement_report(i, &spec)))
        .collect();
    let any_error = reports.iter().any(|(_, r)| r.is_err()) || gram.g24().is_err();

    let content = match format {
        OutputFormat::Json => {
            let states: Vec<serde_json::Value> = reports
                .iter()
                .map(|(i, r)| match r {
                    Ok(rep) => json!({
                        "index": i.as_u8(),
                        "eigenvalues": [rep.eigen_pair.0, rep.eigen_pair.1],
                        "entropy_bits": rep.entropy_bits,
                        "concurrence": rep.concurrence,
                    }),
                    Err(e) => json!({
                        "index": i.as_u8(),
                        "error": { "code": e.code(), "message": e.to_string() },
                    }),
                })
                .collect();
            let g24 = match gram.g24() {
                Ok(v) => json!(v),
                Err(_) => serde_json::Value::Null,
            };
            to_pretty(&json!({
                "abs_alpha": spec.alpha.norm(),
                "abs_beta": spec.beta.norm(),
                "s": spec.s,
                "s_prime": spec.s_prime,
                "theta": spec.theta_mix,
                "theta_prime": spec.theta_prime_mix,
                "gram": { "g13": gram.g13(), "g24": g24 },
                "states": states,
                "channel_concurrence": crate::quasi_bell::concurrence_channel(&spec),
            }))
        }
        OutputFormat::Csv => {
            let mut row = vec![
                sci(spec.alpha.norm()),
                sci(spec.beta.norm()),
                sci(spec.s),
                sci(spec.s_prime),
                sci(spec.theta_mix),
                sci(spec.theta_prime_mix),
                sci(gram.g13()),
                gram.g24().map(sci).unwrap_or_default(),
            ];
            for (_, r) in &reports {
                match r {
                    Ok(rep) => {
                        row.push(sci(rep.eigen_pair.0));
                        row.push(sci(rep.eigen_pair.1));
                        row.push(sci(rep.entropy_bits));
                    }
                    Err(_) => row.extend([String::new(), String::new(), String::new()]),
                }
            }
            row.push(sci(crate::quasi_bell::concurrence_channel(&spec)));
            row.push(if any_error { "degenerate".into() } else { String::new() });
            render_csv(
                &[
                    "abs_alpha",
                    "abs_beta",
                    "s",
                    "s_prime",
                    "theta",
                    "theta_prime",
                    "g13",
                    "g24",
                    "lambda_1",
                    "lambda_prime_1",
                    "entropy_1",
                    "lambda_2",
                    "lambda_prime_2",
                    "entropy_2",
                    "lambda_3",
                    "lambda_prime_3",
                    "entropy_3",
                    "lambda_4",
                    "lambda_prime_4",
                    "entropy_4",
                    "concurrence",
                    "flag",
                ],
                &[row],
            )
        }
    };
    write_sink(shared.output.as_deref(), &content)?;
    Ok(if any_error { 2 } else { 0 })
}

// ---------------------------------------------------------------------------
// teleport

fn cmd_teleport(args: TeleportArgs) -> Result<i32, Failure> {
    let file = FileConfig::load(args.shared.config.as_deref())?;
    let mut allowed = SHARED_KEYS.to_vec();
    allowed.extend(["shots", "formal-limit", "theta", "theta-prime"]);
    file.reject_unknown(&allowed)?;
    let shared = resolve_shared(&args.shared, &file)?;
    let format = shared.format.unwrap_or(OutputFormat::Json);
    let route = |f: Failure| f.routed(format, shared.output.as_ref());

    let shots = file.layer("shots", args.shots, parse_num::<u64>)?;
    let formal = file.layer_bool("formal-limit", args.formal_limit)?;
    let theta = file.layer("theta", args.theta, parse_num::<f64>)?;
    let theta_prime_raw = file.layer(
        "theta-prime",
        args.theta_prime.clone(),
        |t| Ok(t.to_string()),
    )?;

    let report: TeleportReport = if let Some(theta) = theta {
        if shared.alpha.is_some() || shared.beta.is_some() {
            return Err(route(Failure::invalid(
                "--theta replaces --alpha/--beta; give one parameterization",
            )));
        }
        let theta_prime = match theta_prime_raw.as_deref() {
            None | Some("same") => theta,
            Some(text) => parse_num::<f64>(text).map_err(Failure::invalid).map_err(route)?,
        };
        if !formal && is_formal_limit(theta, theta_prime) {
            return Err(route(Failure::domain(Error::BasisUndefined {
                angle: theta.max(theta_prime),
            })));
        }
        report_for_angles(theta, theta_prime).map_err(Failure::domain).map_err(route)?
    } else {
        if theta_prime_raw.is_some() {
            return Err(route(Failure::invalid("--theta-prime requires --theta")));
        }
        let (Some(alpha), Some(beta)) = (shared.alpha, shared.beta) else {
            return Err(route(Failure::invalid(
                "teleport needs --alpha and --beta, or --theta",
            )));
        };
        let spec = make_channel(alpha, beta);
        if formal {
            report_for_angles(spec.theta_mix, spec.theta_prime_mix)
                .map_err(Failure::domain)
                .map_err(route)?
        } else {
            teleport_report(&spec).map_err(Failure::domain).map_err(route)?
        }
    };

    let probs = report.outcomes.map(|o| o.probability);
    let sampling = shots.map(|n| {
        let counts = sample_from_probabilities(&probs, shared.seed, n);
        (n, counts)
    });

    let content = match format {
        OutputFormat::Json => {
            let outcomes: Vec<serde_json::Value> = report
                .outcomes
                .iter()
                .map(|o| {
                    json!({
                        "label": o.label.label(),
                        "correction": o.label.correction_name(),
                        "probability": o.probability,
                        "bella_state_raw": [
                            complex_json(o.bella_state_raw[0]),
                            complex_json(o.bella_state_raw[1]),
                        ],
                        "bella_state_corrected": [
                            complex_json(o.bella_state_corrected[0]),
                            complex_json(o.bella_state_corrected[1]),
                        ],
                    })
                })
                .collect();
            let mut top = json!({
                "abs_alpha": report.spec.alpha.norm(),
                "abs_beta": report.spec.beta.norm(),
                "theta": report.spec.theta_mix,
                "theta_prime": report.spec.theta_prime_mix,
                "formal_limit": report.formal_limit,
                "outcomes": outcomes,
                "fidelity": report.fidelity,
                "concurrence": report.concurrence,
                "masfi": report.masfi,
            });
            if let Some((n, counts)) = sampling {
                let freq: Vec<f64> = counts.iter().map(|&c| c as f64 / n as f64).collect();
                top["sampling"] = json!({
                    "seed": shared.seed,
                    "shots": n,
                    "counts": {
                        "phi_plus": counts[0],
                        "phi_minus": counts[1],
                        "psi_plus": counts[2],
                        "psi_minus": counts[3],
                    },
                    "frequencies": {
                        "phi_plus": freq[0],
                        "phi_minus": freq[1],
                        "psi_plus": freq[2],
                        "psi_minus": freq[3],
                    },
                });
            }
            to_pretty(&top)
        }
        OutputFormat::Csv => {
            let mut header = vec![
                "abs_alpha",
                "abs_beta",
                "theta",
                "theta_prime",
                "P1",
                "P2",
                "P3",
                "P4",
                "fidelity",
                "concurrence",
                "masfi",
                "flag",
            ];
            let mut row = vec![
                sci(report.spec.alpha.norm()),
                sci(report.spec.beta.norm()),
                sci(report.spec.theta_mix),
                sci(report.spec.theta_prime_mix),
                sci(probs[0]),
                sci(probs[1]),
                sci(probs[2]),
                sci(probs[3]),
                sci(report.fidelity),
                sci(report.concurrence),
                sci(report.masfi),
                if report.formal_limit {
                    "formal_limit".into()
                } else {
                    String::new()
                },
            ];
            if let Some((n, counts)) = sampling {
                header.extend([
                    "shots",
                    "seed",
                    "count_phi_plus",
                    "count_phi_minus",
                    "count_psi_plus",
                    "count_psi_minus",
                    "freq_phi_plus",
                    "freq_phi_minus",
                    "freq_psi_plus",
                    "freq_psi_minus",
                ]);
                row.push(n.to_string());
                row.push(shared.seed.to_string());
                for c in counts {
                    row.push(c.to_string());
                }
                for c in counts {
                    row.push(sci(c as f64 / n as f64));
                }
            }
            render_csv(&header, &[row])
        }
    };
    write_sink(shared.output.as_deref(), &content)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// sweep

/// Frozen sweep column set; `flag` marks degenerate or formal-limit rows.
pub const SWEEP_HEADER: [&str; 14] = [
    "abs_alpha",
    "abs_beta",
    "s",
    "s_prime",
    "theta",
    "theta_prime",
    "P1",
    "P2",
    "fidelity",
    "concurrence",
    "masfi",
    "entropy_1",
    "entropy_2",
    "flag",
];

struct SweepRow {
    abs_alpha: f64,
    abs_beta: f64,
    spec: ChannelSpec,
    probabilities: [f64; 4],
    fidelity: f64,
    concurrence: f64,
    masfi: f64,
    entropy_1: f64,
    /// Missing when the antisymmetric states do not exist (degenerate point).
    entropy_2: Option<f64>,
    flag: &'static str,
}

fn sweep_row(a: f64, b: f64) -> SweepRow {
    let spec = make_channel(C64::new(a, 0.0), C64::new(b, 0.0));
    let (t, tp) = (spec.theta_mix, spec.theta_prime_mix);
    SweepRow {
        abs_alpha: a,
        abs_beta: b,
        spec,
        probabilities: probabilities_for_angles(t, tp),
        fidelity: fidelity_for_angles(t, tp),
        concurrence: concurrence_for_angles(t, tp),
        masfi: masfi_for_angles(t, tp),
        entropy_1: entanglement_entropy(StateIndex::Psi1, &spec)
            .expect("symmetric-state entropy is total"),
        entropy_2: entanglement_entropy(StateIndex::Psi2, &spec).ok(),
        flag: if spec.is_degenerate() {
            "degenerate"
        } else if is_formal_limit(t, tp) {
            "formal_limit"
        } else {
            ""
        },
    }
}

fn cmd_sweep(args: SweepArgs) -> Result<i32, Failure> {
    let file = FileConfig::load(args.shared.config.as_deref())?;
    let mut allowed = SHARED_KEYS.to_vec();
    allowed.extend(["start", "stop", "count", "diagonal"]);
    file.reject_unknown(&allowed)?;
    let shared = resolve_shared(&args.shared, &file)?;
    let format = shared.format.unwrap_or(OutputFormat::Csv);
    let route = |f: Failure| f.routed(format, shared.output.as_ref());

    if shared.alpha.is_some() {
        return Err(route(Failure::invalid(
            "sweep varies |alpha| itself; drop --alpha (use --beta to fix the second label)",
        )));
    }
    let start = file
        .layer("start", args.start, parse_num::<f64>)?
        .ok_or_else(|| route(Failure::invalid("sweep needs --start")))?;
    let stop = file
        .layer("stop", args.stop, parse_num::<f64>)?
        .ok_or_else(|| route(Failure::invalid("sweep needs --stop")))?;
    let count = file
        .layer("count", args.count, parse_num::<usize>)?
        .ok_or_else(|| route(Failure::invalid("sweep needs --count")))?;
    let diagonal = file.layer_bool("diagonal", args.diagonal)?;
    if count < 2 {
        return Err(route(Failure::invalid("sweep count must be at least 2")));
    }
    if start.is_nan() || stop.is_nan() || start >= stop {
        return Err(route(Failure::invalid("sweep needs start < stop")));
    }
    if start < 0.0 {
        return Err(route(Failure::invalid("swept label moduli cannot be negative")));
    }
    let fixed_beta = match (&shared.beta, diagonal) {
        (Some(_), true) => {
            return Err(route(Failure::invalid(
                "--diagonal and a fixed --beta are mutually exclusive",
            )))
        }
        (Some(beta), false) => {
            if beta.im != 0.0 {
                return Err(route(Failure::invalid(
                    "sweep uses |beta|; give a real nonnegative value",
                )));
            }
            Some(beta.re.abs())
        }
        (None, _) => None,
    };

    let points: Vec<f64> = (0..count)
        .map(|k| start + (stop - start) * k as f64 / (count - 1) as f64)
        .collect();
    let rows: Vec<SweepRow> = if shared.parallel {
        use rayon::prelude::*;
        points
            .par_iter()
            .map(|&a| sweep_row(a, fixed_beta.unwrap_or(a)))
            .collect()
    } else {
        points
            .iter()
            .map(|&a| sweep_row(a, fixed_beta.unwrap_or(a)))
            .collect()
    };

    let content = match format {
        OutputFormat::Csv => {
            let cells: Vec<Vec<String>> = rows
                .iter()
                .map(|r| {
                    vec![
                        sci(r.abs_alpha),
                        sci(r.abs_beta),
                        sci(r.spec.s),
                        sci(r.spec.s_prime),
                        sci(r.spec.theta_mix),
                        sci(r.spec.theta_prime_mix),
                        sci(r.probabilities[0]),
                        sci(r.probabilities[1]),
                        sci(r.fidelity),
                        sci(r.concurrence),
                        sci(r.masfi),
                        sci(r.entropy_1),
                        r.entropy_2.map(sci).unwrap_or_default(),
                        r.flag.to_string(),
                    ]
                })
                .collect();
            render_csv(&SWEEP_HEADER, &cells)
        }
        OutputFormat::Json => {
            let objects: Vec<serde_json::Value> = rows
                .iter()
                .map(|r| {
                    json!({
                        "abs_alpha": r.abs_alpha,
                        "abs_beta": r.abs_beta,
                        "s": r.spec.s,
                        "s_prime": r.spec.s_prime,
                        "theta": r.spec.theta_mix,
                        "theta_prime": r.spec.theta_prime_mix,
                        "P1": r.probabilities[0],
                        "P2": r.probabilities[1],
                        "fidelity": r.fidelity,
                        "concurrence": r.concurrence,
                        "masfi": r.masfi,
                        "entropy_1": r.entropy_1,
                        "entropy_2": r.entropy_2,
                        "flag": r.flag,
                    })
                })
                .collect();
            to_pretty(&json!({ "rows": objects }))
        }
    };
    write_sink(shared.output.as_deref(), &content)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// landau

fn cmd_landau(args: LandauArgs) -> Result<i32, Failure> {
    let file = FileConfig::load(args.shared.config.as_deref())?;
    let mut allowed = SHARED_KEYS.to_vec();
    allowed.extend(["mass", "e", "B", "theta-nc", "hbar", "levels"]);
    file.reject_unknown(&allowed)?;
    let shared = resolve_shared(&args.shared, &file)?;
    let format = shared.format.unwrap_or(OutputFormat::Json);
    let route = |f: Failure| f.routed(format, shared.output.as_ref());

    let mass = file.layer("mass", args.mass, parse_num::<f64>)?.unwrap_or(1.0);
    let charge = file.layer("e", args.charge, parse_num::<f64>)?.unwrap_or(1.0);
    let b_field = file.layer("B", args.b_field, parse_num::<f64>)?.unwrap_or(1.0);
    let theta_nc = file
        .layer("theta-nc", args.theta_nc, parse_num::<f64>)?
        .unwrap_or(0.0);
    let hbar = file.layer("hbar", args.hbar, parse_num::<f64>)?.unwrap_or(1.0);
    let levels = file.layer("levels", args.levels, parse_num::<u32>)?.unwrap_or(6);

    let params = LandauParams::new(mass, charge, b_field, theta_nc)
        .and_then(|p| p.with_hbar(hbar))
        .map_err(Failure::domain)
        .map_err(route)?;

    let energies: Vec<f64> = (0..levels).map(|n| energy_level(n, &params)).collect();
    let init = ClassicalState::new(1.0, 0.5, 0.3, 1.0, 0.0);
    let max_drift = drift_over_periods(&init, &params, 10.0, 1000)
        .map_err(Failure::domain)
        .map_err(route)?;

    let content = match format {
        OutputFormat::Json => to_pretty(&json!({
            "mass": params.mass,
            "charge": params.charge,
            "b_field": params.b_field,
            "theta_nc": params.theta_nc,
            "kappa": params.kappa,
            "hbar": params.hbar,
            "m_star": params.m_star(),
            "omega": params.omega(),
            "omega_star": params.omega_star(),
            "level_spacing": params.hbar * params.omega_star(),
            "levels": energies,
            "max_drift": max_drift,
        })),
        OutputFormat::Csv => {
            let mut header: Vec<String> = [
                "mass",
                "charge",
                "b_field",
                "theta_nc",
                "kappa",
                "hbar",
                "m_star",
                "omega",
                "omega_star",
                "level_spacing",
                "max_drift",
            ]
            .iter()
            .map(|s| s.to_string())
            .collect();
            let mut row = vec![
                sci(params.mass),
                sci(params.charge),
                sci(params.b_field),
                sci(params.theta_nc),
                sci(params.kappa),
                sci(params.hbar),
                sci(params.m_star()),
                sci(params.omega()),
                sci(params.omega_star()),
                sci(params.hbar * params.omega_star()),
                sci(max_drift),
            ];
            for (n, e) in energies.iter().enumerate() {
                header.push(format!("e_{n}"));
                row.push(sci(*e));
            }
            let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
            render_csv(&header_refs, &[row])
        }
    };
    write_sink(shared.output.as_deref(), &content)?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify

fn cmd_verify(args: VerifyArgs) -> Result<i32, Failure> {
    let file = FileConfig::load(args.shared.config.as_deref())?;
    let mut allowed = SHARED_KEYS.to_vec();
    allowed.push("alpha-max");
    file.reject_unknown(&allowed)?;
    let shared = resolve_shared(&args.shared, &file)?;
    let alpha_max = file
        .layer("alpha-max", args.alpha_max, parse_num::<f64>)?
        .unwrap_or(3.0);
    if alpha_max.is_nan() || alpha_max <= 0.0 {
        return Err(Failure::invalid("--alpha-max must be positive"));
    }

    let opts = VerificationOptions {
        cutoff: shared.cutoff,
        tolerance: shared.tolerance,
        alpha_max,
        parallel: shared.parallel,
    };
    let report = run_verification(&opts);

    let content = match shared.format {
        None => {
            // human-readable default: one line per check, then the verdict
            let mut text = String::new();
            for c in &report.checks {
                let status = if c.pass { "PASS" } else { "FAIL" };
                let _ = writeln!(
                    text,
                    "{:<32} max deviation {:>12.3e}  tolerance {:>9.1e}  {status}",
                    c.name, c.max_dev, c.tolerance
                );
                if let Some(detail) = &c.detail {
                    let _ = writeln!(text, "    {detail}");
                }
            }
            let verdict = if report.passed { "PASSED" } else { "FAILED" };
            let good = report.checks.iter().filter(|c| c.pass).count();
            let _ = writeln!(
                text,
                "verification {verdict} ({good}/{} checks)",
                report.checks.len()
            );
            text
        }
        Some(OutputFormat::Json) => {
            let checks: Vec<serde_json::Value> = report
                .checks
                .iter()
                .map(|c| {
                    json!({
                        "name": c.name,
                        "max_deviation": c.max_dev,
                        "tolerance": c.tolerance,
                        "pass": c.pass,
                        "detail": c.detail,
                    })
                })
                .collect();
            to_pretty(&json!({ "checks": checks, "passed": report.passed }))
        }
        Some(OutputFormat::Csv) => {
            let rows: Vec<Vec<String>> = report
                .checks
                .iter()
                .map(|c| {
                    vec![
                        c.name.to_string(),
                        sci(c.max_dev),
                        sci(c.tolerance),
                        c.pass.to_string(),
                    ]
                })
                .collect();
            render_csv(&["name", "max_deviation", "tolerance", "pass"], &rows)
        }
    };
    write_sink(shared.output.as_deref(), &content)?;
    Ok(if report.passed { 0 } else { 1 })
}
