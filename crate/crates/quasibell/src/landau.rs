//! Planar charged particle in a magnetic field with a noncommutative
//! position sector: effective mass and frequency, the quantum energy ladder,
//! classical cyclotron motion, and the conserved translation/boost pairs.
//!
//! Conventions: the field B points along z, `eps^{12} = +1`, and natural
//! units `hbar = M = e = 1` are the defaults. The noncommutative parameter
//! `theta_nc` has area units and enters only through the product
//! `e * theta_nc * B`.

use crate::error::{Error, Result};

/// Critical-surface guard: `|1 - e*theta*B|` must exceed this.
const CRITICAL_TOL: f64 = 1e-12;
/// Hard cap on integrator steps.
const MAX_STEPS: f64 = 1e8;

/// Model parameters plus derived effective quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LandauParams {
    pub mass: f64,
    pub charge: f64,
    pub b_field: f64,
    /// Noncommutative parameter theta; the exotic parameter is kappa = theta * mass^2.
    pub theta_nc: f64,
    pub kappa: f64,
    pub hbar: f64,
    /// Constant in-plane electric field, zero in the pure magnetic case.
    pub e_field: [f64; 2],
}

impl LandauParams {
    /// Pure magnetic configuration with `hbar = 1`.
    pub fn new(mass: f64, charge: f64, b_field: f64, theta_nc: f64) -> Result<Self> {
        let p = Self {
            mass,
            charge,
            b_field,
            theta_nc,
            kappa: theta_nc * mass * mass,
            hbar: 1.0,
            e_field: [0.0, 0.0],
        };
        p.validate()?;
        Ok(p)
    }

    /// Same, parameterized by kappa; theta is recovered as kappa / mass^2.
    pub fn from_kappa(mass: f64, charge: f64, b_field: f64, kappa: f64) -> Result<Self> {
        if mass <= 0.0 {
            return Err(Error::InvalidArgument("mass must be positive".into()));
        }
        Self::new(mass, charge, b_field, kappa / (mass * mass))
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        self.hbar = hbar;
        self.validate()?;
        Ok(self)
    }

    pub fn with_e_field(mut self, e_field: [f64; 2]) -> Result<Self> {
        self.e_field = e_field;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.mass.is_nan() || self.mass <= 0.0 || self.hbar.is_nan() || self.hbar <= 0.0 {
            return Err(Error::InvalidArgument(
                "mass and hbar must be positive".into(),
            ));
        }
        for v in [self.charge, self.b_field, self.theta_nc, self.e_field[0], self.e_field[1]] {
            if !v.is_finite() {
                return Err(Error::InvalidArgument("parameters must be finite".into()));
            }
        }
        let etb = self.charge * self.theta_nc * self.b_field;
        if (1.0 - etb).abs() <= CRITICAL_TOL {
            return Err(Error::CriticalParameters { etb });
        }
        Ok(())
    }

    /// `1 - e*theta*B`, the factor that deforms mass and frequency.
    fn deformation(&self) -> f64 {
        1.0 - self.charge * self.theta_nc * self.b_field
    }

    pub fn m_star(&self) -> f64 {
        self.mass * self.deformation()
    }

    pub fn omega(&self) -> f64 {
        self.charge * self.b_field / self.mass
    }

    pub fn omega_star(&self) -> f64 {
        self.omega() / self.deformation()
    }

    fn is_pure_magnetic(&self) -> bool {
        self.e_field == [0.0, 0.0]
    }
}

/// `(M*, omega, omega*)`.
pub fn effective_params(p: &LandauParams) -> (f64, f64, f64) {
    (p.m_star(), p.omega(), p.omega_star())
}

/// `E_n = hbar * omega* * (n + 1/2)`.
pub fn energy_level(n: u32, p: &LandauParams) -> f64 {
    p.hbar * p.omega_star() * (n as f64 + 0.5)
}

/// Phase-space point; `t` matters because the boost constant co-rotates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub x1: f64,
    pub x2: f64,
    pub p1: f64,
    pub p2: f64,
    pub t: f64,
}

impl ClassicalState {
    pub fn new(x1: f64, x2: f64, p1: f64, p2: f64, t: f64) -> Self {
        Self { x1, x2, p1, p2, t }
    }
}

/// Guiding-center form of the pure magnetic orbit:
/// `x(t) = R(-omega* t) alpha + beta`.
#[derive(Debug, Clone, Copy)]
pub struct CyclotronSolution {
    pub alpha_vec: [f64; 2],
    pub beta_vec: [f64; 2],
    pub omega_star: f64,
    m_star: f64,
}

fn rot(phi: f64, v: [f64; 2]) -> [f64; 2] {
    let (s, c) = phi.sin_cos();
    [c * v[0] - s * v[1], s * v[0] + c * v[1]]
}

impl CyclotronSolution {
    /// Orbit radius `|alpha|`.
    pub fn radius(&self) -> f64 {
        self.alpha_vec[0].hypot(self.alpha_vec[1])
    }

    pub fn eval(&self, t: f64) -> ClassicalState {
        let phi = -self.omega_star * t;
        let x = rot(phi, self.alpha_vec);
        // xdot = -omega* R(-omega* t) J alpha with J the +90 degree rotation
        let j_alpha = [-self.alpha_vec[1], self.alpha_vec[0]];
        let xdot = rot(phi, j_alpha);
        ClassicalState {
            x1: x[0] + self.beta_vec[0],
            x2: x[1] + self.beta_vec[1],
            p1: -self.m_star * self.omega_star * xdot[0],
            p2: -self.m_star * self.omega_star * xdot[1],
            t,
        }
    }
}

/// Constants `alpha`, `beta` of the cyclotron orbit through `init`.
pub fn cyclotron_closed_form(init: &ClassicalState, p: &LandauParams) -> Result<CyclotronSolution> {
    if !p.is_pure_magnetic() {
        return Err(Error::Unsupported(
            "cyclotron closed form only covers the pure magnetic case".into(),
        ));
    }
    let omega_star = p.omega_star();
    if omega_star.abs() < 1e-300 {
        return Err(Error::InvalidArgument(
            "field-free motion is a straight line, not a cyclotron orbit".into(),
        ));
    }
    let m_star = p.m_star();
    // velocity from momentum; then alpha = R(omega* t0) J xdot / omega*
    let xdot = [init.p1 / m_star, init.p2 / m_star];
    let j_xdot = [-xdot[1], xdot[0]];
    let alpha_vec = rot(omega_star * init.t, [j_xdot[0] / omega_star, j_xdot[1] / omega_star]);
    let at_t0 = rot(-omega_star * init.t, alpha_vec);
    let beta_vec = [init.x1 - at_t0[0], init.x2 - at_t0[1]];
    Ok(CyclotronSolution {
        alpha_vec,
        beta_vec,
        omega_star,
        m_star,
    })
}

fn eom_rhs(p: &LandauParams, s: &[f64; 4]) -> [f64; 4] {
    let m_star = p.m_star();
    let e = p.charge;
    let [e1, e2] = p.e_field;
    // M* xdot_i = p_i - M e theta eps^{ij} E_j
    let cx = p.mass * e * p.theta_nc;
    let xd1 = (s[2] - cx * e2) / m_star;
    let xd2 = (s[3] + cx * e1) / m_star;
    // pdot_i = e B eps^{ij} xdot_j + e E_i
    let eb = e * p.b_field;
    [xd1, xd2, eb * xd2 + e * e1, -eb * xd1 + e * e2]
}

/// Fixed-step RK4 trajectory from `init.t` to `t_end`; the returned list
/// starts with `init` and ends within one step of `t_end`.
pub fn integrate_eom(
    init: &ClassicalState,
    p: &LandauParams,
    t_end: f64,
    dt: f64,
) -> Result<Vec<ClassicalState>> {
    if dt.is_nan() || dt <= 0.0 || !t_end.is_finite() || t_end < init.t {
        return Err(Error::InvalidArgument(
            "integration needs dt > 0 and t_end >= start time".into(),
        ));
    }
    let span = t_end - init.t;
    let n_steps = (span / dt).round().max(0.0);
    if n_steps > MAX_STEPS {
        return Err(Error::Unsupported(format!(
            "{n_steps:.0} integration steps exceed the 1e8 guard"
        )));
    }
    let n_steps = n_steps as usize;

    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(*init);
    let mut y = [init.x1, init.x2, init.p1, init.p2];
    let mut t = init.t;
    for _ in 0..n_steps {
        let k1 = eom_rhs(p, &y);
        let mut y2 = y;
        for i in 0..4 {
            y2[i] = y[i] + 0.5 * dt * k1[i];
        }
        let k2 = eom_rhs(p, &y2);
        let mut y3 = y;
        for i in 0..4 {
            y3[i] = y[i] + 0.5 * dt * k2[i];
        }
        let k3 = eom_rhs(p, &y3);
        let mut y4 = y;
        for i in 0..4 {
            y4[i] = y[i] + dt * k3[i];
        }
        let k4 = eom_rhs(p, &y4);
        for i in 0..4 {
            y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += dt;
        out.push(ClassicalState::new(y[0], y[1], y[2], y[3], t));
    }
    Ok(out)
}

/// `(P1, P2, K1, K2)`: the conserved translation pair
/// `P_i = M*(xdot_i - omega* eps^{ij} x_j)` and boost pair
/// `K = (M*/M) R(omega* t) p`, both in the pure magnetic case.
pub fn conserved_quantities(state: &ClassicalState, p: &LandauParams) -> Result<[f64; 4]> {
    if !p.is_pure_magnetic() {
        return Err(Error::Unsupported(
            "conserved pairs are only derived for the pure magnetic case".into(),
        ));
    }
    let m_star = p.m_star();
    let ws = p.omega_star();
    let cal_p1 = state.p1 - m_star * ws * state.x2;
    let cal_p2 = state.p2 + m_star * ws * state.x1;
    let k = rot(ws * state.t, [state.p1, state.p2]);
    let scale = m_star / p.mass;
    Ok([cal_p1, cal_p2, scale * k[0], scale * k[1]])
}

/// Worst absolute drift of any conserved quantity along an RK4 trajectory
/// over `periods` cyclotron periods at `steps_per_period` steps each.
/// A direct integrator health metric: exact dynamics keep all four constant.
pub fn drift_over_periods(
    init: &ClassicalState,
    p: &LandauParams,
    periods: f64,
    steps_per_period: usize,
) -> Result<f64> {
    if periods.is_nan() || periods <= 0.0 || steps_per_period == 0 {
        return Err(Error::InvalidArgument(
            "drift check needs positive periods and steps".into(),
        ));
    }
    let period = std::f64::consts::TAU / p.omega_star().abs();
    let dt = period / steps_per_period as f64;
    let path = integrate_eom(init, p, init.t + periods * period, dt)?;
    let reference = conserved_quantities(init, p)?;
    let mut worst: f64 = 0.0;
    for state in &path {
        let q = conserved_quantities(state, p)?;
        for i in 0..4 {
            worst = worst.max((q[i] - reference[i]).abs());
        }
    }
    Ok(worst)
}

/// Poisson bracket `{f, g}` of two phase-space functions under the deformed
/// structure `{x1, x2} = g th`, `{x_i, p_j} = g d_ij`, `{p1, p2} = g e B`
/// with `g = M/M* = 1/(1 - e th B)`, evaluated by central differences at
/// `at` (time held fixed).
pub fn poisson_bracket<F, G>(f: F, g: G, at: &ClassicalState, p: &LandauParams, step: f64) -> f64
where
    F: Fn(&ClassicalState) -> f64,
    G: Fn(&ClassicalState) -> f64,
{
    let gamma = p.mass / p.m_star();
    let th = p.theta_nc;
    let eb = p.charge * p.b_field;
    // fundamental bracket matrix over (x1, x2, p1, p2)
    let pi = [
        [0.0, gamma * th, gamma, 0.0],
        [-gamma * th, 0.0, 0.0, gamma],
        [-gamma, 0.0, 0.0, gamma * eb],
        [0.0, -gamma, -gamma * eb, 0.0],
    ];
    let grad = |func: &dyn Fn(&ClassicalState) -> f64| -> [f64; 4] {
        let base = [at.x1, at.x2, at.p1, at.p2];
        let mut d = [0.0; 4];
        for (i, di) in d.iter_mut().enumerate() {
            let h = step * base[i].abs().max(1.0);
            let mut up = base;
            up[i] += h;
            let mut dn = base;
            dn[i] -= h;
            let su = ClassicalState::new(up[0], up[1], up[2], up[3], at.t);
            let sd = ClassicalState::new(dn[0], dn[1], dn[2], dn[3], at.t);
            *di = (func(&su) - func(&sd)) / (2.0 * h);
        }
        d
    };
    let df = grad(&f);
    let dg = grad(&g);
    let mut acc = 0.0;
    for a in 0..4 {
        for b in 0..4 {
            acc += pi[a][b] * df[a] * dg[b];
        }
    }
    acc
}
