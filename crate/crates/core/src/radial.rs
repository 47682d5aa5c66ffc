//! Radial shooting for weighted Liouville equations.
//!
//! Solves the Cauchy problem
//!
//! ```text
//! -(r v')' = r K(r) e^v,   v(0) = a,   v'(0) = 0,
//! K(r) = (eps + r^2)^p (1 + r^2)^q
//! ```
//!
//! in the log-radius `t = ln r`, where it reads `v_tt = -e^{2t} K(e^t) e^v`.
//! The state carries `v`, `w = v_t = r v'` and the cumulative mass
//! `M(r) = int_0^r K e^v s ds`, so that the slope `s = -w` and `M` can be
//! compared as an integration check (`s = M` exactly for the true solution).
//!
//! The total mass `beta(a) = M(inf)` is the central quantity. Integration
//! stops once the slope has cleared the integrability threshold
//! `kappa = 2 + 2(p + q)` by `slope_margin` and the log-linear tail estimate is
//! below `tail_rel_tol * M`.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::ode::{self, Flow, StepControl};
use crate::quad;
use crate::{Error, Result};

/// Radial weight `K(r) = (eps + r^2)^p (1 + r^2)^q`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WeightSpec {
    pub eps: f64,
    pub p: f64,
    pub q: f64,
}

impl WeightSpec {
    pub fn new(eps: f64, p: f64, q: f64) -> Result<Self> {
        let w = Self { eps, p, q };
        w.validate()?;
        Ok(w)
    }

    /// `(1 + r^2)^alpha`, the weight of the unregularized problem.
    pub fn pure(alpha: f64) -> Self {
        Self { eps: 1.0, p: alpha, q: 0.0 }
    }

    /// `K = 1`: the classical Liouville equation.
    pub fn liouville() -> Self {
        Self { eps: 1.0, p: 0.0, q: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps.is_finite() && self.p.is_finite() && self.q.is_finite()) {
            return Err(Error::InvalidWeight(alloc::format!("non-finite weight {self:?}")));
        }
        if self.eps < 0.0 {
            return Err(Error::InvalidWeight(alloc::format!("eps = {} < 0", self.eps)));
        }
        if self.eps == 0.0 && self.p <= -1.0 {
            return Err(Error::InvalidWeight(alloc::format!(
                "eps = 0 needs p > -1 for integrability at the origin, got p = {}",
                self.p
            )));
        }
        Ok(())
    }

    pub fn value(&self, r: f64) -> f64 {
        let r2 = r * r;
        (self.eps + r2).powf(self.p) * (1.0 + r2).powf(self.q)
    }

    /// `ln K(e^t)`, evaluated without overflow for large `t`.
    pub fn ln_at(&self, t: f64) -> f64 {
        let mut out = 0.0;
        if self.p != 0.0 {
            let l = if self.eps == 0.0 { 2.0 * t } else { log_add_exp(self.eps.ln(), 2.0 * t) };
            out += self.p * l;
        }
        if self.q != 0.0 {
            out += self.q * log_add_exp(0.0, 2.0 * t);
        }
        out
    }

    /// `d/dt ln K(e^t)`.
    pub fn ln_slope_at(&self, t: f64) -> f64 {
        let mut out = 0.0;
        if self.p != 0.0 {
            out += if self.eps == 0.0 { 2.0 * self.p } else { 2.0 * self.p / (1.0 + self.eps * (-2.0 * t).exp()) };
        }
        if self.q != 0.0 {
            out += 2.0 * self.q / (1.0 + (-2.0 * t).exp());
        }
        out
    }

    /// `K(r) ~ r^{2(p+q)}` at infinity; the slope must exceed `2 + 2(p+q)`
    /// for the mass to be finite.
    pub fn integrability_threshold(&self) -> f64 {
        2.0 + 2.0 * (self.p + self.q)
    }

    /// `-(r v')' = r K e^v` in log-radius: the mass density `dM/dt`.
    #[inline]
    pub fn forcing(&self, t: f64, v: f64) -> f64 {
        (2.0 * t + self.ln_at(t) + v).exp()
    }
}

fn log_add_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x > y { (x, y) } else { (y, x) };
    if lo == f64::NEG_INFINITY {
        return hi;
    }
    hi + (lo - hi).exp().ln_1p()
}

/// Tolerances and stopping rule for [`integrate_cauchy`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct IntegrationControl {
    /// Log-radius of the first grid point; `None` picks it from the weight
    /// and the central value (see [`start_log_radius`]).
    pub t_start: Option<f64>,
    pub t_max: f64,
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub slope_margin: f64,
    pub tail_rel_tol: f64,
}

impl IntegrationControl {
    /// Tight tolerances resolving differences of `beta` near `1e-11`.
    pub fn fine() -> Self {
        Self { abs_tol: 1e-13, rel_tol: 1e-13, tail_rel_tol: 1e-12, ..Self::default() }
    }
}

impl Default for IntegrationControl {
    fn default() -> Self {
        Self {
            t_start: None,
            t_max: 1.0e4,
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            slope_margin: 0.5,
            tail_rel_tol: 1e-8,
        }
    }
}

impl IntegrationControl {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidControl(alloc::string::String::from(m)));
        if let Some(t0) = self.t_start {
            if !(t0 < self.t_max) {
                return bad("t_start must be below t_max");
            }
        }
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0 && self.tail_rel_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if !(self.slope_margin > 0.0) {
            return bad("slope_margin must be positive");
        }
        Ok(())
    }

    fn step_control(&self) -> StepControl {
        // slope and mass are O(1) and compared in absolute terms
        StepControl { abs_tol: self.abs_tol, rel_tol: self.rel_tol, abs_only: 0b110, ..StepControl::default() }
    }
}

/// Start radius: `1e-6`, reduced to `1e-4 sqrt(eps)` inside a small core and
/// to `1e-3` times the bubble length scale when the central value is large.
pub fn start_log_radius(weight: &WeightSpec, a: f64) -> f64 {
    let mut t0 = (1e-6f64).ln();
    if weight.eps > 0.0 {
        t0 = t0.min((1e-4f64).ln() + 0.5 * weight.eps.ln());
    }
    // e^a K(r) r^2 ~ 1 defines the bubble scale near the origin
    let ln_scale = if weight.eps > 0.0 {
        -0.5 * (a + weight.p * weight.eps.ln())
    } else {
        -a / (2.0 * (weight.p + 1.0))
    };
    t0.min((1e-3f64).ln() + ln_scale)
}

/// `j(r) = int_0^r s K(s) ds` and `J(r) = int_0^r j(s)/s ds` by Gauss–Legendre.
///
/// With `eps = 0` the substitution `s = r u^{1/(p+1)}` removes the power
/// singularity of `s^{2p+1}` at the origin.
pub fn series_integrals(weight: &WeightSpec, r: f64) -> (f64, f64) {
    let rule = quad::gauss_legendre(16);
    let gamma = if weight.eps == 0.0 { 1.0 / (weight.p + 1.0) } else { 1.0 };
    // integrand of j after substitution, as a function of u in (0, 1]
    let j_of = |rr: f64| -> f64 {
        if rr == 0.0 {
            return 0.0;
        }
        quad::gauss(
            |u| {
                let s = rr * u.powf(gamma);
                if weight.eps == 0.0 {
                    rr.powf(2.0 * weight.p + 2.0) * gamma * u * (1.0 + s * s).powf(weight.q)
                } else {
                    s * weight.value(s) * rr
                }
            },
            0.0,
            1.0,
            &rule,
        )
    };
    let j = j_of(r);
    let big_j = quad::gauss(
        |u| {
            let s = r * u.powf(gamma);
            j_of(s) * gamma / u
        },
        0.0,
        1.0,
        &rule,
    );
    (j, big_j)
}

/// Trace of a radial solution on its adaptive log-radius grid.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadialSolution {
    pub weight: WeightSpec,
    /// Central value `v(0)`.
    pub a: f64,
    /// Increasing log-radii `t_i = ln r_i`.
    pub grid: Vec<f64>,
    pub v: Vec<f64>,
    /// `s(r_i) = -r v'(r_i)`.
    pub slope: Vec<f64>,
    /// Cumulative mass `M(r_i)`.
    pub mass: Vec<f64>,
    /// Mass density per unit log-radius, `r^2 K e^v = dM/dt = ds/dt`.
    pub forcing: Vec<f64>,
}

impl RadialSolution {
    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.grid[i].exp()
    }

    pub fn t_cut(&self) -> f64 {
        *self.grid.last().expect("non-empty trace")
    }

    fn bracket(&self, t: f64) -> usize {
        match self.grid.binary_search_by(|x| x.partial_cmp(&t).unwrap()) {
            Ok(i) => i.min(self.len() - 2),
            Err(0) => 0,
            Err(i) => (i - 1).min(self.len() - 2),
        }
    }

    /// `dg/dt = g (2 + d ln K/dt - s)` at grid point `i`.
    pub fn forcing_slope(&self, i: usize) -> f64 {
        self.forcing[i] * (2.0 + self.weight.ln_slope_at(self.grid[i]) - self.slope[i])
    }

    fn quintic(&self, i: usize, y: [f64; 2], d: [f64; 2], dd: [f64; 2], t: f64) -> f64 {
        ode::hermite5(self.grid[i], self.grid[i + 1], y, d, dd, t)
    }

    /// `v` at log-radius `t` by quintic Hermite interpolation (clamped to the grid).
    pub fn v_at(&self, t: f64) -> f64 {
        let i = self.bracket(t);
        let t = t.clamp(self.grid[0], self.t_cut());
        self.quintic(
            i,
            [self.v[i], self.v[i + 1]],
            [-self.slope[i], -self.slope[i + 1]],
            [-self.forcing[i], -self.forcing[i + 1]],
            t,
        )
    }

    /// `s = -r v'` at log-radius `t` (clamped to the grid).
    pub fn slope_at(&self, t: f64) -> f64 {
        let i = self.bracket(t);
        let t = t.clamp(self.grid[0], self.t_cut());
        self.quintic(
            i,
            [self.slope[i], self.slope[i + 1]],
            [self.forcing[i], self.forcing[i + 1]],
            [self.forcing_slope(i), self.forcing_slope(i + 1)],
            t,
        )
    }

    /// `M` at log-radius `t`; below the first grid point the mass is scaled
    /// by the series law `M ~ r^{2p+2}` (or `r^2` when `eps > 0`).
    pub fn mass_at(&self, t: f64) -> f64 {
        if t <= self.grid[0] {
            let power = if self.weight.eps == 0.0 { 2.0 * self.weight.p + 2.0 } else { 2.0 };
            return self.mass[0] * (power * (t - self.grid[0])).exp();
        }
        if t >= self.t_cut() {
            return *self.mass.last().unwrap();
        }
        let i = self.bracket(t);
        self.quintic(
            i,
            [self.mass[i], self.mass[i + 1]],
            [self.forcing[i], self.forcing[i + 1]],
            [self.forcing_slope(i), self.forcing_slope(i + 1)],
            t,
        )
    }

    /// Largest per-interval residual of `s_{i+1} - s_i = int g dt`, with the
    /// integral taken by 5-point Gauss–Legendre on the interpolated `v`.
    pub fn ode_residual(&self) -> f64 {
        let (x, w) = quad::gauss_legendre(5);
        let mut worst: f64 = 0.0;
        for i in 0..self.len().saturating_sub(1) {
            let (t0, t1) = (self.grid[i], self.grid[i + 1]);
            let (mid, half) = (0.5 * (t0 + t1), 0.5 * (t1 - t0));
            let mut integral = 0.0;
            for (xk, wk) in x.iter().zip(&w) {
                let tk = mid + half * xk;
                let vk = self.quintic(
                    i,
                    [self.v[i], self.v[i + 1]],
                    [-self.slope[i], -self.slope[i + 1]],
                    [-self.forcing[i], -self.forcing[i + 1]],
                    tk,
                );
                integral += wk * self.weight.forcing(tk, vk);
            }
            integral *= half;
            worst = worst.max((self.slope[i + 1] - self.slope[i] - integral).abs());
        }
        worst
    }

    /// `max_i |s(r_i) - M(r_i)|`.
    pub fn slope_mass_gap(&self) -> f64 {
        self.slope.iter().zip(&self.mass).map(|(s, m)| (s - m).abs()).fold(0.0, f64::max)
    }
}

/// Total mass of a converged trace.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassResult {
    pub beta: f64,
    /// Log-linear tail estimate beyond `r_cut`.
    pub tail: f64,
    pub converged: bool,
    /// Log of the truncation radius (the radius itself may exceed `f64`).
    pub t_cut: f64,
    pub slope_cut: f64,
}

impl MassResult {
    /// Truncation radius; `inf` when `t_cut` is beyond the `f64` range.
    pub fn r_cut(&self) -> f64 {
        self.t_cut.exp()
    }
}

#[derive(Clone, Copy)]
struct StopRule {
    kappa: f64,
    margin: f64,
    tail_rel_tol: f64,
}

impl StopRule {
    fn new(weight: &WeightSpec, ctrl: &IntegrationControl) -> Self {
        Self {
            kappa: weight.integrability_threshold(),
            margin: ctrl.slope_margin,
            tail_rel_tol: ctrl.tail_rel_tol,
        }
    }

    fn done(&self, slope: f64, g: f64, mass: f64) -> bool {
        slope > self.kappa + self.margin && g / (slope - self.kappa) < self.tail_rel_tol * mass
    }
}

struct Start {
    t0: f64,
    ea_j: f64,
    ea_big_j: f64,
}

fn start(weight: &WeightSpec, a: f64, ctrl: &IntegrationControl) -> Result<Start> {
    weight.validate()?;
    ctrl.validate()?;
    if !a.is_finite() {
        return Err(Error::InvalidParams(alloc::format!("central value a = {a} is not finite")));
    }
    let t0 = ctrl.t_start.unwrap_or_else(|| start_log_radius(weight, a));
    if !(t0 < ctrl.t_max) {
        return Err(Error::InvalidControl(alloc::format!("start log-radius {t0} is beyond t_max")));
    }
    let (j, big_j) = series_integrals(weight, t0.exp());
    Ok(Start { t0, ea_j: a.exp() * j, ea_big_j: a.exp() * big_j })
}

/// Integrate the radial Cauchy problem with central value `a`.
///
/// The trace ends where the stopping rule fires or at `ctrl.t_max`.
pub fn integrate_cauchy(weight: &WeightSpec, a: f64, ctrl: &IntegrationControl) -> Result<RadialSolution> {
    let st = start(weight, a, ctrl)?;
    let rule = StopRule::new(weight, ctrl);
    let w = *weight;
    let mut sol = RadialSolution {
        weight: w,
        a,
        grid: Vec::new(),
        v: Vec::new(),
        slope: Vec::new(),
        mass: Vec::new(),
        forcing: Vec::new(),
    };
    ode::integrate(
        |t, y: &[f64; 3]| {
            let g = w.forcing(t, y[0]);
            [y[1], -g, g]
        },
        st.t0,
        [a - st.ea_big_j, -st.ea_j, st.ea_j],
        ctrl.t_max,
        &ctrl.step_control(),
        |t, y, dy| {
            sol.grid.push(t);
            sol.v.push(y[0]);
            sol.slope.push(-y[1]);
            sol.mass.push(y[2]);
            sol.forcing.push(dy[2]);
            if rule.done(-y[1], dy[2], y[2]) {
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;
    Ok(sol)
}

/// Total mass `beta = M(r_cut) + tail` of an integrated trace.
pub fn mass_of(sol: &RadialSolution, ctrl: &IntegrationControl) -> Result<MassResult> {
    let n = sol.len();
    let slope = sol.slope[n - 1];
    let kappa = sol.weight.integrability_threshold();
    let threshold = kappa + ctrl.slope_margin;
    if !(slope > threshold) {
        return Err(Error::NotConverged { t: sol.t_cut(), slope, threshold });
    }
    let m = sol.mass[n - 1];
    let tail = sol.forcing[n - 1] / (slope - kappa);
    Ok(MassResult {
        beta: m + tail,
        tail,
        converged: tail <= ctrl.tail_rel_tol * m,
        t_cut: sol.t_cut(),
        slope_cut: slope,
    })
}

/// `beta(a)` for the given weight.
pub fn beta(weight: &WeightSpec, a: f64, ctrl: &IntegrationControl) -> Result<MassResult> {
    let sol = integrate_cauchy(weight, a, ctrl)?;
    mass_of(&sol, ctrl)
}

pub const RELAX_STEPS: usize = 8;

/// [`beta`] retried when the slope approaches the threshold too slowly to
/// clear it by `t_max`: each retry divides the slope margin by ten and
/// multiplies `t_max` by ten, up to [`RELAX_STEPS`] times.
///
/// Returns the control that succeeded alongside the mass.
pub fn beta_relaxed(weight: &WeightSpec, a: f64, ctrl: &IntegrationControl) -> Result<(MassResult, IntegrationControl)> {
    let mut c = *ctrl;
    let mut attempt = 0;
    loop {
        match beta(weight, a, &c) {
            Err(Error::NotConverged { .. }) if attempt < RELAX_STEPS => {
                c.slope_margin *= 0.1;
                c.t_max *= 10.0;
                attempt += 1;
            }
            other => return other.map(|m| (m, c)),
        }
    }
}

/// Kelvin inversion `v^(r) = v(1/r) + beta ln(1/r)`.
///
/// The inverted trace solves the same kind of equation with weight
/// `K^(r) = r^{beta-4} K(1/r)`, which is again of the `WeightSpec` form when
/// `eps` is 0 or 1. Its mass, slope and density are `beta - M(1/r)`,
/// `beta - s(1/r)` and `g(1/r)` respectively.
pub fn kelvin(sol: &RadialSolution, beta: f64) -> Result<RadialSolution> {
    let w = sol.weight;
    let kappa = w.integrability_threshold();
    if !(beta > kappa) {
        return Err(Error::NotConverged { t: sol.t_cut(), slope: beta, threshold: kappa });
    }
    let q = if w.eps == 1.0 {
        w.p + w.q
    } else if w.eps == 0.0 {
        w.q
    } else {
        return Err(Error::InvalidWeight(alloc::format!(
            "kelvin inversion needs eps in {{0, 1}}, got {}",
            w.eps
        )));
    };
    let weight = WeightSpec::new(0.0, 0.5 * (beta - 4.0) - w.p - w.q, q)?;
    let n = sol.len();
    let mut out = RadialSolution {
        weight,
        a: 0.0,
        grid: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        slope: Vec::with_capacity(n),
        mass: Vec::with_capacity(n),
        forcing: Vec::with_capacity(n),
    };
    for i in (0..n).rev() {
        let t = sol.grid[i];
        out.grid.push(-t);
        out.v.push(sol.v[i] + beta * t);
        out.slope.push(beta - sol.slope[i]);
        out.mass.push(beta - sol.mass[i]);
        out.forcing.push(sol.forcing[i]);
    }
    // continue v^ to r = 0 with the exponentially decaying slope
    let decay = sol.slope[n - 1] - kappa;
    out.a = out.v[0] + if decay > 0.0 { out.slope[0] / decay } else { 0.0 };
    Ok(out)
}

/// Solution of the linearized problem `phi = dv/da` alongside `v`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinearizedSolution {
    /// The trace of `v`, integrated jointly with `phi` (same grid).
    pub base: RadialSolution,
    pub phi: Vec<f64>,
    /// `r phi'(r)` at the grid points.
    pub phi_t: Vec<f64>,
    pub beta_prime: f64,
    /// `phi` at the cut radius, frozen beyond it.
    pub phi_infty: f64,
    pub mass: MassResult,
}

impl LinearizedSolution {
    pub fn phi_prime(&self, i: usize) -> f64 {
        self.phi_t[i] / self.base.radius(i)
    }
}

/// Integrate `-(r phi')' = r K e^v phi`, `phi(0) = 1`, `phi'(0) = 0` and
/// return `beta'(a) = int r K e^v phi dr`.
pub fn linearized(weight: &WeightSpec, a: f64, ctrl: &IntegrationControl) -> Result<LinearizedSolution> {
    let st = start(weight, a, ctrl)?;
    let rule = StopRule::new(weight, ctrl);
    let w = *weight;
    let mut base = RadialSolution {
        weight: w,
        a,
        grid: Vec::new(),
        v: Vec::new(),
        slope: Vec::new(),
        mass: Vec::new(),
        forcing: Vec::new(),
    };
    let mut phi = Vec::new();
    let mut phi_t = Vec::new();
    let mut partial = 0.0;
    ode::integrate(
        |t, y: &[f64; 6]| {
            let g = w.forcing(t, y[0]);
            [y[1], -g, g, y[4], -g * y[3], g * y[3]]
        },
        st.t0,
        [a - st.ea_big_j, -st.ea_j, st.ea_j, 1.0 - st.ea_big_j, -st.ea_j, st.ea_j],
        ctrl.t_max,
        &ctrl.step_control(),
        |t, y, dy| {
            base.grid.push(t);
            base.v.push(y[0]);
            base.slope.push(-y[1]);
            base.mass.push(y[2]);
            base.forcing.push(dy[2]);
            phi.push(y[3]);
            phi_t.push(y[4]);
            partial = y[5];
            if rule.done(-y[1], dy[2], y[2]) {
                Flow::Stop
            } else {
                Flow::Continue
            }
        },
    )?;
    let mass = mass_of(&base, ctrl)?;
    let phi_infty = *phi.last().unwrap();
    Ok(LinearizedSolution { base, phi, phi_t, beta_prime: partial + phi_infty * mass.tail, phi_infty, mass })
}

/// Zeros of `phi` and of `phi'` with the masses enclosed at the critical points.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ZeroStructure {
    pub first_zero: Option<f64>,
    pub last_zero: Option<f64>,
    pub first_crit: Option<f64>,
    pub last_crit: Option<f64>,
    /// `M(first_crit)`.
    pub inner_mass: Option<f64>,
    /// `beta - M(last_crit)`.
    pub outer_mass: Option<f64>,
    pub zero_count: usize,
    pub crit_count: usize,
}

impl ZeroStructure {
    /// All four radii exist.
    pub fn is_complete(&self) -> bool {
        self.first_zero.is_some() && self.last_zero.is_some() && self.first_crit.is_some() && self.last_crit.is_some()
    }

    pub fn require_complete(&self) -> Result<&Self> {
        if self.is_complete() {
            Ok(self)
        } else {
            Err(Error::MissingZero { zeros: self.zero_count, crits: self.crit_count })
        }
    }

    /// `r < r* <= R* < R`, evaluated only on a complete structure.
    pub fn ordering_holds(&self) -> Option<bool> {
        match (self.first_zero, self.first_crit, self.last_crit, self.last_zero) {
            (Some(r), Some(rs), Some(big_rs), Some(big_r)) => Some(r < rs && rs <= big_rs && big_rs < big_r),
            _ => None,
        }
    }
}

/// Sign changes of a Hermite-interpolated trace, refined by bisection to
/// `1e-10` in log-radius. Returned as radii.
fn zeros(grid: &[f64], y: &[f64], dy: &[f64], ddy: &[f64]) -> Vec<f64> {
    let mut out = Vec::new();
    for i in 0..grid.len() {
        if y[i] == 0.0 {
            out.push(grid[i].exp());
            continue;
        }
        if i + 1 < grid.len() && y[i] * y[i + 1] < 0.0 {
            let f = |t: f64| {
                ode::hermite5(grid[i], grid[i + 1], [y[i], y[i + 1]], [dy[i], dy[i + 1]], [ddy[i], ddy[i + 1]], t)
            };
            let (mut lo, mut hi) = (grid[i], grid[i + 1]);
            let flo = f(lo);
            while hi - lo > 1e-10 {
                let mid = 0.5 * (lo + hi);
                let fm = f(mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if (fm < 0.0) == (flo < 0.0) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            out.push((0.5 * (lo + hi)).exp());
        }
    }
    out
}

/// Locate first/last zeros of `phi` and of `phi'` on the joint trace.
pub fn zero_structure(lin: &LinearizedSolution, sol: &RadialSolution) -> Result<ZeroStructure> {
    if lin.base.grid != sol.grid {
        return Err(Error::InvalidInputs(alloc::string::String::from(
            "linearized solution and trace are on different grids",
        )));
    }
    let n = sol.len();
    let g = &sol.forcing;
    // phi_tt = -g phi, psi_tt = -(g' phi + g psi) with psi = phi_t
    let phi_tt: Vec<f64> = (0..n).map(|i| -g[i] * lin.phi[i]).collect();
    let psi_tt: Vec<f64> =
        (0..n).map(|i| -(sol.forcing_slope(i) * lin.phi[i] + g[i] * lin.phi_t[i])).collect();
    let z = zeros(&sol.grid, &lin.phi, &lin.phi_t, &phi_tt);
    let c = zeros(&sol.grid, &lin.phi_t, &phi_tt, &psi_tt);
    let beta = lin.mass.beta;
    let first_crit = c.first().copied();
    let last_crit = c.last().copied();
    Ok(ZeroStructure {
        first_zero: z.first().copied(),
        last_zero: if z.len() >= 2 { z.last().copied() } else { None },
        first_crit,
        last_crit,
        inner_mass: first_crit.map(|r| sol.mass_at(r.ln())),
        outer_mass: last_crit.map(|r| beta - sol.mass_at(r.ln())),
        zero_count: z.len(),
        crit_count: c.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tight() -> IntegrationControl {
        IntegrationControl::default()
    }

    #[test]
    fn weight_validation() {
        assert!(WeightSpec::new(-1.0, 0.0, 0.0).is_err());
        assert!(WeightSpec::new(0.0, -1.0, 0.0).is_err());
        assert!(WeightSpec::new(0.0, -0.5, 0.0).is_ok());
        assert!(WeightSpec::new(1.0, -3.0, 2.0).is_ok());
        assert!(WeightSpec::new(f64::NAN, 0.0, 0.0).is_err());
    }

    #[test]
    fn ln_weight_matches_direct_evaluation() {
        let w = WeightSpec::new(0.3, 1.7, -0.85).unwrap();
        for t in [-8.0, -1.0, 0.0, 2.5, 10.0] {
            let r: f64 = f64::exp(t);
            assert!((w.ln_at(t) - w.value(r).ln()).abs() < 1e-12);
        }
        // no overflow far out
        assert!(w.ln_at(800.0).is_finite());
    }

    #[test]
    fn control_validation() {
        let c = IntegrationControl { slope_margin: 0.0, ..Default::default() };
        assert!(matches!(c.validate(), Err(Error::InvalidControl(_))));
        let c = IntegrationControl { t_start: Some(2.0), t_max: 1.0, ..Default::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn non_finite_central_value_rejected() {
        assert!(matches!(
            integrate_cauchy(&WeightSpec::liouville(), f64::NAN, &tight()),
            Err(Error::InvalidParams(_))
        ));
    }

    #[test]
    fn series_integrals_for_pure_power() {
        // eps = 0, p = 1, q = 0: j = r^4/4, J = r^4/16
        let w = WeightSpec::new(0.0, 1.0, 0.0).unwrap();
        let r = 1e-3;
        let (j, big_j) = series_integrals(&w, r);
        assert!((j / (r.powi(4) / 4.0) - 1.0).abs() < 1e-12);
        assert!((big_j / (r.powi(4) / 16.0) - 1.0).abs() < 1e-12);
        // K = 1: j = r^2/2, J = r^2/4
        let (j, big_j) = series_integrals(&WeightSpec::liouville(), 0.5);
        assert!((j - 0.125).abs() < 1e-14);
        assert!((big_j - 0.0625).abs() < 1e-14);
    }

    #[test]
    fn not_converged_when_slope_stays_low() {
        let mut ctrl = tight();
        ctrl.t_max = 0.0;
        let sol = integrate_cauchy(&WeightSpec::liouville(), 0.0, &ctrl).unwrap();
        assert!(matches!(mass_of(&sol, &ctrl), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn kelvin_rejects_general_eps() {
        let w = WeightSpec::new(0.5, 1.0, 0.0).unwrap();
        let sol = integrate_cauchy(&w, 0.0, &tight()).unwrap();
        let m = mass_of(&sol, &tight()).unwrap();
        assert!(matches!(kelvin(&sol, m.beta), Err(Error::InvalidWeight(_))));
    }

    #[test]
    fn zero_scan_prefers_exact_grid_zero() {
        let grid = [0.0, 1.0, 2.0];
        let y = [1.0, 0.0, -1.0];
        let dy = [-1.0, -1.0, -1.0];
        let z = zeros(&grid, &y, &dy, &[0.0; 3]);
        assert_eq!(z.len(), 1);
        assert!((z[0] - 1f64.exp()).abs() < 1e-15);
    }
}
