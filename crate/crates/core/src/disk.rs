//! Finite differences for `Δu + W(x) e^u = 0` on the unit disk.
//!
//! The weight is `W(x) = h1(x) |x - t e|^{2 alpha1} |x + t e|^{2 alpha2}` with
//! `e = (1, 0)`. In `s = ln r` the equation reads
//! `u_ss + u_θθ + r^2 W e^u = 0`, discretized by the 5-point stencil on a
//! uniform `(s, θ)` mesh. The disk `r < r_0` inside the innermost ring is
//! represented by a single pole value `u_0`, tied to the ring by the local
//! expansion `u(r) = u_0 - r^2 W(0) e^{u_0} / 4`.
//!
//! Grid values are stored pole first, then ring by ring from the inside out;
//! the last ring lies on `r = 1` and carries the Dirichlet data.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg::Banded;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LogPolarMesh {
    /// `ln r_0` of the innermost ring.
    pub t_min: f64,
    /// Number of rings strictly inside the unit circle.
    pub n_r: usize,
    pub n_theta: usize,
}

impl LogPolarMesh {
    pub fn new(t_min: f64, n_r: usize, n_theta: usize) -> Result<Self> {
        let m = Self { t_min, n_r, n_theta };
        m.validate()?;
        Ok(m)
    }

    /// Mesh with radial spacing at most `h` on `[t_min, 0]`.
    pub fn with_spacing(t_min: f64, h: f64, n_theta: usize) -> Result<Self> {
        if !(h > 0.0) {
            return Err(Error::InvalidParams(alloc::format!("radial spacing {h} must be positive")));
        }
        Self::new(t_min, ((-t_min / h).ceil() as usize).max(2), n_theta)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.t_min < 0.0 && self.t_min.is_finite()) {
            return Err(Error::InvalidParams(alloc::format!("t_min = {} must be negative", self.t_min)));
        }
        if self.n_r < 2 {
            return Err(Error::InvalidParams(String::from("need at least two rings")));
        }
        if self.n_theta < 4 || !self.n_theta.is_multiple_of(2) {
            return Err(Error::InvalidParams(alloc::format!("n_theta = {} must be even and >= 4", self.n_theta)));
        }
        Ok(())
    }

    pub fn h(&self) -> f64 {
        -self.t_min / self.n_r as f64
    }

    pub fn h_theta(&self) -> f64 {
        2.0 * PI / self.n_theta as f64
    }

    /// `ln r` of ring `i`, `i = 0..=n_r`.
    pub fn s(&self, i: usize) -> f64 {
        if i == self.n_r {
            0.0
        } else {
            self.t_min + self.h() * i as f64
        }
    }

    pub fn radius(&self, i: usize) -> f64 {
        self.s(i).exp()
    }

    pub fn theta(&self, j: usize) -> f64 {
        self.h_theta() * j as f64
    }

    pub fn point(&self, i: usize, j: usize) -> [f64; 2] {
        let (r, th) = (self.radius(i), self.theta(j));
        [r * th.cos(), r * th.sin()]
    }

    /// Pole plus interior rings.
    pub fn unknowns(&self) -> usize {
        1 + self.n_r * self.n_theta
    }

    /// Pole plus all rings including the boundary.
    pub fn nodes(&self) -> usize {
        1 + (self.n_r + 1) * self.n_theta
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        1 + i * self.n_theta + j % self.n_theta
    }

    /// Coordinates of node `k` (the pole is the origin).
    pub fn node_point(&self, k: usize) -> [f64; 2] {
        if k == 0 {
            [0.0, 0.0]
        } else {
            self.point((k - 1) / self.n_theta, (k - 1) % self.n_theta)
        }
    }

    /// Ring index whose radius is closest to `r` in log scale.
    pub fn nearest_ring(&self, r: f64) -> usize {
        let k = ((r.ln() - self.t_min) / self.h()).round();
        (k.max(0.0) as usize).min(self.n_r)
    }

    /// Bilinear interpolation in `(s, θ)` of grid values at `x`; inside the
    /// innermost ring the pole value is blended in quadratically in `r`,
    /// outside the unit circle the boundary ring is used.
    pub fn interpolate(&self, values: &[f64], x: [f64; 2]) -> f64 {
        let r = (x[0] * x[0] + x[1] * x[1]).sqrt();
        let mut th = x[1].atan2(x[0]);
        if th < 0.0 {
            th += 2.0 * PI;
        }
        let th = th / self.h_theta();
        let j0 = (th.floor() as usize) % self.n_theta;
        let wt = th - th.floor();
        let ring = |i: usize| {
            (1.0 - wt) * values[self.index(i, j0)] + wt * values[self.index(i, j0 + 1)]
        };
        let r0 = self.radius(0);
        if r <= r0 {
            let f = (r / r0).powi(2);
            return (1.0 - f) * values[0] + f * ring(0);
        }
        let s = r.ln().min(0.0);
        let pos = ((s - self.t_min) / self.h()).min(self.n_r as f64);
        let i0 = (pos.floor() as usize).min(self.n_r - 1);
        let ws = pos - i0 as f64;
        (1.0 - ws) * ring(i0) + ws * ring(i0 + 1)
    }
}

/// `ln(max(1e-6, t^2 / 50))`: the innermost radius for collapse parameter `t`.
///
/// The blow-up profile has radius about `t^2 / 3`, so the pole disk must be
/// smaller than that.
pub fn scaling_t_min(t_vortex: f64) -> f64 {
    (t_vortex * t_vortex / 50.0).max(1e-6).ln()
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiskProblem {
    pub mesh: LogPolarMesh,
    /// Samples of the positive coefficient `h1` at every node.
    pub h1: Vec<f64>,
    pub alpha1: u32,
    pub alpha2: u32,
    /// Vortices sit at `(±t, 0)`.
    pub t_vortex: f64,
    /// Dirichlet values on `r = 1`, one per angle.
    pub boundary: Vec<f64>,
}

impl DiskProblem {
    pub fn new<H: Fn([f64; 2]) -> f64>(
        mesh: LogPolarMesh,
        h1: H,
        alpha1: u32,
        alpha2: u32,
        t_vortex: f64,
        boundary: Vec<f64>,
    ) -> Result<Self> {
        let h1 = (0..mesh.nodes()).map(|k| h1(mesh.node_point(k))).collect();
        let p = Self { mesh, h1, alpha1, alpha2, t_vortex, boundary };
        p.validate()?;
        Ok(p)
    }

    /// Constant Dirichlet value `c` on the unit circle.
    pub fn constant_boundary<H: Fn([f64; 2]) -> f64>(
        mesh: LogPolarMesh,
        h1: H,
        alpha1: u32,
        alpha2: u32,
        t_vortex: f64,
        c: f64,
    ) -> Result<Self> {
        Self::new(mesh, h1, alpha1, alpha2, t_vortex, vec![c; mesh.n_theta])
    }

    pub fn validate(&self) -> Result<()> {
        self.mesh.validate()?;
        if self.h1.len() != self.mesh.nodes() || self.h1.iter().any(|h| !(*h > 0.0 && h.is_finite())) {
            return Err(Error::InvalidParams(String::from("h1 must be positive and finite at every node")));
        }
        if !(0.0..1.0).contains(&self.t_vortex) {
            return Err(Error::InvalidParams(alloc::format!("t_vortex = {} must lie in [0, 1)", self.t_vortex)));
        }
        if self.boundary.len() != self.mesh.n_theta || self.boundary.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidParams(String::from("boundary needs one finite value per angle")));
        }
        Ok(())
    }

    /// `|x - t e|^{2 alpha1} |x + t e|^{2 alpha2}`.
    pub fn vortex_factor(&self, x: [f64; 2]) -> f64 {
        let (d1, d2) = self.vortex_distances(x);
        d1.powi(self.alpha1 as i32) * d2.powi(self.alpha2 as i32)
    }

    fn vortex_distances(&self, x: [f64; 2]) -> (f64, f64) {
        let t = self.t_vortex;
        ((x[0] - t).powi(2) + x[1] * x[1], (x[0] + t).powi(2) + x[1] * x[1])
    }

    /// `x . grad` of the vortex factor.
    fn vortex_factor_radial(&self, x: [f64; 2]) -> f64 {
        let t = self.t_vortex;
        let (d1, d2) = self.vortex_distances(x);
        let (a1, a2) = (self.alpha1 as i32, self.alpha2 as i32);
        let mut v = 0.0;
        if a1 > 0 {
            let dot = x[0] * (x[0] - t) + x[1] * x[1];
            v += 2.0 * a1 as f64 * d1.powi(a1 - 1) * dot * d2.powi(a2);
        }
        if a2 > 0 {
            let dot = x[0] * (x[0] + t) + x[1] * x[1];
            v += 2.0 * a2 as f64 * d2.powi(a2 - 1) * dot * d1.powi(a1);
        }
        v
    }

    /// `W` at node `k`.
    pub fn weight(&self, k: usize) -> f64 {
        self.h1[k] * self.vortex_factor(self.mesh.node_point(k))
    }

    /// `x . grad W` at node `k`; the derivative of `h1` is taken from the
    /// samples along the ray.
    pub fn weight_radial(&self, k: usize) -> f64 {
        let x = self.mesh.node_point(k);
        if k == 0 {
            return 0.0;
        }
        let m = &self.mesh;
        let (i, j) = ((k - 1) / m.n_theta, (k - 1) % m.n_theta);
        let h = |i: usize| self.h1[m.index(i, j)];
        let dh = if i == 0 {
            (-3.0 * h(0) + 4.0 * h(1) - h(2)) / (2.0 * m.h())
        } else if i == m.n_r {
            (3.0 * h(i) - 4.0 * h(i - 1) + h(i - 2)) / (2.0 * m.h())
        } else {
            (h(i + 1) - h(i - 1)) / (2.0 * m.h())
        };
        dh * self.vortex_factor(x) + self.h1[k] * self.vortex_factor_radial(x)
    }

    /// Bubble-shaped starting guess matching the mean boundary value.
    ///
    /// For `t > 0` this is the regular bubble for the constant weight
    /// `W(0)`; for `t = 0` the singular bubble of strength `alpha1 + alpha2`.
    pub fn bubble_guess(&self) -> Vec<f64> {
        let c = self.boundary.iter().sum::<f64>() / self.boundary.len() as f64;
        let mut u: Vec<f64> = (0..self.mesh.nodes()).map(|k| self.bubble_at(c, self.mesh.node_point(k))).collect();
        self.impose_boundary(&mut u);
        u
    }

    fn bubble_at(&self, c: f64, x: [f64; 2]) -> f64 {
        let r2 = x[0] * x[0] + x[1] * x[1];
        if self.t_vortex > 0.0 {
            let w0 = self.weight(0);
            let mu2 = 8.0 * (-c).exp() / w0;
            (8.0 * mu2 / w0).ln() - 2.0 * (mu2 * r2).ln_1p()
        } else {
            let a = (self.alpha1 + self.alpha2) as f64;
            let k = 8.0 * (1.0 + a) * (1.0 + a);
            let mu2 = k * (-c).exp() / self.h1[0];
            (k * mu2 / self.h1[0]).ln() - 2.0 * (mu2 * r2.powf(1.0 + a)).ln_1p()
        }
    }

    fn impose_boundary(&self, u: &mut [f64]) {
        let m = &self.mesh;
        for j in 0..m.n_theta {
            u[m.index(m.n_r, j)] = self.boundary[j];
        }
    }
}

/// Residual of the discrete equations at the unknowns of `u` (full grid).
pub fn residual(problem: &DiskProblem, u: &[f64]) -> Vec<f64> {
    let m = &problem.mesh;
    let (h2, ht2) = (m.h() * m.h(), m.h_theta() * m.h_theta());
    let w0 = problem.weight(0);
    let (r0, rg) = (m.radius(0), (m.t_min - m.h()).exp());
    let ghost = u[0] - 0.25 * rg * rg * w0 * u[0].exp();
    let mut f = vec![0.0; m.unknowns()];
    let mean0 = (0..m.n_theta).map(|j| u[m.index(0, j)]).sum::<f64>() / m.n_theta as f64;
    f[0] = u[0] - mean0 - 0.25 * r0 * r0 * w0 * u[0].exp();
    for i in 0..m.n_r {
        let r2 = m.radius(i).powi(2);
        for j in 0..m.n_theta {
            let k = m.index(i, j);
            let down = if i == 0 { ghost } else { u[m.index(i - 1, j)] };
            let up = u[m.index(i + 1, j)];
            let side = u[m.index(i, j + 1)] + u[m.index(i, j + m.n_theta - 1)];
            f[k] = (up - 2.0 * u[k] + down) / h2 + (side - 2.0 * u[k]) / ht2 + r2 * problem.weight(k) * u[k].exp();
        }
    }
    f
}

fn jacobian(problem: &DiskProblem, u: &[f64]) -> Banded {
    let m = &problem.mesh;
    let nt = m.n_theta;
    let (h2, ht2) = (m.h() * m.h(), m.h_theta() * m.h_theta());
    let w0 = problem.weight(0);
    let (r0, rg) = (m.radius(0), (m.t_min - m.h()).exp());
    let mut jac = Banded::zeros(m.unknowns(), nt, nt);
    jac.add(0, 0, 1.0 - 0.25 * r0 * r0 * w0 * u[0].exp());
    for j in 0..nt {
        jac.add(0, m.index(0, j), -1.0 / nt as f64);
    }
    let dghost = 1.0 - 0.25 * rg * rg * w0 * u[0].exp();
    for i in 0..m.n_r {
        let r2 = m.radius(i).powi(2);
        for j in 0..nt {
            let k = m.index(i, j);
            jac.add(k, k, -2.0 / h2 - 2.0 / ht2 + r2 * problem.weight(k) * u[k].exp());
            jac.add(k, m.index(i, j + 1), 1.0 / ht2);
            jac.add(k, m.index(i, j + nt - 1), 1.0 / ht2);
            if i + 1 < m.n_r {
                jac.add(k, m.index(i + 1, j), 1.0 / h2);
            }
            if i == 0 {
                jac.add(k, 0, dghost / h2);
            } else {
                jac.add(k, m.index(i - 1, j), 1.0 / h2);
            }
        }
    }
    jac
}

fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |a, x| a.max(x.abs()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiskControl {
    /// Bound on the max-norm of the discrete residual.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for DiskControl {
    fn default() -> Self {
        Self { tol: 1e-10, max_iter: 50 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DiskSolution {
    pub problem: DiskProblem,
    /// Full grid, boundary ring included.
    pub u: Vec<f64>,
    pub newton_iters: usize,
    /// Max-norm of the discrete residual.
    pub residual_norm: f64,
    pub converged: bool,
    /// `max v_t` with `v_t(y) = u(t y) + 2(1 + alpha1 + alpha2) ln t`, for `t > 0`.
    pub lambda_extract: Option<f64>,
}

impl DiskSolution {
    pub fn max(&self) -> (usize, f64) {
        self.u.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |b, (k, v)| if v > b.1 { (k, v) } else { b })
    }

    /// `∫_{|x| < r_i} W e^u`: pole disk plus trapezoid in `s` over rings `0..=i`.
    pub fn mass_within(&self, i: usize) -> f64 {
        let p = &self.problem;
        let m = &p.mesh;
        let mut total = PI * m.radius(0).powi(2) * p.weight(0) * self.u[0].exp();
        let ring = |l: usize| {
            let r2 = m.radius(l).powi(2);
            (0..m.n_theta).map(|j| {
                let k = m.index(l, j);
                r2 * p.weight(k) * self.u[k].exp()
            }).sum::<f64>() * m.h_theta()
        };
        for l in 0..i {
            total += 0.5 * m.h() * (ring(l) + ring(l + 1));
        }
        total
    }

    /// `∫ u_s dθ` over ring `i`: the outward flux `∮ ∂_ν u` through `|x| = r_i`.
    pub fn flux_at(&self, i: usize) -> f64 {
        let m = &self.problem.mesh;
        (0..m.n_theta).map(|j| self.ds(i, j)).sum::<f64>() * m.h_theta()
    }

    fn ds(&self, i: usize, j: usize) -> f64 {
        let m = &self.problem.mesh;
        let u = |i: usize| self.u[m.index(i, j)];
        if i == m.n_r {
            (3.0 * u(i) - 4.0 * u(i - 1) + u(i - 2)) / (2.0 * m.h())
        } else if i == 0 {
            (-3.0 * u(0) + 4.0 * u(1) - u(2)) / (2.0 * m.h())
        } else {
            (u(i + 1) - u(i - 1)) / (2.0 * m.h())
        }
    }

    /// Total mass `∫_{B_1} W e^u`.
    pub fn mass(&self) -> f64 {
        self.mass_within(self.problem.mesh.n_r)
    }

    /// `|mass + flux| / mass` on the unit circle.
    pub fn mass_balance(&self) -> f64 {
        let m = self.mass();
        (m + self.flux_at(self.problem.mesh.n_r)).abs() / m
    }

    /// Strict discrete local maxima among the pole and interior nodes.
    pub fn local_maxima(&self) -> Vec<usize> {
        let m = &self.problem.mesh;
        let u = &self.u;
        let mut out = Vec::new();
        if (0..m.n_theta).all(|j| u[0] > u[m.index(0, j)]) {
            out.push(0);
        }
        for i in 0..m.n_r {
            for j in 0..m.n_theta {
                let k = m.index(i, j);
                let down = if i == 0 { u[0] } else { u[m.index(i - 1, j)] };
                let nb = [down, u[m.index(i + 1, j)], u[m.index(i, j + 1)], u[m.index(i, j + m.n_theta - 1)]];
                if nb.iter().all(|v| u[k] > *v) {
                    out.push(k);
                }
            }
        }
        out
    }

    /// Interior nodes (pole included) that are discrete local minima.
    pub fn local_minima(&self) -> Vec<usize> {
        let m = &self.problem.mesh;
        let u = &self.u;
        let mut out = Vec::new();
        if (0..m.n_theta).all(|j| u[0] < u[m.index(0, j)]) {
            out.push(0);
        }
        for i in 0..m.n_r {
            for j in 0..m.n_theta {
                let k = m.index(i, j);
                let down = if i == 0 { u[0] } else { u[m.index(i - 1, j)] };
                let nb = [down, u[m.index(i + 1, j)], u[m.index(i, j + 1)], u[m.index(i, j + m.n_theta - 1)]];
                if nb.iter().all(|v| u[k] < *v) {
                    out.push(k);
                }
            }
        }
        out
    }
}

/// Damped Newton from `init`; a non-converged run still returns its best
/// iterate with `converged = false`.
pub fn solve_attempt(problem: &DiskProblem, init: &[f64], ctrl: &DiskControl) -> Result<DiskSolution> {
    problem.validate()?;
    let m = &problem.mesh;
    if init.len() != m.nodes() && init.len() != m.unknowns() {
        return Err(Error::InvalidInputs(alloc::format!(
            "initial guess has {} values, expected {} or {}",
            init.len(),
            m.unknowns(),
            m.nodes()
        )));
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidInputs(String::from("initial guess must be finite")));
    }
    let mut u = vec![0.0; m.nodes()];
    u[..init.len()].copy_from_slice(init);
    problem.impose_boundary(&mut u);
    let n = m.unknowns();
    let mut f = residual(problem, &u);
    let mut fn2 = norm2(&f);
    let mut iters = 0;
    let mut converged = norm_inf(&f) <= ctrl.tol;
    while !converged && iters < ctrl.max_iter {
        let mut jac = jacobian(problem, &u);
        jac.factor()?;
        let mut step: Vec<f64> = f.iter().map(|x| -x).collect();
        jac.solve(&mut step);
        let mut lambda = 1.0;
        let accepted = loop {
            let mut trial = u.clone();
            for k in 0..n {
                trial[k] += lambda * step[k];
            }
            let ft = residual(problem, &trial);
            let ftn = norm2(&ft);
            if ftn.is_finite() && ftn <= (1.0 - 1e-4 * lambda) * fn2 {
                u = trial;
                f = ft;
                fn2 = ftn;
                break true;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                break false;
            }
        };
        iters += 1;
        if !accepted {
            break;
        }
        converged = norm_inf(&f) <= ctrl.tol;
    }
    let lambda_extract = (problem.t_vortex > 0.0).then(|| {
        let max = u.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        max + 2.0 * (1.0 + (problem.alpha1 + problem.alpha2) as f64) * problem.t_vortex.ln()
    });
    Ok(DiskSolution {
        problem: problem.clone(),
        u,
        newton_iters: iters,
        residual_norm: norm_inf(&f),
        converged,
        lambda_extract,
    })
}

/// Damped Newton; fails with [`Error::NewtonDiverged`] unless the residual
/// reaches `ctrl.tol`.
pub fn solve(problem: &DiskProblem, init: &[f64], ctrl: &DiskControl) -> Result<DiskSolution> {
    let sol = solve_attempt(problem, init, ctrl)?;
    if sol.converged {
        Ok(sol)
    } else {
        Err(Error::NewtonDiverged { iterations: sol.newton_iters, residual: sol.residual_norm })
    }
}

/// Imbalance of the Pohozaev identity on the disk bounded by the ring
/// nearest to `r`:
///
/// ```text
/// ∫_{|x|=r} [ ½(u_s^2 - u_θ^2) + r^2 W e^u ] dθ  vs  ∫_{|x|<r} (2W + x·∇W) e^u dx
/// ```
pub fn pohozaev_residual(sol: &DiskSolution, r: f64) -> f64 {
    let p = &sol.problem;
    let m = &p.mesh;
    let i = m.nearest_ring(r).max(1);
    let ht = m.h_theta();
    let ri2 = m.radius(i).powi(2);
    let boundary: f64 = (0..m.n_theta)
        .map(|j| {
            let k = m.index(i, j);
            let us = sol.ds(i, j);
            let ut = (sol.u[m.index(i, j + 1)] - sol.u[m.index(i, j + m.n_theta - 1)]) / (2.0 * ht);
            0.5 * (us * us - ut * ut) + ri2 * p.weight(k) * sol.u[k].exp()
        })
        .sum::<f64>()
        * ht;
    let ring = |l: usize| {
        let r2 = m.radius(l).powi(2);
        (0..m.n_theta)
            .map(|j| {
                let k = m.index(l, j);
                r2 * (2.0 * p.weight(k) + p.weight_radial(k)) * sol.u[k].exp()
            })
            .sum::<f64>()
            * ht
    };
    let mut bulk = 2.0 * PI * m.radius(0).powi(2) * p.weight(0) * sol.u[0].exp();
    for l in 0..i {
        bulk += 0.5 * m.h() * (ring(l) + ring(l + 1));
    }
    (boundary - bulk).abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingControl {
    pub newton: DiskControl,
    /// Radial spacing of every mesh along the schedule.
    pub h: f64,
    /// Maxima closer than this in the rescaled variable `y = x / t` count once.
    pub separation: f64,
    /// Radius of the Pohozaev check.
    pub pohozaev_radius: f64,
    /// Start each step from the previous solution (otherwise from the bubble guess).
    pub warm_start: bool,
}

impl Default for ScalingControl {
    fn default() -> Self {
        Self { newton: DiskControl::default(), h: 0.05, separation: 0.5, pohozaev_radius: 0.5, warm_start: true }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingEntry {
    pub t: f64,
    pub n_r: usize,
    pub newton_iters: usize,
    pub residual_norm: f64,
    /// `λ_t = max v_t`.
    pub lambda: f64,
    /// Number of separated interior maxima of `v_t`.
    pub m: usize,
    /// `λ_t + 2(1 + alpha1 + alpha2 - 2m) ln t`.
    pub combination: f64,
    /// Location of the maximum in `y = x / t`.
    pub center: [f64; 2],
    pub mass: f64,
    pub mass_balance: f64,
    /// Pohozaev imbalance and enclosed mass at the check radius.
    pub pohozaev: f64,
    pub local_mass: f64,
}

pub const SCALING_NOTE: &str = "EXPLORATORY: a branch continued in t from a bubble-shaped guess; \
existence of the branch for this boundary data is not guaranteed, so the trace is consistency evidence only.";

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScalingReport {
    pub note: String,
    pub alpha1: u32,
    pub alpha2: u32,
    pub entries: Vec<ScalingEntry>,
    /// First `t` at which Newton failed; the entries stop before it.
    pub branch_lost_at: Option<f64>,
}

impl ScalingReport {
    /// Sum of `|Δ combination|` along the schedule.
    pub fn total_variation(&self) -> f64 {
        self.entries.windows(2).map(|w| (w[1].combination - w[0].combination).abs()).sum()
    }

    pub fn require_complete(&self) -> Result<()> {
        match self.branch_lost_at {
            Some(t) => Err(Error::BranchLost { t }),
            None => Ok(()),
        }
    }
}

fn count_separated(sol: &DiskSolution, sep: f64) -> (usize, usize) {
    let m = &sol.problem.mesh;
    let mut maxima = sol.local_maxima();
    maxima.sort_by(|a, b| sol.u[*b].total_cmp(&sol.u[*a]));
    let mut kept: Vec<[f64; 2]> = Vec::new();
    for &k in &maxima {
        let x = m.node_point(k);
        if kept.iter().all(|y| ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt() > sep) {
            kept.push(x);
        }
    }
    (kept.len(), maxima.first().copied().unwrap_or(0))
}

/// The same problem on a mesh adapted to `t`.
pub fn scaling_problem(base: &DiskProblem, t: f64, h: f64) -> Result<DiskProblem> {
    let mesh = LogPolarMesh::with_spacing(scaling_t_min(t), h, base.mesh.n_theta)?;
    let old = &base.mesh;
    let h1 = |x: [f64; 2]| old.interpolate(&base.h1, x);
    DiskProblem::new(mesh, h1, base.alpha1, base.alpha2, t, base.boundary.clone())
}

/// Warm start: the new bubble plus the previous solution's deviation from
/// its own bubble.
fn warm_guess(problem: &DiskProblem, prev: &DiskSolution) -> Vec<f64> {
    let pb = prev.problem.bubble_guess();
    let dev: Vec<f64> = prev.u.iter().zip(&pb).map(|(u, b)| u - b).collect();
    let mut u = problem.bubble_guess();
    for k in 0..problem.mesh.nodes() {
        u[k] += prev.problem.mesh.interpolate(&dev, problem.mesh.node_point(k));
    }
    problem.impose_boundary(&mut u);
    u
}

/// Follow the blow-up branch along a decreasing schedule of `t`.
pub fn continuation_in_t(base: &DiskProblem, schedule: &[f64], ctrl: &ScalingControl) -> Result<ScalingReport> {
    base.validate()?;
    if schedule.is_empty()
        || schedule.iter().any(|t| !(*t > 0.0 && *t <= 0.5))
        || schedule.windows(2).any(|w| w[1] >= w[0])
    {
        return Err(Error::InvalidParams(String::from("t schedule must be strictly decreasing within (0, 0.5]")));
    }
    if base.alpha1 != base.alpha2 {
        return Err(Error::InvalidParams(String::from("continuation expects alpha1 = alpha2")));
    }
    let mut entries = Vec::new();
    let mut prev: Option<DiskSolution> = None;
    let mut branch_lost_at = None;
    let a = (base.alpha1 + base.alpha2) as f64;
    for &t in schedule {
        let problem = scaling_problem(base, t, ctrl.h)?;
        let init = match (&prev, ctrl.warm_start) {
            (Some(p), true) => warm_guess(&problem, p),
            _ => problem.bubble_guess(),
        };
        let sol = match solve(&problem, &init, &ctrl.newton) {
            Ok(s) => s,
            Err(Error::NewtonDiverged { .. } | Error::SingularJacobian { .. }) => {
                branch_lost_at = Some(t);
                break;
            }
            Err(e) => return Err(e),
        };
        let lambda = sol.lambda_extract.expect("t > 0");
        let (count, kmax) = count_separated(&sol, ctrl.separation * t);
        let m_blow = count.max(1);
        let x = problem.mesh.node_point(kmax);
        let ring = problem.mesh.nearest_ring(ctrl.pohozaev_radius).max(1);
        entries.push(ScalingEntry {
            t,
            n_r: problem.mesh.n_r,
            newton_iters: sol.newton_iters,
            residual_norm: sol.residual_norm,
            lambda,
            m: count,
            combination: lambda + 2.0 * (1.0 + a - 2.0 * m_blow as f64) * t.ln(),
            center: [x[0] / t, x[1] / t],
            mass: sol.mass(),
            mass_balance: sol.mass_balance(),
            pohozaev: pohozaev_residual(&sol, ctrl.pohozaev_radius),
            local_mass: sol.mass_within(ring),
        });
        prev = Some(sol);
    }
    Ok(ScalingReport { note: String::from(SCALING_NOTE), alpha1: base.alpha1, alpha2: base.alpha2, entries, branch_lost_at })
}
