//! Blow-up point configurations for two collapsing vortices at `+1` and `-1`.
//!
//! The `m` points `e_1, ..., e_m` solve
//!
//! ```text
//! alpha1 / (e_l - 1) + alpha2 / (e_l + 1) = 2 sum_{j != l} 1 / (e_l - e_j)
//! ```
//!
//! Their elementary symmetric functions follow from a two-term recurrence,
//! so the configuration is the root set of an explicit real polynomial.
//! A damped Newton iteration on the real form of the equations serves as an
//! independent check.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::linalg;
use crate::roots;
use crate::{poly, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct VortexParams {
    pub alpha1: f64,
    pub alpha2: f64,
    pub m: usize,
    /// Non-integer strengths were requested; the recurrence is evaluated but
    /// carries no guarantee.
    pub extrapolation: bool,
}

impl VortexParams {
    /// Integer strengths with `|alpha1 - alpha2| <= 1` and `1 <= m <= min(alpha1, alpha2)`.
    pub fn new(alpha1: u32, alpha2: u32, m: usize) -> Result<Self> {
        if alpha1 == 0 || alpha2 == 0 {
            return Err(Error::InvalidParams(alloc::format!("strengths must be positive, got ({alpha1}, {alpha2})")));
        }
        if alpha1.abs_diff(alpha2) > 1 {
            return Err(Error::InvalidParams(alloc::format!("|alpha1 - alpha2| > 1 for ({alpha1}, {alpha2})")));
        }
        if m == 0 || m > alpha1.min(alpha2) as usize {
            return Err(Error::InvalidParams(alloc::format!(
                "m = {m} outside 1..={} for ({alpha1}, {alpha2})",
                alpha1.min(alpha2)
            )));
        }
        Ok(Self { alpha1: alpha1 as f64, alpha2: alpha2 as f64, m, extrapolation: false })
    }

    /// Real strengths; only the recurrence denominators are checked.
    pub fn extrapolated(alpha1: f64, alpha2: f64, m: usize) -> Result<Self> {
        let p = Self { alpha1, alpha2, m, extrapolation: true };
        if !(alpha1.is_finite() && alpha2.is_finite()) || m == 0 {
            return Err(Error::InvalidParams(alloc::format!("bad extrapolated parameters {p:?}")));
        }
        if p.sum_denominator() == 0.0 || (0..m.saturating_sub(1)).any(|k| p.recurrence_denominator(k) == 0.0) {
            return Err(Error::InvalidParams(alloc::format!("vanishing recurrence denominator for {p:?}")));
        }
        Ok(p)
    }

    fn sum_denominator(&self) -> f64 {
        self.alpha1 + self.alpha2 - 2.0 * (self.m as f64 - 1.0)
    }

    fn recurrence_denominator(&self, k: usize) -> f64 {
        (2.0 + k as f64) * (self.alpha1 + self.alpha2 - 2.0 * self.m as f64 + k as f64 + 3.0)
    }

    /// Leading coefficient `m (alpha1 + alpha2 - (m - 1))`.
    pub fn leading(&self) -> f64 {
        self.m as f64 * (self.alpha1 + self.alpha2 - (self.m as f64 - 1.0))
    }
}

/// Elementary symmetric functions `sym[k]` of the points, `k = 0..=m`.
pub fn symmetric_functions(params: &VortexParams) -> Vec<f64> {
    let m = params.m;
    let mf = m as f64;
    let mut sym = vec![0.0; m + 1];
    sym[0] = 1.0;
    if m >= 1 {
        sym[1] = (params.alpha2 - params.alpha1) * mf / params.sum_denominator();
    }
    for k in 0..m.saturating_sub(1) {
        let kf = k as f64;
        let num = (mf - kf - 1.0) * (mf - kf) * sym[k] - (params.alpha1 - params.alpha2) * (mf - kf - 1.0) * sym[k + 1];
        sym[k + 2] = num / params.recurrence_denominator(k);
    }
    sym
}

/// Ascending coefficients of `M prod (z - e_l) = M sum_k (-1)^k sym[k] z^{m-k}`.
pub fn characteristic_polynomial(sym: &[f64], params: &VortexParams) -> Vec<f64> {
    let m = sym.len() - 1;
    let lead = params.leading();
    let mut c = vec![0.0; m + 1];
    for (k, s) in sym.iter().enumerate() {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[m - k] = lead * sign * s;
    }
    c
}

/// `max_l |alpha1/(e_l-1) + alpha2/(e_l+1) - 2 sum_{j != l} 1/(e_l-e_j)|`.
pub fn residual(params: &VortexParams, points: &[Complex64]) -> f64 {
    equations(params, points).iter().map(|f| f.norm()).fold(0.0, f64::max)
}

fn equations(params: &VortexParams, z: &[Complex64]) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    (0..z.len())
        .map(|l| {
            let mut f = params.alpha1 / (z[l] - one) + params.alpha2 / (z[l] + one);
            for j in 0..z.len() {
                if j != l {
                    f -= 2.0 / (z[l] - z[j]);
                }
            }
            f
        })
        .collect()
}

/// Sort by real part (ties within `1e-12`), then imaginary part.
pub fn sort_points(points: &mut [Complex64]) {
    points.sort_by(|a, b| {
        if (a.re - b.re).abs() <= 1e-12 {
            a.im.total_cmp(&b.im)
        } else {
            a.re.total_cmp(&b.re)
        }
    });
}

/// Hausdorff distance between two finite point sets.
pub fn set_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let one_way = |x: &[Complex64], y: &[Complex64]| {
        x.iter().map(|p| y.iter().map(|q| (p - q).norm()).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    one_way(a, b).max(one_way(b, a))
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BlowupConfiguration {
    pub params: VortexParams,
    pub sym: Vec<f64>,
    /// Ascending coefficients.
    pub poly: Vec<f64>,
    pub points: Vec<Complex64>,
    pub residual: f64,
}

pub const RESIDUAL_LIMIT: f64 = 1e-8;

/// Solve for the configuration through its characteristic polynomial.
pub fn find_points(params: &VortexParams) -> Result<BlowupConfiguration> {
    let sym = symmetric_functions(params);
    let poly = characteristic_polynomial(&sym, params);
    let mut points = roots::roots(&poly)?;
    // exact symmetries of a real polynomial: conjugate pairs, real roots
    for z in points.iter_mut() {
        if z.im.abs() <= 1e-14 * z.norm().max(1.0) {
            z.im = 0.0;
        }
    }
    sort_points(&mut points);
    let min_gap = (0..points.len())
        .flat_map(|i| (i + 1..points.len()).map(move |j| (i, j)))
        .map(|(i, j)| (points[i] - points[j]).norm())
        .fold(f64::INFINITY, f64::min);
    if min_gap < 1e-8 {
        return Err(Error::ResidualTooLarge { residual: f64::INFINITY, limit: RESIDUAL_LIMIT });
    }
    let residual = residual(params, &points);
    if !(residual <= RESIDUAL_LIMIT) {
        return Err(Error::ResidualTooLarge { residual, limit: RESIDUAL_LIMIT });
    }
    Ok(BlowupConfiguration { params: *params, sym, poly, points, residual })
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct NewtonControl {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for NewtonControl {
    fn default() -> Self {
        Self { tol: 1e-12, max_iter: 200 }
    }
}

/// Iterates leaving this disk are reported as divergence.
pub const ESCAPE_RADIUS: f64 = 1e4;

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// The equations times `z_l^2 - 1`. Same zeros away from the vortices, but
/// the norm grows at infinity where the plain residual decays like `1/|z|`.
fn cleared(params: &VortexParams, z: &[Complex64]) -> Vec<Complex64> {
    let one = Complex64::new(1.0, 0.0);
    equations(params, z).iter().zip(z).map(|(f, w)| (w * w - one) * f).collect()
}

/// Damped Newton on the `2m` real equations
/// `alpha1 (p - e)/|p - e|^2 + alpha2 (p + e)/|p + e|^2 = 2 sum_{j != i} (p_i - p_j)/|p_i - p_j|^2`.
///
/// Steps are taken on each equation scaled by `|p_i|^2 - 1` in complex form;
/// convergence is judged on the unscaled residual.
pub fn newton_oracle(params: &VortexParams, start: &[Complex64], ctrl: &NewtonControl) -> Result<Vec<Complex64>> {
    let m = start.len();
    if m != params.m {
        return Err(Error::InvalidInputs(alloc::format!("{m} start points for m = {}", params.m)));
    }
    let one = Complex64::new(1.0, 0.0);
    for (i, z) in start.iter().enumerate() {
        if (z - one).norm() < 1e-12 || (z + one).norm() < 1e-12 || start[..i].iter().any(|w| (z - w).norm() < 1e-12) {
            return Err(Error::InvalidInputs(alloc::string::String::from(
                "start points must be distinct and avoid the vortices",
            )));
        }
    }
    let mut z = start.to_vec();
    let mut gn = norm(&equations(params, &z));
    let mut h = cleared(params, &z);
    let mut hn = norm(&h);
    for iter in 0..ctrl.max_iter {
        if gn <= ctrl.tol {
            sort_points(&mut z);
            return Ok(z);
        }
        let f = equations(params, &z);
        // the real equations are the conjugate of the analytic form; for a
        // complex derivative D with conj(D) = c + i d the real block is
        // [[c, d], [d, -c]]
        let n = 2 * m;
        let mut jac = vec![0.0; n * n];
        for l in 0..m {
            let scale = z[l] * z[l] - one;
            for j in 0..m {
                let d = if l == j {
                    let mut d = -params.alpha1 / ((z[l] - one) * (z[l] - one)) - params.alpha2 / ((z[l] + one) * (z[l] + one));
                    for k in 0..m {
                        if k != l {
                            d += 2.0 / ((z[l] - z[k]) * (z[l] - z[k]));
                        }
                    }
                    2.0 * z[l] * f[l] + scale * d
                } else {
                    scale * (-2.0 / ((z[l] - z[j]) * (z[l] - z[j])))
                };
                let (c, dd) = (d.re, -d.im);
                jac[(2 * l) * n + 2 * j] = c;
                jac[(2 * l) * n + 2 * j + 1] = dd;
                jac[(2 * l + 1) * n + 2 * j] = dd;
                jac[(2 * l + 1) * n + 2 * j + 1] = -c;
            }
        }
        let mut step: Vec<f64> = h.iter().flat_map(|x| [-x.re, x.im]).collect();
        if linalg::solve_dense(&mut jac, &mut step).is_err() {
            return Err(Error::NewtonDiverged { iterations: iter, residual: gn });
        }
        let mut lambda = 1.0;
        loop {
            let trial: Vec<Complex64> =
                (0..m).map(|l| z[l] + lambda * Complex64::new(step[2 * l], step[2 * l + 1])).collect();
            let ht = cleared(params, &trial);
            let htn = norm(&ht);
            let inside = trial.iter().all(|w| w.norm() <= ESCAPE_RADIUS);
            if inside && htn.is_finite() && htn <= (1.0 - 1e-4 * lambda) * hn {
                z = trial;
                h = ht;
                hn = htn;
                gn = norm(&equations(params, &z));
                break;
            }
            lambda *= 0.5;
            if lambda < 1e-10 {
                if gn <= 10.0 * ctrl.tol {
                    // stalled at rounding level
                    sort_points(&mut z);
                    return Ok(z);
                }
                return Err(Error::NewtonDiverged { iterations: iter, residual: gn });
            }
        }
    }
    if gn <= ctrl.tol {
        sort_points(&mut z);
        return Ok(z);
    }
    Err(Error::NewtonDiverged { iterations: ctrl.max_iter, residual: gn })
}

/// Evaluate the characteristic polynomial at each point (a Vieta check).
pub fn polynomial_residual(config: &BlowupConfiguration) -> f64 {
    config.points.iter().map(|z| poly::eval(&config.poly, *z).norm()).fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_out_of_regime_parameters() {
        assert!(VortexParams::new(3, 1, 1).is_err());
        assert!(VortexParams::new(2, 2, 3).is_err());
        assert!(VortexParams::new(0, 1, 1).is_err());
        assert!(VortexParams::new(2, 2, 0).is_err());
        assert!(VortexParams::new(3, 2, 2).is_ok());
    }

    #[test]
    fn symmetric_function_examples() {
        assert_eq!(symmetric_functions(&VortexParams::new(1, 1, 1).unwrap()), vec![1.0, 0.0]);
        let s = symmetric_functions(&VortexParams::new(2, 2, 2).unwrap());
        assert!((s[2] - 1.0 / 3.0).abs() < 1e-15 && s[1] == 0.0);
        let s = symmetric_functions(&VortexParams::new(2, 1, 1).unwrap());
        assert!((s[1] + 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn polynomial_examples() {
        let p = VortexParams::new(2, 2, 2).unwrap();
        let c = characteristic_polynomial(&symmetric_functions(&p), &p);
        assert!((c[0] - 2.0).abs() < 1e-14 && c[1] == 0.0 && c[2] == 6.0);
        let p = VortexParams::new(1, 1, 1).unwrap();
        assert_eq!(characteristic_polynomial(&symmetric_functions(&p), &p), vec![0.0, 2.0]);
        let p = VortexParams::new(2, 1, 1).unwrap();
        let c = characteristic_polynomial(&symmetric_functions(&p), &p);
        assert!((c[0] - 1.0).abs() < 1e-14 && c[1] == 3.0);
    }

    #[test]
    fn extrapolation_flag() {
        let p = VortexParams::extrapolated(1.5, 2.0, 1).unwrap();
        assert!(p.extrapolation);
        assert!(!VortexParams::new(2, 2, 1).unwrap().extrapolation);
        // alpha1 + alpha2 - 2(m - 1) = 0
        assert!(VortexParams::extrapolated(0.5, 1.5, 2).is_err());
    }

    #[test]
    fn newton_rejects_bad_starts() {
        let p = VortexParams::new(2, 2, 2).unwrap();
        let c = NewtonControl::default();
        let z = Complex64::new(0.5, 0.5);
        assert!(newton_oracle(&p, &[z, z], &c).is_err());
        assert!(newton_oracle(&p, &[z], &c).is_err());
        assert!(newton_oracle(&p, &[Complex64::new(1.0, 0.0), z], &c).is_err());
    }

    #[test]
    fn hausdorff_distance() {
        let a = [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        let b = [Complex64::new(0.0, 0.1)];
        assert!((set_distance(&a, &b) - (1.01f64).sqrt()).abs() < 1e-15);
    }
}
