//! Collapse of a regularized weight with fixed total mass.
//!
//! For `eps = 1/lambda -> 0` the radial solutions of
//! `-(r v')' = r (eps + r^2)^alpha (1 + r^2)^a_pow e^v r` with total mass
//! `beta = rho / 2 pi` concentrate a local mass of exactly 4 (that is `8 pi`)
//! in the core `r ~ sqrt(eps)`, while the rest of the mass stays spread and
//! converges to the singular limit `xi = -4 ln r + eta`.
//!
//! Only the radial mechanism is reproduced; branches are labeled by
//! continuation in `eps`, not by any variational characterization.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::radial::{beta_relaxed, integrate_cauchy, IntegrationControl, RadialSolution, WeightSpec};
use crate::{Error, Result};

/// Stated in every report produced by this module.
pub const REPORT_NOTE: &str =
    "radial mechanism only: branches are followed by continuation in eps and are not identified with a particular PDE solution sequence";

/// `a = rho / 4 pi - (alpha + 2)`.
pub fn a_pow_from_rho(rho: f64, alpha: f64) -> f64 {
    rho / (4.0 * PI) - (alpha + 2.0)
}

/// `-1 < a_pow < 0`.
pub fn a_pow_admissible(a_pow: f64) -> bool {
    a_pow > -1.0 && a_pow < 0.0
}

/// `(4 pi (alpha + 1), min(2 pi beta_bar, 16 pi))` in rho units.
pub fn admissible_rho_window(alpha: f64, beta_bar: f64) -> Result<(f64, f64)> {
    if !(alpha > 1.0 && alpha < 3.0) {
        return Err(Error::InvalidParams(alloc::format!("alpha = {alpha} outside (1, 3)")));
    }
    let lower = 4.0 * PI * (alpha + 1.0);
    let upper = (2.0 * PI * beta_bar).min(16.0 * PI);
    if lower >= upper {
        return Err(Error::EmptyWindow { lower, upper });
    }
    Ok((lower, upper))
}

/// The regularized weight `(eps + r^2)^alpha (1 + r^2)^a_pow`.
pub fn collapse_weight(eps: f64, alpha: f64, a_pow: f64) -> WeightSpec {
    WeightSpec { eps, p: alpha, q: a_pow }
}

/// Scan of central values bracketing the target mass at one `eps`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScanWindow {
    /// Centre of the first scan; later scans centre on the previous root.
    pub first_center: f64,
    pub below: f64,
    pub above: f64,
    pub points: usize,
}

impl Default for ScanWindow {
    fn default() -> Self {
        Self { first_center: 0.0, below: 10.0, above: 50.0, points: 32 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Solved {
    /// Root on the continued branch.
    pub a_found: f64,
    /// Every root found in the scan.
    pub roots: Vec<f64>,
    pub beta_check: f64,
    /// `M(eps^{1/4})`.
    pub plateau: f64,
    /// `M(eps^{1/3})`, for sensitivity to the probe exponent.
    pub plateau_third: f64,
    pub solution: RadialSolution,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CollapseRecord {
    pub eps: f64,
    pub r_probe: f64,
    /// `None` when no central value attains the target mass in the scan.
    pub solved: Option<Solved>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CollapseRun {
    pub alpha: f64,
    pub rho: f64,
    pub a_pow: f64,
    pub schedule: Vec<f64>,
    pub records: Vec<CollapseRecord>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CollapseReport {
    pub note: alloc::string::String,
    pub run: CollapseRun,
    /// Concentrated mass estimate per `eps` (beta units), `None` on a missing bracket.
    pub plateau: Vec<Option<f64>>,
    pub limit_profile: Option<RadialSolution>,
}

impl CollapseReport {
    /// Plateau of the last solved record.
    pub fn final_plateau(&self) -> Option<f64> {
        self.plateau.iter().rev().flatten().next().copied()
    }
}

/// Bisection of `a -> beta(weight, a) - target` on a sign-changing bracket,
/// to `|beta - target| <= 1e-10` or a bracket of `1e-13`.
fn bisect(weight: &WeightSpec, target: f64, mut lo: f64, mut hi: f64, f_lo: f64, ctrl: &IntegrationControl) -> Result<f64> {
    loop {
        let mid = 0.5 * (lo + hi);
        let fm = beta_relaxed(weight, mid, ctrl)?.0.beta - target;
        if fm.abs() <= 1e-10 || hi - lo < 1e-13 {
            return Ok(mid);
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// All roots of `beta(weight, a) = target` bracketed by an equally spaced scan.
pub fn scan_roots(weight: &WeightSpec, target: f64, lo: f64, hi: f64, points: usize, ctrl: &IntegrationControl) -> Result<Vec<f64>> {
    let values: Vec<(f64, Option<f64>)> = (0..points)
        .map(|i| {
            let a = lo + (hi - lo) * i as f64 / (points - 1) as f64;
            match beta_relaxed(weight, a, ctrl) {
                Ok((m, _)) => Ok((a, Some(m.beta - target))),
                Err(Error::NotConverged { .. } | Error::DivergedStep { .. }) => Ok((a, None)),
                Err(e) => Err(e),
            }
        })
        .collect::<Result<_>>()?;
    let mut roots = Vec::new();
    for w in values.windows(2) {
        if let ((a0, Some(f0)), (a1, Some(f1))) = (w[0], w[1]) {
            if f0 == 0.0 {
                roots.push(a0);
            } else if f0 * f1 < 0.0 {
                roots.push(bisect(weight, target, a0, a1, f0, ctrl)?);
            }
        }
    }
    Ok(roots)
}

/// Follow the fixed-mass branch along a decreasing `eps` schedule.
pub fn run_collapse(alpha: f64, rho: f64, schedule: &[f64], ctrl: &IntegrationControl) -> Result<CollapseReport> {
    run_collapse_with(alpha, rho, schedule, ctrl, ScanWindow::default())
}

pub fn run_collapse_with(
    alpha: f64,
    rho: f64,
    schedule: &[f64],
    ctrl: &IntegrationControl,
    window: ScanWindow,
) -> Result<CollapseReport> {
    if !(rho > 0.0) || !(alpha > -1.0) {
        return Err(Error::InvalidParams(alloc::format!("need rho > 0 and alpha > -1, got rho = {rho}, alpha = {alpha}")));
    }
    if schedule.is_empty() || schedule.iter().any(|e| !(*e > 0.0)) || schedule.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::InvalidParams(alloc::string::String::from(
            "eps schedule must be non-empty, positive and strictly decreasing",
        )));
    }
    if window.points < 2 {
        return Err(Error::InvalidParams(alloc::string::String::from("scan needs at least two points")));
    }
    let a_pow = a_pow_from_rho(rho, alpha);
    let target = rho / (2.0 * PI);
    let mut center = window.first_center;
    let mut records = Vec::with_capacity(schedule.len());
    for &eps in schedule {
        let weight = WeightSpec::new(eps, alpha, a_pow)?;
        let r_probe = eps.powf(0.25);
        let roots = scan_roots(&weight, target, center - window.below, center + window.above, window.points, ctrl)?;
        let Some(&a_found) = roots.iter().min_by(|x, y| (*x - center).abs().total_cmp(&(*y - center).abs())) else {
            records.push(CollapseRecord { eps, r_probe, solved: None });
            continue;
        };
        center = a_found;
        let (m, c) = beta_relaxed(&weight, a_found, ctrl)?;
        let solution = integrate_cauchy(&weight, a_found, &c)?;
        let plateau = solution.mass_at(r_probe.ln());
        let plateau_third = solution.mass_at(eps.ln() / 3.0);
        records.push(CollapseRecord {
            eps,
            r_probe,
            solved: Some(Solved { a_found, roots, beta_check: m.beta, plateau, plateau_third, solution }),
        });
    }
    let plateau = records.iter().map(|r| r.solved.as_ref().map(|s| s.plateau)).collect();
    Ok(CollapseReport {
        note: alloc::string::String::from(REPORT_NOTE),
        run: CollapseRun { alpha, rho, a_pow, schedule: schedule.to_vec(), records },
        plateau,
        limit_profile: None,
    })
}

/// Regular part `eta` of the singular limit `xi = -4 ln r + eta`.
///
/// `eta` solves the radial problem with weight `r^{2(alpha-2)} (1+r^2)^a_pow`
/// and total mass `(rho - 8 pi) / 2 pi`.
pub fn limit_profile(alpha: f64, rho: f64, ctrl: &IntegrationControl) -> Result<RadialSolution> {
    if !(rho > 8.0 * PI) {
        return Err(Error::InvalidParams(alloc::format!("limit profile needs rho > 8 pi, got {rho}")));
    }
    let weight = limit_weight(alpha, rho)?;
    let target = (rho - 8.0 * PI) / (2.0 * PI);
    let roots = scan_roots(&weight, target, -30.0, 30.0, 61, ctrl)?;
    let Some(&a) = roots.first() else {
        return Err(Error::NoBracket { eps: 0.0, target });
    };
    let (_, c) = beta_relaxed(&weight, a, ctrl)?;
    integrate_cauchy(&weight, a, &c)
}

/// `WeightSpec { eps: 0, p: alpha - 2, q: a_pow }`.
pub fn limit_weight(alpha: f64, rho: f64) -> Result<WeightSpec> {
    WeightSpec::new(0.0, alpha - 2.0, a_pow_from_rho(rho, alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_relation() {
        assert!((a_pow_from_rho(12.6 * PI, 2.0) + 0.85).abs() < 1e-14);
        assert!((a_pow_from_rho(4.0 * PI * 3.0, 2.0) + 1.0).abs() < 1e-14);
        // the upper edge of the band: rho = 4 pi (alpha + 2)
        assert!(a_pow_from_rho(4.0 * PI * 4.0, 2.0).abs() < 1e-14);
        assert!((a_pow_from_rho(8.0 * PI * 4.0, 2.0) - 4.0).abs() < 1e-14);
        assert!(!a_pow_admissible(0.0) && !a_pow_admissible(-1.0) && a_pow_admissible(-0.85));
    }

    #[test]
    fn rho_window() {
        let (lo, hi) = admissible_rho_window(2.0, 7.0).unwrap();
        assert!((lo - 12.0 * PI).abs() < 1e-12 && (hi - 14.0 * PI).abs() < 1e-12);
        let (_, hi) = admissible_rho_window(2.9, 100.0).unwrap();
        assert_eq!(hi, 16.0 * PI);
        assert!(matches!(admissible_rho_window(2.0, 5.0), Err(Error::EmptyWindow { .. })));
        assert!(matches!(admissible_rho_window(3.5, 20.0), Err(Error::InvalidParams(_))));
    }

    #[test]
    fn shifted_weight_for_alpha_two() {
        let w = limit_weight(2.0, 12.6 * PI).unwrap();
        assert_eq!(w.eps, 0.0);
        assert_eq!(w.p, 0.0);
        assert!((w.q + 0.85).abs() < 1e-14);
    }

    #[test]
    fn schedule_must_decrease() {
        let c = IntegrationControl::default();
        assert!(run_collapse(2.0, 12.6 * PI, &[1e-4, 1e-2], &c).is_err());
        assert!(run_collapse(2.0, 12.6 * PI, &[], &c).is_err());
        assert!(limit_profile(2.0, 7.0 * PI, &c).is_err());
    }
}
