//! The mass curve `a -> beta_alpha(a)` for the weight `(1 + r^2)^alpha`.
//!
//! For `-1 < alpha <= 1` the curve is monotone between `4(alpha+1)` at
//! `a = -inf` and `4 max(alpha, 1)` at `a = +inf`. For `alpha > 1` it dips
//! to an interior minimum `beta_bar` below `4 alpha` before climbing back,
//! so targets in `(beta_bar, 4 alpha)` are hit at least twice.
//!
//! Multiplicities are counted on a sampled curve and are therefore lower
//! bounds tied to the sweep density recorded in the report.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::radial::{beta_relaxed, linearized, IntegrationControl, WeightSpec};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Sample {
    pub a: f64,
    /// `NaN` when the integration did not converge.
    pub beta: f64,
    pub converged: bool,
    pub tail: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Minimizer {
    pub a_star: f64,
    pub beta_bar: f64,
    /// `beta'(a_star)` from the linearized equation.
    pub beta_prime: f64,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassCurve {
    pub alpha: f64,
    /// Sorted by `a`.
    pub samples: Vec<Sample>,
    pub minimizer: Option<Minimizer>,
}

impl MassCurve {
    /// Build a curve from samples in any order; the minimizer is searched
    /// for and left empty when the curve has no interior minimum.
    pub fn from_samples(alpha: f64, mut samples: Vec<Sample>, ctrl: &IntegrationControl) -> Result<Self> {
        samples.sort_by(|x, y| x.a.total_cmp(&y.a));
        let mut curve = Self { alpha, samples, minimizer: None };
        match find_min(&curve, ctrl) {
            Ok(m) => curve.minimizer = Some(m),
            Err(Error::NoInteriorMin) => {}
            Err(e) => return Err(e),
        }
        Ok(curve)
    }

    pub fn a_star(&self) -> Option<f64> {
        self.minimizer.map(|m| m.a_star)
    }

    pub fn beta_bar(&self) -> Option<f64> {
        self.minimizer.map(|m| m.beta_bar)
    }

    pub fn converged(&self) -> impl Iterator<Item = &Sample> {
        self.samples.iter().filter(|s| s.converged)
    }

    /// `Some(-1)` if the converged samples strictly decrease, `Some(1)` if
    /// they strictly increase, `None` otherwise.
    pub fn monotonicity(&self) -> Option<i8> {
        let b: Vec<f64> = self.converged().map(|s| s.beta).collect();
        if b.windows(2).all(|w| w[1] < w[0]) {
            Some(-1)
        } else if b.windows(2).all(|w| w[1] > w[0]) {
            Some(1)
        } else {
            None
        }
    }

    /// Smallest and largest converged sample.
    pub fn image(&self) -> Option<(f64, f64)> {
        let mut it = self.converged().map(|s| s.beta);
        let first = it.next()?;
        Some(it.fold((first, first), |(lo, hi), b| (lo.min(b), hi.max(b))))
    }
}

/// `n` equally spaced abscissae on `[a_lo, a_hi]`.
pub fn grid(a_lo: f64, a_hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a_lo + (a_hi - a_lo) * i as f64 / (n - 1) as f64).collect()
}

/// Evaluate `beta_alpha(a)`; a run that does not converge yields a flagged sample.
pub fn sample(alpha: f64, a: f64, ctrl: &IntegrationControl) -> Result<Sample> {
    match beta_relaxed(&WeightSpec::pure(alpha), a, ctrl) {
        Ok((m, _)) => Ok(Sample { a, beta: m.beta, converged: m.converged, tail: m.tail }),
        Err(Error::NotConverged { .. } | Error::DivergedStep { .. }) => {
            Ok(Sample { a, beta: f64::NAN, converged: false, tail: f64::NAN })
        }
        Err(e) => Err(e),
    }
}

fn check_sweep(alpha: f64, a_lo: f64, a_hi: f64, n: usize) -> Result<()> {
    if !(alpha > -1.0) {
        return Err(Error::InvalidParams(alloc::format!("alpha = {alpha} must exceed -1")));
    }
    if n < 2 || !(a_lo < a_hi) {
        return Err(Error::InvalidParams(alloc::format!(
            "sweep needs n >= 2 and a_lo < a_hi, got n = {n}, [{a_lo}, {a_hi}]"
        )));
    }
    Ok(())
}

/// Sample the curve at `n` equally spaced points of `[a_lo, a_hi]`.
pub fn sweep(alpha: f64, a_lo: f64, a_hi: f64, n: usize, ctrl: &IntegrationControl) -> Result<MassCurve> {
    check_sweep(alpha, a_lo, a_hi, n)?;
    let samples = grid(a_lo, a_hi, n).into_iter().map(|a| sample(alpha, a, ctrl)).collect::<Result<Vec<_>>>()?;
    MassCurve::from_samples(alpha, samples, ctrl)
}

/// As [`sweep`], with the samples evaluated by a caller-supplied map (for
/// instance a parallel one). `eval` must return samples for exactly the
/// abscissae it is given.
pub fn sweep_with<E>(alpha: f64, a_lo: f64, a_hi: f64, n: usize, ctrl: &IntegrationControl, eval: E) -> Result<MassCurve>
where
    E: FnOnce(&[f64]) -> Result<Vec<Sample>>,
{
    check_sweep(alpha, a_lo, a_hi, n)?;
    let samples = eval(&grid(a_lo, a_hi, n))?;
    MassCurve::from_samples(alpha, samples, ctrl)
}

fn beta_value(alpha: f64, a: f64, ctrl: &IntegrationControl) -> Result<f64> {
    Ok(beta_relaxed(&WeightSpec::pure(alpha), a, ctrl)?.0.beta)
}

fn beta_prime(alpha: f64, a: f64, ctrl: &IntegrationControl) -> Result<f64> {
    let (_, c) = beta_relaxed(&WeightSpec::pure(alpha), a, ctrl)?;
    Ok(linearized(&WeightSpec::pure(alpha), a, &c)?.beta_prime)
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Refine the smallest interior sample to the minimizer of `beta`.
///
/// Golden-section search on the bracketing triple narrows the interval to
/// `1e-6` in `a`. Close to the minimum `beta` is flat to rounding, so the
/// result is then polished by bisection on the sign of `beta'` from the
/// linearized equation.
pub fn find_min(curve: &MassCurve, ctrl: &IntegrationControl) -> Result<Minimizer> {
    let pts: Vec<&Sample> = curve.converged().collect();
    if pts.len() < 3 {
        return Err(Error::NoInteriorMin);
    }
    let (k, low) = pts
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.beta.total_cmp(&y.1.beta))
        .map(|(i, s)| (i, s.beta))
        .unwrap();
    if k == 0 || k == pts.len() - 1 || !(low < pts[0].beta && low < pts[pts.len() - 1].beta) {
        return Err(Error::NoInteriorMin);
    }
    let alpha = curve.alpha;
    let (mut lo, mut hi) = (pts[k - 1].a, pts[k + 1].a);
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = beta_value(alpha, x1, ctrl)?;
    let mut f2 = beta_value(alpha, x2, ctrl)?;
    while hi - lo > 1e-6 {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = beta_value(alpha, x1, ctrl)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = beta_value(alpha, x2, ctrl)?;
        }
    }
    let mut a_star = 0.5 * (lo + hi);
    let mut d = beta_prime(alpha, a_star, ctrl)?;

    // widen around the golden-section point until beta' changes sign
    let mut width = 1e-4;
    let (mut left, mut right) = (a_star, a_star);
    let mut bracketed = false;
    while width <= pts[k + 1].a - pts[k - 1].a {
        left = a_star - width;
        right = a_star + width;
        if beta_prime(alpha, left, ctrl)? < 0.0 && beta_prime(alpha, right, ctrl)? > 0.0 {
            bracketed = true;
            break;
        }
        width *= 4.0;
    }
    if bracketed {
        while right - left > 1e-9 {
            let mid = 0.5 * (left + right);
            if beta_prime(alpha, mid, ctrl)? < 0.0 {
                left = mid;
            } else {
                right = mid;
            }
        }
        a_star = 0.5 * (left + right);
        d = beta_prime(alpha, a_star, ctrl)?;
    }
    Ok(Minimizer { a_star, beta_bar: beta_value(alpha, a_star, ctrl)?, beta_prime: d })
}

/// All central values with `beta_alpha(a) = target`, one per sign change of
/// `beta - target` between consecutive converged samples, bisected to
/// `|beta - target| <= 1e-8`. Sorted ascending.
pub fn solve_for_mass(alpha: f64, target: f64, curve: &MassCurve, ctrl: &IntegrationControl) -> Result<Vec<f64>> {
    let pts: Vec<&Sample> = curve.converged().collect();
    let mut roots = Vec::new();
    for (i, s) in pts.iter().enumerate() {
        let fa = s.beta - target;
        if fa == 0.0 {
            roots.push(s.a);
            continue;
        }
        let Some(next) = pts.get(i + 1) else { break };
        let fb = next.beta - target;
        if fa * fb >= 0.0 {
            continue;
        }
        let (mut lo, mut hi) = (s.a, next.a);
        let mut root;
        loop {
            let mid = 0.5 * (lo + hi);
            let fm = beta_value(alpha, mid, ctrl)? - target;
            root = mid;
            if fm.abs() <= 1e-8 || hi - lo < 1e-13 {
                break;
            }
            if (fm < 0.0) == (fa < 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        roots.push(root);
    }
    if roots.is_empty() {
        return Err(Error::NoSolution { target });
    }
    Ok(roots)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Regime {
    /// `-1 < alpha <= 1`: monotone curve, unique radial solutions.
    SubUnit,
    /// `alpha > 1`: interior minimum, at least two solutions below `4 alpha`.
    SuperUnit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Count {
    Finite(usize),
    /// Every central value solves the problem (the scale-invariant case `alpha = 0`).
    Continuum,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
    pub lo_closed: bool,
    pub hi_closed: bool,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        (x > self.lo || (self.lo_closed && x == self.lo)) && (x < self.hi || (self.hi_closed && x == self.hi))
    }
}

/// A range of targets with the same number of radial solutions found.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Band {
    /// Smallest and largest probed target in the band.
    pub beta_lo: f64,
    pub beta_hi: f64,
    pub count: Count,
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SweepSpec {
    pub a_lo: f64,
    pub a_hi: f64,
    pub n: usize,
    /// Number of probed targets for the multiplicity map.
    pub targets: usize,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self { a_lo: -30.0, a_hi: 30.0, n: 200, targets: 60 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolvabilityReport {
    pub alpha: f64,
    pub regime: Regime,
    /// The sampled image of `beta_alpha` in beta units.
    pub solvable: Interval,
    pub multiplicity: Vec<Band>,
    pub minimizer: Option<Minimizer>,
    pub sweep: SweepSpec,
}

impl SolvabilityReport {
    /// Count recorded for the band containing `beta`.
    pub fn count_at(&self, beta: f64) -> Option<Count> {
        self.multiplicity.iter().find(|b| beta >= b.beta_lo && beta <= b.beta_hi).map(|b| b.count)
    }
}

/// Classify solvability with the default sweep.
pub fn classify(alpha: f64, ctrl: &IntegrationControl) -> Result<SolvabilityReport> {
    let spec = SweepSpec::default();
    let curve = sweep(alpha, spec.a_lo, spec.a_hi, spec.n, ctrl)?;
    classify_curve(&curve, spec, ctrl)
}

/// Solvable interval and multiplicity map of an already sampled curve.
pub fn classify_curve(curve: &MassCurve, spec: SweepSpec, ctrl: &IntegrationControl) -> Result<SolvabilityReport> {
    let alpha = curve.alpha;
    if !(alpha > -1.0) {
        return Err(Error::InvalidParams(alloc::format!("alpha = {alpha} must exceed -1")));
    }
    let regime = if alpha <= 1.0 { Regime::SubUnit } else { Regime::SuperUnit };
    if alpha == 0.0 {
        return Ok(SolvabilityReport {
            alpha,
            regime,
            solvable: Interval { lo: 4.0, hi: 4.0, lo_closed: true, hi_closed: true },
            multiplicity: alloc::vec![Band { beta_lo: 4.0, beta_hi: 4.0, count: Count::Continuum }],
            minimizer: None,
            sweep: spec,
        });
    }
    let (lo, hi) = curve.image().ok_or(Error::NoSolution { target: f64::NAN })?;
    let solvable = match curve.minimizer {
        Some(m) => Interval { lo: m.beta_bar, hi, lo_closed: true, hi_closed: false },
        None => Interval { lo, hi, lo_closed: false, hi_closed: false },
    };
    let mut bands: Vec<Band> = Vec::new();
    for k in 1..=spec.targets {
        let target = solvable.lo + (solvable.hi - solvable.lo) * k as f64 / (spec.targets + 1) as f64;
        let count = match solve_for_mass(alpha, target, curve, ctrl) {
            Ok(r) => r.len(),
            Err(Error::NoSolution { .. }) => 0,
            Err(e) => return Err(e),
        };
        match bands.last_mut() {
            Some(b) if b.count == Count::Finite(count) => b.beta_hi = target,
            _ => bands.push(Band { beta_lo: target, beta_hi: target, count: Count::Finite(count) }),
        }
    }
    Ok(SolvabilityReport { alpha, regime, solvable, multiplicity: bands, minimizer: curve.minimizer, sweep: spec })
}
