//! Embedded Dormand–Prince 5(4) integrator for small fixed-size systems.

#[allow(unused_imports)]
use num_traits::Float;

use crate::{Error, Result};

/// Step-size controller settings.
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Initial step; `None` picks one from the local derivative scale.
    pub h_init: Option<f64>,
    /// Steps below this size abort with [`Error::DivergedStep`].
    pub h_min: f64,
    pub max_steps: usize,
    /// Bit `i` set: component `i` is controlled by `abs_tol` alone.
    pub abs_only: u64,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            h_init: None,
            h_min: 1e-14,
            max_steps: 2_000_000,
            abs_only: 0,
        }
    }
}

/// What the observer wants after seeing an accepted step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Flow {
    Continue,
    Stop,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Outcome<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub steps: usize,
    pub rejected: usize,
    /// True when the observer requested the stop (as opposed to reaching `t_end`).
    pub stopped: bool,
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

// difference between the 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])], h: f64) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += h * acc;
    }
    out
}

/// Integrate `y' = f(t, y)` from `t0` towards `t_end` (`t_end > t0`).
///
/// `observe(t, y, f(t, y))` runs at the initial point and after every accepted
/// step; returning [`Flow::Stop`] ends the integration there.
pub fn integrate<const N: usize, F, O>(
    mut f: F,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    ctrl: &StepControl,
    mut observe: O,
) -> Result<Outcome<N>>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    O: FnMut(f64, &[f64; N], &[f64; N]) -> Flow,
{
    let mut t = t0;
    let mut y = y0;
    let mut k1 = f(t, &y);
    if observe(t, &y, &k1) == Flow::Stop {
        return Ok(Outcome { t, y, steps: 0, rejected: 0, stopped: true });
    }

    let mut h = match ctrl.h_init {
        Some(h) => h,
        None => initial_step(&y, &k1, ctrl),
    }
    .min(t_end - t);

    let mut steps = 0;
    let mut rejected = 0;
    while t < t_end {
        if steps + rejected >= ctrl.max_steps {
            return Err(Error::DivergedStep { t });
        }
        if h < ctrl.h_min {
            return Err(Error::DivergedStep { t });
        }
        let last = t + h >= t_end;
        if last {
            h = t_end - t;
        }

        let k2 = f(t + C2 * h, &axpy(&y, &[(A21, &k1)], h));
        let k3 = f(t + C3 * h, &axpy(&y, &[(A31, &k1), (A32, &k2)], h));
        let k4 = f(t + C4 * h, &axpy(&y, &[(A41, &k1), (A42, &k2), (A43, &k3)], h));
        let k5 = f(
            t + C5 * h,
            &axpy(&y, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], h),
        );
        let k6 = f(
            t + h,
            &axpy(&y, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h),
        );
        let y_new = axpy(&y, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
        let k7 = f(t + h, &y_new);

        let mut err = 0.0;
        let mut finite = true;
        for i in 0..N {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sc = if ctrl.abs_only >> i & 1 == 1 {
                ctrl.abs_tol
            } else {
                ctrl.abs_tol + ctrl.rel_tol * y[i].abs().max(y_new[i].abs())
            };
            let r = e / sc;
            finite &= r.is_finite() && y_new[i].is_finite();
            err += r * r;
        }
        err = (err / N as f64).sqrt();

        if !finite {
            h *= 0.25;
            rejected += 1;
            continue;
        }

        if err <= 1.0 {
            t = if last { t_end } else { t + h };
            y = y_new;
            k1 = k7;
            steps += 1;
            if observe(t, &y, &k1) == Flow::Stop {
                return Ok(Outcome { t, y, steps, rejected, stopped: true });
            }
            let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= fac;
        } else {
            rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
    }
    Ok(Outcome { t, y, steps, rejected, stopped: false })
}

fn initial_step<const N: usize>(y: &[f64; N], dy: &[f64; N], ctrl: &StepControl) -> f64 {
    let mut d0 = 0.0;
    let mut d1 = 0.0;
    for i in 0..N {
        let sc = ctrl.abs_tol + ctrl.rel_tol * y[i].abs();
        d0 += (y[i] / sc) * (y[i] / sc);
        d1 += (dy[i] / sc) * (dy[i] / sc);
    }
    let (d0, d1) = ((d0 / N as f64).sqrt(), (d1 / N as f64).sqrt());
    let h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h.clamp(1e-8, 1e-1)
}

/// Cubic Hermite interpolation on `[t0, t1]` from values and derivatives.
pub fn hermite(t0: f64, t1: f64, y0: f64, y1: f64, d0: f64, d1: f64, t: f64) -> f64 {
    let h = t1 - t0;
    if h == 0.0 {
        return y0;
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1
}

/// Quintic Hermite interpolation from values, first and second derivatives.
pub fn hermite5(t0: f64, t1: f64, y: [f64; 2], d: [f64; 2], dd: [f64; 2], t: f64) -> f64 {
    let h = t1 - t0;
    if h == 0.0 {
        return y[0];
    }
    let s = (t - t0) / h;
    let s2 = s * s;
    let s3 = s2 * s;
    let s4 = s3 * s;
    let s5 = s4 * s;
    let h0 = 1.0 - 10.0 * s3 + 15.0 * s4 - 6.0 * s5;
    let h1 = s - 6.0 * s3 + 8.0 * s4 - 3.0 * s5;
    let h2 = 0.5 * (s2 - 3.0 * s3 + 3.0 * s4 - s5);
    let h3 = 0.5 * (s3 - 2.0 * s4 + s5);
    let h4 = -4.0 * s3 + 7.0 * s4 - 3.0 * s5;
    let h5 = 10.0 * s3 - 15.0 * s4 + 6.0 * s5;
    h0 * y[0] + h5 * y[1] + h * (h1 * d[0] + h4 * d[1]) + h * h * (h2 * dd[0] + h3 * dd[1])
}
