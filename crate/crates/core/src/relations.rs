//! Closed-form mass relations and the height formula.
//!
//! Masses follow the conventions of [`crate::units`]: `sigma` and `m_v`
//! are in beta units (`rho / 2 pi`) unless a name says otherwise.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[allow(unused_imports)]
use num_traits::Float;

use crate::quad;
use crate::{Error, Result};

/// Local masses at the original and at the rescaled scale.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MassPair {
    pub sigma_u: f64,
    pub m_v: f64,
}

impl MassPair {
    pub fn new(sigma_u: f64, m_v: f64) -> Result<Self> {
        if !(m_v >= 0.0 && sigma_u >= m_v) {
            return Err(Error::InvalidParams(alloc::format!("need sigma_u >= m_v >= 0, got ({sigma_u}, {m_v})")));
        }
        Ok(Self { sigma_u, m_v })
    }
}

/// `sigma^2 - m^2 - 4(1 + alpha1 + alpha2)(sigma - m)`.
pub fn pohozaev_defect(sigma_u: f64, m_v: f64, alpha1: f64, alpha2: f64) -> f64 {
    sigma_u * sigma_u - m_v * m_v - 4.0 * (1.0 + alpha1 + alpha2) * (sigma_u - m_v)
}

/// The two roots `{m_v, 4(1 + alpha1 + alpha2) - m_v}` of the Pohozaev
/// relation as a quadratic in `sigma_u` (for `m_v >= 0`).
pub fn pohozaev_sigma(m_v: f64, alpha1: f64, alpha2: f64) -> (f64, f64) {
    (m_v, 4.0 * (1.0 + alpha1 + alpha2) - m_v)
}

/// The roots coincide exactly at `m_v = 2(1 + alpha1 + alpha2)`.
pub fn pohozaev_double_root(alpha1: f64, alpha2: f64) -> f64 {
    2.0 * (1.0 + alpha1 + alpha2)
}

/// `[(m, 4m) for m in 1..=min(alpha1, alpha2)]`.
pub fn admissible_masses(alpha1: u32, alpha2: u32) -> Result<Vec<(u32, f64)>> {
    if alpha1 == 0 || alpha2 == 0 || alpha1.abs_diff(alpha2) > 1 {
        return Err(Error::InvalidParams(alloc::format!(
            "need positive strengths with |alpha1 - alpha2| <= 1, got ({alpha1}, {alpha2})"
        )));
    }
    Ok((1..=alpha1.min(alpha2)).map(|m| (m, 4.0 * m as f64)).collect())
}

/// `total / 8 pi` lies within `tol` of a positive integer.
pub fn quantized_mass_check(total: f64, tol: f64) -> bool {
    let k = total / (8.0 * PI);
    k.round() >= 1.0 && (k - k.round()).abs() <= tol
}

/// `4 pi (sum alpha_i + alpha / 2)`: the total mass forced when the cone
/// angles `alpha_i` and a further singularity of strength `alpha` coexist.
pub fn quantized_total(alphas: &[f64], alpha: f64) -> f64 {
    4.0 * PI * (alphas.iter().sum::<f64>() + 0.5 * alpha)
}

/// `rho` in `(0, 8 pi (1 - alpha^-)) U (8 pi (1 + alpha^+), inf)` with
/// `alpha^+- = max(0, +-alpha)`; boundaries excluded.
pub fn necessary_range_contains(rho: f64, alpha: f64) -> Result<bool> {
    if !(alpha > -1.0) || alpha == 0.0 {
        return Err(Error::InvalidParams(alloc::format!("need alpha > -1 and alpha != 0, got {alpha}")));
    }
    let (plus, minus) = (alpha.max(0.0), (-alpha).max(0.0));
    Ok((rho > 0.0 && rho < 8.0 * PI * (1.0 - minus)) || rho > 8.0 * PI * (1.0 + plus))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct BubbleSpec {
    pub lambda: f64,
    pub c: f64,
    pub q: [f64; 2],
}

impl BubbleSpec {
    pub fn new(lambda: f64, c: f64, q: [f64; 2]) -> Result<Self> {
        if !(c > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams(alloc::format!("bubble needs C > 0 and finite height, got C = {c}")));
        }
        Ok(Self { lambda, c, q })
    }
}

/// `ln( e^lambda / (1 + C e^lambda |y - q|^2)^2 )`.
pub fn bubble_value(spec: &BubbleSpec, y: [f64; 2]) -> f64 {
    let d2 = (y[0] - spec.q[0]).powi(2) + (y[1] - spec.q[1]).powi(2);
    spec.lambda - 2.0 * (spec.c * spec.lambda.exp() * d2).ln_1p()
}

/// `8 C int e^I` over the plane, by adaptive quadrature in `ln |y - q|`.
pub fn bubble_mass(spec: &BubbleSpec) -> f64 {
    let mu = spec.c * spec.lambda.exp();
    // centre of the profile in log-radius
    let x0 = -0.5 * mu.ln();
    let (v, _) = quad::adaptive(
        |x| {
            let r2 = (2.0 * x).exp();
            spec.lambda.exp() * r2 / (1.0 + mu * r2).powi(2)
        },
        x0 - 40.0,
        x0 + 40.0,
        1e-13 / spec.c,
        2000,
    );
    8.0 * spec.c * 2.0 * PI * v
}

/// Every symbol of the height formula for one collapse parameter `t`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct HeightInputs {
    pub rho: f64,
    pub m: u32,
    pub alpha1: u32,
    pub alpha2: u32,
    /// `int_M h e^{w_m}`.
    pub mass_integral: f64,
    /// Per-point constants `C_{t,i}`.
    pub c_ti: Vec<f64>,
    /// `|p_i - p_j|`.
    pub pairwise_dist: Vec<Vec<f64>>,
    /// Regular part of the Green function `R(y_i, y_j)`.
    pub green_regular: Vec<Vec<f64>>,
    /// `w(t p_i)`.
    pub w_at_points: Vec<f64>,
    pub t: f64,
}

impl HeightInputs {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: alloc::string::String| Err(Error::InvalidInputs(m));
        let m = self.m as usize;
        if !(self.rho > 8.0 * PI * self.m as f64) {
            return bad(alloc::format!("rho = {} must exceed 8 pi m = {}", self.rho, 8.0 * PI * self.m as f64));
        }
        if !(self.t > 0.0) {
            return bad(alloc::format!("t = {} must be positive", self.t));
        }
        if !(self.mass_integral > 0.0) {
            return bad(alloc::format!("mass integral {} must be positive", self.mass_integral));
        }
        if self.c_ti.len() != m || self.w_at_points.len() != m {
            return bad(alloc::format!("expected {m} per-point values"));
        }
        if self.c_ti.iter().any(|c| !(*c > 0.0)) {
            return bad(alloc::string::String::from("C_ti must be positive"));
        }
        for mat in [&self.pairwise_dist, &self.green_regular] {
            if mat.len() != m || mat.iter().any(|row| row.len() != m) {
                return bad(alloc::format!("expected {m} x {m} matrices"));
            }
        }
        for i in 0..m {
            for j in 0..m {
                let d = self.pairwise_dist[i][j];
                if d != self.pairwise_dist[j][i] || (i != j && !(d > 0.0)) {
                    return bad(alloc::string::String::from("distances must be symmetric and positive off the diagonal"));
                }
            }
        }
        Ok(())
    }
}

/// Coefficient of `ln t` in the height: `-(2 + 2 alpha1 + 2 alpha2 - 4 m)`.
pub fn height_log_coefficient(alpha1: f64, alpha2: f64, m: u32) -> f64 {
    -(2.0 + 2.0 * alpha1 + 2.0 * alpha2 - 4.0 * m as f64)
}

/// Height `lambda_{t,i}` of the `i`-th bubble:
///
/// ```text
/// lambda = -(2 + 2 alpha1 + 2 alpha2 - 4m) ln t + ln(rho / (rho - 8 pi m) * mass_integral)
///          - 2 ln C_i + sum_{j != i} 4 ln |p_i - p_j| - sum_j 8 pi R_ij - w_i
/// ```
///
/// The `C_i` term enters with a minus sign, the form solved for `lambda`.
pub fn predict_height(inputs: &HeightInputs, i: usize) -> Result<f64> {
    inputs.validate()?;
    if i >= inputs.m as usize {
        return Err(Error::InvalidInputs(alloc::format!("point index {i} out of range")));
    }
    let rho = inputs.rho;
    let m = inputs.m as usize;
    let mut lambda = height_log_coefficient(inputs.alpha1 as f64, inputs.alpha2 as f64, inputs.m) * inputs.t.ln()
        + (rho / (rho - 8.0 * PI * inputs.m as f64) * inputs.mass_integral).ln()
        - 2.0 * inputs.c_ti[i].ln();
    for j in 0..m {
        if j != i {
            lambda += 4.0 * inputs.pairwise_dist[i][j].ln();
        }
    }
    for j in 0..m {
        lambda -= 8.0 * PI * inputs.green_regular[i][j];
    }
    Ok(lambda - inputs.w_at_points[i])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pohozaev_examples() {
        assert_eq!(pohozaev_sigma(4.0, 1.0, 1.0), (4.0, 8.0));
        assert_eq!(pohozaev_sigma(0.0, 2.0, 2.0), (0.0, 20.0));
        assert_eq!(pohozaev_sigma(8.0, 2.0, 2.0), (8.0, 12.0));
        let d = pohozaev_double_root(1.0, 2.0);
        let (a, b) = pohozaev_sigma(d, 1.0, 2.0);
        assert_eq!(a, b);
    }

    #[test]
    fn admissible_lists() {
        assert_eq!(admissible_masses(1, 1).unwrap(), vec![(1, 4.0)]);
        assert_eq!(admissible_masses(2, 2).unwrap(), vec![(1, 4.0), (2, 8.0)]);
        assert_eq!(admissible_masses(3, 2).unwrap(), vec![(1, 4.0), (2, 8.0)]);
        assert!(admissible_masses(3, 1).is_err());
    }

    #[test]
    fn quantization() {
        assert!(quantized_mass_check(16.0 * PI, 1e-9));
        assert!(!quantized_mass_check(12.0 * PI, 1e-9));
        assert!(!quantized_mass_check(1e-3, 1e-9));
        let total = quantized_total(&[1.0, 1.0], 4.0);
        assert!((total - 16.0 * PI).abs() < 1e-12);
        assert!(quantized_mass_check(total, 1e-12));
    }

    #[test]
    fn necessary_range() {
        assert!(!necessary_range_contains(20.0 * PI, 2.0).unwrap());
        assert!(necessary_range_contains(4.0 * PI, 2.0).unwrap());
        assert!(!necessary_range_contains(8.0 * PI, -0.5).unwrap());
        assert!(necessary_range_contains(30.0 * PI, 2.0).unwrap());
        assert!(necessary_range_contains(1.0, 0.0).is_err());
    }

    #[test]
    fn bubble_examples() {
        let b = BubbleSpec::new(1.3, 0.7, [0.2, -0.1]).unwrap();
        assert_eq!(bubble_value(&b, [0.2, -0.1]), 1.3);
        let b = BubbleSpec::new(0.0, 0.125, [0.0, 0.0]).unwrap();
        assert!((bubble_value(&b, [2.0, 2.0]) - 0.25f64.ln()).abs() < 1e-15);
        assert!((bubble_mass(&b) - 8.0 * PI).abs() < 1e-9);
        assert!(BubbleSpec::new(0.0, 0.0, [0.0, 0.0]).is_err());
    }

    fn zero_inputs(t: f64) -> HeightInputs {
        let rho = 10.0 * PI;
        HeightInputs {
            rho,
            m: 1,
            alpha1: 1,
            alpha2: 1,
            mass_integral: (rho - 8.0 * PI) / rho,
            c_ti: vec![1.0],
            pairwise_dist: vec![vec![0.0]],
            green_regular: vec![vec![0.0]],
            w_at_points: vec![0.0],
            t,
        }
    }

    #[test]
    fn height_with_vanishing_corrections() {
        assert_eq!(height_log_coefficient(1.0, 1.0, 1), -2.0);
        let lambda = predict_height(&zero_inputs(0.1), 0).unwrap();
        assert!((lambda - 2.0 * 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn height_rejects_subcritical_rho() {
        let mut h = zero_inputs(0.1);
        h.rho = 8.0 * PI;
        assert!(matches!(predict_height(&h, 0), Err(Error::InvalidInputs(_))));
        let mut h = zero_inputs(0.1);
        h.t = 0.0;
        assert!(predict_height(&h, 0).is_err());
        assert!(predict_height(&zero_inputs(0.1), 1).is_err());
    }
}
