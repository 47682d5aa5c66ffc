//! Mass unit conversions.
//!
//! Three normalizations appear side by side:
//!
//! | unit  | meaning                                  | one bubble |
//! |-------|------------------------------------------|------------|
//! | rho   | `int K e^v dx` over the plane            | `8 pi`     |
//! | beta  | `int_0^inf K e^v r dr = rho / (2 pi)`    | `4`        |
//! | sigma | local mass `(1/2pi) int h e^u`, = beta   | `4`        |
//!
//! Everything inside the crate is computed in beta units; conversion happens
//! only at the boundary.

use core::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum MassUnit {
    Rho,
    Beta,
}

pub fn rho_to_beta(rho: f64) -> f64 {
    rho / (2.0 * PI)
}

pub fn beta_to_rho(beta: f64) -> f64 {
    2.0 * PI * beta
}

/// Local masses share the beta normalization.
pub fn sigma_to_beta(sigma: f64) -> f64 {
    sigma
}

/// Express a beta-unit mass in `unit`.
pub fn from_beta(beta: f64, unit: MassUnit) -> f64 {
    match unit {
        MassUnit::Beta => beta,
        MassUnit::Rho => beta_to_rho(beta),
    }
}

/// Convert a mass given in `unit` into beta units.
pub fn to_beta(value: f64, unit: MassUnit) -> f64 {
    match unit {
        MassUnit::Beta => value,
        MassUnit::Rho => rho_to_beta(value),
    }
}
