use std::f64::consts::PI;

use liouville_core::collapse::*;
use liouville_core::mass_curve::sweep;
use liouville_core::radial::IntegrationControl;

const SCHEDULE: [f64; 6] = [1e-2, 1e-4, 1e-6, 1e-8, 1e-10, 1e-12];

#[test]
fn exponent_examples() {
    assert!((a_pow_from_rho(12.6 * PI, 2.0) + 0.85).abs() < 1e-14);
    assert_eq!(a_pow_from_rho(12.0 * PI, 2.0), -1.0);
    assert!(!a_pow_admissible(-1.0));
    assert!(a_pow_from_rho(16.0 * PI, 2.0).abs() < 1e-15);
    assert!(!a_pow_admissible(0.0));
}

#[test]
fn window_from_sampled_minimizer() {
    let ctrl = IntegrationControl::default();
    let bar = sweep(2.0, -30.0, 30.0, 200, &ctrl).unwrap().beta_bar().unwrap();
    let (lo, hi) = admissible_rho_window(2.0, bar).unwrap();
    assert!((lo - 12.0 * PI).abs() < 1e-12);
    // baseline: 2 pi * 7.351637
    assert!((hi - 2.0 * PI * 7.351637).abs() < 1e-4);
    assert!(lo < 12.6 * PI && 12.6 * PI < hi);
    let (_, cap) = admissible_rho_window(2.9, 50.0).unwrap();
    assert_eq!(cap, 16.0 * PI);
}

#[test]
fn fixed_mass_branch_concentrates_unit_bubble() {
    let ctrl = IntegrationControl::default();
    let rho = 12.6 * PI;
    let report = run_collapse(2.0, rho, &SCHEDULE, &ctrl).unwrap();
    assert!((report.run.a_pow + 0.85).abs() < 1e-14);
    let mut last = f64::INFINITY;
    for (rec, plateau) in report.run.records.iter().zip(&report.plateau) {
        let s = rec.solved.as_ref().expect("bracket at every eps");
        assert!((2.0 * PI * s.beta_check - rho).abs() <= 1e-6 * rho);
        let p = plateau.unwrap();
        assert!(p >= 0.0 && p <= s.beta_check);
        // approaches 4 from above along the schedule
        assert!((p - 4.0).abs() < (last - 4.0).abs() && p > 4.0 - 1e-6);
        last = p;
        assert_eq!(rec.r_probe, rec.eps.powf(0.25));
    }
    let fin = report.final_plateau().unwrap();
    assert!((fin - 4.0).abs() < 0.05 * 4.0);
    assert!((fin - 4.0).abs() < 1e-5);
    let s = report.run.records.last().unwrap().solved.as_ref().unwrap();
    assert!((s.plateau_third - 4.0).abs() < (fin - 4.0).abs());
}

#[test]
fn limit_profile_matches_small_eps_solution() {
    let ctrl = IntegrationControl::default();
    let rho = 12.6 * PI;
    let w = limit_weight(2.0, rho).unwrap();
    assert_eq!((w.eps, w.p), (0.0, 0.0));
    assert!((w.q + 0.85).abs() < 1e-14);

    let eta = limit_profile(2.0, rho, &ctrl).unwrap();
    let last = eta.mass.last().unwrap();
    assert!(*last <= 2.3 + 1e-6);
    let report = run_collapse(2.0, rho, &SCHEDULE, &ctrl).unwrap();
    let xi = &report.run.records.last().unwrap().solved.as_ref().unwrap().solution;
    let mut sup: f64 = 0.0;
    for k in 0..=200 {
        let t = 0.1f64.ln() + 8.0 * k as f64 / 200.0;
        let recombined = eta.v_at(t) - 4.0 * t;
        sup = sup.max((recombined - xi.v_at(t)).abs());
    }
    assert!(sup < 0.05, "sup {sup}");
}
