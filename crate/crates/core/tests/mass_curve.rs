use liouville_core::mass_curve::*;
use liouville_core::radial::{linearized, IntegrationControl, WeightSpec};
use liouville_core::Error;

fn ctrl() -> IntegrationControl {
    IntegrationControl::default()
}

#[test]
fn endpoint_limits() {
    for alpha in [0.5, 1.0, 1.5, 2.0, 3.0] {
        let lo = sample(alpha, -30.0, &ctrl()).unwrap();
        let hi = sample(alpha, 30.0, &ctrl()).unwrap();
        assert!((lo.beta - 4.0 * (alpha + 1.0)).abs() < 0.05, "alpha {alpha}: {}", lo.beta);
        assert!((hi.beta - 4.0 * f64::max(alpha, 1.0)).abs() < 0.3, "alpha {alpha}: {}", hi.beta);
    }
}

#[test]
fn unit_strength_curve_is_decreasing_inside_bounds() {
    let curve = sweep(1.0, -30.0, 30.0, 200, &ctrl()).unwrap();
    assert!(curve.samples.iter().all(|s| s.converged && s.beta > 4.0 && s.beta < 8.0));
    assert!(curve.minimizer.is_none());
    assert!(matches!(find_min(&curve, &ctrl()), Err(Error::NoInteriorMin)));
    let fine = sweep(1.0, -30.0, 30.0, 200, &IntegrationControl::fine()).unwrap();
    assert_eq!(fine.monotonicity(), Some(-1));
}

#[test]
fn sub_unit_strengths_are_monotone() {
    for (alpha, sign) in [(0.3, -1), (0.7, -1), (-0.5, 1)] {
        let curve = sweep(alpha, -30.0, 30.0, 200, &IntegrationControl::fine()).unwrap();
        assert!(curve.minimizer.is_none(), "alpha {alpha}");
        assert_eq!(curve.monotonicity(), Some(sign), "alpha {alpha}");
    }
}

#[test]
fn minimizers_and_baselines() {
    // frozen from n = 800 sweeps
    for (alpha, beta_bar) in [(1.5, 5.852940), (2.0, 7.351637), (3.0, 9.864553)] {
        let curve = sweep(alpha, -30.0, 30.0, 200, &ctrl()).unwrap();
        let m = curve.minimizer.expect("interior minimum");
        assert!(m.beta_bar > 2.0 * (alpha + 1.0) && m.beta_bar < 4.0 * alpha);
        assert!((m.beta_bar - beta_bar).abs() < 1e-5, "alpha {alpha}: {}", m.beta_bar);
        assert!(m.beta_prime.abs() <= 1e-4);
        assert!(curve.converged().all(|s| s.beta >= m.beta_bar));
        let lin = linearized(&WeightSpec::pure(alpha), m.a_star, &ctrl()).unwrap();
        assert!(lin.beta_prime.abs() <= 1e-4);
        // image bounds for alpha > 1
        assert!(curve.converged().all(|s| s.beta > 2.0 * (alpha + 1.0) && s.beta < 4.0 * (alpha + 1.0)));
    }
}

#[test]
fn minimizer_is_stable_under_refinement() {
    let coarse = sweep(3.0, -30.0, 30.0, 200, &ctrl()).unwrap().minimizer.unwrap();
    let dense = sweep(3.0, -30.0, 30.0, 800, &ctrl()).unwrap().minimizer.unwrap();
    assert!((coarse.beta_bar - dense.beta_bar).abs() < 1e-4);
    assert!((coarse.a_star - dense.a_star).abs() < 1e-3);
}

#[test]
fn solve_for_mass_examples() {
    let curve = sweep(1.0, -30.0, 30.0, 200, &ctrl()).unwrap();
    let roots = solve_for_mass(1.0, 6.0, &curve, &ctrl()).unwrap();
    assert_eq!(roots.len(), 1);
    assert!((roots[0] - 12f64.ln()).abs() < 1e-4);

    let curve = sweep(2.0, -30.0, 30.0, 200, &ctrl()).unwrap();
    let bar = curve.beta_bar().unwrap();
    let roots = solve_for_mass(2.0, 0.5 * (bar + 8.0), &curve, &ctrl()).unwrap();
    assert!(roots.len() >= 2 && roots[1] - roots[0] > 1e-3);
    assert!(matches!(solve_for_mass(2.0, 5.0, &curve, &ctrl()), Err(Error::NoSolution { .. })));
    for target in [8.0, 10.0, 11.9] {
        assert_eq!(solve_for_mass(2.0, target, &curve, &ctrl()).unwrap().len(), 1, "target {target}");
    }
}

#[test]
fn classification() {
    let r = classify(0.5, &ctrl()).unwrap();
    assert_eq!(r.regime, Regime::SubUnit);
    assert!((r.solvable.lo - 4.0).abs() < 0.05 && (r.solvable.hi - 6.0).abs() < 0.05);
    assert!(r.multiplicity.iter().all(|b| b.count == Count::Finite(1)));

    let r = classify(2.0, &ctrl()).unwrap();
    assert_eq!(r.regime, Regime::SuperUnit);
    assert!(r.solvable.lo_closed && !r.solvable.hi_closed);
    assert!((r.solvable.hi - 12.0).abs() < 0.05);
    assert_eq!(r.count_at(10.0), Some(Count::Finite(1)));
    let mut lower = r.multiplicity.iter().filter(|b| b.beta_lo < 8.0 - 0.05);
    assert!(lower.clone().count() > 0 && lower.all(|b| matches!(b.count, Count::Finite(n) if n >= 2)));

    let r = classify(0.0, &ctrl()).unwrap();
    assert_eq!((r.solvable.lo, r.solvable.hi), (4.0, 4.0));
    assert_eq!(r.multiplicity[0].count, Count::Continuum);
}
