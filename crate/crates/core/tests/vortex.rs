use liouville_core::vortex::{
    characteristic_polynomial, find_points, newton_oracle, polynomial_residual, residual, set_distance,
    symmetric_functions, NewtonControl, VortexParams,
};
use liouville_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn admissible(max_alpha: u32) -> Vec<VortexParams> {
    let mut out = Vec::new();
    for a1 in 1..=max_alpha {
        for a2 in a1.saturating_sub(1).max(1)..=(a1 + 1).min(max_alpha) {
            for m in 1..=a1.min(a2) as usize {
                out.push(VortexParams::new(a1, a2, m).unwrap());
            }
        }
    }
    out
}

#[test]
fn symmetric_function_examples() {
    assert_eq!(symmetric_functions(&VortexParams::new(1, 1, 1).unwrap()), vec![1.0, 0.0]);
    let s = symmetric_functions(&VortexParams::new(2, 2, 2).unwrap());
    assert_eq!(s[..2], [1.0, 0.0]);
    assert!((s[2] - 1.0 / 3.0).abs() < 1e-15);
    let s = symmetric_functions(&VortexParams::new(2, 1, 1).unwrap());
    assert!((s[1] + 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn polynomial_examples() {
    let p = VortexParams::new(2, 2, 2).unwrap();
    let poly = characteristic_polynomial(&symmetric_functions(&p), &p);
    assert!((poly[0] - 2.0).abs() < 1e-14 && poly[1].abs() < 1e-14 && (poly[2] - 6.0).abs() < 1e-14);
    let p = VortexParams::new(1, 1, 1).unwrap();
    assert_eq!(characteristic_polynomial(&symmetric_functions(&p), &p), vec![0.0, 2.0]);
    let p = VortexParams::new(2, 1, 1).unwrap();
    let poly = characteristic_polynomial(&symmetric_functions(&p), &p);
    assert!((poly[0] - 1.0).abs() < 1e-14 && (poly[1] - 3.0).abs() < 1e-14);
}

#[test]
fn point_examples() {
    let cfg = find_points(&VortexParams::new(1, 1, 1).unwrap()).unwrap();
    assert_eq!(cfg.points.len(), 1);
    assert!(cfg.points[0].norm() < 1e-15 && cfg.residual < 1e-15);

    let cfg = find_points(&VortexParams::new(2, 2, 2).unwrap()).unwrap();
    let s = 1.0 / 3f64.sqrt();
    assert!(set_distance(&cfg.points, &[c(0.0, -s), c(0.0, s)]) < 1e-12);
    assert!(cfg.residual <= 1e-12);
    assert!(cfg.points[0].im < cfg.points[1].im);

    let cfg = find_points(&VortexParams::new(2, 1, 1).unwrap()).unwrap();
    assert!((cfg.points[0] - c(-1.0 / 3.0, 0.0)).norm() < 1e-12);
    assert!(cfg.residual <= 1e-12);
}

#[test]
fn newton_examples() {
    let ctrl = NewtonControl::default();
    let p = VortexParams::new(2, 2, 2).unwrap();
    let z = newton_oracle(&p, &[c(0.5, 0.5), c(-0.5, -0.5)], &ctrl).unwrap();
    assert!(set_distance(&z, &find_points(&p).unwrap().points) < 1e-8);

    let p = VortexParams::new(1, 1, 1).unwrap();
    let z = newton_oracle(&p, &[c(0.2, 0.0)], &ctrl).unwrap();
    assert!(z[0].norm() < 1e-12);

    let p = VortexParams::new(3, 3, 3).unwrap();
    let cfg = find_points(&p).unwrap();
    let start: Vec<_> = cfg.points.iter().enumerate().map(|(k, z)| z + c(0.01 * k as f64, -0.02)).collect();
    let z = newton_oracle(&p, &start, &ctrl).unwrap();
    assert!(set_distance(&z, &cfg.points) < 1e-8);
}

#[test]
fn invariants_over_admissible_range() {
    for p in admissible(6) {
        let cfg = find_points(&p).unwrap();
        assert!(cfg.residual <= 1e-8, "{p:?}");
        assert_eq!(cfg.sym[0], 1.0);
        let expect = (p.alpha2 - p.alpha1) * p.m as f64 / (p.alpha1 + p.alpha2 - 2.0 * (p.m as f64 - 1.0));
        assert!((cfg.sym[1] - expect).abs() < 1e-14);
        let sum: Complex64 = cfg.points.iter().sum();
        assert!((sum - c(cfg.sym[1], 0.0)).norm() < 1e-10, "{p:?}");
        assert!(polynomial_residual(&cfg) < 1e-8 * p.leading());
        for z in &cfg.points {
            assert!((z - 1.0).norm() > 1e-6 && (z + 1.0).norm() > 1e-6);
            // conjugate closure
            assert!(cfg.points.iter().any(|w| (w - z.conj()).norm() < 1e-10), "{p:?}");
            if p.alpha1 == p.alpha2 {
                assert!(cfg.points.iter().any(|w| (w + z).norm() < 1e-10), "{p:?}");
            }
        }
        for w in cfg.points.windows(2) {
            assert!((w[0].re, w[0].im) <= (w[1].re, w[1].im));
        }
    }
}

#[test]
fn newton_from_random_starts() {
    let ctrl = NewtonControl::default();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for p in admissible(5) {
        let cfg = find_points(&p).unwrap();
        let (mut converged, mut diverged) = (0, 0);
        for _ in 0..20 {
            let start: Vec<_> = (0..p.m).map(|_| c(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
            match newton_oracle(&p, &start, &ctrl) {
                Ok(z) => {
                    assert!(set_distance(&z, &cfg.points) <= 1e-7, "{p:?} from {start:?}: {z:?}");
                    converged += 1;
                }
                Err(Error::NewtonDiverged { .. }) => diverged += 1,
                Err(e) => panic!("{p:?}: {e}"),
            }
        }
        assert_eq!(converged + diverged, 20);
        assert!(converged > 0, "{p:?} never converged");
    }
}

#[test]
fn extrapolated_strengths_are_flagged() {
    let p = VortexParams::extrapolated(2.5, 2.5, 2).unwrap();
    assert!(p.extrapolation);
    let cfg = find_points(&p).unwrap();
    assert!(residual(&p, &cfg.points) < 1e-8);
}

proptest! {
    #[test]
    fn residual_and_sum(a1 in 1u32..8, d in 0u32..2, m_frac in 0.0f64..1.0) {
        let a2 = a1 + d;
        let m = 1 + (m_frac * a1 as f64) as usize;
        let m = m.min(a1 as usize);
        let p = VortexParams::new(a1, a2, m).unwrap();
        let cfg = find_points(&p).unwrap();
        prop_assert!(cfg.residual <= 1e-8);
        let sum: Complex64 = cfg.points.iter().sum();
        prop_assert!((sum.re - cfg.sym[1]).abs() < 1e-10 && sum.im.abs() < 1e-10);
        prop_assert!(cfg.poly.iter().all(|x| x.is_finite()));
    }

    #[test]
    fn swapping_strengths_reflects(a1 in 1u32..8, m_frac in 0.0f64..1.0) {
        let m = (1 + (m_frac * a1 as f64) as usize).min(a1 as usize);
        let p = find_points(&VortexParams::new(a1, a1 + 1, m).unwrap()).unwrap();
        let q = find_points(&VortexParams::new(a1 + 1, a1, m).unwrap()).unwrap();
        let reflected: Vec<_> = q.points.iter().map(|z| -z).collect();
        prop_assert!(set_distance(&p.points, &reflected) < 1e-10);
    }
}
