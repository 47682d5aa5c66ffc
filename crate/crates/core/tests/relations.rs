#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;

use liouville_core::relations::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn filled(m: usize, seed: u64) -> HeightInputs {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<[f64; 2]> = (0..m).map(|_| [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)]).collect();
    let dist = (0..m)
        .map(|i| (0..m).map(|j| ((pts[i][0] - pts[j][0]).powi(2) + (pts[i][1] - pts[j][1]).powi(2)).sqrt()).collect())
        .collect();
    let mut green = vec![vec![0.0; m]; m];
    for i in 0..m {
        for j in 0..=i {
            let r = rng.gen_range(-0.2..0.2);
            green[i][j] = r;
            green[j][i] = r;
        }
    }
    HeightInputs {
        rho: 8.0 * PI * m as f64 + rng.gen_range(0.5..5.0),
        m: m as u32,
        alpha1: m as u32 + 1,
        alpha2: m as u32,
        mass_integral: rng.gen_range(0.1..3.0),
        c_ti: (0..m).map(|_| rng.gen_range(0.2..2.0)).collect(),
        pairwise_dist: dist,
        green_regular: green,
        w_at_points: (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect(),
        t: rng.gen_range(0.01..0.5),
    }
}

/// Term-by-term re-evaluation in reverse summation order.
fn spreadsheet(h: &HeightInputs, i: usize) -> f64 {
    let mut terms = vec![
        -h.w_at_points[i],
        -2.0 * h.c_ti[i].ln(),
        (h.rho / (h.rho - 8.0 * PI * h.m as f64)).ln() + h.mass_integral.ln(),
        (2.0 + 2.0 * h.alpha1 as f64 + 2.0 * h.alpha2 as f64 - 4.0 * h.m as f64) * (1.0 / h.t).ln(),
    ];
    for j in (0..h.m as usize).rev() {
        terms.push(-8.0 * PI * h.green_regular[i][j]);
        if j != i {
            terms.push(4.0 * h.pairwise_dist[i][j].ln());
        }
    }
    terms.iter().rev().sum()
}

#[test]
fn height_matches_double_evaluation() {
    for (seed, m) in [(1, 1), (2, 2), (3, 3), (4, 4)] {
        let h = filled(m, seed);
        for i in 0..m {
            let a = predict_height(&h, i).unwrap();
            assert!((a - spreadsheet(&h, i)).abs() < 1e-12, "{a}");
        }
    }
}

#[test]
fn height_is_relabeling_invariant() {
    let h = filled(4, 9);
    let perm = [2, 0, 3, 1];
    let mut g = h.clone();
    for a in 0..4 {
        g.c_ti[a] = h.c_ti[perm[a]];
        g.w_at_points[a] = h.w_at_points[perm[a]];
        for b in 0..4 {
            g.pairwise_dist[a][b] = h.pairwise_dist[perm[a]][perm[b]];
            g.green_regular[a][b] = h.green_regular[perm[a]][perm[b]];
        }
    }
    for a in 0..4 {
        let x = predict_height(&g, a).unwrap();
        let y = predict_height(&h, perm[a]).unwrap();
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn height_validation() {
    let mut h = filled(2, 5);
    h.pairwise_dist[0][1] *= 1.01;
    assert!(predict_height(&h, 0).is_err());
    let mut h = filled(2, 5);
    h.c_ti[1] = 0.0;
    assert!(predict_height(&h, 0).is_err());
    let mut h = filled(2, 5);
    h.rho = 16.0 * PI;
    assert!(predict_height(&h, 0).is_err());
}

#[test]
fn bubble_normalization_over_random_draws() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..10 {
        let spec = BubbleSpec::new(
            rng.gen_range(-10.0..10.0),
            rng.gen_range(0.01..10.0),
            [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
        )
        .unwrap();
        assert!((bubble_mass(&spec) - 8.0 * PI).abs() < 1e-6, "{spec:?}");
    }
}

#[test]
fn admissible_masses_stay_below_concentration() {
    for a1 in 1..12u32 {
        for a2 in [a1, a1 + 1] {
            for (m, sigma) in admissible_masses(a1, a2).unwrap() {
                assert_eq!(sigma, 4.0 * m as f64);
                assert!(sigma < pohozaev_double_root(a1 as f64, a2 as f64));
            }
        }
    }
}

proptest! {
    #[test]
    fn pohozaev_roots_satisfy_relation(m_v in 0.0f64..50.0, a1 in 0.0f64..10.0, a2 in 0.0f64..10.0) {
        let (s1, s2) = pohozaev_sigma(m_v, a1, a2);
        let scale = 1.0 + s2.abs().max(m_v).powi(2);
        prop_assert!(pohozaev_defect(s1, m_v, a1, a2).abs() <= 1e-12 * scale);
        prop_assert!(pohozaev_defect(s2, m_v, a1, a2).abs() <= 1e-12 * scale);
    }

    #[test]
    fn double_root_iff_discriminant_vanishes(m_v in 0.0f64..50.0, a1 in 0.0f64..10.0, a2 in 0.0f64..10.0) {
        let (s1, s2) = pohozaev_sigma(m_v, a1, a2);
        // discriminant of sigma^2 - 4A sigma + (4A m - m^2) with A = 1 + a1 + a2
        let big_a = 1.0 + a1 + a2;
        let disc = 16.0 * big_a * big_a - 4.0 * (4.0 * big_a * m_v - m_v * m_v);
        prop_assert!((disc - (s2 - s1).powi(2)).abs() <= 1e-9 * (1.0 + disc.abs()));
        let (d1, d2) = pohozaev_sigma(pohozaev_double_root(a1, a2), a1, a2);
        prop_assert!((d1 - d2).abs() <= 1e-12 * (1.0 + d1.abs()));
    }

    #[test]
    fn bubble_peaks_at_centre(l in -5.0f64..5.0, c in 0.01f64..10.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
        let spec = BubbleSpec::new(l, c, [0.3, -0.2]).unwrap();
        prop_assert!(bubble_value(&spec, [x, y]) <= l);
    }

    #[test]
    fn quantization_on_multiples(k in 1u32..100, off in 0.01f64..0.49) {
        prop_assert!(quantized_mass_check(8.0 * PI * k as f64, 1e-9));
        prop_assert!(!quantized_mass_check(8.0 * PI * (k as f64 + off), 1e-3));
    }
}
