// SPDX-License-Identifier: MIT OR Apache-2.0

mod support;

use kzimpute_core::kz::{impute_gap_2, impute_gap_3, impute_gap_5_plus};
use kzimpute_core::{kz_impute, scan_gaps, KzConfig, TimeSeries};
use rand::Rng;
use support::gen::{gappy, rng, scale_of, to_nan};
use support::oracle::{close, naive_kz};

const NA: f64 = f64::NAN;

fn kz(v: &[f64]) -> Vec<f64> {
    kz_impute(&TimeSeries::new(v.to_vec()).unwrap(), &KzConfig::default())
        .unwrap()
        .series
        .into_values()
}

#[test]
fn agrees_with_naive_rules_on_random_series() {
    let mut r = rng(2024);
    for case in 0..1000 {
        let len = r.random_range(12..=200);
        let input = gappy(&mut r, len, 5);
        let max_gap = if case % 4 == 0 {
            r.random_range(1..=7)
        } else {
            5
        };
        let expected = naive_kz(&input, max_gap);
        let got = kz_impute(
            &TimeSeries::new(to_nan(&input)).unwrap(),
            &KzConfig::new(max_gap).unwrap(),
        )
        .unwrap()
        .series
        .into_values();
        let scale = scale_of(&input);
        for (i, (e, g)) in expected.iter().zip(&got).enumerate() {
            match e {
                Some(e) => assert!(
                    close(*e, *g, 1e-9, scale),
                    "case {case} cell {i}: {e} vs {g}"
                ),
                None => assert!(g.is_nan(), "case {case} cell {i} should stay missing"),
            }
        }
    }
}

#[test]
fn long_middle_gaps_agree_when_the_ceiling_is_raised() {
    let mut r = rng(7);
    for _ in 0..200 {
        let len = r.random_range(30..=120);
        let input = gappy(&mut r, len, 12);
        let expected = naive_kz(&input, 12);
        let got = kz_impute(
            &TimeSeries::new(to_nan(&input)).unwrap(),
            &KzConfig::new(12).unwrap(),
        )
        .unwrap()
        .series
        .into_values();
        let scale = scale_of(&input);
        for (e, g) in expected.iter().zip(&got) {
            if let Some(e) = e {
                assert!(close(*e, *g, 1e-9, scale));
            }
        }
    }
}

#[test]
fn hand_computed_vectors() {
    let tol = 1e-12;
    let out = kz(&[NA, NA, 4.0, 5.0, 6.0, 7.0]);
    assert!(
        (out[1] - 5.5).abs() < tol && (out[0] - 5.125).abs() < tol,
        "{out:?}"
    );

    let out = kz(&[1.0, 2.0, 3.0, NA, NA, 4.0, 5.0, 6.0]);
    assert!((out[3] - 2.0).abs() < tol && (out[4] - 5.0).abs() < tol);

    // triple middle: 5 preceding average to 3, 5 following to 8
    let out = kz(&[
        1.0, 2.0, 3.0, 4.0, 5.0, NA, NA, NA, 6.0, 7.0, 8.0, 9.0, 10.0,
    ]);
    assert!((out[5] - 3.0).abs() < tol && (out[6] - 5.5).abs() < tol && (out[7] - 8.0).abs() < tol);

    let mut v = vec![0.0; 5];
    v.extend([NA; 5]);
    v.extend([8.0; 5]);
    let out = kz(&v);
    for (g, want) in out[5..10].iter().zip([0.0, 2.0, 4.0, 6.0, 8.0]) {
        assert!((g - want).abs() < tol);
    }

    let mut v = vec![1.0; 5];
    v.extend([NA; 4]);
    v.extend([9.0; 5]);
    assert_eq!(&kz(&v)[5..9], &[1.0, 1.0, 9.0, 9.0]);
}

#[test]
fn sized_entry_points_match_the_driver() {
    let s = TimeSeries::new(vec![1.0, 2.0, 3.0, NA, NA, 4.0, 5.0, 6.0]).unwrap();
    let gap = scan_gaps(&s).unwrap()[0];
    assert_eq!(impute_gap_2(&s, &gap).unwrap(), vec![2.0, 5.0]);
    assert!(impute_gap_3(&s, &gap).is_err());
    assert!(impute_gap_5_plus(&s, &gap).is_err());
}
