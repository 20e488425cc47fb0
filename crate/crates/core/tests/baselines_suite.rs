// SPDX-License-Identifier: MIT OR Apache-2.0

use kzimpute_core::corruption::{corrupt, CorruptionPlan};
use kzimpute_core::metrics::score;
use kzimpute_core::{impute, FillNote, ImputerSpec, Method, TimeSeries};
use proptest::prelude::*;

const NA: f64 = f64::NAN;

fn run(method: Method, v: &[f64]) -> kzimpute_core::ImputationOutcome {
    impute(
        &ImputerSpec::new(method),
        &TimeSeries::new(v.to_vec()).unwrap(),
    )
    .unwrap()
}

fn bits(s: &TimeSeries) -> Vec<u64> {
    s.values().iter().map(|v| v.to_bits()).collect()
}

#[test]
fn boundary_fallbacks_are_noted() {
    let f = run(Method::ForwardFill, &[NA, 7.0, 8.0]);
    assert_eq!(f.series.values(), &[7.0, 7.0, 8.0]);
    assert_eq!(
        f.notes,
        vec![FillNote::ForwardFillLeadingFallback { cells: 1 }]
    );
    let b = run(Method::BackwardFill, &[1.0, NA, NA]);
    assert_eq!(b.series.values(), &[1.0, 1.0, 1.0]);
    assert_eq!(
        b.notes,
        vec![FillNote::BackwardFillTrailingFallback { cells: 2 }]
    );
}

#[test]
fn interpolators_on_known_shapes() {
    let lin = run(Method::LinearInterpolate, &[NA, 1.0, NA, NA, 4.0, NA]);
    assert_eq!(lin.series.values(), &[1.0, 1.0, 2.0, 3.0, 4.0, 4.0]);
    let cubic: Vec<f64> = (0..8)
        .map(|i| {
            let x = i as f64;
            x * x * x - 2.0 * x + 1.0
        })
        .collect();
    let mut gappy = cubic.clone();
    gappy[3] = NA;
    gappy[6] = NA;
    let s = run(Method::SplineInterpolate, &gappy);
    for (a, b) in s.series.values().iter().zip(&cubic) {
        assert!((a - b).abs() < 1e-9, "{a} vs {b}");
    }
    let few = run(Method::SplineInterpolate, &[1.0, NA, 3.0]);
    assert_eq!(few.series.values(), &[1.0, 2.0, 3.0]);
    assert!(matches!(
        few.notes[0],
        FillNote::SplineFellBackToLinear { .. }
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn mean_knn_and_iterative_coincide(seed in any::<u64>(), n in 20usize..200, fraction in 0.05..0.4f64) {
        let clean = TimeSeries::new((0..n).map(|i| ((i as f64) * 0.21 + seed as f64 % 7.0).sin() * 3.0).collect()).unwrap();
        let pair = corrupt(&clean, &CorruptionPlan::mixed(seed, fraction)).unwrap();
        let mean = impute(&ImputerSpec::new(Method::Mean), &pair.corrupted).unwrap();
        let knn = impute(&ImputerSpec::new(Method::Knn), &pair.corrupted).unwrap();
        let iter = impute(&ImputerSpec::new(Method::Iterative), &pair.corrupted).unwrap();
        prop_assert_eq!(bits(&mean.series), bits(&knn.series));
        prop_assert_eq!(bits(&mean.series), bits(&iter.series));
        let rows: Vec<_> = [&mean, &knn, &iter]
            .iter()
            .map(|o| score(&clean, &pair.truth, o, 0.0, 50).unwrap())
            .collect();
        prop_assert_eq!(rows[0], rows[1]);
        prop_assert_eq!(rows[0], rows[2]);
    }

    #[test]
    fn non_kz_methods_complete_without_touching_present_cells(seed in any::<u64>(), m in 1usize..9) {
        let clean = TimeSeries::new((0..60).map(|i| (i as f64 * 0.4).cos() + (seed % 5) as f64).collect()).unwrap();
        let pair = corrupt(&clean, &CorruptionPlan::mixed(seed, 0.3)).unwrap();
        let method = Method::ALL[m];
        prop_assume!(method != Method::Kz);
        let out = impute(&ImputerSpec::new(method), &pair.corrupted).unwrap();
        prop_assert!(out.series.is_complete());
        for (i, v) in pair.corrupted.values().iter().enumerate() {
            if !v.is_nan() {
                prop_assert_eq!(v.to_bits(), out.series.values()[i].to_bits());
            }
        }
    }
}
