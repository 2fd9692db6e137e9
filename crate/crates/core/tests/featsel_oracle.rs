use std::path::PathBuf;

use grga::featsel::{load_dataset, Dataset, FeatSelFitness};
use ndarray::Array2;

fn fixture() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/featsel_fixture.csv")
}

/// Leave-fold-out 1-NN written against plain vectors.
fn reference_accuracy(x: &[Vec<f64>], y: &[usize], fold: &[usize], features: &[usize]) -> f64 {
    let mut correct = 0;
    for i in 0..x.len() {
        let mut candidates: Vec<(f64, usize)> = (0..x.len())
            .filter(|&j| fold[j] != fold[i])
            .map(|j| {
                let d = features
                    .iter()
                    .map(|&f| (x[i][f] - x[j][f]) * (x[i][f] - x[j][f]))
                    .sum::<f64>();
                (d.sqrt(), j)
            })
            .collect();
        candidates.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if y[candidates[0].1] == y[i] {
            correct += 1;
        }
    }
    correct as f64 / x.len() as f64
}

#[test]
fn accuracy_matches_independent_classifier() {
    let data = load_dataset(fixture(), "label").unwrap();
    let x: Vec<Vec<f64>> = data.features.rows().into_iter().map(|r| r.to_vec()).collect();
    let y = data.labels.clone();
    let fit = FeatSelFitness::new(data, 0.001, 5).unwrap();
    let fold = fit.fold_assignment().to_vec();
    for features in [vec![0], vec![0, 3, 7, 12, 18], vec![1, 2, 4], (0..30).collect()] {
        let want = reference_accuracy(&x, &y, &fold, &features);
        assert_eq!(fit.accuracy(&features), want, "{features:?}");
        let mut mask = vec![0; 30];
        features.iter().for_each(|&f| mask[f] = 1);
        let score = fit.score(&mask).unwrap();
        assert!((score - (want - 0.001 * features.len() as f64)).abs() < 1e-12);
    }
}

#[test]
fn separable_toy_scores_one_minus_penalty() {
    let rows = 12;
    let x = Array2::from_shape_fn((rows, 3), |(i, j)| {
        let class = (i % 2) as f64;
        match j {
            0 => class * 10.0 + i as f64 * 0.01,
            1 => class * -4.0 + (i as f64).sin() * 0.1,
            _ => class * 3.0,
        }
    });
    let labels = (0..rows).map(|i| i % 2).collect();
    let data = Dataset::new(
        x,
        labels,
        vec!["a".into(), "b".into(), "c".into()],
        vec!["p".into(), "q".into()],
    )
    .unwrap();
    let fit = FeatSelFitness::new(data, 0.01, 3).unwrap();
    assert!((fit.score(&[1, 1, 1]).unwrap() - (1.0 - 0.03)).abs() < 1e-12);
    assert!((fit.score(&[0, 0, 0]).unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn duplicated_noise_does_not_help() {
    let data = load_dataset(fixture(), "label").unwrap();
    let names = data.feature_names.clone();
    let copy = names.iter().position(|n| n == "noise_23_copy").unwrap();
    let original = names.iter().position(|n| n == "noise_23").unwrap();
    let fit = FeatSelFitness::new(data, 0.001, 5).unwrap();
    let base: Vec<usize> = (0..30)
        .map(|i| usize::from([0, 3, 7, 12, 18].contains(&i) || i == original))
        .collect();
    let mut with_copy = base.clone();
    with_copy[copy] = 1;
    assert!(fit.score(&with_copy).unwrap() <= fit.score(&base).unwrap());
}

#[test]
fn score_is_deterministic_and_penalty_is_exact() {
    let data = load_dataset(fixture(), "label").unwrap();
    let a = FeatSelFitness::new(data.clone(), 0.001, 5).unwrap();
    let b = FeatSelFitness::new(data, 0.002, 5).unwrap();
    let mask: Vec<usize> = (0..30).map(|i| i % 3 % 2).collect();
    let k = mask.iter().sum::<usize>() as f64;
    assert_eq!(a.score(&mask).unwrap(), a.score(&mask).unwrap());
    assert!((a.score(&mask).unwrap() - b.score(&mask).unwrap() - 0.001 * k).abs() < 1e-12);
}
