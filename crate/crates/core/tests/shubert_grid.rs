use grga::benchmarks::{grid_oracle, shubert, DiscretizedBox, OracleSummary, SHUBERT_3D_MAX};

#[test]
fn known_peak_cell_is_in_top_tenth_percent() {
    let bounds = DiscretizedBox::<f64>::shubert_default();
    let point = bounds.decode(&[0, 7, 9]).unwrap();
    let expected = [-10.0, -10.0 + 7.0 * 20.0 / 60.0, -7.0];
    for (a, b) in point.iter().zip(expected) {
        assert!((a - b).abs() < 1e-12);
    }
    let oracle = grid_oracle(&bounds, shubert::<f64>).unwrap();
    assert_eq!(oracle.num_cells(), 216_000);
    let value = shubert(&[-23.0 / 3.0, -7.0, -7.0]);
    assert!(
        oracle.fraction_above(value) < 0.001,
        "fraction above {}",
        oracle.fraction_above(value)
    );
    assert!(oracle.best_value <= SHUBERT_3D_MAX + 1e-6);
}

#[test]
fn oracle_summary_round_trips_as_json() {
    let bounds = DiscretizedBox::<f64>::cube(3, -10.0, 10.0, 12).unwrap();
    let oracle = grid_oracle(&bounds, shubert::<f64>).unwrap();
    let summary = oracle.summary(&[0.5, 0.99]);
    let back: OracleSummary<f64> = serde_json::from_str(&serde_json::to_string(&summary).unwrap()).unwrap();
    assert_eq!(back, summary);
    assert_eq!(summary.quantiles[1].value, oracle.quantile(0.99));
    assert!(summary.quantiles[0].value <= summary.quantiles[1].value);
}

#[test]
fn f32_evaluator_tracks_f64() {
    let x = [-7.7f64, 5.1, 0.3];
    let a = shubert::<f64>(&x);
    let b = shubert::<f32>(&x.map(|v| v as f32));
    assert!((a - b as f64).abs() < 1e-2 * a.abs().max(1.0));
}
