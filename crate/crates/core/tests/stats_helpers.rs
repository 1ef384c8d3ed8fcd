use glab_core::stats::*;

#[test]
fn quantiles_interpolate() {
    let xs = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(quantile(&xs, 0.5), 3.0);
    assert_eq!(quantile(&xs, 0.0), 1.0);
    assert_eq!(quantile(&xs, 1.0), 5.0);
    assert!((quantile(&xs, 0.05) - 1.2).abs() < 1e-12);
}

#[test]
fn wilson_interval_contains_estimate() {
    let (lo, hi) = wilson_interval(30, 100, 1.96);
    assert!(lo < 0.3 && 0.3 < hi);
    let (lo0, hi0) = wilson_interval(0, 100, 1.96);
    assert_eq!(lo0, 0.0);
    assert!(hi0 > 0.0 && hi0 < 0.05);
}

#[test]
fn exact_line_is_recovered() {
    let x = [1.0, 2.0, 3.0];
    let y = [1.0, 3.0, 5.0];
    let fit = least_squares(&x, &y).unwrap();
    assert!((fit.slope - 2.0).abs() < 1e-12);
    assert!((fit.intercept + 1.0).abs() < 1e-12);
    assert!(fit.residuals.iter().all(|r| r.abs() < 1e-12));
    assert!(least_squares(&[1.0, 1.0], &[0.0, 1.0]).is_none());
}
