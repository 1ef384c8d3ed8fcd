use std::sync::Arc;

use glab_core::green::*;
use glab_core::lattice::{BoxGeometry, ScalarField};
use glab_core::oracle::dense;
use glab_core::spectral::SpectralPlan;

#[test]
fn one_dimensional_examples() {
    let acc = GreenAccessor::<f64>::for_box(BoxGeometry::new(1, 5).unwrap());
    assert_eq!(acc.green_finite(&[0], &[3]).unwrap(), 3.0);
    let acc1 = GreenAccessor::<f64>::for_box(BoxGeometry::new(1, 1).unwrap());
    assert_eq!(acc1.green_finite(&[0], &[0]).unwrap(), 2.0);
    assert!(acc1.green_finite(&[2], &[0]).is_err());
}

#[test]
fn matches_dense_inverse_and_is_symmetric() {
    let g = BoxGeometry::new(2, 3).unwrap();
    let acc = GreenAccessor::<f64>::for_box(g);
    let inv = dense::green_matrix(&g);
    let sites: Vec<_> = g.sites().collect();
    for (i, x) in sites.iter().enumerate() {
        for (j, y) in sites.iter().enumerate() {
            let v = acc.green_finite(x, y).unwrap();
            assert!((v - inv[(i, j)]).abs() < 1e-10);
            assert!((v - acc.green_finite(y, x).unwrap()).abs() < 1e-10);
            assert!(v >= 0.0);
        }
    }
}

#[test]
fn delta_identity() {
    let g = BoxGeometry::new(3, 3).unwrap();
    let acc = GreenAccessor::<f64>::for_box(g);
    let col = acc.column(&[1, -2, 0]).unwrap();
    let back = acc.plan().apply_neg_laplacian(&col).unwrap();
    let delta = ScalarField::<f64>::delta(g, &[1, -2, 0]).unwrap();
    for (a, b) in back.values().iter().zip(delta.values()) {
        assert!((a - b).abs() < 1e-10);
    }
}

#[test]
fn monotone_in_box_size() {
    let small = GreenAccessor::<f64>::for_box(BoxGeometry::new(3, 2).unwrap());
    let large = GreenAccessor::<f64>::for_box(BoxGeometry::new(3, 4).unwrap());
    let small_box = BoxGeometry::new(3, 2).unwrap();
    for y in small_box.sites() {
        let a = small.green_finite(&[0, 0, 0], &y).unwrap();
        let b = large.green_finite(&[0, 0, 0], &y).unwrap();
        assert!(a <= b + 1e-14);
    }
}

#[test]
fn cache_is_bounded() {
    let g = BoxGeometry::new(2, 2).unwrap();
    let acc = GreenAccessor::<f64>::with_capacity(Arc::new(SpectralPlan::new(g)), 3);
    for s in g.sites().take(10) {
        acc.column(&s).unwrap();
    }
    assert_eq!(acc.cached_columns(), 3);
}

#[test]
fn square_sum_two_ways() {
    for (d, n) in [(3usize, 4usize), (5, 2), (2, 6)] {
        let g = BoxGeometry::new(d, n).unwrap();
        let acc = GreenAccessor::<f64>::for_box(g);
        let direct = acc.origin_column_square_sum().unwrap();
        let spectral = origin_spectral_sum(&g, 2);
        assert!((direct - spectral).abs() < 1e-8 * spectral);
        let g00 = acc.green_finite(&vec![0; d], &vec![0; d]).unwrap();
        assert!((g00 - origin_spectral_sum(&g, 1)).abs() < 1e-10);
    }
}

#[test]
fn one_dimensional_variance_is_n_plus_one() {
    for n in [2usize, 4, 8, 50] {
        let g = BoxGeometry::new(1, n).unwrap();
        assert!((origin_spectral_sum(&g, 1) - (n + 1) as f64).abs() < 1e-9);
    }
}
