use std::f64::consts::PI;

use glab_core::error::GlabError;
use glab_core::green::heat::BoxKernel;
use glab_core::green::infinite::*;
use glab_core::oracle::lattice;

#[test]
fn asymptotic_constant_in_three_dimensions() {
    assert!((asymptotic_constant(3) - 3.0 / (2.0 * PI)).abs() < 1e-14);
}

#[test]
fn g_star_three_dimensions() {
    let est = green_infinite(3, &[0, 0, 0], 1e-5).unwrap();
    let oracle = lattice::green(3, &[0, 0, 0]);
    assert!(est.error_bound <= 1e-5);
    assert!(est.contains(oracle), "{est:?} vs {oracle}");
    assert!((est.value - 1.5164).abs() < 1e-4);
}

#[test]
fn dominates_every_finite_box() {
    let est = green_infinite(4, &[1, 0, 2, 0], 1e-7).unwrap();
    for r in [3usize, 8, 40] {
        let finite = BoxKernel::new(4, r).unwrap().green(&[0; 4], &[1, 0, 2, 0]).unwrap();
        assert!(finite <= est.estimate().upper());
    }
}

#[test]
fn rejects_recurrent_dimensions() {
    assert!(green_infinite(2, &[0, 0], 1e-3).is_err());
}

#[test]
fn multiplicities_cover_the_box() {
    for (d, l) in [(1usize, 3usize), (3, 2), (5, 3)] {
        let total: u64 = symmetry_classes(d, l).iter().map(|c| c.1).sum();
        assert_eq!(total, ((2 * l + 1) as u64).pow(d as u32));
    }
}

#[test]
fn single_term_sum_is_g_star_squared() {
    let g = green_infinite(5, &[0; 5], 1e-10).unwrap().value;
    let s = g_star_alpha(5, 2.0, SumRange::Finite(0), 1e-9).unwrap();
    assert!((s.value - g * g).abs() < 1e-8);
}

#[test]
fn finite_sum_matches_direct_enumeration() {
    // α = 1.5 gives exponent 3
    let s = g_star_alpha(5, 1.5, SumRange::Finite(2), 1e-9).unwrap();
    let mut direct = 0.0;
    let sites: Vec<Vec<i64>> = glab_core::lattice::BoxGeometry::new(5, 2).unwrap().sites().collect();
    let vals = green_infinite_many(5, &sites, 1e-11).unwrap();
    for v in vals {
        direct += v.value.powi(3);
    }
    assert!((s.value - direct).abs() < 1e-8, "{} vs {direct}", s.value);
}

#[test]
fn bilaplacian_matches_bessel_oracle() {
    let est = bilaplacian_infinite(5, 1e-5).unwrap();
    let oracle = lattice::bilaplacian_origin(5);
    assert!((est.value - oracle).abs() <= est.error.max(1e-5), "{est:?} vs {oracle}");
}

#[test]
fn partial_sums_increase_and_stay_below_full_sum() {
    let full = g_star_alpha(5, 2.0, SumRange::Infinite, 1e-5).unwrap();
    let table = GreenTable::compute(5, 8, 1e-9).unwrap();
    let mut prev = 0.0;
    for l in 1..=8 {
        let s = table.power_sum(2.0, l).value;
        assert!(s > prev);
        assert!(s < full.upper());
        prev = s;
    }
}

#[test]
fn divergent_sums_rejected() {
    assert!(matches!(
        g_star_alpha(4, 2.0, SumRange::Infinite, 1e-6),
        Err(GlabError::Divergent { .. })
    ));
    assert!(g_star_alpha(5, 1.0, SumRange::Infinite, 1e-6).is_err());
}

#[test]
fn non_integer_exponent_tail_completion() {
    let s = g_star_alpha(5, 1.5, SumRange::Infinite, 1e-5).unwrap();
    let partial = g_star_alpha(5, 1.5, SumRange::Finite(4), 1e-9).unwrap();
    assert!(s.value >= partial.value);
    assert!(s.error <= 1e-5);
}
