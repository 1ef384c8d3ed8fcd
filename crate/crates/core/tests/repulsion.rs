use glab_core::disorder::DisorderRealization;
use glab_core::lattice::BoxGeometry;
use glab_core::lattice::ScalarField;
use glab_core::spectral::SpectralPlan;
use glab_core::stats::repulsion::*;

fn opts(estimator: Estimator, replicates: usize) -> RepulsionOptions {
    RepulsionOptions {
        shrink: 0.5,
        estimator,
        replicates,
        seed: 5,
        shift: None,
    }
}

#[test]
fn single_site_wall_is_one_half() {
    let g = BoxGeometry::new(2, 1).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let rec = repulsion_probability(&plan, &DisorderRealization::zero(g), &opts(Estimator::Plain, 20_000)).unwrap();
    assert_eq!(rec.inner_radius, 0);
    assert!((rec.estimate - 0.5).abs() < 3.0 * rec.se, "{rec:?}");
}

#[test]
fn estimators_agree_on_a_small_box() {
    let g = BoxGeometry::new(2, 2).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let eta = DisorderRealization::zero(g);
    let plain = repulsion_probability(&plan, &eta, &opts(Estimator::Plain, 40_000)).unwrap();
    let shifted = repulsion_probability(&plan, &eta, &opts(Estimator::MeanShift, 40_000)).unwrap();
    assert!(plain.resolved && shifted.resolved);
    assert!(plain.agrees_with(&shifted, 3.0), "{plain:?} {shifted:?}");
    assert!(shifted.se < plain.se);
}

#[test]
fn zero_hits_give_an_upper_bound() {
    let g = BoxGeometry::new(3, 3).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let mut o = opts(Estimator::Plain, 50);
    o.shrink = 0.1;
    let rec = repulsion_probability(&plan, &DisorderRealization::zero(g), &o).unwrap();
    assert_eq!(rec.hits, 0);
    assert!(rec.log_estimate.is_none());
    assert!(rec.upper_bound.unwrap() > 0.0);
    assert!(!rec.warnings.is_empty());
}

#[test]
fn default_shift_lifts_the_inner_box() {
    let g = BoxGeometry::new(2, 4).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let m = ScalarField::<f64>::zeros(g);
    let h = default_shift(&plan, &m, 0.5).unwrap();
    let inner = g.inner_box_sites(0.5).unwrap();
    let min = inner.iter().map(|s| h.get(s).unwrap()).fold(f64::INFINITY, f64::min);
    assert!((min - 1.0).abs() < 1e-12);
}
