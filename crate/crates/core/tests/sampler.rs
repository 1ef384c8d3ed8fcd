use glab_core::disorder::BoundedLaw;
use glab_core::disorder::{sample_disorder, DisorderRealization, TailClass};
use glab_core::lattice::BoxGeometry;
use glab_core::sampler::*;
use glab_core::spectral::SpectralPlan;

#[test]
fn decomposition_is_exact() {
    let g = BoxGeometry::new(2, 3).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let eta = sample_disorder(g, TailClass::Gaussian { sigma2: 1.0 }, 3).unwrap();
    let s = sample_quenched(&plan, &eta, 8).unwrap();
    for i in 0..g.volume() {
        assert_eq!(s.phi.values()[i], s.gff_part.values()[i] + s.mean_part.values()[i]);
    }
    assert_eq!(s.disorder_seed, 3);
    assert_eq!(s.field_seed, 8);
}

#[test]
fn zero_disorder_is_the_free_field() {
    let g = BoxGeometry::new(3, 2).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let s = sample_quenched(&plan, &DisorderRealization::zero(g), 5).unwrap();
    assert_eq!(s.phi.values(), plan.sample_gff(5).values());
}

#[test]
fn annealed_draws_are_deterministic() {
    let g = BoxGeometry::new(2, 2).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let tail = TailClass::Bounded {
        range: 1.0,
        law: BoundedLaw::Rademacher,
    };
    let a = sample_annealed(&plan, tail, 1, 2).unwrap();
    let b = sample_annealed(&plan, tail, 1, 2).unwrap();
    assert_eq!(a.phi.values(), b.phi.values());
    let c = sample_annealed(&plan, tail, 2, 2).unwrap();
    assert_ne!(a.mean_part.values(), c.mean_part.values());
}

#[test]
fn raw_dump_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let g = BoxGeometry::new(2, 2).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let phi = plan.sample_gff(1);
    let header = DumpHeader {
        geometry: g,
        disorder_seed: 0,
        field_seed: 1,
        tail: None,
        component: "phi".into(),
        dtype: "f64le".into(),
        order: "row-major".into(),
    };
    let path = dir.path().join("phi.bin");
    write_raw_field(&path, &phi, &header).unwrap();
    assert_eq!(std::fs::metadata(&path).unwrap().len(), 8 * 25);
    let (back, h) = read_raw_field(&path).unwrap();
    assert_eq!(back.values(), phi.values());
    assert_eq!(h, header);
}
