use approx::assert_relative_eq;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use glab_core::lattice::{BoxGeometry, ScalarField};
use glab_core::oracle::dense;
use glab_core::spectral::*;

fn random_field(g: BoxGeometry, seed: u64) -> ScalarField<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ScalarField::from_fn(g, |_| rng.gen_range(-1.0..1.0))
}

#[test]
fn sine_transform_is_an_involution() {
    for n in [1usize, 3, 7, 47, 49, 65, 129] {
        let t = SineTransform::<f64>::new(n);
        let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let mut y = x.clone();
        t.apply(&mut y);
        t.apply(&mut y);
        for (a, b) in x.iter().zip(&y) {
            assert!((a - b).abs() < 1e-12, "n={n}");
        }
    }
}

#[test]
fn fft_and_dense_routes_agree() {
    let n = 63;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut y = x.clone();
    SineTransform::<f64>::new(n).apply(&mut y);
    let s = (2.0 / (n + 1) as f64).sqrt();
    for k in 1..=n {
        let direct: f64 = (1..=n)
            .map(|j| s * x[j - 1] * (std::f64::consts::PI * (k * j) as f64 / (n + 1) as f64).sin())
            .sum();
        assert!((direct - y[k - 1]).abs() < 1e-12);
    }
}

#[test]
fn eigenvalue_extremes() {
    let g = BoxGeometry::new(3, 4).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let c = (std::f64::consts::PI / 10.0).cos();
    let min = plan.eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min);
    let max = plan.eigenvalues().iter().cloned().fold(0.0, f64::max);
    assert_relative_eq!(min, 1.0 - c, epsilon = 1e-14);
    assert_relative_eq!(max, 1.0 + c, epsilon = 1e-14);
    assert_relative_eq!(plan.eigenvalue(&[1, 1, 1]), 1.0 - c, epsilon = 1e-14);
    assert!(min > 0.0);
}

#[test]
fn stencil_examples() {
    let g = BoxGeometry::new(1, 1).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let f = ScalarField::from_values(g, vec![0.0, 1.0, 0.0]).unwrap();
    assert_eq!(plan.apply_laplacian(&f).unwrap().values(), &[0.5, -1.0, 0.5]);

    let g2 = BoxGeometry::new(2, 2).unwrap();
    let plan2 = SpectralPlan::<f64>::new(g2);
    let c = 3.0;
    let lap = plan2.apply_laplacian(&ScalarField::constant(g2, c)).unwrap();
    for s in g2.sites() {
        let missing = s.iter().filter(|x| x.abs() == 2).count() as f64;
        assert_relative_eq!(lap.get(&s).unwrap(), -c * missing / 4.0, epsilon = 1e-14);
    }
}

#[test]
fn stencil_matches_dense_matrix() {
    let g = BoxGeometry::new(2, 3).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let f = random_field(g, 5);
    let a = dense::laplacian(&g);
    let expect = &a * nalgebra::DVector::from_column_slice(f.values());
    let got = plan.apply_laplacian(&f).unwrap();
    for (x, y) in got.values().iter().zip(expect.iter()) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn spectral_operator_matches_dense_matrix() {
    for (d, n) in [(1, 6), (2, 4), (3, 2)] {
        let g = BoxGeometry::new(d, n).unwrap();
        let plan = SpectralPlan::<f64>::new(g);
        let f = random_field(g, 11);
        let via_spectrum = plan.apply_multiplier(&f, |nu| -nu).unwrap();
        let direct = plan.apply_laplacian(&f).unwrap();
        for (x, y) in via_spectrum.values().iter().zip(direct.values()) {
            assert!((x - y).abs() < 1e-12);
        }
    }
}

#[test]
fn solve_inverts_apply() {
    for (d, n) in [(1, 5), (2, 5), (3, 3), (5, 2)] {
        let g = BoxGeometry::new(d, n).unwrap();
        let plan = SpectralPlan::<f64>::new(g);
        let f = random_field(g, 2);
        let back = plan.solve_poisson(&plan.apply_neg_laplacian(&f).unwrap()).unwrap();
        let scale = f.values().iter().fold(0.0f64, |a, b| a.max(b.abs()));
        for (x, y) in back.values().iter().zip(f.values()) {
            assert!((x - y).abs() < 1e-10 * scale);
        }
    }
}

#[test]
fn one_dimensional_unit_mass() {
    let g = BoxGeometry::new(1, 1).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let u = plan.solve_poisson(&ScalarField::delta(g, &[0]).unwrap()).unwrap();
    assert_relative_eq!(u.values()[0], 1.0, epsilon = 1e-13);
    assert_relative_eq!(u.values()[1], 2.0, epsilon = 1e-13);
    assert_relative_eq!(u.values()[2], 1.0, epsilon = 1e-13);
}

#[test]
fn two_dimensional_unit_mass_matches_dense_inverse() {
    let g = BoxGeometry::new(2, 2).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let u = plan.solve_poisson(&ScalarField::delta(g, &[0, 0]).unwrap()).unwrap();
    let inv = dense::green_matrix(&g);
    let o = g.origin_index();
    for i in 0..g.volume() {
        assert!((u.values()[i] - inv[(i, o)]).abs() < 1e-10);
    }
}

#[test]
fn energy_identity() {
    let g = BoxGeometry::new(3, 3).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let f = random_field(g, 9);
    let direct = f.dot(&plan.apply_neg_laplacian(&f).unwrap()).unwrap();
    assert_relative_eq!(plan.energy(&f).unwrap(), direct, max_relative = 1e-10);
}

#[test]
fn sampling_is_deterministic() {
    let g = BoxGeometry::new(2, 3).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    assert_eq!(plan.sample_gff(42), plan.sample_gff(42));
    assert_ne!(plan.sample_gff(42), plan.sample_gff(43));
}

#[test]
fn zero_shift_has_unit_weight() {
    let g = BoxGeometry::new(2, 2).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let (phi, lw) = plan.sample_gff_shifted(&ScalarField::zeros(g), 3).unwrap();
    assert_eq!(lw, 0.0);
    assert_eq!(phi, plan.sample_gff(3));
}

#[test]
fn single_precision_plan_runs() {
    let g = BoxGeometry::new(2, 3).unwrap();
    let plan = SpectralPlan::<f32>::new(g);
    let f = ScalarField::<f32>::delta(g, &[0, 0]).unwrap();
    let u = plan.solve_poisson(&f).unwrap();
    let back = plan.apply_neg_laplacian(&u).unwrap();
    for (a, b) in back.values().iter().zip(f.values()) {
        assert!((a - b).abs() < 1e-5);
    }
}
