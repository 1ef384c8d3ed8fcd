use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use glab_core::disorder::*;
use glab_core::green::GreenAccessor;
use glab_core::lattice::{BoxGeometry, ScalarField};
use glab_core::oracle::dense;
use glab_core::spectral::SpectralPlan;

fn draws(tail: TailClass, n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| tail.draw(&mut rng)).collect()
}

#[test]
fn stretched_exponential_tail_frequency() {
    let tail = TailClass::StretchedExp {
        alpha: 1.0,
        c_alpha: 1.0,
    };
    let n = 1_000_000;
    let hits = draws(tail, n, 1).iter().filter(|&&x| x >= 2.0).count() as f64;
    let p = 0.5 * (-2.0f64).exp();
    let se = (p * (1.0 - p) / n as f64).sqrt();
    assert!((hits / n as f64 - p).abs() < 3.0 * se);
}

#[test]
fn gaussian_moments() {
    let tail = TailClass::Gaussian { sigma2: 1.0 };
    let n = 200_000;
    let x = draws(tail, n, 2);
    let mean = x.iter().sum::<f64>() / n as f64;
    let var = x.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    assert!(mean.abs() < 3.0 / (n as f64).sqrt());
    // SE of the sample variance of a normal: sqrt(2/n)
    assert!((var - 1.0).abs() < 3.0 * (2.0 / n as f64).sqrt());
}

#[test]
fn bounded_draws_stay_in_range() {
    for law in [BoundedLaw::Uniform, BoundedLaw::Rademacher] {
        let tail = TailClass::Bounded { range: 1.0, law };
        assert!(draws(tail, 10_000, 3).iter().all(|x| x.abs() <= 1.0));
    }
}

#[test]
fn stretched_exponential_variance_closed_form() {
    let tail = TailClass::StretchedExp {
        alpha: 1.0,
        c_alpha: 1.0,
    };
    // Laplace(1): variance 2
    assert!((tail.variance() - 2.0).abs() < 1e-12);
    let g = TailClass::StretchedExp {
        alpha: 2.0,
        c_alpha: 0.5,
    };
    // P(|η|≥r)=e^{-r²/2} has E η² = 2
    assert!((g.variance() - 2.0).abs() < 1e-12);
}

#[test]
fn tail_log_rate_examples() {
    let t = TailClass::StretchedExp {
        alpha: 2.0,
        c_alpha: 0.5,
    };
    let expect = -0.5 - 2f64.ln() / 100.0;
    assert!((t.tail_log_rate(10.0) - expect).abs() < 1e-14);
    let b = TailClass::Bounded {
        range: 1.0,
        law: BoundedLaw::Uniform,
    };
    assert_eq!(b.tail_log_rate(2.0), f64::NEG_INFINITY);
}

#[test]
fn gaussian_log_rate_tends_to_minus_half() {
    let g = TailClass::Gaussian { sigma2: 1.0 };
    let mut prev = f64::NEG_INFINITY;
    for r in [5.0, 10.0, 30.0, 100.0, 1000.0] {
        let v = g.tail_log_rate(r);
        assert!(v > prev && v < -0.5);
        prev = v;
    }
    assert!((g.tail_log_rate(1e4) + 0.5).abs() < 1e-6);
    // branches agree where they meet
    let a = g.tail_log_rate(20.0 * 2f64.sqrt() - 1e-9);
    let b = g.tail_log_rate(20.0 * 2f64.sqrt() + 1e-9);
    assert!((a - b).abs() < 1e-9);
}

#[test]
fn invalid_parameters_rejected() {
    let g = BoxGeometry::new(1, 2).unwrap();
    for tail in [
        TailClass::StretchedExp {
            alpha: 2.5,
            c_alpha: 1.0,
        },
        TailClass::StretchedExp {
            alpha: 1.0,
            c_alpha: 0.0,
        },
        TailClass::Gaussian { sigma2: -1.0 },
        TailClass::Bounded {
            range: 0.0,
            law: BoundedLaw::Uniform,
        },
    ] {
        assert!(sample_disorder::<f64>(g, tail, 0).is_err());
    }
}

#[test]
fn nested_boxes_share_values() {
    let tail = TailClass::Gaussian { sigma2: 1.0 };
    let small = sample_disorder::<f64>(BoxGeometry::new(2, 2).unwrap(), tail, 9).unwrap();
    let large = sample_disorder::<f64>(BoxGeometry::new(2, 5).unwrap(), tail, 9).unwrap();
    for s in small.geometry().sites() {
        assert_eq!(small.values.get(&s).unwrap(), large.values.get(&s).unwrap());
    }
}

#[test]
fn serialised_form_round_trips() {
    let t = TailClass::StretchedExp {
        alpha: 1.5,
        c_alpha: 0.7,
    };
    let s = serde_json::to_string(&t).unwrap();
    assert!(s.contains("\"variant\":\"stretched_exp\""));
    assert_eq!(serde_json::from_str::<TailClass>(&s).unwrap(), t);
    let bad = r#"{"variant":"gaussian"}"#;
    assert!(serde_json::from_str::<TailClass>(bad).is_err());
    let bad_alpha = r#"{"variant":"stretched_exp","alpha":3.0,"c_alpha":1.0}"#;
    assert!(serde_json::from_str::<TailClass>(bad_alpha).is_err());
}

#[test]
fn mean_field_examples() {
    let g = BoxGeometry::new(1, 5).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let eta = DisorderRealization::from_field(
        ScalarField::delta(g, &[0]).unwrap(),
        TailClass::Gaussian { sigma2: 1.0 },
    );
    let m = mean_field(&plan, &eta).unwrap();
    for s in g.sites() {
        assert!((m.get(&s).unwrap() - (6 - s[0].abs()) as f64).abs() < 1e-10);
    }
    let zero = mean_field(&plan, &DisorderRealization::zero(g)).unwrap();
    assert!(zero.values().iter().all(|&v| v == 0.0));
}

#[test]
fn mean_field_matches_direct_green_sum() {
    let g = BoxGeometry::new(2, 3).unwrap();
    let plan = SpectralPlan::<f64>::new(g);
    let eta = sample_disorder(g, TailClass::Gaussian { sigma2: 1.0 }, 4).unwrap();
    let m = mean_field(&plan, &eta).unwrap();
    let gm = dense::green_matrix(&g);
    for i in 0..g.volume() {
        let direct: f64 = (0..g.volume()).map(|j| gm[(i, j)] * eta.values.values()[j]).sum();
        assert!((direct - m.values()[i]).abs() < 1e-9);
    }
}

#[test]
fn weighted_sum_regions() {
    let g = BoxGeometry::new(2, 4).unwrap();
    let acc = GreenAccessor::new(Arc::new(SpectralPlan::<f64>::new(g)));
    let eta = sample_disorder(
        g,
        TailClass::StretchedExp {
            alpha: 1.0,
            c_alpha: 1.0,
        },
        5,
    )
    .unwrap();
    let x = [1, -1];
    let full = weighted_sum(&acc, &x, Region::Full, &eta).unwrap();
    let near = weighted_sum(&acc, &x, Region::Near(2), &eta).unwrap();
    let far = weighted_sum(&acc, &x, Region::Far(2), &eta).unwrap();
    assert!((near + far - full).abs() < 1e-12);
    let whole = weighted_sum(&acc, &[0, 0], Region::Near(4), &eta).unwrap();
    let full0 = weighted_sum(&acc, &[0, 0], Region::Full, &eta).unwrap();
    assert!((whole - full0).abs() < 1e-12);

    let y0 = [3, -4];
    let single = DisorderRealization::from_field(ScalarField::delta(g, &y0).unwrap(), eta.tail);
    let s = weighted_sum(&acc, &[0, 0], Region::Far(1), &single).unwrap();
    assert!((s - acc.green_finite(&[0, 0], &y0).unwrap()).abs() < 1e-12);
    assert!(weighted_sum(&acc, &[5, 0], Region::Full, &eta).is_err());
}
