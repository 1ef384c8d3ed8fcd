use glab_core::constants::*;
use glab_core::disorder::BoundedLaw;
use glab_core::disorder::TailClass;
use glab_core::error::GlabError;
use glab_core::estimate::Estimate;

const G5: Estimate = Estimate {
    value: 1.156_308,
    error: 1e-6,
};

#[test]
fn closed_form_cases() {
    let a1 = TailClass::StretchedExp {
        alpha: 1.0,
        c_alpha: 1.0,
    };
    assert!((compute_m_star(5, &a1, G5, None).unwrap().value - 5.0 * G5.value).abs() < 1e-14);
    let a1c2 = TailClass::StretchedExp {
        alpha: 1.0,
        c_alpha: 2.0,
    };
    assert!((compute_k(&a1c2, G5, None).unwrap().value - 2.0 / G5.value).abs() < 1e-14);
    let b = TailClass::Bounded {
        range: 1.0,
        law: BoundedLaw::Uniform,
    };
    assert!((compute_m_star(5, &b, G5, None).unwrap().value - (10.0 * G5.value).sqrt()).abs() < 1e-14);
    assert!((compute_r_star(5, &b, G5, None).unwrap().value - 2.0 * G5.value).abs() < 1e-14);
    assert!(compute_k(&b, G5, None).is_err());
}

#[test]
fn gaussian_cross_identity() {
    let t = TailClass::Gaussian { sigma2: 1.0 };
    let s = Estimate::new(1.4, 1e-6);
    let m = compute_m_star(5, &t, G5, Some(s)).unwrap();
    let r = compute_r_star(5, &t, G5, Some(s)).unwrap();
    assert!((r.value - (2.0 * G5.value + 2.0 * s.value)).abs() < 1e-14);
    assert!((m.value * m.value - 5.0 * r.value).abs() < 1e-10);
}

#[test]
fn single_term_k() {
    let t = TailClass::Gaussian { sigma2: 1.0 };
    let s = g_star_alpha_finite(5, &t, 0, 1e-9).unwrap().unwrap();
    let k = compute_k(&t, G5, Some(s)).unwrap();
    assert!((k.value - 0.5 / (G5.value * G5.value)).abs() < 1e-5);
}

#[test]
fn missing_sum_is_divergent() {
    let t = TailClass::StretchedExp {
        alpha: 1.5,
        c_alpha: 1.0,
    };
    assert!(matches!(
        compute_m_star(3, &t, G5, None),
        Err(GlabError::Divergent { .. })
    ));
}

#[test]
fn wider_inputs_give_wider_outputs() {
    let t = TailClass::StretchedExp {
        alpha: 1.5,
        c_alpha: 0.7,
    };
    let narrow = Estimate::new(1.3, 1e-6);
    let wide = Estimate::new(1.3, 1e-3);
    let gw = Estimate::new(G5.value, 1e-3);
    let mn = compute_m_star(5, &t, G5, Some(narrow)).unwrap();
    let mw = compute_m_star(5, &t, gw, Some(wide)).unwrap();
    assert!(mw.error >= mn.error);
    let kn = compute_k(&t, G5, Some(narrow)).unwrap();
    let kw = compute_k(&t, gw, Some(wide)).unwrap();
    assert!(kw.error >= kn.error);
    let rn = compute_r_star(5, &t, G5, Some(narrow)).unwrap();
    let rw = compute_r_star(5, &t, gw, Some(wide)).unwrap();
    assert!(rw.error >= rn.error);
}

#[test]
fn point_capacity_is_inverse_green() {
    let budget = WalkBudget {
        walks_per_site: 40_000,
        step_factor: 200.0,
        seed: 3,
    };
    let (cap, se, _) = discrete_capacity(3, 0, &budget).unwrap();
    let want = 1.0 / 1.516_386_059;
    assert!((cap - want).abs() < 3.0 * se + 2e-3, "{cap} ± {se} vs {want}");
}

#[test]
fn capacity_decreases_in_eps() {
    let budget = WalkBudget {
        walks_per_site: 300,
        ..Default::default()
    };
    let a = estimate_capacity(3, 0.25, &[8], &budget).unwrap();
    let b = estimate_capacity(3, 0.75, &[8], &budget).unwrap();
    assert!(a.value > b.value);
}

#[test]
fn report_schema() {
    let t = TailClass::Bounded {
        range: 1.0,
        law: BoundedLaw::Uniform,
    };
    let r = ConstantsReport::compute(5, t, &ConstantsOptions::default()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    for key in ["d", "tail", "G_star", "K", "M_star", "R_star", "capacity"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    assert!(v.get("G_star_alpha").is_none());
    assert!(v["G_star"].get("value").is_some() && v["G_star"].get("error").is_some());
    assert!(v["K"].is_null());
}
