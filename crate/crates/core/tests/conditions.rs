use std::f64::consts::E;

use nlhk_core::conditions::*;
use nlhk_core::profiles::*;
use proptest::prelude::*;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn direct_jump_polynomial_converges() {
    let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
    let radii: Vec<f64> = (0..=12).map(|k| 2f64.powf(k as f64 * 50f64.log2() / 12.0)).collect();
    let rep = check_direct_jump(&f, 1, &default_djp_radii(), None).unwrap();
    assert!(rep.converged);
    assert!(rep.c3_hat.is_finite() && rep.c3_hat > 0.0);
    assert!(rep.samples.iter().all(|(_, r)| *r <= rep.c3_hat));
    let short = check_direct_jump(&f, 1, &radii, None).unwrap();
    assert!(short.c3_hat.is_finite());
    // The ratio tends to 2∫f = 4 for this profile.
    assert!(rel(rep.c3_hat, 4.0) < 0.05, "C3 = {}", rep.c3_hat);
}

#[test]
fn direct_jump_exponential_threshold() {
    for gamma in [0.0, 0.5, 1.0] {
        let f = JumpProfile::exponential(1, 1.0, gamma).unwrap();
        let rep = check_direct_jump(&f, 1, &default_djp_radii(), None).unwrap();
        assert!(!rep.converged, "γ = {gamma}");
        let last: Vec<f64> = rep.samples.iter().rev().take(5).map(|s| s.1).collect();
        assert!(last.windows(2).all(|w| w[0] > w[1]), "ratios keep growing for γ = {gamma}");
    }
    for gamma in [1.25, 1.5, 2.0] {
        let f = JumpProfile::exponential(1, 1.0, gamma).unwrap();
        let rep = check_direct_jump(&f, 1, &default_djp_radii(), None).unwrap();
        assert!(rep.converged, "γ = {gamma}");
    }
}

#[test]
fn direct_jump_polynomial_constant_stabilizes_under_grid_doubling() {
    let f = JumpProfile::poly(1, 0.5, 0.5).unwrap();
    let a = check_direct_jump(&f, 1, &(0..=10).map(|k| 2f64.powi(k)).collect::<Vec<_>>(), None).unwrap();
    let b = check_direct_jump(&f, 1, &(0..=20).map(|k| 2f64.powi(k)).collect::<Vec<_>>(), None).unwrap();
    assert!(rel(b.c3_hat, a.c3_hat) < 0.05);
}

#[test]
fn direct_jump_rejects_bad_dimension() {
    let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
    assert!(check_direct_jump(&f, 3, &[1.0, 2.0], None).is_err());
}

#[test]
fn sufficient_criteria() {
    let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
    assert_eq!(check_djp_sufficient(&f, 1).criterion, DjpCriterion::Doubling);
    let f = JumpProfile::exponential(1, 1.0, 2.0).unwrap();
    assert_eq!(check_djp_sufficient(&f, 1).criterion, DjpCriterion::Tempered);
    let f = JumpProfile::exponential(2, 1.0, 1.6).unwrap();
    assert_eq!(check_djp_sufficient(&f, 2).criterion, DjpCriterion::LogConvex);
    let f = JumpProfile::exponential(2, 1.0, 1.4).unwrap();
    let s = check_djp_sufficient(&f, 2);
    assert_eq!(s.criterion, DjpCriterion::Unknown);
    assert!(!s.integrability.unwrap().converged);
}

#[test]
fn integrability_diverges_below_threshold() {
    // γ ≤ (d+1)/2: partial integrals keep increasing over doublings.
    for (d, gamma) in [(1, 0.5), (1, 1.0), (2, 1.5)] {
        let f = JumpProfile::exponential(d, 1.0, gamma).unwrap();
        let s = integrability_condition(&f, d, 1e-3);
        assert!(!s.converged);
        let inc = s.increments();
        assert!(inc.iter().rev().take(4).all(|i| *i > 0.0));
    }
}

#[test]
fn stable_constants() {
    let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
    let g = PotentialProfile::log_power(0.5).unwrap();
    let pack = estimate_constants(&f, &g, 1, 1.0, &ConstantsOptions { c3: Some(4.0), ..Default::default() }).unwrap();
    assert_eq!(pack.c6, 1.0);
    assert!(rel(pack.c7, (1.0 + E).ln().sqrt()) < 1e-12);
    assert!(rel(pack.k2, 12.0 * (1.0 + E).ln()) < 1e-12);
    assert!((pack.k2 - 15.759).abs() < 1e-3);
    assert!(rel(pack.c2, 4.0) < 1e-12);
    assert_eq!(pack.c1, 1.0);
    assert_eq!(pack.t_b, 1.0);
}

#[test]
fn relativistic_constants() {
    for (kappa, gamma, beta) in [(1.0, 2.0, 0.5), (0.5, 1.5, 1.0), (2.0, 3.0, 1.5)] {
        let f = JumpProfile::exponential(1, kappa, gamma).unwrap();
        let g = PotentialProfile::composed(relativistic_link(kappa, beta).unwrap(), f.clone(), 1.0).unwrap();
        let v = PotentialProfile::power(beta).unwrap();
        let c7 = growth_constant_c7(&g).0;
        assert!(rel(c7, (2.0 + gamma / kappa * 2f64.ln()).powf(beta)) < 1e-12);
        // Reported as a sup of max(g/V, V/g), the reciprocal of κe/(γ+κe).
        let c6 = comparability_constant_c6(&g, &v).0;
        assert!(rel(c6, (kappa * E / (gamma + kappa * E)).powf(-beta)) < 1e-12);
    }
}

#[test]
fn growth_conditions() {
    let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
    let g = PotentialProfile::log_power(2.0).unwrap();
    let h = stable_link(1, 1.0, 0.0, 2.0).unwrap();
    assert!(check_growth_conditions(&f, &g, Some(&h)).all_pass());
    for beta in [0.3, 1.0, 2.5] {
        let p = PotentialProfile::power(beta).unwrap();
        let rep = check_growth_conditions(&f, &p, None);
        assert!(rep.a3c);
        assert!(rel(growth_constant_c7(&p).0, 2f64.powf(beta)) < 1e-12);
    }
    let h = LinkFunction::power_over_scale(0.5, 2.0, 1.0).unwrap();
    assert_eq!(h.ratio_monotonicity(), RatioMonotonicity::Decreasing);
    assert_eq!(check_growth_conditions(&f, &g, Some(&h)).a4_monotone_ratio, Some(true));
}

#[test]
fn n0_falls_back_when_threshold_unreachable() {
    let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
    let g = PotentialProfile::log_power(0.5).unwrap();
    let pack = estimate_constants(&f, &g, 1, 1.0, &ConstantsOptions { c3: Some(4.0), ..Default::default() }).unwrap();
    assert_eq!(pack.n0, 5);
    assert!(!pack.n0_threshold_met);
    let g = PotentialProfile::log_power(2.0).unwrap();
    let pack = estimate_constants(&f, &g, 1, 1.0, &ConstantsOptions { c3: Some(4.0), ..Default::default() }).unwrap();
    assert!(pack.n0_threshold_met);
    assert!(g.value(pack.n0 as f64 - 2.0) >= pack.theta);
    assert!(g.value(pack.n0 as f64 - 3.0) < pack.theta);
}

#[test]
fn exp_int_closed_form() {
    let v = PotentialProfile::log_power(1.0).unwrap();
    assert!(check_exp_int(&v, 2.0, 1).unwrap().convergent);
    assert!(!check_exp_int(&v, 0.5, 1).unwrap().convergent);
    let v = PotentialProfile::log_power(0.5).unwrap();
    assert!(!check_exp_int(&v, 4.0, 1).unwrap().convergent);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn c7_is_scale_invariant(beta in 0.1f64..3.0, c in 0.1f64..10.0, log in any::<bool>()) {
        let g = if log { PotentialProfile::log_power(beta) } else { PotentialProfile::power(beta) }.unwrap();
        let scaled = g.scaled(c).unwrap();
        let (a, b) = (growth_constant_c7(&g).0, growth_constant_c7(&scaled).0);
        prop_assert!(rel(b, a) < 1e-12, "{} vs {}", a, b);
    }

    #[test]
    fn k_constant_identities(c6 in 1.0f64..5.0, c7 in 1.0f64..5.0) {
        let f = JumpProfile::poly(1, 1.0, 0.0).unwrap();
        let g = PotentialProfile::log_power(1.0).unwrap();
        let pack = estimate_constants(&f, &g, 1, 1.0, &ConstantsOptions { c3: Some(4.0), n0: Some(6), ..Default::default() })
            .unwrap()
            .with_c6_c7(c6, c7);
        let base = c6 * c7 * c7;
        prop_assert_eq!(pack.k, 4.0 * base);
        prop_assert_eq!(pack.k1, 8.0 * base);
        prop_assert_eq!(pack.k2, 12.0 * base);
        prop_assert_eq!(pack.k3, 16.0 * base);
        prop_assert_eq!(pack.k4, 12.0 * c6 * base);
        prop_assert!(pack.k < pack.k1 && pack.k1 < pack.k2 && pack.k2 < pack.k3);
        prop_assert!(rel(pack.k4, c6 * pack.k2) < 1e-15);
    }
}
