use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use ab_spectral::ab3d::ThetaSpec;
use ab_spectral::measures::{
    ac_density, atom_weight, bound_state_energy, channel_measure, discretize, has_bound_state, spectral_measure,
    theta_kappa, ExtensionParams,
};
use ab_spectral::quadrature::GaussLegendre;
use proptest::prelude::*;

fn params(kappa: f64, theta: f64) -> ExtensionParams {
    ExtensionParams::new(kappa, theta).unwrap()
}

/// The density exactly as written, without the cancellation-free rewrite.
fn textbook_density(kappa: f64, theta: f64, e: f64) -> f64 {
    let x = theta_kappa(kappa);
    let (a, b) = ((theta + x).sin(), (theta - x).sin());
    let s = (PI * kappa).sin();
    0.5 * s * s / (e.powf(-kappa) * a * a - 2.0 * (PI * kappa).cos() * a * b + e.powf(kappa) * b * b)
}

#[test]
fn documented_examples() {
    assert_eq!(theta_kappa(0.5), FRAC_PI_4);
    assert!(!has_bound_state(params(0.5, FRAC_PI_4)).unwrap());
    assert!(!has_bound_state(params(0.0, 0.0)).unwrap());
    assert!(has_bound_state(params(0.3, FRAC_PI_2)).unwrap());
    assert!(has_bound_state(params(1.5, 1.0)).is_err());
    assert!(bound_state_energy(params(-1.0, 1.0)).is_err());

    assert!((ac_density(ExtensionParams::free(1.5).unwrap(), 4.0) - 4.0).abs() < 1e-14);
    let e: f64 = 2.5;
    let d = ac_density(params(0.4, -theta_kappa(0.4)), e);
    assert!((d - 0.5 * e.powf(-0.4)).abs() < 1e-14);
    assert_eq!(ac_density(params(0.4, 1.0), -1.0), 0.0);

    let m = spectral_measure(ExtensionParams::free(2.0).unwrap());
    assert!(m.atoms.is_empty());
    assert!((m.density(3.0) - 4.5).abs() < 1e-14);
    assert!(spectral_measure(params(0.5, FRAC_PI_4)).atoms.is_empty());
    let m = spectral_measure(params(0.5, FRAC_PI_2));
    assert_eq!(m.atoms.len(), 1);
    assert!((m.atoms[0].energy + 1.0).abs() < 1e-14);
}

#[test]
fn discretized_masses() {
    let linear = spectral_measure(ExtensionParams::free(1.0).unwrap());
    let q = discretize(&linear, 2.0, 64).unwrap();
    assert!((q.continuum_mass() - 1.0).abs() < 1e-13);
    let flat = spectral_measure(params(0.0, 0.0));
    let q = discretize(&flat, 1.0, 64).unwrap();
    assert!((q.continuum_mass() - 0.5).abs() < 1e-12);
    assert!(discretize(&flat, 0.0, 64).unwrap().is_empty());
    assert!(discretize(&flat, 1.0, 8).is_err());
    assert!(discretize(&flat, -1.0, 64).is_err());
}

#[test]
fn channel_measures() {
    let spec = ThetaSpec::constant(0.3, FRAC_PI_2).unwrap();
    let off = channel_measure(0.3, &spec, 5, 1.0).unwrap();
    assert!((off.params.kappa - 5.3).abs() < 1e-15);
    assert!(off.atoms.is_empty());
    let on = channel_measure(0.3, &spec, 0, -2.0).unwrap();
    assert!((on.atoms[0].energy + 1.0).abs() < 1e-14);
    assert!(channel_measure(0.5, &spec, 0, 0.0).is_err());
    let integer = ThetaSpec::constant(2.0, 1.0).unwrap();
    assert_eq!(integer.entries().keys().copied().collect::<Vec<_>>(), vec![-2]);
}

/// ∫₀^{E_max} density by the substitution E = E_max·t⁴, which tames the
/// endpoint behaviour E^{±κ} ln^k E.
fn substituted_mass(p: ExtensionParams, e_max: f64) -> f64 {
    let rule = GaussLegendre::new(200);
    let mut total = 0.0;
    for k in 0..10 {
        let (a, b) = (k as f64 / 10.0, (k + 1) as f64 / 10.0);
        total += rule.integrate(a, b, |t| 4.0 * e_max * t.powi(3) * ac_density(p, e_max * t.powi(4)));
    }
    total
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn density_matches_textbook_form(
        kappa in prop::sample::select(vec![-0.9, -0.6, -0.25, 0.1, 0.45, 0.8]),
        theta in -3.0f64..3.0,
        e in 1e-3f64..1e3,
    ) {
        let got = ac_density(params(kappa, theta), e);
        let want = textbook_density(kappa, theta, e);
        prop_assert!(((got - want) / want).abs() < 1e-10, "{got} vs {want}");
    }

    #[test]
    fn atoms_match_textbook_form(kappa in 0.05f64..0.95, sign in prop::sample::select(vec![-1.0, 1.0]), frac in 0.02f64..0.98) {
        let kappa = sign * kappa;
        let x = theta_kappa(kappa).abs();
        let theta = x + frac * (PI - 2.0 * x);
        let p = params(kappa, theta);
        let e = bound_state_energy(p).unwrap().unwrap();
        let w = atom_weight(p).unwrap().unwrap();
        let (a, b) = ((theta + theta_kappa(kappa)).sin(), (theta - theta_kappa(kappa)).sin());
        let e_want = -(a / b).powf(1.0 / kappa);
        let w_want = PI * (PI * kappa).sin() * e_want.abs() / (2.0 * kappa * a * b);
        prop_assert!(e < 0.0 && w > 0.0);
        prop_assert!(((e - e_want) / e_want).abs() < 1e-9, "{e} vs {e_want}");
        prop_assert!(((w - w_want) / w_want).abs() < 1e-9, "{w} vs {w_want}");
    }

    #[test]
    fn discretized_mass_matches_substitution(
        kappa in prop::sample::select(vec![-0.7, -0.2, 0.0, 0.3, 0.9, 1.5, 3.0]),
        theta in 0.2f64..2.9,
        e_max in 1.0f64..300.0,
    ) {
        let p = params(kappa, theta);
        let q = discretize(&spectral_measure(p), e_max, 512).unwrap();
        let want = substituted_mass(p, e_max);
        prop_assert!(((q.continuum_mass() - want) / want).abs() < 1e-8, "{} vs {want}", q.continuum_mass());
    }

    #[test]
    fn periodic_under_half_turns(kappa in -0.99f64..0.99, theta in -4.0f64..4.0, n in -3i64..3, e in 0.0f64..50.0) {
        let p = params(kappa, theta);
        let a = spectral_measure(p);
        let b = spectral_measure(p.shifted(n));
        prop_assert_eq!(a.density(e), b.density(e));
        prop_assert_eq!(a.atoms, b.atoms);
    }
}
