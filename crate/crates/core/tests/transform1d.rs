use std::f64::consts::{FRAC_PI_2, PI};

use ab_spectral::measures::{discretize, spectral_measure, theta_kappa, ExtensionParams};
use ab_spectral::quadrature::GaussLegendre;
use ab_spectral::transform1d::{
    atom_kernel, classify, e_max_cap, forward, inverse, kernel, parse_family, Endpoint, GaussianBump, RadialFunction,
    RadialGrid, TransformPlan,
};
use ab_spectral::verify::oracles::sine_transform;
use ab_spectral::Error;
use proptest::prelude::*;

fn plan_for(params: ExtensionParams, psi: &RadialFunction, budget: usize) -> TransformPlan {
    let e_max = e_max_cap(psi.grid.r_nodes.last().copied().unwrap());
    let quad = discretize(&spectral_measure(params), e_max, budget).unwrap();
    TransformPlan::new(params, quad, psi.grid.clone()).unwrap()
}

#[test]
fn classification() {
    assert_eq!(classify(0.5).endpoint_0, Endpoint::LimitCircle);
    assert_eq!(classify(-0.99).endpoint_0, Endpoint::LimitCircle);
    assert_eq!(classify(1.0).endpoint_0, Endpoint::LimitPoint);
    assert_eq!(classify(2.5).endpoint_inf, Endpoint::LimitPoint);
}

#[test]
fn kernel_ignores_theta_off_the_extension_family() {
    let a = kernel(ExtensionParams::new(1.5, 0.0).unwrap(), 2.0, 1.3).unwrap();
    let b = kernel(ExtensionParams::new(-1.5, 2.0).unwrap(), 2.0, 1.3).unwrap();
    assert_eq!(a, b);
}

#[test]
fn bound_state_is_normalized_by_its_weight() {
    // w_b ∫₀^∞ u_ϑ(E_b|r)² dr = 1: the atom carries exactly the norm of
    // its eigenfunction.
    for (kappa, theta) in [(0.3, FRAC_PI_2), (-0.6, 1.2), (0.0, 1.0), (0.8, 1.5), (0.5, 0.9)] {
        let params = ExtensionParams::new(kappa, theta).unwrap();
        let atom = spectral_measure(params).atoms[0];
        let rule = GaussLegendre::new(48);
        let sq = |r: f64| atom_kernel(params, atom.energy, r).unwrap().value.powi(2);
        // r = s¹⁰ near the origin, where u² ~ r^{1−2|κ|}.
        let scale = 1.0 / atom.energy.abs().sqrt();
        let mut total = rule.integrate(0.0, 1.0, |s| 10.0 * scale * s.powi(9) * sq(scale * s.powi(10)));
        let panels = 40;
        for k in 0..panels {
            let a = scale * (1.0 + 39.0 * k as f64 / panels as f64);
            let b = scale * (1.0 + 39.0 * (k + 1) as f64 / panels as f64);
            total += rule.integrate(a, b, sq);
        }
        assert!(
            (atom.weight * total - 1.0).abs() < 1e-9,
            "kappa={kappa}: {}",
            atom.weight * total
        );
    }
}

#[test]
fn atom_kernel_continues_the_series() {
    for (kappa, theta) in [(0.3, FRAC_PI_2), (-0.6, 1.2), (0.0, 0.6)] {
        let params = ExtensionParams::new(kappa, theta).unwrap();
        let atom = spectral_measure(params).atoms[0];
        let k = atom.energy.abs().sqrt();
        // Past the matching point and where the series is still accurate.
        for x in [3.9, 4.1, 5.0, 6.0] {
            let a = atom_kernel(params, atom.energy, x / k).unwrap();
            let b = kernel(params, atom.energy, x / k).unwrap();
            assert!(
                (a.value - b.value).abs() < 1e-9 * b.value.abs(),
                "x={x}: {} vs {}",
                a.value,
                b.value
            );
            assert!((a.d_dr - b.d_dr).abs() < 1e-9 * b.d_dr.abs());
        }
        // Far out the decaying solution stays finite and positive in ratio.
        let far = atom_kernel(params, atom.energy, 200.0 / k).unwrap().value;
        assert!(far.is_finite() && far.abs() < 1e-80);
    }
    assert!(atom_kernel(ExtensionParams::new(0.3, 1.0).unwrap(), 1.0, 1.0).is_err());
}

#[test]
fn cosine_family_is_transformed_unitarily() {
    let profile = parse_family("cosine:0.5:3:1.5").unwrap();
    let psi = RadialFunction::from_profile(profile.as_ref(), 128).unwrap();
    for (kappa, theta) in [(0.3, 1.0), (-0.7, FRAC_PI_2), (2.0, 0.0)] {
        let d = plan_for(ExtensionParams::new(kappa, theta).unwrap(), &psi, 512)
            .unitarity(&psi)
            .unwrap();
        // The modulation moves spectral weight toward E_max, so the
        // roundtrip (the square root of the truncated tail) is looser.
        assert!(d.parseval < 1e-9 && d.roundtrip < 1e-5, "kappa={kappa}: {d:?}");
    }
}

#[test]
fn sine_transform_of_cosine_family() {
    let profile = parse_family("cosine:0.5:3:7").unwrap();
    let psi = RadialFunction::from_profile(profile.as_ref(), 128).unwrap();
    let params = ExtensionParams::new(0.5, theta_kappa(0.5)).unwrap();
    let plan = plan_for(params, &psi, 256);
    let c = plan.forward(&psi).unwrap();
    for (e, v) in plan.quadrature().e_nodes.iter().zip(&c.continuum_values) {
        assert!((v - sine_transform(profile.as_ref(), *e)).norm() < 1e-8);
    }
}

#[test]
fn inverse_evaluates_on_any_grid() {
    let bump = GaussianBump::on(0.5, 3.0).unwrap();
    let psi = RadialFunction::from_profile(&bump, 128).unwrap();
    let params = ExtensionParams::new(-0.3, 0.7).unwrap();
    let quad = discretize(&spectral_measure(params), e_max_cap(3.0), 512).unwrap();
    let c = forward(params, &psi, &quad).unwrap();
    let other = RadialGrid::trapezoid((0..=40).map(|i| 0.5 + 2.5 * f64::from(i) / 40.0).collect()).unwrap();
    let back = inverse(params, &c, &other).unwrap();
    for (r, v) in other.r_nodes.iter().zip(&back.values) {
        use ab_spectral::transform1d::RadialProfile;
        assert!((v.re - bump.value(*r)).abs() < 1e-6 && v.im.abs() < 1e-12, "r={r}");
    }
}

#[test]
fn csv_roundtrip_and_errors() {
    let bump = GaussianBump::on(0.5, 3.0).unwrap();
    let psi = RadialFunction::from_profile(&bump, 16).unwrap();
    let mut buf = Vec::new();
    psi.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let back = RadialFunction::read_csv(&text).unwrap();
    assert_eq!(back.r_nodes(), psi.r_nodes());
    assert_eq!(back.values, psi.values);

    let weighted = "# comment\nr,re,im,weight\n1,0,0,0.5\n2,1,0,0.5\n3,0,0,0.5\n4,0,0,0.5\n5,0,0,0.5\n6,0,0,0.5\n7,0,0,0.5\n8,0,0,0.5\n";
    let f = RadialFunction::read_csv(weighted).unwrap();
    assert_eq!(f.norm_sqr(), 0.5);

    let bad = "r,re,im\n1,0,0\n2,x,0\n";
    match RadialFunction::read_csv(bad) {
        Err(Error::Csv { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected a CSV error, got {other:?}"),
    }
    assert!(matches!(
        RadialFunction::read_csv("a,b\n"),
        Err(Error::Csv { line: 1, .. })
    ));
    assert!(matches!(
        RadialFunction::read_csv("r,re,im\n1,0\n"),
        Err(Error::Csv { line: 2, .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn random_extensions_are_unitary(kappa in -0.95f64..0.95, theta in -PI..PI, a in 0.3f64..0.7, width in 2.0f64..2.5) {
        // Narrower bumps need energies past the series domain at r = a + width.
        let bump = GaussianBump::on(a, a + width).unwrap();
        let psi = RadialFunction::from_profile(&bump, 128).unwrap();
        let params = ExtensionParams::new(kappa, theta).unwrap();
        let plan = plan_for(params, &psi, 512);
        let d = plan.unitarity(&psi).unwrap();
        prop_assert!(d.parseval < 1e-6 && d.roundtrip < 1e-5, "{d:?}");
    }

    #[test]
    fn half_turn_flips_coefficients(kappa in -0.95f64..0.95, theta in -PI..PI, n in 1i64..4) {
        let bump = GaussianBump::on(0.5, 2.0).unwrap();
        let psi = RadialFunction::from_profile(&bump, 32).unwrap();
        let p = ExtensionParams::new(kappa, theta).unwrap();
        let a = plan_for(p, &psi, 64).forward(&psi).unwrap();
        let b = plan_for(p.shifted(n), &psi, 64).forward(&psi).unwrap();
        prop_assert_eq!(a.quad.atoms.clone(), b.quad.atoms.clone());
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        for (x, y) in a.continuum_values.iter().zip(&b.continuum_values).chain(a.atom_values.iter().zip(&b.atom_values)) {
            prop_assert_eq!(*y, x * sign);
        }
    }
}
