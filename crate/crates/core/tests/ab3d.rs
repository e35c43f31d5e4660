use std::collections::BTreeMap;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use ab_spectral::ab3d::{
    bound_state_table, channel_set, field_norm_sqr, symmetry_defect, write_bound_states_csv, BlobField, ChannelTheta,
    CylField, Forward3d, ModeGrid, ReductionConfig, SeparableField, ThetaSpec,
};
use ab_spectral::measures::Theta;
use ab_spectral::quadrature::GaussLegendre;
use ab_spectral::transform1d::{e_max_cap, GaussianBump, RadialProfile};

fn bump(a: f64, b: f64) -> Arc<dyn RadialProfile> {
    Arc::new(GaussianBump::on(a, b).unwrap())
}

fn norm_1d(p: &dyn RadialProfile) -> f64 {
    let (a, b) = p.support();
    GaussLegendre::new(200).integrate(a, b, |x| p.value(x).powi(2))
}

#[test]
fn separable_field_populates_one_channel() {
    let phi = 0.3;
    let (psi, chi) = (bump(0.5, 3.0), bump(-2.0, 2.0));
    let field = SeparableField::new(psi.clone(), chi.clone(), 2).unwrap();
    let exact = SeparableField::norm_sqr_from(norm_1d(psi.as_ref()), norm_1d(chi.as_ref()));
    let reduction = ReductionConfig::default();
    assert!((field_norm_sqr(&field, &reduction) - exact).abs() < 1e-12 * exact);

    let spec = ThetaSpec::constant(phi, FRAC_PI_2).unwrap();
    let engine = Forward3d::new(spec, (0.5, 3.0), reduction, e_max_cap(3.0), 512).unwrap();
    let modes = ModeGrid::gauss(3, 10.0, 48).unwrap();
    let c = engine.forward(&field, &modes).unwrap();
    let norms = c.channel_norms();
    let own = norms.iter().find(|(m, _)| *m == 2).unwrap().1;
    for (m, n) in &norms {
        if *m != 2 {
            assert!((n / own).sqrt() < 1e-10, "m={m}: {n}");
        }
    }
    assert!(
        (c.norm_sqr() - exact).abs() < 1e-6 * exact,
        "{} vs {exact}",
        c.norm_sqr()
    );

    let mut buf = Vec::new();
    c.write_csv(1e-12, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "m,p,E,re,im");
    assert!(rows[1..].iter().all(|l| l.starts_with("2,")));
    // m = 2 is outside A^0.3, so no atom lines either.
    assert!(!text.contains("# atom"));
}

#[test]
fn off_axis_blob_is_resolved_across_channels() {
    let blob = BlobField::new(1.8, 0.4, 0.2, 1.2, 0.5).unwrap();
    let reduction = ReductionConfig::default();
    let norm = field_norm_sqr(&blob, &reduction);
    let spec = ThetaSpec::constant(0.5, 1.0).unwrap();
    let support = blob.radial_support();
    let engine = Forward3d::new(spec, support, reduction, e_max_cap(support.1), 512).unwrap();
    let modes = ModeGrid::gauss(24, 16.0, 48).unwrap();
    let c = engine.forward(&blob, &modes).unwrap();
    let defect = (c.norm_sqr() - norm).abs() / norm;
    // Angular width ≈ 0.2 rad needs |m| up to about 24.
    assert!(defect < 1e-6, "Parseval defect {defect}");
    // Every channel of the truncated set carries weight.
    assert!(c.channel_norms().iter().all(|(_, n)| *n > 0.0));

    let blob: Arc<dyn CylField> = Arc::new(blob);
    let d = symmetry_defect(&engine, blob, 0.3, -0.25, &modes).unwrap();
    assert!(d < 1e-6, "symmetry defect {d}");
}

#[test]
fn theta_tables_select_per_p() {
    let phi = 0.5;
    let table = ChannelTheta::Table {
        breakpoints: vec![0.0],
        thetas: vec![Theta::new(FRAC_PI_2), Theta::new(1.0)],
    };
    let entries: BTreeMap<i64, ChannelTheta> = [(-1, table.clone()), (0, table)].into_iter().collect();
    let spec = ThetaSpec::new(phi, entries).unwrap();
    let low = ThetaSpec::constant(phi, FRAC_PI_2).unwrap();
    let high = ThetaSpec::constant(phi, 1.0).unwrap();
    let field = SeparableField::new(bump(0.5, 3.0), bump(-2.0, 2.0), 0).unwrap();
    let modes = ModeGrid::gauss(1, 4.0, 8).unwrap();
    let run = |s: &ThetaSpec| {
        Forward3d::new(s.clone(), (0.5, 3.0), ReductionConfig::default(), 100.0, 128)
            .unwrap()
            .forward(&field, &modes)
            .unwrap()
    };
    let (mixed, lo, hi) = (run(&spec), run(&low), run(&high));
    for ((x, a), b) in mixed.channels.iter().zip(&lo.channels).zip(&hi.channels) {
        let want = if x.p < 0.0 { a } else { b };
        assert_eq!(x.coeffs, want.coeffs);
    }

    let rows = bound_state_table(&spec, 3).unwrap();
    assert_eq!(rows.len(), 4);
}

#[test]
fn bound_state_tables() {
    let rows = bound_state_table(&ThetaSpec::constant(0.5, FRAC_PI_2).unwrap(), 3).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| (r.energy + 1.0).abs() < 1e-14));
    assert!(bound_state_table(&ThetaSpec::theta_kappa(0.5).unwrap(), 3)
        .unwrap()
        .is_empty());
    let rows = bound_state_table(&ThetaSpec::constant(0.0, FRAC_PI_4).unwrap(), 3).unwrap();
    assert_eq!(rows.len(), 1);
    assert!((rows[0].energy + PI.exp()).abs() < 1e-12 * PI.exp());

    let mut buf = Vec::new();
    write_bound_states_csv(&rows, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("m,kappa,E_b,weight,theta\n0,"));
    assert!(!text.contains("\r"));
}

#[test]
fn channel_bookkeeping() {
    let set = channel_set(0.3, 2);
    assert_eq!(set.len(), 5);
    assert_eq!(
        set.iter().filter(|c| c.in_a_phi).map(|c| c.m).collect::<Vec<_>>(),
        vec![-1, 0]
    );
    assert!(ThetaSpec::constant(0.3, f64::NAN).is_err());
    let wrong: BTreeMap<i64, ChannelTheta> = [(0, ChannelTheta::Constant(Theta::new(1.0)))].into_iter().collect();
    assert!(ThetaSpec::new(0.3, wrong).is_err());
}

#[test]
fn fields_must_fit_the_radial_grid() {
    let spec = ThetaSpec::constant(0.3, 1.0).unwrap();
    let engine = Forward3d::new(spec, (1.0, 2.0), ReductionConfig::default(), 100.0, 64).unwrap();
    let field = SeparableField::new(bump(0.5, 3.0), bump(-1.0, 1.0), 0).unwrap();
    assert!(engine.forward(&field, &ModeGrid::gauss(1, 2.0, 4).unwrap()).is_err());
}
