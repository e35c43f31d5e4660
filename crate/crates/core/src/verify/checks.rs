//! The individual checks. Each returns one result per parameter tuple and
//! never propagates errors: a failing evaluation becomes a failed result.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::sync::Arc;

use num_complex::Complex64;

use super::{doubling_rule, oracles, CheckResult, Doubling, SuiteConfig};
use crate::ab3d::{
    a_phi_channels, apply_h, bound_state_table, field_norm_sqr, symmetry_defect, CylField, Forward3d, HamiltonianField,
    ModeCoefficients, ModeGrid, ReductionConfig, SeparableField, ThetaSpec,
};
use crate::error::Result;
use crate::measures::{
    ac_density, atom_weight, bound_state_energy, discretize, spectral_measure, theta_kappa, ExtensionParams,
    MeasureQuadrature, Theta,
};
use crate::special_fns::{chi_kappa, script_y, u_eigen, u_theta_eigen, w_eigen, EvalPoint, Order};
use crate::transform1d::{apply_l_q, e_max_cap, inverse, GaussianBump, RadialFunction, RadialProfile, TransformPlan};

macro_rules! params {
    ($($k:expr => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = BTreeMap::new();
        $( m.insert($k.to_string(), format!("{}", $v)); )*
        m
    }};
}

type Params = BTreeMap<String, String>;

fn record<F>(out: &mut Vec<CheckResult>, id: &str, params: Params, tol: f64, f: F)
where
    F: FnOnce() -> Result<f64>,
{
    out.push(match f() {
        Ok(measured) => CheckResult::new(id, params, measured, tol),
        Err(e) => CheckResult::errored(id, params, tol, e.to_string()),
    });
}

fn sub_unit(kappas: &[f64]) -> impl Iterator<Item = f64> + '_ {
    kappas.iter().copied().filter(|k| k.abs() < 1.0)
}

pub(super) fn run(id: &str, cfg: &SuiteConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    match id {
        "ac01-wronskian" => wronskian(cfg, &mut out),
        "ac02-bessel" => bessel(cfg, &mut out),
        "ac03-ode-residual" => ode_residual(cfg, &mut out),
        "ac04-bound-states" => bound_states(cfg, &mut out),
        "ac05-collapse" => collapse(cfg, &mut out),
        "ac06-unitarity" | "ac07-diagonalization" => unitarity(id, cfg, &mut out),
        "ac08-sine-transform" => sine_transform(cfg, &mut out),
        "ac09-theta-periodicity" => periodicity(cfg, &mut out),
        "ac10-kappa-continuity" => continuity(cfg, &mut out),
        "ac11-three-d" => three_d(cfg, &mut out),
        "ac12-negative-controls" => controls(cfg, &mut out),
        _ => {}
    }
    out
}

fn wronskian(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac01-wronskian";
    for kappa in sub_unit(&cfg.kappas) {
        for &r in &cfg.radii {
            record(
                out,
                id,
                params! {"kappa" => kappa, "r" => r},
                cfg.tolerances.wronskian,
                || {
                    let order = Order::new(kappa)?;
                    let point = EvalPoint::new(0.0, r)?;
                    let w = u_eigen(order, point)?.wronskian(w_eigen(order, point)?);
                    Ok((w - 2.0 / PI).abs())
                },
            );
        }
    }
}

fn relative(got: f64, want: f64) -> f64 {
    if want == 0.0 {
        got.abs()
    } else {
        ((got - want) / want).abs()
    }
}

const SERIES_ORACLE_ZETAS: [f64; 8] = [0.01, 0.25, 1.0, 4.0, 10.0, 25.0, 50.0, 100.0];

fn bessel(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac02-bessel";
    let tol = cfg.tolerances.bessel;
    if cfg.kappas.is_empty() {
        return;
    }
    for sign in [-1.0, 1.0] {
        let kappa = 0.5 * sign;
        let p = params! {"kappa" => kappa, "oracle" => "closed-form", "zeta" => "0.1:100:1000"};
        record(out, id, p, tol, || {
            let order = Order::new(kappa)?;
            let mut worst: f64 = 0.0;
            for i in 1..=1000 {
                let zeta = 0.1 * f64::from(i);
                let got = chi_kappa(order, zeta)?;
                worst = worst.max(relative(got, oracles::chi_half_order(sign, zeta)));
            }
            Ok(worst)
        });
    }
    for kappa in sub_unit(&cfg.kappas) {
        record(
            out,
            id,
            params! {"kappa" => kappa, "oracle" => "exact-series"},
            tol,
            || {
                let order = Order::new(kappa)?;
                let mut worst: f64 = 0.0;
                for zeta in SERIES_ORACLE_ZETAS {
                    worst = worst.max(relative(chi_kappa(order, zeta)?, oracles::chi_exact(kappa, zeta)?));
                }
                Ok(worst)
            },
        );
    }
    record(
        out,
        id,
        params! {"function" => "script_y", "oracle" => "exact-series"},
        tol,
        || {
            let mut worst: f64 = 0.0;
            for zeta in SERIES_ORACLE_ZETAS {
                worst = worst.max(relative(script_y(zeta)?, oracles::script_y_exact(zeta)?));
            }
            Ok(worst)
        },
    );
}

const RESIDUAL_RADII: [f64; 3] = [0.5, 1.0, 2.0];
const RESIDUAL_STEP: f64 = 0.02;

/// Σ_r |−(f(r+h) − 2f(r) + f(r−h))/h² + ((κ² − ¼)/r² − E) f(r)|.
fn ode_residual_sum(order: Order, theta: f64, energy: f64, h: f64) -> Result<f64> {
    let kappa = order.kappa();
    let f = |r: f64| -> Result<f64> { Ok(u_theta_eigen(order, theta, EvalPoint::new(energy, r)?)?.value) };
    let mut total = 0.0;
    for r in RESIDUAL_RADII {
        let (lo, mid, hi) = (f(r - h)?, f(r)?, f(r + h)?);
        let second = (hi - 2.0 * mid + lo) / (h * h);
        total += (-second + ((kappa * kappa - 0.25) / (r * r) - energy) * mid).abs();
    }
    Ok(total)
}

fn ode_residual(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac03-ode-residual";
    for kappa in sub_unit(&cfg.kappas) {
        for &theta in &cfg.thetas {
            for &energy in &cfg.ode_energies {
                let p = params! {"kappa" => kappa, "theta" => theta, "energy" => energy};
                record(out, id, p, cfg.tolerances.ode_ratio, || {
                    let order = Order::new(kappa)?;
                    let coarse = ode_residual_sum(order, theta, energy, RESIDUAL_STEP)?;
                    let fine = ode_residual_sum(order, theta, energy, 0.5 * RESIDUAL_STEP)?;
                    Ok((coarse / fine - 4.0).abs())
                });
            }
        }
    }
}

fn required<T>(x: Option<T>, what: &str) -> Result<T> {
    x.ok_or_else(|| crate::error::Error::InvalidInput(format!("expected {what}")))
}

const LIMIT_KAPPA: f64 = 1e-4;

fn bound_states(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac04-bound-states";
    let tol = cfg.tolerances.bound_state;
    if cfg.kappas.is_empty() {
        return;
    }
    for kappa in sub_unit(&cfg.kappas) {
        let p = params! {"kappa" => kappa, "quantity" => "energy", "theta" => "pi/2"};
        record(out, id, p, tol, || {
            let e = required(
                bound_state_energy(ExtensionParams::new(kappa, FRAC_PI_2)?)?,
                "a bound state",
            )?;
            Ok((e + 1.0).abs())
        });
    }
    let p = params! {"kappa" => 0, "quantity" => "energy", "theta" => "pi/4"};
    record(out, id, p, tol, || {
        let e = required(
            bound_state_energy(ExtensionParams::new(0.0, FRAC_PI_4)?)?,
            "a bound state",
        )?;
        Ok((e + PI.exp()).abs())
    });
    let p = params! {"kappa" => 0, "quantity" => "weight", "theta" => "pi/2"};
    record(out, id, p, tol, || {
        let w = required(atom_weight(ExtensionParams::new(0.0, FRAC_PI_2)?)?, "an atom")?;
        Ok((w - 0.5 * PI * PI).abs())
    });
    for &theta in &cfg.thetas {
        let zero = ExtensionParams::new(0.0, theta);
        let Ok(zero) = zero else { continue };
        // Only the bound-state branch has a limit to compare.
        if !matches!(bound_state_energy(zero), Ok(Some(_))) {
            continue;
        }
        for sign in [-1.0, 1.0] {
            let kappa = sign * LIMIT_KAPPA;
            let p = params! {"kappa" => kappa, "quantity" => "limit", "theta" => theta};
            record(out, id, p, cfg.tolerances.kappa_limit, || {
                let near = ExtensionParams::new(kappa, theta)?;
                let e0 = required(bound_state_energy(zero)?, "a bound state")?;
                let w0 = required(atom_weight(zero)?, "an atom")?;
                let e = required(bound_state_energy(near)?, "a bound state")?;
                let w = required(atom_weight(near)?, "an atom")?;
                Ok(relative(e, e0).max(relative(w, w0)))
            });
        }
    }
}

const COLLAPSE_ENERGIES: [f64; 3] = [0.1, 1.0, 10.0];

fn collapse(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac05-collapse";
    for kappa in cfg.kappas.iter().copied().filter(|k| *k > 0.0 && *k < 1.0) {
        for energy in COLLAPSE_ENERGIES {
            record(
                out,
                id,
                params! {"kappa" => kappa, "energy" => energy},
                cfg.tolerances.collapse,
                || {
                    let params = ExtensionParams::new(kappa, theta_kappa(kappa))?;
                    Ok(relative(ac_density(params, energy), 0.5 * energy.powf(kappa)))
                },
            );
        }
    }
}

/// (κ, θ) pairs of the transform checks; θ is irrelevant for `|κ| ≥ 1`.
fn transform_params(cfg: &SuiteConfig) -> Vec<(f64, Option<f64>)> {
    let mut out = Vec::new();
    for &kappa in &cfg.transform_kappas {
        if kappa.abs() < 1.0 {
            out.extend(cfg.thetas.iter().map(|&t| (kappa, Some(t))));
        } else {
            out.push((kappa, None));
        }
    }
    out
}

fn make_params(kappa: f64, theta: Option<f64>) -> Result<ExtensionParams> {
    match theta {
        Some(t) => ExtensionParams::new(kappa, t),
        None => ExtensionParams::free(kappa),
    }
}

fn with_theta(mut p: Params, theta: Option<f64>) -> Params {
    if let Some(t) = theta {
        p.insert("theta".into(), format!("{t}"));
    }
    p
}

fn test_bump(cfg: &SuiteConfig) -> Result<(GaussianBump, RadialFunction)> {
    let bump = GaussianBump::on(cfg.bump.0, cfg.bump.1)?;
    let psi = RadialFunction::from_profile(&bump, cfg.radial_nodes)?;
    Ok((bump, psi))
}

fn e_cap(cfg: &SuiteConfig) -> f64 {
    let series = e_max_cap(cfg.bump.1);
    cfg.e_max_cap.map_or(series, |c| c.min(series))
}

fn build_plan(cfg: &SuiteConfig, params: ExtensionParams, psi: &RadialFunction, e_max: f64) -> Result<TransformPlan> {
    let quad = discretize(&spectral_measure(params), e_max, cfg.node_budget)?;
    TransformPlan::new(params, quad, psi.grid.clone())
}

/// E_max by doubling on the larger of the Parseval and roundtrip defects,
/// together with the plan at the chosen value.
fn choose_e_max(cfg: &SuiteConfig, params: ExtensionParams, psi: &RadialFunction) -> Result<(Doubling, TransformPlan)> {
    let cap = e_cap(cfg);
    let mut plans: HashMap<u64, TransformPlan> = HashMap::new();
    let tol = cfg.tolerances.parseval.min(cfg.tolerances.roundtrip);
    let choice = doubling_rule(
        |e| {
            let plan = build_plan(cfg, params, psi, e)?;
            let defect = plan.unitarity(psi)?.max();
            plans.insert(e.to_bits(), plan);
            Ok(defect)
        },
        cap / 16.0,
        cap,
        tol,
    )?;
    let plan = plans
        .remove(&choice.value.to_bits())
        .expect("doubling evaluates its result");
    Ok((choice, plan))
}

fn unitarity(id: &str, cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let tol = &cfg.tolerances;
    for (kappa, theta) in transform_params(cfg) {
        let base = with_theta(params! {"kappa" => kappa}, theta);
        let run = || -> Result<(Doubling, f64, f64, f64)> {
            let (_, psi) = test_bump(cfg)?;
            let params = make_params(kappa, theta)?;
            let (choice, plan) = choose_e_max(cfg, params, &psi)?;
            let d = plan.unitarity(&psi)?;
            let diag = if id == "ac07-diagonalization" {
                let lhs = plan.forward(&apply_l_q(kappa, &psi)?)?;
                let rhs = plan.forward(&psi)?.multiply_by_energy(0.0);
                (lhs.distance_sqr(&rhs)? / psi.norm_sqr()).sqrt()
            } else {
                f64::NAN
            };
            Ok((choice, d.parseval, d.roundtrip, diag))
        };
        let quantities: &[(&str, f64)] = if id == "ac06-unitarity" {
            &[("parseval", tol.parseval), ("roundtrip", tol.roundtrip)]
        } else {
            &[("diagonalization", tol.diagonalization)]
        };
        match run() {
            Ok((choice, parseval, roundtrip, diag)) => {
                for &(q, t) in quantities {
                    let mut p = base.clone();
                    p.insert("quantity".into(), q.into());
                    p.insert("e_max".into(), format!("{}", choice.value));
                    p.insert("e_max_at_cap".into(), format!("{}", choice.warning));
                    let measured = match q {
                        "parseval" => parseval,
                        "roundtrip" => roundtrip,
                        _ => diag,
                    };
                    out.push(CheckResult::new(id, p, measured, t));
                }
            }
            Err(e) => {
                for &(q, t) in quantities {
                    let mut p = base.clone();
                    p.insert("quantity".into(), q.into());
                    out.push(CheckResult::errored(id, p, t, e.to_string()));
                }
            }
        }
    }
}

fn sine_transform(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac08-sine-transform";
    if cfg.transform_kappas.is_empty() {
        return;
    }
    let p = params! {"kappa" => 0.5, "theta" => "theta_kappa"};
    record(out, id, p, cfg.tolerances.sine_transform, || {
        let (bump, psi) = test_bump(cfg)?;
        let params = ExtensionParams::new(0.5, theta_kappa(0.5))?;
        let plan = build_plan(cfg, params, &psi, e_cap(cfg))?;
        let c = plan.forward(&psi)?;
        let mut worst: f64 = 0.0;
        for (e, v) in plan.quadrature().e_nodes.iter().zip(&c.continuum_values) {
            if *e > 0.0 {
                worst = worst.max((v - oracles::sine_transform(&bump, *e)).norm());
            }
        }
        Ok(worst)
    });
}

/// Largest relative weight difference, with atoms compared as (E, w).
fn quadrature_mismatch(a: &MeasureQuadrature, b: &MeasureQuadrature) -> f64 {
    if a.e_nodes != b.e_nodes || a.atoms.len() != b.atoms.len() {
        return f64::INFINITY;
    }
    let weights = a.e_weights.iter().zip(&b.e_weights).map(|(x, y)| relative(*y, *x));
    let atoms = a
        .atoms
        .iter()
        .zip(&b.atoms)
        .map(|(x, y)| relative(y.energy, x.energy).max(relative(y.weight, x.weight)));
    weights.chain(atoms).fold(0.0, f64::max)
}

fn sign_flip_defect(a: &[Complex64], b: &[Complex64], sign: f64) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (y - x * sign).norm()).fold(0.0, f64::max)
}

fn periodicity(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac09-theta-periodicity";
    let tol = cfg.tolerances.periodicity;
    for (kappa, theta) in transform_params(cfg) {
        let Some(theta) = theta else { continue };
        // `exact` shifts the stored half-turn count; `float` adds π in f64.
        for shift in ["exact", "float"] {
            let base = params! {"kappa" => kappa, "theta" => theta, "shift" => shift};
            let run =
                || -> Result<[f64; 3]> {
                    let (_, psi) = test_bump(cfg)?;
                    let p = ExtensionParams::new(kappa, theta)?;
                    let q = match shift {
                        "exact" => p.shifted(1),
                        _ => ExtensionParams::new(kappa, theta + PI)?,
                    };
                    let e_max = e_cap(cfg);
                    let (pa, pb) = (build_plan(cfg, p, &psi, e_max)?, build_plan(cfg, q, &psi, e_max)?);
                    let measure = quadrature_mismatch(pa.quadrature(), pb.quadrature());
                    let (ca, cb) = (pa.forward(&psi)?, pb.forward(&psi)?);
                    let coeffs = sign_flip_defect(&ca.continuum_values, &cb.continuum_values, -1.0)
                        .max(sign_flip_defect(&ca.atom_values, &cb.atom_values, -1.0));
                    let parseval = (ca.norm_sqr() - cb.norm_sqr()).abs() / psi.norm_sqr();
                    Ok([measure, coeffs, parseval])
                };
            push_quantities(out, id, base, tol, &["measure", "coefficients", "parseval"], run());
        }
    }
    for &phi in &cfg.phis {
        for &theta in &cfg.thetas {
            let p = params! {"phi" => phi, "theta" => theta, "quantity" => "bound_state_table"};
            record(out, id, p, tol, || {
                let spec = ThetaSpec::constant(phi, theta)?;
                let a = bound_state_table(&spec, cfg.m_max)?;
                let b = bound_state_table(&spec.shifted(1), cfg.m_max)?;
                if a.len() != b.len() {
                    return Ok(f64::INFINITY);
                }
                Ok(a.iter()
                    .zip(&b)
                    .map(|(x, y)| {
                        if x.m != y.m || !x.theta.equivalent(y.theta) {
                            f64::INFINITY
                        } else {
                            relative(y.energy, x.energy).max(relative(y.weight, x.weight))
                        }
                    })
                    .fold(0.0, f64::max))
            });
        }
        let base = params! {"phi" => phi, "theta" => cfg.theta_3d, "shift" => "exact-3d"};
        let run = || -> Result<[f64; 2]> {
            let spec = ThetaSpec::constant(phi, cfg.theta_3d)?;
            let field = separable_field(cfg, phi)?;
            let modes = ModeGrid::gauss(cfg.m_max, 4.0, 8)?;
            let reduction = reduction(cfg);
            let e_max = e_cap(cfg);
            let a =
                Forward3d::new(spec.clone(), cfg.bump, reduction, e_max, cfg.node_budget)?.forward(&field, &modes)?;
            let b = Forward3d::new(spec.shifted(1), cfg.bump, reduction, e_max, cfg.node_budget)?
                .forward(&field, &modes)?;
            let in_a_phi = a_phi_channels(phi);
            let mut measure: f64 = 0.0;
            let mut coeffs: f64 = 0.0;
            for (x, y) in a.channels.iter().zip(&b.channels) {
                let sign = if in_a_phi.contains(&x.m) { -1.0 } else { 1.0 };
                measure = measure.max(quadrature_mismatch(&x.coeffs.quad, &y.coeffs.quad));
                coeffs = coeffs
                    .max(sign_flip_defect(
                        &x.coeffs.continuum_values,
                        &y.coeffs.continuum_values,
                        sign,
                    ))
                    .max(sign_flip_defect(&x.coeffs.atom_values, &y.coeffs.atom_values, sign));
            }
            Ok([measure, coeffs])
        };
        push_quantities(out, id, base, tol, &["measure", "coefficients"], run());
    }
}

fn push_quantities<const N: usize>(
    out: &mut Vec<CheckResult>,
    id: &str,
    base: Params,
    tol: f64,
    names: &[&str; N],
    values: Result<[f64; N]>,
) {
    for (i, name) in names.iter().enumerate() {
        let mut p = base.clone();
        p.insert("quantity".into(), (*name).into());
        out.push(match &values {
            Ok(v) => CheckResult::new(id, p, v[i], tol),
            Err(e) => CheckResult::errored(id, p, tol, e.to_string()),
        });
    }
}

const CONTINUITY_KAPPAS: [f64; 3] = [1e-2, 5e-3, 2.5e-3];
/// The test function is supported on `[−3, 4]`, so it sees the atom at −1.
const CONTINUITY_SUPPORT: (f64, f64) = (-3.0, 4.0);

fn continuity_bump(e: f64) -> f64 {
    let (a, b) = CONTINUITY_SUPPORT;
    let x = (2.0 * e - a - b) / (b - a);
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - x * x).powi(4)
    }
}

fn integrate_bump(cfg: &SuiteConfig, kappa: f64, theta: f64) -> Result<f64> {
    let quad = discretize(
        &spectral_measure(ExtensionParams::new(kappa, theta)?),
        CONTINUITY_SUPPORT.1,
        cfg.node_budget,
    )?;
    Ok(quad.integrate(continuity_bump))
}

fn continuity(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac10-kappa-continuity";
    if cfg.kappas.is_empty() {
        return;
    }
    for &theta in &cfg.thetas {
        let mut defects = Vec::new();
        let mut run = || -> Result<f64> {
            let limit = integrate_bump(cfg, 0.0, theta)?;
            for kappa in CONTINUITY_KAPPAS {
                defects.push((integrate_bump(cfg, kappa, theta)? - limit).abs());
            }
            // Worst ratio of successive defects; equal zero defects count as
            // a decrease.
            Ok(defects
                .windows(2)
                .map(|w| if w[1] == 0.0 { 0.0 } else { w[1] / w[0] })
                .fold(0.0, f64::max))
        };
        let result = run();
        let mut p = params! {"theta" => theta, "kappas" => "0.01,0.005,0.0025"};
        p.insert(
            "defects".into(),
            defects.iter().map(|d| format!("{d:e}")).collect::<Vec<_>>().join(","),
        );
        out.push(match result {
            Ok(m) => CheckResult::new(id, p, m, cfg.tolerances.continuity_ratio),
            Err(e) => CheckResult::errored(id, p, cfg.tolerances.continuity_ratio, e.to_string()),
        });
    }
}

fn reduction(cfg: &SuiteConfig) -> ReductionConfig {
    ReductionConfig {
        radial_nodes: cfg.radial_nodes,
        ..ReductionConfig::default()
    }
}

/// The radial test bump times an axial bump, in the first A^φ channel.
fn separable_field(cfg: &SuiteConfig, phi: f64) -> Result<SeparableField> {
    let m0 = a_phi_channels(phi)[0];
    let psi: Arc<dyn RadialProfile> = Arc::new(GaussianBump::on(cfg.bump.0, cfg.bump.1)?);
    let chi: Arc<dyn RadialProfile> = Arc::new(GaussianBump::on(cfg.axial_bump.0, cfg.axial_bump.1)?);
    SeparableField::new(psi, chi, m0)
}

const SYMMETRY_PAIRS: [(f64, f64); 3] = [(0.7, 0.0), (0.0, 0.4), (-1.3, 0.25)];

/// Measured quantities plus what the symmetry pairs reuse.
type ThreeDRun = ([f64; 3], Params, Forward3d, ModeGrid, Arc<SeparableField>);

fn three_d(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac11-three-d";
    let tol = &cfg.tolerances;
    for &phi in &cfg.phis {
        let base = params! {"phi" => phi, "theta" => cfg.theta_3d};
        let names = ["cross_talk", "parseval", "apply_h"];
        let run = || -> Result<ThreeDRun> {
            let field = Arc::new(separable_field(cfg, phi)?);
            let spec = ThetaSpec::constant(phi, cfg.theta_3d)?;
            let m0 = field.m;
            // E_max from the 1D problem of the populated channel.
            let (_, psi) = test_bump(cfg)?;
            let (e_choice, _) = choose_e_max(cfg, spec.params(m0, 0.0)?, &psi)?;
            let engine = Forward3d::new(spec, cfg.bump, reduction(cfg), e_choice.value, cfg.node_budget)?;
            let norm = field_norm_sqr(field.as_ref(), engine.reduction());
            let mut coeffs: HashMap<u64, ModeCoefficients> = HashMap::new();
            let p_choice = doubling_rule(
                |p_max| {
                    let modes = ModeGrid::gauss(cfg.m_max, p_max, cfg.p_nodes)?;
                    let c = engine.forward(field.as_ref(), &modes)?;
                    let defect = (c.norm_sqr() - norm).abs() / norm;
                    coeffs.insert(p_max.to_bits(), c);
                    Ok(defect)
                },
                cfg.p_max_start,
                cfg.p_max_cap,
                tol.parseval_3d,
            )?;
            let modes = ModeGrid::gauss(cfg.m_max, p_choice.value, cfg.p_nodes)?;
            let c = coeffs
                .remove(&p_choice.value.to_bits())
                .expect("doubling evaluates its result");
            let norms = c.channel_norms();
            let own = norms.iter().find(|(m, _)| *m == m0).map_or(0.0, |x| x.1);
            let others = norms.iter().filter(|(m, _)| *m != m0).map(|x| x.1).fold(0.0, f64::max);
            let cross_talk = (others / own).sqrt();
            let h_field = HamiltonianField::new(field.clone(), phi)?;
            let lhs = engine.forward(&h_field, &modes)?;
            let apply = (lhs.distance_sqr(&apply_h(&c))? / norm).sqrt();
            let mut extra = BTreeMap::new();
            extra.insert("e_max".into(), format!("{}", e_choice.value));
            extra.insert("e_max_at_cap".into(), format!("{}", e_choice.warning));
            extra.insert("p_max".into(), format!("{}", p_choice.value));
            extra.insert("p_max_at_cap".into(), format!("{}", p_choice.warning));
            Ok(([cross_talk, p_choice.defect, apply], extra, engine, modes, field))
        };
        let tols = [tol.cross_talk, tol.parseval_3d, tol.apply_h];
        match run() {
            Ok((values, extra, engine, modes, field)) => {
                for i in 0..3 {
                    let mut p = base.clone();
                    p.extend(extra.clone());
                    p.insert("quantity".into(), names[i].into());
                    out.push(CheckResult::new(id, p, values[i], tols[i]));
                }
                for (alpha, beta) in SYMMETRY_PAIRS {
                    let mut p = base.clone();
                    p.extend(extra.clone());
                    p.insert("quantity".into(), "symmetry".into());
                    p.insert("alpha".into(), format!("{alpha}"));
                    p.insert("beta".into(), format!("{beta}"));
                    let field: Arc<dyn CylField> = field.clone();
                    record(out, id, p, tol.symmetry, || {
                        symmetry_defect(&engine, field, alpha, beta, &modes)
                    });
                }
            }
            Err(e) => {
                for i in 0..3 {
                    let mut p = base.clone();
                    p.insert("quantity".into(), names[i].into());
                    out.push(CheckResult::errored(id, p, tols[i], e.to_string()));
                }
            }
        }
    }
}

const CONTROL_KAPPA: f64 = 0.3;
const MISMATCHED_THETA: f64 = 1.0;

fn controls(cfg: &SuiteConfig, out: &mut Vec<CheckResult>) {
    let id = "ac12-negative-controls";
    if !cfg.negative_controls {
        return;
    }
    let tol = &cfg.tolerances;
    let base = params! {"kappa" => CONTROL_KAPPA, "theta" => "pi/2"};
    let run = || -> Result<(f64, f64)> {
        let (_, psi) = test_bump(cfg)?;
        let params = ExtensionParams::new(CONTROL_KAPPA, Theta::new(FRAC_PI_2))?;
        let plan = build_plan(cfg, params, &psi, e_cap(cfg))?;
        let norm = psi.norm_sqr();
        let c = plan.forward(&psi)?;
        let atom = plan.quadrature().atoms.first().copied();
        let atom = required(atom, "an atom")?;
        let oracle = atom.weight * c.atom_values[0].norm_sqr() / norm;
        let dropped = TransformPlan::new(params, plan.quadrature().without_atoms(), psi.grid.clone())?;
        let deficit = (norm - dropped.forward(&psi)?.norm_sqr()) / norm;
        Ok((deficit, oracle))
    };
    match run() {
        Ok((deficit, oracle)) => {
            let mut p = base.clone();
            p.insert("control".into(), "drop_atoms".into());
            p.insert("oracle".into(), format!("{oracle:e}"));
            out.push(CheckResult::control(
                id,
                p,
                deficit.abs(),
                tol.parseval,
                tol.control_defect,
            ));
            let mut p = base.clone();
            p.insert("quantity".into(), "deficit_vs_oracle".into());
            out.push(CheckResult::new(id, p, (deficit - oracle).abs(), tol.parseval));
        }
        Err(e) => {
            let mut p = base.clone();
            p.insert("control".into(), "drop_atoms".into());
            out.push(CheckResult::errored(id, p, tol.parseval, e.to_string()));
        }
    }
    let mut p = base;
    p.insert("control".into(), "theta_mismatch".into());
    p.insert("inverse_theta".into(), format!("{MISMATCHED_THETA}"));
    let run = || -> Result<f64> {
        let (_, psi) = test_bump(cfg)?;
        let params = ExtensionParams::new(CONTROL_KAPPA, FRAC_PI_2)?;
        let plan = build_plan(cfg, params, &psi, e_cap(cfg))?;
        let c = plan.forward(&psi)?;
        let wrong = ExtensionParams::new(CONTROL_KAPPA, MISMATCHED_THETA)?;
        let back = inverse(wrong, &c, &psi.grid)?;
        Ok((back.distance_sqr(&psi)? / psi.norm_sqr()).sqrt())
    };
    out.push(match run() {
        Ok(m) => CheckResult::control(id, p, m, tol.roundtrip, tol.control_defect),
        Err(e) => CheckResult {
            expected_failure: true,
            control_threshold: Some(tol.control_defect),
            ..CheckResult::errored(id, p, tol.roundtrip, e.to_string())
        },
    });
}
