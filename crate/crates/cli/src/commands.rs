use std::io::{self, BufWriter, Write};
use std::path::Path;
use std::sync::Arc;

use ab_spectral::ab3d::{
    a_phi_channels, bound_state_table, field_norm_sqr, write_bound_states_csv, BlobField, CylField, Forward3d,
    ModeGrid, ReductionConfig, SeparableField, ThetaSpec,
};
use ab_spectral::measures::{bound_state_energy, channel_measure, discretize, spectral_measure, ExtensionParams};
use ab_spectral::transform1d::{
    atom_kernel, e_max_cap, kernel, parse_family, GaussianBump, RadialFunction, RadialProfile, TransformPlan,
};
use ab_spectral::verify::{doubling_rule, run_suite, suite_passed, write_report};

use crate::config::{parse_numbers, RunConfig, ThetaArg};
use crate::{BoundStatesArgs, CliError, EigenfunctionArgs, MeasureArgs, Mode, ParamArgs, TransformArgs, VerifyArgs};

/// Target of the E_max doubling for 1D transforms.
const TRANSFORM_TOLERANCE: f64 = 1e-6;

/// Writes to `path` through a temporary file in the same directory and a
/// rename, so readers never see a partial file. Standard output otherwise.
fn emit<F>(path: Option<&Path>, write: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        None => {
            let stdout = io::stdout();
            let mut out = BufWriter::new(stdout.lock());
            write(&mut out)?;
            out.flush()?;
        }
        Some(path) => {
            let dir = match path.parent() {
                Some(d) if !d.as_os_str().is_empty() => d,
                _ => Path::new("."),
            };
            let tmp = tempfile::NamedTempFile::new_in(dir)?;
            let mut out = BufWriter::new(tmp);
            write(&mut out)?;
            let tmp = out.into_inner().map_err(|e| e.into_error())?;
            tmp.persist(path).map_err(|e| e.error)?;
        }
    }
    Ok(())
}

/// Summary lines go to standard output unless the data itself does.
fn summary(to_file: bool, line: &str) {
    if to_file {
        println!("{line}");
    } else {
        eprintln!("{line}");
    }
}

fn single_params(kappa: f64, theta: Option<ThetaArg>) -> Result<ExtensionParams, CliError> {
    if kappa.abs() >= 1.0 {
        return Ok(ExtensionParams::free(kappa)?);
    }
    let theta = theta.ok_or_else(|| CliError::Usage(format!("kappa = {kappa} has |kappa| < 1 and needs --theta")))?;
    Ok(ExtensionParams::new(kappa, theta.resolve(kappa))?)
}

/// Parameters from `--kappa/--theta`, or from a flux, a channel and `p`.
fn resolve_params(args: &ParamArgs, cfg: &RunConfig) -> Result<ExtensionParams, CliError> {
    if let Some(kappa) = args.kappa {
        if args.m.is_some() || args.phi.is_some() {
            return Err(CliError::Usage(
                "give either --kappa or a flux with --m, not both".into(),
            ));
        }
        return single_params(kappa, args.theta);
    }
    let m = args
        .m
        .ok_or_else(|| CliError::Usage("pass --kappa, or --m together with a flux".into()))?;
    let spec = cfg.theta_spec(args.phi, args.theta)?;
    Ok(channel_measure(spec.phi(), &spec, m, args.p)?.params)
}

pub fn eigenfunction(args: EigenfunctionArgs) -> Result<bool, CliError> {
    if args.r.start <= 0.0 {
        return Err(CliError::Usage(format!(
            "radial samples must be positive; r = {} lies on the axis or beyond",
            args.r.start
        )));
    }
    let params = single_params(args.kappa, args.theta)?;
    let rows: Vec<(f64, f64, f64)> = if args.energy == "bound" {
        let energy = if params.is_extension_family() {
            bound_state_energy(params)?
        } else {
            None
        };
        let energy = energy.ok_or_else(|| CliError::Usage("this extension has no bound state".into()))?;
        sample(&args.r.points(), |r| atom_kernel(params, energy, r))?
    } else {
        let energy = crate::config::parse_finite(&args.energy).map_err(CliError::Usage)?;
        sample(&args.r.points(), |r| kernel(params, energy, r))?
    };
    emit(args.out.output.as_deref(), |out| {
        writeln!(out, "r,u,du_dr")?;
        for (r, u, du) in &rows {
            writeln!(out, "{r:e},{u:e},{du:e}")?;
        }
        Ok(())
    })?;
    Ok(true)
}

fn sample<F>(rs: &[f64], f: F) -> Result<Vec<(f64, f64, f64)>, CliError>
where
    F: Fn(f64) -> ab_spectral::Result<ab_spectral::special_fns::ValueWithDerivative>,
{
    rs.iter()
        .map(|&r| f(r).map(|v| (r, v.value, v.d_dr)).map_err(CliError::from))
        .collect()
}

pub fn measure(args: MeasureArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::load(args.params.config.as_deref())?;
    let params = resolve_params(&args.params, &cfg)?;
    let measure = spectral_measure(params);
    let energies = args.energy.points();
    emit(args.out.output.as_deref(), |out| measure.write_csv(&energies, out))?;
    Ok(true)
}

pub fn bound_states(args: BoundStatesArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let spec = cfg.theta_spec(args.phi, args.theta)?;
    let rows = bound_state_table(&spec, args.m_max.unwrap_or(cfg.grid.m_max))?;
    emit(args.out.output.as_deref(), |out| write_bound_states_csv(&rows, out))?;
    Ok(true)
}

pub fn transform(args: TransformArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::load(args.params.config.as_deref())?;
    if let Some(e) = args.e_max {
        if e <= 0.0 {
            return Err(CliError::Usage(format!("--e-max must be positive, got {e}")));
        }
    }
    match args.mode {
        Mode::OneD => transform_1d(&args, &cfg),
        Mode::ThreeD => transform_3d(&args, &cfg),
    }
}

fn radial_input(args: &TransformArgs, cfg: &RunConfig) -> Result<RadialFunction, CliError> {
    match (&args.family, &args.input) {
        (Some(family), None) => Ok(RadialFunction::from_profile(
            parse_family(family)?.as_ref(),
            cfg.grid.radial_nodes,
        )?),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
            RadialFunction::read_csv(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
        }
        _ => Err(CliError::Usage("pass exactly one of --family and --input".into())),
    }
}

fn transform_1d(args: &TransformArgs, cfg: &RunConfig) -> Result<bool, CliError> {
    if args.blob.is_some() || args.field_m.is_some() {
        return Err(CliError::Usage("--blob and --field-m apply to --mode 3d only".into()));
    }
    let params = resolve_params(&args.params, cfg)?;
    let psi = radial_input(args, cfg)?;
    let measure = spectral_measure(params);
    let budget = cfg.grid.node_budget;
    let plan_at = |e_max: f64| -> ab_spectral::Result<TransformPlan> {
        TransformPlan::new(params, discretize(&measure, e_max, budget)?, psi.grid.clone())
    };
    let (e_max, warning) = match args.e_max.or(cfg.grid.e_max) {
        Some(e_max) => (e_max, false),
        None => {
            let r_max = psi.r_nodes().last().copied().unwrap_or(1.0);
            let cap = e_max_cap(r_max);
            let defect = |e| plan_at(e)?.unitarity(&psi).map(|d| d.max());
            let choice = doubling_rule(defect, cap / 16.0, cap, TRANSFORM_TOLERANCE)?;
            (choice.value, choice.warning)
        }
    };
    let plan = plan_at(e_max)?;
    let coeffs = plan.forward(&psi)?;
    let defects = plan.unitarity(&psi)?;
    let quad = plan.quadrature();
    let to_file = args.out.output.is_some();
    emit(args.out.output.as_deref(), |out| coeffs.write_csv(out))?;
    summary(
        to_file,
        &format!(
            "parseval_defect={:e} roundtrip_defect={:e} e_max={:e} continuum_nodes={} atoms={}",
            defects.parseval,
            defects.roundtrip,
            e_max,
            quad.e_nodes.len(),
            quad.atoms.len()
        ),
    );
    if warning {
        eprintln!("warning: E_max reached the series cap before the defects settled");
    }
    Ok(true)
}

fn axial_profile(spec: &str) -> Result<Arc<dyn RadialProfile>, CliError> {
    let Some(rest) = spec.strip_prefix("gauss:") else {
        return Err(CliError::Usage(format!("axial profile {spec:?} must be gauss:a:b")));
    };
    let v = parse_numbers(rest, 2, "--axial")?;
    Ok(Arc::new(GaussianBump::on(v[0], v[1])?))
}

fn field_3d(args: &TransformArgs, spec: &ThetaSpec) -> Result<Arc<dyn CylField>, CliError> {
    if args.input.is_some() {
        return Err(CliError::Usage(
            "--mode 3d takes --family or --blob, not --input".into(),
        ));
    }
    if let Some(blob) = &args.blob {
        let v = parse_numbers(blob, 5, "--blob")?;
        return Ok(Arc::new(BlobField::new(v[0], v[1], v[2], v[3], v[4])?));
    }
    let family = args
        .family
        .as_deref()
        .ok_or_else(|| CliError::Usage("--mode 3d needs --family or --blob".into()))?;
    let psi: Arc<dyn RadialProfile> = Arc::from(parse_family(family)?);
    let m = match args.field_m {
        Some(m) => m,
        None => a_phi_channels(spec.phi())[0],
    };
    Ok(Arc::new(SeparableField::new(psi, axial_profile(&args.axial)?, m)?))
}

fn transform_3d(args: &TransformArgs, cfg: &RunConfig) -> Result<bool, CliError> {
    let p = &args.params;
    if p.kappa.is_some() || p.m.is_some() {
        return Err(CliError::Usage(
            "--mode 3d takes a flux and angles, not --kappa or --m".into(),
        ));
    }
    let spec = cfg.theta_spec(p.phi, p.theta)?;
    let field = field_3d(args, &spec)?;
    let g = &cfg.grid;
    let reduction = ReductionConfig {
        radial_nodes: g.radial_nodes,
        angular_nodes: g.angular_nodes,
        axial_nodes: g.axial_nodes,
    };
    let support = field.radial_support();
    let e_max = args.e_max.or(g.e_max).unwrap_or_else(|| e_max_cap(support.1));
    let modes = ModeGrid::gauss(g.m_max, g.p_max, g.p_nodes)?;
    let engine = Forward3d::new(spec, support, reduction, e_max, g.node_budget)?;
    let coeffs = engine.forward(field.as_ref(), &modes)?;
    let norm = field_norm_sqr(field.as_ref(), &reduction);
    let defect = (coeffs.norm_sqr() - norm).abs() / norm;
    let to_file = args.out.output.is_some();
    emit(args.out.output.as_deref(), |out| coeffs.write_csv(args.min_share, out))?;
    summary(
        to_file,
        &format!(
            "parseval_defect_3d={defect:e} e_max={e_max:e} m_max={} p_max={:e} p_nodes={}",
            g.m_max, g.p_max, g.p_nodes
        ),
    );
    Ok(true)
}

pub fn verify(args: VerifyArgs) -> Result<bool, CliError> {
    let cfg = RunConfig::load(args.config.as_deref())?;
    let mut suite = cfg.verify.clone().unwrap_or_default();
    if args.negative_controls {
        suite.negative_controls = true;
    }
    suite.validate()?;
    let path = args.output.clone().or_else(|| suite.report_path.clone());
    let results = run_suite(&suite)?;
    emit(path.as_deref(), |out| write_report(&results, out))?;
    let passed = suite_passed(&results);
    let failed = results.iter().filter(|r| !r.ok()).count();
    summary(
        path.is_some(),
        &format!(
            "{} results, {} not ok: {}",
            results.len(),
            failed,
            if passed { "PASS" } else { "FAIL" }
        ),
    );
    Ok(passed)
}
