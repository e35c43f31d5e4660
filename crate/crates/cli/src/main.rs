//! `ab-spectral`: evaluate eigenfunctions, tabulate spectral measures and
//! bound states, run forward transforms and the verification suite.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{parse_finite, parse_range, parse_theta, Range, ThetaArg};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] ab_spectral::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Parser, Debug)]
#[command(
    name = "ab-spectral",
    version,
    about = "Self-adjoint extensions and eigenfunction expansions of the 3D Aharonov-Bohm Hamiltonian",
    long_about = "Self-adjoint extensions and eigenfunction expansions of the 3D Aharonov-Bohm \
Hamiltonian H = (-i∇ - A)² with A = φ(-x₂, x₁, 0)/r².\n\n\
Each angular channel m reduces to the radial operator -∂²_r + (κ² - 1/4)/r² with κ = m + φ. \
Channels with |κ| < 1 admit a one-parameter family of boundary conditions labelled by an angle θ; \
pass `--theta kappa` for the atom-free angle θ = πκ/2.\n\n\
Exit status: 0 success, 1 failed checks, 2 usage or configuration error.\n\
AB_SPECTRAL_THREADS caps the number of worker threads."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Tabulate a radial eigenfunction and its r-derivative.
    #[command(
        long_about = "Tabulate a radial eigenfunction and its r-derivative as CSV `r,u,du_dr`.\n\n\
For |κ| < 1 the kernel is u^κ_θ(E|r) = u^κ(E|r) cos(θ - πκ/2) + w^κ(E|r) sin(θ - πκ/2), built from the \
solution u^κ(E|r) = r^{1/2+κ} 𝒳_κ(r²E) and its partner w^κ, normalized so that their Wronskian \
is 2/π. 𝒳_κ(ζ) = Σ (-ζ/4)ⁿ / (2^κ n! Γ(κ+n+1)) is entire in ζ. For |κ| ≥ 1 the angle is not needed and the kernel is u^{|κ|}(E|r).\n\n\
`--energy bound` evaluates the square-integrable solution at the bound-state energy E = E_{κ,θ}; \
it decays like e^{-√|E_b| r}."
    )]
    Eigenfunction(EigenfunctionArgs),
    /// Tabulate the spectral measure of a radial extension.
    #[command(
        long_about = "Tabulate the spectral measure of a radial extension as CSV `E,density`, \
preceded by one `# atom E_b weight` comment line per bound state.\n\n\
For |κ| ≥ 1 (and for θ = πκ/2) the density is E^{|κ|}/2 with no atom. Otherwise the density is the \
extension's absolutely continuous part, and the atom sits at E_b = -(sin(θ+πκ/2)/sin(θ-πκ/2))^{1/κ} \
(E_b = -e^{π cot θ} at κ = 0) whenever the extension has a bound state.\n\n\
The parameters come either from `--kappa/--theta` or from `--config/--phi` plus a channel `--m` and axial momentum `--p`."
    )]
    Measure(MeasureArgs),
    /// Tabulate the bound states of the A^φ channels.
    #[command(long_about = "Tabulate the bound states of the channels with |m + φ| < 1 as CSV \
`m,kappa,E_b,weight,theta`, one row per channel (or constant θ piece) that carries an atom.\n\n\
E_b = -(sin(θ+πκ/2)/sin(θ-πκ/2))^{1/κ}, or -e^{π cot θ} at κ = 0; `weight` is the mass of the atom in the \
channel's spectral measure. An atom-free specification prints only the header.")]
    BoundStates(BoundStatesArgs),
    /// Forward transform of a radial function or of a 3D field.
    #[command(long_about = "Forward eigenfunction transform.\n\n\
1d: c(E) = ∫ kernel(E|r) ψ(r) dr on the nodes of the discretized spectral measure, plus one \
coefficient per bound state. Output CSV `E,re,im` preceded by `# atom E_b weight re im` lines. The \
summary line reports the Parseval defect |‖ψ‖² - ‖c‖²|/‖ψ‖² and the roundtrip defect \
‖U*Uψ - ψ‖/‖ψ‖.\n\n\
3d: the field is reduced to channels Φ̃(m,p|r) = (√r/2π) ∫dx₃ ∫dφ Φ e^{-ipx₃-imφ} and each channel is \
transformed with the extension of its (m,p). Output CSV `m,p,E,re,im` preceded by \
`# atom m p E_b weight re im` lines; channels carrying no more than `--min-share` of the norm are left \
out. The summary reports the 3D Parseval defect.\n\n\
Radial input is a named family (`gauss:a:b`, `cosine:a:b:omega`) or a CSV `r,re,im[,weight]`.")]
    Transform(TransformArgs),
    /// Run the verification suite and write a JSON report.
    #[command(long_about = "Run every verification check and write a JSON array of results.\n\n\
The checks cover the Wronskian 2/π, the half-order Bessel closed forms and an exact rational series, \
second-order convergence of the ODE residual, bound-state energies and weights, collapse of the \
density to E^κ/2 at θ = πκ/2, Parseval and roundtrip unitarity, diagonalization of the radial \
operator, the κ = 1/2 sine transform, θ → θ + π periodicity, continuity of the measures at κ = 0, \
and the 3D channel selectivity, Parseval identity, symmetry covariance and consistency of H.\n\n\
Suite parameters come from the `[verify]` section of `--config`. With `--negative-controls` the \
report also holds deliberately broken runs flagged as expected failures. Exit status is 0 iff every \
check passed and every control failed as expected.")]
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct OutputArg {
    /// Output file, written atomically; standard output when absent.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EigenfunctionArgs {
    /// Order κ of the radial operator.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    kappa: f64,
    /// Extension angle θ, or `kappa` for πκ/2. Required when |κ| < 1.
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    theta: Option<ThetaArg>,
    /// Energy E, or `bound` for the bound-state energy of the extension.
    #[arg(long, allow_hyphen_values = true)]
    energy: String,
    /// Radial samples `start:stop:count`, all positive.
    #[arg(long, value_parser = parse_range)]
    r: Range,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct ParamArgs {
    /// Order κ; alternatively give a flux with `--phi` or `--config` and a channel `--m`.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    kappa: Option<f64>,
    /// Extension angle θ, or `kappa` for πκ/2.
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    theta: Option<ThetaArg>,
    /// TOML configuration with `phi`, `[grid]`, `[[channel]]` and `[verify]` sections.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Flux φ; overrides the configuration.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// Angular channel m, used with a flux.
    #[arg(long, allow_hyphen_values = true)]
    m: Option<i64>,
    /// Axial momentum p, used with a flux.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true, default_value_t = 0.0)]
    p: f64,
}

#[derive(Args, Debug)]
struct MeasureArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Energies `start:stop:count`.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    energy: Range,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct BoundStatesArgs {
    /// TOML configuration with `phi` and `[[channel]]` entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Flux φ; overrides the configuration.
    #[arg(long, value_parser = parse_finite, allow_hyphen_values = true)]
    phi: Option<f64>,
    /// One angle for every A^φ channel, or `kappa` for the atom-free angles.
    #[arg(long, value_parser = parse_theta, allow_hyphen_values = true)]
    theta: Option<ThetaArg>,
    /// Largest |m| listed; defaults to `grid.m_max`.
    #[arg(long)]
    m_max: Option<u32>,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(clap::ValueEnum, Clone, Copy, Debug, PartialEq)]
enum Mode {
    #[value(name = "1d")]
    OneD,
    #[value(name = "3d")]
    ThreeD,
}

#[derive(Args, Debug)]
struct TransformArgs {
    #[command(flatten)]
    params: ParamArgs,
    #[arg(long, value_enum, default_value = "1d")]
    mode: Mode,
    /// Named radial family: `gauss:a:b` or `cosine:a:b:omega`.
    #[arg(long, conflicts_with = "input")]
    family: Option<String>,
    /// Radial samples as CSV `r,re,im[,weight]` (1d only).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Axial profile `gauss:a:b` of a separable 3D field.
    #[arg(long, default_value = "gauss:-2:2", allow_hyphen_values = true)]
    axial: String,
    /// Angular channel of a separable 3D field; defaults to the first A^φ channel.
    #[arg(long, allow_hyphen_values = true)]
    field_m: Option<i64>,
    /// Off-axis blob `r0:angle:z0:radius:sigma` as 3D field instead of a separable one.
    #[arg(long, conflicts_with = "family", allow_hyphen_values = true)]
    blob: Option<String>,
    /// Upper end of the discretized spectrum; overrides `grid.e_max`.
    #[arg(long, value_parser = parse_finite)]
    e_max: Option<f64>,
    /// Channels with at most this share of the norm are left out (3d).
    #[arg(long, value_parser = parse_finite, default_value_t = 1e-20)]
    min_share: f64,
    #[command(flatten)]
    out: OutputArg,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// TOML configuration; its `[verify]` section sets the suite parameters.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Add the negative controls to the report.
    #[arg(long)]
    negative_controls: bool,
    /// Report path; overrides `verify.report_path`. Standard output when neither is set.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(value) = std::env::var("AB_SPECTRAL_THREADS") else {
        return Ok(());
    };
    let n: usize = match value.trim().parse() {
        Ok(n) if n > 0 => n,
        _ => {
            return Err(CliError::Usage(format!(
                "AB_SPECTRAL_THREADS must be a positive integer, got {value:?}"
            )))
        }
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Usage(format!("cannot size the thread pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = configure_threads().and_then(|()| match cli.command {
        Command::Eigenfunction(a) => commands::eigenfunction(a),
        Command::Measure(a) => commands::measure(a),
        Command::BoundStates(a) => commands::bound_states(a),
        Command::Transform(a) => commands::transform(a),
        Command::Verify(a) => commands::verify(a),
    });
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
