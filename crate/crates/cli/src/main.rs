//! Command-line front end for the static perfect-fluid constructions.

mod config;
mod emit;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use statfluid::catalog;
use statfluid::geodesics::completeness_probe;
use statfluid::ode::{integrate, OdeOptions, OdeSolution, Termination};
use statfluid::reduction::{edo_residual, mu_of, rho_of, IntegratorConfig, RhoMode};
use statfluid::verifier::{verify_spacetime, FdConfig};

use emit::{csv_line, fmt_csv_f64, portrait_svg, write_output, Json};

/// Why a run failed, mapped onto the stable exit-code contract:
/// 1 usage, 2 numerical failure, 3 verification fail.
pub enum Failure {
    Usage(String),
    Numerical(String),
    Verification,
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Numerical(_) => 2,
            Failure::Verification => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "statfluid",
    version,
    about = "Static conformally flat perfect-fluid spacetimes: solve, verify, probe"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List the closed-form catalog, optionally filtered by id.
    Catalog(CatalogArgs),
    /// Sample profiles and fluid fields on a uniform grid.
    Solve(SolveArgs),
    /// Check a spacetime against the finite-difference curvature oracle.
    Verify(VerifyArgs),
    /// Integrate the lapse equation of the secant family from a grid of
    /// initial conditions.
    PhasePortrait(PortraitArgs),
    /// Seeded geodesic completeness probe.
    Geodesics(GeodesicArgs),
}

/// Flags that pick and parameterize the spacetime.
#[derive(Args)]
pub struct SpecArgs {
    /// Spatial dimension (default 3).
    #[arg(long)]
    n: Option<usize>,
    /// Signature pattern, one char per dimension, e.g. "-++".
    #[arg(long, allow_hyphen_values = true)]
    signature: Option<String>,
    /// Comma-separated components of the direction α (default e_n).
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<String>,
    /// Catalog id (power_law, exponential, linear_reciprocal,
    /// trigonometric, secant) or "flat".
    #[arg(long)]
    example: Option<String>,
    /// Family parameter, repeatable: --param a=0.5
    #[arg(long = "param", value_name = "K=V")]
    params: Vec<String>,
    /// Working interval in ξ.
    #[arg(long, value_name = "A:B", allow_hyphen_values = true)]
    interval: Option<String>,
    /// Lapse value at the anchor when the lapse is integrated numerically.
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    f0: f64,
    /// Lapse slope at the anchor when the lapse is integrated numerically.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    df0: f64,
    /// Negative control: warp f by 1 + AMP·sin(ξ − ξ_mid).
    #[arg(long, value_name = "AMP", allow_hyphen_values = true)]
    perturb_f: Option<f64>,
}

#[derive(Args)]
struct CatalogArgs {
    /// Show only this id; unknown ids give an empty listing.
    id: Option<String>,
    /// csv (default) or json.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Number of grid rows.
    #[arg(long, default_value_t = 200)]
    samples: usize,
    /// Relative tolerance for a numerically integrated lapse.
    #[arg(long)]
    tol: Option<f64>,
    /// csv (default) or json.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Interior grid points to check.
    #[arg(long, default_value_t = 50)]
    samples: usize,
    /// Pass threshold on every residual.
    #[arg(long, default_value_t = 5e-4)]
    tol: f64,
    /// Finite-difference step.
    #[arg(long, default_value_t = 1e-3)]
    h: f64,
    /// One level of Richardson extrapolation.
    #[arg(long)]
    richardson: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PortraitArgs {
    /// Per-axis count of the (f(0), f′(0)) grid.
    #[arg(long, default_value_t = 5)]
    grid: usize,
    /// Range of f(0).
    #[arg(long, value_name = "A:B", default_value = "-1:1", allow_hyphen_values = true)]
    f0_range: String,
    /// Range of f′(0).
    #[arg(long, value_name = "A:B", default_value = "-1:1", allow_hyphen_values = true)]
    df0_range: String,
    /// ξ window; must contain 0 and stay inside (−π, π).
    #[arg(long, value_name = "A:B", allow_hyphen_values = true)]
    interval: Option<String>,
    /// Sample rows per trajectory.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Integrator relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// csv (default) or json.
    #[arg(long, default_value = "csv")]
    format: String,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write a self-contained SVG of the (f, f′) plane.
    #[arg(long, value_name = "PATH")]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    spec: SpecArgs,
    /// Number of seeded initial conditions.
    #[arg(long, default_value_t = 100)]
    samples: usize,
    /// Affine span per trajectory.
    #[arg(long, default_value_t = 1e3)]
    lambda_max: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Integrator relative tolerance.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let kind = e.kind();
            if kind == ErrorKind::DisplayHelp || kind == ErrorKind::DisplayVersion {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    let result = match cli.command {
        Cmd::Catalog(args) => cmd_catalog(args),
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::PhasePortrait(args) => cmd_phase_portrait(args),
        Cmd::Geodesics(args) => cmd_geodesics(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            match &failure {
                Failure::Usage(msg) => eprintln!("error: {msg}"),
                Failure::Numerical(msg) => eprintln!("error: {msg}"),
                Failure::Verification => eprintln!("verification failed"),
            }
            ExitCode::from(failure.code())
        }
    }
}

fn io_failure(e: std::io::Error) -> Failure {
    Failure::Numerical(format!("cannot write output: {e}"))
}

fn check_format(format: &str) -> Result<(), Failure> {
    match format {
        "csv" | "json" => Ok(()),
        other => Err(Failure::Usage(format!(
            "--format must be csv or json, got {other:?}"
        ))),
    }
}

fn cmd_catalog(args: CatalogArgs) -> Result<(), Failure> {
    check_format(&args.format)?;
    let mut entries = catalog::listing::<f64>();
    entries.sort_by_key(|e| e.id.as_str());
    if let Some(id) = &args.id {
        entries.retain(|e| e.id.as_str() == id);
    }
    let text = if args.format == "json" {
        let items = entries
            .iter()
            .map(|e| {
                Json::Obj(vec![
                    ("id", Json::Str(e.id.to_string())),
                    ("n", Json::Int(e.n as i64)),
                    ("alpha_norm2", Json::Num(e.alpha_norm2)),
                    (
                        "domain",
                        Json::Arr(vec![Json::Num(e.domain.0), Json::Num(e.domain.1)]),
                    ),
                    (
                        "params",
                        Json::Obj(
                            e.params
                                .iter()
                                .map(|(k, v)| (*k, Json::Num(*v)))
                                .collect(),
                        ),
                    ),
                    (
                        "errata",
                        Json::Arr(
                            e.notes
                                .iter()
                                .map(|n| Json::Str(n.as_str().to_string()))
                                .collect(),
                        ),
                    ),
                    ("has_closed_form_lapse", Json::Bool(e.f.is_some())),
                ])
            })
            .collect();
        Json::Arr(items).render()
    } else {
        let mut out = csv_line(&[
            "id".into(),
            "n".into(),
            "alpha_norm2".into(),
            "domain_lo".into(),
            "domain_hi".into(),
            "params".into(),
            "errata".into(),
        ]);
        for e in &entries {
            let params = e
                .params
                .iter()
                .map(|(k, v)| format!("{k}={}", fmt_csv_f64(*v)))
                .collect::<Vec<_>>()
                .join(" ");
            let errata = e
                .notes
                .iter()
                .map(|n| n.as_str())
                .collect::<Vec<_>>()
                .join("|");
            out.push_str(&csv_line(&[
                e.id.to_string(),
                e.n.to_string(),
                fmt_csv_f64(e.alpha_norm2),
                fmt_csv_f64(e.domain.0),
                fmt_csv_f64(e.domain.1),
                params,
                errata,
            ]));
        }
        out
    };
    write_output(args.out.as_deref(), &text).map_err(io_failure)
}

fn cmd_solve(args: SolveArgs) -> Result<(), Failure> {
    check_format(&args.format)?;
    let built = config::build(&args.spec, args.tol.unwrap_or(1e-10))?;
    if built.lapse_truncated {
        eprintln!(
            "note: lapse integration stopped before the requested interval; \
             sampling the truncated domain ({}, {})",
            built.interval.0, built.interval.1
        );
    }
    let grid = built.sample_grid(args.samples);
    let n = built.n;
    let w = built.alpha_norm2;

    const COLUMNS: [&str; 11] = [
        "xi", "phi", "dphi", "d2phi", "f", "df", "d2f", "mu", "rho", "edo_residual", "dominant",
    ];
    let mut rows: Vec<(Vec<f64>, bool)> = Vec::with_capacity(grid.len());
    for &xi in &grid {
        let phi = built.phi.jet(xi);
        let f = built.f.jet(xi);
        let mu = mu_of(n, w, &phi);
        let rho = rho_of(n, w, &phi, &f, RhoMode::Direct).unwrap_or(f64::NAN);
        let residual = edo_residual(n, &phi, &f);
        let dominant = mu > rho.abs();
        rows.push((
            vec![
                xi, phi.value, phi.d1, phi.d2, f.value, f.d1, f.d2, mu, rho, residual,
            ],
            dominant,
        ));
    }

    let text = if args.format == "json" {
        let rows_json = rows
            .iter()
            .map(|(nums, dom)| {
                let mut items: Vec<Json> = nums.iter().map(|x| Json::Num(*x)).collect();
                items.push(Json::Bool(*dom));
                Json::Arr(items)
            })
            .collect();
        Json::Obj(vec![
            (
                "columns",
                Json::Arr(COLUMNS.iter().map(|c| Json::Str(c.to_string())).collect()),
            ),
            ("rows", Json::Arr(rows_json)),
        ])
        .render()
    } else {
        let mut out = csv_line(&COLUMNS.map(String::from));
        for (nums, dom) in &rows {
            let mut fields: Vec<String> = nums.iter().map(|x| fmt_csv_f64(*x)).collect();
            fields.push(dom.to_string());
            out.push_str(&csv_line(&fields));
        }
        out
    };
    write_output(args.out.as_deref(), &text).map_err(io_failure)
}

fn cmd_verify(args: VerifyArgs) -> Result<(), Failure> {
    let built = config::build(&args.spec, 1e-10)?;
    let spec = built.spacetime()?;
    let fd = FdConfig {
        h: args.h,
        richardson: args.richardson,
        tol: args.tol,
        ..FdConfig::default()
    }
    .with_uniform_grid(&spec, args.samples);
    let report = verify_spacetime(&spec, &fd)
        .map_err(|e| Failure::Numerical(format!("verification aborted: {e}")))?;
    let pass = report.pass(args.tol);

    let skipped = report
        .skipped
        .iter()
        .map(|s| {
            Json::Obj(vec![
                ("xi", Json::Num(s.xi)),
                ("reason", Json::Str(s.reason.clone())),
            ])
        })
        .collect();
    let vacuum_degenerate =
        report.points_checked > 0 && report.vacuum_points == report.points_checked;
    let doc = Json::Obj(vec![
        (
            "spec",
            Json::Obj(vec![
                ("n", Json::Int(built.n as i64)),
                ("signature", Json::Str(built.signature.to_string())),
                (
                    "alpha",
                    Json::Arr(built.alpha.iter().map(|a| Json::Num(*a)).collect()),
                ),
                ("example", Json::Str(built.example.clone())),
                (
                    "interval",
                    Json::Arr(vec![
                        Json::Num(built.interval.0),
                        Json::Num(built.interval.1),
                    ]),
                ),
            ]),
        ),
        (
            "grid",
            Json::Obj(vec![
                ("points", Json::Int(args.samples as i64)),
                ("h", Json::Num(report.h_used)),
                ("richardson", Json::Bool(report.richardson)),
            ]),
        ),
        (
            "results",
            Json::Obj(vec![
                (
                    "max_traceless_residual",
                    Json::Num(report.max_traceless_residual),
                ),
                ("max_mu_error", Json::Num(report.max_mu_error)),
                ("max_rho_error", Json::Num(report.max_rho_error)),
                ("eigen_ok", Json::Bool(report.eigen_ok)),
                ("points_checked", Json::Int(report.points_checked as i64)),
                ("vacuum_degenerate", Json::Bool(vacuum_degenerate)),
                ("isotropic_points", Json::Int(report.isotropic_points as i64)),
                ("skipped", Json::Arr(skipped)),
            ]),
        ),
        ("pass", Json::Bool(pass)),
    ]);
    write_output(args.out.as_deref(), &doc.render()).map_err(io_failure)?;
    if pass {
        Ok(())
    } else {
        Err(Failure::Verification)
    }
}

/// `f″ = −2 tan(ξ/2) f′ + ½(1 + 3 tan²(ξ/2)) f`, the lapse equation of the
/// canonical secant-family profile.
fn portrait_rhs(xi: f64, y: &[f64], dy: &mut [f64]) {
    let t = (0.5 * xi).tan();
    dy[0] = y[1];
    dy[1] = -2.0 * t * y[1] + 0.5 * (1.0 + 3.0 * t * t) * y[0];
}

fn side_reason(sol: &OdeSolution<f64>) -> &'static str {
    match sol.termination {
        Termination::Completed => "complete",
        Termination::StepCollapse { .. } => "step-collapse",
        Termination::MaxSteps { .. } => "step-limit",
        Termination::Event { .. } => "event",
    }
}

fn cmd_phase_portrait(args: PortraitArgs) -> Result<(), Failure> {
    check_format(&args.format)?;
    let pi = std::f64::consts::PI;
    let (lo, hi) = match &args.interval {
        Some(text) => config::parse_range(text, "--interval")?,
        None => (-pi + 0.05, pi - 0.05),
    };
    let lo = lo.max(-pi + 1e-6);
    let hi = hi.min(pi - 1e-6);
    if !(lo < 0.0 && 0.0 < hi) {
        return Err(Failure::Usage(format!(
            "--interval must straddle 0 inside (-pi, pi), got {lo}:{hi}"
        )));
    }
    let (f0_lo, f0_hi) = config::parse_range(&args.f0_range, "--f0-range")?;
    let (df0_lo, df0_hi) = config::parse_range(&args.df0_range, "--df0-range")?;
    if args.grid == 0 {
        return Err(Failure::Usage("--grid must be at least 1".into()));
    }
    let level = |a: f64, b: f64, k: usize| {
        if args.grid == 1 {
            0.5 * (a + b)
        } else {
            a + (b - a) * k as f64 / (args.grid - 1) as f64
        }
    };
    let opts = OdeOptions {
        rel_tol: args.tol.unwrap_or(1e-10),
        abs_tol: args.tol.unwrap_or(1e-10) * 1e-2,
        ..OdeOptions::default()
    };

    struct Traj {
        id: usize,
        f0: f64,
        df0: f64,
        rows: Vec<(f64, f64, f64, &'static str, f64)>,
    }
    let mut trajectories = Vec::new();
    for i_f0 in 0..args.grid {
        for i_df0 in 0..args.grid {
            let id = i_f0 * args.grid + i_df0;
            let f0 = level(f0_lo, f0_hi, i_f0);
            let df0 = level(df0_lo, df0_hi, i_df0);
            let y0 = [f0, df0];
            let left = integrate(portrait_rhs, 0.0, &y0, lo, &opts, &[])
                .map_err(|e| Failure::Numerical(format!("trajectory {id}: {e}")))?;
            let right = integrate(portrait_rhs, 0.0, &y0, hi, &opts, &[])
                .map_err(|e| Failure::Numerical(format!("trajectory {id}: {e}")))?;

            let mut rows = Vec::with_capacity(args.samples);
            for k in 0..args.samples.max(2) {
                let xi = lo + (hi - lo) * k as f64 / (args.samples.max(2) - 1) as f64;
                let (sol, reason) = if xi < 0.0 {
                    (&left, side_reason(&left))
                } else {
                    (&right, side_reason(&right))
                };
                if !sol.contains(xi) {
                    continue;
                }
                let y = sol.eval(xi);
                rows.push((xi, y[0], y[1], reason, sol.span().1));
            }
            trajectories.push(Traj { id, f0, df0, rows });
        }
    }

    let text = if args.format == "json" {
        let items = trajectories
            .iter()
            .map(|t| {
                Json::Obj(vec![
                    ("traj_id", Json::Int(t.id as i64)),
                    ("f0", Json::Num(t.f0)),
                    ("df0", Json::Num(t.df0)),
                    (
                        "samples",
                        Json::Arr(
                            t.rows
                                .iter()
                                .map(|(xi, f, df, _, _)| {
                                    Json::Arr(vec![
                                        Json::Num(*xi),
                                        Json::Num(*f),
                                        Json::Num(*df),
                                    ])
                                })
                                .collect(),
                        ),
                    ),
                    (
                        "terminations",
                        Json::Arr(
                            t.rows
                                .iter()
                                .map(|(_, _, _, reason, end)| {
                                    Json::Obj(vec![
                                        ("reason", Json::Str(reason.to_string())),
                                        ("xi", Json::Num(*end)),
                                    ])
                                })
                                .collect(),
                        ),
                    ),
                ])
            })
            .collect();
        Json::Obj(vec![("trajectories", Json::Arr(items))]).render()
    } else {
        let mut out = csv_line(&[
            "traj_id".into(),
            "f0".into(),
            "df0".into(),
            "xi".into(),
            "f".into(),
            "df".into(),
            "term_reason".into(),
            "term_xi".into(),
        ]);
        for t in &trajectories {
            for (xi, f, df, reason, end) in &t.rows {
                out.push_str(&csv_line(&[
                    t.id.to_string(),
                    fmt_csv_f64(t.f0),
                    fmt_csv_f64(t.df0),
                    fmt_csv_f64(*xi),
                    fmt_csv_f64(*f),
                    fmt_csv_f64(*df),
                    (*reason).to_string(),
                    fmt_csv_f64(*end),
                ]));
            }
        }
        out
    };
    write_output(args.out.as_deref(), &text).map_err(io_failure)?;

    if let Some(svg_path) = &args.svg {
        let data: Vec<(usize, Vec<(f64, f64, f64)>)> = trajectories
            .iter()
            .map(|t| {
                (
                    t.id,
                    t.rows.iter().map(|(xi, f, df, _, _)| (*xi, *f, *df)).collect(),
                )
            })
            .collect();
        write_output(Some(svg_path), &portrait_svg(&data)).map_err(io_failure)?;
    }
    Ok(())
}

fn cmd_geodesics(args: GeodesicArgs) -> Result<(), Failure> {
    let built = config::build(&args.spec, 1e-10)?;
    let spec = built.spacetime()?;
    let rel_tol = args.tol.unwrap_or(1e-9);
    let config = IntegratorConfig {
        rel_tol,
        abs_tol: rel_tol * 1e-3,
        ..IntegratorConfig::default()
    };
    let summary = completeness_probe(&spec, args.samples, args.lambda_max, args.seed, &config)
        .map_err(|e| Failure::Numerical(format!("probe failed: {e}")))?;
    let doc = Json::Obj(vec![
        (
            "span_complete_fraction",
            Json::Num(summary.span_complete_fraction),
        ),
        (
            "singularity_fraction",
            Json::Num(summary.singularity_fraction),
        ),
        ("worst_norm_drift", Json::Num(summary.worst_norm_drift)),
        ("worst_energy_drift", Json::Num(summary.worst_energy_drift)),
        ("seed", Json::Int(summary.seed as i64)),
    ]);
    write_output(args.out.as_deref(), &doc.render()).map_err(io_failure)
}
