//! Command-line front end for the `supergeo` library.
//!
//! Every subcommand prints a machine-readable JSON report to stdout (the
//! `verify` subcommand defaults to human-readable lines; pass `--json` for
//! the report). Exit codes: `0` when every gate passes, `1` on computational
//! failure (with a diagnostic JSON object), `2` on usage errors.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::{DMatrix, DVector};
use serde_json::json;

use supergeo::catalog::{self, FamilyReport, Params};
use supergeo::chartgeom::{
    builtin::builtin_chart, chart_from_json, curvature as chart_curvature, point_geometry,
    GradedMetric,
};
use supergeo::geodesics::{
    integrate_geodesic, parallel_transport, reduced_inner_products, GeodesicResult, ParallelField,
};
use supergeo::grassmann::Parity;
use supergeo::superalgebra::{
    algebra_from_json, algebra_to_json, check_involution, construct_named, eigensplit,
    extend_odd_form, matrix_involution, validate_hc_pair, AdAction, AlgebraDoc,
    HarishChandraPair, LieSuperalgebra, SparseMat,
};
use supergeo::{Error, Result};

/// Residual gates: `alg` for algebraic identities, `ode` for integration
/// drift. `--tolerance` overrides both.
#[derive(Debug, Clone, Copy)]
struct Tols {
    alg: f64,
    ode: f64,
}

#[derive(Parser)]
#[command(
    name = "supergeo",
    version,
    about = "Graded Riemannian geometry: Lie superalgebras, invariant metrics, \
             chart geometry, supergeodesics"
)]
struct Cli {
    /// Overrides every residual gate (defaults: 1e-10 algebraic, 1e-6 ODE).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Construct a Lie superalgebra family and write it as JSON.
    Algebra(AlgebraArgs),
    /// Killing form of an algebra, with the supertrace-multiple fit.
    Killing(KillingArgs),
    /// Invariance diagnostics of the Killing or supertrace form.
    Invariance(InvarianceArgs),
    /// Eigensplit of an involutive automorphism into k + p.
    Split(SplitArgs),
    /// Extend an odd pairing to a full invariant scalar superproduct.
    Extend(ExtendArgs),
    /// Integrate a supergeodesic on a chart and emit a CSV time series.
    Geodesic(GeodesicArgs),
    /// Parallel-transport tangent vectors along a supergeodesic.
    Transport(TransportArgs),
    /// Run catalog verification pipelines for symmetric superspaces.
    Verify(VerifyArgs),
    /// Curvature residuals: chart tensors or bi-invariant identities.
    Curvature(CurvatureArgs),
}

#[derive(Args)]
struct AlgebraArgs {
    /// Family name: gl, sl, psl, osp, sosp, u, d21.
    #[arg(long)]
    family: String,
    /// Even block size.
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Odd block size (full size, so even for osp).
    #[arg(long, default_value_t = 0)]
    m: usize,
    /// Two weights for d21, comma-separated (third balances to zero).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    sigma: Option<Vec<f64>>,
    /// Write the algebra JSON here (stdout report either way).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct KillingArgs {
    /// Algebra JSON file, as written by `algebra --out`.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Include full matrices in the report.
    #[arg(long)]
    matrix: bool,
}

#[derive(Args)]
struct InvarianceArgs {
    /// Algebra JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Which canonical form to check: killing or str.
    #[arg(long, default_value = "killing")]
    form: String,
    /// Group parameters t for the sampled Ad_{exp(tX)} checks.
    #[arg(
        long,
        value_delimiter = ',',
        allow_hyphen_values = true,
        default_value = "0.5,1.0,-0.7"
    )]
    ts: Vec<f64>,
}

#[derive(Args)]
struct SplitArgs {
    /// Algebra JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Involution as a JSON matrix (array of rows) acting on coordinates.
    #[arg(long, value_name = "FILE")]
    sigma: Option<PathBuf>,
    /// Conjugate realization matrices by this diagonal sign pattern instead.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    diag_signs: Option<Vec<f64>>,
    /// Write the k/p bases here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExtendArgs {
    /// Algebra JSON file.
    #[arg(long = "in", value_name = "FILE")]
    input: PathBuf,
    /// Antisymmetric odd pairing as a JSON matrix (dim_odd x dim_odd).
    #[arg(long, value_name = "FILE")]
    odd_form: PathBuf,
}

#[derive(Args)]
struct CurveArgs {
    /// Chart+metric JSON file, or a builtin chart name.
    #[arg(long)]
    chart: String,
    /// Initial even coordinates, comma-separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    p: Vec<f64>,
    /// Initial even velocity.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    v: Vec<f64>,
    /// Initial odd coefficients (defaults to zeros).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    w: Option<Vec<f64>>,
    /// Integrate up to this time (either sign).
    #[arg(long, allow_negative_numbers = true)]
    t_end: f64,
    /// Fixed RK4 step size.
    #[arg(long, default_value_t = 1e-3)]
    step: f64,
}

#[derive(Args)]
struct GeodesicArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Write the time series CSV here (columns t, g_*, v_*, h_*).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TransportArgs {
    #[command(flatten)]
    curve: CurveArgs,
    /// Tangent vector to transport (dim = n + m components, even axes first).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tau: Vec<f64>,
    /// Optional second vector; inner products of all pairs are tracked.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    tau2: Option<Vec<f64>>,
    /// Write the inner-product time series CSV here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Catalog family name (see `verify --list`).
    #[arg(long)]
    family: Option<String>,
    /// Family parameters as k=v pairs, e.g. "n=3,m=1".
    #[arg(long)]
    params: Option<String>,
    /// Run every family over its default grid.
    #[arg(long)]
    all: bool,
    /// List registered families and exit.
    #[arg(long)]
    list: bool,
    /// Emit the full JSON report instead of summary lines.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct CurvatureArgs {
    /// Chart+metric JSON file or builtin name (chart mode).
    #[arg(long)]
    chart: Option<String>,
    /// Evaluation point (even coordinates; defaults to the origin).
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    at: Option<Vec<f64>>,
    /// Algebra JSON file (bi-invariant mode).
    #[arg(long = "in", value_name = "FILE")]
    input: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let tols = match cli.tolerance {
        Some(t) if t > 0.0 && t.is_finite() => Tols { alg: t, ode: t },
        Some(_) => usage_error("--tolerance must be positive and finite"),
        None => Tols {
            alg: 1e-10,
            ode: 1e-6,
        },
    };
    match run(cli.command, tols) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            let diagnostic = json!({ "error": err.to_string(), "kind": error_kind(&err) });
            println!("{}", pretty(&diagnostic));
            ExitCode::from(1)
        }
    }
}

fn run(command: Command, tols: Tols) -> Result<bool> {
    match command {
        Command::Algebra(args) => cmd_algebra(args, tols),
        Command::Killing(args) => cmd_killing(args, tols),
        Command::Invariance(args) => cmd_invariance(args, tols),
        Command::Split(args) => cmd_split(args, tols),
        Command::Extend(args) => cmd_extend(args, tols),
        Command::Geodesic(args) => cmd_geodesic(args, tols),
        Command::Transport(args) => cmd_transport(args, tols),
        Command::Verify(args) => cmd_verify(args),
        Command::Curvature(args) => cmd_curvature(args, tols),
    }
}

/// Arg combinations clap's derive cannot express are enforced here; these are
/// usage errors, so they exit 2 like clap's own.
fn usage_error(msg: &str) -> ! {
    eprintln!("error: {msg}");
    std::process::exit(2);
}

fn pretty(value: &serde_json::Value) -> String {
    serde_json::to_string_pretty(value).expect("report values serialize")
}

fn error_kind(err: &Error) -> &'static str {
    match err {
        Error::GeneratorMismatch { .. } => "generator-mismatch",
        Error::ZeroBody => "zero-body",
        Error::AxisOutOfRange { .. } => "axis-out-of-range",
        Error::NoDerivativeAccess { .. } => "no-derivative-access",
        Error::DimensionMismatch(_) => "dimension-mismatch",
        Error::InvalidParams(_) => "invalid-params",
        Error::NotInSpan { .. } => "not-in-span",
        Error::NoRealization(_) => "no-realization",
        Error::InvalidMetric(_) => "invalid-metric",
        Error::SingularMetric(_) => "singular-metric",
        Error::InvalidInvolution { .. } => "invalid-involution",
        Error::HypothesisFailed(_) => "hypothesis-failed",
        Error::BadLinearSystem(_) => "bad-linear-system",
        Error::NonFiniteState { .. } => "non-finite-state",
        Error::UnknownExample(_) => "unknown-example",
        Error::Format(_) => "format",
        Error::Json(_) => "json",
        Error::Io(_) => "io",
    }
}

fn load_algebra(path: &Path) -> Result<LieSuperalgebra> {
    let text = fs::read_to_string(path)?;
    let doc: AlgebraDoc = serde_json::from_str(&text)?;
    algebra_from_json(&doc)
}

/// Chart argument: an existing file path wins, otherwise a builtin name.
fn load_metric(chart: &str) -> Result<GradedMetric> {
    let path = Path::new(chart);
    if path.exists() {
        chart_from_json(&fs::read_to_string(path)?)
    } else {
        builtin_chart(chart)
    }
}

fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = serde_json::from_str(&fs::read_to_string(path)?)?;
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, Vec::len);
    if nrows == 0 || rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Format(format!(
            "{} must hold a non-empty rectangular array of rows",
            path.display()
        )));
    }
    Ok(DMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows())
        .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
        .collect()
}

// ---------------------------------------------------------------------------
// algebra
// ---------------------------------------------------------------------------

fn cmd_algebra(args: AlgebraArgs, tols: Tols) -> Result<bool> {
    if let Some(s) = &args.sigma {
        if s.len() != 2 {
            usage_error("--sigma takes exactly two comma-separated weights");
        }
    }
    let sigma = args.sigma.as_ref().map(|s| (s[0], s[1]));
    let g = construct_named(&args.family, args.n, args.m, sigma)?;
    let doc = algebra_to_json(&g);
    if let Some(out) = &args.out {
        fs::write(out, serde_json::to_string_pretty(&doc)?)?;
    }
    let jacobi = g.jacobi_residual();
    let passed = jacobi <= tols.alg;
    let report = json!({
        "command": "algebra",
        "algebra": g.name(),
        "dim_even": g.dim_even(),
        "dim_odd": g.dim_odd(),
        "labels": g.labels(),
        "jacobi_residual": jacobi,
        "realized": g.realization().is_some(),
        "out": args.out.as_ref().map(|p| p.display().to_string()),
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}

// ---------------------------------------------------------------------------
// killing
// ---------------------------------------------------------------------------

fn frobenius_dot(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn cmd_killing(args: KillingArgs, tols: Tols) -> Result<bool> {
    let g = load_algebra(&args.input)?;
    let killing = g.killing_form();
    let structural = killing
        .evenness_residual()
        .max(killing.graded_symmetry_residual());
    let scale = 1.0 + killing.matrix.amax();

    let str_fit = match g.str_form() {
        Ok(s) => {
            let denom = frobenius_dot(&s.matrix, &s.matrix);
            if denom > 0.0 {
                let factor = frobenius_dot(&killing.matrix, &s.matrix) / denom;
                let residual = (&killing.matrix - &s.matrix * factor).amax();
                json!({
                    "factor": factor,
                    "residual": residual,
                    "proportional": residual <= tols.alg * scale,
                })
            } else {
                serde_json::Value::Null
            }
        }
        Err(_) => serde_json::Value::Null,
    };

    let passed = structural <= tols.alg * scale;
    let mut report = json!({
        "command": "killing",
        "algebra": g.name(),
        "dim": g.dim(),
        "killing_amax": killing.matrix.amax(),
        "vanishes": killing.matrix.amax() <= tols.alg * 10.0,
        "structural_residual": structural,
        "rank": if killing.matrix.amax() <= tols.alg * 10.0 { 0 } else { killing.rank(1e-8) },
        "str_multiple": str_fit,
        "passed": passed,
    });
    if args.matrix {
        report["killing_matrix"] = json!(matrix_rows(&killing.matrix));
    }
    println!("{}", pretty(&report));
    Ok(passed)
}

// ---------------------------------------------------------------------------
// invariance
// ---------------------------------------------------------------------------

fn cmd_invariance(args: InvarianceArgs, tols: Tols) -> Result<bool> {
    let g = load_algebra(&args.input)?;
    let form = match args.form.as_str() {
        "killing" => g.killing_form(),
        "str" => g.str_form()?,
        other => usage_error(&format!("--form must be `killing` or `str`, got `{other}`")),
    };
    let checks = form.checks(&g, 1e-8);
    let scale = 1.0 + form.matrix.amax();

    let reduced = g.reduced_group().cloned().map(|group| -> Result<_> {
        let action = if g.realization().is_some() {
            AdAction::Conjugation
        } else {
            AdAction::AdjointExp
        };
        let pair = HarishChandraPair {
            algebra: g.clone(),
            group,
            action,
        };
        let hc = validate_hc_pair(&pair)?;
        let ad_reduced =
            supergeo::superalgebra::ad_reduced_invariance(&g, action, &form, &args.ts)?;
        Ok(json!({
            "group": pair.group.name,
            "dim_match": hc.dim_match,
            "automorphism_residual": hc.automorphism_residual,
            "derivative_residual": hc.derivative_residual,
            "parity_residual": hc.parity_residual,
            "form_invariance": ad_reduced,
        }))
    });
    let reduced = match reduced {
        Some(r) => r?,
        None => serde_json::Value::Null,
    };

    let passed = checks.ad_invariance <= tols.alg * scale
        && checks.evenness <= tols.alg * scale
        && checks.graded_symmetry <= tols.alg * scale;
    let report = json!({
        "command": "invariance",
        "algebra": g.name(),
        "form": args.form,
        "evenness": checks.evenness,
        "graded_symmetry": checks.graded_symmetry,
        "ad_invariance": checks.ad_invariance,
        "even_signature": checks.even_signature,
        "odd_rank": checks.odd_rank,
        "radical_dim": checks.radical_dim,
        "reduced_group": reduced,
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}

// ---------------------------------------------------------------------------
// split
// ---------------------------------------------------------------------------

fn cmd_split(args: SplitArgs, tols: Tols) -> Result<bool> {
    let g = load_algebra(&args.input)?;
    let sigma = match (&args.sigma, &args.diag_signs) {
        (Some(path), None) => read_matrix(path)?,
        (None, Some(signs)) => {
            let size = g
                .realization()
                .ok_or_else(|| Error::NoRealization(g.name().into()))?
                .matrix_size();
            if signs.len() != size || signs.iter().any(|s| s.abs() != 1.0) {
                usage_error(&format!(
                    "--diag-signs needs {size} entries, each +1 or -1"
                ));
            }
            matrix_involution(&g, |mat| {
                let entries: Vec<(usize, usize, f64)> = mat
                    .entries
                    .iter()
                    .map(|&(r, c, v)| (r, c, signs[r] * signs[c] * v))
                    .collect();
                SparseMat::from_entries(mat.size, &entries)
            })?
        }
        _ => usage_error("pass exactly one of --sigma or --diag-signs"),
    };

    let involution = check_involution(&g, &sigma)?;
    let dec = eigensplit(&g, &sigma, tols.alg.max(1e-9))?;
    if let Some(out) = &args.out {
        let doc = json!({
            "k_parities": dec.k_parities.iter().map(|p| p.as_u8()).collect::<Vec<_>>(),
            "p_parities": dec.p_parities.iter().map(|p| p.as_u8()).collect::<Vec<_>>(),
            "k_columns": matrix_rows(&dec.k_basis.transpose()),
            "p_columns": matrix_rows(&dec.p_basis.transpose()),
        });
        fs::write(out, pretty(&doc))?;
    }
    let passed = involution.max() <= tols.alg && dec.max_residual() <= tols.alg;
    let report = json!({
        "command": "split",
        "algebra": g.name(),
        "involution_residual": involution.max(),
        "k_dims": dec.k_dims(),
        "p_dims": dec.p_dims(),
        "kk_residual": dec.kk_residual,
        "kp_residual": dec.kp_residual,
        "pp_residual": dec.pp_residual,
        "out": args.out.as_ref().map(|p| p.display().to_string()),
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}

// ---------------------------------------------------------------------------
// extend
// ---------------------------------------------------------------------------

fn cmd_extend(args: ExtendArgs, tols: Tols) -> Result<bool> {
    let g = load_algebra(&args.input)?;
    let odd = read_matrix(&args.odd_form)?;
    let ext = extend_odd_form(&g, &odd)?;
    let scale = 1.0 + ext.form.matrix.amax();
    let passed = ext.unique
        && ext.span_ok
        && ext.faithful_ok
        && ext.invariance_residual <= tols.alg * scale;
    let report = json!({
        "command": "extend",
        "algebra": g.name(),
        "unique": ext.unique,
        "rank": ext.rank,
        "unknowns": ext.unknowns,
        "solve_residual": ext.solve_residual,
        "invariance_residual": ext.invariance_residual,
        "span_ok": ext.span_ok,
        "faithful_ok": ext.faithful_ok,
        "form_matrix": matrix_rows(&ext.form.matrix),
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}

// ---------------------------------------------------------------------------
// geodesic / transport
// ---------------------------------------------------------------------------

fn integrate_curve(curve: &CurveArgs) -> Result<(GradedMetric, GeodesicResult)> {
    let metric = load_metric(&curve.chart)?;
    let w = curve
        .w
        .clone()
        .unwrap_or_else(|| vec![0.0; metric.m()]);
    let result = integrate_geodesic(
        &metric,
        &curve.p,
        &curve.v,
        &w,
        curve.t_end,
        curve.step,
    )?;
    Ok((metric, result))
}

fn state_json(state: &supergeo::geodesics::SupercurveState) -> serde_json::Value {
    json!({ "t": state.t, "g": state.g, "v": state.v, "h": state.h })
}

fn write_geodesic_csv(path: &Path, result: &GeodesicResult) -> Result<()> {
    let first = result.initial();
    let mut text = String::from("t");
    for i in 1..=first.g.len() {
        write!(text, ",g_{i}").expect("string write");
    }
    for i in 1..=first.v.len() {
        write!(text, ",v_{i}").expect("string write");
    }
    for a in 1..=first.h.len() {
        write!(text, ",h_{a}").expect("string write");
    }
    text.push('\n');
    for state in &result.states {
        write!(text, "{}", state.t).expect("string write");
        for x in state.g.iter().chain(&state.v).chain(&state.h) {
            write!(text, ",{x}").expect("string write");
        }
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn cmd_geodesic(args: GeodesicArgs, tols: Tols) -> Result<bool> {
    let (_metric, result) = integrate_curve(&args.curve)?;
    if let Some(out) = &args.out {
        write_geodesic_csv(out, &result)?;
    }
    let passed = result.energy_drift <= tols.ode;
    let report = json!({
        "command": "geodesic",
        "chart": args.curve.chart,
        "steps": result.states.len() - 1,
        "step": result.step,
        "initial": state_json(result.initial()),
        "terminal": state_json(result.terminal()),
        "equation_residual": result.equation_residual,
        "energy_drift": result.energy_drift,
        "out": args.out.as_ref().map(|p| p.display().to_string()),
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}

/// Largest wrong-parity mass a transported field accrues when the input
/// vector is parity-homogeneous; `None` for mixed inputs.
///
/// A component along axis `a` contributes parity `|a|` through its plain
/// part and `|a| + 1` through its `ξ`-part, so for an even field the even
/// axes must stay `ξ`-free and the odd axes plain-free (and conversely for
/// an odd field). Transport preserves this exactly.
fn parity_leak(metric: &GradedMetric, tau: &[f64], field: &ParallelField) -> Option<f64> {
    let n = metric.n();
    let even_in = tau.iter().take(n).any(|x| *x != 0.0);
    let odd_in = tau.iter().skip(n).any(|x| *x != 0.0);
    if even_in == odd_in {
        return None;
    }
    let mut leak = 0.0f64;
    for sample in &field.components {
        for (a, value) in sample.iter().enumerate() {
            let even_axis = a < n;
            let wrong = if even_in == even_axis { value.odd } else { value.even };
            leak = leak.max(wrong.abs());
        }
    }
    Some(leak)
}

fn cmd_transport(args: TransportArgs, tols: Tols) -> Result<bool> {
    let (metric, result) = integrate_curve(&args.curve)?;
    let dim = metric.dim();
    if args.tau.len() != dim {
        usage_error(&format!("--tau needs {dim} components for this chart"));
    }
    if let Some(tau2) = &args.tau2 {
        if tau2.len() != dim {
            usage_error(&format!("--tau2 needs {dim} components for this chart"));
        }
    }

    let mut vectors = vec![args.tau.clone()];
    if let Some(tau2) = &args.tau2 {
        vectors.push(tau2.clone());
    }
    let fields: Vec<ParallelField> = vectors
        .iter()
        .map(|tau| parallel_transport(&metric, &result, tau))
        .collect::<Result<_>>()?;

    let mut pair_reports = Vec::new();
    let mut worst_drift = 0.0f64;
    let mut series: Vec<(String, Vec<f64>)> = Vec::new();
    for i in 0..fields.len() {
        for j in i..fields.len() {
            let ips = reduced_inner_products(&metric, &result, &fields[i], &fields[j])?;
            let drift = ips
                .iter()
                .map(|ip| (ip - ips[0]).abs())
                .fold(0.0f64, f64::max);
            worst_drift = worst_drift.max(drift);
            pair_reports.push(json!({
                "pair": format!("{}_{}", i + 1, j + 1),
                "initial": ips[0],
                "final": ips[ips.len() - 1],
                "drift": drift,
            }));
            series.push((format!("ip_{}_{}", i + 1, j + 1), ips));
        }
    }

    let leaks: Vec<serde_json::Value> = vectors
        .iter()
        .zip(&fields)
        .map(|(tau, field)| json!(parity_leak(&metric, tau, field)))
        .collect();

    if let Some(out) = &args.out {
        let mut text = String::from("t");
        for (name, _) in &series {
            write!(text, ",{name}").expect("string write");
        }
        text.push('\n');
        for (s, state) in result.states.iter().enumerate() {
            write!(text, "{}", state.t).expect("string write");
            for (_, values) in &series {
                write!(text, ",{}", values[s]).expect("string write");
            }
            text.push('\n');
        }
        fs::write(out, text)?;
    }

    let passed = worst_drift <= tols.ode;
    let report = json!({
        "command": "transport",
        "chart": args.curve.chart,
        "steps": result.states.len() - 1,
        "inner_products": pair_reports,
        "isometry_drift": worst_drift,
        "parity_leak": leaks,
        "out": args.out.as_ref().map(|p| p.display().to_string()),
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

fn family_value(report: &FamilyReport) -> serde_json::Value {
    let mut value = serde_json::to_value(report).expect("reports serialize");
    value["as_expected"] = json!(report.as_expected());
    value
}

fn family_line(report: &FamilyReport) -> String {
    let params = if report.params.is_empty() {
        String::new()
    } else {
        format!(" [{}]", report.params)
    };
    let verdict = if report.passed {
        "pass".to_string()
    } else if report.as_expected() {
        "degenerate as expected".to_string()
    } else {
        let failing: Vec<&str> = report
            .stages
            .iter()
            .filter(|s| !s.passed)
            .map(|s| s.name.as_str())
            .collect();
        format!("FAIL ({})", failing.join(", "))
    };
    format!(
        "{}{params} ({}): {verdict}",
        report.family, report.algebra
    )
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    if args.list {
        for spec in catalog::list_examples() {
            println!("{}: {} — {}", spec.name, spec.quotient, spec.schema);
        }
        return Ok(true);
    }
    let reports: Vec<FamilyReport> = if args.all {
        if args.family.is_some() || args.params.is_some() {
            usage_error("--all cannot be combined with --family/--params");
        }
        catalog::verify_all()?
    } else {
        let family = match &args.family {
            Some(f) => f,
            None => usage_error("pass --family NAME (or --all, or --list)"),
        };
        match &args.params {
            Some(text) => {
                let params = Params::parse(text)?;
                vec![catalog::verify_example(family, &params)?]
            }
            None => catalog::verify_grid(family)?,
        }
    };

    let passed = reports.iter().all(FamilyReport::as_expected);
    if args.json {
        let value = json!({
            "command": "verify",
            "reports": reports.iter().map(family_value).collect::<Vec<_>>(),
            "passed": passed,
        });
        println!("{}", pretty(&value));
    } else {
        for report in &reports {
            println!("{}", family_line(report));
        }
    }
    Ok(passed)
}

// ---------------------------------------------------------------------------
// curvature
// ---------------------------------------------------------------------------

fn cmd_curvature(args: CurvatureArgs, tols: Tols) -> Result<bool> {
    match (&args.chart, &args.input) {
        (Some(chart), None) => curvature_chart(chart, args.at.as_deref(), tols),
        (None, Some(path)) => {
            if args.at.is_some() {
                usage_error("--at only applies to chart mode");
            }
            curvature_biinvariant(path, tols)
        }
        _ => usage_error("pass exactly one of --chart or --in"),
    }
}

fn curvature_chart(chart: &str, at: Option<&[f64]>, tols: Tols) -> Result<bool> {
    let metric = load_metric(chart)?;
    let x = match at {
        Some(x) => x.to_vec(),
        None => vec![0.0; metric.n()],
    };
    let geometry = point_geometry(&metric, &x)?;
    let data = chart_curvature(&metric, &x)?;
    let metricity = geometry.metricity_residual();
    let torsion = geometry.torsion_residual();
    let gamma_parity = geometry.gamma_parity_residual();
    let antisymmetry = data.antisymmetry_residual();
    let passed = metricity <= tols.alg
        && torsion <= tols.alg
        && gamma_parity == 0.0
        && antisymmetry <= tols.alg;
    let report = json!({
        "command": "curvature",
        "mode": "chart",
        "chart": chart,
        "at": x,
        "metricity_residual": metricity,
        "torsion_residual": torsion,
        "gamma_parity_residual": gamma_parity,
        "curvature_antisymmetry_residual": antisymmetry,
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}

/// Checks, on every basis triple/quadruple, that the curvature of the
/// bi-invariant connection (computed from nested brackets of the connection
/// formula) collapses to the quarter-double-bracket form, and that the four
/// curvature identities hold against the supertrace form.
fn curvature_biinvariant(path: &Path, tols: Tols) -> Result<bool> {
    let g = load_algebra(path)?;
    let form = g.str_form()?;
    let d = g.dim();
    let sign = |p: Parity, q: Parity| -> f64 {
        if p == Parity::Odd && q == Parity::Odd {
            -1.0
        } else {
            1.0
        }
    };
    let basis = |i: usize| -> DVector<f64> {
        let mut e = DVector::zeros(d);
        e[i] = 1.0;
        e
    };

    // r[i][j][k] = R(e_i, e_j) e_k from the connection formula
    // ∇_x y = ½ [x, y]; flat_residual compares it with -¼ [[x, y], z].
    let mut flat_residual = 0.0f64;
    let mut r = vec![vec![Vec::with_capacity(d); d]; d];
    for i in 0..d {
        let ei = basis(i);
        for j in 0..d {
            let ej = basis(j);
            let bracket_ij = g.bracket(&ei, &ej);
            for k in 0..d {
                let ek = basis(k);
                let curl = g.bracket(&ei, &g.bracket(&ej, &ek)) * 0.25
                    - g.bracket(&ej, &g.bracket(&ei, &ek))
                        * (0.25 * sign(g.parity(i), g.parity(j)))
                    - g.bracket(&bracket_ij, &ek) * 0.5;
                let collapsed = g.bracket(&bracket_ij, &ek) * -0.25;
                flat_residual = flat_residual.max((&curl - &collapsed).amax());
                r[i][j].push(curl);
            }
        }
    }

    // Lowered tensor L[i][j][k][l] = B(R(e_i, e_j) e_k, e_l).
    let lower = |v: &DVector<f64>, l: usize| -> f64 {
        let mut acc = 0.0;
        for t in 0..d {
            acc += v[t] * form.matrix[(t, l)];
        }
        acc
    };
    let p = |i: usize| g.parity(i);
    let mut pair_antisymmetry = 0.0f64;
    let mut bianchi = 0.0f64;
    let mut last_pair_skew = 0.0f64;
    let mut pair_swap = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                let a = &r[i][j][k];
                pair_antisymmetry =
                    pair_antisymmetry.max((a + &r[j][i][k] * sign(p(i), p(j))).amax());
                let cyc = a * sign(p(i), p(k))
                    + &r[j][k][i] * sign(p(j), p(i))
                    + &r[k][i][j] * sign(p(k), p(j));
                bianchi = bianchi.max(cyc.amax());
                for l in 0..d {
                    let low = lower(a, l);
                    last_pair_skew = last_pair_skew
                        .max((low + sign(p(k), p(l)) * lower(&r[i][j][l], k)).abs());
                    let swap_sign = if (p(i) == Parity::Odd) ^ (p(j) == Parity::Odd)
                        && (p(k) == Parity::Odd) ^ (p(l) == Parity::Odd)
                    {
                        -1.0
                    } else {
                        1.0
                    };
                    pair_swap =
                        pair_swap.max((low - swap_sign * lower(&r[k][l][i], j)).abs());
                }
            }
        }
    }

    let passed = flat_residual <= tols.alg
        && pair_antisymmetry <= tols.alg
        && bianchi <= tols.alg
        && last_pair_skew <= tols.alg
        && pair_swap <= tols.alg;
    let report = json!({
        "command": "curvature",
        "mode": "bi-invariant",
        "algebra": g.name(),
        "flat_residual": flat_residual,
        "pair_antisymmetry": pair_antisymmetry,
        "bianchi": bianchi,
        "last_pair_skew": last_pair_skew,
        "pair_swap": pair_swap,
        "passed": passed,
    });
    println!("{}", pretty(&report));
    Ok(passed)
}
