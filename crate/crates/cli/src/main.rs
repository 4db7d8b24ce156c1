//! Batch front end: instance ingestion, solver invocation, diagnostics, and
//! machine-readable reports. All consumers are scripts, so every command
//! writes one deterministic JSON (or CSV) document to stdout and signals its
//! outcome through the exit code.

mod report;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use sha2::{Digest, Sha256};

use radiso_core::descent::{
    resolve_region_bound, solve, DescentConfig, RegionSource, SvdTolPolicy,
};
use radiso_core::model::{
    parse_instance, serialize_instance_json, CSpec, InstanceFormat, IsotropyResult, MethodKind,
    Provenance, Transformation, VectorSet, WeightVector,
};
use radiso_core::oracle::{newton_reference, transformation_residual};
use radiso_core::polytope::{
    alpha_bounds, deepness_estimate, default_delta_grid, delta_s_min, equivalence_classes,
    gamma_general_position, hm_bound, hm_to_deepness, membership, membership_lp, t_inf_bound,
    Membership, PolytopeReport,
};
use radiso_core::subsets::binomial;
use radiso_core::Error;

use report::*;

#[derive(Parser)]
#[command(
    name = "radiso",
    version,
    about = "Places unit-vector configurations into radial c-isotropic position",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute the isotropy transform for an instance.
    Solve(SolveArgs),
    /// Feasibility: basis-polytope membership and irreducibility classes.
    Check(CommonArgs),
    /// Evaluate all norm and conditioning bounds for an instance.
    Bounds(CommonArgs),
    /// Recompute the isotropy residual of a stored transform.
    Verify(VerifyArgs),
    /// Emit a per-iteration CSV (iteration, f-gap vs oracle, gradient norm).
    Trace(TraceArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Instance file (JSON schema {"d","n","vectors","c"} or CSV rows).
    #[arg(long = "in")]
    input: PathBuf,
    /// Input format: json | csv (default: inferred from the extension).
    #[arg(long)]
    format: Option<String>,
    /// Weights: "uniform" or a comma-separated list; overrides the file.
    #[arg(long)]
    c: Option<String>,
    /// Also write the report to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Target accuracy on |c_apx - c|_2.
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    /// smooth | smooth_nesterov | strongly_convex | strongly_convex_nesterov.
    #[arg(long, default_value = "smooth")]
    method: String,
    /// Strong convexity modulus: "auto" (from the bound estimators) or a number.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Cap on |t|_inf defining the optimization box.
    #[arg(long)]
    region_bound: Option<f64>,
    /// Per-iteration SVD accuracy: "paper" (eps^3 recipe) or a fixed value.
    #[arg(long)]
    svd_tol: Option<String>,
    /// Seed for any randomized diagnostics.
    #[arg(long)]
    seed: Option<u64>,
    /// Skip the feasibility gate.
    #[arg(long)]
    force: bool,
    /// Include wall-clock timing in the report (breaks byte-determinism).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Transform file: either a solve report or a bare row-major 2D array.
    #[arg(long)]
    transform: PathBuf,
}

#[derive(Args)]
struct TraceArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long, default_value_t = 1e-6)]
    eps: f64,
    #[arg(long, default_value = "smooth")]
    method: String,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long, default_value_t = 100_000)]
    max_iters: usize,
    /// Emit the plotting CSV (the only output form; accepted for pipelines).
    #[arg(long)]
    plot: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Help/version are cooperative exits, not validation failures.
            if e.use_stderr() {
                eprintln!("{e}");
                return ExitCode::from(1);
            }
            print!("{e}");
            return ExitCode::SUCCESS;
        }
    };
    check_thread_env();
    let outcome = match cli.cmd {
        Cmd::Solve(args) => cmd_solve(args),
        Cmd::Check(args) => cmd_check(args),
        Cmd::Bounds(args) => cmd_bounds(args),
        Cmd::Verify(args) => cmd_verify(args),
        Cmd::Trace(args) => cmd_trace(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

/// RADISO_THREADS caps worker parallelism. All numeric kernels here reduce in
/// a fixed sequential order, so any valid cap is honored; the variable is
/// still validated to catch typos in pipelines.
fn check_thread_env() {
    if let Ok(v) = std::env::var("RADISO_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n >= 1 => {}
            _ => eprintln!("warning: RADISO_THREADS={v} is not a positive integer; ignored"),
        }
    }
}

fn provenance(command: &str, config: Option<ConfigEcho>) -> ProvenanceBlock {
    ProvenanceBlock {
        artifact: "radiso".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        command: command.into(),
        config,
    }
}

fn load_instance(common: &CommonArgs) -> Result<(VectorSet, WeightVector), String> {
    let raw = std::fs::read_to_string(&common.input)
        .map_err(|e| format!("cannot read {}: {e}", common.input.display()))?;
    let cspec = match &common.c {
        None => None,
        Some(s) => Some(CSpec::from_str(s).map_err(|e| e.to_string())?),
    };
    let is_csv = match common.format.as_deref() {
        Some("csv") => true,
        Some("json") => false,
        Some(other) => return Err(format!("unknown format '{other}' (expected json or csv)")),
        None => matches!(
            common.input.extension().and_then(|e| e.to_str()),
            Some("csv")
        ),
    };
    let format = if is_csv {
        InstanceFormat::Csv(cspec.ok_or("csv input needs --c (uniform or a weight list)")?)
    } else {
        InstanceFormat::Json(cspec)
    };
    parse_instance(&raw, format).map_err(|e| e.to_string())
}

fn digest(x: &VectorSet, c: &WeightVector) -> InstanceDigest {
    let canonical = serialize_instance_json(x, c);
    let hash = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for byte in hash {
        let _ = write!(hex, "{byte:02x}");
    }
    InstanceDigest {
        d: x.dim(),
        n: x.count(),
        checksum: hex,
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    print!("{text}");
    if let Some(path) = out {
        std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

/// Membership verdict within the enumeration caps; None when both routes are
/// out of reach.
fn membership_best_effort(x: &VectorSet, c: &WeightVector) -> Result<Option<PolytopeReport>, String> {
    if x.count() <= 16 {
        return membership(x, c).map(Some).map_err(|e| e.to_string());
    }
    // The vertex LP stays affordable only while the basis count is modest.
    let enumerable =
        binomial(x.count() as u64, x.dim() as u64).is_some_and(|b| b <= 20_000);
    if enumerable {
        return membership_lp(x, c).map(Some).map_err(|e| e.to_string());
    }
    Ok(None)
}

fn verdicts_block(x: &VectorSet, c: &WeightVector) -> Result<Verdicts, String> {
    let report = membership_best_effort(x, c)?;
    let (membership_str, witness, classes, dims) = match &report {
        Some(r) => (
            match r.member {
                Membership::Interior => "interior",
                Membership::Boundary => "boundary",
                Membership::Outside => "outside",
            }
            .to_string(),
            r.witness.as_ref().map(WitnessOut::from_core),
            Some(
                r.classes
                    .iter()
                    .map(|cl| cl.iter().map(|i| i + 1).collect())
                    .collect::<Vec<Vec<usize>>>(),
            ),
            Some(r.class_dims.clone()),
        ),
        None => {
            // Classes may still be certifiable by sampling.
            match equivalence_classes(x) {
                Ok(p) => (
                    "unchecked".to_string(),
                    None,
                    Some(
                        p.classes
                            .iter()
                            .map(|cl| cl.iter().map(|i| i + 1).collect())
                            .collect(),
                    ),
                    Some(p.dims.clone()),
                ),
                Err(_) => ("unchecked".to_string(), None, None, None),
            }
        }
    };
    let irreducible = classes.as_ref().map(|cl| cl.len() == 1);
    Ok(Verdicts {
        membership: membership_str,
        witness,
        irreducible,
        classes,
        class_dims: dims,
    })
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

/// Assembles every currently computable bound. Fields degrade to null when
/// the instance exceeds an enumeration cap or a precondition fails.
fn bounds_block(x: &VectorSet, c: &WeightVector) -> BoundsBlock {
    let d = x.dim();
    let cert = deepness_estimate(x, c, &default_delta_grid()).ok();
    let t_inf_new = cert
        .as_ref()
        .map(|cert| t_inf_bound(c, cert.eta, cert.delta, d));
    let gamma = gamma_general_position(c, x).ok();
    let dmin = delta_s_min(x).ok();
    let t_inf_hm = match (gamma, &dmin) {
        (Some(g), Some(_)) => hm_bound(x, g).ok(),
        _ => None,
    };
    let hm_deep = match (gamma, dmin) {
        (Some(g), Some(dm)) => Some(hm_to_deepness(g, dm, d)),
        _ => None,
    };
    // Strong-convexity bounds are evaluated at the tightest available norm cap.
    let t_inf_eval = [t_inf_new, hm_deep.map(|(_, _, b)| b)]
        .into_iter()
        .flatten()
        .fold(f64::INFINITY, f64::min);
    let alphas = cert.as_ref().and_then(|cert| {
        if t_inf_eval.is_finite() {
            alpha_bounds(x, cert.eta, cert.delta, t_inf_eval).ok()
        } else {
            None
        }
    });
    BoundsBlock {
        beta: 0.5,
        c_min: c.min(),
        eta: cert.as_ref().map(|c| c.eta),
        delta: cert.as_ref().map(|c| c.delta),
        deepness_certified: cert.is_some(),
        t_inf_new,
        gamma,
        delta_s_min: dmin,
        t_inf_hm,
        t_inf_hm_deepness: hm_deep.map(|(_, _, b)| b),
        alpha_general: alphas.as_ref().and_then(|a| finite(a.alpha_general)),
        alpha_gp: alphas.as_ref().and_then(|a| a.alpha_gp).and_then(finite),
        kappa_general: alphas.as_ref().and_then(|a| finite(a.kappa_general)),
        kappa_gp: alphas.as_ref().and_then(|a| a.kappa_gp).and_then(finite),
    }
}

fn region_source_label(source: &RegionSource) -> String {
    match source {
        RegionSource::UserProvided => "user".into(),
        RegionSource::DeepnessCertificate { .. } => "deepness_certificate".into(),
        RegionSource::GeneralPositionMargin { .. } => "general_position_margin".into(),
        RegionSource::LooseCap => "loose_cap".into(),
    }
}

struct SolveSetup {
    cfg: DescentConfig,
    echo: ConfigEcho,
}

fn build_config(args: &SolveArgs, x: &VectorSet, c: &WeightVector) -> Result<SolveSetup, String> {
    let method = MethodKind::from_str(&args.method).map_err(|e| e.to_string())?;
    let svd_tol_policy = match args.svd_tol.as_deref() {
        None | Some("paper") => SvdTolPolicy::PaperRecipe,
        Some(v) => SvdTolPolicy::Fixed(
            v.parse::<f64>()
                .map_err(|e| format!("bad --svd-tol '{v}': {e}"))?,
        ),
    };
    let mut cfg = DescentConfig {
        method,
        eps: args.eps,
        max_iters: args.max_iters,
        region_bound: args.region_bound,
        svd_tol_policy,
        force: args.force,
        ..DescentConfig::default()
    };
    cfg.alpha = match args.alpha.as_deref() {
        None => None,
        Some("auto") => {
            let cert = deepness_estimate(x, c, &default_delta_grid())
                .map_err(|e| format!("--alpha auto needs a deepness certificate: {e}"))?;
            let (bound, _) = resolve_region_bound(x, c, &cfg);
            let bounds = alpha_bounds(x, cert.eta, cert.delta, bound).map_err(|e| e.to_string())?;
            let best = bounds
                .alpha_gp
                .map_or(bounds.alpha_general, |gp| gp.max(bounds.alpha_general));
            Some(best.clamp(f64::MIN_POSITIVE, cfg.beta))
        }
        Some(v) => Some(
            v.parse::<f64>()
                .map_err(|e| format!("bad --alpha '{v}': {e}"))?,
        ),
    };
    let echo = ConfigEcho {
        method: method.to_string(),
        eps: cfg.eps,
        max_iters: cfg.max_iters,
        beta: cfg.beta,
        alpha: cfg.alpha,
        region_bound: cfg.region_bound,
        svd_tol: match cfg.svd_tol_policy {
            SvdTolPolicy::PaperRecipe => "paper".into(),
            SvdTolPolicy::Fixed(v) => format!("{v:e}"),
        },
        seed: args.seed,
        force: args.force,
    };
    Ok(SolveSetup { cfg, echo })
}

fn transform_block(result: &IsotropyResult) -> TransformBlock {
    let m = result.transform.matrix();
    let rows = (0..m.nrows())
        .map(|i| m.row(i).iter().copied().collect())
        .collect();
    TransformBlock {
        provenance: result.transform.provenance(),
        rows,
    }
}

fn cmd_solve(args: SolveArgs) -> Result<u8, String> {
    let (x, c) = load_instance(&args.common)?;
    let setup = build_config(&args, &x, &c)?;
    let verdicts = verdicts_block(&x, &c)?;
    let bounds = bounds_block(&x, &c);
    let (region_bound, region_source) = resolve_region_bound(&x, &c, &setup.cfg);
    if matches!(region_source, RegionSource::LooseCap) {
        eprintln!(
            "warning: no norm certificate available; optimizing inside the loose cap |t|_inf <= {region_bound}"
        );
    }

    let started = Instant::now();
    let outcome = solve(&x, &c, &setup.cfg);
    let wall_ms = started.elapsed().as_secs_f64() * 1e3;
    eprintln!("solve finished in {wall_ms:.1} ms");

    let (code, solver, result) = match outcome {
        Ok(result) => (
            0u8,
            Some(SolverBlock {
                method: result.method.to_string(),
                converged: true,
                iterations: result.iterations,
                grad_norm: result.grad_norm,
                isotropy_residual: result.isotropy_residual,
                eps: setup.cfg.eps,
                region_bound,
                region_source: region_source_label(&region_source),
            }),
            Some(result),
        ),
        Err(Error::Infeasible { reason, report }) => {
            eprintln!("infeasible: {reason}");
            let verdicts = Verdicts {
                membership: match report.member {
                    Membership::Interior => "interior",
                    Membership::Boundary => "boundary",
                    Membership::Outside => "outside",
                }
                .into(),
                witness: report.witness.as_ref().map(WitnessOut::from_core),
                irreducible: Some(report.classes.len() == 1),
                classes: Some(
                    report
                        .classes
                        .iter()
                        .map(|cl| cl.iter().map(|i| i + 1).collect())
                        .collect(),
                ),
                class_dims: Some(report.class_dims.clone()),
            };
            let out = RunReport {
                instance: digest(&x, &c),
                verdicts,
                solver: None,
                bounds: Some(bounds),
                transform: None,
                t_apx: None,
                c_apx: None,
                provenance: provenance("solve", Some(setup.echo)),
                wall_time_ms: args.timing.then_some(wall_ms),
            };
            emit(&to_canonical_json(&out).map_err(|e| e.to_string())?, args.common.out.as_deref())?;
            return Ok(2);
        }
        Err(Error::NonConvergence { best }) => (
            3u8,
            Some(SolverBlock {
                method: best.method.to_string(),
                converged: false,
                iterations: best.iterations,
                grad_norm: best.grad_norm,
                isotropy_residual: best.isotropy_residual,
                eps: setup.cfg.eps,
                region_bound,
                region_source: region_source_label(&region_source),
            }),
            Some(*best),
        ),
        Err(e) => return Err(e.to_string()),
    };

    let result = result.expect("solver block implies a result");
    let out = RunReport {
        instance: digest(&x, &c),
        verdicts,
        solver,
        bounds: Some(bounds),
        transform: Some(transform_block(&result)),
        t_apx: Some(result.t_apx.vector().iter().copied().collect()),
        c_apx: Some(result.c_apx.vector().iter().copied().collect()),
        provenance: provenance("solve", Some(setup.echo)),
        wall_time_ms: args.timing.then_some(wall_ms),
    };
    emit(&to_canonical_json(&out).map_err(|e| e.to_string())?, args.common.out.as_deref())?;
    Ok(code)
}

fn cmd_check(args: CommonArgs) -> Result<u8, String> {
    let (x, c) = load_instance(&args)?;
    let report = membership_best_effort(&x, &c)?
        .ok_or("instance exceeds both membership caps; no exact check available")?;
    let code = match report.member {
        Membership::Interior => 0u8,
        Membership::Boundary => 2,
        Membership::Outside => 3,
    };
    let out = CheckReport {
        instance: digest(&x, &c),
        membership: match report.member {
            Membership::Interior => "interior",
            Membership::Boundary => "boundary",
            Membership::Outside => "outside",
        }
        .into(),
        witness: report.witness.as_ref().map(WitnessOut::from_core),
        classes: report
            .classes
            .iter()
            .map(|cl| cl.iter().map(|i| i + 1).collect())
            .collect(),
        class_dims: report.class_dims.clone(),
        provenance: provenance("check", None),
    };
    emit(&to_canonical_json(&out).map_err(|e| e.to_string())?, args.out.as_deref())?;
    Ok(code)
}

fn cmd_bounds(args: CommonArgs) -> Result<u8, String> {
    let (x, c) = load_instance(&args)?;
    let out = BoundsReport {
        instance: digest(&x, &c),
        bounds: bounds_block(&x, &c),
        provenance: provenance("bounds", None),
    };
    emit(&to_canonical_json(&out).map_err(|e| e.to_string())?, args.out.as_deref())?;
    Ok(0)
}

fn parse_transform_file(path: &Path, d: usize) -> Result<Transformation, String> {
    let raw = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let value: serde_json::Value =
        serde_json::from_str(&raw).map_err(|e| format!("invalid transform JSON: {e}"))?;
    let rows_value = value
        .get("transform")
        .and_then(|t| t.get("rows"))
        .or_else(|| value.get("rows"))
        .unwrap_or(&value);
    let rows: Vec<Vec<f64>> = serde_json::from_value(rows_value.clone())
        .map_err(|e| format!("transform must be a row-major 2D array: {e}"))?;
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(format!("transform must be {d}x{d}"));
    }
    let flat: Vec<f64> = rows.into_iter().flatten().collect();
    let m = nalgebra::DMatrix::from_row_slice(d, d, &flat);
    Transformation::new(m, Provenance::SigmaInvVt).map_err(|e| e.to_string())
}

fn cmd_verify(args: VerifyArgs) -> Result<u8, String> {
    let (x, c) = load_instance(&args.common)?;
    let transform = parse_transform_file(&args.transform, x.dim())?;
    let residual = transformation_residual(&x, &c, &transform).map_err(|e| e.to_string())?;
    let out = VerifyReport {
        instance: digest(&x, &c),
        residual,
        provenance: provenance("verify", None),
    };
    emit(&to_canonical_json(&out).map_err(|e| e.to_string())?, args.common.out.as_deref())?;
    Ok(0)
}

fn cmd_trace(args: TraceArgs) -> Result<u8, String> {
    let (x, c) = load_instance(&args.common)?;
    let solve_args = SolveArgs {
        common: args.common.clone(),
        eps: args.eps,
        method: args.method.clone(),
        alpha: args.alpha.clone(),
        max_iters: args.max_iters,
        region_bound: None,
        svd_tol: None,
        seed: None,
        force: false,
        timing: false,
    };
    let mut setup = build_config(&solve_args, &x, &c)?;
    setup.cfg.record_trace = true;
    let reference = newton_reference(&x, &c, 1e-12)
        .map_err(|e| format!("oracle reference for the f-gap column failed: {e}"))?;
    let result = match solve(&x, &c, &setup.cfg) {
        Ok(r) => r,
        Err(Error::NonConvergence { best }) => *best,
        Err(e) => return Err(e.to_string()),
    };
    let trace = result.trace.as_deref().unwrap_or(&[]);
    let mut csv = String::from("iteration,f_gap,grad_norm\n");
    for (i, point) in trace.iter().enumerate() {
        let _ = writeln!(
            csv,
            "{i},{:.16e},{:.16e}",
            point.f_value - reference.f_star,
            point.grad_norm
        );
    }
    emit(&csv, args.common.out.as_deref())?;
    Ok(0)
}
