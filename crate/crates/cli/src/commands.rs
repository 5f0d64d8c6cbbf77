//! The six subcommands. Each turns a validated [`RunConfig`] into the text
//! of its output file; none of them writes anywhere itself.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use weakcrit_core::criticality::{self, Side, Tau};
use weakcrit_core::dynamics;
use weakcrit_core::{CriticalAngles, DSign, MeterState, ProtocolConfig, Tolerances};

use crate::config::{OracleSuite, RunConfig, CONFIG_VERSION};
use crate::error::{CliError, EXIT_FIT, EXIT_ORACLE};
use crate::suites::{self, SuiteKind};

/// Text produced by a command, plus an optional failure that must still be
/// reported after the data has been written.
#[derive(Debug, Clone, PartialEq)]
pub struct CommandOutput {
    pub data: String,
    pub sidecar: Option<String>,
    pub failure: Option<CliError>,
}

impl CommandOutput {
    fn data(data: String) -> Self {
        Self {
            data,
            sidecar: None,
            failure: None,
        }
    }
}

fn num(v: f64) -> String {
    format!("{v:?}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

/// `tau` and `is_infinite` CSV fields.
fn tau_fields(tau: Option<Tau>) -> (String, &'static str) {
    match tau {
        Some(Tau::Finite(t)) => (num(t), "0"),
        Some(Tau::Infinite) => (String::new(), "1"),
        None => (String::new(), ""),
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serializes");
    s.push('\n');
    s
}

pub fn sweep(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let protocol = cfg.protocol()?;
    let grid = cfg.grid()?;
    let ns = cfg.iteration_counts()?;
    let dim = protocol.meter_dim();
    let observables = cfg.observable_matrices(dim)?;
    let initial = cfg.initial_state(dim)?;
    let tol = &cfg.tolerances;
    let matrices: Vec<_> = observables.iter().map(|(_, m)| m.clone()).collect();

    let points: Vec<_> = grid
        .par_iter()
        .map(|&phi| criticality::sweep_point(&protocol, phi, &ns, &matrices, &initial, tol))
        .collect();

    let mut out = String::from("phi,n");
    for (name, _) in &observables {
        write!(out, ",exp_{name}").unwrap();
    }
    out.push_str(",abs_lambda_1,abs_lambda_2,im_weak_value,tau,is_infinite\n");
    for p in &points {
        let (tau, inf) = tau_fields(p.tau);
        for s in &p.samples {
            write!(out, "{},{}", num(p.phi), s.n).unwrap();
            for e in &s.expectations {
                write!(out, ",{}", opt(*e)).unwrap();
            }
            writeln!(
                out,
                ",{},{},{},{tau},{inf}",
                opt(p.abs_lambda_1),
                opt(p.abs_lambda_2),
                opt(p.im_weak_value)
            )
            .unwrap();
        }
    }
    Ok(CommandOutput::data(out))
}

#[derive(Serialize)]
struct TrajectoryMeta {
    version: u32,
    phi: f64,
    n: usize,
    converged_at: Option<usize>,
    d_sign: DSign,
    tau: Option<Tau>,
    regime: Option<dynamics::Regime>,
    revolutions_per_relaxation: Option<f64>,
    stable_fixed_point: Option<Value>,
    long_time_state: Value,
    final_distance_to_long_time_state: Option<f64>,
    sign_convention: &'static str,
}

pub fn trajectory(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let protocol = cfg.protocol()?;
    let phi = cfg.phi()?;
    let n = *cfg.iteration_counts()?.iter().max().unwrap();
    let dim = protocol.meter_dim();
    let initial = cfg.initial_state(dim)?;
    let tol = &cfg.tolerances;
    let k = protocol.kraus_at(phi, tol).map_err(CliError::usage_from)?;
    let record = dynamics::iterate_matrix(&k, &initial, n, tol).map_err(CliError::runtime)?;

    let mut out = String::new();
    if dim == 2 {
        out.push_str("step,rx,ry,rz,purity\n");
        for (i, s) in record.states.iter().enumerate() {
            let b = s.bloch().expect("qubit state");
            writeln!(out, "{i},{},{},{},{}", num(b.rx), num(b.ry), num(b.rz), num(s.purity()))
                .unwrap();
        }
    } else {
        let basis = k.spectrum(tol).map_err(CliError::runtime)?.eigenvectors;
        out.push_str("step,purity");
        for j in 0..dim {
            write!(out, ",p_{j}").unwrap();
        }
        out.push('\n');
        for (i, s) in record.states.iter().enumerate() {
            write!(out, "{i},{}", num(s.purity())).unwrap();
            for v in &basis {
                write!(out, ",{}", num(s.population(v))).unwrap();
            }
            out.push('\n');
        }
    }

    let long_time = dynamics::long_time_state(&k, &initial, tol);
    let state_json = |s: &MeterState| match s.bloch() {
        Some(b) => json!({ "bloch": b }),
        None => json!({ "purity": s.purity() }),
    };
    let meta = TrajectoryMeta {
        version: CONFIG_VERSION,
        phi,
        n,
        converged_at: record.converged_at,
        d_sign: protocol.d_sign,
        tau: criticality::relaxation_time(&k, tol).ok(),
        regime: dynamics::classify_regime(&k, tol).ok(),
        revolutions_per_relaxation: dynamics::revolutions_per_relaxation(&k, tol).ok(),
        stable_fixed_point: dynamics::classify_fixed_points(&k, tol)
            .ok()
            .and_then(|r| r.stable().map(|f| json!({ "index": f.index, "bloch": f.bloch }))),
        long_time_state: match &long_time {
            Ok(s) => state_json(s),
            Err(e) => json!({ "unavailable": e.kind(), "message": e.to_string() }),
        },
        final_distance_to_long_time_state: long_time
            .as_ref()
            .ok()
            .and_then(|s| weakcrit_core::linalg::trace_distance(record.last(), s).ok()),
        sign_convention: "d = -i sin(gt) <psi_f|sigma_z|psi_S>; stable sides are as computed",
    };
    Ok(CommandOutput {
        data: out,
        sidecar: Some(pretty(&meta)),
        failure: None,
    })
}

pub fn relaxation(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let protocol = cfg.protocol()?;
    let grid = cfg.grid()?;
    let tol = &cfg.tolerances;
    let samples: Vec<_> = grid
        .par_iter()
        .flat_map_iter(|&phi| criticality::relaxation_profile(&protocol, &[phi], tol))
        .collect();
    let mut out = String::from("phi,tau,is_infinite\n");
    for s in &samples {
        let (tau, inf) = tau_fields(s.tau);
        writeln!(out, "{},{tau},{inf}", num(s.phi)).unwrap();
    }
    Ok(CommandOutput::data(out))
}

fn critical_angle_list(
    protocol: &ProtocolConfig,
    cfg: &RunConfig,
    tol: &Tolerances,
) -> Result<CriticalAngles, CliError> {
    protocol
        .critical_angles(cfg.scan_points, tol)
        .map_err(CliError::usage_from)
}

pub fn critical_angles(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let protocol = cfg.protocol()?;
    let report = match critical_angle_list(&protocol, cfg, &cfg.tolerances)? {
        CriticalAngles::Angles(a) => json!({
            "theta": protocol.prep.theta(),
            "alpha": protocol.alpha,
            "critical_angles": a,
            "all_critical": false,
        }),
        CriticalAngles::AllCritical => json!({
            "theta": protocol.prep.theta(),
            "alpha": protocol.alpha,
            "critical_angles": [],
            "all_critical": true,
        }),
    };
    Ok(CommandOutput::data(pretty(&report)))
}

#[derive(Serialize)]
struct FitRecord {
    phi_c: f64,
    side: Side,
    slope: f64,
    intercept: f64,
    r_squared: f64,
    nu: f64,
    window: Value,
    points: Vec<[f64; 2]>,
    weak_value_slope: Option<f64>,
}

pub fn fit(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let protocol = cfg.protocol()?;
    let offsets = cfg.offsets()?;
    let tol = &cfg.tolerances;
    let angles = match critical_angle_list(&protocol, cfg, tol)? {
        CriticalAngles::Angles(a) if !a.is_empty() => a,
        _ => {
            return Err(CliError::new(
                EXIT_FIT,
                "no_isolated_critical_point",
                "no isolated critical angle to fit (weak value real everywhere or nowhere)",
            ))
        }
    };
    let reach = *offsets.last().expect("window has points");
    let jobs: Vec<(f64, Side)> = angles
        .iter()
        .flat_map(|&c| criticality::available_sides(c, reach).into_iter().map(move |s| (c, s)))
        .collect();
    let results: Vec<_> = jobs
        .par_iter()
        .map(|&(c, side)| (c, side, criticality::fit_exponent(&protocol, c, side, &offsets, tol)))
        .collect();

    let window = json!({
        "lo": cfg.fit_window.lo,
        "hi": cfg.fit_window.hi,
        "per_decade": cfg.fit_window.per_decade,
    });
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (c, side, r) in results {
        match r {
            Ok(f) => records.push(FitRecord {
                phi_c: f.phi_c,
                side: f.side,
                slope: f.slope,
                intercept: f.intercept,
                r_squared: f.r_squared,
                nu: f.nu,
                window: window.clone(),
                points: f.offsets.iter().zip(&f.taus).map(|(&d, &t)| [d, t]).collect(),
                weak_value_slope: criticality::weak_value_slope(&protocol, c, 1e-6, tol).ok(),
            }),
            Err(e) => failures.push(json!({
                "phi_c": c,
                "side": side,
                "kind": e.kind(),
                "message": e.to_string(),
            })),
        }
    }
    let failure = (!failures.is_empty()).then(|| {
        CliError::new(
            EXIT_FIT,
            "fit_failed",
            format!("{} of {} fits rejected", failures.len(), jobs.len()),
        )
        .with_details(Value::Array(failures))
    });
    Ok(CommandOutput {
        data: pretty(&json!({ "version": CONFIG_VERSION, "fits": records })),
        sidecar: None,
        failure,
    })
}

pub fn oracle_check(cfg: &RunConfig) -> Result<CommandOutput, CliError> {
    let protocol = cfg.protocol()?;
    let tol = &cfg.tolerances;
    let gt_fo = cfg.first_order_gt.0;
    if !(gt_fo > 0.0 && gt_fo <= tol.weakness_bound) {
        return Err(CliError::usage(format!(
            "first_order_gt = {gt_fo} must lie in (0, {}]",
            tol.weakness_bound
        )));
    }
    if cfg.trials == 0 || cfg.oracle_steps == 0 {
        return Err(CliError::usage("trials and oracle_steps must be positive"));
    }
    let mut reports = Vec::new();
    if matches!(cfg.oracle_suite, OracleSuite::ExactQubit | OracleSuite::All) {
        let trials = suites::random_trials(cfg.seed, cfg.trials, cfg.oracle_steps, None);
        reports.push(suites::run_suite(SuiteKind::ExactQubit, &trials, protocol.d_sign, tol));
    }
    if matches!(cfg.oracle_suite, OracleSuite::FirstOrder | OracleSuite::All) {
        let trials = suites::random_trials(
            cfg.seed.wrapping_add(1),
            cfg.trials,
            cfg.oracle_steps,
            Some(gt_fo),
        );
        reports.push(suites::run_suite(SuiteKind::FirstOrder, &trials, protocol.d_sign, tol));
    }
    let pass = reports.iter().all(|r| r.pass);
    let failure = (!pass).then(|| {
        let worst: Vec<_> = reports
            .iter()
            .filter(|r| !r.pass)
            .map(|r| json!({ "suite": r.suite, "max_distance": r.max_distance, "threshold": r.threshold, "worst": r.worst }))
            .collect();
        CliError::new(EXIT_ORACLE, "oracle_mismatch", "reduced dynamics disagree with the reference simulation")
            .with_details(Value::Array(worst))
    });
    Ok(CommandOutput {
        data: pretty(&json!({
            "version": CONFIG_VERSION,
            "seed": cfg.seed,
            "d_sign": protocol.d_sign,
            "pass": pass,
            "suites": reports,
        })),
        sidecar: None,
        failure,
    })
}
