use std::path::Path;

use serde_json::{json, Value};
use stablecut::graph::{cut_weight, multiway_cost, WeightedGraph};
use stablecut::io::{parse_instance, Instance};
use stablecut::local::{
    weakly_stable_max_cut, weakly_stable_multiway, ExactSparsestCut, SparsestCutSolver, SpectralSweep,
};
use stablecut::lp::{
    build_ckr_lp, robust_multiway_cut, separation_statistics, solve_lp, LpSolution, LpTolerances, MultiwayStatus,
};
use stablecut::oracle::{
    brute_max_cut, brute_multiway_cut, maxcut_stability_report, multiway_stability_report, weak_stability_check,
    OracleLimits,
};
use stablecut::reduce::cc2_stability_report;
use stablecut::sdp::{robust_max_cut, MaxCutStatus, SdpTolerances};
use stablecut::{Error, Result};

use crate::report::{digest, RunReport, Status};
use crate::{MaxCutArgs, Mode, MultiwayArgs, RoundArgs, SolverKind};

pub fn read_instance(path: &Path, report: &mut RunReport) -> Result<Instance> {
    let bytes = std::fs::read(path)
        .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
    report.instance_digest = Some(digest(&bytes));
    parse_instance(&bytes)
}

fn graph_of(inst: Instance) -> Result<(WeightedGraph, Option<Vec<usize>>)> {
    match inst {
        Instance::Graph { graph, terminals } => Ok((graph, terminals)),
        other => Err(Error::Validation(format!("expected a graph instance, got {}", other.kind()))),
    }
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn maxcut(args: &MaxCutArgs, report: &mut RunReport) -> Result<()> {
    let (g, _) = graph_of(read_instance(&args.input, report)?)?;
    let limits = OracleLimits::default();
    match args.mode {
        Mode::Robust => {
            let tol = match args.tol {
                Some(t) => SdpTolerances {
                    psd: t,
                    feas: t,
                    obj: t,
                    ..SdpTolerances::default()
                },
                None => SdpTolerances::default(),
            };
            let r = robust_max_cut(&g, &tol)?;
            report.status = match r.status {
                MaxCutStatus::Optimal => Status::Optimal,
                MaxCutStatus::NotStableCertificate => Status::NotStableCertificate,
            };
            report.tolerances = to_value(&r.tolerances);
            report.solution = json!({
                "cut": r.cut,
                "value": r.value,
                "witness": r.witness,
                "certificate_failed": r.certificate_failed,
            });
            report.diagnostics = json!({
                "objective": r.sdp.objective,
                "upper_bound": r.sdp.upper_bound,
                "residuals": r.sdp.residuals,
                "min_eigenvalue": r.sdp.min_eigenvalue,
                "rounds": r.sdp.rounds,
                "active_constraints": r.sdp.active_constraints,
                "retried": r.retried,
            });
        }
        Mode::LocalSearch => {
            let solver: Box<dyn SparsestCutSolver> = match args.sc {
                SolverKind::Exact => Box::new(ExactSparsestCut { limits }),
                SolverKind::Spectral => Box::new(SpectralSweep::default()),
            };
            let (cut, trace) = weakly_stable_max_cut(&g, solver.as_ref(), None)?;
            report.status = if trace.steps.is_empty() {
                Status::CertifiedStop
            } else {
                Status::Improved
            };
            report.tolerances = json!({ "sparsest_cut": solver.name(), "approx_factor": solver.approx_factor() });
            report.solution = json!({ "cut": cut, "value": cut_weight(&g, &cut)? });
            report.diagnostics = json!({ "iterations": trace.iterations, "trace": trace });
        }
        Mode::Brute => {
            let (cut, value) = brute_max_cut(&g, &limits)?;
            report.status = Status::Optimal;
            report.tolerances = to_value(&limits);
            report.solution = json!({ "cut": cut, "value": value });
        }
    }
    Ok(())
}

pub fn multiway(args: &MultiwayArgs, report: &mut RunReport) -> Result<()> {
    let (g, terminals) = graph_of(read_instance(&args.input, report)?)?;
    let terminals =
        terminals.ok_or_else(|| Error::Validation("multiway cut needs a `terminals` list".into()))?;
    let limits = OracleLimits::default();
    match args.mode {
        Mode::Robust => {
            let tol = LpTolerances::default();
            let r = robust_multiway_cut(&g, &terminals, &tol)?;
            report.status = match r.status {
                MultiwayStatus::Optimal => Status::Optimal,
                MultiwayStatus::NotFourStableCertificate => Status::NotFourStableCertificate,
            };
            report.tolerances = to_value(&tol);
            report.solution = json!({
                "partition": r.partition,
                "value": r.value,
                "witness": r.witness,
                "evidence": r.evidence,
            });
            report.diagnostics = json!({ "objective": r.lp.objective, "pivots": r.lp.pivots });
        }
        Mode::LocalSearch => {
            let trials = args.trials.unwrap_or(100 * g.m().max(1));
            let (p, trace) = weakly_stable_multiway(&g, &terminals, trials, report.seed, 1e-9)?;
            report.status = if trace.steps.is_empty() {
                Status::CertifiedStop
            } else {
                Status::Improved
            };
            report.tolerances = json!({ "trials_per_round": trials, "solver": 1e-9 });
            report.solution = json!({ "partition": p, "value": multiway_cost(&g, &p)? });
            report.diagnostics = json!({ "iterations": trace.iterations, "trace": trace });
        }
        Mode::Brute => {
            let (p, value) = brute_multiway_cut(&g, &terminals, &limits)?;
            report.status = Status::Optimal;
            report.tolerances = to_value(&limits);
            report.solution = json!({ "partition": p, "value": value });
        }
    }
    Ok(())
}

pub fn certify(input: &Path, gamma: f64, delta: Option<f64>, report: &mut RunReport) -> Result<()> {
    let inst = read_instance(input, report)?;
    let limits = OracleLimits::default();
    report.tolerances = json!({ "gamma": gamma, "delta": delta, "limits": limits });
    report.solution = match inst {
        Instance::Graph { graph, terminals: None } => {
            let r = maxcut_stability_report(&graph, &limits)?;
            match delta {
                Some(d) => {
                    let w = weak_stability_check(&graph, gamma, d, &limits)?;
                    json!({ "stable": w.stable, "margin": r.margin, "optimum": w.optimum, "violating": w.violating })
                }
                None => {
                    if !(gamma >= 1.0 && gamma.is_finite()) {
                        return Err(Error::Validation(format!("gamma must be finite and >= 1, got {gamma}")));
                    }
                    json!({ "stable": r.is_stable(gamma), "margin": r.margin, "optimum": r.optimum, "witness": r.witness })
                }
            }
        }
        Instance::Graph { graph, terminals: Some(t) } => {
            if delta.is_some() {
                return Err(Error::Validation("--delta applies to max cut instances only".into()));
            }
            let r = multiway_stability_report(&graph, &t, &limits)?;
            json!({ "stable": r.is_stable(gamma), "margin": r.margin, "optimum": r.optimum, "witness": r.witness })
        }
        Instance::Signed(sg) => {
            if delta.is_some() {
                return Err(Error::Validation("--delta applies to max cut instances only".into()));
            }
            let r = cc2_stability_report(&sg, &limits)?;
            json!({ "stable": r.is_stable_at(gamma), "margin": r.margin, "clustering": r.clustering })
        }
        Instance::SparsestCut(_) => {
            return Err(Error::Validation("certify expects a graph or signed-graph instance".into()))
        }
    };
    report.status = Status::Completed;
    Ok(())
}

pub fn round(args: &RoundArgs, report: &mut RunReport) -> Result<()> {
    let (g, terminals) = graph_of(read_instance(&args.input, report)?)?;
    let terminals = terminals.ok_or_else(|| Error::Validation("rounding needs a `terminals` list".into()))?;
    let sol = match &args.points {
        Some(path) => {
            let text = std::fs::read(path)
                .map_err(|e| Error::Validation(format!("cannot read {}: {e}", path.display())))?;
            let points: Vec<Vec<f64>> =
                serde_json::from_slice(&text).map_err(|e| Error::Malformed(e.to_string()))?;
            LpSolution::from_points(&g, &terminals, points)?
        }
        None => solve_lp(&build_ckr_lp(&g, &terminals)?, 1e-9)?,
    };
    let stats = separation_statistics(&sol, args.samples, report.seed, args.streams);
    report.status = Status::Completed;
    report.tolerances = json!({ "samples": args.samples, "streams": args.streams, "stderr_multiplier": 5.0 });
    report.solution = json!({ "all_within_bounds": stats.all_within_bounds(), "statistics": stats });
    report.diagnostics = json!({ "lp_objective": sol.objective, "points": sol.points });
    Ok(())
}
