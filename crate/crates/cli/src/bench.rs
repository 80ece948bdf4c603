use serde::Serialize;
use serde_json::json;
use stablecut::generate::{generate_stable_maxcut, random_graph};
use stablecut::graph::WeightedGraph;
use stablecut::local::{weakly_stable_max_cut, weakly_stable_multiway, ExactSparsestCut};
use stablecut::lp::{robust_multiway_cut, LpTolerances, MultiwayStatus};
use stablecut::oracle::{maxcut_stability_report, multiway_stability_report, Margin, OracleLimits};
use stablecut::sdp::{robust_max_cut, MaxCutStatus, SdpTolerances};
use stablecut::{Error, Result};

use crate::report::{RunReport, Status};
use crate::{BenchArgs, Suite};

#[derive(Serialize)]
struct Row {
    instance_id: usize,
    n: usize,
    m: usize,
    margin: String,
    sdp_integral: Option<bool>,
    lp_integral: Option<bool>,
    ls_iterations: usize,
    seed: u64,
}

fn margin_text(m: &Margin) -> String {
    m.to_string()
}

fn maxcut_row(id: usize, g: &WeightedGraph, seed: u64, limits: &OracleLimits) -> Result<Row> {
    let report = maxcut_stability_report(g, limits)?;
    let sdp = robust_max_cut(g, &SdpTolerances::default())?;
    let (_, trace) = weakly_stable_max_cut(g, &ExactSparsestCut { limits: *limits }, None)?;
    Ok(Row {
        instance_id: id,
        n: g.n(),
        m: g.m(),
        margin: margin_text(&report.margin),
        sdp_integral: Some(sdp.status == MaxCutStatus::Optimal),
        lp_integral: None,
        ls_iterations: trace.iterations,
        seed,
    })
}

fn multiway_row(id: usize, g: &WeightedGraph, seed: u64, limits: &OracleLimits) -> Result<Row> {
    let k = 2 + (seed % 2) as usize;
    let terminals: Vec<usize> = (0..k).collect();
    let report = multiway_stability_report(g, &terminals, limits)?;
    let lp = robust_multiway_cut(g, &terminals, &LpTolerances::default())?;
    let (_, trace) = weakly_stable_multiway(g, &terminals, 100 * g.m(), seed, 1e-9)?;
    Ok(Row {
        instance_id: id,
        n: g.n(),
        m: g.m(),
        margin: margin_text(&report.margin),
        sdp_integral: None,
        lp_integral: Some(lp.status == MultiwayStatus::Optimal),
        ls_iterations: trace.iterations,
        seed,
    })
}

pub fn bench(args: &BenchArgs, report: &mut RunReport) -> Result<()> {
    let limits = OracleLimits::default();
    let mut writer = csv::Writer::from_path(&args.output)
        .map_err(|e| Error::Validation(format!("cannot write {}: {e}", args.output.display())))?;
    let io_err = |e: csv::Error| Error::Internal(format!("csv: {e}"));
    for i in 0..args.count {
        let seed = args.seed.wrapping_add(i as u64);
        let n = 4 + (seed % 7) as usize;
        let row = match args.suite {
            Suite::Maxcut => maxcut_row(i, &random_graph(n, 0.6, seed)?, seed, &limits)?,
            Suite::Multiway => multiway_row(i, &random_graph(n, 0.6, seed)?, seed, &limits)?,
            Suite::Reduction => {
                let gamma = [1.5, 2.0, 3.0][i % 3];
                let g = generate_stable_maxcut(2 * (2 + (seed % 4) as usize), gamma, seed, &limits)?;
                maxcut_row(i, &g.artifact.graph, seed, &limits)?
            }
        };
        writer.serialize(row).map_err(io_err)?;
    }
    writer.flush().map_err(|e| Error::Internal(format!("csv: {e}")))?;
    report.status = Status::Completed;
    report.solution = json!({ "path": args.output, "rows": args.count });
    report.tolerances = json!({ "sdp": SdpTolerances::default(), "lp": LpTolerances::default(), "limits": limits });
    Ok(())
}
