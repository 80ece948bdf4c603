use serde_json::json;
use stablecut::generate::{
    generate_stable_maxcut_with, generate_stable_multiway, generate_weakly_stable_maxcut, star_fixture,
};
use stablecut::io::{serialize_instance_file, Instance, InstanceFile};
use stablecut::oracle::{multiway_stability_report, OracleLimits};
use stablecut::{Error, Result};

use crate::report::{RunReport, Status};
use crate::{Family, GenerateArgs};

pub fn generate(args: &GenerateArgs, report: &mut RunReport) -> Result<()> {
    let limits = OracleLimits::default();
    let seed = args.seed;
    let (instance, provenance) = match args.family {
        Family::ScReduction => {
            let g = generate_stable_maxcut_with(args.n, args.gamma, seed, args.gadget.into(), &limits)?;
            let provenance = json!({
                "family": "sc-reduction",
                "seed": seed,
                "gamma": args.gamma,
                "gadget": g.artifact.gadget,
                "verified_margin": g.margin,
                "planted": g.artifact.planted,
                "reduction": g.artifact.provenance,
            });
            (Instance::Graph { graph: g.artifact.graph, terminals: None }, provenance)
        }
        Family::WeakMaxcut => {
            let w = generate_weakly_stable_maxcut(args.n, args.gamma, args.delta, seed, &limits)?;
            let provenance = json!({
                "family": "weak-maxcut",
                "seed": seed,
                "gamma": args.gamma,
                "delta": args.delta,
                "planted": w.planted,
                "verified": true,
            });
            (Instance::Graph { graph: w.graph, terminals: None }, provenance)
        }
        Family::Multiway => {
            let s = generate_stable_multiway(args.n, args.k, args.gamma, seed, &limits)?;
            let provenance = json!({
                "family": "multiway",
                "seed": seed,
                "gamma": args.gamma,
                "verified_margin": s.margin,
                "planted": s.planted,
            });
            (Instance::Graph { graph: s.graph, terminals: Some(s.terminals) }, provenance)
        }
        Family::Star => {
            if !(args.weight > 0.0 && args.weight.is_finite()) {
                return Err(Error::Validation(format!("star weight must be positive, got {}", args.weight)));
            }
            let (graph, terminals) = star_fixture(args.weight)?;
            let r = multiway_stability_report(&graph, &terminals, &limits)?;
            let provenance = json!({
                "family": "star",
                "weight": args.weight,
                "verified_margin": r.margin,
                "planted": r.optimum,
            });
            (Instance::Graph { graph, terminals: Some(terminals) }, provenance)
        }
    };
    let text = serialize_instance_file(&InstanceFile {
        instance,
        provenance: Some(provenance.clone()),
    });
    std::fs::write(&args.output, text.as_bytes())
        .map_err(|e| Error::Validation(format!("cannot write {}: {e}", args.output.display())))?;
    report.instance_digest = Some(crate::report::digest(text.as_bytes()));
    report.status = Status::Completed;
    report.solution = json!({ "path": args.output, "provenance": provenance });
    report.tolerances = serde_json::to_value(limits).unwrap_or_default();
    Ok(())
}
