//! JSON instance files and the plain-text edge-list format.
//!
//! JSON schema:
//!
//! ```text
//! {"n": int, "edges": [[u, v, w], ...],
//!  "terminals": [int, ...]?,
//!  "labels": {"plus": [[u, v], ...], "minus": [[u, v], ...]}?,
//!  "demands": [[u, v, d], ...]?,
//!  "provenance": {...}?}
//! ```
//!
//! A file with `demands` is a sparsest-cut instance whose `edges` are the
//! capacity edges; a file with `labels` is a signed graph; anything else is a
//! weighted graph, optionally with terminals.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::{validate_terminals, Edge, Sign, SignedGraph, WeightedGraph};
use crate::oracle::SparsestCutInstance;

#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Graph {
        graph: WeightedGraph,
        terminals: Option<Vec<usize>>,
    },
    Signed(SignedGraph),
    SparsestCut(SparsestCutInstance),
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Graph { .. } => "graph",
            Instance::Signed(_) => "signed",
            Instance::SparsestCut(_) => "sparsest-cut",
        }
    }
}

/// An instance together with the optional provenance block of a fixture.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceFile {
    pub instance: Instance,
    pub provenance: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terminals: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<RawLabels>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    demands: Option<Vec<(usize, usize, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLabels {
    #[serde(default)]
    plus: Vec<(usize, usize)>,
    #[serde(default)]
    minus: Vec<(usize, usize)>,
}

fn triples(edges: &[Edge]) -> Vec<(usize, usize, f64)> {
    edges.iter().map(|e| (e.u, e.v, e.w)).collect()
}

pub fn parse_instance(bytes: &[u8]) -> Result<Instance> {
    parse_instance_file(bytes).map(|f| f.instance)
}

pub fn parse_instance_file(bytes: &[u8]) -> Result<InstanceFile> {
    let raw: RawInstance =
        serde_json::from_slice(bytes).map_err(|e| Error::Malformed(e.to_string()))?;
    if raw.labels.is_some() && raw.demands.is_some() {
        return Err(Error::Malformed(
            "an instance cannot carry both labels and demands".into(),
        ));
    }
    let instance = if let Some(demands) = raw.demands {
        if raw.terminals.is_some() {
            return Err(Error::Malformed(
                "terminals are not allowed on a sparsest-cut instance".into(),
            ));
        }
        Instance::SparsestCut(SparsestCutInstance::new(raw.n, raw.edges, demands)?)
    } else {
        let graph = WeightedGraph::new(raw.n, raw.edges)?;
        if let Some(labels) = raw.labels {
            if raw.terminals.is_some() {
                return Err(Error::Malformed(
                    "terminals are not allowed on a signed graph".into(),
                ));
            }
            Instance::Signed(signed_from_labels(graph, labels)?)
        } else {
            if let Some(t) = &raw.terminals {
                validate_terminals(raw.n, t)?;
            }
            Instance::Graph {
                graph,
                terminals: raw.terminals,
            }
        }
    };
    Ok(InstanceFile {
        instance,
        provenance: raw.provenance,
    })
}

fn signed_from_labels(graph: WeightedGraph, labels: RawLabels) -> Result<SignedGraph> {
    let index: HashMap<(usize, usize), usize> = graph
        .edges()
        .iter()
        .enumerate()
        .map(|(i, e)| ((e.u, e.v), i))
        .collect();
    let mut out: Vec<Option<Sign>> = vec![None; graph.m()];
    let tagged = labels
        .plus
        .iter()
        .map(|&p| (p, Sign::Plus))
        .chain(labels.minus.iter().map(|&p| (p, Sign::Minus)));
    for ((a, b), sign) in tagged {
        let key = if a < b { (a, b) } else { (b, a) };
        let i = *index
            .get(&key)
            .ok_or_else(|| Error::Malformed(format!("label on missing edge ({a}, {b})")))?;
        if out[i].replace(sign).is_some() {
            return Err(Error::Malformed(format!("edge ({a}, {b}) labeled twice")));
        }
    }
    let labels = out
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            s.ok_or_else(|| {
                let e = graph.edges()[i];
                Error::Malformed(format!("edge ({}, {}) has no label", e.u, e.v))
            })
        })
        .collect::<Result<Vec<_>>>()?;
    SignedGraph::new(graph, labels)
}

pub fn serialize_instance(instance: &Instance) -> String {
    serialize_instance_file(&InstanceFile {
        instance: instance.clone(),
        provenance: None,
    })
}

pub fn serialize_instance_file(file: &InstanceFile) -> String {
    let mut raw = RawInstance {
        n: 0,
        edges: Vec::new(),
        terminals: None,
        labels: None,
        demands: None,
        provenance: file.provenance.clone(),
    };
    match &file.instance {
        Instance::Graph { graph, terminals } => {
            raw.n = graph.n();
            raw.edges = triples(graph.edges());
            raw.terminals = terminals.clone();
        }
        Instance::Signed(sg) => {
            raw.n = sg.n();
            raw.edges = triples(sg.graph().edges());
            let mut labels = RawLabels {
                plus: Vec::new(),
                minus: Vec::new(),
            };
            for (e, s) in sg.graph().edges().iter().zip(sg.labels()) {
                match s {
                    Sign::Plus => labels.plus.push((e.u, e.v)),
                    Sign::Minus => labels.minus.push((e.u, e.v)),
                }
            }
            raw.labels = Some(labels);
        }
        Instance::SparsestCut(sc) => {
            raw.n = sc.n();
            raw.edges = triples(sc.capacities());
            raw.demands = Some(triples(sc.demands()));
        }
    }
    serde_json::to_string(&raw).expect("instance serializes")
}

/// Parses the text format: a header line `n m`, then `m` lines `u v w`.
/// Blank lines and lines starting with `#` are skipped.
pub fn parse_edge_list(text: &str) -> Result<WeightedGraph> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let header = lines
        .next()
        .ok_or_else(|| Error::Malformed("missing header line `n m`".into()))?;
    let mut it = header.split_whitespace();
    let (n, m) = match (it.next(), it.next(), it.next()) {
        (Some(n), Some(m), None) => (parse_num::<usize>(n, 1)?, parse_num::<usize>(m, 1)?),
        _ => return Err(Error::Malformed(format!("bad header `{header}`"))),
    };
    let mut edges = Vec::with_capacity(m);
    for (i, line) in lines.enumerate() {
        let lineno = i + 2;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(Error::Malformed(format!(
                "line {lineno}: expected `u v w`, got `{line}`"
            )));
        }
        edges.push((
            parse_num::<usize>(parts[0], lineno)?,
            parse_num::<usize>(parts[1], lineno)?,
            parse_num::<f64>(parts[2], lineno)?,
        ));
    }
    if edges.len() != m {
        return Err(Error::Malformed(format!(
            "header announces {m} edges, found {}",
            edges.len()
        )));
    }
    WeightedGraph::new(n, edges)
}

fn parse_num<T: std::str::FromStr>(s: &str, line: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Malformed(format!("line {line}: cannot parse `{s}`")))
}

pub fn write_edge_list(g: &WeightedGraph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_graph() {
        let inst = parse_instance(br#"{"n":2,"edges":[[0,1,1.0]]}"#).unwrap();
        match inst {
            Instance::Graph { graph, terminals } => {
                assert_eq!(graph.n(), 2);
                assert_eq!(graph.m(), 1);
                assert!(terminals.is_none());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn distinct_diagnostics() {
        let cases: [(&[u8], fn(&Error) -> bool); 5] = [
            (br#"{"n":2,"edges":[[0,0,1.0]]}"#, |e| matches!(e, Error::SelfLoop { .. })),
            (br#"{"n":2,"edges":[[0,1,-1.0]]}"#, |e| matches!(e, Error::InvalidWeight { .. })),
            (br#"{"n":2,"edges":[[0,1,1.0],[1,0,1.0]]}"#, |e| {
                matches!(e, Error::DuplicateEdge { .. })
            }),
            (br#"{"n":2,"edges":[[0,5,1.0]]}"#, |e| matches!(e, Error::VertexOutOfRange { .. })),
            (br#"{"n":2,"edges":[[0,1]"#, |e| matches!(e, Error::Malformed(_))),
        ];
        for (bytes, check) in cases {
            let err = parse_instance(bytes).unwrap_err();
            assert!(check(&err), "{err:?}");
        }
    }

    #[test]
    fn signed_graph_requires_every_label() {
        let err = parse_instance(
            br#"{"n":3,"edges":[[0,1,1.0],[1,2,1.0]],"labels":{"plus":[[0,1]]}}"#,
        )
        .unwrap_err();
        assert!(matches!(err, Error::Malformed(_)));
        let ok = parse_instance(
            br#"{"n":3,"edges":[[0,1,1.0],[1,2,1.0]],"labels":{"plus":[[1,0]],"minus":[[1,2]]}}"#,
        )
        .unwrap();
        assert!(matches!(ok, Instance::Signed(_)));
    }

    #[test]
    fn sparsest_instance_round_trip() {
        let text = r#"{"n":2,"edges":[[0,1,3.0]],"demands":[[0,1,1.0]]}"#;
        let inst = parse_instance(text.as_bytes()).unwrap();
        assert_eq!(inst.kind(), "sparsest-cut");
        assert_eq!(serialize_instance(&inst), text);
    }

    #[test]
    fn provenance_is_preserved() {
        let text = r#"{"n":2,"edges":[[0,1,0.5]],"terminals":[0,1],"provenance":{"gamma":2.0}}"#;
        let file = parse_instance_file(text.as_bytes()).unwrap();
        assert_eq!(serialize_instance_file(&file), text);
    }

    #[test]
    fn edge_list_round_trip() {
        let g = WeightedGraph::new(3, [(0, 1, 1.5), (1, 2, 0.1)]).unwrap();
        let text = write_edge_list(&g);
        assert_eq!(parse_edge_list(&text).unwrap(), g);
        assert!(parse_edge_list("3 2\n0 1 1\n").is_err());
        assert!(parse_edge_list("").is_err());
    }
}
