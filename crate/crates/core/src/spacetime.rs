//! Spacetime graph of a run: one vertex per (step, head) update event.
//!
//! Control edges join every head of step τ to every head of step τ+1.
//! Data edges join the step that last wrote a cell to the next step whose
//! head reads it, on the same tape.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::run::RunRecord;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Control,
    Data,
}

/// Update of head `head` (1-based) during step `tau` (0-based: the
/// transition from C_τ to C_{τ+1}).
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Vertex {
    pub tau: u64,
    pub head: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    pub from: Vertex,
    pub to: Vertex,
    pub kind: EdgeKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpacetimeDag {
    pub t: u64,
    pub k: usize,
    pub edges: Vec<Edge>,
}

#[derive(Debug, Error)]
pub enum SpacetimeError {
    #[error("unknown format `{0}` (expected json or dot)")]
    UnknownFormat(String),
    #[error("invalid graph document: {0}")]
    Json(#[from] serde_json::Error),
    #[error("graph document is inconsistent: {0}")]
    Inconsistent(&'static str),
}

pub fn build_dag(run: &RunRecord<'_>) -> SpacetimeDag {
    let k = run.machine().tapes();
    let t = run.t();
    let mut edges = Vec::new();
    for tau in 1..t {
        for i in 1..=k {
            for j in 1..=k {
                edges.push(Edge {
                    from: Vertex { tau: tau - 1, head: i },
                    to: Vertex { tau, head: j },
                    kind: EdgeKind::Control,
                });
            }
        }
    }
    for i in 0..k {
        let mut last_writer: HashMap<i64, u64> = HashMap::new();
        for tau in 0..t {
            let cell = run.head(tau, i);
            if let Some(&prev) = last_writer.get(&cell) {
                edges.push(Edge {
                    from: Vertex { tau: prev, head: i + 1 },
                    to: Vertex { tau, head: i + 1 },
                    kind: EdgeKind::Data,
                });
            }
            // Every step writes the cell under the head.
            last_writer.insert(cell, tau);
        }
    }
    edges.sort();
    SpacetimeDag { t, k, edges }
}

impl SpacetimeDag {
    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.t).flat_map(move |tau| (1..=self.k).map(move |head| Vertex { tau, head }))
    }

    fn index(&self, v: Vertex) -> usize {
        v.tau as usize * self.k + (v.head - 1)
    }

    /// Kahn's algorithm; `None` if the graph has a cycle.
    pub fn topological_order(&self) -> Option<Vec<Vertex>> {
        let n = (self.t as usize) * self.k;
        let mut indeg = vec![0usize; n];
        let mut out: Vec<Vec<usize>> = vec![Vec::new(); n];
        for e in &self.edges {
            let (a, b) = (self.index(e.from), self.index(e.to));
            out[a].push(b);
            indeg[b] += 1;
        }
        let verts: Vec<Vertex> = self.vertices().collect();
        let mut queue: VecDeque<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(v) = queue.pop_front() {
            order.push(verts[v]);
            for &w in &out[v] {
                indeg[w] -= 1;
                if indeg[w] == 0 {
                    queue.push_back(w);
                }
            }
        }
        (order.len() == n).then_some(order)
    }
}

/// Number of update events, `k·t`.
pub fn volume(dag: &SpacetimeDag) -> u64 {
    dag.t * dag.k as u64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DagFormat {
    Json,
    Dot,
}

impl FromStr for DagFormat {
    type Err = SpacetimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(DagFormat::Json),
            "dot" => Ok(DagFormat::Dot),
            other => Err(SpacetimeError::UnknownFormat(other.to_owned())),
        }
    }
}

#[derive(Serialize, Deserialize)]
struct EdgeJson {
    from: [u64; 2],
    to: [u64; 2],
    kind: EdgeKind,
}

#[derive(Serialize, Deserialize)]
struct DagJson {
    t: u64,
    k: usize,
    vertices: Vec<Vertex>,
    edges: Vec<EdgeJson>,
}

fn vertex_id(v: Vertex) -> String {
    format!("v_{}_{}", v.tau, v.head)
}

pub fn export_dag(dag: &SpacetimeDag, format: DagFormat) -> String {
    match format {
        DagFormat::Json => {
            let doc = DagJson {
                t: dag.t,
                k: dag.k,
                vertices: dag.vertices().collect(),
                edges: dag
                    .edges
                    .iter()
                    .map(|e| EdgeJson {
                        from: [e.from.tau, e.from.head as u64],
                        to: [e.to.tau, e.to.head as u64],
                        kind: e.kind,
                    })
                    .collect(),
            };
            serde_json::to_string_pretty(&doc).expect("plain data serializes")
        }
        DagFormat::Dot => {
            let mut out = String::from("digraph spacetime {\n");
            for v in dag.vertices() {
                writeln!(out, "  {};", vertex_id(v)).unwrap();
            }
            for e in &dag.edges {
                let style = match e.kind {
                    EdgeKind::Control => "control",
                    EdgeKind::Data => "data",
                };
                writeln!(
                    out,
                    "  {} -> {} [label={style}];",
                    vertex_id(e.from),
                    vertex_id(e.to)
                )
                .unwrap();
            }
            out.push_str("}\n");
            out
        }
    }
}

pub fn import_dag_json(text: &str) -> Result<SpacetimeDag, SpacetimeError> {
    let doc: DagJson = serde_json::from_str(text)?;
    let dag = SpacetimeDag {
        t: doc.t,
        k: doc.k,
        edges: doc
            .edges
            .iter()
            .map(|e| Edge {
                from: Vertex {
                    tau: e.from[0],
                    head: e.from[1] as usize,
                },
                to: Vertex {
                    tau: e.to[0],
                    head: e.to[1] as usize,
                },
                kind: e.kind,
            })
            .collect(),
    };
    if !doc.vertices.iter().copied().eq(dag.vertices()) {
        return Err(SpacetimeError::Inconsistent("vertex list"));
    }
    let in_range = |v: &Vertex| v.tau < dag.t && (1..=dag.k).contains(&v.head);
    if !dag.edges.iter().all(|e| in_range(&e.from) && in_range(&e.to)) {
        return Err(SpacetimeError::Inconsistent("edge endpoint"));
    }
    Ok(dag)
}
