//! The machine-readable process graph: `processes[]`, `channels[]`, `edges[]`.

use std::collections::BTreeMap;
use std::fmt::Display;

use serde::{Serialize, Serializer};

use super::*;

pub(crate) fn display_str<T: Display, S: Serializer>(v: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

#[derive(Debug, Clone, Serialize)]
pub struct ProcessDoc<'g> {
    pub name: &'g str,
    pub sort: &'g str,
    pub composite_core: bool,
    #[serde(flatten)]
    pub signature: &'g BehaviourSignature,
    pub static_consts: BTreeMap<&'g str, &'g Decimal>,
    pub init: BTreeMap<&'g str, &'g Decimal>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Edge<'g> {
    pub parent: &'g str,
    pub child: &'g str,
}

#[derive(Debug, Clone, Serialize)]
pub struct GraphDoc<'g> {
    pub roots: Vec<&'g str>,
    pub processes: Vec<ProcessDoc<'g>>,
    pub channels: &'g [ChannelInfo],
    pub edges: Vec<Edge<'g>>,
}

fn edges<'g>(n: &'g ProcessNode, out: &mut Vec<Edge<'g>>) {
    for c in &n.children {
        out.push(Edge { parent: &n.sort, child: &c.sort });
        edges(c, out);
    }
}

impl<'g> GraphDoc<'g> {
    pub fn new(g: &'g ProcessGraph) -> Self {
        let processes = g
            .processes()
            .into_iter()
            .map(|p| ProcessDoc {
                name: &p.name,
                sort: &p.sort,
                composite_core: p.composite_core,
                signature: &p.signature,
                static_consts: p.static_consts.iter().map(|(n, v)| (n.as_str(), v)).collect(),
                init: p.init.iter().map(|(n, v)| (n.as_str(), v)).collect(),
            })
            .collect();
        let mut e = Vec::new();
        for r in &g.roots {
            edges(r, &mut e);
        }
        GraphDoc { roots: g.roots.iter().map(|r| r.sort.as_str()).collect(), processes, channels: &g.channels, edges: e }
    }
}

/// Pretty-printed JSON document for `g`, newline-terminated.
pub fn graph_json(g: &ProcessGraph) -> String {
    let mut s = serde_json::to_string_pretty(&GraphDoc::new(g)).expect("graph serializes");
    s.push('\n');
    s
}
