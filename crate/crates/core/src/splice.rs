//! Splice diagrams and the semigroup condition.
//!
//! The splice diagram keeps the nodes and ends of a resolution graph and
//! contracts every maximal chain between them to a single edge. The weight
//! at a node on an edge is `|det|` of the part of the graph cut off by that
//! edge.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::ResolutionGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpliceKind {
    Node,
    Leaf,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpliceVertex {
    pub id: String,
    pub kind: SpliceKind,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpliceEdge {
    pub a: String,
    pub b: String,
    pub w_at_a: Option<u64>,
    pub w_at_b: Option<u64>,
}

impl SpliceEdge {
    fn weight_at(&self, v: &str) -> Option<u64> {
        if self.a == v {
            self.w_at_a
        } else {
            self.w_at_b
        }
    }

    fn other(&self, v: &str) -> &str {
        if self.a == v {
            &self.b
        } else {
            &self.a
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpliceDiagram {
    pub vertices: Vec<SpliceVertex>,
    pub edges: Vec<SpliceEdge>,
}

impl SpliceDiagram {
    pub fn parse(text: &str) -> Result<Self> {
        let d: SpliceDiagram = serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
        d.validate()?;
        Ok(d)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("diagram serializes")
    }

    /// Degenerate diagram of a graph without nodes.
    pub fn no_nodes(&self) -> bool {
        self.vertices.iter().all(|v| v.kind == SpliceKind::Leaf)
    }

    pub fn nodes(&self) -> impl Iterator<Item = &SpliceVertex> {
        self.vertices.iter().filter(|v| v.kind == SpliceKind::Node)
    }

    pub fn leaves(&self) -> impl Iterator<Item = &SpliceVertex> {
        self.vertices.iter().filter(|v| v.kind == SpliceKind::Leaf)
    }

    fn kind_of(&self, id: &str) -> Option<SpliceKind> {
        self.vertices.iter().find(|v| v.id == id).map(|v| v.kind)
    }

    pub fn incident(&self, id: &str) -> Vec<&SpliceEdge> {
        self.edges.iter().filter(|e| e.a == id || e.b == id).collect()
    }

    /// Weight at `v` on the edge joining `v` and `u`.
    pub fn weight(&self, v: &str, u: &str) -> Option<u64> {
        self.incident(v).into_iter().find(|e| e.other(v) == u).and_then(|e| e.weight_at(v))
    }

    /// Tree shape, weights present and positive exactly at node ends,
    /// leaves of degree at most one.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDiagram(msg));
        let mut ids = BTreeSet::new();
        for v in &self.vertices {
            if !ids.insert(v.id.as_str()) {
                return Err(Error::DuplicateId(v.id.clone()));
            }
        }
        let mut pairs = BTreeSet::new();
        for e in &self.edges {
            for (end, w) in [(&e.a, e.w_at_a), (&e.b, e.w_at_b)] {
                match (self.kind_of(end), w) {
                    (None, _) => return Err(Error::DanglingEdge(end.clone())),
                    (Some(SpliceKind::Node), None | Some(0)) => {
                        return bad(format!("edge {}--{} needs a positive weight at node `{end}`", e.a, e.b))
                    }
                    (Some(SpliceKind::Leaf), Some(_)) => {
                        return bad(format!("edge {}--{} carries a weight at leaf `{end}`", e.a, e.b))
                    }
                    _ => {}
                }
            }
            if e.a == e.b {
                return Err(Error::SelfLoop(e.a.clone()));
            }
            let key = if e.a < e.b { (&e.a, &e.b) } else { (&e.b, &e.a) };
            if !pairs.insert(key) {
                return Err(Error::DuplicateEdge(e.a.clone(), e.b.clone()));
            }
        }
        if !self.vertices.is_empty() && self.edges.len() + 1 != self.vertices.len() {
            return bad("not a tree".into());
        }
        // connected + |E| = |V| - 1 means tree
        if let Some(first) = self.vertices.first() {
            let mut seen = BTreeSet::from([first.id.as_str()]);
            let mut stack = vec![first.id.as_str()];
            while let Some(x) = stack.pop() {
                for e in self.incident(x) {
                    let y = e.other(x);
                    if seen.insert(y) {
                        stack.push(y);
                    }
                }
            }
            if seen.len() != self.vertices.len() {
                return bad("not connected".into());
            }
        }
        for v in self.leaves() {
            if self.incident(&v.id).len() > 1 {
                return bad(format!("leaf `{}` has degree greater than one", v.id));
            }
        }
        for v in self.nodes() {
            if self.incident(&v.id).len() < 3 {
                return bad(format!("node `{}` has degree less than three", v.id));
            }
        }
        Ok(())
    }
}

/// `|det|` of the component of `g - v` that contains the neighbour `u`.
pub fn edge_determinant(g: &ResolutionGraph, v: usize, u: usize) -> Result<BigInt> {
    let branch = g
        .branches_at(v)
        .into_iter()
        .find(|b| b.attach == u)
        .ok_or_else(|| Error::InvalidGraph(format!("`{}` and `{}` are not adjacent", g.id(v), g.id(u))))?;
    Ok(g.subset_det(&branch.vertices))
}

fn to_weight(d: BigInt) -> Result<u64> {
    d.to_u64().ok_or_else(|| Error::InvalidGraph(format!("edge determinant {d} does not fit in 64 bits")))
}

/// Splice diagram of a valid resolution graph.
pub fn build_splice(g: &ResolutionGraph) -> Result<SpliceDiagram> {
    let classes = g.classify_vertices();
    let is_key = |v: usize| classes.is_node(v) || classes.is_end(v);
    let vertices = (0..g.len())
        .filter(|&v| is_key(v))
        .map(|v| SpliceVertex {
            id: g.id(v).to_string(),
            kind: if classes.is_node(v) { SpliceKind::Node } else { SpliceKind::Leaf },
        })
        .collect();

    let mut edges = BTreeMap::new();
    for v in (0..g.len()).filter(|&v| is_key(v)) {
        for &first in g.neighbors(v) {
            // walk the chain starting with the edge v -- first
            let (mut prev, mut cur) = (v, first);
            while !is_key(cur) {
                let next = g.neighbors(cur).iter().copied().find(|&x| x != prev).expect("chain vertex has degree 2");
                prev = cur;
                cur = next;
            }
            let (a, b, a_first, b_first) = if v < cur { (v, cur, first, prev) } else { (cur, v, prev, first) };
            if edges.contains_key(&(a, b)) {
                continue;
            }
            let w_at_a = if classes.is_node(a) { Some(to_weight(edge_determinant(g, a, a_first)?)?) } else { None };
            let w_at_b = if classes.is_node(b) { Some(to_weight(edge_determinant(g, b, b_first)?)?) } else { None };
            edges.insert(
                (a, b),
                SpliceEdge { a: g.id(a).to_string(), b: g.id(b).to_string(), w_at_a, w_at_b },
            );
        }
    }
    Ok(SpliceDiagram { vertices, edges: edges.into_values().collect() })
}

/// Whether `d` lies in the additive semigroup generated by `gens`
/// (zero always does). Uses shortest paths over residues modulo the
/// smallest generator: `d` is representable iff it is at least the
/// smallest representable number in its residue class.
pub fn in_semigroup(d: u64, gens: &[u64]) -> bool {
    let gens: Vec<u64> = gens.iter().copied().filter(|&x| x > 0).collect();
    let Some(&a) = gens.iter().min() else {
        return d == 0;
    };
    let a_usize = a as usize;
    let mut dist = vec![u64::MAX; a_usize];
    dist[0] = 0;
    let mut heap = BinaryHeap::from([Reverse((0u64, 0usize))]);
    while let Some(Reverse((dv, r))) = heap.pop() {
        if dv > dist[r] {
            continue;
        }
        for &gk in &gens {
            let nd = dv.saturating_add(gk);
            let nr = (r + (gk % a) as usize) % a_usize;
            if nd < dist[nr] {
                dist[nr] = nd;
                heap.push(Reverse((nd, nr)));
            }
        }
    }
    d >= dist[(d % a) as usize]
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemigroupEntry {
    pub node: String,
    /// Neighbour in the diagram that the edge leads to.
    pub toward: String,
    pub d: u64,
    /// `ℓ'_{vw}` for every leaf `w` beyond the edge, in leaf order.
    pub generators: Vec<(String, u64)>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SemigroupReport {
    pub pass: bool,
    pub entries: Vec<SemigroupEntry>,
}

/// For every node `v` and edge `e` at `v`: `d_ve` must lie in the semigroup
/// generated by the `ℓ'_vw`, `w` ranging over leaves beyond `e`, where
/// `ℓ'_vw` multiplies the weights at every vertex `u != v` of the path from
/// `v` to `w` on the edges at `u` off the path (empty product 1).
pub fn semigroup_check(d: &SpliceDiagram) -> Result<SemigroupReport> {
    d.validate()?;
    if d.nodes().next().is_none() {
        return Err(Error::NoNodes);
    }
    let mut entries = Vec::new();
    for v in d.nodes() {
        for e in d.incident(&v.id) {
            let u = e.other(&v.id);
            let dve = e.weight_at(&v.id).expect("validated");
            let mut generators = Vec::new();
            collect_leaves(d, &v.id, u, 1, &mut generators);
            let gens: Vec<u64> = generators.iter().map(|(_, x)| *x).collect();
            entries.push(SemigroupEntry {
                node: v.id.clone(),
                toward: u.to_string(),
                d: dve,
                ok: in_semigroup(dve, &gens),
                generators,
            });
        }
    }
    Ok(SemigroupReport { pass: entries.iter().all(|e| e.ok), entries })
}

fn collect_leaves(d: &SpliceDiagram, from: &str, at: &str, acc: u64, out: &mut Vec<(String, u64)>) {
    let incident = d.incident(at);
    if d.kind_of(at) == Some(SpliceKind::Leaf) {
        out.push((at.to_string(), acc));
        return;
    }
    for e in &incident {
        let next = e.other(at);
        if next == from {
            continue;
        }
        let off_path: u64 = incident
            .iter()
            .filter(|f| f.other(at) != from && f.other(at) != next)
            .map(|f| f.weight_at(at).expect("validated"))
            .product();
        collect_leaves(d, at, next, acc.saturating_mul(off_path), out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig1() -> ResolutionGraph {
        ResolutionGraph::from_indices(
            &[-2, -2, -4, -2, -2, -2, -2, -2, -2],
            &[(0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7), (7, 8)],
        )
        .unwrap()
    }

    fn d4() -> ResolutionGraph {
        ResolutionGraph::from_indices(&[-2, -2, -2, -2], &[(0, 1), (0, 2), (0, 3)]).unwrap()
    }

    #[test]
    fn edge_determinants() {
        let g = fig1();
        assert_eq!(edge_determinant(&g, 2, 3).unwrap(), BigInt::from(3));
        assert_eq!(edge_determinant(&g, 4, 3).unwrap(), BigInt::from(20));
        assert_eq!(edge_determinant(&g, 2, 0).unwrap(), BigInt::from(2));
        assert_eq!(edge_determinant(&g, 4, 5).unwrap(), BigInt::from(3));
        assert_eq!(edge_determinant(&d4(), 0, 1).unwrap(), BigInt::from(2));
        assert!(edge_determinant(&g, 0, 1).is_err());
    }

    #[test]
    fn fig1_diagram() {
        let d = build_splice(&fig1()).unwrap();
        assert_eq!(d.nodes().count(), 2);
        assert_eq!(d.leaves().count(), 4);
        assert_eq!(d.weight("v2", "v4"), Some(3));
        assert_eq!(d.weight("v4", "v2"), Some(20));
        assert_eq!(d.weight("v2", "v0"), Some(2));
        assert_eq!(d.weight("v2", "v1"), Some(2));
        assert_eq!(d.weight("v4", "v6"), Some(3));
        assert_eq!(d.weight("v4", "v8"), Some(3));
        let r = semigroup_check(&d).unwrap();
        assert!(r.pass);
        let central = r.entries.iter().find(|e| e.node == "v4" && e.toward == "v2").unwrap();
        assert_eq!(central.d, 20);
        assert_eq!(central.generators, vec![("v0".to_string(), 2), ("v1".to_string(), 2)]);
        let left = r.entries.iter().find(|e| e.node == "v2" && e.toward == "v4").unwrap();
        assert_eq!(left.generators, vec![("v6".to_string(), 3), ("v8".to_string(), 3)]);
    }

    #[test]
    fn d4_and_chain() {
        let d = build_splice(&d4()).unwrap();
        assert_eq!(d.nodes().count(), 1);
        assert!(d.edges.iter().all(|e| e.w_at_a == Some(2) && e.w_at_b.is_none()));
        let r = semigroup_check(&d).unwrap();
        assert!(r.pass);
        assert!(r.entries.iter().all(|e| e.generators.iter().all(|(_, l)| *l == 1)));

        let a2 = ResolutionGraph::from_indices(&[-2, -2], &[(0, 1)]).unwrap();
        let d = build_splice(&a2).unwrap();
        assert!(d.no_nodes());
        assert_eq!(d.edges.len(), 1);
        assert_eq!(semigroup_check(&d).unwrap_err(), Error::NoNodes);
    }

    #[test]
    fn hand_built_failure() {
        let text = r#"{
          "vertices": [
            {"id": "p", "kind": "node"}, {"id": "q", "kind": "node"},
            {"id": "l1", "kind": "leaf"}, {"id": "l2", "kind": "leaf"},
            {"id": "l3", "kind": "leaf"}, {"id": "l4", "kind": "leaf"}
          ],
          "edges": [
            {"a": "p", "b": "q", "w_at_a": 5, "w_at_b": 1},
            {"a": "q", "b": "l1", "w_at_a": 4, "w_at_b": null},
            {"a": "q", "b": "l2", "w_at_a": 3, "w_at_b": null},
            {"a": "p", "b": "l3", "w_at_a": 1, "w_at_b": null},
            {"a": "p", "b": "l4", "w_at_a": 1, "w_at_b": null}
          ]
        }"#;
        let d = SpliceDiagram::parse(text).unwrap();
        let r = semigroup_check(&d).unwrap();
        assert!(!r.pass);
        let bad: Vec<_> = r.entries.iter().filter(|e| !e.ok).collect();
        assert_eq!(bad.len(), 1);
        assert_eq!((bad[0].node.as_str(), bad[0].d), ("p", 5));
        let mut gens: Vec<u64> = bad[0].generators.iter().map(|g| g.1).collect();
        gens.sort();
        assert_eq!(gens, vec![3, 4]);
    }

    #[test]
    fn diagram_validation() {
        let weightless = r#"{"vertices":[{"id":"p","kind":"node"},{"id":"a","kind":"leaf"}],
            "edges":[{"a":"p","b":"a","w_at_a":null,"w_at_b":null}]}"#;
        assert_eq!(SpliceDiagram::parse(weightless).unwrap_err().code(), "invalid_diagram");
        let extra = r#"{"vertices":[],"edges":[],"x":1}"#;
        assert_eq!(SpliceDiagram::parse(extra).unwrap_err().code(), "malformed_input");
        let dangling = r#"{"vertices":[{"id":"a","kind":"leaf"}],
            "edges":[{"a":"a","b":"z","w_at_a":null,"w_at_b":null}]}"#;
        assert_eq!(SpliceDiagram::parse(dangling).unwrap_err().code(), "dangling_edge");
    }

    #[test]
    fn round_trip() {
        let d = build_splice(&fig1()).unwrap();
        assert_eq!(SpliceDiagram::parse(&d.to_json()).unwrap(), d);
    }

    #[test]
    fn semigroup_membership() {
        assert!(!in_semigroup(5, &[3, 4]));
        assert!(in_semigroup(6, &[3, 4]));
        assert!(in_semigroup(20, &[2, 2]));
        assert!(!in_semigroup(7, &[2, 4]));
        assert!(in_semigroup(0, &[]));
        assert!(!in_semigroup(3, &[]));
        assert!(in_semigroup(3, &[1]));
        // Frobenius number of <6, 9, 20> is 43
        assert!(!in_semigroup(43, &[6, 9, 20]));
        assert!((44..200).all(|d| in_semigroup(d, &[6, 9, 20])));
    }
}
