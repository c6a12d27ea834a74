//! Resolution graphs: weighted trees of rational curves.
//!
//! Vertices are kept in file order, which is the canonical index order used
//! by every vector and matrix in the crate.

use std::collections::{BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, Matrix};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub id: String,
    /// Self-intersection number, always negative.
    #[serde(rename = "w")]
    pub selfint: i64,
}

/// On-disk shape of a graph file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GraphFile {
    vertices: Vec<Vertex>,
    edges: Vec<(String, String)>,
}

/// A weighted graph of genus-zero curves. Ids are unique and edges are
/// simple; tree-ness and negative definiteness are checked by
/// [`ResolutionGraph::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ResolutionGraph {
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    index: HashMap<String, usize>,
}

impl ResolutionGraph {
    pub fn new(vertices: Vec<Vertex>, edges: &[(String, String)]) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, v) in vertices.iter().enumerate() {
            if v.id.is_empty() || v.id.chars().any(char::is_whitespace) {
                return Err(Error::MalformedInput(format!("bad vertex id `{}`", v.id)));
            }
            if v.selfint >= 0 {
                return Err(Error::MalformedInput(format!(
                    "vertex `{}` has non-negative weight {}",
                    v.id, v.selfint
                )));
            }
            if index.insert(v.id.clone(), i).is_some() {
                return Err(Error::DuplicateId(v.id.clone()));
            }
        }
        let mut adjacency = vec![Vec::new(); vertices.len()];
        let mut seen = BTreeSet::new();
        let mut resolved = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            let ia = *index.get(a).ok_or_else(|| Error::DanglingEdge(a.clone()))?;
            let ib = *index.get(b).ok_or_else(|| Error::DanglingEdge(b.clone()))?;
            if ia == ib {
                return Err(Error::SelfLoop(a.clone()));
            }
            if !seen.insert((ia.min(ib), ia.max(ib))) {
                return Err(Error::DuplicateEdge(a.clone(), b.clone()));
            }
            adjacency[ia].push(ib);
            adjacency[ib].push(ia);
            resolved.push((ia, ib));
        }
        for nbrs in &mut adjacency {
            nbrs.sort_unstable();
        }
        Ok(ResolutionGraph { vertices, edges: resolved, adjacency, index })
    }

    /// Builds a graph from canonical indices; used by generators and tests.
    pub fn from_indices(weights: &[i64], edges: &[(usize, usize)]) -> Result<Self> {
        let vertices = weights
            .iter()
            .enumerate()
            .map(|(i, &w)| Vertex { id: format!("v{i}"), selfint: w })
            .collect::<Vec<_>>();
        let edges = edges
            .iter()
            .map(|&(a, b)| {
                let name = |i: usize| {
                    vertices.get(i).map(|v| v.id.clone()).unwrap_or_else(|| format!("v{i}"))
                };
                (name(a), name(b))
            })
            .collect::<Vec<_>>();
        ResolutionGraph::new(vertices, &edges)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: GraphFile =
            serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))?;
        ResolutionGraph::new(file.vertices, &file.edges)
    }

    pub fn to_json(&self) -> String {
        let file = GraphFile {
            vertices: self.vertices.clone(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| (self.vertices[a].id.clone(), self.vertices[b].id.clone()))
                .collect(),
        };
        serde_json::to_string(&file).expect("graph serialization cannot fail")
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vertices[i].id
    }

    pub fn selfint(&self, i: usize) -> i64 {
        self.vertices[i].selfint
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_string()))
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn intersection_matrix(&self) -> IntersectionMatrix {
        let n = self.len();
        let mut m = Matrix::filled(n, n, 0i64);
        for (i, v) in self.vertices.iter().enumerate() {
            m[(i, i)] = v.selfint;
        }
        for &(a, b) in &self.edges {
            m[(a, b)] = 1;
            m[(b, a)] = 1;
        }
        IntersectionMatrix(m)
    }

    /// Whether `set` (canonical indices) induces a connected subgraph.
    pub fn is_connected_subset(&self, set: &BTreeSet<usize>) -> bool {
        let Some(&start) = set.iter().next() else { return false };
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in &self.adjacency[v] {
                if set.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == set.len()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let all: BTreeSet<usize> = (0..self.len()).collect();
        let connected = self.is_empty() || self.is_connected_subset(&all);
        // a connected graph is a tree iff |E| = |V| - 1; in general the
        // graph has a cycle iff |E| > |V| - #components
        let components = self.component_count();
        if self.edges.len() + components > self.len() {
            failures.push(ValidationFailure::NotATree);
        }
        if !connected {
            failures.push(ValidationFailure::NotConnected);
        }
        if self.is_empty() {
            failures.push(ValidationFailure::Empty);
        } else if !self.intersection_matrix().is_negative_definite() {
            failures.push(ValidationFailure::NotNegativeDefinite);
        }
        ValidationReport { ok: failures.is_empty(), failures }
    }

    fn component_count(&self) -> usize {
        let mut seen = vec![false; self.len()];
        let mut count = 0;
        for s in 0..self.len() {
            if seen[s] {
                continue;
            }
            count += 1;
            seen[s] = true;
            let mut stack = vec![s];
            while let Some(v) = stack.pop() {
                for &w in &self.adjacency[v] {
                    if !seen[w] {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    }

    /// Ends (degree at most 1), nodes (degree at least 3) and chain
    /// vertices, read off the tree degrees. In a tree `(A - A_i)·A_i` is
    /// exactly the degree of `A_i`.
    pub fn classify_vertices(&self) -> VertexClassification {
        let mut c = VertexClassification::default();
        for i in 0..self.len() {
            match self.degree(i) {
                0 | 1 => c.ends.push(i),
                2 => c.chain_vertices.push(i),
                _ => c.nodes.push(i),
            }
        }
        c
    }

    /// Connected components of the graph with `v` removed, one per
    /// neighbour of `v`, ordered by the canonical index of the attaching
    /// vertex.
    pub fn branches_at(&self, v: usize) -> Vec<Branch> {
        self.adjacency[v]
            .iter()
            .map(|&k0| {
                let mut set = BTreeSet::from([k0]);
                let mut stack = vec![k0];
                while let Some(x) = stack.pop() {
                    for &y in &self.adjacency[x] {
                        if y != v && set.insert(y) {
                            stack.push(y);
                        }
                    }
                }
                Branch { base: v, attach: k0, vertices: set.into_iter().collect() }
            })
            .collect()
    }

    /// Induced subgraph on a vertex subset, preserving canonical order.
    pub fn subgraph(&self, set: &[usize]) -> ResolutionGraph {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        sorted.dedup();
        let vertices = sorted.iter().map(|&i| self.vertices[i].clone()).collect();
        let member: BTreeSet<usize> = sorted.iter().copied().collect();
        let edges = self
            .edges
            .iter()
            .filter(|(a, b)| member.contains(a) && member.contains(b))
            .map(|&(a, b)| (self.vertices[a].id.clone(), self.vertices[b].id.clone()))
            .collect::<Vec<_>>();
        ResolutionGraph::new(vertices, &edges).expect("induced subgraph of a valid graph")
    }

    /// `|det|` of the intersection matrix of the induced subgraph on `set`.
    pub fn subset_det(&self, set: &[usize]) -> BigInt {
        let m = self.intersection_matrix();
        linalg::determinant(&m.0.select(set, set)).abs()
    }
}

/// A connected component of `A - A_base`, attached to the base vertex
/// through `attach` (the unique component vertex adjacent to the base).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Branch {
    pub base: usize,
    pub attach: usize,
    /// Canonical indices, sorted.
    pub vertices: Vec<usize>,
}

impl Branch {
    pub fn contains(&self, v: usize) -> bool {
        self.vertices.binary_search(&v).is_ok()
    }

    pub fn subgraph(&self, g: &ResolutionGraph) -> ResolutionGraph {
        g.subgraph(&self.vertices)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VertexClassification {
    pub ends: Vec<usize>,
    pub nodes: Vec<usize>,
    pub chain_vertices: Vec<usize>,
}

impl VertexClassification {
    pub fn is_end(&self, v: usize) -> bool {
        self.ends.binary_search(&v).is_ok()
    }

    pub fn is_node(&self, v: usize) -> bool {
        self.nodes.binary_search(&v).is_ok()
    }

    /// Star-shaped: at most one node.
    pub fn is_star_shaped(&self) -> bool {
        self.nodes.len() <= 1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValidationFailure {
    NotATree,
    NotConnected,
    NotNegativeDefinite,
    Empty,
}

impl ValidationFailure {
    pub fn code(self) -> &'static str {
        match self {
            ValidationFailure::NotATree => "not_a_tree",
            ValidationFailure::NotConnected => "not_connected",
            ValidationFailure::NotNegativeDefinite => "not_negative_definite",
            ValidationFailure::Empty => "empty",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub ok: bool,
    pub failures: Vec<ValidationFailure>,
}

/// Intersection form `(A_i · A_j)` in canonical order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionMatrix(pub Matrix<i64>);

impl IntersectionMatrix {
    pub fn det(&self) -> BigInt {
        linalg::determinant(&self.0)
    }

    /// All leading principal minors of `-M` strictly positive.
    pub fn is_negative_definite(&self) -> bool {
        let neg = self.0.map(|x| -x);
        let n = neg.n_rows();
        let minors = linalg::leading_principal_minors(&neg);
        minors.len() == n && minors.iter().all(Signed::is_positive)
    }

    pub fn matrix(&self) -> &Matrix<i64> {
        &self.0
    }
}
