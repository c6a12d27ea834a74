//! Monomial cycles and the two topological conditions on the graph.
//!
//! A monomial cycle `D = Σ a_j E*_j` (sum over ends, `a_j >= 0` integers)
//! belongs to a branch `C` of a node `A_i` when `W = D - E*_i` is an
//! effective integral cycle supported on `C`. Intersecting with the
//! components gives the exact reduction used here:
//!
//! * for `j` in `C`: `W · A_j = -a_j` at ends of the graph and `0` elsewhere,
//!   so `W = Σ a_j Ẽ*_j` where `Ẽ*_j` are the dual cycles computed inside
//!   `C` (all coefficients positive);
//! * `D · A_i = 0` forces the coefficient of `W` at the attaching vertex
//!   `k0` to be exactly `1`.
//!
//! Every `Ẽ*_j` has a positive coefficient at `k0`, so the second
//! constraint leaves finitely many exponent tuples; each is tested for
//! integrality of `W`. An empty result is therefore a proof that no
//! witness exists.

use std::cmp::Reverse;

use log::debug;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cycle::{Lattice, QCycle};
use crate::error::{Error, Result};
use crate::graph::Branch;
use crate::linalg::{self, rat, Rational};

/// Default bound on the number of exponent tuples enumerated per branch.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 2_000_000;

/// `D = Σ a_j E*_j` belonging to a branch of a node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialCycle {
    pub node: usize,
    pub branch: Branch,
    /// Exponents in variable order, i.e. aligned with `Lattice::ends()`.
    pub exponents: Vec<u64>,
    pub cycle: QCycle,
}

impl MonomialCycle {
    pub fn degree(&self) -> u64 {
        self.exponents.iter().sum()
    }

    /// `D - E*_node`.
    pub fn excess(&self, lattice: &Lattice) -> QCycle {
        &self.cycle - &lattice.dual_cycle(self.node)
    }

    /// Re-checks the defining properties by intersection products.
    pub fn verify(&self, lattice: &Lattice) -> bool {
        let t = lattice.intersections(&self.cycle);
        let ends = lattice.ends();
        for (j, tj) in t.iter().enumerate() {
            let expected = match ends.binary_search(&j) {
                Ok(pos) => -rat(self.exponents[pos] as i64),
                Err(_) => Rational::zero(),
            };
            if *tj != expected {
                return false;
            }
        }
        let w = self.excess(lattice);
        w.is_integral()
            && w.is_effective()
            && w.support().iter().all(|&v| self.branch.contains(v))
    }
}

fn check_node_branch(lattice: &Lattice, node: usize, branch: &Branch) -> Result<()> {
    let g = lattice.graph();
    if node >= lattice.len() || !lattice.classes().is_node(node) {
        let id = if node < lattice.len() { g.id(node).to_string() } else { format!("#{node}") };
        return Err(Error::NotANode(id));
    }
    if branch.base != node || !g.branches_at(node).contains(branch) {
        return Err(Error::BranchMismatch(g.id(node).to_string()));
    }
    Ok(())
}

/// Ends of the graph inside the branch together with their branch-local
/// dual cycles, embedded in the full vertex set.
fn branch_duals(lattice: &Lattice, branch: &Branch) -> Vec<(usize, usize, QCycle)> {
    let c = &branch.vertices;
    let m = lattice.matrix().matrix().select(c, c);
    let inv = linalg::inverse(&m).expect("sub-forms of a negative definite form are definite");
    let n = lattice.len();
    lattice
        .ends()
        .iter()
        .enumerate()
        .filter(|(_, e)| branch.contains(**e))
        .map(|(pos, &e)| {
            let local = c.binary_search(&e).unwrap();
            let mut dual = QCycle::zero(n);
            for (r, &v) in c.iter().enumerate() {
                dual.0[v] = -&inv[(r, local)];
            }
            (pos, e, dual)
        })
        .collect()
}

/// Every monomial cycle belonging to `branch` of `node`, in canonical
/// order: smallest total degree first, then lexicographically largest
/// exponent vector (so powers of lower-indexed ends come first).
pub fn all_monomial_witnesses(
    lattice: &Lattice,
    node: usize,
    branch: &Branch,
    limit: usize,
) -> Result<Vec<MonomialCycle>> {
    check_node_branch(lattice, node, branch)?;
    let duals = branch_duals(lattice, branch);
    let k0 = branch.attach;
    let weights: Vec<Rational> = duals.iter().map(|(_, _, d)| d.coeff(k0).clone()).collect();
    debug_assert!(weights.iter().all(Signed::is_positive));

    let mut tuples = Vec::new();
    let mut current = vec![0u64; weights.len()];
    let mut visited = 0usize;
    enumerate_tuples(&weights, 0, Rational::one(), &mut current, &mut tuples, &mut visited, limit)?;

    let e_node = lattice.dual_cycle(node);
    let m = lattice.ends().len();
    let mut out = Vec::new();
    for tuple in tuples {
        let mut w = QCycle::zero(lattice.len());
        for ((_, _, dual), &a) in duals.iter().zip(&tuple) {
            if a > 0 {
                w = &w + &dual.scale(&rat(a as i64));
            }
        }
        if !w.is_integral() {
            continue;
        }
        let mut exponents = vec![0u64; m];
        for ((pos, _, _), &a) in duals.iter().zip(&tuple) {
            exponents[*pos] = a;
        }
        out.push(MonomialCycle { node, branch: branch.clone(), exponents, cycle: &e_node + &w });
    }
    out.sort_by_key(|mc| (mc.degree(), Reverse(mc.exponents.clone())));
    Ok(out)
}

fn enumerate_tuples(
    weights: &[Rational],
    at: usize,
    remaining: Rational,
    current: &mut Vec<u64>,
    out: &mut Vec<Vec<u64>>,
    visited: &mut usize,
    limit: usize,
) -> Result<()> {
    *visited += 1;
    if *visited > limit {
        return Err(Error::EnumerationLimit(limit));
    }
    if at + 1 == weights.len() {
        let a = &remaining / &weights[at];
        if a.is_integer() {
            current[at] = a.to_integer().to_u64().expect("exponent fits in u64");
            out.push(current.clone());
            current[at] = 0;
        }
        return Ok(());
    }
    let max = (&remaining / &weights[at]).floor().to_integer();
    let mut a = BigInt::zero();
    while a <= max {
        current[at] = a.to_u64().expect("exponent fits in u64");
        let rest = &remaining - &weights[at] * Rational::from_integer(a.clone());
        enumerate_tuples(weights, at + 1, rest, current, out, visited, limit)?;
        a += 1;
    }
    current[at] = 0;
    Ok(())
}

/// Canonical monomial cycle belonging to `branch` of `node`, or `None` when
/// no monomial cycle belongs to it.
pub fn find_monomial_cycle(lattice: &Lattice, node: usize, branch: &Branch) -> Result<Option<MonomialCycle>> {
    Ok(all_monomial_witnesses(lattice, node, branch, DEFAULT_ENUMERATION_LIMIT)?.into_iter().next())
}

#[derive(Clone, Debug)]
pub struct ConstructiveSequence {
    pub witness: MonomialCycle,
    /// `D_1, ..., D_n`.
    pub trace: Vec<QCycle>,
}

/// Default iteration cap: ten times the sum of `|det|` over all branches of
/// all non-end vertices.
pub fn default_iteration_cap(lattice: &Lattice) -> usize {
    let g = lattice.graph();
    let total: BigInt = (0..lattice.len())
        .filter(|&v| !lattice.classes().is_end(v))
        .flat_map(|v| g.branches_at(v))
        .map(|b| g.subset_det(&b.vertices))
        .sum();
    (total * 10u32).to_usize().unwrap_or(usize::MAX).max(10)
}

/// Builds a monomial cycle by the computation-sequence construction:
/// `D_1 = E*_node + Z_C`; while some non-end `A_j` has `D_k · A_j < 0`,
/// add the fundamental cycle of the lowest branch of `A_j` away from the
/// node. Fails when an intermediate cycle stops being anti-nef, which
/// happens exactly where `Z_C · A_j != 1` is hit.
pub fn constructive_monomial_sequence(
    lattice: &Lattice,
    node: usize,
    branch: &Branch,
    cap: Option<usize>,
) -> Result<ConstructiveSequence> {
    check_node_branch(lattice, node, branch)?;
    let g = lattice.graph();
    let cap = cap.unwrap_or_else(|| default_iteration_cap(lattice));
    let z = lattice.fundamental_cycle(&branch.vertices)?;
    let mut d = &lattice.dual_cycle(node) + &z.to_q();
    let mut trace = vec![d.clone()];
    let mut step = 1;
    loop {
        let t = lattice.intersections(&d);
        if let Some(bad) = t.iter().position(Signed::is_positive) {
            return Err(Error::ConditionCViolated {
                step,
                reason: format!("D_{step} · {} = {} > 0", g.id(bad), t[bad]),
            });
        }
        let next = (0..lattice.len()).find(|&j| !lattice.classes().is_end(j) && t[j].is_negative());
        let Some(j) = next else { break };
        if step >= cap {
            return Err(Error::ConditionCViolated { step, reason: format!("iteration cap {cap} reached") });
        }
        let away = g
            .branches_at(j)
            .into_iter()
            .find(|b| !b.contains(node))
            .expect("a vertex with negative product inside the branch has a branch away from the node");
        let zc = lattice.fundamental_cycle(&away.vertices)?;
        debug!("sequence step {step}: D·{} = {}, add Z of branch at {}", g.id(j), t[j], g.id(away.attach));
        d = &d + &zc.to_q();
        trace.push(d.clone());
        step += 1;
    }
    let t = lattice.intersections(&d);
    let exponents = lattice
        .ends()
        .iter()
        .map(|&e| (-&t[e]).to_integer().to_u64().expect("monomial exponents are nonnegative integers"))
        .collect();
    let witness = MonomialCycle { node, branch: branch.clone(), exponents, cycle: d };
    debug_assert!(witness.verify(lattice));
    Ok(ConstructiveSequence { witness, trace })
}

#[derive(Clone, Debug)]
pub struct ConditionAEntry {
    pub node: usize,
    pub branch: Branch,
    pub witness: Option<MonomialCycle>,
}

#[derive(Clone, Debug)]
pub struct ConditionAReport {
    pub pass: bool,
    /// No nodes: the condition holds vacuously.
    pub vacuous: bool,
    pub entries: Vec<ConditionAEntry>,
}

impl ConditionAReport {
    pub fn failures(&self) -> impl Iterator<Item = &ConditionAEntry> {
        self.entries.iter().filter(|e| e.witness.is_none())
    }
}

pub fn check_condition_a(lattice: &Lattice) -> Result<ConditionAReport> {
    let g = lattice.graph();
    let mut entries = Vec::new();
    for &node in lattice.nodes() {
        for branch in g.branches_at(node) {
            let witness = find_monomial_cycle(lattice, node, &branch)?;
            entries.push(ConditionAEntry { node, branch, witness });
        }
    }
    Ok(ConditionAReport {
        pass: entries.iter().all(|e| e.witness.is_some()),
        vacuous: lattice.nodes().is_empty(),
        entries,
    })
}

#[derive(Clone, Debug)]
pub struct ConditionCEntry {
    pub vertex: usize,
    pub branch: Branch,
    /// `Z_C · A_vertex`, the coefficient of `Z_C` at the attaching vertex.
    pub product: i64,
}

impl ConditionCEntry {
    pub fn ok(&self) -> bool {
        self.product == 1
    }
}

#[derive(Clone, Debug)]
pub struct ConditionCReport {
    pub pass: bool,
    /// Star-shaped graphs pass without computation.
    pub star_shaped: bool,
    pub entries: Vec<ConditionCEntry>,
}

impl ConditionCReport {
    pub fn failures(&self) -> impl Iterator<Item = &ConditionCEntry> {
        self.entries.iter().filter(|e| !e.ok())
    }
}

pub fn check_condition_c(lattice: &Lattice) -> ConditionCReport {
    if lattice.classes().is_star_shaped() {
        return ConditionCReport { pass: true, star_shaped: true, entries: Vec::new() };
    }
    let g = lattice.graph();
    let mut entries = Vec::new();
    for v in (0..lattice.len()).filter(|&v| !lattice.classes().is_end(v)) {
        for branch in g.branches_at(v) {
            let z = lattice.fundamental_cycle(&branch.vertices).expect("branches are connected");
            let product = z.coeff(branch.attach);
            entries.push(ConditionCEntry { vertex: v, branch, product });
        }
    }
    ConditionCReport { pass: entries.iter().all(ConditionCEntry::ok), star_shaped: false, entries }
}
