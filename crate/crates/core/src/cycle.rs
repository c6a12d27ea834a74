//! Exact cycle arithmetic on a validated resolution graph.
//!
//! A [`Lattice`] owns the graph together with its intersection matrix and
//! the exact inverse of that matrix, so that dual cycles and linear solves
//! are table lookups and matrix-vector products.

use std::collections::BTreeSet;
use std::fmt;
use std::ops::{Add, Sub};

use log::trace;
use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{IntersectionMatrix, ResolutionGraph, VertexClassification};
use crate::linalg::{self, rat, Matrix, Rational};

/// A rational cycle: one exact coefficient per vertex, canonical order.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QCycle(pub Vec<Rational>);

impl QCycle {
    pub fn zero(n: usize) -> Self {
        QCycle(vec![Rational::zero(); n])
    }

    /// The reduced cycle `A_i`.
    pub fn component(n: usize, i: usize) -> Self {
        let mut c = QCycle::zero(n);
        c.0[i] = Rational::one();
        c
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        QCycle(coeffs.iter().map(|&c| rat(c)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coefficient `m_{A_k}`.
    pub fn coeff(&self, k: usize) -> &Rational {
        &self.0[k]
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(Rational::is_integer)
    }

    pub fn is_effective(&self) -> bool {
        self.0.iter().all(|c| !c.is_negative())
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, k: &Rational) -> QCycle {
        QCycle(self.0.iter().map(|c| c * k).collect())
    }

    /// Coefficient-wise `self >= other`.
    pub fn dominates(&self, other: &QCycle) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a >= b)
    }

    /// Integral coefficients, `None` if some coefficient is fractional or
    /// out of range.
    pub fn to_cycle(&self) -> Option<Cycle> {
        self.0
            .iter()
            .map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None })
            .collect::<Option<Vec<_>>>()
            .map(Cycle)
    }

    /// Coefficients shifted into `[0, 1)`; same class modulo integral cycles.
    pub fn fractional_part(&self) -> QCycle {
        QCycle(self.0.iter().map(linalg::frac).collect())
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| !self.0[i].is_zero()).collect()
    }
}

impl fmt::Debug for QCycle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl Add for &QCycle {
    type Output = QCycle;
    fn add(self, rhs: &QCycle) -> QCycle {
        QCycle(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &QCycle {
    type Output = QCycle;
    fn sub(self, rhs: &QCycle) -> QCycle {
        QCycle(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

/// An integral cycle.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Cycle(pub Vec<i64>);

impl Cycle {
    pub fn to_q(&self) -> QCycle {
        QCycle::from_ints(&self.0)
    }

    pub fn coeff(&self, k: usize) -> i64 {
        self.0[k]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingularityClass {
    Rational,
    MinimallyEllipticCandidate,
    Other,
}

#[derive(Clone, Debug)]
pub struct Classification {
    pub class: SingularityClass,
    pub fundamental_cycle: Cycle,
    pub genus: Rational,
    pub explanation: String,
    /// Vertices with self-intersection -1: the graph may not be minimal.
    pub minus_one_vertices: Vec<usize>,
}

/// Guard on the number of vertex subsets swept by the minimally elliptic
/// test.
pub const SUBSET_SWEEP_LIMIT: u64 = 1 << 20;

/// A validated resolution graph with its exact intersection data.
#[derive(Clone, Debug)]
pub struct Lattice {
    graph: ResolutionGraph,
    matrix: IntersectionMatrix,
    inverse: Matrix<Rational>,
    det: BigInt,
    classes: VertexClassification,
}

impl Lattice {
    pub fn new(graph: ResolutionGraph) -> Result<Self> {
        let report = graph.validate();
        if !report.ok {
            let reasons: Vec<_> = report.failures.iter().map(|f| f.code()).collect();
            return Err(Error::InvalidGraph(reasons.join(", ")));
        }
        let matrix = graph.intersection_matrix();
        let inverse = linalg::inverse(matrix.matrix()).expect("negative definite matrix is invertible");
        let det = matrix.det();
        let classes = graph.classify_vertices();
        Ok(Lattice { graph, matrix, inverse, det, classes })
    }

    pub fn graph(&self) -> &ResolutionGraph {
        &self.graph
    }

    pub fn matrix(&self) -> &IntersectionMatrix {
        &self.matrix
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    /// Signed determinant of the intersection matrix.
    pub fn det(&self) -> &BigInt {
        &self.det
    }

    /// `|det(A_i · A_j)|`, the order of the discriminant group.
    pub fn det_abs(&self) -> BigInt {
        self.det.abs()
    }

    pub fn classes(&self) -> &VertexClassification {
        &self.classes
    }

    pub fn ends(&self) -> &[usize] {
        &self.classes.ends
    }

    pub fn nodes(&self) -> &[usize] {
        &self.classes.nodes
    }

    /// `D · A_i` for a single component.
    pub fn dot_component(&self, d: &QCycle, i: usize) -> Rational {
        let m = self.matrix.matrix();
        m.row(i)
            .iter()
            .zip(&d.0)
            .filter(|(a, _)| **a != 0)
            .map(|(a, x)| x * BigInt::from(*a))
            .sum()
    }

    /// The vector `(D · A_i)_i`.
    pub fn intersections(&self, d: &QCycle) -> Vec<Rational> {
        linalg::apply(self.matrix.matrix(), &d.0)
    }

    pub fn dot(&self, a: &QCycle, b: &QCycle) -> Rational {
        self.intersections(a).iter().zip(&b.0).map(|(x, y)| x * y).sum()
    }

    /// Integer intersection product of integral cycles.
    pub fn dot_int(&self, a: &Cycle, b: &Cycle) -> i64 {
        let m = self.matrix.matrix();
        let mut s = 0;
        for i in 0..self.len() {
            if a.0[i] == 0 {
                continue;
            }
            for j in 0..self.len() {
                s += a.0[i] * m[(i, j)] * b.0[j];
            }
        }
        s
    }

    /// The dual cycle `E*_i`, with `E*_i · A_j = -δ_ij`.
    pub fn dual_cycle(&self, i: usize) -> QCycle {
        QCycle(self.inverse.column(i).iter().map(|x| -x).collect())
    }

    /// The unique `x` with `x · A_j = t_j` for every `j`.
    pub fn cycle_from_intersections(&self, t: &[Rational]) -> QCycle {
        QCycle(linalg::apply_rational(&self.inverse, t))
    }

    pub fn is_antinef(&self, d: &QCycle) -> bool {
        self.intersections(d).iter().all(|x| !x.is_positive())
    }

    /// Smallest anti-nef `F >= D` with `F - D` integral: starting from `D`,
    /// add `A_i` at the lowest-index vertex with `F · A_i > 0` until none is
    /// left. Negative definiteness guarantees termination.
    pub fn min_antinef_lift(&self, d: &QCycle) -> QCycle {
        self.lift_on(d, None)
    }

    /// The minimum of all anti-nef `F` with `F - D` integral, not bounded
    /// below by `D`. Anti-nef cycles are effective, so the fractional part
    /// of `D` is a lower bound and the lift from there is the minimum.
    pub fn min_antinef_in_class(&self, d: &QCycle) -> QCycle {
        self.min_antinef_lift(&d.fractional_part())
    }

    fn lift_on(&self, d: &QCycle, support: Option<&BTreeSet<usize>>) -> QCycle {
        let mut f = d.clone();
        let mut t = self.intersections(&f);
        let m = self.matrix.matrix();
        let mut steps = 0usize;
        loop {
            let next = (0..self.len())
                .filter(|i| support.is_none_or(|s| s.contains(i)))
                .find(|&i| t[i].is_positive());
            let Some(i) = next else { break };
            trace!("laufer step {steps}: add A_{} ({})", i, self.graph.id(i));
            f.0[i] += Rational::one();
            for (j, tj) in t.iter_mut().enumerate() {
                if m[(j, i)] != 0 {
                    *tj += rat(m[(j, i)]);
                }
            }
            steps += 1;
        }
        f
    }

    /// Fundamental cycle on a connected vertex subset.
    pub fn fundamental_cycle(&self, support: &[usize]) -> Result<Cycle> {
        let set: BTreeSet<usize> = support.iter().copied().collect();
        if set.is_empty() {
            return Err(Error::EmptySupport);
        }
        if let Some(&bad) = set.iter().find(|&&v| v >= self.len()) {
            return Err(Error::UnknownVertex(format!("#{bad}")));
        }
        if !self.graph.is_connected_subset(&set) {
            return Err(Error::DisconnectedSupport);
        }
        let mut start = QCycle::zero(self.len());
        for &v in &set {
            start.0[v] = Rational::one();
        }
        let z = self.lift_on(&start, Some(&set));
        Ok(z.to_cycle().expect("lift of an integral cycle is integral"))
    }

    pub fn full_fundamental_cycle(&self) -> Cycle {
        let all: Vec<usize> = (0..self.len()).collect();
        self.fundamental_cycle(&all).expect("valid graphs are connected")
    }

    /// Canonical cycle: `K · A_i = -A_i² - 2` (adjunction, genus zero).
    pub fn canonical_cycle(&self) -> QCycle {
        let t: Vec<Rational> = (0..self.len()).map(|i| rat(-self.graph.selfint(i) - 2)).collect();
        self.cycle_from_intersections(&t)
    }

    /// `p_a(Z) = 1 + (Z² + Z·K) / 2`.
    pub fn arithmetic_genus(&self, z: &Cycle) -> Rational {
        let zq = z.to_q();
        let z2 = rat(self.dot_int(z, z));
        // Z·K = Σ z_i (K·A_i), and K·A_i is integral by construction
        let zk: i64 = (0..self.len()).map(|i| z.0[i] * (-self.graph.selfint(i) - 2)).sum();
        debug_assert_eq!(self.dot(&zq, &self.canonical_cycle()), rat(zk));
        rat(1) + (z2 + rat(zk)) / rat(2)
    }

    /// Rational / minimally elliptic candidate / other, by the numerical
    /// criteria on fundamental cycles. No blow-downs are performed.
    pub fn classify_singularity(&self) -> Classification {
        let z = self.full_fundamental_cycle();
        let genus = self.arithmetic_genus(&z);
        let minus_one_vertices: Vec<usize> =
            (0..self.len()).filter(|&i| self.graph.selfint(i) == -1).collect();
        let (class, explanation) = if genus.is_zero() {
            (SingularityClass::Rational, "p_a(Z) = 0 (Artin criterion)".to_string())
        } else if genus == rat(1) {
            match self.proper_subgraph_genera_vanish() {
                Some(None) => (
                    SingularityClass::MinimallyEllipticCandidate,
                    "p_a(Z) = 1 and every proper connected subgraph has p_a = 0 (Laufer criterion; \
                     assumes a minimal good resolution graph)"
                        .to_string(),
                ),
                Some(Some(sub)) => (
                    SingularityClass::Other,
                    format!(
                        "p_a(Z) = 1 but the connected subgraph {{{}}} has p_a != 0",
                        sub.iter().map(|&i| self.graph.id(i)).collect::<Vec<_>>().join(",")
                    ),
                ),
                None => (
                    SingularityClass::Other,
                    format!("p_a(Z) = 1; subgraph sweep skipped ({} vertices exceeds the guard)", self.len()),
                ),
            }
        } else {
            (SingularityClass::Other, format!("p_a(Z) = {genus}"))
        };
        Classification { class, fundamental_cycle: z, genus, explanation, minus_one_vertices }
    }

    /// `None` if the sweep is too large; `Some(None)` if every proper
    /// connected subgraph is rational; otherwise a witness subgraph.
    fn proper_subgraph_genera_vanish(&self) -> Option<Option<Vec<usize>>> {
        let n = self.len();
        if n >= 64 || (1u64 << n) > SUBSET_SWEEP_LIMIT {
            return None;
        }
        let full = (1u64 << n) - 1;
        for mask in 1..full {
            let set: BTreeSet<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            if !self.graph.is_connected_subset(&set) {
                continue;
            }
            let support: Vec<usize> = set.into_iter().collect();
            let z = self.fundamental_cycle(&support).expect("connected nonempty support");
            if !self.arithmetic_genus(&z).is_zero() {
                return Some(Some(support));
            }
        }
        Some(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ratio;

    fn lattice(w: &[i64], e: &[(usize, usize)]) -> Lattice {
        Lattice::new(ResolutionGraph::from_indices(w, e).unwrap()).unwrap()
    }

    fn d4() -> Lattice {
        lattice(&[-2, -2, -2, -2], &[(0, 1), (0, 2), (0, 3)])
    }

    fn fig1() -> Lattice {
        // e1 e2 n1 c n2 a1 a2 b1 b2
        lattice(
            &[-2, -2, -4, -2, -2, -2, -2, -2, -2],
            &[(0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7), (7, 8)],
        )
    }

    fn q(v: &[(i64, i64)]) -> QCycle {
        QCycle(v.iter().map(|&(n, d)| ratio(n, d)).collect())
    }

    #[test]
    fn dual_cycles() {
        for n in 1..6 {
            let l = lattice(&[-n], &[]);
            assert_eq!(l.dual_cycle(0), q(&[(1, n)]));
        }
        let a2 = lattice(&[-2, -2], &[(0, 1)]);
        assert_eq!(a2.dual_cycle(0), q(&[(2, 3), (1, 3)]));
        assert_eq!(d4().dual_cycle(1), q(&[(1, 1), (1, 1), (1, 2), (1, 2)]));
    }

    #[test]
    fn solve_intersections() {
        let l = d4();
        assert!(l.cycle_from_intersections(&vec![rat(0); 4]).is_zero());
        let x = l.cycle_from_intersections(&[rat(-1), rat(0), rat(0), rat(0)]);
        assert_eq!(x, QCycle::from_ints(&[2, 1, 1, 1]));
        let s = lattice(&[-5], &[]);
        assert_eq!(s.cycle_from_intersections(&[rat(-1)]), q(&[(1, 5)]));
    }

    #[test]
    fn antinef_tests() {
        let l = d4();
        for i in 0..4 {
            assert!(l.is_antinef(&l.dual_cycle(i)));
        }
        assert!(!l.is_antinef(&QCycle::component(4, 0)));
        assert!(fig1().is_antinef(&QCycle::from_ints(&[1, 1, 1, 2, 3, 2, 1, 2, 1])));
    }

    #[test]
    fn lifts() {
        let l = d4();
        let e = l.dual_cycle(2);
        assert_eq!(l.min_antinef_lift(&e), e);
        let a2 = lattice(&[-2, -2], &[(0, 1)]);
        assert_eq!(a2.min_antinef_lift(&QCycle::component(2, 0)), QCycle::from_ints(&[1, 1]));
        assert_eq!(l.min_antinef_lift(&QCycle::component(4, 0)), QCycle::from_ints(&[2, 1, 1, 1]));
        // the class minimum of an integral cycle is zero
        assert!(l.min_antinef_in_class(&QCycle::component(4, 0)).is_zero());
        assert_eq!(l.min_antinef_in_class(&(&l.dual_cycle(1) + &QCycle::component(4, 3))), l.dual_cycle(1));
    }

    #[test]
    fn fundamental_cycles() {
        let a2 = lattice(&[-2, -2], &[(0, 1)]);
        assert_eq!(a2.fundamental_cycle(&[0, 1]).unwrap(), Cycle(vec![1, 1]));
        assert_eq!(d4().full_fundamental_cycle(), Cycle(vec![2, 1, 1, 1]));
        let f = fig1();
        assert_eq!(f.fundamental_cycle(&[3, 4, 5, 6, 7, 8]).unwrap(), Cycle(vec![0, 0, 0, 2, 3, 2, 1, 2, 1]));
        assert_eq!(f.full_fundamental_cycle(), Cycle(vec![1, 1, 1, 2, 3, 2, 1, 2, 1]));
        assert_eq!(f.fundamental_cycle(&[]).unwrap_err(), Error::EmptySupport);
        assert_eq!(f.fundamental_cycle(&[0, 1]).unwrap_err(), Error::DisconnectedSupport);
    }

    #[test]
    fn canonical_and_genus() {
        assert!(d4().canonical_cycle().is_zero());
        assert_eq!(lattice(&[-3], &[]).canonical_cycle(), q(&[(-1, 3)]));
        let f = fig1();
        let k = f.canonical_cycle();
        let t = f.intersections(&k);
        assert_eq!(t, vec![rat(0), rat(0), rat(2), rat(0), rat(0), rat(0), rat(0), rat(0), rat(0)]);

        let single = lattice(&[-2], &[]);
        assert_eq!(single.arithmetic_genus(&Cycle(vec![1])), rat(0));
        assert_eq!(d4().arithmetic_genus(&Cycle(vec![2, 1, 1, 1])), rat(0));
        assert_eq!(f.arithmetic_genus(&f.full_fundamental_cycle()), rat(1));
    }

    #[test]
    fn classification() {
        assert_eq!(d4().classify_singularity().class, SingularityClass::Rational);
        assert_eq!(lattice(&[-2, -2], &[(0, 1)]).classify_singularity().class, SingularityClass::Rational);
        let c = fig1().classify_singularity();
        assert_eq!(c.genus, rat(1));
        // elliptic, but the subgraph without e1, e2 already has p_a = 1
        assert_eq!(c.class, SingularityClass::Other);
        assert!(c.explanation.contains("{v2,v3,v4,v5,v6,v7,v8}"));
        // that subgraph on its own: n1 c n2 a1 a2 b1 b2
        let sub = lattice(
            &[-4, -2, -2, -2, -2, -2, -2],
            &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5), (5, 6)],
        )
        .classify_singularity();
        assert_eq!(sub.genus, rat(1));
        assert_eq!(sub.class, SingularityClass::MinimallyEllipticCandidate);
        // a single -1 curve is smooth (rational) but flagged as non-minimal
        let m = lattice(&[-1], &[]).classify_singularity();
        assert_eq!(m.minus_one_vertices, vec![0]);
    }
}
