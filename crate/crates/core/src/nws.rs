//! Complete systems of admissible monomials and the equations built from
//! them.
//!
//! At a node with `p` branches the admissible monomials `z_1, ..., z_p`
//! (one per branch) are combined into `p - 2` forms by a coefficient
//! matrix in the normal form `[I | a | b]` whose maximal minors are all
//! nonzero.

use log::{debug, warn};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditions::{find_monomial_cycle, MonomialCycle};
use crate::cycle::Lattice;
use crate::error::{Error, Result};
use crate::graph::Branch;
use crate::linalg::{determinant_rational, rat, Matrix, Rational};
use crate::poly::{Monomial, Polynomial};

/// Redraws allowed per matrix before giving up on the random scheme.
const MAX_REDRAWS: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CoefficientScheme {
    /// `a_j = 1`, `b_j = j` (1-based).
    UnitIndex,
    /// Small nonzero integers drawn from a seeded ChaCha stream.
    SeededRandom { seed: u64 },
}

impl CoefficientScheme {
    pub fn parse(name: &str, seed: Option<u64>) -> Result<Self> {
        match name {
            "unit-index" => Ok(CoefficientScheme::UnitIndex),
            "random" | "seeded-random" => Ok(CoefficientScheme::SeededRandom { seed: seed.unwrap_or(0) }),
            other => Err(Error::InvalidScheme(format!("unknown scheme `{other}`"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CoefficientScheme::UnitIndex => "unit-index",
            CoefficientScheme::SeededRandom { .. } => "seeded-random",
        }
    }
}

/// Checks that every maximal minor of `m` is nonzero.
pub fn maximal_minors_nonzero(m: &Matrix<Rational>) -> bool {
    let (r, c) = (m.n_rows(), m.n_cols());
    if r > c {
        return false;
    }
    let rows: Vec<usize> = (0..r).collect();
    let mut cols: Vec<usize> = (0..r).collect();
    loop {
        if determinant_rational(&m.select(&rows, &cols)).is_zero() {
            return false;
        }
        // next r-combination of 0..c
        let mut i = r;
        loop {
            if i == 0 {
                return true;
            }
            i -= 1;
            if cols[i] < c - r + i {
                break;
            }
        }
        cols[i] += 1;
        for j in i + 1..r {
            cols[j] = cols[j - 1] + 1;
        }
    }
}

fn normal_form(p: usize, a: &[i64], b: &[i64]) -> Matrix<Rational> {
    let mut m = Matrix::filled(p - 2, p, Rational::zero());
    for i in 0..p - 2 {
        m[(i, i)] = Rational::one();
        m[(i, p - 2)] = rat(a[i]);
        m[(i, p - 1)] = rat(b[i]);
    }
    m
}

fn pairwise_generic(a: &[i64], b: &[i64]) -> bool {
    a.iter().chain(b).all(|&x| x != 0)
        && (0..a.len()).all(|i| (i + 1..a.len()).all(|j| a[i] * b[j] != a[j] * b[i]))
}

/// Coefficient matrix for a node with `p` branches.
pub fn coefficient_matrix(p: usize, scheme: CoefficientScheme) -> Result<Matrix<Rational>> {
    let mut rng = match scheme {
        CoefficientScheme::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        CoefficientScheme::UnitIndex => None,
    };
    coefficient_matrix_with(p, scheme, rng.as_mut())
}

fn coefficient_matrix_with(
    p: usize,
    scheme: CoefficientScheme,
    rng: Option<&mut ChaCha8Rng>,
) -> Result<Matrix<Rational>> {
    if p < 3 {
        return Err(Error::InvalidScheme(format!("a node needs at least 3 branches, got {p}")));
    }
    let k = p - 2;
    let m = match (scheme, rng) {
        (CoefficientScheme::UnitIndex, _) => {
            let b: Vec<i64> = (1..=k as i64).collect();
            normal_form(p, &vec![1; k], &b)
        }
        (CoefficientScheme::SeededRandom { .. }, Some(rng)) => {
            let mut draw = || {
                let v: i64 = rng.gen_range(1..=9);
                if rng.gen_bool(0.5) {
                    -v
                } else {
                    v
                }
            };
            let mut found = None;
            for attempt in 0..MAX_REDRAWS {
                let a: Vec<i64> = (0..k).map(|_| draw()).collect();
                let b: Vec<i64> = (0..k).map(|_| draw()).collect();
                if pairwise_generic(&a, &b) {
                    found = Some(normal_form(p, &a, &b));
                    break;
                }
                debug!("coefficient draw {attempt} rejected");
            }
            found.ok_or_else(|| {
                Error::GenericityViolation(format!("no admissible draw after {MAX_REDRAWS} attempts"))
            })?
        }
        (CoefficientScheme::SeededRandom { .. }, None) => unreachable!("random scheme without a stream"),
    };
    if !maximal_minors_nonzero(&m) {
        return Err(Error::GenericityViolation("a maximal minor vanishes".into()));
    }
    Ok(m)
}

/// Monomial of a monomial cycle in the end variables.
pub fn monomial_of(mc: &MonomialCycle) -> Monomial {
    Monomial(mc.exponents.clone())
}

/// One admissible monomial per branch of `node`, in branch order.
pub fn complete_system(lattice: &Lattice, node: usize) -> Result<Vec<MonomialCycle>> {
    let g = lattice.graph();
    if !lattice.classes().is_node(node) {
        return Err(Error::NotANode(g.id(node).to_string()));
    }
    g.branches_at(node)
        .iter()
        .map(|b| {
            find_monomial_cycle(lattice, node, b)?.ok_or_else(|| Error::ConditionAFails {
                node: g.id(node).to_string(),
                attach: g.id(b.attach).to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Debug)]
pub struct NodeSystem {
    pub node: usize,
    pub branches: Vec<Branch>,
    pub admissible: Vec<MonomialCycle>,
    pub matrix: Matrix<Rational>,
    pub forms: Vec<Polynomial>,
}

impl NodeSystem {
    pub fn monomials(&self) -> Vec<Monomial> {
        self.admissible.iter().map(monomial_of).collect()
    }
}

#[derive(Clone, Debug)]
pub struct NwsSystem {
    /// End vertices; variable `x_{k+1}` belongs to `variables[k]`.
    pub variables: Vec<usize>,
    pub nodes: Vec<NodeSystem>,
    pub scheme: CoefficientScheme,
}

impl NwsSystem {
    pub fn forms(&self) -> impl Iterator<Item = &Polynomial> {
        self.nodes.iter().flat_map(|n| &n.forms)
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

fn forms_from(matrix: &Matrix<Rational>, monomials: &[Monomial], nvars: usize) -> Vec<Polynomial> {
    (0..matrix.n_rows())
        .map(|i| {
            Polynomial::from_terms(
                nvars,
                matrix.row(i).iter().cloned().zip(monomials.iter().cloned()),
            )
        })
        .collect()
}

/// Builds the system at every node. Fails with `condition_a_fails` at the
/// first node/branch without an admissible monomial.
pub fn build_nws(lattice: &Lattice, scheme: CoefficientScheme) -> Result<NwsSystem> {
    let g = lattice.graph();
    let nvars = lattice.ends().len();
    let mut rng = match scheme {
        CoefficientScheme::SeededRandom { seed } => Some(ChaCha8Rng::seed_from_u64(seed)),
        CoefficientScheme::UnitIndex => None,
    };
    let mut nodes = Vec::new();
    for &node in lattice.nodes() {
        let branches = g.branches_at(node);
        let admissible = complete_system(lattice, node)?;
        let matrix = coefficient_matrix_with(branches.len(), scheme, rng.as_mut())?;
        let monomials: Vec<Monomial> = admissible.iter().map(monomial_of).collect();
        let forms = forms_from(&matrix, &monomials, nvars);
        nodes.push(NodeSystem { node, branches, admissible, matrix, forms });
    }
    Ok(NwsSystem { variables: lattice.ends().to_vec(), nodes, scheme })
}

/// `A_node`-degrees of the variables: `m_node(E*_k)` for every end `k`.
pub fn node_degrees(lattice: &Lattice, node: usize) -> Vec<Rational> {
    let e = lattice.dual_cycle(node);
    lattice.ends().iter().map(|&k| e.coeff(k).clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightVector {
    pub node: usize,
    pub delta: Vec<u64>,
    pub w: Vec<u64>,
    pub e: Rational,
}

impl WeightVector {
    pub fn e_is_integral(&self) -> bool {
        self.e.is_integer()
    }

    pub fn as_rational(&self) -> Vec<Rational> {
        self.w.iter().map(|&x| rat(x as i64)).collect()
    }
}

/// Primitive positive integer vector proportional to
/// `(m_node(E*_k) / delta_k)_k`, with the multiplier `e` such that
/// `w_k = e · m_node(E*_k) / delta_k`.
pub fn weight_vector(lattice: &Lattice, node: usize, delta: &[u64]) -> Result<WeightVector> {
    let g = lattice.graph();
    if node >= lattice.len() || !lattice.classes().is_node(node) {
        let id = if node < lattice.len() { g.id(node).to_string() } else { format!("#{node}") };
        return Err(Error::NotANode(id));
    }
    let m = lattice.ends().len();
    if delta.len() != m {
        return Err(Error::InvalidDelta(format!("expected {m} entries, got {}", delta.len())));
    }
    if delta.contains(&0) {
        return Err(Error::InvalidDelta("entries must be positive".into()));
    }
    let q: Vec<Rational> = node_degrees(lattice, node)
        .into_iter()
        .zip(delta)
        .map(|(d, &dk)| d / rat(dk as i64))
        .collect();
    let lcm = q.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = q.iter().map(|x| (x * Rational::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let w: Vec<u64> = scaled
        .iter()
        .map(|x| u64::try_from(x / &gcd).expect("weights are positive and fit in u64"))
        .collect();
    let e = Rational::new(lcm, gcd);
    debug_assert!(w.iter().zip(&q).all(|(&wk, qk)| rat(wk as i64) == &e * qk));
    if !e.is_integer() {
        warn!("multiplier e = {e} at node {} is not an integer", g.id(node));
    }
    Ok(WeightVector { node, delta: delta.to_vec(), w, e })
}

pub fn parse_delta(text: &str) -> Result<Vec<u64>> {
    text.split(',')
        .map(|s| {
            let s = s.trim();
            s.parse::<u64>()
                .ok()
                .filter(|&d| d > 0)
                .ok_or_else(|| Error::InvalidDelta(format!("`{s}` is not a positive integer")))
        })
        .collect()
}

pub fn w_degree(m: &Monomial, w: &WeightVector) -> Rational {
    m.weighted_degree(&w.as_rational())
}

#[derive(Clone, Debug)]
pub struct FormDegreeCheck {
    pub node: usize,
    pub form: usize,
    pub expected: Rational,
    pub degrees: Vec<Rational>,
}

impl FormDegreeCheck {
    pub fn ok(&self) -> bool {
        self.degrees.iter().all(|d| *d == self.expected)
    }
}

#[derive(Clone, Debug)]
pub struct QuasihomogeneityReport {
    pub pass: bool,
    pub forms: Vec<FormDegreeCheck>,
}

/// Every monomial of every form at a node must have `A_node`-degree
/// `m_node(E*_node)`.
pub fn check_quasihomogeneous(lattice: &Lattice, sys: &NwsSystem) -> QuasihomogeneityReport {
    let mut forms = Vec::new();
    for ns in &sys.nodes {
        let weights = node_degrees(lattice, ns.node);
        let expected = lattice.dual_cycle(ns.node).coeff(ns.node).clone();
        for (i, f) in ns.forms.iter().enumerate() {
            forms.push(FormDegreeCheck { node: ns.node, form: i, expected: expected.clone(), degrees: f.degrees(&weights) });
        }
    }
    QuasihomogeneityReport { pass: forms.iter().all(FormDegreeCheck::ok), forms }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ResolutionGraph;
    use crate::linalg::ratio;
    use num_traits::Signed;

    fn lattice(w: &[i64], e: &[(usize, usize)]) -> Lattice {
        Lattice::new(ResolutionGraph::from_indices(w, e).unwrap()).unwrap()
    }

    fn d4() -> Lattice {
        lattice(&[-2, -2, -2, -2], &[(0, 1), (0, 2), (0, 3)])
    }

    fn int_matrix(m: &Matrix<Rational>) -> Vec<Vec<i64>> {
        m.to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| i64::try_from(x.to_integer()).unwrap()).collect())
            .collect()
    }

    #[test]
    fn unit_index_matrices() {
        let m = coefficient_matrix(3, CoefficientScheme::UnitIndex).unwrap();
        assert_eq!(int_matrix(&m), vec![vec![1, 1, 1]]);
        let m = coefficient_matrix(4, CoefficientScheme::UnitIndex).unwrap();
        assert_eq!(int_matrix(&m), vec![vec![1, 0, 1, 1], vec![0, 1, 1, 2]]);
        let m = coefficient_matrix(5, CoefficientScheme::UnitIndex).unwrap();
        assert_eq!(int_matrix(&m), vec![vec![1, 0, 0, 1, 1], vec![0, 1, 0, 1, 2], vec![0, 0, 1, 1, 3]]);
        assert!(maximal_minors_nonzero(&m));
        assert_eq!(coefficient_matrix(2, CoefficientScheme::UnitIndex).unwrap_err().code(), "invalid_scheme");
    }

    #[test]
    fn random_matrices_are_generic_and_reproducible() {
        for seed in 0..50 {
            let s = CoefficientScheme::SeededRandom { seed };
            let m = coefficient_matrix(6, s).unwrap();
            assert!(maximal_minors_nonzero(&m));
            assert_eq!(m, coefficient_matrix(6, s).unwrap());
        }
    }

    #[test]
    fn degenerate_matrix_detected() {
        let m = normal_form(4, &[1, 2], &[1, 2]);
        assert!(!maximal_minors_nonzero(&m));
    }

    #[test]
    fn scheme_names() {
        assert_eq!(CoefficientScheme::parse("unit-index", None).unwrap(), CoefficientScheme::UnitIndex);
        assert_eq!(
            CoefficientScheme::parse("random", Some(7)).unwrap(),
            CoefficientScheme::SeededRandom { seed: 7 }
        );
        assert_eq!(CoefficientScheme::parse("magic", None).unwrap_err().code(), "invalid_scheme");
    }

    #[test]
    fn d4_system() {
        let l = d4();
        let sys = build_nws(&l, CoefficientScheme::UnitIndex).unwrap();
        assert_eq!(sys.nodes.len(), 1);
        let f = &sys.nodes[0].forms[0];
        let expected = Polynomial::from_terms(
            3,
            [[2, 0, 0], [0, 2, 0], [0, 0, 2]].iter().map(|e| (rat(1), Monomial(e.to_vec()))),
        );
        assert_eq!(f, &expected);
        let report = check_quasihomogeneous(&l, &sys);
        assert!(report.pass);
        assert_eq!(report.forms[0].expected, rat(2));
    }

    #[test]
    fn star3_complete_system() {
        let l = lattice(&[-3, -2, -2, -2], &[(0, 1), (0, 2), (0, 3)]);
        let mons: Vec<_> = complete_system(&l, 0).unwrap().iter().map(monomial_of).collect();
        assert_eq!(mons, vec![Monomial(vec![2, 0, 0]), Monomial(vec![0, 2, 0]), Monomial(vec![0, 0, 2])]);
    }

    #[test]
    fn fig1_fails_condition_a() {
        let l = lattice(
            &[-2, -2, -4, -2, -2, -2, -2, -2, -2],
            &[(0, 2), (1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (4, 7), (7, 8)],
        );
        let err = build_nws(&l, CoefficientScheme::UnitIndex).unwrap_err();
        assert_eq!(err, Error::ConditionAFails { node: "v2".into(), attach: "v3".into() });
        assert_eq!(complete_system(&l, 2).unwrap_err().code(), "condition_a_fails");
    }

    #[test]
    fn chain_has_empty_system() {
        let l = lattice(&[-2, -2], &[(0, 1)]);
        let sys = build_nws(&l, CoefficientScheme::UnitIndex).unwrap();
        assert!(sys.is_empty());
        assert!(check_quasihomogeneous(&l, &sys).pass);
    }

    #[test]
    fn weights() {
        let l = d4();
        let w = weight_vector(&l, 0, &[1, 1, 1]).unwrap();
        assert_eq!((w.w.clone(), w.e.clone()), (vec![1, 1, 1], rat(1)));
        let star = lattice(&[-3, -2, -2, -2], &[(0, 1), (0, 2), (0, 3)]);
        let w = weight_vector(&star, 0, &[1, 1, 1]).unwrap();
        assert_eq!((w.w, w.e), (vec![1, 1, 1], rat(3)));
        // degrees 1/3 each, delta (1,1,2): proportional to (2,2,1), e = 6
        let w = weight_vector(&star, 0, &[1, 1, 2]).unwrap();
        assert_eq!((w.w, w.e), (vec![2, 2, 1], rat(6)));
        // d4 degrees 1, delta (2,3,3) -> (3,2,2), e = 6
        let w = weight_vector(&l, 0, &[2, 3, 3]).unwrap();
        assert_eq!((w.w, w.e), (vec![3, 2, 2], rat(6)));
        let a2 = lattice(&[-2, -2], &[(0, 1)]);
        assert_eq!(weight_vector(&a2, 0, &[1, 1]).unwrap_err().code(), "not_a_node");
        assert_eq!(weight_vector(&l, 0, &[1, 1]).unwrap_err().code(), "invalid_delta");
        assert_eq!(weight_vector(&l, 0, &[1, 0, 1]).unwrap_err().code(), "invalid_delta");
    }

    #[test]
    fn multiplier_relation() {
        let l = lattice(&[-1, -2, -3, -7], &[(0, 1), (0, 2), (0, 3)]);
        let degs = node_degrees(&l, 0);
        assert_eq!(degs, vec![rat(21), rat(14), rat(6)]);
        for delta in [[1, 1, 1], [2, 3, 1], [7, 7, 7], [3, 2, 6]] {
            let w = weight_vector(&l, 0, &delta).unwrap();
            for ((wk, d), dk) in w.w.iter().zip(&degs).zip(delta) {
                assert_eq!(rat(*wk as i64), &w.e * d / rat(dk as i64));
            }
            assert!(w.e.is_positive());
        }
        assert_eq!(weight_vector(&l, 0, &[7, 7, 7]).unwrap().e, ratio(1, 1) * rat(7));
    }

    #[test]
    fn delta_parsing() {
        assert_eq!(parse_delta("1, 2,3").unwrap(), vec![1, 2, 3]);
        assert_eq!(parse_delta("1,0").unwrap_err().code(), "invalid_delta");
        assert_eq!(parse_delta("a").unwrap_err().code(), "invalid_delta");
    }

    #[test]
    fn tampered_form_fails_quasihomogeneity() {
        let l = d4();
        let mut sys = build_nws(&l, CoefficientScheme::UnitIndex).unwrap();
        sys.nodes[0].forms[0] = Polynomial::from_terms(
            3,
            [(rat(1), Monomial(vec![2, 0, 0])), (rat(1), Monomial(vec![1, 0, 0]))],
        );
        let report = check_quasihomogeneous(&l, &sys);
        assert!(!report.pass);
    }
}
