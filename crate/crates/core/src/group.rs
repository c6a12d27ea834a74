//! The discriminant group `G = E*_Z / A_Z` and its action on the end
//! variables.
//!
//! A cycle `D` lies in `E*_Z` exactly when `t = M·D` is an integer vector,
//! and `D ↦ M·D` identifies `G` with `Z^n / M Z^n`. With a Smith normal form
//! `U·M·V = S` the class of `D` has coordinates `(U·t)_k mod d_k` over the
//! invariant factors `d_k > 1`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::cycle::{Lattice, QCycle};
use crate::error::{Error, Result};
use crate::linalg::{self, frac, to_big, Matrix, Rational};
use crate::nws::NwsSystem;
use crate::poly::Monomial;

/// Element enumeration for the faithfulness check is skipped above this
/// group order; the check then relies on the perfect pairing argument.
pub const ENUMERATION_GUARD: u64 = 1 << 16;

/// Coordinates modulo the invariant factors.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement(pub Vec<BigInt>);

impl GroupElement {
    pub fn is_identity(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }
}

#[derive(Clone, Debug)]
pub struct GroupStructure {
    /// `d_1 | d_2 | ...`, all greater than one.
    pub invariant_factors: Vec<BigInt>,
    /// Linear forms on `M·D` giving the coordinates of the class of `D`.
    coordinate_rows: Vec<Vec<BigInt>>,
    /// Representative of each generator: an end dual `E*_j` when an
    /// adapted basis of end classes exists, otherwise a cycle with
    /// coefficients in `[0, 1)`.
    pub generators: Vec<QCycle>,
    /// The end `j` whose dual represents each generator, if any.
    pub generator_ends: Vec<Option<usize>>,
    /// Classes of `E*_k` for the ends, in end order.
    pub end_classes: Vec<GroupElement>,
}

impl GroupStructure {
    pub fn order(&self) -> BigInt {
        self.invariant_factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.invariant_factors.is_empty()
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement(vec![BigInt::zero(); self.invariant_factors.len()])
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&b.0)
                .zip(&self.invariant_factors)
                .map(|((x, y), d)| (x + y).mod_floor(d))
                .collect(),
        )
    }

    pub fn scale(&self, a: &GroupElement, k: u64) -> GroupElement {
        GroupElement(
            a.0.iter()
                .zip(&self.invariant_factors)
                .map(|(x, d)| (x * BigInt::from(k)).mod_floor(d))
                .collect(),
        )
    }

    /// Class of the monomial `Π x_k^{a_k}`, i.e. of `Σ a_k E*_k`.
    pub fn monomial_class(&self, m: &Monomial) -> GroupElement {
        m.0.iter()
            .zip(&self.end_classes)
            .fold(self.identity(), |acc, (&a, c)| self.add(&acc, &self.scale(c, a)))
    }
}

fn to_lattice_vector(lattice: &Lattice, d: &QCycle) -> Result<Vec<BigInt>> {
    let t = linalg::apply(lattice.matrix().matrix(), &d.0);
    t.into_iter()
        .map(|x| if x.is_integer() { Ok(x.to_integer()) } else { Err(Error::NotInDualLattice) })
        .collect()
}

/// Coordinates of the class of `D` with respect to `group.generators`.
pub fn monomial_class(lattice: &Lattice, group: &GroupStructure, d: &QCycle) -> Result<GroupElement> {
    let t = to_lattice_vector(lattice, d)?;
    Ok(GroupElement(
        group
            .coordinate_rows
            .iter()
            .zip(&group.invariant_factors)
            .map(|(row, dk)| row.iter().zip(&t).map(|(a, b)| a * b).sum::<BigInt>().mod_floor(dk))
            .collect(),
    ))
}

/// Computes the invariant factors, generator representatives and the
/// classes of the end duals, and checks that the latter generate.
///
/// Generators are taken from the end duals when some ordered choice of
/// ends `E*_{j_1}, ..., E*_{j_r}` is a basis adapted to the invariant
/// factors (the lexicographically first such choice is used); otherwise
/// the generators pulled back from the Smith form are kept.
pub fn discriminant_group(lattice: &Lattice) -> Result<GroupStructure> {
    let m = to_big(lattice.matrix().matrix());
    let snf = linalg::smith_normal_form(&m);
    let n = lattice.len();
    let diag = snf.diagonal();
    let nontrivial: Vec<usize> = (0..n).filter(|&k| !diag[k].is_one()).collect();
    let invariant_factors: Vec<BigInt> = nontrivial.iter().map(|&k| diag[k].clone()).collect();
    debug_assert_eq!(invariant_factors.iter().product::<BigInt>(), lattice.det_abs());
    let coordinate_rows = nontrivial.iter().map(|&k| snf.u.row(k).to_vec()).collect();
    let generators = nontrivial
        .iter()
        .map(|&k| {
            let t: Vec<Rational> = snf.u_inv.column(k).into_iter().map(Rational::from_integer).collect();
            lattice.cycle_from_intersections(&t).fractional_part()
        })
        .collect();
    let mut group = GroupStructure {
        invariant_factors,
        coordinate_rows,
        generators,
        generator_ends: Vec::new(),
        end_classes: Vec::new(),
    };
    group.generator_ends = vec![None; group.invariant_factors.len()];
    group.end_classes = end_classes(lattice, &group)?;
    if !spans(&group.end_classes, &group.invariant_factors) {
        return Err(Error::EndsDoNotGenerate);
    }
    if let Some(choice) = end_basis(&group) {
        let p: Vec<GroupElement> = choice.iter().map(|&j| group.end_classes[j].clone()).collect();
        let q = inverse_change(&p, &group.invariant_factors);
        group.coordinate_rows = (0..q.len())
            .map(|i| {
                (0..n)
                    .map(|c| (0..q.len()).map(|k| &q[i][k] * &group.coordinate_rows[k][c]).sum())
                    .collect()
            })
            .collect();
        group.generators = choice.iter().map(|&j| lattice.dual_cycle(lattice.ends()[j])).collect();
        group.generator_ends = choice.iter().map(|&j| Some(lattice.ends()[j])).collect();
        group.end_classes = end_classes(lattice, &group)?;
    }
    Ok(group)
}

fn end_classes(lattice: &Lattice, group: &GroupStructure) -> Result<Vec<GroupElement>> {
    lattice
        .ends()
        .iter()
        .map(|&e| monomial_class(lattice, group, &lattice.dual_cycle(e)))
        .collect()
}

fn element_order(c: &GroupElement, factors: &[BigInt]) -> BigInt {
    c.0.iter().zip(factors).fold(BigInt::one(), |acc, (x, d)| acc.lcm(&(d / x.gcd(d))))
}

/// Candidate orderings visited before falling back to the Smith generators.
const BASIS_SEARCH_LIMIT: usize = 20_000;

/// Lexicographically first list of end positions whose classes form a basis
/// with `ord(g_k) = d_k`.
fn end_basis(group: &GroupStructure) -> Option<Vec<usize>> {
    let r = group.invariant_factors.len();
    if r == 0 {
        return None;
    }
    let mut chosen = Vec::with_capacity(r);
    let mut visited = 0;
    fn go(group: &GroupStructure, chosen: &mut Vec<usize>, visited: &mut usize) -> bool {
        let r = group.invariant_factors.len();
        if chosen.len() == r {
            let cols: Vec<GroupElement> = chosen.iter().map(|&j| group.end_classes[j].clone()).collect();
            return spans(&cols, &group.invariant_factors);
        }
        let k = chosen.len();
        for j in 0..group.end_classes.len() {
            *visited += 1;
            if *visited > BASIS_SEARCH_LIMIT {
                return false;
            }
            if chosen.contains(&j)
                || element_order(&group.end_classes[j], &group.invariant_factors) != group.invariant_factors[k]
            {
                continue;
            }
            chosen.push(j);
            if go(group, chosen, visited) {
                return true;
            }
            chosen.pop();
        }
        false
    }
    go(group, &mut chosen, &mut visited).then_some(chosen)
}

/// Whether `cols` together with the relations `d_k e_k` span `Z^r`, i.e.
/// all invariant factors of `[cols | diag(d)]` are one.
fn spans(cols: &[GroupElement], factors: &[BigInt]) -> bool {
    let r = factors.len();
    if r == 0 {
        return true;
    }
    linalg::smith_normal_form(&presentation(cols, factors)).diagonal().iter().all(One::is_one)
}

fn presentation(cols: &[GroupElement], factors: &[BigInt]) -> Matrix<BigInt> {
    let r = factors.len();
    let m = cols.len();
    let mut a = Matrix::filled(r, m + r, BigInt::zero());
    for (j, c) in cols.iter().enumerate() {
        for k in 0..r {
            a[(k, j)] = c.0[k].clone();
        }
    }
    for k in 0..r {
        a[(k, m + k)] = factors[k].clone();
    }
    a
}

/// For a basis `P` (columns, in current coordinates) returns `Q` with
/// `P·Q ≡ I` modulo the relations, so new coordinates are `Q·x`.
fn inverse_change(p: &[GroupElement], factors: &[BigInt]) -> Vec<Vec<BigInt>> {
    let r = factors.len();
    let snf = linalg::smith_normal_form(&presentation(p, factors));
    // [P | D]·V = U^{-1}·[I | 0], so P·(V_11·U) + D·(V_21·U) = I
    (0..r)
        .map(|i| (0..r).map(|j| (0..r).map(|k| &snf.v[(i, k)] * &snf.u[(k, j)]).sum()).collect())
        .collect()
}

/// `(D·F) mod 1` for `D`, `F` in `E*_Z`.
pub fn character_pairing(lattice: &Lattice, d: &QCycle, f: &QCycle) -> Result<Rational> {
    to_lattice_vector(lattice, d)?;
    to_lattice_vector(lattice, f)?;
    Ok(frac(&lattice.dot(d, f)))
}

/// Rotation numbers `(D·E*_k) mod 1` of `D` on the end variables.
pub fn rotations(lattice: &Lattice, d: &QCycle) -> Vec<Rational> {
    // D·E*_k = -m_k(D)
    lattice.ends().iter().map(|&k| frac(&-d.coeff(k))).collect()
}

#[derive(Clone, Debug)]
pub struct ActionRow {
    pub generator: QCycle,
    pub order: BigInt,
    pub rotations: Vec<Rational>,
}

#[derive(Clone, Debug)]
pub struct ActionTable {
    pub rows: Vec<ActionRow>,
    /// `None` when the group is too large to enumerate.
    pub faithful: Option<bool>,
}

pub fn action_table(lattice: &Lattice, group: &GroupStructure) -> ActionTable {
    let rows: Vec<ActionRow> = group
        .generators
        .iter()
        .zip(&group.invariant_factors)
        .map(|(g, d)| ActionRow { generator: g.clone(), order: d.clone(), rotations: rotations(lattice, g) })
        .collect();
    let faithful = group
        .order()
        .to_u64()
        .filter(|&o| o <= ENUMERATION_GUARD)
        .map(|_| is_faithful(&rows, lattice.ends().len()));
    ActionTable { rows, faithful }
}

/// Only the identity acts with all rotations zero.
fn is_faithful(rows: &[ActionRow], m: usize) -> bool {
    let orders: Vec<u64> = rows.iter().map(|r| r.order.to_u64().unwrap()).collect();
    let mut coords = vec![0u64; rows.len()];
    loop {
        // advance to the next element, skipping the identity
        let mut i = 0;
        while i < coords.len() {
            coords[i] += 1;
            if coords[i] < orders[i] {
                break;
            }
            coords[i] = 0;
            i += 1;
        }
        if i == coords.len() {
            return true;
        }
        let all_zero = (0..m).all(|k| {
            let r: Rational = rows
                .iter()
                .zip(&coords)
                .map(|(row, &c)| &row.rotations[k] * Rational::from_integer(BigInt::from(c)))
                .sum();
            frac(&r).is_zero()
        });
        if all_zero {
            return false;
        }
    }
}

/// Rotation of a monomial under a generator row: `Σ a_k r_k mod 1`.
pub fn monomial_rotation(row: &ActionRow, m: &Monomial) -> Rational {
    frac(
        &m.0.iter()
            .zip(&row.rotations)
            .map(|(&a, r)| r * Rational::from_integer(BigInt::from(a)))
            .sum(),
    )
}

#[derive(Clone, Debug)]
pub struct FormGrading {
    pub node: usize,
    pub form: usize,
    /// Class of the first monomial (all agree when `ok`).
    pub class: GroupElement,
    /// Character under each generator, as a rotation number.
    pub characters: Vec<Rational>,
    pub ok: bool,
}

#[derive(Clone, Debug)]
pub struct GradingReport {
    pub pass: bool,
    pub forms: Vec<FormGrading>,
}

/// Every form must be homogeneous for the `G`-grading: all its monomials
/// share one class (that of `E*_node`) and hence scale by one character.
pub fn check_g_homogeneous(lattice: &Lattice, group: &GroupStructure, sys: &NwsSystem) -> GradingReport {
    let table = action_table(lattice, group);
    let mut forms = Vec::new();
    for ns in &sys.nodes {
        let node_class = monomial_class(lattice, group, &lattice.dual_cycle(ns.node))
            .expect("dual cycles lie in the dual lattice");
        for (i, f) in ns.forms.iter().enumerate() {
            let monomials: Vec<&Monomial> = f.terms().map(|(m, _)| m).collect();
            let classes: Vec<GroupElement> = monomials.iter().map(|m| group.monomial_class(m)).collect();
            let chars: Vec<Vec<Rational>> = table
                .rows
                .iter()
                .map(|row| monomials.iter().map(|m| monomial_rotation(row, m)).collect())
                .collect();
            let ok = classes.iter().all(|c| *c == node_class)
                && chars.iter().all(|c| c.windows(2).all(|w| w[0] == w[1]));
            forms.push(FormGrading {
                node: ns.node,
                form: i,
                class: classes.first().cloned().unwrap_or_else(|| group.identity()),
                characters: chars.iter().map(|c| c.first().cloned().unwrap_or_else(Rational::zero)).collect(),
                ok,
            });
        }
    }
    GradingReport { pass: forms.iter().all(|f| f.ok), forms }
}
