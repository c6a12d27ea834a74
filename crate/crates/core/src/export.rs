//! The verify-export bundle: everything an external computer-algebra check
//! needs about the equations at `t = 0`, in plain JSON with exact rationals
//! written as `"p/q"` strings.

use std::fmt;
use std::marker::PhantomData;
use std::str::FromStr;

use num_traits::ToPrimitive;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cycle::{Lattice, QCycle};
use crate::error::{Error, Result};
use crate::group::{check_g_homogeneous, discriminant_group, rotations, GroupStructure};
use crate::linalg::Rational;
use crate::nws::{build_nws, weight_vector, CoefficientScheme, NwsSystem};
use crate::poly::{Monomial, Order, Polynomial};

/// Exact rational serialized as `"p/q"` (or `"p"` for integers).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatStr(pub Rational);

impl Serialize for RatStr {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(&self.0)
    }
}

impl<'de> Deserialize<'de> for RatStr {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let q = Rational::from_str(text.trim()).map_err(|_| de::Error::custom(format!("`{text}` is not a rational")))?;
        Ok(RatStr(q))
    }
}

impl From<Rational> for RatStr {
    fn from(q: Rational) -> Self {
        RatStr(q)
    }
}

/// JSON object with a fixed key order; duplicate keys are rejected on input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedMap<V>(pub Vec<(String, V)>);

impl<V> OrderedMap<V> {
    pub fn get(&self, key: &str) -> Option<&V> {
        self.0.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }
}

impl<V: Serialize> Serialize for OrderedMap<V> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for OrderedMap<V> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V_<V>(PhantomData<V>);
        impl<'de, V: Deserialize<'de>> Visitor<'de> for V_<V> {
            type Value = OrderedMap<V>;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut a: A) -> std::result::Result<Self::Value, A::Error> {
                let mut out: Vec<(String, V)> = Vec::new();
                while let Some((k, v)) = a.next_entry::<String, V>()? {
                    if out.iter().any(|(x, _)| *x == k) {
                        return Err(de::Error::custom(format!("duplicate key `{k}`")));
                    }
                    out.push((k, v));
                }
                Ok(OrderedMap(out))
            }
        }
        d.deserialize_map(V_(PhantomData))
    }
}

/// A term `[coefficient, {end: exponent}]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExportTerm(pub RatStr, pub OrderedMap<u64>);

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportWeight {
    pub w: Vec<u64>,
    pub e: RatStr,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormClassCharacter {
    /// Coordinates of the form's class with respect to the group generators.
    pub class: Vec<u64>,
    /// Rotation number of the form under each generator.
    pub characters: Vec<RatStr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportNode {
    pub node: String,
    pub monomials: Vec<OrderedMap<u64>>,
    pub matrix: Vec<Vec<RatStr>>,
    pub forms: Vec<Vec<ExportTerm>>,
    pub weight: ExportWeight,
    pub form_class_character: Vec<FormClassCharacter>,
    /// Optional higher terms, one list per form; empty lists at `t = 0`.
    #[serde(default)]
    pub perturbations: Vec<Vec<ExportTerm>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportGenerator {
    pub cycle: OrderedMap<RatStr>,
    pub rotations: OrderedMap<RatStr>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportGroup {
    pub invariant_factors: Vec<u64>,
    pub generators: Vec<ExportGenerator>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExportBundle {
    pub variables: Vec<String>,
    pub nodes: Vec<ExportNode>,
    pub group: ExportGroup,
}

/// `{id: "p/q"}` over the vertices, in canonical order.
pub fn cycle_map(lattice: &Lattice, d: &QCycle) -> OrderedMap<RatStr> {
    OrderedMap(
        (0..lattice.len())
            .map(|i| (lattice.graph().id(i).to_string(), RatStr(d.coeff(i).clone())))
            .collect(),
    )
}

/// Nonzero exponents keyed by end id.
pub fn monomial_map(variables: &[String], m: &Monomial) -> OrderedMap<u64> {
    OrderedMap(
        variables
            .iter()
            .zip(&m.0)
            .filter(|(_, &a)| a > 0)
            .map(|(v, &a)| (v.clone(), a))
            .collect(),
    )
}

pub fn polynomial_terms(variables: &[String], f: &Polynomial) -> Vec<ExportTerm> {
    f.terms().map(|(m, c)| ExportTerm(RatStr(c.clone()), monomial_map(variables, m))).collect()
}

fn small(x: &num_bigint::BigInt) -> Result<u64> {
    x.to_u64().ok_or_else(|| Error::InvalidGraph(format!("group data {x} does not fit in 64 bits")))
}

pub fn export_group(lattice: &Lattice, group: &GroupStructure) -> Result<ExportGroup> {
    let ends = lattice.ends();
    let generators = group
        .generators
        .iter()
        .map(|g| ExportGenerator {
            cycle: cycle_map(lattice, g),
            rotations: OrderedMap(
                ends.iter()
                    .zip(rotations(lattice, g))
                    .map(|(&e, r)| (lattice.graph().id(e).to_string(), RatStr(r)))
                    .collect(),
            ),
        })
        .collect();
    Ok(ExportGroup {
        invariant_factors: group.invariant_factors.iter().map(small).collect::<Result<_>>()?,
        generators,
    })
}

/// Builds the bundle with node weights for `delta = (1, ..., 1)`.
pub fn build_export(lattice: &Lattice, scheme: CoefficientScheme) -> Result<ExportBundle> {
    let sys = build_nws(lattice, scheme)?;
    let group = discriminant_group(lattice)?;
    export_system(lattice, &sys, &group)
}

pub fn export_system(lattice: &Lattice, sys: &NwsSystem, group: &GroupStructure) -> Result<ExportBundle> {
    let g = lattice.graph();
    let variables: Vec<String> = sys.variables.iter().map(|&e| g.id(e).to_string()).collect();
    let grading = check_g_homogeneous(lattice, group, sys);
    let ones = vec![1; variables.len()];
    let mut nodes = Vec::new();
    for ns in &sys.nodes {
        let w = weight_vector(lattice, ns.node, &ones)?;
        let fcc = grading
            .forms
            .iter()
            .filter(|f| f.node == ns.node)
            .map(|f| {
                Ok(FormClassCharacter {
                    class: f.class.0.iter().map(small).collect::<Result<_>>()?,
                    characters: f.characters.iter().cloned().map(RatStr).collect(),
                })
            })
            .collect::<Result<_>>()?;
        nodes.push(ExportNode {
            node: g.id(ns.node).to_string(),
            monomials: ns.monomials().iter().map(|m| monomial_map(&variables, m)).collect(),
            matrix: ns.matrix.to_rows().into_iter().map(|r| r.into_iter().map(RatStr).collect()).collect(),
            forms: ns.forms.iter().map(|f| polynomial_terms(&variables, f)).collect(),
            weight: ExportWeight { w: w.w, e: RatStr(w.e) },
            form_class_character: fcc,
            perturbations: vec![Vec::new(); ns.forms.len()],
        });
    }
    Ok(ExportBundle { variables, nodes, group: export_group(lattice, group)? })
}

impl ExportBundle {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedInput(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("bundle serializes")
    }

    pub fn polynomial(&self, terms: &[ExportTerm]) -> Result<Polynomial> {
        let n = self.variables.len();
        let mut p = Polynomial::zero(n);
        for ExportTerm(c, exps) in terms {
            let mut m = Monomial::one(n);
            for (v, a) in &exps.0 {
                let k = self
                    .variables
                    .iter()
                    .position(|x| x == v)
                    .ok_or_else(|| Error::UnknownVertex(v.clone()))?;
                m.0[k] = *a;
            }
            p.add_term(c.0.clone(), m);
        }
        Ok(p)
    }

    /// All forms, in node order.
    pub fn forms(&self) -> Result<Vec<Polynomial>> {
        self.nodes.iter().flat_map(|n| &n.forms).map(|f| self.polynomial(f)).collect()
    }

    /// Supplied higher terms must have weighted order strictly above the
    /// weighted degree of the form they perturb.
    pub fn check_perturbations(&self) -> Result<()> {
        for node in &self.nodes {
            if node.perturbations.is_empty() {
                continue;
            }
            if node.perturbations.len() != node.forms.len() {
                return Err(Error::InvalidPerturbation(format!(
                    "node `{}`: {} perturbations for {} forms",
                    node.node,
                    node.perturbations.len(),
                    node.forms.len()
                )));
            }
            let w: Vec<Rational> = node.weight.w.iter().map(|&x| Rational::from_integer(x.into())).collect();
            for (i, (form, pert)) in node.forms.iter().zip(&node.perturbations).enumerate() {
                let f = self.polynomial(form)?;
                let p = self.polynomial(pert)?;
                let Order::Finite(deg) = f.order(&w) else { continue };
                if p.order(&w) <= Order::Finite(deg.clone()) {
                    return Err(Error::InvalidPerturbation(format!(
                        "node `{}` form {i}: higher term has order {} <= {deg}",
                        node.node,
                        p.order(&w)
                    )));
                }
            }
        }
        Ok(())
    }
}
