//! Sparse polynomials with exact rational coefficients in the end variables.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::linalg::{rat, Rational};

/// Exponent vector, indexed like the variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(pub Vec<u64>);

impl Monomial {
    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn var(nvars: usize, k: usize) -> Self {
        let mut m = Monomial::one(nvars);
        m.0[k] = 1;
        m
    }

    pub fn nvars(&self) -> usize {
        self.0.len()
    }

    pub fn total_degree(&self) -> u64 {
        self.0.iter().sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        assert_eq!(self.nvars(), other.nvars());
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `Σ a_k w_k`.
    pub fn weighted_degree(&self, weights: &[Rational]) -> Rational {
        assert_eq!(self.nvars(), weights.len());
        self.0
            .iter()
            .zip(weights)
            .filter(|(a, _)| **a != 0)
            .map(|(&a, w)| w * rat(a as i64))
            .sum()
    }

    /// Substitutes `x_k -> x_k^{delta_k}`.
    pub fn lift(&self, delta: &[u64]) -> Monomial {
        assert_eq!(self.nvars(), delta.len());
        Monomial(self.0.iter().zip(delta).map(|(a, d)| a * d).collect())
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayMonomial { m: self, names }
    }
}

struct DisplayMonomial<'a> {
    m: &'a Monomial,
    names: &'a [String],
}

impl fmt::Display for DisplayMonomial<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, &a) in self.m.0.iter().enumerate() {
            if a == 0 {
                continue;
            }
            if !first {
                f.write_str("*")?;
            }
            first = false;
            f.write_str(&self.names[k])?;
            if a > 1 {
                write!(f, "^{a}")?;
            }
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}

/// Order of a polynomial with respect to a weight; the zero polynomial has
/// infinite order.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Order {
    Finite(Rational),
    Infinite,
}

impl fmt::Display for Order {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Order::Finite(q) => write!(f, "{q}"),
            Order::Infinite => f.write_str("inf"),
        }
    }
}

/// Polynomial as a map from monomials to nonzero coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Rational, Monomial)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (c, m) in terms {
            p.add_term(c, m);
        }
        p
    }

    pub fn add_term(&mut self, c: Rational, m: Monomial) {
        assert_eq!(m.nvars(), self.nvars, "monomial has wrong number of variables");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, c| !c.is_zero());
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (m, c) in other.terms() {
            p.add_term(c.clone(), m.clone());
        }
        p
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        let mut p = self.clone();
        for (m, c) in other.terms() {
            p.add_term(-c, m.clone());
        }
        p
    }

    /// Minimal weighted degree of a term.
    pub fn order(&self, weights: &[Rational]) -> Order {
        self.terms
            .keys()
            .map(|m| m.weighted_degree(weights))
            .min()
            .map_or(Order::Infinite, Order::Finite)
    }

    /// Sum of the terms of minimal weighted degree.
    pub fn leading_form(&self, weights: &[Rational]) -> Result<Polynomial> {
        let Order::Finite(min) = self.order(weights) else {
            return Err(Error::ZeroPolynomial);
        };
        Ok(self.filter_by_degree(weights, |d| d.cmp(&min) == Ordering::Equal))
    }

    fn filter_by_degree(&self, weights: &[Rational], keep: impl Fn(&Rational) -> bool) -> Polynomial {
        let terms = self
            .terms
            .iter()
            .filter(|(m, _)| keep(&m.weighted_degree(weights)))
            .map(|(m, c)| (m.clone(), c.clone()))
            .collect();
        Polynomial { nvars: self.nvars, terms }
    }

    /// Weighted degrees of all terms, in term order.
    pub fn degrees(&self, weights: &[Rational]) -> Vec<Rational> {
        self.terms.keys().map(|m| m.weighted_degree(weights)).collect()
    }

    pub fn is_quasihomogeneous(&self, weights: &[Rational]) -> bool {
        let d = self.degrees(weights);
        d.windows(2).all(|w| w[0] == w[1])
    }

    /// Substitutes `x_k -> x_k^{delta_k}`; coefficients are unchanged.
    pub fn delta_lift(&self, delta: &[u64]) -> Polynomial {
        let terms = self.terms.iter().map(|(m, c)| (m.lift(delta), c.clone())).collect();
        Polynomial { nvars: self.nvars, terms }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> impl fmt::Display + 'a {
        DisplayPolynomial { p: self, names }
    }
}

struct DisplayPolynomial<'a> {
    p: &'a Polynomial,
    names: &'a [String],
}

impl fmt::Display for DisplayPolynomial<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.p.is_zero() {
            return f.write_str("0");
        }
        // highest total degree first reads more naturally
        let mut terms: Vec<_> = self.p.terms().collect();
        terms.sort_by(|a, b| b.0.total_degree().cmp(&a.0.total_degree()).then(b.0.cmp(a.0)));
        for (i, (m, c)) in terms.into_iter().enumerate() {
            let negative = c < &Rational::zero();
            let abs = if negative { -c } else { c.clone() };
            match (i, negative) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            let is_const = m.total_degree() == 0;
            if !abs.is_one() || is_const {
                write!(f, "{abs}")?;
                if !is_const {
                    f.write_str("*")?;
                }
            }
            if !is_const {
                write!(f, "{}", m.display(self.names))?;
            }
        }
        Ok(())
    }
}
