//! Truncated multivariate polynomials with exact rational coefficients.
//!
//! A `PolyJet` stores a function germ at the origin modulo `O(|x|^{N+1})`
//! where `N` is the jet's accuracy degree. Exact polynomials (coordinate
//! monomials, constants) carry the sentinel accuracy [`EXACT`]. Products
//! track accuracy through minimum-degree shifts: multiplying an accuracy-`N`
//! jet by `x^k` yields accuracy `N + 1`, which the operator-coefficient
//! extraction in the de Rham layer depends on.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::rational::{one, Rational};

/// Accuracy degree of an exact polynomial (no truncation error).
pub const EXACT: u32 = u32::MAX;

/// Exponent vector, one entry per coordinate, stored in coordinate order so
/// the term map has a unique canonical representation.
pub type Expo = Vec<u32>;

fn total_degree(e: &[u32]) -> u32 {
    e.iter().sum()
}

#[derive(Clone, PartialEq, Eq)]
pub struct PolyJet {
    dim: usize,
    degree: u32,
    terms: BTreeMap<Expo, Rational>,
}

impl PolyJet {
    pub fn zero(dim: usize, degree: u32) -> Self {
        PolyJet {
            dim,
            degree,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, value: Rational) -> Self {
        let mut terms = BTreeMap::new();
        if !value.is_zero() {
            terms.insert(vec![0; dim], value);
        }
        PolyJet {
            dim,
            degree: EXACT,
            terms,
        }
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, one())
    }

    /// The coordinate monomial `x_i` (0-based), an exact polynomial.
    pub fn coordinate(dim: usize, i: usize) -> Self {
        assert!(i < dim, "coordinate index {i} out of range for dim {dim}");
        let mut e = vec![0; dim];
        e[i] = 1;
        let mut terms = BTreeMap::new();
        terms.insert(e, one());
        PolyJet {
            dim,
            degree: EXACT,
            terms,
        }
    }

    /// Build from explicit terms; entries above `degree` are rejected.
    pub fn from_terms<I>(dim: usize, degree: u32, entries: I) -> Self
    where
        I: IntoIterator<Item = (Expo, Rational)>,
    {
        let mut terms = BTreeMap::new();
        for (e, c) in entries {
            assert_eq!(e.len(), dim, "exponent tuple length mismatch");
            assert!(
                degree == EXACT || total_degree(&e) <= degree,
                "term exceeds truncation degree"
            );
            if c.is_zero() {
                continue;
            }
            let slot = terms.entry(e).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                // re-borrow to drop the zero entry lazily below
            }
        }
        terms.retain(|_, c: &mut Rational| !c.is_zero());
        PolyJet { dim, degree, terms }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Accuracy degree: the jet is trusted modulo `O(|x|^{degree+1})`.
    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Expo, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Lowest total degree among stored terms; `EXACT` (infinity) for zero.
    pub fn min_degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|e| total_degree(e))
            .min()
            .unwrap_or(EXACT)
    }

    /// Coefficient of the given exponent tuple.
    pub fn coeff(&self, e: &[u32]) -> Rational {
        self.terms.get(e).cloned().unwrap_or_else(Rational::zero)
    }

    /// Value at the origin.
    pub fn eval0(&self) -> Rational {
        self.coeff(&vec![0; self.dim])
    }

    /// Restrict the accuracy degree (drops now-meaningless high terms).
    pub fn truncated(&self, degree: u32) -> Self {
        let mut out = self.clone();
        out.degree = out.degree.min(degree);
        if out.degree != EXACT {
            out.terms.retain(|e, _| total_degree(e) <= out.degree);
        }
        out
    }

    fn prune(&mut self) {
        if self.degree != EXACT {
            let d = self.degree;
            self.terms.retain(|e, _| total_degree(e) <= d);
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return PolyJet::zero(self.dim, self.degree);
        }
        let terms = self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect();
        PolyJet {
            dim: self.dim,
            degree: self.degree,
            terms,
        }
    }

    /// Partial derivative with respect to `x_i`. Costs one accuracy degree.
    pub fn dpartial(&self, i: usize) -> Self {
        assert!(i < self.dim);
        assert!(
            self.degree == EXACT || self.degree >= 1,
            "derivative of a degree-0 jet carries no information"
        );
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut f = e.clone();
            f[i] -= 1;
            terms.insert(f, c * Rational::from_integer(e[i].into()));
        }
        PolyJet {
            dim: self.dim,
            degree: if self.degree == EXACT {
                EXACT
            } else {
                self.degree - 1
            },
            terms,
        }
    }

    /// Substitute `x -> c x`, scaling each degree-`d` coefficient by `c^d`.
    /// This realizes the weight-rescaling test `g(x) -> g(cx)`.
    pub fn scale_coordinates(&self, c: &Rational) -> Self {
        let mut pow = Vec::new();
        let terms = self
            .terms
            .iter()
            .map(|(e, v)| {
                let d = total_degree(e) as usize;
                while pow.len() <= d {
                    let prev = pow.last().cloned().unwrap_or_else(one);
                    pow.push(if pow.is_empty() { one() } else { prev * c });
                }
                (e.clone(), v * &pow[d])
            })
            .collect();
        PolyJet {
            dim: self.dim,
            degree: self.degree,
            terms,
        }
    }

    /// Integer power, truncated at this jet's accuracy.
    pub fn pow(&self, k: u32) -> Self {
        let mut acc = PolyJet::one(self.dim).truncated(self.degree);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// `exp(f)` for a jet with zero constant term, as a finite series.
    pub fn exp_reduced(&self) -> Self {
        assert!(
            self.eval0().is_zero(),
            "exp_reduced requires zero constant term"
        );
        assert!(
            self.degree != EXACT,
            "exp of an exact polynomial is not polynomial"
        );
        let mut acc = PolyJet::one(self.dim).truncated(self.degree);
        let mut term = acc.clone();
        for k in 1..=self.degree {
            term = &term * self;
            term = term.scale(&Rational::new(1.into(), (k as i64).into()));
            if term.is_zero() {
                break;
            }
            acc = &acc + &term;
        }
        acc
    }

    /// Multiplicative inverse of a jet with constant term 1, via the
    /// geometric series (the tail is nilpotent modulo truncation).
    pub fn invert_unit(&self) -> Self {
        assert_eq!(self.eval0(), one(), "invert_unit requires constant term 1");
        assert!(self.degree != EXACT, "inverse needs a finite truncation");
        let h = self - &PolyJet::one(self.dim).truncated(self.degree);
        let mut acc = PolyJet::one(self.dim).truncated(self.degree);
        let mut pw = PolyJet::one(self.dim).truncated(self.degree);
        let mut sign = false;
        for _ in 0..=self.degree {
            pw = &pw * &h;
            if pw.is_zero() {
                break;
            }
            sign = !sign;
            acc = if sign { &acc - &pw } else { &acc + &pw };
        }
        acc
    }
}

impl Add for &PolyJet {
    type Output = PolyJet;
    fn add(self, rhs: &PolyJet) -> PolyJet {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        let mut out = PolyJet {
            dim: self.dim,
            degree: self.degree.min(rhs.degree),
            terms: self.terms.clone(),
        };
        for (e, c) in &rhs.terms {
            let slot = out.terms.entry(e.clone()).or_insert_with(Rational::zero);
            *slot += c;
            if slot.is_zero() {
                out.terms.remove(e);
            }
        }
        out.prune();
        out
    }
}

impl Sub for &PolyJet {
    type Output = PolyJet;
    fn sub(self, rhs: &PolyJet) -> PolyJet {
        self + &(-rhs)
    }
}

impl Neg for &PolyJet {
    type Output = PolyJet;
    fn neg(self) -> PolyJet {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.clone(), -c.clone()))
            .collect();
        PolyJet {
            dim: self.dim,
            degree: self.degree,
            terms,
        }
    }
}

impl Mul for &PolyJet {
    type Output = PolyJet;
    fn mul(self, rhs: &PolyJet) -> PolyJet {
        assert_eq!(self.dim, rhs.dim, "jet dimension mismatch");
        // Error analysis for f = F + O(x^{N1+1}), g = G + O(x^{N2+1}) with
        // stored minimum degrees d1, d2:
        //   fg = FG + F O(x^{N2+1}) + G O(x^{N1+1}) + O(x^{N1+N2+2}),
        // so the product is trusted to degree
        //   min(d1 + N2, d2 + N1, N1 + N2 + 1).
        let d1 = self.min_degree();
        let d2 = rhs.min_degree();
        let degree = d1
            .saturating_add(rhs.degree)
            .min(d2.saturating_add(self.degree))
            .min(self.degree.saturating_add(rhs.degree).saturating_add(1));
        let mut terms: BTreeMap<Expo, Rational> = BTreeMap::new();
        for (e1, c1) in &self.terms {
            let deg1 = total_degree(e1);
            if degree != EXACT && deg1 > degree {
                continue;
            }
            for (e2, c2) in &rhs.terms {
                if degree != EXACT && deg1 + total_degree(e2) > degree {
                    continue;
                }
                let e: Expo = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                let slot = terms.entry(e).or_insert_with(Rational::zero);
                *slot += c1 * c2;
            }
        }
        terms.retain(|_, c| !c.is_zero());
        PolyJet {
            dim: self.dim,
            degree,
            terms,
        }
    }
}

impl fmt::Debug for PolyJet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            write!(f, "0")?;
        } else {
            let mut first = true;
            for (e, c) in &self.terms {
                if !first {
                    write!(f, " + ")?;
                }
                first = false;
                write!(f, "({c})")?;
                for (i, &k) in e.iter().enumerate() {
                    if k == 1 {
                        write!(f, "*x{i}")?;
                    } else if k > 1 {
                        write!(f, "*x{i}^{k}")?;
                    }
                }
            }
        }
        if self.degree == EXACT {
            write!(f, " [exact]")
        } else {
            write!(f, " [deg {}]", self.degree)
        }
    }
}
