//! Square matrices with polynomial-jet entries: metric blocks, operator
//! coefficients, connection forms, endomorphisms.

use crate::jet::PolyJet;
use crate::rational::Rational;
use crate::tensor::MatQ;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatJet {
    n: usize,
    jet_dim: usize,
    data: Vec<PolyJet>,
}

impl MatJet {
    pub fn zeros(n: usize, jet_dim: usize, degree: u32) -> Self {
        MatJet {
            n,
            jet_dim,
            data: vec![PolyJet::zero(jet_dim, degree); n * n],
        }
    }

    pub fn identity(n: usize, jet_dim: usize) -> Self {
        let mut m = Self::zeros(n, jet_dim, crate::jet::EXACT);
        for i in 0..n {
            m.data[i * n + i] = PolyJet::one(jet_dim);
        }
        m
    }

    pub fn scalar(n: usize, jet: &PolyJet) -> Self {
        let mut m = Self::zeros(n, jet.dim(), jet.degree());
        for i in 0..n {
            m.data[i * n + i] = jet.clone();
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn jet_dim(&self) -> usize {
        self.jet_dim
    }

    pub fn get(&self, i: usize, j: usize) -> &PolyJet {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: PolyJet) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&self, other: &MatJet) -> MatJet {
        assert_eq!(self.n, other.n);
        MatJet {
            n: self.n,
            jet_dim: self.jet_dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &MatJet) -> MatJet {
        assert_eq!(self.n, other.n);
        MatJet {
            n: self.n,
            jet_dim: self.jet_dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> MatJet {
        MatJet {
            n: self.n,
            jet_dim: self.jet_dim,
            data: self.data.iter().map(|a| -a).collect(),
        }
    }

    pub fn mul(&self, other: &MatJet) -> MatJet {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = MatJet::zeros(n, self.jet_dim, crate::jet::EXACT);
        for i in 0..n {
            for j in 0..n {
                let mut acc: Option<PolyJet> = None;
                for k in 0..n {
                    let a = self.get(i, k);
                    let b = other.get(k, j);
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let p = a * b;
                    acc = Some(match acc {
                        Some(s) => &s + &p,
                        None => p,
                    });
                }
                if let Some(s) = acc {
                    out.set(i, j, s);
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &MatJet) -> MatJet {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn scale_jet(&self, c: &PolyJet) -> MatJet {
        MatJet {
            n: self.n,
            jet_dim: self.jet_dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> MatJet {
        MatJet {
            n: self.n,
            jet_dim: self.jet_dim,
            data: self.data.iter().map(|a| a.scale(c)).collect(),
        }
    }

    pub fn dpartial(&self, i: usize) -> MatJet {
        MatJet {
            n: self.n,
            jet_dim: self.jet_dim,
            data: self.data.iter().map(|a| a.dpartial(i)).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|a| a.is_zero())
    }

    pub fn truncated(&self, degree: u32) -> MatJet {
        MatJet {
            n: self.n,
            jet_dim: self.jet_dim,
            data: self.data.iter().map(|a| a.truncated(degree)).collect(),
        }
    }

    pub fn eval0(&self) -> MatQ {
        let mut m = MatQ::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                m.set(i, j, self.get(i, j).eval0());
            }
        }
        m
    }

    pub fn trace(&self) -> PolyJet {
        let mut acc = PolyJet::zero(self.jet_dim, crate::jet::EXACT);
        for i in 0..self.n {
            acc = &acc + self.get(i, i);
        }
        acc
    }

    /// Inverse of a matrix jet whose value at the origin is the identity,
    /// via the terminating geometric series.
    pub fn invert_unit(&self, degree: u32) -> MatJet {
        let id = MatJet::identity(self.n, self.jet_dim);
        let h = self.sub(&id);
        let mut acc = id.clone();
        let mut pw = id;
        let mut sign = false;
        for _ in 0..=degree {
            pw = pw.mul(&h);
            if pw.is_zero() {
                break;
            }
            sign = !sign;
            acc = if sign { acc.sub(&pw) } else { acc.add(&pw) };
        }
        acc
    }

    /// Determinant by signed permutation expansion (matrices here are at
    /// most 4x4).
    pub fn det(&self) -> PolyJet {
        let perms = crate::contraction::signed_permutations(self.n);
        let mut acc = PolyJet::zero(self.jet_dim, crate::jet::EXACT);
        for (p, s) in perms {
            let mut prod = PolyJet::one(self.jet_dim);
            for (i, &j) in p.iter().enumerate() {
                prod = &prod * self.get(i, j);
                if prod.is_zero() {
                    break;
                }
            }
            if s < 0 {
                prod = -&prod;
            }
            acc = &acc + &prod;
        }
        acc
    }
}
