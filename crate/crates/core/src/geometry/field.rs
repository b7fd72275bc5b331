//! Tensor fields near the origin: dense arrays of polynomial jets with all
//! indices covariant, plus Levi-Civita covariant differentiation.

use crate::jet::{PolyJet, EXACT};
use crate::matjet::MatJet;
use crate::rational::Rational;
use crate::tensor::{MultiIndexIter, PointTensor};

use super::GeometryCtx;

#[derive(Clone, Debug)]
pub struct TensorField {
    dim: usize,
    rank: usize,
    comps: Vec<PolyJet>,
}

impl TensorField {
    pub fn zeros(dim: usize, rank: usize, degree: u32) -> Self {
        TensorField {
            dim,
            rank,
            comps: vec![PolyJet::zero(dim, degree); dim.pow(rank as u32)],
        }
    }

    pub fn scalar(jet: PolyJet) -> Self {
        TensorField {
            dim: jet.dim(),
            rank: 0,
            comps: vec![jet],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank);
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim);
            off = off * self.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &PolyJet {
        &self.comps[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: PolyJet) {
        let off = self.offset(idx);
        self.comps[off] = v;
    }

    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(self.dim, self.rank)
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn add(&self, other: &TensorField) -> TensorField {
        assert_eq!(self.rank, other.rank);
        TensorField {
            dim: self.dim,
            rank: self.rank,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &TensorField) -> TensorField {
        assert_eq!(self.rank, other.rank);
        TensorField {
            dim: self.dim,
            rank: self.rank,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> TensorField {
        TensorField {
            dim: self.dim,
            rank: self.rank,
            comps: self.comps.iter().map(|a| a.scale(c)).collect(),
        }
    }

    /// Levi-Civita covariant derivative; the new index is appended last, so
    /// `T_{;ij}` means the `j` derivative applied after the `i` derivative.
    pub fn cov_deriv(&self, ctx: &GeometryCtx) -> TensorField {
        let m = self.dim;
        let mut out = TensorField::zeros(m, self.rank + 1, EXACT);
        for idx in self.indices() {
            let t = self.get(&idx);
            for nu in 0..m {
                let mut v = t.dpartial(nu);
                for a in 0..self.rank {
                    for lam in 0..m {
                        let gamma = ctx.gamma(lam, nu, idx[a]);
                        if gamma.is_zero() {
                            continue;
                        }
                        let mut swapped = idx.clone();
                        swapped[a] = lam;
                        v = &v - &(gamma * self.get(&swapped));
                    }
                }
                let mut full = idx.clone();
                full.push(nu);
                out.set(&full, v);
            }
        }
        out
    }

    /// Origin value of the covariant derivative. In normal gauge the
    /// connection coefficients vanish at the origin, so only the plain
    /// partial derivative survives.
    pub fn cov_deriv_origin(&self) -> PointTensor {
        let m = self.dim;
        let mut out = PointTensor::zeros(m, self.rank + 1);
        for idx in self.indices() {
            let t = self.get(&idx);
            for nu in 0..m {
                let mut full = idx.clone();
                full.push(nu);
                out.set(&full, t.dpartial(nu).eval0());
            }
        }
        out
    }

    /// Contract two slots against the inverse metric field.
    pub fn contract_metric(&self, a: usize, b: usize, g_inv: &MatJet) -> TensorField {
        assert!(a < b && b < self.rank);
        let m = self.dim;
        let mut out = TensorField::zeros(m, self.rank - 2, EXACT);
        for idx in out.indices() {
            let mut acc = PolyJet::zero(m, EXACT);
            for k in 0..m {
                for l in 0..m {
                    let w = g_inv.get(k, l);
                    if w.is_zero() {
                        continue;
                    }
                    let mut full = Vec::with_capacity(self.rank);
                    let mut it = idx.iter();
                    for slot in 0..self.rank {
                        if slot == a {
                            full.push(k);
                        } else if slot == b {
                            full.push(l);
                        } else {
                            full.push(*it.next().unwrap());
                        }
                    }
                    let t = self.get(&full);
                    if t.is_zero() {
                        continue;
                    }
                    acc = &acc + &(w * t);
                }
            }
            out.set(&idx, acc);
        }
        out
    }

    pub fn eval0(&self) -> PointTensor {
        let mut out = PointTensor::zeros(self.dim, self.rank);
        for idx in self.indices() {
            out.set(&idx, self.get(&idx).eval0());
        }
        out
    }
}
