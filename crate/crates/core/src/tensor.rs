//! Dense rational tensors at the evaluation point, and small rational
//! matrices for endomorphism-valued data.

use num_traits::Zero;

use crate::rational::Rational;

/// A dense rank-`r` tensor over frame indices `{0..m-1}^r` with rational
/// entries. All indices are covariant; at the origin of a normal-gauge chart
/// the coordinate and orthonormal frames agree, so contractions are plain
/// index traces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointTensor {
    dim: usize,
    rank: usize,
    entries: Vec<Rational>,
}

impl PointTensor {
    pub fn zeros(dim: usize, rank: usize) -> Self {
        let len = dim.pow(rank as u32);
        PointTensor {
            dim,
            rank,
            entries: vec![Rational::zero(); len],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    fn offset(&self, idx: &[usize]) -> usize {
        debug_assert_eq!(idx.len(), self.rank, "tensor index rank mismatch");
        let mut off = 0;
        for &i in idx {
            debug_assert!(i < self.dim, "tensor index out of range");
            off = off * self.dim + i;
        }
        off
    }

    pub fn get(&self, idx: &[usize]) -> &Rational {
        &self.entries[self.offset(idx)]
    }

    pub fn set(&mut self, idx: &[usize], v: Rational) {
        let off = self.offset(idx);
        self.entries[off] = v;
    }

    pub fn add_assign_at(&mut self, idx: &[usize], v: &Rational) {
        let off = self.offset(idx);
        self.entries[off] += v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    pub fn scale(&self, c: &Rational) -> Self {
        PointTensor {
            dim: self.dim,
            rank: self.rank,
            entries: self.entries.iter().map(|e| e * c).collect(),
        }
    }

    /// Iterate all multi-indices of this tensor in lexicographic order.
    pub fn indices(&self) -> MultiIndexIter {
        MultiIndexIter::new(self.dim, self.rank)
    }
}

/// Lexicographic iterator over `{0..dim-1}^rank`.
pub struct MultiIndexIter {
    dim: usize,
    current: Option<Vec<usize>>,
}

impl MultiIndexIter {
    pub fn new(dim: usize, rank: usize) -> Self {
        let current = if dim == 0 && rank > 0 {
            None
        } else {
            Some(vec![0; rank])
        };
        MultiIndexIter { dim, current }
    }
}

impl Iterator for MultiIndexIter {
    type Item = Vec<usize>;
    fn next(&mut self) -> Option<Vec<usize>> {
        let cur = self.current.clone()?;
        let mut next = cur.clone();
        let mut carry = true;
        for slot in next.iter_mut().rev() {
            *slot += 1;
            if *slot == self.dim {
                *slot = 0;
            } else {
                carry = false;
                break;
            }
        }
        self.current = if carry { None } else { Some(next) };
        Some(cur)
    }
}

/// Square rational matrix (endomorphism over a form basis).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatQ {
    n: usize,
    data: Vec<Rational>,
}

impl MatQ {
    pub fn zeros(n: usize) -> Self {
        MatQ {
            n,
            data: vec![Rational::zero(); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Rational::from_integer(1.into());
        }
        m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &Rational {
        &self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Rational) {
        self.data[i * self.n + j] = v;
    }

    pub fn add_assign(&mut self, other: &MatQ) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b;
        }
    }

    pub fn sub(&self, other: &MatQ) -> MatQ {
        assert_eq!(self.n, other.n);
        MatQ {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale(&self, c: &Rational) -> MatQ {
        MatQ {
            n: self.n,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    pub fn add_scaled(&mut self, other: &MatQ, c: &Rational) {
        assert_eq!(self.n, other.n);
        if c.is_zero() {
            return;
        }
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * c;
        }
    }

    pub fn mul(&self, other: &MatQ) -> MatQ {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut out = MatQ::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    out.data[i * n + j] += a * b;
                }
            }
        }
        out
    }

    pub fn commutator(&self, other: &MatQ) -> MatQ {
        self.mul(other).sub(&other.mul(self))
    }

    pub fn trace(&self) -> Rational {
        let mut t = Rational::zero();
        for i in 0..self.n {
            t += self.get(i, i);
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|e| e.is_zero())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn tensor_round_trip() {
        let mut t = PointTensor::zeros(3, 2);
        t.set(&[1, 2], rat(5, 3));
        assert_eq!(t.get(&[1, 2]), &rat(5, 3));
        assert_eq!(t.get(&[2, 1]), &int(0));
        assert_eq!(t.indices().count(), 9);
    }

    #[test]
    fn matrix_algebra() {
        let mut a = MatQ::zeros(2);
        a.set(0, 1, int(1));
        let mut b = MatQ::zeros(2);
        b.set(1, 0, int(1));
        let ab = a.mul(&b);
        assert_eq!(ab.get(0, 0), &int(1));
        assert_eq!(ab.trace(), int(1));
        // [a, b] = diag(1, -1)
        let c = a.commutator(&b);
        assert_eq!(c.get(0, 0), &int(1));
        assert_eq!(c.get(1, 1), &int(-1));
        assert_eq!(c.trace(), int(0));
    }
}
