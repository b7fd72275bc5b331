//! The alternating-contraction engine.
//!
//! Orthogonal invariants here are built from two blocks of `m` frame indices
//! paired by the totally antisymmetric symbol, chained products of curvature
//! components over index windows, and ordinary paired contractions. Patterns
//! are data so each invariant is transcribed in exactly one reviewable place.
//!
//! Summation iterates over permutation pairs (`m! * m!` signed terms), never
//! over all `m^m` tuples: for m = 4 that is 576 pairs, for m = 6 about
//! 5.2e5. Chain factors are plain array lookups, so no further memoization
//! is needed at these sizes.

use num_traits::Zero;

use crate::error::{CoreError, Result};
use crate::rational::{one, Rational};
use crate::tensor::PointTensor;

/// All permutations of `{0..m-1}` with their signs.
pub fn signed_permutations(m: usize) -> Vec<(Vec<usize>, i32)> {
    fn rec(prefix: &mut Vec<usize>, used: &mut Vec<bool>, out: &mut Vec<(Vec<usize>, i32)>) {
        let m = used.len();
        if prefix.len() == m {
            let sign = permutation_sign(prefix);
            out.push((prefix.clone(), sign));
            return;
        }
        for v in 0..m {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; m], &mut out);
    out
}

fn permutation_sign(p: &[usize]) -> i32 {
    let mut inv = 0;
    for a in 0..p.len() {
        for b in a + 1..p.len() {
            if p[a] > p[b] {
                inv += 1;
            }
        }
    }
    if inv % 2 == 0 {
        1
    } else {
        -1
    }
}

/// The signed pairing of two index tuples: 0 if either has a repeat or they
/// are not rearrangements of each other, otherwise the sign of the
/// permutation carrying `i` to `j`. Indices must lie in `{0..dim-1}`.
pub fn eps_sign(i: &[usize], j: &[usize], dim: usize) -> Rational {
    assert_eq!(i.len(), j.len(), "eps_sign: tuple length mismatch");
    for &a in i.iter().chain(j) {
        assert!(a < dim, "eps_sign: index {a} out of range 0..{dim}");
    }
    let n = i.len();
    // repeats kill the pairing
    for a in 0..n {
        for b in a + 1..n {
            if i[a] == i[b] || j[a] == j[b] {
                return Rational::zero();
            }
        }
    }
    // j must be a rearrangement of i; find the carrying permutation
    let mut perm = vec![usize::MAX; n];
    for (a, &iv) in i.iter().enumerate() {
        match j.iter().position(|&jv| jv == iv) {
            Some(b) => perm[a] = b,
            None => return Rational::zero(),
        }
    }
    Rational::from_integer(permutation_sign(&perm).into())
}

/// Chained curvature product over the window `[s, t]` (1-based positions
/// into the tuples): `R_{i_s i_{s+1} j_{s+1} j_s} ... R_{i_{t-1} i_t j_t
/// j_{t-1}}`, equal to 1 for an empty window (`t < s`).
pub fn curly_r(i: &[usize], j: &[usize], s: usize, t: usize, r: &PointTensor) -> Result<Rational> {
    if t < s {
        return Ok(one());
    }
    if (t - s + 1) % 2 != 0 {
        return Err(CoreError::OddWindow { s, t });
    }
    assert!(s >= 1 && t <= i.len() && i.len() == j.len());
    let mut acc = one();
    let mut a = s;
    while a < t {
        // positions are 1-based; entries are 0-based frame indices
        acc *= r.get(&[i[a - 1], i[a], j[a], j[a - 1]]);
        if acc.is_zero() {
            return Ok(acc);
        }
        a += 2;
    }
    Ok(acc)
}

/// One index slot of a pattern factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Slot {
    /// Position `k` (0-based) in the first alternated tuple.
    Upper(usize),
    /// Position `k` (0-based) in the second alternated tuple.
    Lower(usize),
    /// A contraction label; each label appears exactly twice in a pattern.
    Paired(usize),
    /// The free one-form index of a form-valued invariant.
    Free,
}

/// Where the free one-form index of a pattern lives.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FreeIndex {
    /// Not form-valued: a scalar invariant.
    None,
    /// The free index is alternated tuple position `k` of the first block.
    Upper(usize),
    /// The free index is alternated tuple position `k` of the second block.
    Lower(usize),
    /// The free index appears only in tensor slots marked [`Slot::Free`].
    SlotOnly,
}

/// One tensor factor: which supplied tensor it reads and how its slots bind.
#[derive(Clone, Debug)]
pub struct Factor {
    pub tensor: usize,
    pub slots: Vec<Slot>,
}

/// A declarative alternating-contraction pattern.
#[derive(Clone, Debug)]
pub struct ContractionPattern {
    pub dim: usize,
    pub factors: Vec<Factor>,
    pub free: FreeIndex,
    /// Power of the dilaton prefactor (evaluated as `phi(0)^l` here; the
    /// field evaluator raises the full jet instead).
    pub phi_power: u32,
}

impl ContractionPattern {
    pub fn scalar(dim: usize, factors: Vec<Factor>) -> Self {
        ContractionPattern {
            dim,
            factors,
            free: FreeIndex::None,
            phi_power: 0,
        }
    }

    /// Number of paired labels used by the factors.
    pub fn num_paired(&self) -> usize {
        self.factors
            .iter()
            .flat_map(|f| &f.slots)
            .filter_map(|s| match s {
                Slot::Paired(id) => Some(*id + 1),
                _ => None,
            })
            .max()
            .unwrap_or(0)
    }

    /// Check slot counts against the supplied tensors and the pairing
    /// discipline. Malformed patterns are usage errors.
    pub fn validate(&self, tensors: &[&PointTensor]) {
        let mut paired_counts = vec![0usize; self.num_paired()];
        let mut free_in_slots = false;
        for f in &self.factors {
            let t = tensors
                .get(f.tensor)
                .unwrap_or_else(|| panic!("pattern references missing tensor {}", f.tensor));
            assert_eq!(
                t.rank(),
                f.slots.len(),
                "slot count does not match tensor rank"
            );
            assert_eq!(t.dim(), self.dim, "tensor dimension mismatch");
            for s in &f.slots {
                match s {
                    Slot::Upper(k) | Slot::Lower(k) => {
                        assert!(*k < self.dim, "alternated position out of range")
                    }
                    Slot::Paired(id) => paired_counts[*id] += 1,
                    Slot::Free => free_in_slots = true,
                }
            }
        }
        for (id, c) in paired_counts.iter().enumerate() {
            assert_eq!(*c, 2, "paired label {id} must appear exactly twice");
        }
        match self.free {
            FreeIndex::SlotOnly => assert!(
                free_in_slots,
                "pattern declares a slot-bound free index but no slot uses it"
            ),
            FreeIndex::None => {
                assert!(!free_in_slots, "scalar pattern must not contain free slots")
            }
            _ => {}
        }
    }
}

/// Factors realizing the chain `R_{i_s i_{s+1} j_{s+1} j_s} ...` over the
/// 1-based window `[s, t]` reading curvature from `tensors[tensor]`.
pub fn chain_factors(tensor: usize, s: usize, t: usize) -> Result<Vec<Factor>> {
    if t < s {
        return Ok(Vec::new());
    }
    if (t - s + 1) % 2 != 0 {
        return Err(CoreError::OddWindow { s, t });
    }
    let mut out = Vec::new();
    let mut a = s;
    while a < t {
        out.push(Factor {
            tensor,
            slots: vec![
                Slot::Upper(a - 1),
                Slot::Upper(a),
                Slot::Lower(a),
                Slot::Lower(a - 1),
            ],
        });
        a += 2;
    }
    Ok(out)
}

struct OriginEval<'a> {
    pattern: &'a ContractionPattern,
    tensors: &'a [&'a PointTensor],
    perms: Vec<(Vec<usize>, i32)>,
}

impl<'a> OriginEval<'a> {
    fn new(pattern: &'a ContractionPattern, tensors: &'a [&'a PointTensor]) -> Self {
        pattern.validate(tensors);
        OriginEval {
            pattern,
            tensors,
            perms: signed_permutations(pattern.dim),
        }
    }

    fn factor_value(
        &self,
        f: &Factor,
        upper: &[usize],
        lower: &[usize],
        paired: &[usize],
        free: usize,
    ) -> Rational {
        let idx: Vec<usize> = f
            .slots
            .iter()
            .map(|s| match s {
                Slot::Upper(k) => upper[*k],
                Slot::Lower(k) => lower[*k],
                Slot::Paired(id) => paired[*id],
                Slot::Free => free,
            })
            .collect();
        self.tensors[f.tensor].get(&idx).clone()
    }

    /// Sum over paired-label assignments for fixed alternated tuples.
    fn paired_sum(&self, upper: &[usize], lower: &[usize], free: usize) -> Rational {
        let np = self.pattern.num_paired();
        let m = self.pattern.dim;
        let mut paired = vec![0usize; np];
        let mut total = Rational::zero();
        loop {
            let mut prod = one();
            for f in &self.pattern.factors {
                prod *= self.factor_value(f, upper, lower, &paired, free);
                if prod.is_zero() {
                    break;
                }
            }
            total += prod;
            // advance the label assignment
            let mut k = 0;
            loop {
                if k == np {
                    return total;
                }
                paired[k] += 1;
                if paired[k] < m {
                    break;
                }
                paired[k] = 0;
                k += 1;
            }
        }
    }

    fn component(&self, free: usize) -> Rational {
        let m = self.pattern.dim;
        let mut total = Rational::zero();
        for (i_tuple, si) in &self.perms {
            if let FreeIndex::Upper(k) = self.pattern.free {
                if i_tuple[k] != free {
                    continue;
                }
            }
            for (j_tuple, sj) in &self.perms {
                if let FreeIndex::Lower(k) = self.pattern.free {
                    if j_tuple[k] != free {
                        continue;
                    }
                }
                let s = si * sj;
                let v = self.paired_sum(i_tuple, j_tuple, free);
                if v.is_zero() {
                    continue;
                }
                if s == 1 {
                    total += v;
                } else {
                    total -= v;
                }
            }
        }
        let _ = m;
        total
    }
}

/// Evaluate a scalar pattern at the origin: the signed sum over permutation
/// pairs and paired-index values of the factor product.
pub fn eps_contract(pattern: &ContractionPattern, tensors: &[&PointTensor]) -> Rational {
    assert!(
        matches!(pattern.free, FreeIndex::None),
        "eps_contract evaluates scalar patterns; use eps_contract_one_form"
    );
    OriginEval::new(pattern, tensors).component(usize::MAX)
}

/// Evaluate a form-valued pattern at the origin, one component per value of
/// the free index.
pub fn eps_contract_one_form(
    pattern: &ContractionPattern,
    tensors: &[&PointTensor],
) -> Vec<Rational> {
    assert!(
        !matches!(pattern.free, FreeIndex::None),
        "pattern has no free index"
    );
    let ev = OriginEval::new(pattern, tensors);
    (0..pattern.dim).map(|a| ev.component(a)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat, zero};

    /// Curvature of the unit round sphere at the origin:
    /// `R_{ijkl} = d_il d_jk - d_ik d_jl`, so `R_{1221} = +1`.
    fn sphere_r(m: usize) -> PointTensor {
        let mut r = PointTensor::zeros(m, 4);
        for idx in PointTensor::zeros(m, 4).indices() {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            let v = int(((i == l && j == k) as i64) - ((i == k && j == l) as i64));
            r.set(&idx, v);
        }
        r
    }

    #[test]
    fn eps_sign_examples() {
        assert_eq!(eps_sign(&[0, 1], &[0, 1], 2), int(1));
        assert_eq!(eps_sign(&[0, 1], &[1, 0], 2), int(-1));
        assert_eq!(eps_sign(&[0, 0], &[0, 1], 2), zero());
        assert_eq!(eps_sign(&[0, 1], &[0, 2], 3), zero());
    }

    #[test]
    fn eps_sign_symmetry_and_transpositions_exhaustive() {
        for m in 1..=4 {
            let perms = signed_permutations(m);
            for (i, _) in &perms {
                for (j, _) in &perms {
                    let a = eps_sign(i, j, m);
                    assert_eq!(a, eps_sign(j, i, m));
                    // transposing two entries of i flips the sign
                    if m >= 2 {
                        let mut i2 = i.clone();
                        i2.swap(0, 1);
                        assert_eq!(eps_sign(&i2, j, m), -a.clone());
                    }
                }
            }
        }
    }

    #[test]
    fn curly_r_windows() {
        let r = sphere_r(2);
        // empty window is 1 regardless of tuples
        assert_eq!(curly_r(&[0, 1], &[0, 1], 3, 2, &r).unwrap(), int(1));
        // unit sphere: window [1,2] on identity tuples reads R_{1221}
        assert_eq!(curly_r(&[0, 1], &[0, 1], 1, 2, &r).unwrap(), int(1));
        // flat space
        let flat = PointTensor::zeros(2, 4);
        assert_eq!(curly_r(&[0, 1], &[0, 1], 1, 2, &flat).unwrap(), zero());
        // odd window is malformed
        assert!(matches!(
            curly_r(&[0, 1], &[0, 1], 2, 2, &r),
            Err(CoreError::OddWindow { .. })
        ));
    }

    /// Independent brute-force oracle: enumerate permutation pairs directly
    /// and multiply curvature entries by hand.
    fn pfaffian_sum_oracle(r: &PointTensor) -> Rational {
        let m = r.dim();
        let perms = signed_permutations(m);
        let mut total = zero();
        for (i, si) in &perms {
            for (j, sj) in &perms {
                let mut prod = int((si * sj) as i64);
                let mut a = 0;
                while a + 1 < m {
                    prod *= r.get(&[i[a], i[a + 1], j[a + 1], j[a]]);
                    a += 2;
                }
                total += prod;
            }
        }
        total
    }

    #[test]
    fn full_chain_on_unit_sphere() {
        // Frozen from the enumeration oracle: 4 on the 2-sphere.
        let r = sphere_r(2);
        assert_eq!(pfaffian_sum_oracle(&r), int(4));
        let pattern = ContractionPattern::scalar(2, chain_factors(0, 1, 2).unwrap());
        assert_eq!(eps_contract(&pattern, &[&r]), int(4));

        // And in dimension 4 the oracle fixes the value 96.
        let r4 = sphere_r(4);
        assert_eq!(pfaffian_sum_oracle(&r4), int(96));
        let pattern4 = ContractionPattern::scalar(4, chain_factors(0, 1, 4).unwrap());
        assert_eq!(eps_contract(&pattern4, &[&r4]), int(96));
    }

    #[test]
    fn zero_tensors_give_zero() {
        let flat = PointTensor::zeros(2, 4);
        let pattern = ContractionPattern::scalar(2, chain_factors(0, 1, 2).unwrap());
        assert_eq!(eps_contract(&pattern, &[&flat]), zero());
    }

    #[test]
    fn hessian_times_empty_chain() {
        // phi_{;i1 j1} against an empty chain in dimension 2. Enumerating the
        // four permutation pairs by hand gives
        //   phi_{;11} + phi_{;22} - 2 phi_{;12},
        // which is 1 for the data below (frozen from that enumeration).
        let mut hess = PointTensor::zeros(2, 2);
        hess.set(&[0, 0], int(1));
        let mut factors = vec![Factor {
            tensor: 0,
            slots: vec![Slot::Upper(0), Slot::Lower(0)],
        }];
        factors.extend(chain_factors(1, 3, 2).unwrap());
        let pattern = ContractionPattern::scalar(2, factors);
        let r = PointTensor::zeros(2, 4);
        assert_eq!(eps_contract(&pattern, &[&hess, &r]), int(1));

        // cross term enters with weight -2
        let mut hess2 = PointTensor::zeros(2, 2);
        hess2.set(&[0, 1], rat(1, 3));
        hess2.set(&[1, 0], rat(1, 3));
        assert_eq!(eps_contract(&pattern, &[&hess2, &r]), rat(-2, 3));
    }

    #[test]
    fn multilinearity_in_each_tensor() {
        let r = sphere_r(4);
        let pattern = ContractionPattern::scalar(4, chain_factors(0, 1, 4).unwrap());
        let base = eps_contract(&pattern, &[&r]);
        // the chain uses the tensor twice, so scaling by c scales by c^2
        let scaled = r.scale(&rat(3, 5));
        assert_eq!(eps_contract(&pattern, &[&scaled]), base * rat(9, 25));

        // a pattern linear in a second tensor scales linearly
        let mut hess = PointTensor::zeros(4, 2);
        hess.set(&[0, 0], rat(2, 7));
        hess.set(&[2, 3], rat(-1, 2));
        let mut factors = vec![Factor {
            tensor: 0,
            slots: vec![Slot::Upper(0), Slot::Lower(0)],
        }];
        factors.extend(chain_factors(1, 3, 4).unwrap());
        let pattern2 = ContractionPattern::scalar(4, factors);
        let v = eps_contract(&pattern2, &[&hess, &r]);
        let v2 = eps_contract(&pattern2, &[&hess.scale(&rat(5, 3)), &r]);
        assert_eq!(v2, v * rat(5, 3));
    }

    #[test]
    fn factor_order_does_not_matter() {
        let r = sphere_r(4);
        let mut factors = chain_factors(0, 1, 4).unwrap();
        let forward = ContractionPattern::scalar(4, factors.clone());
        factors.reverse();
        let backward = ContractionPattern::scalar(4, factors);
        assert_eq!(
            eps_contract(&forward, &[&r]),
            eps_contract(&backward, &[&r])
        );
    }

    #[test]
    fn one_form_component_extraction() {
        // gradient against the eps pairing in m = 2:
        // sum eps phi_{;k} e^k with the free index bound in a tensor slot.
        let mut grad = PointTensor::zeros(2, 1);
        grad.set(&[0], int(3));
        grad.set(&[1], int(5));
        let mut factors = vec![Factor {
            tensor: 0,
            slots: vec![Slot::Free],
        }];
        factors.extend(chain_factors(1, 1, 2).unwrap());
        let pattern = ContractionPattern {
            dim: 2,
            factors,
            free: FreeIndex::SlotOnly,
            phi_power: 0,
        };
        let r = sphere_r(2);
        let comps = eps_contract_one_form(&pattern, &[&grad, &r]);
        // eps eps R sums to 4 independently of the free slot value
        assert_eq!(comps, vec![int(12), int(20)]);
    }
}
