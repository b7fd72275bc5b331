//! Differential forms with jet coefficients over the increasing-tuple basis,
//! the exterior derivative, the codifferential, and their dilaton twists.
//!
//! Sign conventions: the codifferential is the formal adjoint of `d`, which
//! in coordinates is minus the covariant divergence on the leading slot; on
//! flat space `delta(x_1 dx^1) = -1`. The twisted operators are
//! `d_phi = d + dphi ^` and `delta_phi = delta + i_{grad phi}`, with the
//! conjugated definitions `e^{-phi} d e^{phi}` and `e^{phi} delta e^{-phi}`
//! exercised against them in tests.

use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::geometry::GeometryCtx;
use crate::jet::{PolyJet, EXACT};
use crate::rational::rat;

/// Increasing `p`-tuples over `{0..m-1}` in lexicographic order.
pub fn form_basis(m: usize, p: usize) -> Vec<Vec<usize>> {
    fn rec(m: usize, p: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == p {
            out.push(cur.clone());
            return;
        }
        for i in start..m {
            cur.push(i);
            rec(m, p, i + 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if p <= m {
        rec(m, p, 0, &mut Vec::new(), &mut out);
    }
    out
}

/// Sort an index tuple, returning the permutation sign, or `None` when an
/// index repeats.
pub fn normalize_indices(idx: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    // insertion sort, counting swaps
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    Some((v, sign))
}

/// A `p`-form field: one jet per increasing tuple.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormField {
    m: usize,
    p: usize,
    comps: Vec<PolyJet>,
}

impl FormField {
    pub fn zero(m: usize, p: usize, degree: u32) -> Self {
        let n = form_basis(m, p).len();
        FormField {
            m,
            p,
            comps: vec![PolyJet::zero(m, degree); n],
        }
    }

    pub fn from_components(m: usize, p: usize, comps: Vec<PolyJet>) -> Self {
        assert_eq!(comps.len(), form_basis(m, p).len());
        FormField { m, p, comps }
    }

    /// The constant basis form `e_alpha`.
    pub fn basis_section(m: usize, p: usize, alpha: usize) -> Self {
        let mut f = Self::zero(m, p, EXACT);
        f.comps[alpha] = PolyJet::one(m);
        f
    }

    /// `x_k * e_alpha`, an exact monomial section.
    pub fn monomial_section(m: usize, p: usize, alpha: usize, expo: &[u32]) -> Self {
        let mut f = Self::zero(m, p, EXACT);
        let mut jet = PolyJet::one(m);
        for (i, &k) in expo.iter().enumerate() {
            for _ in 0..k {
                jet = &jet * &PolyJet::coordinate(m, i);
            }
        }
        f.comps[alpha] = jet;
        f
    }

    pub fn random(m: usize, p: usize, degree: u32, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let basis = form_basis(m, p);
        let monos = crate::geometry::exponents_up_to(m, degree);
        let comps = basis
            .iter()
            .map(|_| {
                let terms: Vec<_> = monos
                    .iter()
                    .filter_map(|e| {
                        let num: i64 = rng.random_range(-2..=2);
                        if num == 0 {
                            return None;
                        }
                        let den: i64 = rng.random_range(1..=2);
                        Some((e.clone(), rat(num, den)))
                    })
                    .collect();
                PolyJet::from_terms(m, degree, terms)
            })
            .collect();
        FormField { m, p, comps }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn components(&self) -> &[PolyJet] {
        &self.comps
    }

    pub fn component(&self, alpha: usize) -> &PolyJet {
        &self.comps[alpha]
    }

    pub fn set_component(&mut self, alpha: usize, v: PolyJet) {
        self.comps[alpha] = v;
    }

    /// Look up `omega_{idx}` for an arbitrary tuple, resolving antisymmetry.
    pub fn lookup(&self, basis: &[Vec<usize>], idx: &[usize]) -> Option<(usize, i32)> {
        let (sorted, sign) = normalize_indices(idx)?;
        let pos = basis.iter().position(|t| t == &sorted)?;
        Some((pos, sign))
    }

    pub fn add(&self, other: &FormField) -> FormField {
        assert_eq!((self.m, self.p), (other.m, other.p));
        FormField {
            m: self.m,
            p: self.p,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &FormField) -> FormField {
        assert_eq!((self.m, self.p), (other.m, other.p));
        FormField {
            m: self.m,
            p: self.p,
            comps: self
                .comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn scale_jet(&self, c: &PolyJet) -> FormField {
        FormField {
            m: self.m,
            p: self.p,
            comps: self.comps.iter().map(|a| a * c).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|c| c.is_zero())
    }

    pub fn truncated(&self, degree: u32) -> FormField {
        FormField {
            m: self.m,
            p: self.p,
            comps: self.comps.iter().map(|c| c.truncated(degree)).collect(),
        }
    }
}

/// Exterior derivative.
pub fn apply_d(field: &FormField) -> FormField {
    let m = field.m;
    let p = field.p;
    assert!(p < m, "d raises the form degree past the top");
    let out_basis = form_basis(m, p + 1);
    let in_basis = form_basis(m, p);
    let mut comps = Vec::with_capacity(out_basis.len());
    for tuple in &out_basis {
        let mut acc = PolyJet::zero(m, EXACT);
        for (a, &ka) in tuple.iter().enumerate() {
            let rest: Vec<usize> = tuple
                .iter()
                .enumerate()
                .filter(|(b, _)| *b != a)
                .map(|(_, &k)| k)
                .collect();
            if let Some((pos, sign)) = field.lookup(&in_basis, &rest) {
                let d = field.comps[pos].dpartial(ka);
                let signed = if (a % 2 == 0) == (sign > 0) { d } else { -&d };
                acc = &acc + &signed;
            }
        }
        comps.push(acc);
    }
    FormField { m, p: p + 1, comps }
}

/// Precontracted codifferential coefficients:
/// `v[l] = g^{ns} Gamma^l_{ns}` and `u[s][l][k] = g^{ns} Gamma^l_{nk}`.
pub struct DeltaCoeffs {
    v: Vec<PolyJet>,
    u: Vec<PolyJet>,
}

impl DeltaCoeffs {
    pub fn new(ctx: &GeometryCtx) -> Self {
        let m = ctx.dim();
        let g_inv = ctx.metric_inv();
        let mut v = vec![PolyJet::zero(m, EXACT); m];
        let mut u = vec![PolyJet::zero(m, EXACT); m * m * m];
        for l in 0..m {
            for n in 0..m {
                for s in 0..m {
                    let w = g_inv.get(n, s);
                    if w.is_zero() {
                        continue;
                    }
                    let gam = ctx.gamma(l, n, s);
                    if !gam.is_zero() {
                        v[l] = &v[l] + &(w * gam);
                    }
                    for k in 0..m {
                        let gk = ctx.gamma(l, n, k);
                        if !gk.is_zero() {
                            let slot = &mut u[(s * m + l) * m + k];
                            *slot = &*slot + &(w * gk);
                        }
                    }
                }
            }
        }
        DeltaCoeffs { v, u }
    }

    fn u(&self, s: usize, l: usize, k: usize, m: usize) -> &PolyJet {
        &self.u[(s * m + l) * m + k]
    }
}

/// Codifferential `delta = -(covariant divergence on the first slot)`.
pub fn apply_delta_with(coeffs: &DeltaCoeffs, ctx: &GeometryCtx, field: &FormField) -> FormField {
    let m = field.m;
    let p = field.p;
    assert!(p >= 1, "delta lowers the form degree below zero");
    let g_inv = ctx.metric_inv();
    let out_basis = form_basis(m, p - 1);
    let in_basis = form_basis(m, p);
    let mut comps = Vec::with_capacity(out_basis.len());
    let mut idx = vec![0usize; p];
    for tuple in &out_basis {
        let mut acc = PolyJet::zero(m, EXACT);
        // -g^{ns} d_n omega_{s K}
        for s in 0..m {
            idx[0] = s;
            idx[1..].copy_from_slice(tuple);
            if let Some((pos, sign)) = field.lookup(&in_basis, &idx) {
                let comp = &field.comps[pos];
                if comp.is_zero() {
                    continue;
                }
                for n in 0..m {
                    let w = g_inv.get(n, s);
                    if w.is_zero() {
                        continue;
                    }
                    let term = w * &comp.dpartial(n);
                    acc = if sign > 0 { &acc - &term } else { &acc + &term };
                }
            }
        }
        // + v^l omega_{l K}
        for l in 0..m {
            if coeffs.v[l].is_zero() {
                continue;
            }
            idx[0] = l;
            idx[1..].copy_from_slice(tuple);
            if let Some((pos, sign)) = field.lookup(&in_basis, &idx) {
                let comp = &field.comps[pos];
                if comp.is_zero() {
                    continue;
                }
                let term = &coeffs.v[l] * comp;
                acc = if sign > 0 { &acc + &term } else { &acc - &term };
            }
        }
        // + sum_a u^{s l}_{k_a} omega_{s, K with l in slot a}
        for (a, &ka) in tuple.iter().enumerate() {
            for s in 0..m {
                for l in 0..m {
                    let w = coeffs.u(s, l, ka, m);
                    if w.is_zero() {
                        continue;
                    }
                    idx[0] = s;
                    idx[1..].copy_from_slice(tuple);
                    idx[1 + a] = l;
                    if let Some((pos, sign)) = field.lookup(&in_basis, &idx) {
                        let comp = &field.comps[pos];
                        if comp.is_zero() {
                            continue;
                        }
                        let term = w * comp;
                        acc = if sign > 0 { &acc + &term } else { &acc - &term };
                    }
                }
            }
        }
        comps.push(acc);
    }
    FormField { m, p: p - 1, comps }
}

pub fn apply_delta(ctx: &GeometryCtx, field: &FormField) -> FormField {
    apply_delta_with(&DeltaCoeffs::new(ctx), ctx, field)
}

/// Wedge a one-form (given by its `m` coefficient jets) onto a `p`-form.
pub fn wedge_one_form(eta: &[PolyJet], field: &FormField) -> FormField {
    let m = field.m;
    let p = field.p;
    assert!(p < m);
    let out_basis = form_basis(m, p + 1);
    let in_basis = form_basis(m, p);
    let mut comps = Vec::with_capacity(out_basis.len());
    for tuple in &out_basis {
        let mut acc = PolyJet::zero(m, EXACT);
        for (a, &ka) in tuple.iter().enumerate() {
            if eta[ka].is_zero() {
                continue;
            }
            let rest: Vec<usize> = tuple
                .iter()
                .enumerate()
                .filter(|(b, _)| *b != a)
                .map(|(_, &k)| k)
                .collect();
            if let Some((pos, sign)) = field.lookup(&in_basis, &rest) {
                let comp = &field.comps[pos];
                if comp.is_zero() {
                    continue;
                }
                let term = &eta[ka] * comp;
                let positive = (a % 2 == 0) == (sign > 0);
                acc = if positive { &acc + &term } else { &acc - &term };
            }
        }
        comps.push(acc);
    }
    FormField { m, p: p + 1, comps }
}

/// Interior product with a vector field given by its `m` component jets.
pub fn interior_product(x: &[PolyJet], field: &FormField) -> FormField {
    let m = field.m;
    let p = field.p;
    assert!(p >= 1);
    let out_basis = form_basis(m, p - 1);
    let in_basis = form_basis(m, p);
    let mut comps = Vec::with_capacity(out_basis.len());
    let mut idx = vec![0usize; p];
    for tuple in &out_basis {
        let mut acc = PolyJet::zero(m, EXACT);
        for nu in 0..m {
            if x[nu].is_zero() {
                continue;
            }
            idx[0] = nu;
            idx[1..].copy_from_slice(tuple);
            if let Some((pos, sign)) = field.lookup(&in_basis, &idx) {
                let comp = &field.comps[pos];
                if comp.is_zero() {
                    continue;
                }
                let term = &x[nu] * comp;
                acc = if sign > 0 { &acc + &term } else { &acc - &term };
            }
        }
        comps.push(acc);
    }
    FormField { m, p: p - 1, comps }
}

/// Twisted exterior derivative `d_phi = d + dphi ^`.
pub fn apply_d_phi(ctx: &GeometryCtx, field: &FormField) -> FormField {
    let m = ctx.dim();
    let dphi: Vec<PolyJet> = (0..m).map(|i| ctx.dphi(i).clone()).collect();
    apply_d(field).add(&wedge_one_form(&dphi, field))
}

/// Twisted codifferential `delta_phi = delta + i_{grad phi}`.
pub fn apply_delta_phi_with(
    coeffs: &DeltaCoeffs,
    ctx: &GeometryCtx,
    field: &FormField,
) -> FormField {
    let m = ctx.dim();
    let grad: Vec<PolyJet> = (0..m).map(|i| ctx.grad_phi(i).clone()).collect();
    apply_delta_with(coeffs, ctx, field).add(&interior_product(&grad, field))
}

pub fn apply_delta_phi(ctx: &GeometryCtx, field: &FormField) -> FormField {
    apply_delta_phi_with(&DeltaCoeffs::new(ctx), ctx, field)
}

/// The conjugated definition `e^{-phi} d (e^{phi} omega)`, with the constant
/// part of the dilaton cancelled so the exponentials stay rational jets.
pub fn apply_d_phi_conjugated(ctx: &GeometryCtx, field: &FormField) -> FormField {
    let reduced = reduced_phi(ctx);
    let pos = reduced.exp_reduced();
    let neg = (-&reduced).exp_reduced();
    apply_d(&field.scale_jet(&pos)).scale_jet(&neg)
}

/// The conjugated definition `e^{phi} delta (e^{-phi} omega)`.
pub fn apply_delta_phi_conjugated(ctx: &GeometryCtx, field: &FormField) -> FormField {
    let reduced = reduced_phi(ctx);
    let pos = reduced.exp_reduced();
    let neg = (-&reduced).exp_reduced();
    apply_delta(ctx, &field.scale_jet(&neg)).scale_jet(&pos)
}

fn reduced_phi(ctx: &GeometryCtx) -> PolyJet {
    let c = ctx.phi().eval0();
    let phi = ctx.phi().truncated(ctx.degree());
    &phi - &PolyJet::constant(phi.dim(), c)
}

/// Pointwise inner product of two `p`-forms:
/// `<a, b> = sum_{K,L increasing} a_K b_L det(g^{k_a l_b})`.
pub fn form_inner_product(ctx: &GeometryCtx, a: &FormField, b: &FormField) -> PolyJet {
    assert_eq!((a.m, a.p), (b.m, b.p));
    let m = a.m;
    let basis = form_basis(m, a.p);
    let mut acc = PolyJet::zero(m, EXACT);
    for (ka, ca) in basis.iter().zip(&a.comps) {
        if ca.is_zero() {
            continue;
        }
        for (lb, cb) in basis.iter().zip(&b.comps) {
            if cb.is_zero() {
                continue;
            }
            let gram = gram_det(ctx, ka, lb);
            if gram.is_zero() {
                continue;
            }
            acc = &acc + &(&(ca * cb) * &gram);
        }
    }
    acc
}

fn gram_det(ctx: &GeometryCtx, k: &[usize], l: &[usize]) -> PolyJet {
    let p = k.len();
    let m = ctx.dim();
    if p == 0 {
        return PolyJet::one(m);
    }
    let perms = crate::contraction::signed_permutations(p);
    let mut acc = PolyJet::zero(m, EXACT);
    for (perm, sign) in perms {
        let mut prod = PolyJet::one(m);
        for (a, &pa) in perm.iter().enumerate() {
            prod = &prod * ctx.metric_inv().get(k[a], l[pa]);
            if prod.is_zero() {
                break;
            }
        }
        if prod.is_zero() {
            continue;
        }
        acc = if sign > 0 { &acc + &prod } else { &acc - &prod };
    }
    acc
}
