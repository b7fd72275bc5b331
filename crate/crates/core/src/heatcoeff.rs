//! Local heat-trace coefficients of orders 0, 2, 4, 6 for Laplace-type
//! operators, evaluated from curvature and bundle data at the origin, and
//! the alternating supertrace over form degrees.
//!
//! The order-six formula lives in exactly one place: the term table below.
//! Each term is a rational coefficient with a list of factors carrying
//! shared index labels; scalar factors multiply, endomorphism factors
//! compose in the written order, and the trace is taken at the end. Terms
//! with no endomorphism factor are the identity-proportional ones and trace
//! to the fibre dimension. The two contracted-derivative factors
//! (`E_{;iijj}`, `Omega_{ij;kk}`) are supplied pre-traced by the bundle
//! layer.
//!
//! Values are normalized: the reported rational is `(4 pi)^{m/2}` times the
//! local coefficient, which makes every quantity in the system exact.

use num_traits::Zero;
use rayon::prelude::*;

use crate::derham::{
    build_twisted_laplacian, bundle_curvature_and_derivs, canonical_decomposition, BundleDerivs,
};
use crate::error::{CoreError, Result};
use crate::geometry::{curvature_from_ctx, CurvaturePackage, GeometryCtx, MetricDilatonJet};
use crate::rational::{int, rat, Rational};
use crate::tensor::MatQ;

/// The exact rational `(4 pi)^{m/2} a_{n,m}(x, D)` at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedCoefficient {
    pub n: u32,
    pub m: usize,
    pub value: Rational,
}

/// One factor of a coefficient term. The `u8` is the number of covariant
/// derivative indices; labels bind tensor slots first, derivative slots
/// after.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    /// Scalar curvature with `d` derivative labels (`d` in 0, 1, 2, 4).
    Tau(u8),
    /// Ricci tensor with `d` derivative labels (`d` in 0, 1, 2).
    Rho(u8),
    /// Riemann tensor with `d` derivative labels (`d` in 0, 1, 2).
    Riem(u8),
    /// Endomorphism with `d` derivative labels (`d` in 0, 1, 2).
    E(u8),
    /// `E_{;iijj}`, already contracted.
    ELap2,
    /// Bundle curvature with `d` derivative labels (`d` in 0, 1).
    Om(u8),
    /// `Omega_{ij;kk}`, derivative pair already contracted.
    OmLap2,
}

impl FactorKind {
    pub fn label_count(self) -> usize {
        match self {
            FactorKind::Tau(d) => d as usize,
            FactorKind::Rho(d) => 2 + d as usize,
            FactorKind::Riem(d) => 4 + d as usize,
            FactorKind::E(d) => d as usize,
            FactorKind::ELap2 => 0,
            FactorKind::Om(d) => 2 + d as usize,
            FactorKind::OmLap2 => 2,
        }
    }

    /// Grading: curvature-level objects weigh 2 plus one per derivative.
    pub fn weight(self) -> u32 {
        match self {
            FactorKind::Tau(d) | FactorKind::Rho(d) | FactorKind::Riem(d) => 2 + d as u32,
            FactorKind::E(d) | FactorKind::Om(d) => 2 + d as u32,
            FactorKind::ELap2 => 6,
            FactorKind::OmLap2 => 4,
        }
    }

    pub fn is_endo(self) -> bool {
        matches!(
            self,
            FactorKind::E(_) | FactorKind::ELap2 | FactorKind::Om(_) | FactorKind::OmLap2
        )
    }
}

#[derive(Clone, Copy, Debug)]
pub struct TermFactor {
    pub kind: FactorKind,
    pub labels: &'static [u8],
}

#[derive(Clone, Copy, Debug)]
pub struct Term {
    pub num: i64,
    pub den: i64,
    pub factors: &'static [TermFactor],
}

impl Term {
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|f| f.kind.weight()).sum()
    }

    pub fn is_id_term(&self) -> bool {
        self.factors.iter().all(|f| !f.kind.is_endo())
    }
}

macro_rules! tf {
    ($kind:expr, $labels:expr) => {
        TermFactor {
            kind: $kind,
            labels: $labels,
        }
    };
}

use FactorKind::*;

/// `a_0 = (4 pi)^{-m/2} Tr(Id)`.
pub const A0_TERMS: &[Term] = &[Term {
    num: 1,
    den: 1,
    factors: &[],
}];

/// `a_2 = (4 pi)^{-m/2} (1/6) Tr(6 E + tau Id)`.
pub const A2_TERMS: &[Term] = &[
    Term {
        num: 1,
        den: 1,
        factors: &[tf!(E(0), &[])],
    },
    Term {
        num: 1,
        den: 6,
        factors: &[tf!(Tau(0), &[])],
    },
];

/// `a_4 = (4 pi)^{-m/2} (1/360) Tr(60 E_{;kk} + 60 tau E + 180 E^2
///   + (12 tau_{;kk} + 5 tau^2 - 2 |rho|^2 + 2 |R|^2) Id
///   + 30 Omega_ij Omega_ij)`.
pub const A4_TERMS: &[Term] = &[
    Term {
        num: 60,
        den: 360,
        factors: &[tf!(E(2), &[0, 0])],
    },
    Term {
        num: 60,
        den: 360,
        factors: &[tf!(Tau(0), &[]), tf!(E(0), &[])],
    },
    Term {
        num: 180,
        den: 360,
        factors: &[tf!(E(0), &[]), tf!(E(0), &[])],
    },
    Term {
        num: 12,
        den: 360,
        factors: &[tf!(Tau(2), &[0, 0])],
    },
    Term {
        num: 5,
        den: 360,
        factors: &[tf!(Tau(0), &[]), tf!(Tau(0), &[])],
    },
    Term {
        num: -2,
        den: 360,
        factors: &[tf!(Rho(0), &[0, 1]), tf!(Rho(0), &[0, 1])],
    },
    Term {
        num: 2,
        den: 360,
        factors: &[tf!(Riem(0), &[0, 1, 2, 3]), tf!(Riem(0), &[0, 1, 2, 3])],
    },
    Term {
        num: 30,
        den: 360,
        factors: &[tf!(Om(0), &[0, 1]), tf!(Om(0), &[0, 1])],
    },
];

const F7: i64 = 5040;

/// The order-six list, term by term in display order.
#[rustfmt::skip]
pub const A6_TERMS: &[Term] = &[
    // identity-proportional block
    Term { num: 18, den: F7, factors: &[tf!(Tau(4), &[0, 0, 1, 1])] },
    Term { num: 17, den: F7, factors: &[tf!(Tau(1), &[0]), tf!(Tau(1), &[0])] },
    Term { num: -2, den: F7, factors: &[tf!(Rho(1), &[0, 1, 2]), tf!(Rho(1), &[0, 1, 2])] },
    Term { num: -4, den: F7, factors: &[tf!(Rho(1), &[0, 1, 2]), tf!(Rho(1), &[0, 2, 1])] },
    Term { num: 9, den: F7, factors: &[tf!(Riem(1), &[0, 1, 2, 3, 4]), tf!(Riem(1), &[0, 1, 2, 3, 4])] },
    Term { num: 28, den: F7, factors: &[tf!(Tau(0), &[]), tf!(Tau(2), &[0, 0])] },
    Term { num: -8, den: F7, factors: &[tf!(Rho(0), &[0, 1]), tf!(Rho(2), &[0, 1, 2, 2])] },
    Term { num: 24, den: F7, factors: &[tf!(Rho(0), &[0, 1]), tf!(Rho(2), &[0, 2, 1, 2])] },
    Term { num: 12, den: F7, factors: &[tf!(Riem(0), &[0, 1, 2, 3]), tf!(Riem(2), &[0, 1, 2, 3, 4, 4])] },
    Term { num: 35, den: 9 * F7, factors: &[tf!(Tau(0), &[]), tf!(Tau(0), &[]), tf!(Tau(0), &[])] },
    Term { num: -14, den: 3 * F7, factors: &[tf!(Tau(0), &[]), tf!(Rho(0), &[0, 1]), tf!(Rho(0), &[0, 1])] },
    Term { num: 14, den: 3 * F7, factors: &[tf!(Tau(0), &[]), tf!(Riem(0), &[0, 1, 2, 3]), tf!(Riem(0), &[0, 1, 2, 3])] },
    Term { num: -208, den: 9 * F7, factors: &[tf!(Rho(0), &[0, 1]), tf!(Rho(0), &[0, 2]), tf!(Rho(0), &[1, 2])] },
    Term { num: -64, den: 3 * F7, factors: &[tf!(Rho(0), &[0, 1]), tf!(Rho(0), &[2, 3]), tf!(Riem(0), &[0, 2, 1, 3])] },
    Term { num: -16, den: 3 * F7, factors: &[tf!(Rho(0), &[0, 1]), tf!(Riem(0), &[0, 2, 3, 4]), tf!(Riem(0), &[1, 2, 3, 4])] },
    Term { num: -44, den: 9 * F7, factors: &[tf!(Riem(0), &[0, 1, 2, 3]), tf!(Riem(0), &[0, 1, 4, 5]), tf!(Riem(0), &[2, 3, 4, 5])] },
    Term { num: -80, den: 9 * F7, factors: &[tf!(Riem(0), &[0, 1, 2, 3]), tf!(Riem(0), &[0, 4, 2, 5]), tf!(Riem(0), &[1, 4, 3, 5])] },
    // endomorphism block
    Term { num: 1, den: 45, factors: &[tf!(Om(1), &[0, 1, 2]), tf!(Om(1), &[0, 1, 2])] },
    Term { num: 1, den: 180, factors: &[tf!(Om(1), &[0, 1, 1]), tf!(Om(1), &[0, 2, 2])] },
    Term { num: 1, den: 60, factors: &[tf!(OmLap2, &[0, 1]), tf!(Om(0), &[0, 1])] },
    Term { num: 1, den: 60, factors: &[tf!(Om(0), &[0, 1]), tf!(OmLap2, &[0, 1])] },
    Term { num: -1, den: 30, factors: &[tf!(Om(0), &[0, 1]), tf!(Om(0), &[1, 2]), tf!(Om(0), &[2, 0])] },
    Term { num: -1, den: 60, factors: &[tf!(Riem(0), &[0, 1, 2, 3]), tf!(Om(0), &[0, 1]), tf!(Om(0), &[2, 3])] },
    Term { num: -1, den: 90, factors: &[tf!(Rho(0), &[0, 1]), tf!(Om(0), &[0, 2]), tf!(Om(0), &[1, 2])] },
    Term { num: 1, den: 72, factors: &[tf!(Tau(0), &[]), tf!(Om(0), &[0, 1]), tf!(Om(0), &[0, 1])] },
    Term { num: 1, den: 60, factors: &[tf!(ELap2, &[])] },
    Term { num: 1, den: 6, factors: &[tf!(E(0), &[]), tf!(E(2), &[0, 0])] },
    Term { num: 1, den: 12, factors: &[tf!(E(1), &[0]), tf!(E(1), &[0])] },
    Term { num: 1, den: 6, factors: &[tf!(E(0), &[]), tf!(E(0), &[]), tf!(E(0), &[])] },
    Term { num: 1, den: 12, factors: &[tf!(E(0), &[]), tf!(Om(0), &[0, 1]), tf!(Om(0), &[0, 1])] },
    Term { num: 1, den: 36, factors: &[tf!(Tau(0), &[]), tf!(E(2), &[0, 0])] },
    Term { num: 1, den: 90, factors: &[tf!(Rho(0), &[0, 1]), tf!(E(2), &[0, 1])] },
    Term { num: 1, den: 30, factors: &[tf!(Tau(1), &[0]), tf!(E(1), &[0])] },
    Term { num: 1, den: 12, factors: &[tf!(E(0), &[]), tf!(E(0), &[]), tf!(Tau(0), &[])] },
    Term { num: 1, den: 30, factors: &[tf!(E(0), &[]), tf!(Tau(2), &[0, 0])] },
    Term { num: 1, den: 72, factors: &[tf!(E(0), &[]), tf!(Tau(0), &[]), tf!(Tau(0), &[])] },
    Term { num: -1, den: 180, factors: &[tf!(E(0), &[]), tf!(Rho(0), &[0, 1]), tf!(Rho(0), &[0, 1])] },
    Term { num: 1, den: 180, factors: &[tf!(E(0), &[]), tf!(Riem(0), &[0, 1, 2, 3]), tf!(Riem(0), &[0, 1, 2, 3])] },
];

pub fn terms_for(n: u32) -> Result<&'static [Term]> {
    match n {
        0 => Ok(A0_TERMS),
        2 => Ok(A2_TERMS),
        4 => Ok(A4_TERMS),
        6 => Ok(A6_TERMS),
        _ => Err(CoreError::UnsupportedOrder { n }),
    }
}

fn tensor_value<'a>(
    which: &'a Option<crate::tensor::PointTensor>,
    what: &str,
    idx: &[usize],
) -> Result<&'a Rational> {
    which
        .as_ref()
        .map(|t| t.get(idx))
        .ok_or_else(|| CoreError::Truncation {
            what: format!("missing {what} data"),
            required: 0,
            actual: 0,
        })
}

fn scalar_factor_value(kind: FactorKind, idx: &[usize], cp: &CurvaturePackage) -> Result<Rational> {
    Ok(match kind {
        FactorKind::Tau(0) => cp.tau.clone(),
        FactorKind::Tau(1) => tensor_value(&cp.dtau, "d tau", idx)?.clone(),
        FactorKind::Tau(2) => tensor_value(&cp.d2tau, "d2 tau", idx)?.clone(),
        FactorKind::Tau(4) => tensor_value(&cp.d4tau, "d4 tau", idx)?.clone(),
        FactorKind::Rho(0) => cp.rho.get(idx).clone(),
        FactorKind::Rho(1) => tensor_value(&cp.drho, "d rho", idx)?.clone(),
        FactorKind::Rho(2) => tensor_value(&cp.d2rho, "d2 rho", idx)?.clone(),
        FactorKind::Riem(0) => cp.r.get(idx).clone(),
        FactorKind::Riem(1) => tensor_value(&cp.dr, "d R", idx)?.clone(),
        FactorKind::Riem(2) => tensor_value(&cp.d2r, "d2 R", idx)?.clone(),
        other => panic!("{other:?} is not a scalar factor"),
    })
}

fn endo_factor_value<'a>(
    kind: FactorKind,
    idx: &[usize],
    bde: &'a BundleDerivs,
    m: usize,
) -> Result<&'a MatQ> {
    fn missing(what: &str) -> CoreError {
        CoreError::Truncation {
            what: format!("missing bundle {what} data"),
            required: 0,
            actual: 0,
        }
    }
    Ok(match kind {
        FactorKind::E(0) => &bde.e0,
        FactorKind::E(1) => &bde.de.as_ref().ok_or_else(|| missing("dE"))?[idx[0]],
        FactorKind::E(2) => {
            &bde.hess_e.as_ref().ok_or_else(|| missing("hess E"))?[idx[0] * m + idx[1]]
        }
        FactorKind::ELap2 => bde.lap2_e.as_ref().ok_or_else(|| missing("lap2 E"))?,
        FactorKind::Om(0) => {
            &bde.omega0.as_ref().ok_or_else(|| missing("Omega"))?[idx[0] * m + idx[1]]
        }
        FactorKind::Om(1) => &bde.domega.as_ref().ok_or_else(|| missing("d Omega"))?
            [(idx[0] * m + idx[1]) * m + idx[2]],
        FactorKind::OmLap2 => {
            &bde.lap_omega.as_ref().ok_or_else(|| missing("lap Omega"))?[idx[0] * m + idx[1]]
        }
        other => panic!("{other:?} is not an endomorphism factor"),
    })
}

/// Evaluate one term: sum over label assignments of (product of scalar
/// factors) times (trace of the ordered product of endomorphism factors, or
/// the fibre dimension when there are none), times the term coefficient.
pub fn eval_term(term: &Term, bde: &BundleDerivs, cp: &CurvaturePackage) -> Result<Rational> {
    let m = cp.dim;
    let nlabels = term
        .factors
        .iter()
        .flat_map(|f| f.labels.iter())
        .map(|&l| l as usize + 1)
        .max()
        .unwrap_or(0);
    for f in term.factors {
        assert_eq!(f.labels.len(), f.kind.label_count(), "malformed term table");
    }
    let has_endo = term.factors.iter().any(|f| f.kind.is_endo());
    let mut assignment = vec![0usize; nlabels];
    let mut scalar_acc = Rational::zero();
    let mut endo_acc = MatQ::zeros(bde.fibre);
    let mut idx_buf = Vec::new();
    loop {
        let mut scalar = Rational::from_integer(1.into());
        let mut endo: Option<MatQ> = None;
        let mut zero = false;
        for f in term.factors {
            idx_buf.clear();
            idx_buf.extend(f.labels.iter().map(|&l| assignment[l as usize]));
            if f.kind.is_endo() {
                let mat = endo_factor_value(f.kind, &idx_buf, bde, m)?;
                endo = Some(match endo {
                    Some(acc) => acc.mul(mat),
                    None => mat.clone(),
                });
            } else {
                let v = scalar_factor_value(f.kind, &idx_buf, cp)?;
                if v.is_zero() {
                    zero = true;
                    break;
                }
                scalar *= v;
            }
        }
        if !zero {
            match endo {
                Some(mat) => endo_acc.add_scaled(&mat, &scalar),
                None => scalar_acc += scalar,
            }
        }
        // advance the label assignment; done when it wraps
        let mut k = 0;
        loop {
            if k == nlabels {
                let coef = rat(term.num, term.den);
                let total = if has_endo {
                    endo_acc.trace()
                } else {
                    scalar_acc * int(bde.fibre as i64)
                };
                return Ok(coef * total);
            }
            assignment[k] += 1;
            if assignment[k] < m {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

/// Normalized coefficient for one bundle from prepared data, with a filter
/// over the term list (used by the identity-cancellation consistency test).
pub fn a_n_filtered<F>(
    n: u32,
    bde: &BundleDerivs,
    cp: &CurvaturePackage,
    mut keep: F,
) -> Result<Rational>
where
    F: FnMut(&Term) -> bool,
{
    let mut total = Rational::zero();
    for term in terms_for(n)? {
        if !keep(term) {
            continue;
        }
        total += eval_term(term, bde, cp)?;
    }
    Ok(total)
}

/// Normalized heat coefficient `(4 pi)^{m/2} a_n` for one bundle.
pub fn a_n(n: u32, bde: &BundleDerivs, cp: &CurvaturePackage) -> Result<NormalizedCoefficient> {
    Ok(NormalizedCoefficient {
        n,
        m: cp.dim,
        value: a_n_filtered(n, bde, cp, |_| true)?,
    })
}

fn curvature_orders_for(n: u32) -> u32 {
    match n {
        0 | 2 => 0,
        4 => 2,
        _ => 4,
    }
}

/// Normalized coefficient of one form bundle `p` built from scratch.
pub fn coefficient_for_bundle(
    jet: &MetricDilatonJet,
    n: u32,
    p: usize,
) -> Result<NormalizedCoefficient> {
    terms_for(n)?;
    if jet.degree() < n {
        return Err(CoreError::Truncation {
            what: format!("coefficient of order {n}"),
            required: n,
            actual: jet.degree(),
        });
    }
    let jet = jet.truncated(n.max(2));
    let jet = &jet;
    let ctx = GeometryCtx::new(jet)?;
    let cp = curvature_from_ctx(&ctx, curvature_orders_for(n))?;
    let op = build_twisted_laplacian(&ctx, p)?;
    let bd = canonical_decomposition(&ctx, &op);
    let bde = bundle_curvature_and_derivs(&ctx, &bd, n)?;
    a_n(n, &bde, &cp)
}

/// The alternating supertrace
/// `sum_p (-1)^p (4 pi)^{m/2} a_n(x, Delta_phi^p)`, fanned out over the
/// form bundles on parallel workers and joined by exact summation.
pub fn supertrace(n: u32, jet: &MetricDilatonJet) -> Result<NormalizedCoefficient> {
    let value = supertrace_filtered(n, jet, |_| true)?;
    Ok(NormalizedCoefficient {
        n,
        m: jet.dim(),
        value,
    })
}

/// Supertrace with a term filter, shared by the consistency tests.
pub fn supertrace_filtered<F>(n: u32, jet: &MetricDilatonJet, keep: F) -> Result<Rational>
where
    F: Fn(&Term) -> bool + Sync,
{
    terms_for(n)?;
    if jet.degree() < n {
        return Err(CoreError::Truncation {
            what: format!("supertrace of order {n}"),
            required: n,
            actual: jet.degree(),
        });
    }
    // a weight-n coefficient only involves the n-jet, so drop the rest
    let jet = jet.truncated(n.max(2));
    let jet = &jet;
    let m = jet.dim();
    let ctx = GeometryCtx::new(jet)?;
    let cp = curvature_from_ctx(&ctx, curvature_orders_for(n))?;
    let signed: Result<Vec<Rational>> = (0..=m)
        .into_par_iter()
        .map(|p| {
            let op = build_twisted_laplacian(&ctx, p)?;
            let bd = canonical_decomposition(&ctx, &op);
            let bde = bundle_curvature_and_derivs(&ctx, &bd, n)?;
            let v = a_n_filtered(n, &bde, &cp, |t| keep(t))?;
            Ok(if p % 2 == 0 { v } else { -v })
        })
        .collect();
    Ok(signed?.into_iter().fold(Rational::zero(), |a, b| a + b))
}

/// Result of the product-decoupling comparison.
#[derive(Clone, Debug)]
pub struct ProductCheck {
    pub n: u32,
    pub lhs: Rational,
    pub rhs: Rational,
}

impl ProductCheck {
    pub fn is_equal(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn discrepancy(&self) -> Rational {
        &self.lhs - &self.rhs
    }
}

/// Compare the supertrace of a product against the convolution of factor
/// supertraces over even split orders `n1 + n2 = n` with `n1 >= m1` and
/// `n2 >= m2` (terms below those cutoffs vanish).
pub fn product_check(
    jet_a: &MetricDilatonJet,
    jet_b: &MetricDilatonJet,
    n: u32,
) -> Result<ProductCheck> {
    if n % 2 != 0 {
        return Err(CoreError::UnsupportedOrder { n });
    }
    let product = MetricDilatonJet::product(jet_a, jet_b);
    let lhs = supertrace(n, &product)?.value;
    let m1 = jet_a.dim() as u32;
    let m2 = jet_b.dim() as u32;
    let mut rhs = Rational::zero();
    let mut n1 = 0;
    while n1 <= n {
        let n2 = n - n1;
        if n1 >= m1 && n2 >= m2 {
            let va = supertrace(n1, jet_a)?.value;
            if !va.is_zero() {
                let vb = supertrace(n2, jet_b)?.value;
                rhs += va * vb;
            }
        }
        n1 += 2;
    }
    Ok(ProductCheck { n, lhs, rhs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::jet::PolyJet;
    use crate::rational::zero;

    #[test]
    fn every_term_has_the_right_weight() {
        for (n, terms) in [(2u32, A2_TERMS), (4, A4_TERMS), (6, A6_TERMS)] {
            for term in terms {
                assert_eq!(term.weight(), n, "term {term:?} has wrong weight");
            }
        }
        assert_eq!(A6_TERMS.len(), 38);
    }

    #[test]
    fn label_counts_match_kinds() {
        for terms in [A0_TERMS, A2_TERMS, A4_TERMS, A6_TERMS] {
            for term in terms {
                for f in term.factors {
                    assert_eq!(f.labels.len(), f.kind.label_count());
                }
            }
        }
    }

    #[test]
    fn a0_counts_the_fibre_dimension() {
        let jet = MetricDilatonJet::flat(3, 2);
        assert_eq!(coefficient_for_bundle(&jet, 0, 0).unwrap().value, int(1));
        assert_eq!(coefficient_for_bundle(&jet, 0, 1).unwrap().value, int(3));
        let st = supertrace(0, &jet).unwrap();
        assert_eq!(st.value, zero());
    }

    #[test]
    fn a2_vanishes_for_the_flat_scalar_laplacian() {
        let jet = MetricDilatonJet::flat(2, 2);
        assert_eq!(coefficient_for_bundle(&jet, 2, 0).unwrap().value, zero());
    }

    #[test]
    fn circle_supertrace_reproduces_the_dilaton_hessian() {
        // normalized order-two supertrace on the line is 2 phi_{;11}(0)
        let phi = PolyJet::from_terms(
            1,
            6,
            vec![
                (vec![1], rat(1, 3)),
                (vec![2], rat(5, 2)),
                (vec![3], rat(-2, 3)),
            ],
        );
        let jet = MetricDilatonJet::circle_with_dilaton(6, phi);
        let st = supertrace(2, &jet).unwrap();
        // phi_{;11}(0) = 2 * (5/2) = 5
        assert_eq!(st.value, int(10));
    }

    #[test]
    fn unit_sphere_gauss_bonnet_density() {
        let jet = MetricDilatonJet::unit_sphere(2, 4);
        let st = supertrace(2, &jet).unwrap();
        assert_eq!(st.value, int(2));
    }

    #[test]
    fn supertrace_vanishes_below_dimension() {
        let jet = MetricDilatonJet::random(2, 4, 301);
        assert_eq!(supertrace(0, &jet).unwrap().value, zero());
        let jet3 = MetricDilatonJet::random_with_density(3, 4, 302, 60);
        assert_eq!(supertrace(2, &jet3).unwrap().value, zero());
    }

    #[test]
    fn unsupported_order_is_rejected() {
        let jet = MetricDilatonJet::flat(2, 4);
        assert!(matches!(
            supertrace(3, &jet),
            Err(CoreError::UnsupportedOrder { n: 3 })
        ));
    }

    #[test]
    fn degree_requirement_is_enforced() {
        let jet = MetricDilatonJet::random(2, 2, 17);
        assert!(matches!(
            supertrace(4, &jet),
            Err(CoreError::Truncation { required: 4, .. })
        ));
    }

    #[test]
    fn id_terms_cancel_in_the_supertrace() {
        // every identity-proportional term cancels across the alternating
        // sum because sum_p (-1)^p C(m, p) = 0
        let jet = MetricDilatonJet::random(2, 4, 53);
        let full = supertrace_filtered(4, &jet, |_| true).unwrap();
        let no_id = supertrace_filtered(4, &jet, |t| !t.is_id_term()).unwrap();
        assert_eq!(full, no_id);
        assert_eq!(supertrace(4, &jet).unwrap().value, full);
    }

    #[test]
    fn phi_parity_and_constant_shift() {
        let jet = MetricDilatonJet::random(2, 4, 59);
        let st = supertrace(4, &jet).unwrap().value;
        assert_eq!(supertrace(4, &jet.negate_phi()).unwrap().value, st);
        assert_eq!(supertrace(4, &jet.shift_phi(&rat(7, 3))).unwrap().value, st);
    }

    #[test]
    fn weight_homogeneity_of_the_supertrace() {
        let jet = MetricDilatonJet::random(1, 4, 61);
        let c = rat(2, 3);
        let st = supertrace(2, &jet).unwrap().value;
        let st_scaled = supertrace(2, &jet.rescale_weight(&c)).unwrap().value;
        assert_eq!(st_scaled, st * &c * &c);
    }

    #[test]
    fn torus_product_rule() {
        // two dilaton circles: the order-four supertrace of the product is
        // the product of the circle values 2 phi'' each
        let phi1 = PolyJet::from_terms(1, 6, vec![(vec![2], rat(3, 2))]);
        let phi2 = PolyJet::from_terms(1, 6, vec![(vec![2], rat(-1, 3)), (vec![3], int(1))]);
        let c1 = MetricDilatonJet::circle_with_dilaton(6, phi1);
        let c2 = MetricDilatonJet::circle_with_dilaton(6, phi2);
        let check = product_check(&c1, &c2, 4).unwrap();
        assert!(check.is_equal(), "discrepancy {:?}", check.discrepancy());
        // 2 * 3 = 6 and 2 * (-2/3) = -4/3; product -8
        assert_eq!(check.lhs, int(-8));
    }

    #[test]
    fn flat_products_vanish() {
        let a = MetricDilatonJet::flat(1, 4);
        let b = MetricDilatonJet::flat(1, 4);
        let check = product_check(&a, &b, 4).unwrap();
        assert!(check.is_equal());
        assert_eq!(check.lhs, zero());
    }
}
