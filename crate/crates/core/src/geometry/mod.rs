//! Metric-and-dilaton jets in normal gauge, Christoffel symbols, curvature
//! with its covariant derivatives, and the example-manifold constructors.

pub mod field;
pub mod jetio;

use num_traits::Zero;
use rand::RngExt;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{CoreError, Result};
use crate::jet::{PolyJet, EXACT};
use crate::matjet::MatJet;
use crate::rational::{one, rat, Rational};
use crate::tensor::PointTensor;

pub use field::TensorField;

/// The geometric input to everything: a symmetric metric jet and a dilaton
/// jet in normal gauge (`g(0) = id`, vanishing first derivatives).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricDilatonJet {
    dim: usize,
    degree: u32,
    /// Row-major `dim x dim`, symmetric.
    g: Vec<PolyJet>,
    phi: PolyJet,
}

impl MetricDilatonJet {
    pub fn new(dim: usize, degree: u32, g: Vec<PolyJet>, phi: PolyJet) -> Result<Self> {
        assert_eq!(g.len(), dim * dim);
        let jet = MetricDilatonJet {
            dim,
            degree,
            g,
            phi,
        };
        jet.check_normal_gauge()?;
        Ok(jet)
    }

    fn check_normal_gauge(&self) -> Result<()> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let gij = self.metric(i, j);
                if gij != self.metric(j, i) {
                    return Err(CoreError::JetFormat(format!(
                        "metric entry ({i},{j}) is not symmetric"
                    )));
                }
                let want = if i == j { one() } else { Rational::zero() };
                if gij.eval0() != want {
                    return Err(CoreError::JetFormat(format!(
                        "metric value at origin is not the identity at ({i},{j})"
                    )));
                }
                for k in 0..self.dim {
                    if !gij.dpartial(k).eval0().is_zero() {
                        return Err(CoreError::JetFormat(format!(
                            "metric first derivative d_{k} g_({i},{j}) does not vanish at origin"
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn metric(&self, i: usize, j: usize) -> &PolyJet {
        &self.g[i * self.dim + j]
    }

    pub fn phi(&self) -> &PolyJet {
        &self.phi
    }

    /// Flat space with zero dilaton.
    pub fn flat(dim: usize, degree: u32) -> Self {
        let mut g = vec![PolyJet::zero(dim, degree); dim * dim];
        for i in 0..dim {
            g[i * dim + i] = PolyJet::one(dim).truncated(degree);
        }
        MetricDilatonJet {
            dim,
            degree,
            g,
            phi: PolyJet::zero(dim, degree),
        }
    }

    /// One-dimensional flat circle chart with a caller-supplied dilaton.
    pub fn circle_with_dilaton(degree: u32, phi: PolyJet) -> Self {
        assert_eq!(phi.dim(), 1);
        let mut out = Self::flat(1, degree);
        out.phi = phi.truncated(degree);
        out
    }

    /// The round sphere of curvature `kappa = 1/r^2` in the rational
    /// conformal chart `g_ij = d_ij (1 + kappa |x|^2 / 4)^{-2}`.
    pub fn sphere(dim: usize, degree: u32, kappa: Rational) -> Self {
        let mut norm2 = PolyJet::zero(dim, degree);
        for i in 0..dim {
            let xi = PolyJet::coordinate(dim, i).truncated(degree);
            norm2 = &norm2 + &(&xi * &xi);
        }
        let u = &PolyJet::one(dim).truncated(degree) + &norm2.scale(&(kappa * rat(1, 4)));
        let factor = (&u * &u).invert_unit();
        let mut g = vec![PolyJet::zero(dim, degree); dim * dim];
        for i in 0..dim {
            g[i * dim + i] = factor.clone();
        }
        MetricDilatonJet {
            dim,
            degree,
            g,
            phi: PolyJet::zero(dim, degree),
        }
    }

    /// Unit round sphere.
    pub fn unit_sphere(dim: usize, degree: u32) -> Self {
        Self::sphere(dim, degree, one())
    }

    /// Seeded random jet: symmetric metric with identity value and zero
    /// first derivatives at the origin, remaining coefficients small
    /// rationals (numerators in [-3, 3], denominators in {1, 2, 3}), plus a
    /// random dilaton. `density_pct` keeps roughly that percentage of
    /// candidate monomials, which controls pipeline cost in dimension 4.
    pub fn random_with_density(dim: usize, degree: u32, seed: u64, density_pct: u32) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let draw = |rng: &mut ChaCha8Rng| -> Rational {
            let num: i64 = rng.random_range(-3..=3);
            let den: i64 = rng.random_range(1..=3);
            rat(num, den)
        };
        let monomials: Vec<Vec<u32>> = exponents_up_to(dim, degree);
        let mut g = vec![PolyJet::zero(dim, degree); dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let mut terms = Vec::new();
                if i == j {
                    terms.push((vec![0u32; dim], one()));
                }
                for e in &monomials {
                    let d: u32 = e.iter().sum();
                    if d < 2 {
                        continue;
                    }
                    let c = draw(&mut rng);
                    let keep: u32 = rng.random_range(0..100);
                    if keep < density_pct && !c.is_zero() {
                        terms.push((e.clone(), c));
                    }
                }
                let jet = PolyJet::from_terms(dim, degree, terms);
                g[i * dim + j] = jet.clone();
                g[j * dim + i] = jet;
            }
        }
        let mut phi_terms = Vec::new();
        for e in &monomials {
            let c = draw(&mut rng);
            let keep: u32 = rng.random_range(0..100);
            if keep < density_pct && !c.is_zero() {
                phi_terms.push((e.clone(), c));
            }
        }
        MetricDilatonJet {
            dim,
            degree,
            g,
            phi: PolyJet::from_terms(dim, degree, phi_terms),
        }
    }

    /// Dense seeded random jet.
    pub fn random(dim: usize, degree: u32, seed: u64) -> Self {
        Self::random_with_density(dim, degree, seed, 100)
    }

    /// Block product: block-diagonal metric on disjoint coordinate blocks
    /// and summed dilaton.
    pub fn product(a: &MetricDilatonJet, b: &MetricDilatonJet) -> Self {
        let dim = a.dim + b.dim;
        let degree = a.degree.min(b.degree);
        let embed_a = |p: &PolyJet| embed(p, dim, 0);
        let embed_b = |p: &PolyJet| embed(p, dim, a.dim);
        let mut g = vec![PolyJet::zero(dim, degree); dim * dim];
        for i in 0..a.dim {
            for j in 0..a.dim {
                g[i * dim + j] = embed_a(a.metric(i, j)).truncated(degree);
            }
        }
        for i in 0..b.dim {
            for j in 0..b.dim {
                g[(a.dim + i) * dim + (a.dim + j)] = embed_b(b.metric(i, j)).truncated(degree);
            }
        }
        let phi = &embed_a(&a.phi).truncated(degree) + &embed_b(&b.phi).truncated(degree);
        MetricDilatonJet {
            dim,
            degree,
            g,
            phi,
        }
    }

    /// Append one flat circle coordinate with no dilaton dependence.
    pub fn extend_by_circle(&self) -> Self {
        Self::product(self, &Self::flat(1, self.degree))
    }

    /// The weight-rescaling substitution `x -> c x` combined with
    /// `g -> c^{-2} g`, which keeps normal gauge and multiplies every
    /// weight-`n` invariant by `c^n`. Concretely each degree-`d` jet
    /// coefficient picks up `c^d`.
    pub fn rescale_weight(&self, c: &Rational) -> Self {
        MetricDilatonJet {
            dim: self.dim,
            degree: self.degree,
            g: self.g.iter().map(|p| p.scale_coordinates(c)).collect(),
            phi: self.phi.scale_coordinates(c),
        }
    }

    /// Same geometry with the dilaton negated.
    pub fn negate_phi(&self) -> Self {
        let mut out = self.clone();
        out.phi = -&out.phi;
        out
    }

    /// Same geometry with a constant added to the dilaton.
    pub fn shift_phi(&self, c: &Rational) -> Self {
        let mut out = self.clone();
        out.phi = &out.phi + &PolyJet::constant(self.dim, c.clone()).truncated(self.degree);
        out
    }

    /// Replace the dilaton.
    pub fn with_phi(&self, phi: PolyJet) -> Self {
        let mut out = self.clone();
        assert_eq!(phi.dim(), self.dim);
        out.phi = phi.truncated(self.degree);
        out
    }

    /// Restrict the truncation degree. A weight-`n` invariant only sees the
    /// `n`-jet of the data, so callers drop unused Taylor coefficients
    /// before heavy pipelines.
    pub fn truncated(&self, degree: u32) -> Self {
        if degree >= self.degree {
            return self.clone();
        }
        MetricDilatonJet {
            dim: self.dim,
            degree,
            g: self.g.iter().map(|p| p.truncated(degree)).collect(),
            phi: self.phi.truncated(degree),
        }
    }
}

/// All exponent tuples of total degree at most `degree`, lexicographically.
pub fn exponents_up_to(dim: usize, degree: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; dim];
    loop {
        if cur.iter().sum::<u32>() <= degree {
            out.push(cur.clone());
        }
        // odometer over 0..=degree per slot
        let mut k = dim;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            cur[k] += 1;
            if cur[k] <= degree {
                break;
            }
            cur[k] = 0;
        }
    }
}

/// Re-embed a jet into a larger coordinate block starting at `offset`.
fn embed(p: &PolyJet, dim: usize, offset: usize) -> PolyJet {
    let entries: Vec<_> = p
        .terms()
        .map(|(e, c)| {
            let mut f = vec![0u32; dim];
            f[offset..offset + e.len()].copy_from_slice(e);
            (f, c.clone())
        })
        .collect();
    PolyJet::from_terms(dim, p.degree(), entries)
}

/// Shared per-jet geometric context: inverse metric, Christoffel symbols,
/// dilaton gradient. Built once and threaded through every pipeline.
pub struct GeometryCtx {
    jet: MetricDilatonJet,
    g: MatJet,
    g_inv: MatJet,
    inv_det_g: PolyJet,
    /// `Gamma^k_{ij}` flattened as `k * m^2 + i * m + j`.
    gamma: Vec<PolyJet>,
    dphi: Vec<PolyJet>,
    grad_phi: Vec<PolyJet>,
}

impl GeometryCtx {
    pub fn new(jet: &MetricDilatonJet) -> Result<Self> {
        jet.check_normal_gauge()?;
        if jet.degree < 1 {
            return Err(CoreError::Truncation {
                what: "geometry context".into(),
                required: 1,
                actual: jet.degree,
            });
        }
        let m = jet.dim;
        let mut g = MatJet::zeros(m, m, jet.degree);
        for i in 0..m {
            for j in 0..m {
                g.set(i, j, jet.metric(i, j).clone());
            }
        }
        let g_inv = g.invert_unit(jet.degree);
        let inv_det_g = g.det().truncated(jet.degree).invert_unit();
        // Gamma^k_{ij} = 1/2 g^{kl} (d_i g_jl + d_j g_il - d_l g_ij)
        let mut gamma = vec![PolyJet::zero(m, EXACT); m * m * m];
        for i in 0..m {
            for j in i..m {
                let mut lowered = Vec::with_capacity(m);
                for l in 0..m {
                    let v = &(&jet.metric(j, l).dpartial(i) + &jet.metric(i, l).dpartial(j))
                        - &jet.metric(i, j).dpartial(l);
                    lowered.push(v);
                }
                for k in 0..m {
                    let mut acc = PolyJet::zero(m, EXACT);
                    for (l, low) in lowered.iter().enumerate() {
                        if low.is_zero() {
                            continue;
                        }
                        acc = &acc + &(g_inv.get(k, l) * low);
                    }
                    let half = acc.scale(&rat(1, 2));
                    gamma[k * m * m + i * m + j] = half.clone();
                    gamma[k * m * m + j * m + i] = half;
                }
            }
        }
        let dphi: Vec<PolyJet> = (0..m).map(|i| jet.phi.dpartial(i)).collect();
        let mut grad_phi = Vec::with_capacity(m);
        for k in 0..m {
            let mut acc = PolyJet::zero(m, EXACT);
            for l in 0..m {
                if dphi[l].is_zero() {
                    continue;
                }
                acc = &acc + &(g_inv.get(k, l) * &dphi[l]);
            }
            grad_phi.push(acc);
        }
        Ok(GeometryCtx {
            jet: jet.clone(),
            g,
            g_inv,
            inv_det_g,
            gamma,
            dphi,
            grad_phi,
        })
    }

    pub fn dim(&self) -> usize {
        self.jet.dim
    }

    pub fn degree(&self) -> u32 {
        self.jet.degree
    }

    pub fn jet(&self) -> &MetricDilatonJet {
        &self.jet
    }

    pub fn metric(&self) -> &MatJet {
        &self.g
    }

    pub fn metric_inv(&self) -> &MatJet {
        &self.g_inv
    }

    pub fn inv_det_metric(&self) -> &PolyJet {
        &self.inv_det_g
    }

    pub fn gamma(&self, k: usize, i: usize, j: usize) -> &PolyJet {
        let m = self.jet.dim;
        &self.gamma[k * m * m + i * m + j]
    }

    pub fn phi(&self) -> &PolyJet {
        &self.jet.phi
    }

    pub fn dphi(&self, i: usize) -> &PolyJet {
        &self.dphi[i]
    }

    pub fn grad_phi(&self, k: usize) -> &PolyJet {
        &self.grad_phi[k]
    }

    /// The fully lowered curvature field
    /// `R_{ijkl} = g_{ls} (d_i Gamma^s_{jk} - d_j Gamma^s_{ik}
    ///            + Gamma^s_{ia} Gamma^a_{jk} - Gamma^s_{ja} Gamma^a_{ik})`,
    /// with the sign fixed so that `R_{1221} = +1` on the unit sphere.
    pub fn riemann_field(&self) -> TensorField {
        let m = self.jet.dim;
        let mut upper = TensorField::zeros(m, 4, EXACT); // R^s_{ijk} stored as [i,j,k,s]
        for i in 0..m {
            for j in 0..m {
                if i == j {
                    continue;
                }
                for k in 0..m {
                    for s in 0..m {
                        let mut v =
                            &self.gamma(s, j, k).dpartial(i) - &self.gamma(s, i, k).dpartial(j);
                        for a in 0..m {
                            let g1 = self.gamma(s, i, a);
                            let g2 = self.gamma(a, j, k);
                            if !g1.is_zero() && !g2.is_zero() {
                                v = &v + &(g1 * g2);
                            }
                            let g3 = self.gamma(s, j, a);
                            let g4 = self.gamma(a, i, k);
                            if !g3.is_zero() && !g4.is_zero() {
                                v = &v - &(g3 * g4);
                            }
                        }
                        upper.set(&[i, j, k, s], v);
                    }
                }
            }
        }
        let mut lowered = TensorField::zeros(m, 4, EXACT);
        for idx in lowered.indices() {
            let (i, j, k, l) = (idx[0], idx[1], idx[2], idx[3]);
            if i == j {
                continue;
            }
            let mut acc = PolyJet::zero(m, EXACT);
            for s in 0..m {
                let u = upper.get(&[i, j, k, s]);
                if u.is_zero() {
                    continue;
                }
                acc = &acc + &(self.g.get(l, s) * u);
            }
            lowered.set(&idx, acc);
        }
        lowered
    }

    /// Covariant Hessian of a scalar jet as a field.
    pub fn hessian_field(&self, f: &PolyJet) -> TensorField {
        TensorField::scalar(f.clone())
            .cov_deriv(self)
            .cov_deriv(self)
    }
}

/// Curvature data at the origin: the Riemann tensor with up to two covariant
/// derivatives, its Ricci and scalar contractions with the derivative orders
/// the sixth heat coefficient needs, and dilaton jets.
#[derive(Clone, Debug)]
pub struct CurvaturePackage {
    pub dim: usize,
    pub r: PointTensor,
    pub dr: Option<PointTensor>,
    pub d2r: Option<PointTensor>,
    pub rho: PointTensor,
    pub drho: Option<PointTensor>,
    pub d2rho: Option<PointTensor>,
    pub tau: Rational,
    pub dtau: Option<PointTensor>,
    pub d2tau: Option<PointTensor>,
    pub d4tau: Option<PointTensor>,
    pub phi0: Rational,
    pub dphi: PointTensor,
    pub hess_phi: Option<PointTensor>,
    pub d3phi: Option<PointTensor>,
}

/// Compute the curvature package with `orders` covariant derivatives of
/// curvature-level data (0..=4; orders 3 and 4 only feed the scalar
/// contractions that the sixth coefficient needs).
pub fn curvature(jet: &MetricDilatonJet, orders: u32) -> Result<CurvaturePackage> {
    let ctx = GeometryCtx::new(jet)?;
    curvature_from_ctx(&ctx, orders)
}

pub fn curvature_from_ctx(ctx: &GeometryCtx, orders: u32) -> Result<CurvaturePackage> {
    let need = 2 + orders;
    if ctx.degree() < need {
        return Err(CoreError::Truncation {
            what: format!("curvature with {orders} derivative orders"),
            required: need,
            actual: ctx.degree(),
        });
    }
    let r_field = ctx.riemann_field();
    let rho_field = r_field.contract_metric(1, 2, ctx.metric_inv());
    let tau_field = rho_field.contract_metric(0, 1, ctx.metric_inv());

    let r = r_field.eval0();
    let rho = rho_field.eval0();
    let tau = tau_field.get(&[]).eval0();

    let mut dr = None;
    let mut d2r = None;
    let mut drho = None;
    let mut d2rho = None;
    let mut dtau = None;
    let mut d2tau = None;
    let mut d4tau = None;

    if orders >= 1 {
        let dr_field = r_field.cov_deriv(ctx);
        let drho_field = rho_field.cov_deriv(ctx);
        let dtau_field = tau_field.cov_deriv(ctx);
        dr = Some(dr_field.eval0());
        drho = Some(drho_field.eval0());
        dtau = Some(dtau_field.eval0());
        if orders >= 2 {
            d2r = Some(dr_field.cov_deriv_origin());
            d2rho = Some(drho_field.cov_deriv_origin());
            let d2tau_field = dtau_field.cov_deriv(ctx);
            d2tau = Some(d2tau_field.eval0());
            if orders >= 4 {
                let d3tau_field = d2tau_field.cov_deriv(ctx);
                d4tau = Some(d3tau_field.cov_deriv_origin());
            }
        }
    }

    let dphi_field = TensorField::scalar(ctx.phi().clone()).cov_deriv(ctx);
    let dphi = dphi_field.eval0();
    let mut hess_phi = None;
    let mut d3phi = None;
    if ctx.degree() >= 2 {
        let hess_field = dphi_field.cov_deriv(ctx);
        hess_phi = Some(hess_field.eval0());
        if ctx.degree() >= 3 {
            d3phi = Some(hess_field.cov_deriv_origin());
        }
    }

    Ok(CurvaturePackage {
        dim: ctx.dim(),
        r,
        dr,
        d2r,
        rho,
        drho,
        d2rho,
        tau,
        dtau,
        d2tau,
        d4tau,
        phi0: ctx.phi().eval0(),
        dphi,
        hess_phi,
        d3phi,
    })
}

/// Christoffel symbols as a rank-3 array of jets, `Gamma^k_{ij}` at
/// `[k * m^2 + i * m + j]`, exposed for cross-checks.
pub fn christoffel(jet: &MetricDilatonJet) -> Result<Vec<PolyJet>> {
    let ctx = GeometryCtx::new(jet)?;
    let m = jet.dim();
    let mut out = Vec::with_capacity(m * m * m);
    for k in 0..m {
        for i in 0..m {
            for j in 0..m {
                out.push(ctx.gamma(k, i, j).clone());
            }
        }
    }
    Ok(out)
}
