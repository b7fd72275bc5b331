//! The twisted form Laplacian as an explicit Laplace-type operator, and its
//! canonical connection / endomorphism decomposition.

use crate::error::{CoreError, Result};
use crate::geometry::GeometryCtx;
use crate::jet::{PolyJet, EXACT};
use crate::matjet::MatJet;
use crate::rational::{int, rat};

use super::forms::{apply_d_phi, apply_delta_phi_with, form_basis, DeltaCoeffs, FormField};

/// A second-order operator on `p`-forms with scalar leading symbol:
/// `D u = -g^{ij} d_i d_j u + A^k d_k u + B u` over the increasing-tuple
/// basis (matrices act on component columns).
#[derive(Clone, Debug)]
pub struct FormOperator {
    m: usize,
    p: usize,
    /// First-order coefficients, one `b x b` matrix of jets per coordinate.
    a: Vec<MatJet>,
    /// Zeroth-order coefficient.
    b: MatJet,
}

impl FormOperator {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn basis_size(&self) -> usize {
        self.b.n()
    }

    pub fn a(&self, k: usize) -> &MatJet {
        &self.a[k]
    }

    pub fn b(&self) -> &MatJet {
        &self.b
    }

    /// Apply through the explicit coefficients.
    pub fn apply(&self, ctx: &GeometryCtx, u: &FormField) -> FormField {
        let m = self.m;
        let n = self.basis_size();
        let g_inv = ctx.metric_inv();
        let mut out = FormField::zero(m, self.p, EXACT);
        for beta in 0..n {
            let mut acc = PolyJet::zero(m, EXACT);
            for alpha in 0..n {
                let comp = u.component(alpha);
                if comp.is_zero() {
                    continue;
                }
                if alpha == beta {
                    for i in 0..m {
                        for j in 0..m {
                            let w = g_inv.get(i, j);
                            if w.is_zero() {
                                continue;
                            }
                            acc = &acc - &(w * &comp.dpartial(i).dpartial(j));
                        }
                    }
                }
                for k in 0..m {
                    let a = self.a[k].get(beta, alpha);
                    if !a.is_zero() {
                        acc = &acc + &(a * &comp.dpartial(k));
                    }
                }
                let b = self.b.get(beta, alpha);
                if !b.is_zero() {
                    acc = &acc + &(b * comp);
                }
            }
            out.set_component(beta, acc);
        }
        out
    }
}

/// Apply the twisted Laplacian `d_phi delta_phi + delta_phi d_phi` directly
/// through the first-order operators.
pub fn laplacian_apply(coeffs: &DeltaCoeffs, ctx: &GeometryCtx, u: &FormField) -> FormField {
    let m = ctx.dim();
    let p = u.p();
    let mut out = FormField::zero(m, p, EXACT);
    if p < m {
        out = out.add(&apply_delta_phi_with(coeffs, ctx, &apply_d_phi(ctx, u)));
    }
    if p > 0 {
        out = out.add(&apply_d_phi(ctx, &apply_delta_phi_with(coeffs, ctx, u)));
    }
    out
}

/// Assemble the twisted Laplacian on `p`-forms into explicit `(A^k, B)`
/// coefficients by applying it to constant and linear monomial sections.
pub fn build_twisted_laplacian(ctx: &GeometryCtx, p: usize) -> Result<FormOperator> {
    let m = ctx.dim();
    if p > m {
        return Err(CoreError::FormDegree { p, m });
    }
    let coeffs = DeltaCoeffs::new(ctx);
    let n = form_basis(m, p).len();
    let mut b = MatJet::zeros(n, m, EXACT);
    let mut a = vec![MatJet::zeros(n, m, EXACT); m];
    let mut images_const = Vec::with_capacity(n);
    for alpha in 0..n {
        // D(e_alpha) is the B column
        let im = laplacian_apply(&coeffs, ctx, &FormField::basis_section(m, p, alpha));
        for beta in 0..n {
            b.set(beta, alpha, im.component(beta).clone());
        }
        images_const.push(im);
    }
    for alpha in 0..n {
        for k in 0..m {
            // D(x_k e_alpha) - x_k D(e_alpha) is the A^k column
            let mut expo = vec![0u32; m];
            expo[k] = 1;
            let section = FormField::monomial_section(m, p, alpha, &expo);
            let im = laplacian_apply(&coeffs, ctx, &section);
            let xk = PolyJet::coordinate(m, k);
            let shifted = images_const[alpha].scale_jet(&xk);
            let col = im.sub(&shifted);
            for beta in 0..n {
                a[k].set(beta, alpha, col.component(beta).clone());
            }
        }
    }
    Ok(FormOperator { m, p, a, b })
}

/// Check the Laplace-type condition: extracting the second-order coefficient
/// on quadratic monomial sections must reproduce `g^{ij}` times the
/// identity.
pub fn verify_laplace_type(ctx: &GeometryCtx, op: &FormOperator) -> Result<()> {
    let m = ctx.dim();
    let p = op.p;
    let n = op.basis_size();
    let coeffs = DeltaCoeffs::new(ctx);
    let check_degree = if ctx.degree() >= 2 {
        ctx.degree() - 2
    } else {
        0
    };
    for alpha in 0..n {
        let e = FormField::basis_section(m, p, alpha);
        let de = laplacian_apply(&coeffs, ctx, &e);
        let mut linear = Vec::with_capacity(m);
        for k in 0..m {
            let mut expo = vec![0u32; m];
            expo[k] = 1;
            linear.push(laplacian_apply(
                &coeffs,
                ctx,
                &FormField::monomial_section(m, p, alpha, &expo),
            ));
        }
        for i in 0..m {
            for j in i..m {
                let mut expo = vec![0u32; m];
                expo[i] += 1;
                expo[j] += 1;
                let quad = laplacian_apply(
                    &coeffs,
                    ctx,
                    &FormField::monomial_section(m, p, alpha, &expo),
                );
                let xi = PolyJet::coordinate(m, i);
                let xj = PolyJet::coordinate(m, j);
                // D(x_i x_j e) - x_i D(x_j e) - x_j D(x_i e) + x_i x_j D(e)
                let extracted = quad
                    .sub(&linear[j].scale_jet(&xi))
                    .sub(&linear[i].scale_jet(&xj))
                    .add(&de.scale_jet(&(&xi * &xj)));
                // must equal -2 g^{ij} e_alpha
                let target = ctx.metric_inv().get(i, j).scale(&int(-2));
                for beta in 0..n {
                    let want = if beta == alpha {
                        target.clone()
                    } else {
                        PolyJet::zero(m, EXACT)
                    };
                    let diff =
                        (&(extracted.component(beta).clone()) - &want).truncated(check_degree);
                    if !diff.is_zero() {
                        return Err(CoreError::NotLaplaceType);
                    }
                }
            }
        }
    }
    Ok(())
}

/// The canonical connection and endomorphism of a Laplace-type operator.
#[derive(Clone, Debug)]
pub struct BundleData {
    pub p: usize,
    /// Connection one-form matrices `omega_k`.
    pub omega: Vec<MatJet>,
    /// Endomorphism `E` as a matrix of jets.
    pub e: MatJet,
}

/// Solve `D = -(Tr nabla^2 + E)` for the connection and endomorphism:
/// matching first-order terms gives
/// `omega_j = 1/2 g_{jk} (g^{il} Gamma^k_{il} Id - A^k)` and matching
/// zeroth-order terms gives
/// `E = -B - g^{ij} (d_i omega_j + omega_i omega_j - Gamma^k_{ij} omega_k)`.
/// The reassembly oracle in the test suite validates this reconstruction on
/// monomial sections.
pub fn canonical_decomposition(ctx: &GeometryCtx, op: &FormOperator) -> BundleData {
    let m = ctx.dim();
    let n = op.basis_size();
    let g = ctx.metric();
    let g_inv = ctx.metric_inv();
    // id-proportional first-order term of the plain connection Laplacian
    let mut gamma_trace = vec![PolyJet::zero(m, EXACT); m];
    for k in 0..m {
        for i in 0..m {
            for l in 0..m {
                let w = g_inv.get(i, l);
                if w.is_zero() {
                    continue;
                }
                let gam = ctx.gamma(k, i, l);
                if !gam.is_zero() {
                    gamma_trace[k] = &gamma_trace[k] + &(w * gam);
                }
            }
        }
    }
    let mut omega = Vec::with_capacity(m);
    for j in 0..m {
        let mut acc = MatJet::zeros(n, m, EXACT);
        for k in 0..m {
            let gjk = g.get(j, k);
            if gjk.is_zero() {
                continue;
            }
            let inner = MatJet::scalar(n, &gamma_trace[k]).sub(op.a(k));
            acc = acc.add(&inner.scale_jet(gjk));
        }
        omega.push(acc.scale(&rat(1, 2)));
    }
    // E = -B - g^{ij} (d_i omega_j + omega_i omega_j - Gamma^k_{ij} omega_k)
    let mut e = op.b().neg();
    for i in 0..m {
        for j in 0..m {
            let w = g_inv.get(i, j);
            if w.is_zero() {
                continue;
            }
            let mut inner = omega[j].dpartial(i).add(&omega[i].mul(&omega[j]));
            for k in 0..m {
                let gam = ctx.gamma(k, i, j);
                if !gam.is_zero() {
                    inner = inner.sub(&omega[k].scale_jet(gam));
                }
            }
            e = e.sub(&inner.scale_jet(w));
        }
    }
    BundleData { p: op.p, omega, e }
}

/// Apply the reconstructed operator `-(g^{ij}(nabla_i nabla_j - Gamma^k_{ij}
/// nabla_k) + E)` to a section; the defining-property oracle.
pub fn apply_reassembled(ctx: &GeometryCtx, bd: &BundleData, u: &FormField) -> FormField {
    let m = ctx.dim();
    let n = bd.e.n();
    // nabla_k u = d_k u + omega_k u, componentwise over the basis
    let nabla = |k: usize, f: &FormField| -> FormField {
        let mut out = FormField::zero(m, bd.p, EXACT);
        for beta in 0..n {
            let mut acc = f.component(beta).dpartial(k);
            for alpha in 0..n {
                let w = bd.omega[k].get(beta, alpha);
                if w.is_zero() || f.component(alpha).is_zero() {
                    continue;
                }
                acc = &acc + &(w * f.component(alpha));
            }
            out.set_component(beta, acc);
        }
        out
    };
    let firsts: Vec<FormField> = (0..m).map(|k| nabla(k, u)).collect();
    let mut out = FormField::zero(m, bd.p, EXACT);
    for i in 0..m {
        for j in 0..m {
            let w = ctx.metric_inv().get(i, j);
            if w.is_zero() {
                continue;
            }
            let mut second = nabla(i, &firsts[j]);
            for k in 0..m {
                let gam = ctx.gamma(k, i, j);
                if gam.is_zero() {
                    continue;
                }
                for beta in 0..n {
                    let v = second.component(beta) - &(gam * firsts[k].component(beta));
                    second.set_component(beta, v);
                }
            }
            out = out.add(&second.scale_jet(w));
        }
    }
    // add E u and negate
    for beta in 0..n {
        let mut acc = -out.component(beta);
        for alpha in 0..n {
            let w = bd.e.get(beta, alpha);
            if w.is_zero() || u.component(alpha).is_zero() {
                continue;
            }
            acc = &acc - &(w * u.component(alpha));
        }
        out.set_component(beta, acc);
    }
    out
}
