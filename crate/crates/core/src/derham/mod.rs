//! Exterior calculus on form-valued jets: the twisted operators, assembly of
//! the form Laplacians, and extraction of the canonical connection,
//! endomorphism, and bundle curvature with their covariant derivatives.

pub mod bundle;
pub mod forms;
pub mod operator;

pub use bundle::{bundle_curvature, bundle_curvature_and_derivs, BundleDerivs};
pub use forms::{
    apply_d, apply_d_phi, apply_d_phi_conjugated, apply_delta, apply_delta_phi,
    apply_delta_phi_conjugated, apply_delta_phi_with, apply_delta_with, form_basis,
    form_inner_product, interior_product, normalize_indices, wedge_one_form, DeltaCoeffs,
    FormField,
};
pub use operator::{
    apply_reassembled, build_twisted_laplacian, canonical_decomposition, laplacian_apply,
    verify_laplace_type, BundleData, FormOperator,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GeometryCtx, MetricDilatonJet};
    use crate::jet::PolyJet;
    use crate::rational::{int, rat, zero};

    fn ctx_of(jet: &MetricDilatonJet) -> GeometryCtx {
        GeometryCtx::new(jet).unwrap()
    }

    #[test]
    fn d_of_constant_function_vanishes() {
        let jet = MetricDilatonJet::flat(2, 4);
        let _ctx = ctx_of(&jet);
        let f = FormField::basis_section(2, 0, 0);
        assert!(apply_d(&f).is_zero());
    }

    #[test]
    fn d_squared_vanishes_on_random_fields() {
        let jet = MetricDilatonJet::random(3, 5, 41);
        let _ctx = ctx_of(&jet);
        for p in 0..=1 {
            let f = FormField::random(3, p, 5, 99 + p as u64);
            let dd = apply_d(&apply_d(&f));
            for c in dd.components() {
                assert!(c.truncated(3).is_zero());
            }
        }
    }

    #[test]
    fn flat_codifferential_sign() {
        // delta(x_1 dx^1) = -1 on flat space: the sign convention test.
        let jet = MetricDilatonJet::flat(2, 4);
        let ctx = ctx_of(&jet);
        let mut f = FormField::zero(2, 1, 4);
        f.set_component(0, PolyJet::coordinate(2, 0));
        let out = apply_delta(&ctx, &f);
        assert_eq!(
            out.component(0).truncated(4),
            PolyJet::constant(2, int(-1)).truncated(4)
        );
    }

    #[test]
    fn delta_squared_vanishes() {
        let jet = MetricDilatonJet::random(3, 5, 43);
        let ctx = ctx_of(&jet);
        let f = FormField::random(3, 2, 5, 17);
        let dd = apply_delta(&ctx, &apply_delta(&ctx, &f));
        for c in dd.components() {
            assert!(c.truncated(2).is_zero(), "delta^2 component {c:?}");
        }
    }

    #[test]
    fn green_identity_fixes_the_adjoint_convention() {
        // <d a, b> - <a, delta b> must be a covariant divergence pointwise;
        // this is the integration-by-parts statement made executable.
        let jet = MetricDilatonJet::random(2, 5, 57);
        let ctx = ctx_of(&jet);
        let p = 1;
        let a = FormField::random(2, p - 1, 5, 3);
        let b = FormField::random(2, p, 5, 4);
        let lhs = form_inner_product(&ctx, &apply_d(&a), &b);
        let mid = form_inner_product(&ctx, &a, &apply_delta(&ctx, &b));
        // W^nu = sum over increasing K of a_K b^{nu K}; build it lowered and
        // take the covariant divergence nabla_nu W^nu = g^{ns} (W_s)_{;n}.
        let m = 2;
        let basis_out = form_basis(m, p - 1);
        let basis_in = form_basis(m, p);
        let mut w_upper = vec![PolyJet::zero(m, 5); m];
        for nu in 0..m {
            let mut acc = PolyJet::zero(m, 5);
            for (k_t, ca) in basis_out.iter().zip(a.components()) {
                if ca.is_zero() {
                    continue;
                }
                for (l_t, cb) in basis_in.iter().zip(b.components()) {
                    if cb.is_zero() {
                        continue;
                    }
                    // b^{nu K} with the first slot raised: contract with
                    // inverse metric and the Gram determinant on the rest
                    for sigma in 0..m {
                        let mut full = vec![sigma];
                        full.extend_from_slice(k_t);
                        if let Some((sorted, sign)) = normalize_indices(&full) {
                            if &sorted == l_t {
                                let w = ctx.metric_inv().get(nu, sigma);
                                if w.is_zero() {
                                    continue;
                                }
                                let term = &(ca * cb) * w;
                                acc = if sign > 0 { &acc + &term } else { &acc - &term };
                            }
                        }
                    }
                }
            }
            w_upper[nu] = acc;
        }
        // divergence of the vector field: d_nu W^nu + Gamma^nu_{nu s} W^s
        let mut div = PolyJet::zero(m, 5);
        for nu in 0..m {
            div = &div + &w_upper[nu].dpartial(nu);
            for s in 0..m {
                let gam = ctx.gamma(nu, nu, s);
                if !gam.is_zero() {
                    div = &div + &(gam * &w_upper[s]);
                }
            }
        }
        let residual = (&(&lhs - &mid) - &div).truncated(3);
        assert!(residual.is_zero(), "green identity residual {residual:?}");
        // the inner product at p = 1 is not degenerate in this test
        assert!(!lhs.is_zero() || !mid.is_zero());
    }

    #[test]
    fn twisted_operators_match_their_conjugated_definitions() {
        let base = MetricDilatonJet::random(2, 5, 71);
        let phi = MetricDilatonJet::random(2, 5, 72).phi().clone();
        let jet = base.with_phi(phi);
        let ctx = ctx_of(&jet);
        for p in 0..=2 {
            let f = FormField::random(2, p, 5, 200 + p as u64);
            if p < 2 {
                let fast = apply_d_phi(&ctx, &f);
                let conj = apply_d_phi_conjugated(&ctx, &f);
                for (x, y) in fast.components().iter().zip(conj.components()) {
                    assert!((&(x.clone()) - y).truncated(3).is_zero());
                }
            }
            if p > 0 {
                let fast = apply_delta_phi(&ctx, &f);
                let conj = apply_delta_phi_conjugated(&ctx, &f);
                for (x, y) in fast.components().iter().zip(conj.components()) {
                    assert!((&(x.clone()) - y).truncated(3).is_zero());
                }
            }
        }
    }

    #[test]
    fn one_dimensional_twisted_derivative() {
        // phi = x: d_phi f = (f' + f) dx, checked on a random function jet.
        let phi = PolyJet::coordinate(1, 0).truncated(6);
        let jet = MetricDilatonJet::circle_with_dilaton(6, phi);
        let ctx = ctx_of(&jet);
        let mut f = FormField::zero(1, 0, 6);
        let func = MetricDilatonJet::random(1, 6, 5).phi().clone();
        f.set_component(0, func.clone());
        let out = apply_d_phi(&ctx, &f);
        let expect = &func.dpartial(0) + &func.truncated(5);
        assert_eq!(out.component(0), &expect);
    }

    #[test]
    fn twisted_d_squared_vanishes() {
        let jet = MetricDilatonJet::random(3, 5, 83);
        let ctx = ctx_of(&jet);
        let f = FormField::random(3, 0, 5, 31);
        let dd = apply_d_phi(&ctx, &apply_d_phi(&ctx, &f));
        for c in dd.components() {
            assert!(c.truncated(3).is_zero());
        }
    }

    #[test]
    fn flat_scalar_laplacian_has_no_lower_order_terms() {
        let jet = MetricDilatonJet::flat(2, 4);
        let ctx = ctx_of(&jet);
        let op = build_twisted_laplacian(&ctx, 0).unwrap();
        for k in 0..2 {
            assert!(op.a(k).is_zero());
        }
        assert!(op.b().is_zero());
        let bd = canonical_decomposition(&ctx, &op);
        assert!(bd.e.is_zero());
        for w in &bd.omega {
            assert!(w.is_zero());
        }
    }

    #[test]
    fn one_dimensional_twisted_scalar_laplacian() {
        // phi = x on the line: Delta_phi^0 = -d^2/dx^2 + 1, so E = -1.
        let phi = PolyJet::coordinate(1, 0).truncated(6);
        let jet = MetricDilatonJet::circle_with_dilaton(6, phi);
        let ctx = ctx_of(&jet);
        let op = build_twisted_laplacian(&ctx, 0).unwrap();
        assert!(op.a(0).truncated(4).is_zero());
        assert_eq!(op.b().get(0, 0).truncated(4), PolyJet::one(1).truncated(4));
        let bd = canonical_decomposition(&ctx, &op);
        assert_eq!(
            bd.e.get(0, 0).truncated(4),
            PolyJet::constant(1, int(-1)).truncated(4)
        );
        assert!(bd.omega[0].truncated(4).is_zero());
    }

    #[test]
    fn flat_one_form_laplacian_is_componentwise() {
        let jet = MetricDilatonJet::flat(2, 4);
        let ctx = ctx_of(&jet);
        let op = build_twisted_laplacian(&ctx, 1).unwrap();
        for k in 0..2 {
            assert!(op.a(k).is_zero());
        }
        assert!(op.b().is_zero());
    }

    #[test]
    fn operators_are_laplace_type() {
        let jet = MetricDilatonJet::random(2, 5, 91);
        let ctx = ctx_of(&jet);
        for p in 0..=2 {
            let op = build_twisted_laplacian(&ctx, p).unwrap();
            verify_laplace_type(&ctx, &op).unwrap();
        }
    }

    #[test]
    fn operator_apply_matches_direct_composition() {
        let jet = MetricDilatonJet::random(2, 5, 95);
        let ctx = ctx_of(&jet);
        let coeffs = DeltaCoeffs::new(&ctx);
        for p in 0..=2 {
            let op = build_twisted_laplacian(&ctx, p).unwrap();
            let f = FormField::random(2, p, 5, 301 + p as u64);
            let via_op = op.apply(&ctx, &f);
            let direct = laplacian_apply(&coeffs, &ctx, &f);
            for (x, y) in via_op.components().iter().zip(direct.components()) {
                assert!(
                    (&(x.clone()) - y).truncated(2).is_zero(),
                    "operator coefficients disagree with composition at p={p}"
                );
            }
        }
    }

    #[test]
    fn reassembly_oracle() {
        // -(Tr nabla^2 + E) rebuilt from the decomposition reproduces the
        // operator on monomial sections.
        let jet = MetricDilatonJet::random(2, 5, 97);
        let ctx = ctx_of(&jet);
        for p in 0..=2 {
            let op = build_twisted_laplacian(&ctx, p).unwrap();
            let bd = canonical_decomposition(&ctx, &op);
            let n = op.basis_size();
            for alpha in 0..n {
                for expo in [vec![0u32, 0], vec![1, 0], vec![0, 2], vec![1, 1]] {
                    let section = FormField::monomial_section(2, p, alpha, &expo);
                    let direct = op.apply(&ctx, &section);
                    let rebuilt = apply_reassembled(&ctx, &bd, &section);
                    for (x, y) in direct.components().iter().zip(rebuilt.components()) {
                        assert!(
                            (&(x.clone()) - y).truncated(2).is_zero(),
                            "reassembly mismatch p={p} alpha={alpha}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn supersymmetry_intertwines_laplacians() {
        // Delta^{p+1} d_phi = d_phi Delta^p on random fields.
        let jet = MetricDilatonJet::random(2, 5, 101);
        let ctx = ctx_of(&jet);
        let coeffs = DeltaCoeffs::new(&ctx);
        for p in 0..=1 {
            let f = FormField::random(2, p, 5, 401 + p as u64);
            let lhs = laplacian_apply(&coeffs, &ctx, &apply_d_phi(&ctx, &f));
            let rhs = apply_d_phi(&ctx, &laplacian_apply(&coeffs, &ctx, &f));
            for (x, y) in lhs.components().iter().zip(rhs.components()) {
                assert!((&(x.clone()) - y).truncated(2).is_zero());
            }
        }
    }

    #[test]
    fn scalar_bundle_curvature_vanishes() {
        // p = 0 twisted bundle is a line bundle with flat canonical
        // connection.
        let jet = MetricDilatonJet::random(2, 5, 103);
        let ctx = ctx_of(&jet);
        let op = build_twisted_laplacian(&ctx, 0).unwrap();
        let bd = canonical_decomposition(&ctx, &op);
        let omega = bundle_curvature(&ctx, &bd);
        for w in &omega {
            assert!(w.truncated(2).is_zero());
        }
    }

    #[test]
    fn bundle_curvature_is_antisymmetric_and_consistent() {
        let jet = MetricDilatonJet::random(2, 5, 107);
        let ctx = ctx_of(&jet);
        let op = build_twisted_laplacian(&ctx, 1).unwrap();
        let bd = canonical_decomposition(&ctx, &op);
        let omega = bundle_curvature(&ctx, &bd);
        let m = 2;
        for i in 0..m {
            for j in 0..m {
                let sum = omega[i * m + j].add(&omega[j * m + i]);
                assert!(sum.is_zero());
            }
        }
        // recompute from the definition at a lower truncation
        for i in 0..m {
            for j in 0..m {
                let direct = bd.omega[j]
                    .dpartial(i)
                    .sub(&bd.omega[i].dpartial(j))
                    .add(&bd.omega[i].commutator(&bd.omega[j]));
                let diff = direct.sub(&omega[i * m + j]);
                assert!(diff.is_zero());
            }
        }
    }

    #[test]
    fn flat_untwisted_bundle_data_is_trivial() {
        let jet = MetricDilatonJet::flat(3, 4);
        let ctx = ctx_of(&jet);
        for p in 0..=3 {
            let op = build_twisted_laplacian(&ctx, p).unwrap();
            let bd = canonical_decomposition(&ctx, &op);
            let derivs = bundle_curvature_and_derivs(&ctx, &bd, 4).unwrap();
            assert!(derivs.e0.is_zero());
            for w in derivs.omega0.as_ref().unwrap() {
                assert!(w.is_zero());
            }
            for w in derivs.hess_e.as_ref().unwrap() {
                assert!(w.is_zero());
            }
        }
    }

    #[test]
    fn form_degree_out_of_range_is_rejected() {
        let jet = MetricDilatonJet::flat(2, 4);
        let ctx = ctx_of(&jet);
        assert!(matches!(
            build_twisted_laplacian(&ctx, 3),
            Err(crate::error::CoreError::FormDegree { .. })
        ));
    }

    #[test]
    fn circle_dilaton_first_order_coefficients_cancel() {
        // On the line the twisted scalar Laplacian is -d^2 + (phi'^2 - phi''),
        // with no drift term, for a generic dilaton.
        let phi = MetricDilatonJet::random(1, 6, 13).phi().clone();
        let jet = MetricDilatonJet::circle_with_dilaton(6, phi.clone());
        let ctx = ctx_of(&jet);
        let op = build_twisted_laplacian(&ctx, 0).unwrap();
        assert!(op.a(0).truncated(4).is_zero());
        let dphi = phi.dpartial(0);
        let expect = &(&dphi * &dphi) - &phi.dpartial(0).dpartial(0);
        assert!((&(op.b().get(0, 0).clone()) - &expect)
            .truncated(4)
            .is_zero());
        let bd = canonical_decomposition(&ctx, &op);
        let e = bd.e.get(0, 0);
        assert!((&(e.clone()) + &expect).truncated(4).is_zero());
        // rat is used by other tests in this module
        let _ = rat(1, 2);
        let _ = zero();
    }
}
