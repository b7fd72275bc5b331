//! Cross-module dual-pipeline checks at single-jet scale. The acceptance
//! suite in the driver crate runs the full trial counts; these pin each
//! identity once so a regression localizes quickly.

use supertrace_core::contraction::{chain_factors, ContractionPattern};
use supertrace_core::geometry::GeometryCtx;
use supertrace_core::geometry::MetricDilatonJet;
use supertrace_core::heatcoeff::{product_check, supertrace};
use supertrace_core::invariants::{
    codifferential_of_field, covariant_laplacian_at_origin, even_divergence_density,
    odd_divergence_density, pfaffian_density, restriction_kernel_check, xi_theta_eval,
    InvariantFieldCtx, OneFormInvariant, OneFormInvariantField, ROLE_RIEM,
};
use supertrace_core::jet::PolyJet;
use supertrace_core::rational::{int, rat, zero};

#[test]
fn gauss_bonnet_density_on_a_random_surface() {
    let jet = MetricDilatonJet::random(2, 4, 501);
    assert_eq!(
        supertrace(2, &jet).unwrap().value,
        pfaffian_density(&jet).unwrap().value
    );
}

#[test]
fn four_sphere_density_through_both_pipelines() {
    // the round four-sphere has constant normalized density 12, matching
    // chi = 2 against the rational volume ratio 1/6
    let jet = MetricDilatonJet::unit_sphere(4, 4);
    assert_eq!(pfaffian_density(&jet).unwrap().value, int(12));
    assert_eq!(supertrace(4, &jet).unwrap().value, int(12));
}

#[test]
fn odd_divergence_at_dimension_one_matches_the_circle_value() {
    // the two closed formulas agree on the line: both reduce to 2 phi''
    let phi = PolyJet::from_terms(1, 4, vec![(vec![2], rat(-4, 3)), (vec![4], rat(1, 5))]);
    let jet = MetricDilatonJet::circle_with_dilaton(4, phi);
    let st = supertrace(2, &jet).unwrap().value;
    let od = odd_divergence_density(&jet).unwrap().value;
    assert_eq!(st, od);
    // phi''(0) = -8/3, doubled by the circle identity
    assert_eq!(st, rat(-16, 3));
}

#[test]
fn odd_divergence_in_dimension_three() {
    let jet = MetricDilatonJet::random_with_density(3, 4, 503, 60);
    assert_eq!(
        supertrace(4, &jet).unwrap().value,
        odd_divergence_density(&jet).unwrap().value
    );
}

#[test]
fn main_divergence_identity_on_a_random_surface() {
    let jet = MetricDilatonJet::random(2, 4, 505);
    assert!(!jet.phi().is_zero());
    let st = supertrace(4, &jet).unwrap().value;
    let ed = even_divergence_density(&jet).unwrap().value;
    assert_eq!(st, ed);
    assert_ne!(st, zero(), "random surface should have nonzero density");
}

#[test]
fn product_of_sphere_and_torus_factor() {
    // sphere times dilaton circle: decoupling at order four
    let sphere = MetricDilatonJet::unit_sphere(2, 4);
    let phi = PolyJet::from_terms(1, 4, vec![(vec![2], int(1))]);
    let circle = MetricDilatonJet::circle_with_dilaton(4, phi);
    let check = product_check(&sphere, &circle, 4).unwrap();
    assert!(check.is_equal(), "discrepancy {:?}", check.discrepancy());
    // order four splits as (sphere density 2) times (circle value
    // 2 phi'' = 4)
    assert_eq!(check.lhs, int(8));
}

#[test]
fn sphere_squared_pfaffian_is_the_product_of_factors() {
    // decoupling as the independent oracle for the product sphere: each
    // factor contributes 2
    let s2 = MetricDilatonJet::unit_sphere(2, 4);
    let prod = MetricDilatonJet::product(&s2, &s2);
    assert_eq!(pfaffian_density(&prod).unwrap().value, int(4));
    let check = product_check(&s2, &s2, 4).unwrap();
    assert!(check.is_equal());
    assert_eq!(check.lhs, int(4));
}

#[test]
fn restriction_kernel_through_the_operator_pipeline() {
    // one full-pipeline kernel check: the order-four supertrace of a
    // surface extension also vanishes
    let n1 = MetricDilatonJet::random(1, 4, 507);
    let check = restriction_kernel_check(&n1, true).unwrap();
    assert!(check.passes(), "{check:?}");
    assert_eq!(check.supertrace.unwrap(), zero());
}

#[test]
fn divergence_route_matches_codifferential_route() {
    // the divergence notation and the codifferential differ by a sign on
    // one-forms; assembling the order-four density from codifferentials of
    // the one-form fields must reproduce the direct route exactly
    let jet = MetricDilatonJet::random(2, 4, 509);
    let ctx = GeometryCtx::new(&jet).unwrap();
    let fields = InvariantFieldCtx::new(&ctx).unwrap();
    let m = 2usize;
    let mbar = 1i64;

    let xi1 = xi_theta_eval(OneFormInvariant::Xi1, 0, &jet).unwrap();
    let xi3 = xi_theta_eval(OneFormInvariant::Xi3, 0, &jet).unwrap();
    let chain = ContractionPattern::scalar(m, chain_factors(ROLE_RIEM, 1, m).unwrap());
    let chain_field = fields.eval_scalar_field(&chain);
    let lap = covariant_laplacian_at_origin(&ctx, &chain_field);

    let delta1 = codifferential_of_field(&xi1, &jet).unwrap();
    let delta3 = codifferential_of_field(&xi3, &jet).unwrap();
    // prefactor 1/(2^mbar mbar!) = 1/2 in dimension two
    let combo = (int(-4 * mbar) * delta1 + rat(1, 12) * lap + rat(-mbar, 6) * delta3) * rat(1, 2);
    assert_eq!(combo, even_divergence_density(&jet).unwrap().value);
}

#[test]
fn invariant_fields_follow_the_one_form_type() {
    // xi/theta evaluation yields m polynomial components
    let jet = MetricDilatonJet::random(2, 4, 511);
    let f: OneFormInvariantField = xi_theta_eval(OneFormInvariant::Xi5, 1, &jet).unwrap();
    assert_eq!(f.comps.len(), 2);
    assert_eq!(f.weight, 3);
}
