use super::*;
use crate::catalog::{catalog_entry, CatalogParams};
use crate::coeffs::{CoefficientExpr as E, ProblemSpec, Side, SideProfile};
use crate::error::Error;

fn fast() -> ClassifyConfig {
    ClassifyConfig { cross_check: false, ..Default::default() }
}

fn cat(name: &str, p: CatalogParams) -> ProblemSpec {
    catalog_entry(name, &p).unwrap().problem.unwrap()
}

fn log_weights(ap: f64, am: f64) -> ProblemSpec {
    cat("log-weights", CatalogParams { alpha_plus: Some(ap), alpha_minus: Some(am), ..Default::default() })
}

fn log_weights_half(ap: f64, am: f64, bp: f64, bm: f64) -> ProblemSpec {
    cat("log-weights-half", CatalogParams { alpha_plus: Some(ap), alpha_minus: Some(am), b_plus: Some(bp), b_minus: Some(bm), ..Default::default() })
}

fn profiles(p: &ProblemSpec) -> (SideProfile, SideProfile) {
    (SideProfile::new(p, Side::Plus, Default::default()).unwrap(), SideProfile::new(p, Side::Minus, Default::default()).unwrap())
}

#[test]
fn q_trace_equal_indices_is_all_markers() {
    let p = log_weights(0.7, 0.7);
    let (a, b) = profiles(&p);
    let q = q_ratio_trace(&a, &b, &q_grid(&a, &b, 40));
    assert!(q.q.iter().all(|v| *v == f64::INFINITY));
    assert_eq!(q.verdict.status, Status::Fails);
}

#[test]
fn q_trace_matches_closed_form() {
    let p = log_weights(0.5, 1.0);
    let (a, b) = profiles(&p);
    let xs = q_grid(&a, &b, 60);
    let q = q_ratio_trace(&a, &b, &xs);
    for (x, v) in xs.iter().zip(&q.q) {
        let exact = 1.0 / (1.0 - (-x.ln()).powf(-0.5));
        assert!((v - exact).abs() < 1e-9 * exact, "{x} {v} {exact}");
    }
    assert_eq!(q.verdict.status, Status::Holds);
}

#[test]
fn q_trace_sign_weight_is_all_markers() {
    let p = cat("sgn", CatalogParams::default());
    let (a, b) = profiles(&p);
    let q = q_ratio_trace(&a, &b, &q_grid(&a, &b, 20));
    assert!(q.q.iter().all(|v| *v == f64::INFINITY));
}

#[test]
fn infinity_routes() {
    let cfg = fast();
    let s = regularity_at_infinity(&cat("sgn", CatalogParams::default()), &cfg).unwrap();
    assert_eq!((s.route, s.status.status), (RouteTag::PositivelyIncreasing, Status::Holds));
    let s = regularity_at_infinity(&log_weights(0.5, 1.0), &cfg).unwrap();
    assert_eq!((s.route, s.status.status), (RouteTag::SlowlyVaryingQ, Status::Holds));
    let s = regularity_at_infinity(&log_weights(0.5, 0.5), &cfg).unwrap();
    assert_eq!((s.route, s.status.status), (RouteTag::SlowlyVaryingQ, Status::Fails));
}

#[test]
fn zero_cases() {
    let cfg = fast();
    let v = regularity_at_zero(&log_weights(0.5, 1.0), &cfg).unwrap();
    assert_eq!((v.route, v.status.status, v.kernel_equal), (RouteTag::Zero(ZeroCase::Ii), Status::Holds, Some(true)));
    let v = regularity_at_zero(&cat("sgn", CatalogParams::default()), &cfg).unwrap();
    assert_eq!((v.route, v.status.status, v.kernel_equal), (RouteTag::Zero(ZeroCase::A), Status::Fails, Some(false)));
    assert_eq!(v.kernel_sum, Some(0.0));
    assert_eq!((v.a_plus, v.a_minus), (Some(1.0), Some(-1.0)));
    let c = CatalogParams { alpha: Some(3.0), beta: Some(2.0), ..Default::default() };
    let v = regularity_at_zero(&cat("unit-reflection", c), &cfg).unwrap();
    assert_eq!((v.route, v.status.status), (RouteTag::Zero(ZeroCase::Iv), Status::Holds));
    // (1 - α/β) W+(b+)
    assert!((v.kernel_sum.unwrap() + 0.5).abs() < 1e-14);
    let v = regularity_at_zero(&log_weights_half(0.5, 1.0, 1.0, -0.5), &cfg).unwrap();
    assert_eq!(v.route, RouteTag::Zero(ZeroCase::Iii));
    let v = regularity_at_zero(&cat("half-line", CatalogParams::default()), &cfg).unwrap();
    assert_eq!((v.route, v.status.status), (RouteTag::Zero(ZeroCase::I), Status::Holds));
}

#[test]
fn zero_case_i_on_the_line() {
    // w, r not integrable on either side; W∘R^{-1} = 2√x is positively increasing at infinity
    let r = E::constant(1.0);
    let w = E::term(1.0, -0.5, 0.0);
    let p = ProblemSpec::new("sqrt", f64::NEG_INFINITY, f64::INFINITY, w.clone(), r.clone(), w, r).unwrap();
    let v = regularity_at_zero(&p, &fast()).unwrap();
    assert_eq!((v.route, v.status.status), (RouteTag::Zero(ZeroCase::I), Status::Holds));
}

#[test]
fn critical_zero_for_log_weights() {
    let cfg = fast();
    for (ap, am, want) in [(2.0, 3.0, Status::Holds), (0.5, 2.0, Status::Fails), (0.5, 1.0, Status::Fails)] {
        let v = regularity_at_zero(&log_weights(ap, am), &cfg).unwrap();
        assert_eq!(v.critical, want, "{ap} {am}");
    }
}

#[test]
fn discreteness_diagnostics() {
    let cfg = fast();
    let d = discreteness(&log_weights(0.5, 0.5), &cfg).unwrap();
    assert_eq!(d.sides[0].form, DiscretenessForm::WTimesRTail);
    assert_eq!(d.status, Status::Holds);
    let last = d.sides[0].limit.evidence.last().unwrap().1;
    assert!(last < 1e-3, "{last}");
    // oracle: (1-x)/(-ln x)^{α}
    for &(delta, v) in &d.sides[0].limit.evidence {
        let x: f64 = 1.0 - delta;
        let exact = delta / (-(-delta).ln_1p()).powf(0.5);
        assert!((v - exact).abs() < 1e-8 * exact, "{x} {v} {exact}");
    }
    let d = discreteness(&log_weights(2.0, 0.5), &cfg).unwrap();
    assert_eq!(d.sides[0].limit.status, Status::Fails);
    assert_eq!(d.sides[0].sup.status, Status::Fails);
    assert!(d.sides[0].limit.evidence.last().unwrap().1 > 1e3);
    assert_eq!(d.status, Status::Fails);
    let d = discreteness(&cat("sgn", CatalogParams::default()), &cfg).unwrap();
    assert_eq!(d.status, Status::Holds);
}

#[test]
fn kernel_values() {
    let cfg = fast();
    let k = kernel_condition(&cat("sgn", CatalogParams::default()), &cfg).unwrap();
    assert_eq!((k.sum, k.status), (0.0, Status::Fails));
    let (ap, am, bp, bm) = (1.0, 2.0, 0.5, -0.3f64);
    let k = kernel_condition(&log_weights_half(ap, am, bp, bm), &cfg).unwrap();
    let exact = 1.0 / (-bp.ln()).powf(ap) - 1.0 / (-(-bm).ln()).powf(am);
    assert!((k.sum - exact).abs() < 1e-12);
    assert!(matches!(kernel_condition(&log_weights(0.5, 0.5), &cfg), Err(Error::NotApplicable(_))));
}

#[test]
fn moment_identity() {
    let cfg = fast();
    let one = E::constant(1.0);
    for (w, exact) in [(E::constant(1.0), 0.5), (E::term(1.0, -0.5, 0.0), 2.0 / 3.0), (E::term(1.0, 1.0, 0.0), 1.0 / 3.0)] {
        let p = ProblemSpec::new("k", -1.0, 1.0, w.clone(), one.clone(), w, one.clone()).unwrap();
        let m = kac_krein_identity_check(&p, Side::Plus, &cfg).unwrap();
        assert_eq!(m.status, Status::Holds);
        assert!((m.r_moment.unwrap() - exact).abs() < 1e-9, "{m:?}");
        assert!((m.w_moment.unwrap() - exact).abs() < 1e-9, "{m:?}");
    }
    let p = ProblemSpec::new("k", -1.0, 1.0, E::term(1.0, 2.5, 0.0), one.clone(), one.clone(), one.clone()).unwrap();
    let m = kac_krein_identity_check(&p, Side::Plus, &cfg).unwrap();
    assert!((m.r_moment.unwrap() - 1.0 / 4.5).abs() < 1e-9);
    assert!(matches!(kac_krein_identity_check(&log_weights(0.5, 0.5), Side::Plus, &cfg), Err(Error::NotApplicable(_))));
}

#[test]
fn similarity_table() {
    let cfg = fast();
    let cases = [
        (log_weights(0.5, 1.0), Status::Holds),
        (log_weights(0.5, 0.5), Status::Fails),
        (log_weights_half(1.0, 1.0, 0.5, -0.5), Status::Fails),
        (log_weights_half(1.0, 2.0, 0.5, -0.5), Status::Holds),
        (cat("sgn", CatalogParams::default()), Status::Fails),
    ];
    for (p, want) in cases {
        let r = similarity_and_riesz(&p, &cfg).unwrap();
        assert_eq!(r.similarity.status, want, "{} {:?}", p.name, r.similarity);
    }
    // ratio ln|ln|b-|| / ln|ln b+| makes the kernel sum vanish
    let (bp, bm) = (0.2f64, -0.1f64);
    let ratio = (-(-bm).ln()).ln() / (-bp.ln()).ln();
    let r = similarity_and_riesz(&log_weights_half(ratio, 1.0, bp, bm), &cfg).unwrap();
    assert_eq!(r.similarity.status, Status::Fails);
    assert_eq!(r.zero.critical, Status::Holds);
    let r = similarity_and_riesz(&log_weights(0.3, 0.6), &cfg).unwrap();
    assert_eq!(r.riesz.status, Status::Holds);
    let r = similarity_and_riesz(&log_weights(0.6, 0.6), &cfg).unwrap();
    assert_eq!(r.riesz.status, Status::Fails);
}

#[test]
fn d_ratio_for_sign_weight_is_bounded() {
    let cfg = ClassifyConfig { d_grid: (1e2, 1e6, 9), ..Default::default() };
    let d = d_infinity(&cat("sgn", CatalogParams::default()), &cfg).unwrap();
    assert_eq!(d.precondition, Status::Holds);
    assert_eq!(d.verdict.status, Status::Holds);
    for &(_, r) in &d.ratios {
        assert!((r - 0.5).abs() < 1e-3, "{r}");
    }
    assert_eq!(d.one_sided[0].status, Status::Holds);
}
