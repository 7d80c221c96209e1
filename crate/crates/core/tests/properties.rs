use num_complex::Complex64 as C;
use proptest::prelude::*;

use polarsl::catalog::{catalog_entry, CatalogParams, CATALOG};
use polarsl::classify::{kernel_condition, regularity_at_zero, ClassifyConfig};
use polarsl::coeffs::{CoefficientExpr as E, ProblemSpec, Pt, Side, SideProfile};
use polarsl::eigen::{eigenvalues, kernel_analysis, EigenConfig};
use polarsl::karamata::{
    staircase_phi, catalog_function, is_positively_increasing, is_slowly_varying, resolve_function, rv_index_estimate, GridPolicy, Handle, Regime, Status,
    CATALOG_FUNCTIONS,
};
use polarsl::quad::QuadConfig;
use polarsl::report::analyze;
use polarsl::weyl::{SideSolver, WeylConfig};

fn log_weights_half(ap: f64, am: f64, bp: f64, bm: f64) -> ProblemSpec {
    let p = CatalogParams { alpha_plus: Some(ap), alpha_minus: Some(am), b_plus: Some(bp), b_minus: Some(bm), ..Default::default() };
    catalog_entry("log-weights-half", &p).unwrap().problem.unwrap()
}

fn fast() -> ClassifyConfig {
    ClassifyConfig { cross_check: false, ..Default::default() }
}

fn light() -> ProptestConfig {
    ProptestConfig { cases: 24, ..ProptestConfig::default() }
}

fn heavy() -> ProptestConfig {
    ProptestConfig { cases: 6, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(light())]

    #[test]
    fn profiles_are_monotone_with_sign_convention(
        ap in 0.2f64..3.0, am in 0.2f64..3.0, bp in 0.05f64..1.0, bm in 0.05f64..1.0,
        f1 in 0.01f64..0.99, f2 in 0.01f64..0.99,
    ) {
        let p = log_weights_half(ap, am, bp, -bm);
        let (lo, hi) = (f1.min(f2), f1.max(f2));
        prop_assume!(hi - lo > 1e-3);
        let plus = SideProfile::new(&p, Side::Plus, Default::default()).unwrap();
        let (x1, x2) = (lo * bp, hi * bp);
        prop_assert!(plus.w(x1).unwrap() < plus.w(x2).unwrap());
        prop_assert!(plus.r(x1).unwrap() < plus.r(x2).unwrap());
        let minus = SideProfile::new(&p, Side::Minus, Default::default()).unwrap();
        let (x1, x2) = (-hi * bm, -lo * bm);
        let (w1, w2) = (minus.w(x1).unwrap(), minus.w(x2).unwrap());
        prop_assert!(w1 < w2 && w2 < 0.0);
        prop_assert!(minus.r(x1).unwrap() < minus.r(x2).unwrap());
        prop_assert!(minus.r(x2).unwrap() < 0.0);
    }

    #[test]
    fn r_inverse_round_trip(ap in 0.2f64..3.0, k in 1i32..100) {
        let p = log_weights_half(ap, 1.0, 0.9, -0.9);
        for side in Side::BOTH {
            let prof = SideProfile::new(&p, side, Default::default()).unwrap();
            let x = side.sign() * 0.9 * 0.85f64.powi(k);
            let back = prof.r_inv(prof.r(x).unwrap()).unwrap();
            prop_assert!((back - x).abs() <= 1e-8 * x.abs().max(1.0), "{x} {back}");
        }
    }

    #[test]
    fn closed_form_and_quadrature_agree(
        scale in 0.1f64..5.0, exponent in -0.9f64..3.0, logpower in -4.0f64..-1.1, log_family in any::<bool>(), t in 0.01f64..0.95,
    ) {
        // the two families with closed forms: x^a and x^-1 neglog(x)^b, b < -1
        let e = if log_family { E::term(scale, -1.0, logpower) } else { E::term(scale, exponent, 0.0) };
        prop_assert!(e.integrable_at_zero() && e.has_closed_form());
        let pt = Pt::left(t, 1.0);
        let cfg = QuadConfig::default();
        let a = e.antideriv(&pt, &cfg).unwrap();
        let b = e.antideriv_quad(&pt, &cfg).unwrap();
        prop_assert!((a - b).abs() <= 1e-8 * a.abs(), "{a} {b}");
    }

    #[test]
    fn detectors_are_scale_invariant(c in 0.01f64..100.0, k in 0usize..4) {
        let spec = ["neglog_inv", "sqrt", "x^2*neglog(x)", "neglog(x)^-2"][k];
        let h = resolve_function(spec).unwrap();
        let hc = h.scaled(c);
        let p = GridPolicy::default();
        let a = is_slowly_varying(&h, Regime::ZeroPlus, &p).unwrap();
        let b = is_slowly_varying(&hc, Regime::ZeroPlus, &p).unwrap();
        prop_assert_eq!(a.status, b.status);
        for ((_, u), (_, v)) in a.evidence.iter().zip(&b.evidence) {
            prop_assert!((u - v).abs() <= 1e-9 * u.abs().max(1e-3));
        }
        if spec != "neglog(x)^-2" {
            let a = is_positively_increasing(&h, Regime::ZeroPlus, &p).unwrap();
            let b = is_positively_increasing(&hc, Regime::ZeroPlus, &p).unwrap();
            prop_assert_eq!(a.status, b.status);
        }
    }

    #[test]
    fn minus_regime_equals_reflection(a in 0.0f64..2.0, log in -2.0f64..0.0) {
        let g = Handle::linear("g", (-1.0, 0.0), move |x: f64| -(-x).powf(a) * Pt::left(-x, 1.0).neglog().powf(log));
        let p = GridPolicy::default();
        let direct = is_positively_increasing(&g, Regime::ZeroMinus, &p).unwrap();
        let refl = is_positively_increasing(&g.reflect().unwrap(), Regime::ZeroPlus, &p).unwrap();
        prop_assert_eq!(direct.status, refl.status);
        prop_assert_eq!(direct.evidence, refl.evidence);
    }

    #[test]
    fn nondecreasing_example_closed_form(n in 3u32..2000, c in 1u32..3) {
        let (n, c) = (n as f64, c as f64);
        prop_assert_eq!(staircase_phi(n * n) - staircase_phi(n * n - c), c);
        prop_assert_eq!(staircase_phi(n * n + n) - staircase_phi(n * n + n - c), 0.0);
    }

    #[test]
    fn index_estimate_ignores_gamma(ai in 0usize..3, gi in 0usize..3) {
        let alpha = [0.5, 1.0, 2.0][ai];
        let gamma = [0.5, 1.0, 2.0][gi];
        let e = rv_index_estimate(&resolve_function(&format!("x^{alpha}")).unwrap(), gamma, &GridPolicy::default()).unwrap();
        prop_assert!((e.alpha - alpha).abs() < 1e-3);
        // a log factor slows convergence to about beta/|ln x|
        let e = rv_index_estimate(&resolve_function(&format!("x^{alpha}*neglog(x)^-1")).unwrap(), gamma, &GridPolicy::default()).unwrap();
        prop_assert!((e.alpha - alpha).abs() < 0.05, "{} {alpha}", e.alpha);
    }

    #[test]
    fn m_function_is_stieltjes(ap in 0.2f64..3.0, am in 0.2f64..3.0, ly in -2.0f64..6.0, lx in -2.0f64..4.0) {
        let p = log_weights_half(ap, am, 1.0, -1.0);
        let y = 10f64.powf(ly);
        for side in Side::BOTH {
            let s = SideSolver::new(&p, side, WeylConfig::default()).unwrap();
            let a = s.m_hat(C::new(0.0, y)).unwrap();
            let b = s.m_hat(C::new(0.0, -y)).unwrap();
            prop_assert!(a.m.im > 0.0 && a.m.re > 0.0, "{:?}", a.m);
            prop_assert!((b.m - a.m.conj()).norm() <= 1e-7 * a.m.norm());
            prop_assert!(a.wronskian_drift <= 1e-7);
            let neg = s.m_hat(C::new(-10f64.powf(lx), 0.0)).unwrap();
            prop_assert!(neg.m.re > 0.0, "{:?}", neg.m);
        }
    }

    #[test]
    fn kernel_condition_matches_zero_case(ap in 0.2f64..3.0, am in 0.2f64..3.0, bp in 0.05f64..0.9, bm in 0.05f64..0.9, tie in any::<bool>()) {
        // tie picks a+ so that W+(b+) + W-(b-) = 0
        let ap = if tie { am * (-bm.ln()).ln() / (-bp.ln()).ln() } else { ap };
        prop_assume!(ap > 0.0);
        let p = log_weights_half(ap, am, bp, -bm);
        let k = kernel_condition(&p, &fast()).unwrap();
        let z = regularity_at_zero(&p, &fast()).unwrap();
        prop_assert_eq!(k.status == Status::Fails, z.kernel_equal == Some(false));
        let j = kernel_analysis(&p).unwrap();
        prop_assert_eq!(j.chain_length == 2, k.status == Status::Fails);
    }
}

proptest! {
    #![proptest_config(heavy())]

    #[test]
    fn eigenpairs_are_simple_and_krein_nonnegative(alpha in 0.5f64..4.0, beta in 0.5f64..4.0) {
        let p = catalog_entry("unit-reflection", &CatalogParams { alpha: Some(alpha), beta: Some(beta), ..Default::default() }).unwrap().problem.unwrap();
        let rep = eigenvalues(&p, (-150.0, 150.0), &EigenConfig::default()).unwrap();
        prop_assert!(rep.counts.0 + rep.counts.1 > 0);
        for e in rep.positive.iter().chain(&rep.negative) {
            prop_assert!(e.residual <= 1e-6, "{e:?}");
            prop_assert!(e.krein.unwrap() >= -1e-8, "{e:?}");
        }
        prop_assert!(rep.dips.is_empty(), "{:?}", rep.dips);
    }

    #[test]
    fn odd_weight_spectrum_is_symmetric(b in 0.3f64..3.0) {
        let p = catalog_entry("sgn", &CatalogParams { b_plus: Some(b), b_minus: Some(-b), ..Default::default() }).unwrap().problem.unwrap();
        let hi = 600.0 / (b * b);
        let rep = eigenvalues(&p, (-hi, hi), &EigenConfig::default()).unwrap();
        prop_assert_eq!(rep.counts.0, rep.counts.1);
        for (a, c) in rep.positive.iter().zip(&rep.negative) {
            prop_assert!((a.lambda + c.lambda).abs() <= 1e-6 * a.lambda);
        }
    }
}

#[test]
fn catalog_functions_are_never_both_sv_and_pi() {
    let p = GridPolicy::default();
    for name in CATALOG_FUNCTIONS {
        let h = catalog_function(name).unwrap();
        for regime in [Regime::ZeroPlus, Regime::PlusInfinity] {
            let (Ok(sv), Ok(pi)) = (is_slowly_varying(&h, regime, &p), is_positively_increasing(&h, regime, &p)) else { continue };
            assert!(!(sv.status == Status::Holds && pi.status == Status::Holds), "{name} at {regime:?}");
        }
    }
}

#[test]
fn reports_are_deterministic() {
    for name in ["sgn", "log-weights"] {
        let p = catalog_entry(name, &CatalogParams::default()).unwrap().problem.unwrap();
        let a = serde_json::to_string(&analyze(&p, &fast()).unwrap()).unwrap();
        let b = serde_json::to_string(&analyze(&p, &fast()).unwrap()).unwrap();
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn catalog_expectations_hold() {
    let cfg = fast();
    for name in CATALOG {
        let e = catalog_entry(name, &CatalogParams::default()).unwrap();
        let Some(p) = &e.problem else { continue };
        let rep = analyze(p, &cfg).unwrap();
        let want = e.expected;
        let holds = |s: Status| match s {
            Status::Holds => Some(true),
            Status::Fails => Some(false),
            Status::Inconclusive => None,
        };
        if let Some(w) = want.infinity {
            assert_eq!(holds(rep.regularity_infinity.as_ref().unwrap().status.status), Some(w), "{name} infinity");
        }
        if let Some(w) = want.similarity {
            assert_eq!(holds(rep.similarity.as_ref().unwrap().status), Some(w), "{name} similarity");
        }
        if let Some(w) = want.riesz {
            assert_eq!(holds(rep.riesz.as_ref().unwrap().status), Some(w), "{name} riesz");
        }
        if let Some(w) = want.zero_critical {
            assert_eq!(holds(rep.regularity_zero.as_ref().unwrap().critical), Some(w), "{name} zero critical");
        }
        if let Some(w) = want.chain_length {
            assert_eq!(rep.kernel.jordan.as_ref().unwrap().chain_length, w, "{name} chain");
        }
        if let Some(w) = want.discrete {
            assert_eq!(holds(rep.discreteness.as_ref().unwrap().status), Some(w), "{name} discrete");
        }
    }
}
