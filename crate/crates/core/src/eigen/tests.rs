use super::*;
use crate::catalog::{catalog_entry, CatalogParams};

fn cat(name: &str, p: CatalogParams) -> ProblemSpec {
    catalog_entry(name, &p).unwrap().problem.unwrap()
}

fn sgn() -> ProblemSpec {
    cat("sgn", CatalogParams::default())
}

/// Roots of tan t = tanh t in (nπ, (n + 1/2)π) by plain bisection.
fn tan_tanh_root(n: usize) -> f64 {
    let pi = std::f64::consts::PI;
    let f = |t: f64| t.sin() * t.tanh().recip() - t.cos();
    let (mut a, mut b) = (n as f64 * pi + 1e-9, (n as f64 + 0.5) * pi - 1e-9);
    let fa = f(a);
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if (f(m) > 0.0) == (fa > 0.0) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

#[test]
fn tan_tanh_oracle() {
    let t1 = tan_tanh_root(1);
    assert!((t1 - 3.92660).abs() < 1e-5, "{t1}");
    assert!((t1 * t1 - 15.4182).abs() < 1e-3);
}

#[test]
fn char_function_examples() {
    let cfg = EigenConfig::default();
    let p = sgn();
    let s = char_function(&p, 0.0, &cfg).unwrap();
    assert_eq!(s.d, 0.0);
    // closed form ∝ √λ (cos√λ sinh√λ - sin√λ cosh√λ) with u± = cos, cosh shots
    let s = char_function(&p, 1.0, &cfg).unwrap();
    let exact = 1f64.cos() * 1f64.sinh() - 1f64.sin() * 1f64.cosh();
    assert!((s.value() - exact).abs() < 1e-8, "{} {exact}", s.value());
    let t1 = tan_tanh_root(1);
    let s = char_function(&p, t1 * t1, &cfg).unwrap();
    assert!(s.normalized < 1e-6, "{}", s.normalized);
}

#[test]
fn sign_weight_spectrum() {
    let cfg = EigenConfig::default();
    let rep = eigenvalues(&sgn(), (-700.0, 700.0), &cfg).unwrap();
    assert!(rep.counts.0 >= 5 && rep.counts.1 >= 5, "{:?}", rep.counts);
    for n in 1..=5 {
        let t = tan_tanh_root(n);
        let l = rep.positive[n - 1].lambda;
        assert!((l - t * t).abs() < 1e-6 * t * t, "{n}: {l} {}", t * t);
        let m = rep.negative[n - 1].lambda;
        assert!((l + m).abs() < 1e-6 * l, "{l} {m}");
        assert!(rep.positive[n - 1].residual < 1e-6);
        assert!(rep.positive[n - 1].krein.unwrap() > 0.0);
        assert!(rep.negative[n - 1].krein.unwrap() > 0.0);
    }
    let z = rep.zero.as_ref().unwrap();
    assert!(z.multiplicity_note.contains("chain length 2"), "{}", z.multiplicity_note);
    assert!(rep.dips.is_empty(), "{:?}", rep.dips);
}

#[test]
fn decoupled_neumann_unit() {
    let cfg = EigenConfig { decoupled: Some(Side::Plus), ..Default::default() };
    let p = cat("neumann-unit", CatalogParams::default());
    let rep = eigenvalues(&p, (-1.0, 260.0), &cfg).unwrap();
    assert!(rep.zero.is_some());
    assert_eq!(rep.counts, (5, 0));
    let pi = std::f64::consts::PI;
    for (k, e) in rep.positive.iter().enumerate() {
        let exact = ((k + 1) as f64 * pi).powi(2);
        assert!((e.lambda - exact).abs() < 1e-6 * exact, "{} {exact}", e.lambda);
    }
}

#[test]
fn empty_window() {
    let rep = eigenvalues(&sgn(), (1.0, 10.0), &EigenConfig::default()).unwrap();
    assert!(rep.positive.is_empty() && rep.negative.is_empty() && rep.zero.is_none());
}

#[test]
fn fd_oracle_agrees() {
    let cfg = EigenConfig::default();
    let fd = fd_oracle(&sgn(), 2000, 5, &cfg).unwrap();
    assert!(fd.zero_in_kernel && fd.zero_double);
    for n in 1..=5 {
        let t = tan_tanh_root(n);
        assert!((fd.positive[n - 1] - t * t).abs() < 1e-3 * t * t, "{} {}", fd.positive[n - 1], t * t);
        assert!((fd.negative[n - 1] + t * t).abs() < 1e-3 * t * t);
    }
    let cfg = EigenConfig { decoupled: Some(Side::Plus), ..Default::default() };
    let fd = fd_oracle(&cat("neumann-unit", CatalogParams::default()), 1000, 5, &cfg).unwrap();
    let pi = std::f64::consts::PI;
    for (k, v) in fd.positive.iter().enumerate() {
        let exact = ((k + 1) as f64 * pi).powi(2);
        assert!((v - exact).abs() < 1e-3 * exact, "{v} {exact}");
    }
    assert!(fd.negative.is_empty());
}

#[test]
fn fd_and_shooting_on_scaled_reflection() {
    let p = cat("unit-reflection", CatalogParams { alpha: Some(3.0), beta: Some(2.0), ..Default::default() });
    let cfg = EigenConfig::default();
    let rep = eigenvalues(&p, (-400.0, 400.0), &cfg).unwrap();
    let fd = fd_oracle(&p, 2000, 5, &cfg).unwrap();
    let rows = oracle_table(&rep, &fd);
    assert!(rows.len() >= 6);
    for r in rows.iter().filter(|r| r.index <= 5) {
        assert!(r.rel_diff < 1e-3, "{r:?}");
    }
}

#[test]
fn jordan_chain_for_sign_weight() {
    let j = kernel_analysis(&sgn()).unwrap();
    assert_eq!((j.kernel_dim, j.chain_length, j.kernel_sum), (1, 2, Some(0.0)));
    assert!(j.residual.unwrap() < 1e-8);
    for &(x, g) in &j.samples {
        let exact = if x > 0.0 { x - x * x / 2.0 } else { x + x * x / 2.0 };
        assert!((g - exact).abs() < 1e-10, "{x} {g} {exact}");
    }
}

#[test]
fn jordan_chain_other_cases() {
    let j = kernel_analysis(&cat("unit-reflection", CatalogParams { alpha: Some(3.0), beta: Some(2.0), ..Default::default() })).unwrap();
    assert_eq!((j.kernel_dim, j.chain_length), (1, 1));
    let j = kernel_analysis(&cat("unit-reflection", CatalogParams { alpha: Some(2.0), beta: Some(2.0), ..Default::default() })).unwrap();
    assert_eq!((j.kernel_dim, j.chain_length), (1, 2));
    let j = kernel_analysis(&cat("log-weights", CatalogParams::default())).unwrap();
    assert_eq!(j.kernel_dim, 0);
}

