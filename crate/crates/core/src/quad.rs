//! Adaptive Gauss-Kronrod quadrature with geometric panels toward singular endpoints.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Panel ratio toward a singular point.
    pub ratio: f64,
    /// Number of geometric panels before the remainder estimate.
    pub panels: usize,
    /// Hard cap on panels (also used for panels toward infinity).
    pub max_panels: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 1e-10, abs_tol: 1e-300, ratio: 0.5, panels: 60, max_panels: 200 }
    }
}

/// One 15-point Kronrod panel; returns (estimate, error estimate).
pub fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive bisection on [a, b] with a per-panel relative criterion.
pub fn adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rtol: f64, atol: f64) -> (f64, f64) {
    if a == b {
        return (0.0, 0.0);
    }
    let mut total = 0.0;
    let mut err = 0.0;
    let mut stack = vec![(a, b, 0u32)];
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(f, lo, hi);
        if !(v.is_finite() && e.is_finite()) {
            return (f64::NAN, f64::INFINITY);
        }
        if e <= atol.max(rtol * v.abs()) || depth >= 48 || (hi - lo).abs() <= 1e-15 * lo.abs().max(hi.abs()) {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, depth + 1));
            stack.push((lo, mid, depth + 1));
        }
    }
    (total, err)
}

/// Integral of `g` over (0, upto] where `g` may be singular at 0.
///
/// Panels [upto·q^{k+1}, upto·q^k]; after the nominal panel count the remainder
/// is continued until negligible or estimated from the geometric decay of the
/// last panel contributions. Non-decaying contributions are reported as divergence.
pub fn from_zero<F: Fn(f64) -> f64>(g: &F, upto: f64, cfg: &QuadConfig) -> Result<f64> {
    if upto <= 0.0 {
        return Ok(0.0);
    }
    let q = cfg.ratio;
    let mut total = 0.0;
    let mut hi = upto;
    let mut contribs: Vec<f64> = Vec::with_capacity(cfg.panels);
    for k in 0..cfg.max_panels {
        let lo = hi * q;
        if lo < 1e-300 {
            break;
        }
        let (v, _) = adaptive(g, lo, hi, cfg.rel_tol * 0.1, cfg.abs_tol);
        if !v.is_finite() {
            return Err(Error::Divergent(format!("non-finite panel value near {lo:e}")));
        }
        total += v;
        contribs.push(v.abs());
        hi = lo;
        if k + 1 >= cfg.panels && v.abs() <= cfg.rel_tol * 1e-2 * total.abs() {
            return Ok(total);
        }
    }
    match tail_estimate(&contribs, total, cfg) {
        Ok(t) => Ok(total + t),
        Err(e) => log_substituted(g, upto, cfg).map_err(|_| e),
    }
}

/// ∫_0^upto g(x) dx as ∫ g(e^{-s}) e^{-s} ds over doubling panels in s.
/// Integrands like x^{-1}|ln x|^{b}, b < -1, decay only algebraically in the
/// number of geometric x-panels but geometrically in doubling s-panels.
fn log_substituted<F: Fn(f64) -> f64>(g: &F, upto: f64, cfg: &QuadConfig) -> Result<f64> {
    let h = |s: f64| {
        let x = (-s).exp();
        g(x) * x
    };
    let (mut total, mut lo) = if upto > (-1f64).exp() {
        (adaptive(g, (-1f64).exp(), upto, cfg.rel_tol * 0.1, cfg.abs_tol).0, 1.0)
    } else {
        (0.0, -upto.ln())
    };
    let mut contribs = Vec::new();
    // x = e^{-s} stays a normal double
    while 2.0 * lo < 700.0 {
        let (v, _) = adaptive(&h, lo, 2.0 * lo, cfg.rel_tol * 0.1, cfg.abs_tol);
        if !v.is_finite() {
            return Err(Error::Divergent(format!("non-finite panel value near s = {lo}")));
        }
        total += v;
        contribs.push(v.abs());
        lo *= 2.0;
    }
    let n = contribs.len();
    if n < 4 {
        return Err(Error::Divergent("too few panels".into()));
    }
    let ratios: Vec<f64> = (n - 3..n).map(|k| contribs[k] / contribs[k - 1]).collect();
    let rho = ratios[2];
    // a clean power law in s gives a constant ratio
    if !(rho < 0.99) || ratios.iter().any(|r| (r - rho).abs() > 1e-3 * rho) {
        return Err(Error::Divergent(format!("log-substituted panels not decaying geometrically (ratio {rho:.4})")));
    }
    Ok(total + contribs[n - 1] * rho / (1.0 - rho) * total.signum())
}

/// Integral of `g` over [from, +inf) with doubling panels.
pub fn to_infinity<F: Fn(f64) -> f64>(g: &F, from: f64, cfg: &QuadConfig) -> Result<f64> {
    let mut total = 0.0;
    let mut lo = from.max(1e-300);
    let mut contribs = Vec::new();
    for _ in 0..cfg.max_panels {
        let hi = lo * 2.0;
        let (v, _) = adaptive(g, lo, hi, cfg.rel_tol * 0.1, cfg.abs_tol);
        if !v.is_finite() {
            return Err(Error::Divergent(format!("non-finite panel value near {lo:e}")));
        }
        total += v;
        contribs.push(v.abs());
        lo = hi;
        if contribs.len() > 4 && v.abs() <= cfg.rel_tol * 1e-2 * total.abs() {
            return Ok(total);
        }
        if !hi.is_finite() {
            break;
        }
    }
    tail_estimate(&contribs, total, cfg).map(|t| total + t)
}

fn tail_estimate(contribs: &[f64], total: f64, cfg: &QuadConfig) -> Result<f64> {
    let n = contribs.len();
    if n < 4 {
        return Err(Error::Divergent("too few panels".into()));
    }
    let last = contribs[n - 1];
    if last == 0.0 {
        return Ok(0.0);
    }
    let rho = (contribs[n - 1] / contribs[n - 2]).max(contribs[n - 2] / contribs[n - 3]);
    if !(rho < 0.98) {
        return Err(Error::Divergent(format!("panel contributions not decaying (ratio {rho:.4})")));
    }
    let tail = last * rho / (1.0 - rho);
    if tail > 1e3 * cfg.rel_tol * total.abs() && rho > 0.9 {
        return Err(Error::Divergent(format!("slowly decaying remainder (ratio {rho:.4})")));
    }
    Ok(tail * total.signum())
}

/// Integral over [a, b] for a function that may be singular at either end.
/// `g(x, d)` receives the point and its distance d = b - x to the right end,
/// so that the integrand can be evaluated accurately next to b.
pub fn two_sided<F: Fn(f64, f64) -> f64>(g: &F, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let half = 0.5 * (b - a);
    let left = from_zero(&|d: f64| g(a + d, (b - a) - d), half, cfg)?;
    let right = from_zero(&|d: f64| g(b - d, d), half, cfg)?;
    Ok(left + right)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn log_singular_integrands() {
        let cfg = QuadConfig::default();
        for b in [-1.1f64, -1.5, -2.0, -4.0] {
            let g = |x: f64| (-x.ln()).powf(b) / x;
            for t in [0.01f64, 0.3] {
                let exact = (-t.ln()).powf(b + 1.0) / (-b - 1.0);
                let v = from_zero(&g, t, &cfg).unwrap();
                assert!((v - exact).abs() < 1e-8 * exact, "{b} {t} {v} {exact}");
            }
        }
        assert!(from_zero(&|x: f64| 1.0 / (x * -x.ln()), 0.5, &cfg).is_err());
        assert!(from_zero(&|x: f64| (-x.ln()).powf(-0.9) / x, 0.5, &cfg).is_err());
    }

    #[test]
    fn polynomial_is_exact() {
        let (v, _) = gk15(&|x: f64| x * x * x - 2.0 * x, 0.0, 2.0);
        assert!((v - 0.0).abs() < 1e-13);
        let (v, _) = adaptive(&|x: f64| x.powi(6), 0.0, 1.0, 1e-12, 0.0);
        assert!((v - 1.0 / 7.0).abs() < 1e-14);
    }

    #[test]
    fn inverse_sqrt_singularity() {
        let cfg = QuadConfig::default();
        let v = from_zero(&|x: f64| x.powf(-0.5), 1.0, &cfg).unwrap();
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn divergence_detected() {
        let cfg = QuadConfig::default();
        assert!(from_zero(&|x: f64| 1.0 / x, 1.0, &cfg).is_err());
        assert!(from_zero(&|x: f64| x.powf(-1.2), 1.0, &cfg).is_err());
        assert!(to_infinity(&|x: f64| 1.0 / x, 1.0, &cfg).is_err());
    }

    #[test]
    fn infinite_tail() {
        let cfg = QuadConfig::default();
        let v = to_infinity(&|x: f64| x.powi(-2), 1.0, &cfg).unwrap();
        assert!((v - 1.0).abs() < 1e-9);
    }

    #[test]
    fn two_sided_endpoint_singularities() {
        let cfg = QuadConfig::default();
        // Beta(1/2, 1/2) = pi
        let v = two_sided(&|x: f64, d: f64| 1.0 / (x * d).sqrt(), 0.0, 1.0, &cfg).unwrap();
        assert!((v - std::f64::consts::PI).abs() < 1e-8, "{v}");
    }
}
