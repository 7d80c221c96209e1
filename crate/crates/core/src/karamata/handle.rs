//! Positive function handles in overflow-safe coordinates, regimes and probe grids.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::coeffs::{parse_expr, CoefficientExpr, Pt};
use crate::error::{Error, Result};

type Fun = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Point at which an asymptotic statement is made.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    ZeroPlus,
    ZeroMinus,
    PlusInfinity,
    MinusInfinity,
}

impl Regime {
    pub fn label(self) -> &'static str {
        match self {
            Regime::ZeroPlus => "zero_plus",
            Regime::ZeroMinus => "zero_minus",
            Regime::PlusInfinity => "plus_infinity",
            Regime::MinusInfinity => "minus_infinity",
        }
    }

    /// The positive-side regime a minus regime reflects to.
    pub fn reflected(self) -> Regime {
        match self {
            Regime::ZeroMinus => Regime::ZeroPlus,
            Regime::MinusInfinity => Regime::PlusInfinity,
            r => r,
        }
    }

    pub fn at_zero(self) -> bool {
        matches!(self, Regime::ZeroPlus | Regime::ZeroMinus)
    }

    pub fn is_minus(self) -> bool {
        matches!(self, Regime::ZeroMinus | Regime::MinusInfinity)
    }
}

impl std::str::FromStr for Regime {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "zero_plus" | "0+" => Ok(Regime::ZeroPlus),
            "zero_minus" | "0-" => Ok(Regime::ZeroMinus),
            "plus_inf" | "plus_infinity" | "+inf" => Ok(Regime::PlusInfinity),
            "minus_inf" | "minus_infinity" | "-inf" => Ok(Regime::MinusInfinity),
            _ => Err(Error::Invalid(format!("unknown regime '{s}'"))),
        }
    }
}

/// Coordinate in which a handle stores its function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Coord {
    /// value f(x)
    Linear,
    /// φ(u) = ln f(e^u)
    Log,
    /// φ(u) = ln f(exp(e^u))
    LogLog,
}

/// A positive function together with an optional derivative.
/// For Linear handles `deriv` is f'(x); for Log and LogLog it is φ'(u).
#[derive(Clone)]
pub struct Handle {
    pub name: String,
    pub coord: Coord,
    /// Open domain of the Linear variable x (or of u for the other coordinates).
    pub domain: (f64, f64),
    f: Fun,
    deriv: Option<Fun>,
}

impl fmt::Debug for Handle {
    fn fmt(&self, fm: &mut fmt::Formatter<'_>) -> fmt::Result {
        fm.debug_struct("Handle").field("name", &self.name).field("coord", &self.coord).field("domain", &self.domain).finish()
    }
}

impl Handle {
    pub fn linear(name: impl Into<String>, domain: (f64, f64), f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Handle { name: name.into(), coord: Coord::Linear, domain, f: Arc::new(f), deriv: None }
    }

    pub fn log(name: impl Into<String>, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Handle { name: name.into(), coord: Coord::Log, domain: (f64::NEG_INFINITY, f64::INFINITY), f: Arc::new(phi), deriv: None }
    }

    pub fn loglog(name: impl Into<String>, phi: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Handle { name: name.into(), coord: Coord::LogLog, domain: (f64::NEG_INFINITY, f64::INFINITY), f: Arc::new(phi), deriv: None }
    }

    pub fn with_deriv(mut self, d: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.deriv = Some(Arc::new(d));
        self
    }

    pub fn with_domain(mut self, domain: (f64, f64)) -> Self {
        self.domain = domain;
        self
    }

    /// Raw stored function (f for Linear, φ otherwise).
    pub fn raw(&self, v: f64) -> f64 {
        (self.f)(v)
    }

    pub fn raw_deriv(&self) -> Option<&Fun> {
        self.deriv.as_ref()
    }

    /// c·f: Linear scales the value, the others shift φ by ln c.
    pub fn scaled(&self, c: f64) -> Handle {
        let f = self.f.clone();
        let d = self.deriv.clone();
        let lc = c.ln();
        let mut h = match self.coord {
            Coord::Linear => Handle::linear(format!("{}*{c}", self.name), self.domain, move |x| c * f(x)),
            Coord::Log => Handle::log(format!("{}*{c}", self.name), move |u| f(u) + lc),
            Coord::LogLog => Handle::loglog(format!("{}*{c}", self.name), move |u| f(u) + lc),
        };
        h.domain = self.domain;
        h.deriv = match (self.coord, d) {
            (Coord::Linear, Some(d)) => Some(Arc::new(move |x| c * d(x))),
            (_, d) => d,
        };
        h
    }

    /// x -> -g(-x) for a Linear handle g living on the negative axis.
    pub fn reflect(&self) -> Result<Handle> {
        if self.coord != Coord::Linear {
            return Err(Error::Precondition("reflection needs a handle in the linear coordinate".into()));
        }
        let f = self.f.clone();
        let mut h = Handle::linear(format!("refl({})", self.name), (-self.domain.1, -self.domain.0), move |x| -f(-x));
        if let Some(d) = self.deriv.clone() {
            h.deriv = Some(Arc::new(move |x| d(-x)));
        }
        Ok(h)
    }

    /// ln f at the point with coordinate v (x for Linear, u otherwise).
    pub fn ln_at(&self, v: f64) -> f64 {
        match self.coord {
            Coord::Linear => {
                let y = (self.f)(v);
                if y > 0.0 {
                    y.ln()
                } else {
                    f64::NAN
                }
            }
            _ => (self.f)(v),
        }
    }

    /// Coordinate of the point λ·x given the coordinate v of x.
    pub fn shift(&self, v: f64, lambda: f64) -> f64 {
        match self.coord {
            Coord::Linear => lambda * v,
            Coord::Log => v + lambda.ln(),
            Coord::LogLog => v + (lambda.ln() * (-v).exp()).ln_1p(),
        }
    }

    /// ln(f(λx)/f(x)).
    pub fn ln_ratio(&self, v: f64, lambda: f64) -> f64 {
        self.ln_at(self.shift(v, lambda)) - self.ln_at(v)
    }

    /// x f'(x)/f(x) at coordinate v; numeric centered difference when no derivative is known.
    pub fn epsilon(&self, v: f64, regime: Regime) -> f64 {
        match (self.coord, &self.deriv) {
            (Coord::Linear, Some(d)) => v * d(v) / (self.f)(v),
            (Coord::Linear, None) => {
                let h = if regime.at_zero() { 1e-6 * v.abs() } else { (1e-6 * v.abs()).max(1e-6) };
                let fp = ((self.f)(v + h) - (self.f)(v - h)) / (2.0 * h);
                v * fp / (self.f)(v)
            }
            (Coord::Log, d) => phi_prime(&self.f, d.as_ref(), v),
            (Coord::LogLog, d) => phi_prime(&self.f, d.as_ref(), v) * (-v).exp(),
        }
    }
}

fn phi_prime(f: &Fun, d: Option<&Fun>, u: f64) -> f64 {
    match d {
        Some(d) => d(u),
        None => {
            let h = 1e-6 * u.abs().max(1.0);
            (f(u + h) - f(u - h)) / (2.0 * h)
        }
    }
}

/// Probe grid toward the regime point.
#[derive(Debug, Clone, Serialize)]
pub struct GridPolicy {
    /// Starting point (x for Linear, u otherwise); None picks a default.
    pub anchor: Option<f64>,
    /// Geometric ratio toward 0 (in (0,1)) or growth factor toward infinity (> 1).
    pub ratio: Option<f64>,
    pub depth: usize,
    pub lambdas: Vec<f64>,
}

impl Default for GridPolicy {
    fn default() -> Self {
        GridPolicy { anchor: None, ratio: None, depth: 60, lambdas: (1..=9).map(|k| k as f64 / 10.0).collect() }
    }
}

impl GridPolicy {
    pub fn with_depth(mut self, n: usize) -> Self {
        self.depth = n;
        self
    }

    /// Grid points (in the handle coordinate) for a positive regime.
    pub fn points(&self, h: &Handle, regime: Regime) -> Result<Vec<f64>> {
        let n = self.depth;
        if n < 8 {
            return Err(Error::Invalid("grid depth must be at least 8".into()));
        }
        let zero = regime.at_zero();
        let pts: Vec<f64> = match h.coord {
            Coord::Linear => {
                let (lo, hi) = h.domain;
                if zero {
                    let q = self.ratio.unwrap_or(0.5);
                    if !(q > 0.0 && q < 1.0) || lo > 0.0 {
                        return Err(Error::Invalid("zero regime needs ratio in (0,1) and a domain reaching 0".into()));
                    }
                    let x0 = self.anchor.unwrap_or(1e-3).min(0.5 * hi);
                    (0..n).map(|k| x0 * q.powi(k as i32)).collect()
                } else {
                    let q = self.ratio.unwrap_or(2.0);
                    if !(q > 1.0) || hi.is_finite() {
                        return Err(Error::Invalid("infinity regime needs ratio > 1 and an unbounded domain".into()));
                    }
                    let x0 = self.anchor.unwrap_or(std::f64::consts::E).max(2.0 * lo.max(0.0));
                    (0..n).map(|k| x0 * q.powi(k as i32)).collect()
                }
            }
            Coord::Log => {
                let step = self.ratio.map(|q| q.ln().abs()).unwrap_or(std::f64::consts::LN_2);
                if zero {
                    let u0 = self.anchor.map(f64::ln).unwrap_or(1e-3f64.ln());
                    (0..n).map(|k| u0 - k as f64 * step).collect()
                } else {
                    let u0 = self.anchor.map(f64::ln).unwrap_or(1.0);
                    (0..n).map(|k| u0 + k as f64 * step).collect()
                }
            }
            Coord::LogLog => {
                if zero {
                    return Err(Error::Invalid("doubly-logarithmic handles live at +infinity".into()));
                }
                let u0 = self.anchor.unwrap_or(1.0);
                (0..n).map(|k| u0 + k as f64 * std::f64::consts::LN_2).collect()
            }
        };
        Ok(pts)
    }
}

/// ln of the "depth" toward the regime point, the abscissa of trend fits.
pub fn ln_depth(h: &Handle, regime: Regime, v: f64) -> f64 {
    match h.coord {
        Coord::Linear => {
            if regime.at_zero() {
                (-v.ln()).ln()
            } else {
                v.ln().ln()
            }
        }
        Coord::Log => v.abs().ln(),
        Coord::LogLog => v,
    }
}

/// Piecewise-linear φ of the nondecreasing example: value n(n+1)/2 on
/// [n², n²+n], slope one on (n²-n, n²).
pub fn staircase_phi(u: f64) -> f64 {
    if u <= 0.0 {
        return 0.0;
    }
    // n with u in (n² - n, n² + n]
    let mut n = ((0.25 + u).sqrt() - 0.5).floor().max(1.0);
    while n * n + n < u {
        n += 1.0;
    }
    while n > 1.0 && (n - 1.0) * (n - 1.0) + (n - 1.0) >= u {
        n -= 1.0;
    }
    n * (n + 1.0) / 2.0 + (u - n * n).min(0.0)
}

/// Named functions available to the detectors.
pub fn catalog_function(name: &str) -> Option<Handle> {
    let h = match name {
        "neglog_inv" => Handle::linear(name, (0.0, 1.0), |x: f64| 1.0 / Pt::left(x, 1.0).neglog())
            .with_deriv(|x: f64| {
                let l = -x.ln();
                1.0 / (x * l * l)
            }),
        "neglog_inv_sq" => Handle::linear(name, (0.0, 1.0), |x: f64| Pt::left(x, 1.0).neglog().powi(-2)),
        "sqrt" => Handle::linear(name, (0.0, f64::INFINITY), f64::sqrt).with_deriv(|x: f64| 0.5 / x.sqrt()),
        "ln" => Handle::linear(name, (1.0, f64::INFINITY), f64::ln).with_deriv(|x: f64| 1.0 / x),
        "id" => Handle::linear(name, (0.0, f64::INFINITY), |x| x).with_deriv(|_| 1.0),
        "exp" => Handle::log(name, f64::exp).with_deriv(f64::exp),
        "staircase" => Handle::log(name, staircase_phi),
        "loglog_u_plus_sin" => Handle::loglog(name, |u: f64| u + u.sin()).with_deriv(|u: f64| 1.0 + u.cos()),
        "loglog_u_minus_sin" => Handle::loglog(name, |u: f64| u - u.sin()).with_deriv(|u: f64| 1.0 - u.cos()),
        "osc_sv" => Handle::loglog(name, |u: f64| u * u.cos()).with_deriv(|u: f64| u.cos() - u * u.sin()),
        _ => return None,
    };
    Some(h)
}

pub const CATALOG_FUNCTIONS: [&str; 10] =
    ["neglog_inv", "neglog_inv_sq", "sqrt", "ln", "id", "exp", "staircase", "loglog_u_plus_sin", "loglog_u_minus_sin", "osc_sv"];

/// Catalog name or a power-log expression in x (same grammar as coefficient files).
pub fn resolve_function(spec: &str) -> Result<Handle> {
    if let Some(h) = catalog_function(spec) {
        return Ok(h);
    }
    let e = parse_expr(spec, None)?;
    let has_log = match &e {
        CoefficientExpr::Term { term } => term.logpower != 0.0,
        CoefficientExpr::Sum { terms } => terms.iter().any(|t| t.logpower != 0.0),
        _ => false,
    };
    let end = if has_log { 1.0 } else { f64::INFINITY };
    let name = spec.to_string();
    Ok(Handle::linear(name, (0.0, end), move |x| e.eval(&Pt::left(x, end))))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn staircase_closed_form_values() {
        for n in 1..=30 {
            let n = n as f64;
            assert_eq!(staircase_phi(n * n), n * (n + 1.0) / 2.0);
            assert_eq!(staircase_phi(n * n + n), n * (n + 1.0) / 2.0);
            assert_eq!(staircase_phi(n * n - 0.5 * n), n * (n + 1.0) / 2.0 - 0.5 * n);
        }
        assert_eq!(staircase_phi(0.5), 0.5);
    }

    #[test]
    fn loglog_shift_matches_direct_formula() {
        let h = catalog_function("loglog_u_plus_sin").unwrap();
        let u = 3.0f64;
        let x = u.exp().exp();
        let lam = 0.3f64;
        let direct = (lam * x).ln().ln();
        assert!((h.shift(u, lam) - direct).abs() < 1e-12);
    }

    #[test]
    fn expression_handles() {
        let h = resolve_function("x^0.5").unwrap();
        assert!((h.raw(0.25) - 0.5).abs() < 1e-15);
        let h = resolve_function("neglog(x)^-1").unwrap();
        assert!((h.raw((-2.0f64).exp()) - 0.5).abs() < 1e-15);
        assert!(resolve_function("nope(").is_err());
    }

    #[test]
    fn grids_are_monotone() {
        let p = GridPolicy::default();
        let g = p.points(&catalog_function("neglog_inv").unwrap(), Regime::ZeroPlus).unwrap();
        assert!(g.windows(2).all(|w| w[1] < w[0]));
        let g = p.points(&catalog_function("ln").unwrap(), Regime::PlusInfinity).unwrap();
        assert!(g.windows(2).all(|w| w[1] > w[0]));
    }
}
