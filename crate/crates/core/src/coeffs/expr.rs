//! Coefficient expressions on a half interval (0, L), written in the distance t = |x| from 0.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};

/// A point of (0, L) carrying both its position and its distance to the far end,
/// so that expressions can be evaluated accurately next to either endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pt {
    pub t: f64,
    pub delta: f64,
    pub end: f64,
}

impl Pt {
    pub fn left(t: f64, end: f64) -> Pt {
        let delta = if end.is_finite() { end - t } else { f64::INFINITY };
        Pt { t, delta, end }
    }

    pub fn right(delta: f64, end: f64) -> Pt {
        Pt { t: end - delta, delta, end }
    }

    fn scaled(&self, beta: f64) -> Pt {
        Pt { t: beta * self.t, delta: beta * self.delta, end: beta * self.end }
    }

    /// 1 - t, computed from the endpoint distance when that is more accurate.
    fn one_minus(&self) -> f64 {
        if self.end.is_finite() && self.t > 0.5 * self.end {
            (1.0 - self.end) + self.delta
        } else {
            1.0 - self.t
        }
    }

    /// -ln t without cancellation near t = 1.
    pub fn neglog(&self) -> f64 {
        if self.t < 0.7 {
            -self.t.ln()
        } else {
            -(-self.one_minus()).ln_1p()
        }
    }
}

/// x -> c · x^a · (-ln x)^b.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLogTerm {
    pub scale: f64,
    pub power: f64,
    pub logpower: f64,
}

impl PowerLogTerm {
    pub fn new(scale: f64, power: f64, logpower: f64) -> Self {
        PowerLogTerm { scale, power, logpower }
    }

    pub fn constant(c: f64) -> Self {
        PowerLogTerm::new(c, 0.0, 0.0)
    }

    fn ln_eval(&self, p: &Pt) -> f64 {
        let mut v = self.scale.ln();
        if self.power != 0.0 {
            v += self.power * p.t.ln();
        }
        if self.logpower != 0.0 {
            v += self.logpower * p.neglog().ln();
        }
        v
    }

    pub fn eval(&self, p: &Pt) -> f64 {
        if self.power == 0.0 && self.logpower == 0.0 {
            return self.scale;
        }
        self.ln_eval(p).exp()
    }

    fn check_end(&self, end: f64) -> Result<()> {
        if self.logpower != 0.0 && end > 1.0 {
            return Err(Error::Invalid(format!(
                "logarithmic factor requires the side interval to lie in (0,1), got length {end}"
            )));
        }
        Ok(())
    }

    pub fn integrable_at_zero(&self) -> bool {
        self.power > -1.0 || (self.power == -1.0 && self.logpower < -1.0)
    }

    pub fn integrable_at_end(&self, end: f64) -> bool {
        if end.is_infinite() {
            return self.power < -1.0;
        }
        if end == 1.0 && self.logpower != 0.0 {
            return self.logpower > -1.0;
        }
        true
    }

    /// Closed-form integral over (0, t) when the table applies.
    pub fn closed_antideriv(&self, p: &Pt) -> Option<f64> {
        let (a, b, c) = (self.power, self.logpower, self.scale);
        if b == 0.0 && a > -1.0 {
            return Some(c * (p.t.ln() * (a + 1.0)).exp() / (a + 1.0));
        }
        if a == -1.0 && b < -1.0 {
            return Some(c * p.neglog().powf(b + 1.0) / (-b - 1.0));
        }
        None
    }

    /// Closed-form integral over (t, end) when the table applies.
    pub fn closed_tail(&self, p: &Pt) -> Option<f64> {
        let (a, b, c) = (self.power, self.logpower, self.scale);
        if b == 0.0 {
            if p.end.is_infinite() {
                return if a < -1.0 { Some(-c * p.t.powf(a + 1.0) / (a + 1.0)) } else { None };
            }
            let rel = -(p.delta / p.end);
            if a == -1.0 {
                return Some(-c * rel.ln_1p());
            }
            let ep = p.end.powf(a + 1.0);
            return Some(c * ep * (-((a + 1.0) * rel.ln_1p()).exp_m1()) / (a + 1.0));
        }
        if a == -1.0 && b > -1.0 && p.end == 1.0 {
            return Some(c * p.neglog().powf(b + 1.0) / (b + 1.0));
        }
        if a == -1.0 && b < -1.0 && p.end < 1.0 {
            let full = c * Pt::left(p.end, p.end).neglog().powf(b + 1.0) / (-b - 1.0);
            return Some(full - c * p.neglog().powf(b + 1.0) / (-b - 1.0));
        }
        None
    }
}

/// Samples (x_i, y_i) with positive values, interpolated linearly in log-log
/// coordinates and extended by the power laws of the outermost segments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tabulated {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

impl Tabulated {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() < 2 || xs.len() != ys.len() {
            return Err(Error::Invalid("tabulated data needs at least two (x, y) pairs".into()));
        }
        if xs.windows(2).any(|w| !(w[0] < w[1])) || xs[0] <= 0.0 {
            return Err(Error::Invalid("tabulated abscissae must be positive and increasing".into()));
        }
        if ys.iter().any(|&y| !(y > 0.0) || !y.is_finite()) {
            return Err(Error::Invalid("tabulated values must be finite and positive".into()));
        }
        Ok(Tabulated { xs, ys })
    }

    fn slope(&self, i: usize) -> f64 {
        (self.ys[i + 1] / self.ys[i]).ln() / (self.xs[i + 1] / self.xs[i]).ln()
    }

    /// Local power exponent of the extension toward 0.
    pub fn exponent_at_zero(&self) -> f64 {
        self.slope(0)
    }

    pub fn exponent_at_infinity(&self) -> f64 {
        self.slope(self.xs.len() - 2)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let n = self.xs.len();
        let i = match self.xs.partition_point(|&x| x <= t) {
            0 => 0,
            k if k >= n => n - 2,
            k => k - 1,
        };
        let s = self.slope(i);
        self.ys[i] * (t / self.xs[i]).powf(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CoefficientExpr {
    Constant { value: f64 },
    Term { term: PowerLogTerm },
    Sum { terms: Vec<PowerLogTerm> },
    /// alpha · base(beta · t)
    Reflect { alpha: f64, beta: f64, base: Box<CoefficientExpr> },
    Table { table: Tabulated },
}

impl CoefficientExpr {
    pub fn constant(v: f64) -> Self {
        CoefficientExpr::Constant { value: v }
    }

    pub fn term(scale: f64, power: f64, logpower: f64) -> Self {
        CoefficientExpr::Term { term: PowerLogTerm::new(scale, power, logpower) }
    }

    pub fn sum(terms: Vec<PowerLogTerm>) -> Self {
        if terms.len() == 1 {
            CoefficientExpr::Term { term: terms[0] }
        } else {
            CoefficientExpr::Sum { terms }
        }
    }

    pub fn reflect(alpha: f64, beta: f64, base: CoefficientExpr) -> Self {
        CoefficientExpr::Reflect { alpha, beta, base: Box::new(base) }
    }

    /// Validates positivity parameters and the interval length.
    pub fn validate(&self, end: f64) -> Result<()> {
        match self {
            CoefficientExpr::Constant { value } => {
                if !(*value > 0.0) || !value.is_finite() {
                    return Err(Error::Invalid(format!("constant coefficient must be positive, got {value}")));
                }
            }
            CoefficientExpr::Term { term } => check_term(term, end)?,
            CoefficientExpr::Sum { terms } => {
                if terms.is_empty() {
                    return Err(Error::Invalid("empty sum".into()));
                }
                for t in terms {
                    check_term(t, end)?;
                }
            }
            CoefficientExpr::Reflect { alpha, beta, base } => {
                if !(*alpha > 0.0 && *beta > 0.0) {
                    return Err(Error::Invalid("reflection parameters must be positive".into()));
                }
                base.validate(beta * end)?;
            }
            CoefficientExpr::Table { .. } => {}
        }
        Ok(())
    }

    pub fn eval(&self, p: &Pt) -> f64 {
        match self {
            CoefficientExpr::Constant { value } => *value,
            CoefficientExpr::Term { term } => term.eval(p),
            CoefficientExpr::Sum { terms } => terms.iter().map(|t| t.eval(p)).sum(),
            CoefficientExpr::Reflect { alpha, beta, base } => alpha * base.eval(&p.scaled(*beta)),
            CoefficientExpr::Table { table } => table.eval(p.t),
        }
    }

    /// Checked evaluation at a position t of (0, end).
    pub fn eval_at(&self, t: f64, end: f64) -> Result<f64> {
        if !(t > 0.0 && t < end) {
            return Err(Error::Domain { x: t, end });
        }
        let v = self.eval(&Pt::left(t, end));
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::Domain { x: t, end });
        }
        Ok(v)
    }

    /// True when every part has a closed-form antiderivative.
    pub fn has_closed_form(&self) -> bool {
        let probe = Pt::left(0.25, 0.5);
        match self {
            CoefficientExpr::Constant { .. } => true,
            CoefficientExpr::Term { term } => term.closed_antideriv(&probe).is_some(),
            CoefficientExpr::Sum { terms } => terms.iter().all(|t| t.closed_antideriv(&probe).is_some()),
            CoefficientExpr::Reflect { base, .. } => base.has_closed_form(),
            CoefficientExpr::Table { .. } => false,
        }
    }

    fn closed_antideriv(&self, p: &Pt) -> Option<f64> {
        match self {
            CoefficientExpr::Constant { value } => Some(value * p.t),
            CoefficientExpr::Term { term } => term.closed_antideriv(p),
            CoefficientExpr::Sum { terms } => terms.iter().map(|t| t.closed_antideriv(p)).sum(),
            CoefficientExpr::Reflect { alpha, beta, base } => {
                base.closed_antideriv(&p.scaled(*beta)).map(|v| alpha / beta * v)
            }
            CoefficientExpr::Table { .. } => None,
        }
    }

    fn closed_tail(&self, p: &Pt) -> Option<f64> {
        match self {
            CoefficientExpr::Constant { value } => {
                if p.delta.is_finite() {
                    Some(value * p.delta)
                } else {
                    None
                }
            }
            CoefficientExpr::Term { term } => term.closed_tail(p),
            CoefficientExpr::Sum { terms } => terms.iter().map(|t| t.closed_tail(p)).sum(),
            CoefficientExpr::Reflect { alpha, beta, base } => {
                base.closed_tail(&p.scaled(*beta)).map(|v| alpha / beta * v)
            }
            CoefficientExpr::Table { .. } => None,
        }
    }

    pub fn integrable_at_zero(&self) -> bool {
        match self {
            CoefficientExpr::Constant { .. } => true,
            CoefficientExpr::Term { term } => term.integrable_at_zero(),
            CoefficientExpr::Sum { terms } => terms.iter().all(|t| t.integrable_at_zero()),
            CoefficientExpr::Reflect { base, .. } => base.integrable_at_zero(),
            CoefficientExpr::Table { table } => table.exponent_at_zero() > -1.0,
        }
    }

    /// Integrability toward the far end of (0, end).
    pub fn integrable_at_end(&self, end: f64) -> bool {
        match self {
            CoefficientExpr::Constant { .. } => end.is_finite(),
            CoefficientExpr::Term { term } => term.integrable_at_end(end),
            CoefficientExpr::Sum { terms } => terms.iter().all(|t| t.integrable_at_end(end)),
            CoefficientExpr::Reflect { beta, base, .. } => base.integrable_at_end(beta * end),
            CoefficientExpr::Table { table } => end.is_finite() || table.exponent_at_infinity() < -1.0,
        }
    }

    /// Integral over (0, t): closed form when available, geometric-panel quadrature otherwise.
    pub fn antideriv(&self, p: &Pt, cfg: &QuadConfig) -> Result<f64> {
        if let Some(v) = self.closed_antideriv(p) {
            return Ok(v);
        }
        self.antideriv_quad(p, cfg)
    }

    /// Quadrature backend for the integral over (0, t), always numeric.
    pub fn antideriv_quad(&self, p: &Pt, cfg: &QuadConfig) -> Result<f64> {
        if !self.integrable_at_zero() {
            return Err(Error::Divergent("coefficient is not integrable at 0".into()));
        }
        let end = p.end;
        if p.t <= 0.5 * end || end.is_infinite() {
            quad::from_zero(&|s: f64| self.eval(&Pt::left(s, end)), p.t, cfg)
        } else {
            let half = quad::from_zero(&|s: f64| self.eval(&Pt::left(s, end)), 0.5 * end, cfg)?;
            let rest = quad::adaptive(
                &|d: f64| self.eval(&Pt::right(d, end)),
                p.delta,
                0.5 * end,
                cfg.rel_tol * 0.1,
                cfg.abs_tol,
            )
            .0;
            Ok(half + rest)
        }
    }

    /// Integral over (t, end).
    pub fn tail(&self, p: &Pt, cfg: &QuadConfig) -> Result<f64> {
        if !self.integrable_at_end(p.end) {
            return Err(Error::Divergent("coefficient is not integrable at the far endpoint".into()));
        }
        if let Some(v) = self.closed_tail(p) {
            return Ok(v);
        }
        let end = p.end;
        if end.is_infinite() {
            return quad::to_infinity(&|s: f64| self.eval(&Pt::left(s, end)), p.t, cfg);
        }
        if p.delta <= 0.5 * end {
            quad::from_zero(&|d: f64| self.eval(&Pt::right(d, end)), p.delta, cfg)
        } else {
            let near_end = quad::from_zero(&|d: f64| self.eval(&Pt::right(d, end)), 0.5 * end, cfg)?;
            let rest = quad::adaptive(&|s: f64| self.eval(&Pt::left(s, end)), p.t, 0.5 * end, cfg.rel_tol * 0.1, cfg.abs_tol).0;
            Ok(near_end + rest)
        }
    }

    /// Integral over the whole side interval, None when divergent.
    pub fn total(&self, end: f64, cfg: &QuadConfig) -> Result<Option<f64>> {
        if !self.integrable_at_end(end) || !self.integrable_at_zero() {
            return Ok(None);
        }
        if end.is_finite() {
            if let Some(v) = self.closed_antideriv(&Pt { t: end, delta: 0.0, end }) {
                if v.is_finite() {
                    return Ok(Some(v));
                }
            }
            let mid = Pt::left(0.5 * end, end);
            Ok(Some(self.antideriv(&mid, cfg)? + self.tail(&mid, cfg)?))
        } else {
            let one = Pt::left(1.0, end);
            Ok(Some(self.antideriv(&one, cfg)? + self.tail(&one, cfg)?))
        }
    }

    /// Analytic inverse of the antiderivative for constants and single power terms.
    pub fn antideriv_inverse(&self, y: f64) -> Option<f64> {
        match self {
            CoefficientExpr::Constant { value } => Some(y / value),
            CoefficientExpr::Term { term } if term.logpower == 0.0 && term.power > -1.0 => {
                let a1 = term.power + 1.0;
                Some(((y * a1 / term.scale).ln() / a1).exp())
            }
            CoefficientExpr::Reflect { alpha, beta, base } => {
                base.antideriv_inverse(y * beta / alpha).map(|s| s / beta)
            }
            _ => None,
        }
    }
}

fn check_term(t: &PowerLogTerm, end: f64) -> Result<()> {
    if !(t.scale > 0.0) || !t.scale.is_finite() || !t.power.is_finite() || !t.logpower.is_finite() {
        return Err(Error::Invalid(format!("invalid power-log term {t:?}")));
    }
    t.check_end(end)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn cfg() -> QuadConfig {
        QuadConfig::default()
    }

    #[test]
    fn eval_examples() {
        let c = CoefficientExpr::constant(1.0);
        assert_eq!(c.eval_at(0.3, 1.0).unwrap(), 1.0);
        let t = CoefficientExpr::term(1.0, -1.0, -2.0);
        let v = t.eval_at((-1.0f64).exp(), 1.0).unwrap();
        assert!((v - E).abs() < 1e-13);
        assert!(c.eval_at(1.5, 1.0).is_err());
    }

    #[test]
    fn neglog_near_one_is_accurate() {
        let p = Pt::right(1e-12, 1.0);
        assert!((p.neglog() - 1e-12).abs() < 1e-24);
    }

    #[test]
    fn antiderivative_examples() {
        let w = CoefficientExpr::term(1.0, -1.0, -2.0);
        let x = (-2.0f64).exp();
        let v = w.antideriv(&Pt::left(x, 1.0), &cfg()).unwrap();
        assert!((v - 0.5).abs() < 1e-14);
        let sq = CoefficientExpr::term(1.0, 2.0, 0.0);
        let v = sq.antideriv(&Pt::left(0.5, 1.0), &cfg()).unwrap();
        assert!((v - 1.0 / 24.0).abs() < 1e-15);
    }

    #[test]
    fn closed_and_quadrature_agree() {
        let exprs = [
            CoefficientExpr::term(1.0, -0.5, 0.0),
            CoefficientExpr::term(2.0, 1.5, 0.0),
            CoefficientExpr::sum(vec![PowerLogTerm::new(1.0, 0.0, 0.0), PowerLogTerm::new(0.5, -0.3, 0.0)]),
        ];
        for e in &exprs {
            for &t in &[0.01, 0.3, 0.9] {
                let p = Pt::left(t, 1.0);
                let a = e.antideriv(&p, &cfg()).unwrap();
                let b = e.antideriv_quad(&p, &cfg()).unwrap();
                assert!(((a - b) / a).abs() < 1e-8, "{e:?} {t} {a} {b}");
            }
        }
    }

    #[test]
    fn tail_is_accurate_near_end() {
        let r = CoefficientExpr::constant(1.0);
        assert_eq!(r.tail(&Pt::right(1e-15, 1.0), &cfg()).unwrap(), 1e-15);
        let w = CoefficientExpr::term(1.0, -1.0, -0.5);
        let p = Pt::right(1e-10, 1.0);
        let v = w.tail(&p, &cfg()).unwrap();
        assert!((v - 2.0 * 1e-5).abs() < 1e-12);
    }

    #[test]
    fn integrability_table() {
        let ex = CoefficientExpr::term(0.5, -1.0, -1.5);
        assert!(ex.integrable_at_zero());
        assert!(!ex.integrable_at_end(1.0));
        assert!(ex.integrable_at_end(0.5));
        let one = CoefficientExpr::constant(1.0);
        assert!(!one.integrable_at_end(f64::INFINITY));
        assert!(!CoefficientExpr::term(1.0, -1.0, 0.0).integrable_at_zero());
    }

    #[test]
    fn reflection_scales_antiderivative() {
        let base = CoefficientExpr::term(1.0, -1.0, -2.0);
        let refl = CoefficientExpr::reflect(2.0, 3.0, base.clone());
        let t = 0.1;
        let a = refl.antideriv(&Pt::left(t, 1.0 / 3.0), &cfg()).unwrap();
        let b = base.antideriv(&Pt::left(3.0 * t, 1.0), &cfg()).unwrap();
        assert!((a - 2.0 / 3.0 * b).abs() < 1e-14);
    }

    #[test]
    fn tabulated_power_law() {
        let xs: Vec<f64> = (1..=10).map(|k| k as f64 / 10.0).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x.sqrt()).collect();
        let tab = CoefficientExpr::Table { table: Tabulated::new(xs, ys).unwrap() };
        assert!((tab.eval(&Pt::left(0.25, 1.0)) - 0.5).abs() < 1e-12);
        assert!(tab.integrable_at_zero());
        let v = tab.antideriv(&Pt::left(1.0 - 1e-9, 1.0), &cfg()).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-8, "{v}");
    }
}
