//! Accumulated profiles W, R, their inverses and the pair F, f on one side.

use std::sync::Arc;

use super::expr::Pt;
use super::invert::{invert_monotone, InvertConfig};
use super::problem::{HalfProblem, ProblemSpec, Side};
use crate::error::{Error, Result};
use crate::quad::QuadConfig;

#[derive(Debug, Clone, Copy, Default)]
pub struct ProfileConfig {
    pub quad: QuadConfig,
    pub invert: InvertConfig,
}

/// Profile handles for one side. Internally everything lives on (0, len) in
/// t = |x| with positive values ("hat" quantities); the signed accessors apply
/// the sign convention of the minus side (W, R, x negative there).
#[derive(Debug, Clone)]
pub struct SideProfile {
    pub side: Side,
    pub half: Arc<HalfProblem>,
    pub cfg: ProfileConfig,
    /// W(b) and R(b) in absolute value, None when not integrable.
    pub w_total: Option<f64>,
    pub r_total: Option<f64>,
    pub closed_w: bool,
    pub closed_r: bool,
}

impl SideProfile {
    pub fn new(problem: &ProblemSpec, side: Side, cfg: ProfileConfig) -> Result<Self> {
        Self::from_half(Arc::new(problem.half(side)), cfg)
    }

    pub fn from_half(half: Arc<HalfProblem>, cfg: ProfileConfig) -> Result<Self> {
        let w_total = half.w.total(half.len, &cfg.quad)?;
        let r_total = half.r.total(half.len, &cfg.quad)?;
        Ok(SideProfile {
            side: half.side,
            closed_w: half.w.has_closed_form(),
            closed_r: half.r.has_closed_form(),
            half,
            cfg,
            w_total,
            r_total,
        })
    }

    pub fn len(&self) -> f64 {
        self.half.len
    }

    pub fn pt(&self, t: f64) -> Pt {
        Pt::left(t, self.half.len)
    }

    fn check(&self, t: f64) -> Result<()> {
        if t >= 0.0 && t < self.half.len {
            Ok(())
        } else {
            Err(Error::Domain { x: t, end: self.half.len })
        }
    }

    pub fn w_hat_at(&self, p: &Pt) -> Result<f64> {
        self.half.w.antideriv(p, &self.cfg.quad)
    }

    pub fn r_hat_at(&self, p: &Pt) -> Result<f64> {
        self.half.r.antideriv(p, &self.cfg.quad)
    }

    pub fn w_hat(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        self.w_hat_at(&self.pt(t))
    }

    pub fn r_hat(&self, t: f64) -> Result<f64> {
        self.check(t)?;
        if t == 0.0 {
            return Ok(0.0);
        }
        self.r_hat_at(&self.pt(t))
    }

    /// Integral of w from t to the endpoint.
    pub fn w_tail(&self, p: &Pt) -> Result<f64> {
        self.half.w.tail(p, &self.cfg.quad)
    }

    pub fn r_tail(&self, p: &Pt) -> Result<f64> {
        self.half.r.tail(p, &self.cfg.quad)
    }

    /// Upper end of the range of R (hat), possibly infinite.
    pub fn r_range(&self) -> f64 {
        self.r_total.unwrap_or(f64::INFINITY)
    }

    pub fn r_hat_inv(&self, y: f64) -> Result<f64> {
        if y == 0.0 {
            return Ok(0.0);
        }
        if !(y > 0.0 && y < self.r_range()) {
            return Err(Error::NoBracket(format!("{y} outside the range of R")));
        }
        if let Some(t) = self.half.r.antideriv_inverse(y) {
            if t < self.half.len {
                return Ok(t);
            }
        }
        invert_monotone(|t| self.r_hat(t).unwrap_or(f64::NAN), y, 0.0, self.half.len, &self.cfg.invert)
    }

    /// W∘R^{-1} in hat form (positive).
    pub fn wr_inv_hat(&self, y: f64) -> Result<f64> {
        let t = self.r_hat_inv(y)?;
        self.w_hat(t)
    }

    /// F(y) = 1/(y W(R^{-1}(y))) in hat form, decreasing in y.
    pub fn big_f_hat(&self, y: f64) -> Result<f64> {
        Ok(1.0 / (y * self.wr_inv_hat(y)?))
    }

    /// Infimum of F over the range of R.
    pub fn big_f_floor(&self) -> f64 {
        match (self.w_total, self.r_total) {
            (Some(w), Some(r)) => 1.0 / (w * r),
            _ => 0.0,
        }
    }

    /// f = F^{-1} in hat form: positive, decreasing, defined for y above the floor of F.
    pub fn small_f_hat(&self, y: f64) -> Result<f64> {
        if !(y > self.big_f_floor()) {
            return Err(Error::NoBracket(format!("{y} outside the range of F")));
        }
        let hi = self.r_range();
        invert_monotone(|s| self.big_f_hat(s).unwrap_or(f64::NAN), y, 0.0, hi, &self.cfg.invert)
    }

    fn to_hat(&self, x: f64) -> Result<f64> {
        let t = x * self.side.sign();
        if t < 0.0 {
            return Err(Error::Domain { x, end: self.half.len });
        }
        Ok(t)
    }

    /// Signed W(x); x must lie on this side.
    pub fn w(&self, x: f64) -> Result<f64> {
        Ok(self.side.sign() * self.w_hat(self.to_hat(x)?)?)
    }

    pub fn r(&self, x: f64) -> Result<f64> {
        Ok(self.side.sign() * self.r_hat(self.to_hat(x)?)?)
    }

    /// Signed R^{-1}(y); y has the sign of the side.
    pub fn r_inv(&self, y: f64) -> Result<f64> {
        Ok(self.side.sign() * self.r_hat_inv(self.to_hat(y)?)?)
    }

    /// Signed W(R^{-1}(y)).
    pub fn wr_inv(&self, y: f64) -> Result<f64> {
        Ok(self.side.sign() * self.wr_inv_hat(self.to_hat(y)?)?)
    }

    /// F(y) = 1/(y W(R^{-1}(y))); positive on both sides.
    pub fn big_f(&self, y: f64) -> Result<f64> {
        self.big_f_hat(self.to_hat(y)?)
    }

    /// f = F^{-1}; negative on the minus side.
    pub fn small_f(&self, v: f64) -> Result<f64> {
        Ok(self.side.sign() * self.small_f_hat(v)?)
    }

    /// W(b) signed, when finite.
    pub fn w_end(&self) -> Option<f64> {
        self.w_total.map(|v| self.side.sign() * v)
    }

    pub fn r_end(&self) -> Option<f64> {
        self.r_total.map(|v| self.side.sign() * v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::expr::CoefficientExpr as E;

    fn sgn() -> ProblemSpec {
        ProblemSpec::new("sgn", -1.0, 1.0, E::constant(1.0), E::constant(1.0), E::constant(1.0), E::constant(1.0)).unwrap()
    }

    fn log_weights(ap: f64, am: f64) -> ProblemSpec {
        ProblemSpec::new(
            "log-weights",
            -1.0,
            1.0,
            E::term(ap, -1.0, -1.0 - ap),
            E::constant(1.0),
            E::term(am, -1.0, -1.0 - am),
            E::constant(1.0),
        )
        .unwrap()
    }

    #[test]
    fn constant_profiles() {
        let p = sgn();
        let plus = SideProfile::new(&p, Side::Plus, ProfileConfig::default()).unwrap();
        assert_eq!(plus.w(0.3).unwrap(), 0.3);
        assert!((plus.big_f(0.5).unwrap() - 4.0).abs() < 1e-12);
        assert!((plus.small_f(4.0).unwrap() - 0.5).abs() < 1e-10);
        let minus = SideProfile::new(&p, Side::Minus, ProfileConfig::default()).unwrap();
        assert_eq!(minus.w(-0.3).unwrap(), -0.3);
        assert_eq!(minus.r_inv(-0.25).unwrap(), -0.25);
        assert!((minus.small_f(4.0).unwrap() + 0.5).abs() < 1e-10);
        assert!(minus.w(0.3).is_err());
    }

    #[test]
    fn log_family_profile() {
        let p = log_weights(0.5, 1.0);
        let plus = SideProfile::new(&p, Side::Plus, ProfileConfig::default()).unwrap();
        let minus = SideProfile::new(&p, Side::Minus, ProfileConfig::default()).unwrap();
        for &x in &[1e-8_f64, 1e-3, 0.2, 0.7] {
            let expect = (-x.ln()).powf(-0.5);
            assert!((plus.wr_inv(x).unwrap() - expect).abs() < 1e-12 * expect.max(1.0));
            let expect_m = -1.0 / (-x.ln());
            assert!((minus.wr_inv(-x).unwrap() - expect_m).abs() < 1e-12);
        }
        assert!(plus.w_total.is_none());
        assert_eq!(plus.r_total, Some(1.0));
    }

    #[test]
    fn f_inversion_example() {
        let p = log_weights(1.0, 1.0);
        let plus = SideProfile::new(&p, Side::Plus, ProfileConfig::default()).unwrap();
        let x = plus.small_f(100.0).unwrap();
        assert!((plus.big_f(x).unwrap() - 100.0).abs() < 1e-9);
        assert!((x - 0.0339).abs() < 2e-4);
    }
}
