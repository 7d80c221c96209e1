use serde::Serialize;

use super::expr::CoefficientExpr;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Plus,
    Minus,
}

impl Side {
    pub fn sign(self) -> f64 {
        match self {
            Side::Plus => 1.0,
            Side::Minus => -1.0,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Side::Plus => "plus",
            Side::Minus => "minus",
        }
    }

    pub const BOTH: [Side; 2] = [Side::Plus, Side::Minus];
}

/// Interval (b_minus, b_plus) with positive coefficient expressions on each side.
/// Minus-side expressions are functions of |x|; `w_minus` is the restriction of -w.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemSpec {
    pub name: String,
    pub b_minus: f64,
    pub b_plus: f64,
    pub w_plus: CoefficientExpr,
    pub r_plus: CoefficientExpr,
    pub w_minus: CoefficientExpr,
    pub r_minus: CoefficientExpr,
}

/// One side written on (0, len) in t = |x|.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfProblem {
    pub side: Side,
    pub len: f64,
    pub w: CoefficientExpr,
    pub r: CoefficientExpr,
}

impl ProblemSpec {
    pub fn new(
        name: impl Into<String>,
        b_minus: f64,
        b_plus: f64,
        w_plus: CoefficientExpr,
        r_plus: CoefficientExpr,
        w_minus: CoefficientExpr,
        r_minus: CoefficientExpr,
    ) -> Result<Self> {
        let p = ProblemSpec { name: name.into(), b_minus, b_plus, w_plus, r_plus, w_minus, r_minus };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b_minus < 0.0 && self.b_plus > 0.0) {
            return Err(Error::Invalid(format!(
                "need b_minus < 0 < b_plus, got ({}, {})",
                self.b_minus, self.b_plus
            )));
        }
        for side in Side::BOTH {
            let h = self.half(side);
            h.w.validate(h.len)?;
            h.r.validate(h.len)?;
            if !h.w.integrable_at_zero() || !h.r.integrable_at_zero() {
                return Err(Error::Invalid(format!("{} side coefficients must be integrable near 0", side.label())));
            }
        }
        Ok(())
    }

    pub fn half(&self, side: Side) -> HalfProblem {
        match side {
            Side::Plus => HalfProblem { side, len: self.b_plus, w: self.w_plus.clone(), r: self.r_plus.clone() },
            Side::Minus => HalfProblem { side, len: -self.b_minus, w: self.w_minus.clone(), r: self.r_minus.clone() },
        }
    }

    pub fn endpoint(&self, side: Side) -> f64 {
        match side {
            Side::Plus => self.b_plus,
            Side::Minus => self.b_minus,
        }
    }

    /// Signed weight w(x) of the full problem (negative on the minus side).
    pub fn weight(&self, x: f64) -> Result<f64> {
        if x > 0.0 {
            self.w_plus.eval_at(x, self.b_plus)
        } else if x < 0.0 {
            self.w_minus.eval_at(-x, -self.b_minus).map(|v| -v)
        } else {
            Err(Error::Domain { x, end: self.b_plus })
        }
    }
}

impl HalfProblem {
    /// The problem with w and r exchanged.
    pub fn dual(&self) -> HalfProblem {
        HalfProblem { side: self.side, len: self.len, w: self.r.clone(), r: self.w.clone() }
    }
}
