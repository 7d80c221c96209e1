//! Bracketed inversion of monotone functions.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct InvertConfig {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for InvertConfig {
    fn default() -> Self {
        InvertConfig { tol: 1e-12, max_iter: 200 }
    }
}

/// Solves fn(x) = y for a strictly monotone `f` on (lo, hi).
///
/// `hi` may be infinite and `lo` may be 0; the bracket is then expanded
/// geometrically. For positive brackets spanning several decades the search
/// runs in ln x so that tiny roots keep full relative precision.
pub fn invert_monotone<F: Fn(f64) -> f64>(f: F, y: f64, lo: f64, hi: f64, cfg: &InvertConfig) -> Result<f64> {
    if !(lo < hi) {
        return Err(Error::NoBracket(format!("empty bracket ({lo}, {hi})")));
    }
    let mut a = if lo == 0.0 { hi.min(1.0).min(1e-3) } else { lo };
    let mut b = if hi.is_infinite() { a.max(1.0) * 2.0 } else { hi };
    if lo == 0.0 && hi.is_finite() {
        a = hi * 1e-3;
    }
    let mut fa = f(a);
    let mut fb = f(b);
    if !fb.is_finite() && hi.is_finite() {
        b = hi - (hi - a) * 1e-12;
        fb = f(b);
    }
    let increasing = if fa.is_finite() && fb.is_finite() && fa != fb { fb > fa } else { true };
    let below = |v: f64| if increasing { v < y } else { v > y };

    // expand toward lo
    let mut guard = 0;
    while !below(fa) && fa != y {
        if lo > 0.0 || guard > 2000 {
            return Err(Error::NoBracket(format!("value {y} below range at {a:e}")));
        }
        a *= 0.5;
        if a < 1e-300 {
            return Err(Error::NoBracket(format!("value {y} not reached toward 0")));
        }
        fa = f(a);
        guard += 1;
    }
    guard = 0;
    while below(fb) {
        if hi.is_finite() || guard > 2000 {
            if hi.is_finite() {
                return Err(Error::NoBracket(format!("value {y} above range at {b:e}")));
            }
            return Err(Error::NoBracket(format!("value {y} not reached toward infinity")));
        }
        a = b;
        fa = fb;
        b *= 2.0;
        if !b.is_finite() {
            return Err(Error::NoBracket(format!("value {y} not reached toward infinity")));
        }
        fb = f(b);
        guard += 1;
    }
    if fa == y {
        return Ok(a);
    }
    let use_log = a > 0.0 && b / a > 1e3;
    let to = |x: f64| if use_log { x.ln() } else { x };
    let from = |u: f64| if use_log { u.exp() } else { u };
    let (mut ua, mut ub) = (to(a), to(b));
    let (mut ga, mut gb) = (fa - y, fb - y);
    let scale = y.abs().max(1.0);
    let mut side = 0i32;
    for it in 0..cfg.max_iter {
        let width = ub - ua;
        let mut u = if it % 3 == 2 || !(ga.is_finite() && gb.is_finite()) {
            0.5 * (ua + ub)
        } else {
            // Illinois-style false position
            (ua * gb - ub * ga) / (gb - ga)
        };
        if !(u > ua && u < ub) {
            u = 0.5 * (ua + ub);
        }
        let x = from(u);
        let g = f(x) - y;
        if g.abs() <= cfg.tol * scale || width.abs() <= 4.0 * f64::EPSILON * ua.abs().max(ub.abs()).max(1e-300) {
            return Ok(x);
        }
        if below(g + y) {
            ua = u;
            ga = g;
            if side == -1 {
                gb *= 0.5;
            }
            side = -1;
        } else {
            ub = u;
            gb = g;
            if side == 1 {
                ga *= 0.5;
            }
            side = 1;
        }
    }
    let x = from(0.5 * (ua + ub));
    if (f(x) - y).abs() <= 1e3 * cfg.tol * scale {
        Ok(x)
    } else {
        Err(Error::Convergence(format!("inversion of {y} did not converge")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity() {
        let x = invert_monotone(|x| x, 0.25, 0.0, 1.0, &InvertConfig::default()).unwrap();
        assert!((x - 0.25).abs() < 1e-12);
    }

    #[test]
    fn neglog_inverse() {
        let x = invert_monotone(|x: f64| 1.0 / (-x.ln()), 0.5, 0.0, 1.0, &InvertConfig::default()).unwrap();
        assert!((x - (-2.0f64).exp()).abs() < 1e-12);
    }

    #[test]
    fn decreasing_profile() {
        let oracle = {
            let (mut a, mut b) = (1e-6f64, 0.5f64);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if -m.ln() / m > 100.0 {
                    a = m
                } else {
                    b = m
                }
            }
            0.5 * (a + b)
        };
        let x = invert_monotone(|x: f64| -x.ln() / x, 100.0, 0.0, 1.0, &InvertConfig::default()).unwrap();
        assert!((x - oracle).abs() < 1e-12, "{x} {oracle}");
        assert!((x - 0.0339).abs() < 1e-4);
    }

    #[test]
    fn tiny_root_keeps_relative_precision() {
        let x = invert_monotone(|x: f64| x * x, 1e-40, 0.0, 1.0, &InvertConfig { tol: 1e-60, max_iter: 400 }).unwrap();
        assert!((x / 1e-20 - 1.0).abs() < 1e-10, "{x}");
    }

    #[test]
    fn unbounded_bracket_and_errors() {
        let x = invert_monotone(|x: f64| x.ln(), 10.0, 1.0, f64::INFINITY, &InvertConfig::default()).unwrap();
        assert!((x - 10f64.exp()).abs() < 1e-6);
        assert!(invert_monotone(|x: f64| x, 2.0, 0.0, 1.0, &InvertConfig::default()).is_err());
    }
}
