//! Sequential asymptotic equivalence f ≈∼ g at +inf: a sequence x_n → inf with
//! f(x_n)/g(x_n) → 1, searched in the coordinate of the handles.

use serde::Serialize;

use super::detect::{Status, TriVerdict};
use super::handle::{Coord, Handle};
use crate::coeffs::{invert_monotone, InvertConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Serialize)]
pub struct EquivalenceWitness {
    pub coord: Coord,
    /// Strictly increasing points in the stored coordinate.
    pub points: Vec<f64>,
    /// f/g at the points.
    pub ratios: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
pub struct SearchConfig {
    /// Range of the coordinate scanned (u for Log/LogLog, ln x for Linear).
    pub start: f64,
    pub end: f64,
    pub step: f64,
    /// Accepted |ln(f/g)|.
    pub tol: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { start: 1.0, end: 200.0, step: 0.01, tol: 1e-9 }
    }
}

/// ln f - ln g at coordinate u (u = ln x for Linear handles).
fn ln_gap(f: &Handle, g: &Handle, u: f64) -> f64 {
    let at = |h: &Handle| match h.coord {
        Coord::Linear => h.ln_at(u.exp()),
        _ => h.ln_at(u),
    };
    at(f) - at(g)
}

pub fn seq_equivalence_search(f: &Handle, g: &Handle, cfg: &SearchConfig) -> Result<Option<EquivalenceWitness>> {
    let lin = |h: &Handle| h.coord == Coord::Linear;
    if f.coord != g.coord && !(lin(f) && lin(g)) {
        return Err(Error::Precondition("both handles must use the same coordinate".into()));
    }
    let n = ((cfg.end - cfg.start) / cfg.step).ceil() as usize;
    let us: Vec<f64> = (0..=n).map(|k| cfg.start + k as f64 * cfg.step).collect();
    let d: Vec<f64> = us.iter().map(|&u| ln_gap(f, g, u)).collect();
    let mut pts: Vec<f64> = Vec::new();
    for k in 0..us.len() {
        if !d[k].is_finite() {
            continue;
        }
        if d[k].abs() <= cfg.tol {
            pts.push(us[k]);
        } else if k + 1 < us.len() && d[k + 1].is_finite() && d[k + 1].abs() > cfg.tol && d[k].signum() != d[k + 1].signum() {
            // refine the crossing by bisection
            let (mut a, mut b) = (us[k], us[k + 1]);
            let sa = d[k].signum();
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                let dm = ln_gap(f, g, m);
                if dm.abs() <= 0.01 * cfg.tol || b - a <= 4.0 * f64::EPSILON * m.abs() {
                    a = m;
                    b = m;
                    break;
                }
                if dm.signum() == sa {
                    a = m;
                } else {
                    b = m;
                }
            }
            let m = 0.5 * (a + b);
            if ln_gap(f, g, m).abs() <= cfg.tol {
                pts.push(m);
            }
        }
    }
    pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let last_quarter = cfg.end - 0.25 * (cfg.end - cfg.start);
    if pts.len() < 2 || *pts.last().unwrap() < last_quarter {
        return Ok(None);
    }
    // thin identical-function runs to at most a few hundred points
    let stride = (pts.len() / 200).max(1);
    let points: Vec<f64> = pts.iter().copied().step_by(stride).collect();
    let ratios = points.iter().map(|&u| ln_gap(f, g, u).exp()).collect();
    let coord = if lin(f) { Coord::Log } else { f.coord };
    Ok(Some(EquivalenceWitness { coord, points, ratios }))
}

/// Inverse of an increasing handle at value t (returned in the handle coordinate).
fn invert(h: &Handle, t: f64) -> Result<f64> {
    match h.coord {
        Coord::Linear => invert_monotone(|x| h.raw(x), t, h.domain.0.max(0.0), h.domain.1, &InvertConfig::default()),
        _ => {
            let target = t.ln();
            let (mut a, mut b) = (-1.0, 1.0);
            let mut k = 0;
            while h.ln_at(b) < target && k < 200 {
                b *= 2.0;
                k += 1;
            }
            while h.ln_at(a) > target && k < 400 {
                a *= 2.0;
                k += 1;
            }
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if h.ln_at(m) < target {
                    a = m;
                } else {
                    b = m;
                }
            }
            Ok(0.5 * (a + b))
        }
    }
}

/// Outcome of the inverse check: ratios f^{-1}(z_n)/g^{-1}(z_n) at z_n = g(x_n).
#[derive(Debug, Clone, Serialize)]
pub struct InverseReport {
    pub verdict: TriVerdict,
    /// (f^{-1}/g^{-1} - 1)^{-1} stays bounded (the negated relation).
    pub negation_bounded: Status,
}

/// Checks f^{-1} ≈∼ g^{-1} along the witness for increasing unbounded f, g.
/// Witness points are read as x = e^u for Log witnesses built from Linear handles.
pub fn inverse_equivalence_check(f: &Handle, g: &Handle, witness: Option<&EquivalenceWitness>, index: f64) -> Result<InverseReport> {
    let w = witness.ok_or_else(|| Error::Precondition("no equivalence witness for f and g".into()))?;
    if index == 0.0 {
        return Err(Error::Precondition("the index of f must be nonzero".into()));
    }
    let mut ev = Vec::new();
    for &u in &w.points {
        let x_native = match f.coord {
            Coord::Linear => u.exp(),
            _ => u,
        };
        let z = match g.coord {
            Coord::Linear => g.raw(x_native),
            _ => g.ln_at(x_native).exp(),
        };
        if !z.is_finite() {
            continue;
        }
        let xf = invert(f, z)?;
        let r = match f.coord {
            Coord::Linear => xf / x_native,
            Coord::Log => (xf - x_native).exp(),
            Coord::LogLog => (xf.exp() - x_native.exp()).exp(),
        };
        ev.push((u, r));
    }
    if ev.len() < 4 {
        return Ok(InverseReport {
            verdict: TriVerdict::new(Status::Inconclusive, "too few representable witness points"),
            negation_bounded: Status::Inconclusive,
        });
    }
    let n = ev.len();
    let tail = &ev[n - n / 4..];
    let dev = tail.iter().map(|(_, r)| (r - 1.0).abs()).fold(0.0, f64::max);
    let status = if dev < 1e-6 { Status::Holds } else if dev > 1e-2 { Status::Fails } else { Status::Inconclusive };
    let inv_gap: Vec<f64> = ev.iter().map(|(_, r)| 1.0 / (r - 1.0).abs()).collect();
    let first = inv_gap[..n / 4].iter().copied().fold(0.0, f64::max);
    let last = inv_gap[n - n / 4..].iter().copied().fold(0.0, f64::max);
    let negation_bounded = if last > 10.0 * first.max(1.0) { Status::Fails } else { Status::Inconclusive };
    Ok(InverseReport {
        verdict: TriVerdict { status, trend: f64::NAN, final_value: dev, evidence: ev, note: String::new() },
        negation_bounded,
    })
}
