//! Finite-sample detectors for slow variation, positive increase, the
//! regular-variation index and the Karamata representation.

use rayon::prelude::*;
use serde::Serialize;

use super::handle::{ln_depth, Coord, GridPolicy, Handle, Regime};
use crate::error::{Error, Result};
use crate::quad::{self, QuadConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    Inconclusive,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::Fails => "fails",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn from_bool(b: bool) -> Status {
        if b {
            Status::Holds
        } else {
            Status::Fails
        }
    }

    pub fn and(self, other: Status) -> Status {
        match (self, other) {
            (Status::Fails, _) | (_, Status::Fails) => Status::Fails,
            (Status::Holds, Status::Holds) => Status::Holds,
            _ => Status::Inconclusive,
        }
    }

    pub fn not(self) -> Status {
        match self {
            Status::Holds => Status::Fails,
            Status::Fails => Status::Holds,
            s => s,
        }
    }
}

/// Three-valued verdict with the sampled diagnostic.
#[derive(Debug, Clone, Serialize)]
pub struct TriVerdict {
    pub status: Status,
    /// Fitted slope of the diagnostic over the last half of the grid.
    pub trend: f64,
    /// Largest diagnostic value in the final window.
    pub final_value: f64,
    /// (grid point, diagnostic) pairs.
    pub evidence: Vec<(f64, f64)>,
    pub note: String,
}

impl TriVerdict {
    pub fn new(status: Status, note: impl Into<String>) -> Self {
        TriVerdict { status, trend: f64::NAN, final_value: f64::NAN, evidence: Vec::new(), note: note.into() }
    }
}

/// Least-squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    if x.len() < 2 {
        return f64::NAN;
    }
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn envelope(v: &[f64], w: usize, upper: bool) -> Vec<f64> {
    (0..v.len())
        .map(|i| {
            let lo = i.saturating_sub(w);
            let it = v[lo..=i].iter().copied();
            if upper {
                it.fold(f64::NEG_INFINITY, f64::max)
            } else {
                it.fold(f64::INFINITY, f64::min)
            }
        })
        .collect()
}

/// Slope of ln(envelope) against ln(depth) over the last half; zeros are floored.
fn log_trend(depth: &[f64], env: &[f64]) -> f64 {
    let h = env.len() / 2;
    let ys: Vec<f64> = env[h..].iter().map(|v| v.max(1e-300).ln()).collect();
    ls_slope(&depth[h..], &ys)
}

/// Verdict for "diagnostic tends to 0": final-quarter max below `small` with a
/// falling trend holds; final max above `big` with a flat or rising trend fails.
pub fn vanishing_verdict(points: &[f64], depth: &[f64], diag: &[f64], small: f64, big: f64) -> TriVerdict {
    let n = diag.len();
    let env = envelope(diag, (n / 8).max(1), true);
    let trend = log_trend(depth, &env);
    let fmax = diag[n - n / 4..].iter().copied().fold(0.0, f64::max);
    let status = if fmax < small && (trend < 0.0 || fmax < 1e-10) {
        Status::Holds
    } else if fmax > big && trend > -0.25 {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    TriVerdict {
        status,
        trend,
        final_value: fmax,
        evidence: points.iter().copied().zip(diag.iter().copied()).collect(),
        note: String::new(),
    }
}

/// Handle and regime after reflecting minus regimes to the positive side.
fn normalize(h: &Handle, regime: Regime) -> Result<(Handle, Regime)> {
    if regime.is_minus() {
        Ok((h.reflect()?, regime.reflected()))
    } else {
        Ok((h.clone(), regime))
    }
}

/// ln of the uniform ratio: f(λx)/f(x) at 0+, f(x)/f(x/λ) at +inf.
fn ln_uratio(h: &Handle, regime: Regime, v: f64, lam: f64) -> f64 {
    if regime.at_zero() {
        h.ln_ratio(v, lam)
    } else {
        let back = h.shift(v, 1.0 / lam);
        h.ln_at(v) - h.ln_at(back)
    }
}

fn ratio_table(h: &Handle, regime: Regime, pts: &[f64], lambdas: &[f64]) -> Vec<Vec<f64>> {
    pts.par_iter().map(|&v| lambdas.iter().map(|&l| ln_uratio(h, regime, v, l)).collect()).collect()
}

/// f(λx)/f(x) → 1 for every λ; diagnostic is the local index |ln ratio|/|ln λ|.
pub fn is_slowly_varying(h: &Handle, regime: Regime, policy: &GridPolicy) -> Result<TriVerdict> {
    let (h, regime) = normalize(h, regime)?;
    let pts = policy.points(&h, regime)?;
    let table = ratio_table(&h, regime, &pts, &policy.lambdas);
    let mut diag = Vec::with_capacity(pts.len());
    for row in &table {
        let d = row.iter().zip(&policy.lambdas).map(|(r, l)| r.abs() / l.ln().abs()).fold(0.0, f64::max);
        if !d.is_finite() {
            let mut v = TriVerdict::new(Status::Inconclusive, "evaluation failed on the grid");
            v.evidence = pts.iter().copied().zip(diag.iter().copied()).collect();
            return Ok(v);
        }
        diag.push(d);
    }
    let depth: Vec<f64> = pts.iter().map(|&v| ln_depth(&h, regime, v)).collect();
    let mut v = vanishing_verdict(&pts, &depth, &diag, 0.05, 0.1);
    if v.status == Status::Inconclusive {
        if let Some(a) = extrapolated_limit(&depth, &diag) {
            if a.abs() < SV_LIMIT_TOL {
                v.status = Status::Holds;
                v.note = format!("local index decays like 1/depth; extrapolated limit {a:.2e}");
            }
        }
    }
    Ok(v)
}

/// Extrapolated limit below which a slowly decaying local index counts as 0.
const SV_LIMIT_TOL: f64 = 0.02;

/// Limit a of diag ≈ a + c·e^{-depth} fitted on the last half, when the fit is
/// tight and the approach is from above; None otherwise.
fn extrapolated_limit(depth: &[f64], diag: &[f64]) -> Option<f64> {
    let h = diag.len() / 2;
    let t: Vec<f64> = depth[h..].iter().map(|d| (-d).exp()).collect();
    let y = &diag[h..];
    let c = ls_slope(&t, y);
    let n = t.len() as f64;
    let a = y.iter().sum::<f64>() / n - c * t.iter().sum::<f64>() / n;
    let scale = y.iter().copied().fold(0.0, f64::max);
    let resid = t.iter().zip(y).map(|(t, y)| (a + c * t - y).abs()).fold(0.0, f64::max);
    (c.is_finite() && c > 0.0 && scale > 0.0 && resid < 0.01 * scale).then_some(a)
}

/// limsup of the uniform ratio < 1 for some λ.
pub fn is_positively_increasing(h: &Handle, regime: Regime, policy: &GridPolicy) -> Result<TriVerdict> {
    let (h, regime) = normalize(h, regime)?;
    let pts = policy.points(&h, regime)?;
    let table = ratio_table(&h, regime, &pts, &policy.lambdas);
    let n = pts.len();
    let depth: Vec<f64> = pts.iter().map(|&v| ln_depth(&h, regime, v)).collect();
    let mut any_holds = false;
    let mut all_fail = true;
    let mut best = (f64::INFINITY, f64::NAN, 0usize);
    for (j, &lam) in policy.lambdas.iter().enumerate() {
        let col: Vec<f64> = table.iter().map(|r| r[j]).collect();
        if col.iter().any(|r| !r.is_finite()) {
            all_fail = false;
            continue;
        }
        if let Some(k) = col.iter().position(|&r| r > 1e-12) {
            return Err(Error::Precondition(format!(
                "function is not nondecreasing toward the regime point (ratio > 1 at grid point {k}, λ = {lam})"
            )));
        }
        let ratios: Vec<f64> = col.iter().map(|r| r.exp()).collect();
        let alpha: Vec<f64> = col.iter().map(|r| r.abs() / lam.ln().abs()).collect();
        let tail_max = ratios[n / 2..].iter().copied().fold(0.0, f64::max);
        let low = envelope(&alpha, (n / 8).max(1), false);
        let slope = log_trend(&depth, &low);
        let holds = tail_max <= 0.98 && slope > -0.25;
        let fails = tail_max >= 1.0 - 1e-3 || slope <= -0.5;
        any_holds |= holds;
        all_fail &= fails;
        if tail_max < best.0 {
            best = (tail_max, slope, j);
        }
    }
    let status = if any_holds {
        Status::Holds
    } else if all_fail {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    let j = best.2;
    Ok(TriVerdict {
        status,
        trend: best.1,
        final_value: best.0,
        evidence: pts.iter().zip(&table).map(|(&v, r)| (v, r[j].exp())).collect(),
        note: format!("best λ = {}", policy.lambdas[j]),
    })
}

/// Estimate of the index α from L(v) = ∫₀^v s^{γ-1} f(s) ds / (v^γ f(v)) → 1/(γ+α).
#[derive(Debug, Clone, Serialize)]
pub struct IndexEstimate {
    pub alpha: f64,
    /// Final value of L(v).
    pub limit: f64,
    pub verdict: TriVerdict,
}

pub fn rv_index_estimate(h: &Handle, gamma: f64, policy: &GridPolicy) -> Result<IndexEstimate> {
    if h.coord != Coord::Linear {
        return Err(Error::Precondition("index estimation needs a linear-coordinate handle".into()));
    }
    let pts = policy.points(h, Regime::ZeroPlus)?;
    let cfg = QuadConfig::default();
    let ls: Vec<f64> = pts
        .par_iter()
        .map(|&v| {
            let inner = quad::from_zero(&|s: f64| s.powf(gamma - 1.0) * h.raw(s), v, &cfg)?;
            Ok(inner / (v.powf(gamma) * h.raw(v)))
        })
        .collect::<Result<Vec<f64>>>()
        .map_err(|e| Error::Divergent(format!("inner integral: {e}")))?;
    let est: Vec<f64> = ls.iter().map(|l| 1.0 / l - gamma).collect();
    let n = est.len();
    let tail = &est[n - n / 4..];
    let alpha = tail.iter().sum::<f64>() / tail.len() as f64;
    let spread = tail.iter().copied().fold(f64::NEG_INFINITY, f64::max) - tail.iter().copied().fold(f64::INFINITY, f64::min);
    let depth: Vec<f64> = pts.iter().map(|&v| ln_depth(h, Regime::ZeroPlus, v)).collect();
    let trend = ls_slope(&depth[n / 2..], &est[n / 2..]);
    let status = if spread < 1e-2 { Status::Holds } else { Status::Inconclusive };
    Ok(IndexEstimate {
        alpha,
        limit: ls[n - 1],
        verdict: TriVerdict {
            status,
            trend,
            final_value: spread,
            evidence: pts.iter().copied().zip(ls.iter().copied()).collect(),
            note: format!("estimated index {alpha:.6}"),
        },
    })
}

/// Stieltjes-integral conditions at 0+ for f of bounded variation and g
/// increasing with g(0)=0: existence of ∫₀^v g df, f g → 0 and
/// (1/(f g))∫₀^v g df → α/(1+α). The integral is obtained by parts,
/// ∫₀^v g df = f(v)g(v) - ∫₀^v f dg, with dg = g'(s) ds.
#[derive(Debug, Clone, Serialize)]
pub struct StieltjesReport {
    pub integral_exists: Status,
    pub product_vanishes: Status,
    pub limit_matches: TriVerdict,
    /// Final value of (1/(f g))∫ g df.
    pub limit: f64,
    pub target: f64,
    pub status: Status,
}

pub fn stieltjes_condition_check(
    f: &(dyn Fn(f64) -> f64 + Sync),
    g: &(dyn Fn(f64) -> f64 + Sync),
    g_density: &(dyn Fn(f64) -> f64 + Sync),
    alpha: f64,
    policy: &GridPolicy,
    upper: f64,
) -> Result<StieltjesReport> {
    let q = policy.ratio.unwrap_or(0.5);
    let x0 = policy.anchor.unwrap_or(1e-3).min(0.5 * upper);
    let pts: Vec<f64> = (0..policy.depth).map(|k| x0 * q.powi(k as i32)).collect();
    let cfg = QuadConfig::default();
    let parts: Vec<Result<f64>> = pts.par_iter().map(|&v| quad::from_zero(&|s: f64| f(s) * g_density(s), v, &cfg)).collect();
    let target = alpha / (1.0 + alpha);
    if parts.iter().any(|p| p.is_err()) {
        return Ok(StieltjesReport {
            integral_exists: Status::Fails,
            product_vanishes: Status::Inconclusive,
            limit_matches: TriVerdict::new(Status::Inconclusive, "Stieltjes integral diverges"),
            limit: f64::NAN,
            target,
            status: Status::Fails,
        });
    }
    let mut s_vals = Vec::new();
    let mut prods = Vec::new();
    for (p, &v) in parts.iter().zip(&pts) {
        let fg = f(v) * g(v);
        prods.push(fg.abs());
        s_vals.push(1.0 - p.as_ref().unwrap() / fg);
    }
    let n = pts.len();
    let depth: Vec<f64> = pts.iter().map(|v| (-v.ln()).ln()).collect();
    let prod_trend = ls_slope(&depth[n / 2..], &prods[n / 2..].iter().map(|p| p.max(1e-300).ln()).collect::<Vec<_>>());
    let product_vanishes = if prods[n - 1] < 1e-12 * prods[0].max(1e-300) || (prod_trend < -0.5 && prods[n - 1] < prods[0]) {
        Status::Holds
    } else if prod_trend > -0.05 {
        Status::Fails
    } else {
        Status::Inconclusive
    };
    let dev: Vec<f64> = s_vals.iter().map(|s| (s - target).abs()).collect();
    let lm = vanishing_verdict(&pts, &depth, &dev, 0.05, 0.1);
    let limit = s_vals[n - 1];
    let status = Status::Holds.and(product_vanishes).and(lm.status);
    Ok(StieltjesReport { integral_exists: Status::Holds, product_vanishes, limit_matches: lm, limit, target, status })
}

/// ε(x) = x f'(x)/f(x) → 0 (normalized slow variation).
pub fn karamata_rep_check(h: &Handle, regime: Regime, policy: &GridPolicy) -> Result<TriVerdict> {
    let (h, regime) = normalize(h, regime)?;
    let pts = policy.points(&h, regime)?;
    let eps: Vec<f64> = pts.iter().map(|&v| h.epsilon(v, regime).abs()).collect();
    if eps.iter().any(|e| !e.is_finite()) {
        return Ok(TriVerdict::new(Status::Inconclusive, "derivative evaluation failed"));
    }
    let depth: Vec<f64> = pts.iter().map(|&v| ln_depth(&h, regime, v)).collect();
    Ok(vanishing_verdict(&pts, &depth, &eps, 0.05, 0.1))
}
