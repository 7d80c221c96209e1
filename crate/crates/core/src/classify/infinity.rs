//! Regularity of the critical point at infinity: Q-ratio traces, the D-ratio of
//! the two m-functions, and route selection.

use std::sync::Arc;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;

use super::bounded::boundedness_verdict;
use super::{ClassifyConfig, CriticalPoint, RegularityVerdict, RouteTag, SideCheck};
use crate::coeffs::{ProblemSpec, Side, SideProfile};
use crate::error::Result;
use crate::karamata::{is_positively_increasing, is_slowly_varying, GridPolicy, Handle, Regime, Status, TriVerdict};
use crate::weyl::{log_grid, MTrace, SideSolver};

/// Q(x) = (1 + W-(R-^{-1}(-x)) / W+(R+^{-1}(x)))^{-1} on a grid decreasing to 0.
#[derive(Debug, Clone, Serialize)]
pub struct QTrace {
    pub x: Vec<f64>,
    /// |Q(x)|; +∞ where the denominator vanishes, NaN where inversion failed.
    pub q: Vec<f64>,
    pub verdict: TriVerdict,
}

/// Grid x0·2^{-k} with x0 inside both ranges of R.
pub fn q_grid(plus: &SideProfile, minus: &SideProfile, depth: usize) -> Vec<f64> {
    let x0 = 1e-3f64.min(0.5 * plus.r_range()).min(0.5 * minus.r_range());
    (0..depth).map(|k| x0 * 0.5f64.powi(k as i32)).collect()
}

pub fn q_ratio_trace(plus: &SideProfile, minus: &SideProfile, x_grid: &[f64]) -> QTrace {
    let q: Vec<f64> = x_grid
        .par_iter()
        .map(|&x| match (plus.wr_inv_hat(x), minus.wr_inv_hat(x)) {
            (Ok(wp), Ok(wm)) => {
                // signed W-(R-^{-1}(-x)) = -wm; cancellation to rounding level counts as zero
                let den = 1.0 - wm / wp;
                if den.abs() <= 1e-13 {
                    f64::INFINITY
                } else {
                    (1.0 / den).abs()
                }
            }
            _ => f64::NAN,
        })
        .collect();
    let depth: Vec<f64> = x_grid.iter().map(|x| -x.ln()).collect();
    let verdict = boundedness_verdict(&depth, &q);
    QTrace { x: x_grid.to_vec(), q, verdict }
}

/// Limit point of a D-ratio test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DRegime {
    Infinity,
    Zero,
}

#[derive(Debug, Clone, Serialize)]
pub struct DCheck {
    pub regime: DRegime,
    /// (y, max{Im m+, Im m-}/|m+(iy) + m-(-iy)|)
    pub ratios: Vec<(f64, f64)>,
    pub verdict: TriVerdict,
    /// Re m+(iy)·Re m-(iy) > 0 on the whole grid.
    pub precondition: Status,
    /// Im m±/Re m± = O(1), plus side first.
    pub one_sided: [TriVerdict; 2],
}

/// D-ratio boundedness from two traces on a common y-grid. Samples missing on
/// either side are dropped.
pub fn d_property_check(trace_plus: &MTrace, trace_minus: &MTrace, regime: DRegime) -> DCheck {
    let mp = trace_plus.values();
    let mm = trace_minus.values();
    let ys = trace_plus.ys();
    let same_grid = ys.len() == trace_minus.rows.len() && ys.iter().zip(trace_minus.ys()).all(|(a, b)| *a == b);
    let mut rows: Vec<(f64, C, C)> = Vec::new();
    if same_grid {
        for (k, &y) in ys.iter().enumerate() {
            if let (Some(a), Some(b)) = (mp[k], mm[k]) {
                rows.push((y, a, b));
            }
        }
    }
    // order toward the limit point
    if regime == DRegime::Zero {
        rows.reverse();
    }
    let depth: Vec<f64> = rows.iter().map(|(y, _, _)| if regime == DRegime::Infinity { y.ln() } else { -y.ln() }).collect();
    let ratio: Vec<f64> = rows.iter().map(|(_, a, b)| a.im.max(b.im) / (a + b.conj()).norm()).collect();
    let bad = rows.iter().filter(|(_, a, b)| !(a.re * b.re > 0.0)).count();
    let precondition = Status::from_bool(bad == 0);
    let mut verdict = boundedness_verdict(&depth, &ratio);
    if !same_grid {
        verdict = TriVerdict::new(Status::Inconclusive, "traces are not on a common grid");
    } else if bad > 0 {
        verdict.status = Status::Inconclusive;
        verdict.note = format!("Re m+ Re m- <= 0 at {bad} samples (integrator failure)");
    }
    let one = |pick: fn(&(f64, C, C)) -> C| {
        let v: Vec<f64> = rows.iter().map(|r| pick(r)).map(|m| m.im / m.re).collect();
        boundedness_verdict(&depth, &v)
    };
    DCheck {
        regime,
        ratios: rows.iter().map(|r| r.0).zip(ratio).collect(),
        verdict,
        precondition,
        one_sided: [one(|r| r.1), one(|r| r.2)],
    }
}

/// Signed W∘R^{-1} on the side of `prof` as a linear handle.
pub fn wr_inv_handle(prof: &SideProfile) -> Handle {
    let p = Arc::new(prof.clone());
    let range = prof.r_range();
    match prof.side {
        Side::Plus => Handle::linear("W+∘R+^{-1}", (0.0, range), move |x| p.wr_inv_hat(x).unwrap_or(f64::NAN)),
        Side::Minus => Handle::linear("W-∘R-^{-1}", (-range, 0.0), move |x| p.wr_inv(x).unwrap_or(f64::NAN)),
    }
}

/// Slow variation or positive increase; errors become inconclusive verdicts.
pub fn karamata_check(h: &Handle, regime: Regime, pi: bool, policy: &GridPolicy) -> TriVerdict {
    let r = if pi { is_positively_increasing(h, regime, policy) } else { is_slowly_varying(h, regime, policy) };
    r.unwrap_or_else(|e| TriVerdict::new(Status::Inconclusive, e.to_string()))
}

/// D-ratio test on [y_lo, y_hi] at infinity.
pub fn d_infinity(problem: &ProblemSpec, cfg: &ClassifyConfig) -> Result<DCheck> {
    let (lo, hi, n) = cfg.d_grid;
    let ys = log_grid(lo, hi, n);
    let (tp, tm) = rayon::join(
        || SideSolver::new(problem, Side::Plus, cfg.weyl).and_then(|s| s.trace(&ys)),
        || SideSolver::new(problem, Side::Minus, cfg.weyl).and_then(|s| s.trace(&ys)),
    );
    Ok(d_property_check(&tp?, &tm?, DRegime::Infinity))
}

/// Route order: positive increase at 0± on either side, then slow variation on
/// both sides with the Q-trace, then the numeric D-ratio (or its one-sided
/// Im/Re variant), otherwise not covered.
pub fn regularity_at_infinity(problem: &ProblemSpec, cfg: &ClassifyConfig) -> Result<RegularityVerdict> {
    let plus = SideProfile::new(problem, Side::Plus, cfg.weyl.profile)?;
    let minus = SideProfile::new(problem, Side::Minus, cfg.weyl.profile)?;
    let hp = wr_inv_handle(&plus);
    let hm = wr_inv_handle(&minus);
    let mut checks = Vec::new();
    let ((pi_p, pi_m), cross) = rayon::join(
        || {
            rayon::join(
                || karamata_check(&hp, Regime::ZeroPlus, true, &cfg.grid),
                || karamata_check(&hm, Regime::ZeroMinus, true, &cfg.grid),
            )
        },
        || if cfg.cross_check { Some(d_infinity(problem, cfg)) } else { None },
    );
    let cross = match cross {
        Some(Ok(d)) => Some(d),
        Some(Err(e)) => {
            checks.push(SideCheck::note("d_ratio", e.to_string()));
            None
        }
        None => None,
    };
    let pi_any = pi_p.status == Status::Holds || pi_m.status == Status::Holds;
    checks.push(SideCheck::new("positively_increasing", Regime::ZeroPlus, pi_p));
    checks.push(SideCheck::new("positively_increasing", Regime::ZeroMinus, pi_m));
    let mut out = RegularityVerdict::new(CriticalPoint::Infinity);
    out.checks = checks;
    if pi_any {
        out.route = RouteTag::PositivelyIncreasing;
        out.status = TriVerdict::new(Status::Holds, "W∘R^{-1} is positively increasing at 0 on one side");
        out.d_check = cross;
        return Ok(out);
    }
    let (sv_p, sv_m) = rayon::join(
        || karamata_check(&hp, Regime::ZeroPlus, false, &cfg.grid),
        || karamata_check(&hm, Regime::ZeroMinus, false, &cfg.grid),
    );
    let both_sv = sv_p.status == Status::Holds && sv_m.status == Status::Holds;
    out.checks.push(SideCheck::new("slowly_varying", Regime::ZeroPlus, sv_p));
    out.checks.push(SideCheck::new("slowly_varying", Regime::ZeroMinus, sv_m));
    if both_sv {
        let q = q_ratio_trace(&plus, &minus, &q_grid(&plus, &minus, cfg.q_depth));
        out.route = RouteTag::SlowlyVaryingQ;
        out.status = q.verdict.clone();
        out.q_trace = Some(q);
        out.d_check = cross;
        return Ok(out);
    }
    let d = match cross {
        Some(d) => d,
        None => d_infinity(problem, cfg)?,
    };
    if d.verdict.status == Status::Inconclusive && d.one_sided.iter().any(|v| v.status == Status::Holds) {
        out.route = RouteTag::OneSidedAsymptotic;
        out.status = TriVerdict::new(Status::Holds, "Im m/Re m bounded on one side");
    } else if d.verdict.status == Status::Inconclusive {
        out.route = RouteTag::NotCovered;
        out.status = TriVerdict::new(Status::Inconclusive, "no analytic route applies and the D-ratio is inconclusive");
    } else {
        out.route = RouteTag::NumericDProperty;
        out.status = d.verdict.clone();
    }
    out.d_check = Some(d);
    Ok(out)
}
