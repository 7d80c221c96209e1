//! Kernel of the coupled operator and the Jordan chain at 0.

use serde::Serialize;

use crate::coeffs::{ProblemSpec, Side, SideProfile};
use crate::error::Result;
use crate::quad::from_zero;

#[derive(Debug, Clone, Serialize)]
pub struct JordanReport {
    /// 1 when constants are admissible (w integrable on both sides), else 0.
    pub kernel_dim: u8,
    /// 2 when a generalized eigenvector g with A g = 1 was built and verified,
    /// 1 when the kernel is one-dimensional without a chain, 0 without kernel.
    pub chain_length: u8,
    /// W+(b+) + W-(b-), signed.
    pub kernel_sum: Option<f64>,
    /// (x, g(x)) samples of the generalized eigenvector.
    pub samples: Vec<(f64, f64)>,
    /// sup-norm residual of A g = 1 in integrated form.
    pub residual: Option<f64>,
    pub note: String,
}

/// Relative size of the kernel sum treated as zero.
const SUM_TOL: f64 = 1e-12;
/// Residual below which the chain is accepted.
const CHAIN_TOL: f64 = 1e-8;

/// g on one side in hat coordinates: ±(∫_0^t R ŵ + R(t)·∫_t^b ŵ).
fn g_side(prof: &SideProfile, t: f64) -> Result<f64> {
    let cfg = prof.cfg.quad;
    let rw = |s: f64| prof.r_hat(s).unwrap_or(f64::NAN) * prof.half.w.eval(&prof.pt(s));
    let tail = if t >= prof.len() { 0.0 } else { prof.w_tail(&prof.pt(t))? };
    let r = if t >= prof.len() { prof.r_total.unwrap_or(f64::NAN) } else { prof.r_hat(t)? };
    let v = from_zero(&rw, t, &cfg)? + r * tail;
    Ok(prof.side.sign() * v)
}

/// The same g from its quasi-derivative: ±∫_0^t r̂(s)·∫_s^b ŵ ds.
fn g_side_check(prof: &SideProfile, t: f64) -> Result<f64> {
    let cfg = prof.cfg.quad;
    let f = |s: f64| {
        let p = prof.pt(s);
        prof.half.r.eval(&p) * prof.w_tail(&p).unwrap_or(f64::NAN)
    };
    Ok(prof.side.sign() * from_zero(&f, t, &cfg)?)
}

pub fn kernel_analysis(problem: &ProblemSpec) -> Result<JordanReport> {
    let plus = SideProfile::new(problem, Side::Plus, Default::default())?;
    let minus = SideProfile::new(problem, Side::Minus, Default::default())?;
    let (wp, wm) = match (plus.w_total, minus.w_total) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Ok(JordanReport {
                kernel_dim: 0,
                chain_length: 0,
                kernel_sum: None,
                samples: Vec::new(),
                residual: None,
                note: "w is not integrable on both sides; constants are not admissible".into(),
            })
        }
    };
    let sum = wp - wm;
    let mut rep = JordanReport { kernel_dim: 1, chain_length: 1, kernel_sum: Some(sum), samples: Vec::new(), residual: None, note: String::new() };
    if sum.abs() > SUM_TOL * (wp + wm) {
        rep.note = "W+(b+) + W-(b-) != 0; no generalized eigenvector".into();
        return Ok(rep);
    }
    // quasi-derivatives at 0 are W+(b+) and -W-(b-); they match when the sum vanishes
    let mut res: f64 = sum.abs() / (wp + wm);
    for prof in [&minus, &plus] {
        let len = prof.len();
        let top = if len.is_finite() { len } else { 10.0 };
        let n = 40;
        let ts: Vec<f64> = match prof.side {
            Side::Minus => (1..=n).rev().map(|k| top * k as f64 / n as f64).collect(),
            Side::Plus => (1..=n).map(|k| top * k as f64 / n as f64).collect(),
        };
        for t in ts {
            let g = g_side(prof, t)?;
            let check = g_side_check(prof, t)?;
            res = res.max((g - check).abs() / g.abs().max(1.0));
            rep.samples.push((t * prof.side.sign(), g));
        }
        if prof.side == Side::Minus {
            rep.samples.push((0.0, 0.0));
        }
    }
    rep.residual = Some(res);
    if res < CHAIN_TOL {
        rep.chain_length = 2;
        rep.note = "generalized eigenvector g with A g = 1 verified".into();
    } else {
        rep.note = format!("construction residual {res:.3e} too large; chain not certified");
    }
    Ok(rep)
}
