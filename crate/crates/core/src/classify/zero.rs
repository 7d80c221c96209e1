//! Regularity of the critical point 0, discreteness of the decoupled parts, the
//! kernel condition and the moment identity ∫|R|w = ∫|W(b)-W| r.

use serde::Serialize;

use super::bounded::boundedness_verdict;
use super::infinity::{karamata_check, wr_inv_handle};
use super::{ClassifyConfig, CriticalPoint, RegularityVerdict, RouteTag, SideCheck, ZeroCase};
use crate::coeffs::{ProblemSpec, Pt, Side, SideProfile};
use crate::error::{Error, Result};
use crate::karamata::{vanishing_verdict, Regime, Status, TriVerdict};
use crate::quad;

/// W+(b+) + W-(b-) and whether it is nonzero.
#[derive(Debug, Clone, Serialize)]
pub struct KernelCondition {
    pub sum: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Nonzero relative to |W+(b+)| + |W-(b-)| at 1e-12.
    pub status: Status,
}

pub fn kernel_condition(problem: &ProblemSpec, cfg: &ClassifyConfig) -> Result<KernelCondition> {
    let plus = SideProfile::new(problem, Side::Plus, cfg.weyl.profile)?;
    let minus = SideProfile::new(problem, Side::Minus, cfg.weyl.profile)?;
    kernel_from_profiles(&plus, &minus)
}

fn kernel_from_profiles(plus: &SideProfile, minus: &SideProfile) -> Result<KernelCondition> {
    match (plus.w_end(), minus.w_end()) {
        (Some(wp), Some(wm)) => {
            let sum = wp + wm;
            let scale = wp.abs() + wm.abs();
            Ok(KernelCondition { sum, w_plus: wp, w_minus: wm, status: Status::from_bool(sum.abs() > 1e-12 * scale) })
        }
        _ => Err(Error::NotApplicable("w is not integrable on both sides".into())),
    }
}

/// Which product is tracked toward the endpoint of a side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscretenessForm {
    /// w and r both integrable: regular or limit circle.
    BothIntegrable,
    /// R(x)·∫_x^b w, for w integrable and r not.
    RTimesWTail,
    /// W(x)·∫_x^b r, for r integrable and w not.
    WTimesRTail,
    /// Neither integrable; no criterion applies.
    None,
}

#[derive(Debug, Clone, Serialize)]
pub struct SideDiscreteness {
    pub side: Side,
    pub form: DiscretenessForm,
    /// Product → 0 at the endpoint (empty essential spectrum).
    pub limit: TriVerdict,
    /// Product bounded (0 outside the essential spectrum).
    pub sup: TriVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct DiscretenessReport {
    pub sides: [SideDiscreteness; 2],
    pub status: Status,
}

fn side_discreteness(prof: &SideProfile, depth: usize) -> SideDiscreteness {
    let form = match (prof.w_total.is_some(), prof.r_total.is_some()) {
        (true, true) => DiscretenessForm::BothIntegrable,
        (true, false) => DiscretenessForm::RTimesWTail,
        (false, true) => DiscretenessForm::WTimesRTail,
        (false, false) => DiscretenessForm::None,
    };
    let make = |status, note: &str| TriVerdict::new(status, note);
    match form {
        DiscretenessForm::BothIntegrable => {
            return SideDiscreteness { side: prof.side, form, limit: make(Status::Holds, "w, r integrable"), sup: make(Status::Holds, "w, r integrable") }
        }
        DiscretenessForm::None => {
            return SideDiscreteness {
                side: prof.side,
                form,
                limit: make(Status::Inconclusive, "w, r both non-integrable"),
                sup: make(Status::Inconclusive, "w, r both non-integrable"),
            }
        }
        _ => {}
    }
    let len = prof.len();
    let pts: Vec<Pt> = (0..depth)
        .map(|k| if len.is_finite() { Pt::right(0.25 * len * 0.5f64.powi(k as i32), len) } else { Pt::left(2f64.powi(k as i32), len) })
        .collect();
    let diag: Vec<f64> = pts
        .iter()
        .map(|p| {
            let v = if form == DiscretenessForm::RTimesWTail {
                prof.r_hat_at(p).and_then(|a| Ok(a * prof.w_tail(p)?))
            } else {
                prof.w_hat_at(p).and_then(|a| Ok(a * prof.r_tail(p)?))
            };
            v.unwrap_or(f64::NAN)
        })
        .collect();
    let lin: Vec<f64> = pts.iter().map(|p| if len.is_finite() { -p.delta.ln() } else { p.t.ln() }).collect();
    let depth_ln: Vec<f64> = lin.iter().map(|v| v.abs().max(1e-300).ln()).collect();
    let coords: Vec<f64> = pts.iter().map(|p| if len.is_finite() { p.delta } else { p.t }).collect();
    let limit = if diag.iter().all(|v| v.is_finite()) {
        vanishing_verdict(&coords, &depth_ln, &diag, 0.05, 0.1)
    } else {
        make(Status::Inconclusive, "product not evaluable on the grid")
    };
    let mut sup = boundedness_verdict(&lin, &diag);
    sup.evidence = coords.iter().copied().zip(diag.iter().copied()).collect();
    SideDiscreteness { side: prof.side, form, limit, sup }
}

pub fn discreteness(problem: &ProblemSpec, cfg: &ClassifyConfig) -> Result<DiscretenessReport> {
    let plus = SideProfile::new(problem, Side::Plus, cfg.weyl.profile)?;
    let minus = SideProfile::new(problem, Side::Minus, cfg.weyl.profile)?;
    Ok(discreteness_from(&plus, &minus, cfg))
}

fn discreteness_from(plus: &SideProfile, minus: &SideProfile, cfg: &ClassifyConfig) -> DiscretenessReport {
    let (a, b) = rayon::join(|| side_discreteness(plus, cfg.q_depth), || side_discreteness(minus, cfg.q_depth));
    let status = a.limit.status.and(b.limit.status);
    DiscretenessReport { sides: [a, b], status }
}

/// Case dispatch on integrability of w± and r± at the endpoints.
pub fn regularity_at_zero(problem: &ProblemSpec, cfg: &ClassifyConfig) -> Result<RegularityVerdict> {
    let plus = SideProfile::new(problem, Side::Plus, cfg.weyl.profile)?;
    let minus = SideProfile::new(problem, Side::Minus, cfg.weyl.profile)?;
    let mut out = RegularityVerdict::new(CriticalPoint::Zero);
    out.a_plus = plus.w_total.map(|w| 1.0 / w);
    out.a_minus = minus.w_total.map(|w| -1.0 / w);
    let wp = plus.w_total.is_some();
    let wm = minus.w_total.is_some();
    let rp = plus.r_total.is_some();
    let rm = minus.r_total.is_some();
    let disc = discreteness_from(&plus, &minus, cfg);
    if wp && wm {
        let k = kernel_from_profiles(&plus, &minus)?;
        let nonzero = k.status == Status::Holds;
        out.route = RouteTag::Zero(if nonzero { ZeroCase::Iv } else { ZeroCase::A });
        out.kernel_equal = Some(nonzero);
        out.kernel_sum = Some(k.sum);
        out.status = TriVerdict::new(
            k.status,
            if nonzero { "W+(b+) + W-(b-) != 0" } else { "W+(b+) + W-(b-) = 0: ker A is strictly smaller than ker A^2" },
        );
    } else if wp != wm {
        out.route = RouteTag::Zero(ZeroCase::Iii);
        out.kernel_equal = Some(true);
        out.status = TriVerdict::new(Status::Holds, "w integrable on exactly one side");
    } else if rp || rm {
        out.route = RouteTag::Zero(ZeroCase::Ii);
        out.kernel_equal = Some(true);
        out.status = TriVerdict::new(Status::Holds, "w non-integrable on both sides, r integrable on one");
    } else {
        let hp = wr_inv_handle(&plus);
        let hm = wr_inv_handle(&minus);
        let (pp, pm) = rayon::join(
            || karamata_check(&hp, Regime::PlusInfinity, true, &cfg.grid),
            || karamata_check(&hm, Regime::MinusInfinity, true, &cfg.grid),
        );
        let any = pp.status == Status::Holds || pm.status == Status::Holds;
        let none = pp.status == Status::Fails && pm.status == Status::Fails;
        out.checks.push(SideCheck::new("positively_increasing", Regime::PlusInfinity, pp));
        out.checks.push(SideCheck::new("positively_increasing", Regime::MinusInfinity, pm));
        if any {
            out.route = RouteTag::Zero(ZeroCase::I);
            out.kernel_equal = Some(true);
            out.status = TriVerdict::new(Status::Holds, "W∘R^{-1} positively increasing at infinity on one side");
        } else {
            out.route = RouteTag::NotCovered;
            out.status = TriVerdict::new(
                Status::Inconclusive,
                if none { "w, r non-integrable on both sides and no positive increase at infinity" } else { "positive increase at infinity undetermined" },
            );
        }
    }
    out.critical = critical_regular(&out, &disc);
    out.discreteness = Some(disc);
    Ok(out)
}

/// Whether 0 is a regular critical point. With (0 ∉ c_s, ker A = ker A²) in
/// force, 0 is critical exactly when both sides accumulate at 0 (product
/// unbounded on each side). With a vanishing kernel sum and 0 outside both
/// essential spectra, 0 is an isolated eigenvalue with a Jordan chain, hence a
/// regular critical point.
fn critical_regular(v: &RegularityVerdict, disc: &DiscretenessReport) -> Status {
    let sups: Vec<Status> = disc
        .sides
        .iter()
        .map(|s| match s.form {
            DiscretenessForm::BothIntegrable => Status::Holds,
            DiscretenessForm::None => Status::Inconclusive,
            _ => s.sup.status,
        })
        .collect();
    match v.status.status {
        Status::Fails => {
            if sups.iter().all(|s| *s == Status::Holds) {
                Status::Holds
            } else {
                Status::Inconclusive
            }
        }
        Status::Inconclusive => Status::Inconclusive,
        Status::Holds => {
            if sups.iter().all(|s| *s == Status::Fails) {
                Status::Holds
            } else if sups.iter().any(|s| *s == Status::Holds) {
                Status::Fails
            } else {
                Status::Inconclusive
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MomentIdentity {
    pub side: Side,
    /// ∫|R| w, None when divergent.
    pub r_moment: Option<f64>,
    /// ∫|W(b) - W| r, None when divergent.
    pub w_moment: Option<f64>,
    pub status: Status,
}

fn side_integral<F: Fn(&Pt) -> Result<f64>>(len: f64, f: F, cfg: &quad::QuadConfig) -> Option<f64> {
    let g = |t: f64, d: f64| f(&Pt { t, delta: d, end: len }).unwrap_or(f64::NAN);
    let v = if len.is_finite() {
        quad::two_sided(&g, 0.0, len, cfg)
    } else {
        let h = |t: f64| g(t, f64::INFINITY);
        quad::from_zero(&h, 1.0, cfg).and_then(|a| Ok(a + quad::to_infinity(&h, 1.0, cfg)?))
    };
    v.ok().filter(|v| v.is_finite())
}

/// Both sides of ∫|R|w = ∫|W(b)-W| r on one side; they must agree to 1e-6
/// relative or diverge together.
pub fn kac_krein_identity_check(problem: &ProblemSpec, side: Side, cfg: &ClassifyConfig) -> Result<MomentIdentity> {
    let prof = SideProfile::new(problem, side, cfg.weyl.profile)?;
    if prof.w_total.is_none() {
        return Err(Error::NotApplicable("w is not integrable on this side".into()));
    }
    let len = prof.len();
    let q = cfg.weyl.profile.quad;
    let half = prof.half.clone();
    let r_moment = side_integral(len, |p| Ok(prof.r_hat_at(p)? * half.w.eval(p)), &q);
    let w_moment = side_integral(len, |p| Ok(prof.w_tail(p)? * half.r.eval(p)), &q);
    let status = match (r_moment, w_moment) {
        (Some(a), Some(b)) => Status::from_bool((a - b).abs() <= 1e-6 * a.abs().max(b.abs())),
        (None, None) => Status::Holds,
        _ => Status::Fails,
    };
    Ok(MomentIdentity { side, r_moment, w_moment, status })
}
