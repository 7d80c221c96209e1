//! Neumann m-functions of the half problems, fundamental solutions and the
//! Weyl-disk machinery used at singular endpoints.

use std::sync::Arc;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;

use super::ode::{integrate, pair_rhs, single_rhs, Chart, OdeConfig, Scaled, S_MAX};
use crate::coeffs::{HalfProblem, ProblemSpec, ProfileConfig, Pt, Side, SideProfile};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct WeylConfig {
    pub ode: OdeConfig,
    /// Size of |z|·W·R (or of the tail products) below which the
    /// first-order layer formulas are used instead of integration.
    pub layer_tol: f64,
    /// Relative change of successive truncated m values accepted as converged.
    pub m_tol: f64,
    /// Weyl-disk radius, relative to |m|, required in limit-point mode.
    pub radius_tol: f64,
    /// Largest decade k in the cut sequence |z|·W(X)·R(X) = 10^k.
    pub max_cuts: usize,
    pub profile: ProfileConfig,
}

impl Default for WeylConfig {
    fn default() -> Self {
        WeylConfig {
            ode: OdeConfig::default(),
            layer_tol: 1e-14,
            m_tol: 1e-8,
            radius_tol: 1e-6,
            max_cuts: 80,
            profile: ProfileConfig::default(),
        }
    }
}

/// Weyl alternative at an endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LimitType {
    LimitCircle,
    LimitPoint,
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MMode {
    /// Regular endpoint, Neumann condition imposed at the endpoint itself.
    Endpoint,
    /// Singular endpoint, limit of Neumann-capped truncations.
    Truncated,
}

/// Complex state (f, f^[1]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StateVec {
    pub value: C,
    pub quasi: C,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MSample {
    pub z: C,
    pub m: C,
    pub mode: MMode,
    /// Distance |x| of the last cut point (truncated mode).
    pub truncation: Option<f64>,
    pub disk_radius: Option<f64>,
    pub wronskian_drift: f64,
    pub cuts: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct MTraceRow {
    pub y: f64,
    pub sample: std::result::Result<MSample, String>,
    /// Invariant violations (Nevanlinna or Stieltjes sign) found on this row.
    pub flags: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct MTrace {
    pub side: Side,
    pub rows: Vec<MTraceRow>,
}

impl MTrace {
    pub fn ys(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.y).collect()
    }

    /// m values, None where the sample failed.
    pub fn values(&self) -> Vec<Option<C>> {
        self.rows.iter().map(|r| r.sample.as_ref().ok().map(|s| s.m)).collect()
    }
}

/// One Weyl-disk evaluation along the cut sequence.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct CutRecord {
    pub decade: usize,
    pub distance: f64,
    pub m: C,
    pub radius: Option<f64>,
}

/// Solver for one side: the half problem, its profile and the endpoint type.
#[derive(Debug, Clone)]
pub struct SideSolver {
    pub prof: SideProfile,
    pub chart: Chart,
    pub cfg: WeylConfig,
    pub limit: LimitType,
}

fn ln_abs(v: f64) -> f64 {
    v.abs().ln()
}

impl SideSolver {
    pub fn new(problem: &ProblemSpec, side: Side, cfg: WeylConfig) -> Result<Self> {
        Self::from_half(Arc::new(problem.half(side)), cfg)
    }

    pub fn from_half(half: Arc<HalfProblem>, cfg: WeylConfig) -> Result<Self> {
        let prof = SideProfile::from_half(half, cfg.profile)?;
        let chart = Chart { len: prof.len() };
        let mut solver = SideSolver { prof, chart, cfg, limit: LimitType::LimitCircle };
        if !solver.is_regular() {
            solver.limit = solver.probe_limit_type().0;
        }
        Ok(solver)
    }

    pub fn half(&self) -> &HalfProblem {
        &self.prof.half
    }

    pub fn is_regular(&self) -> bool {
        self.prof.w_total.is_some() && self.prof.r_total.is_some()
    }

    /// Start of the integration: the largest t = t0·4^{-j} with a·W(t)·R(t) ≤ layer_tol.
    pub fn start_point(&self, a: f64) -> Result<Pt> {
        let len = self.prof.len();
        let mut t = if len.is_finite() { (0.5 * len).min(1.0) } else { 1.0 };
        for _ in 0..480 {
            let p = self.prof.pt(t);
            let prod = a * self.prof.w_hat_at(&p)? * self.prof.r_hat_at(&p)?;
            if prod <= self.cfg.layer_tol {
                return Ok(p);
            }
            t *= 0.25;
        }
        Err(Error::Integrator("no start layer found near 0".into()))
    }

    /// Point near a regular endpoint beyond which the layer formula is accurate.
    pub fn end_point(&self, a: f64) -> Result<Pt> {
        let len = self.prof.len();
        let mut d = 0.5 * len;
        for _ in 0..480 {
            let p = Pt::right(d, len);
            let prod = a * self.prof.w_tail(&p)? * self.prof.r_tail(&p)?;
            if prod <= self.cfg.layer_tol {
                return Ok(p);
            }
            d *= 0.25;
        }
        Err(Error::Integrator("no end layer found".into()))
    }

    /// State [s, s1, c, c1, ∫w|c|^2] at the start layer.
    fn pair_start(&self, z: C) -> Result<(f64, Scaled<5>)> {
        let p = self.start_point(z.norm())?;
        let w = self.prof.w_hat_at(&p)?;
        let r = self.prof.r_hat_at(&p)?;
        let one = C::new(1.0, 0.0);
        let y = [C::new(r, 0.0), one, one, -z * w, C::new(w, 0.0)];
        Ok((self.chart.coord(&p), Scaled { y, log_scale: 0.0 }))
    }

    fn drift(st: &Scaled<5>) -> f64 {
        let y = &st.y;
        let wr = y[0] * y[3] - y[1] * y[2];
        let target = (-2.0 * st.log_scale).exp();
        let size = y[0].norm() * y[3].norm() + y[1].norm() * y[2].norm();
        (wr + target).norm() / target.max(size)
    }

    /// ln(a·W·R) at chart coordinate s.
    fn ln_product(&self, a: f64, s: f64) -> Result<f64> {
        let (p, _) = self.chart.at(s);
        Ok(a.ln() + ln_abs(self.prof.w_hat_at(&p)?) + ln_abs(self.prof.r_hat_at(&p)?))
    }

    /// Chart coordinate where a·W·R = 10^k, searched above `lo`; None if beyond the chart.
    fn cut_coord(&self, a: f64, k: usize, lo: f64) -> Result<Option<f64>> {
        let target = k as f64 * std::f64::consts::LN_10;
        if self.ln_product(a, S_MAX)? < target {
            return Ok(None);
        }
        let (mut l, mut h) = (lo, S_MAX);
        if self.ln_product(a, l)? >= target {
            return Ok(Some(l));
        }
        for _ in 0..80 {
            let mid = 0.5 * (l + h);
            if self.ln_product(a, mid)? < target {
                l = mid;
            } else {
                h = mid;
            }
            if h - l < 1e-9 * (1.0 + h.abs()) {
                break;
            }
        }
        Ok(Some(h))
    }

    fn radius(z: C, st: &Scaled<5>) -> Option<f64> {
        if z.im == 0.0 {
            return None;
        }
        let ln_r = -(2.0 * z.im.abs()).ln() - st.y[4].re.ln() - 2.0 * st.log_scale;
        Some(ln_r.exp())
    }

    /// Runs the cut sequence. `stop` decides after each cut whether to finish.
    fn cut_sequence<F>(&self, z: C, mut stop: F) -> Result<(Vec<CutRecord>, f64, bool)>
    where
        F: FnMut(&[CutRecord]) -> bool,
    {
        let (mut s, mut st) = self.pair_start(z)?;
        let rhs = pair_rhs(self.half(), z);
        let a = z.norm();
        let mut cuts: Vec<CutRecord> = Vec::new();
        let mut drift: f64 = Self::drift(&st);
        // Decades of a·W·R first; when the product saturates inside the chart
        // (logarithmic growth), finish with evenly spaced cuts up to its edge.
        let mut extra: Vec<f64> = Vec::new();
        for k in 1..=self.cfg.max_cuts + 4 {
            let sk = if extra.is_empty() && k <= self.cfg.max_cuts {
                match self.cut_coord(a, k, s)? {
                    Some(v) => v,
                    None => {
                        extra = (1..=4).rev().map(|j| s + (S_MAX - s) * (5 - j) as f64 / 4.0).collect();
                        extra.pop().unwrap()
                    }
                }
            } else {
                match extra.pop() {
                    Some(v) => v,
                    None => break,
                }
            };
            let (next, _) = integrate(&rhs, s, sk, st, 4, &self.cfg.ode)?;
            st = next;
            s = sk;
            drift = drift.max(Self::drift(&st));
            let (p, _) = self.chart.at(s);
            cuts.push(CutRecord {
                decade: k,
                distance: if self.chart.len.is_finite() { p.delta } else { p.t },
                m: st.y[1] / st.y[3],
                radius: Self::radius(z, &st),
            });
            if stop(&cuts) {
                return Ok((cuts, drift, true));
            }
        }
        Ok((cuts, drift, false))
    }

    /// Weyl-disk probe at z = 2i: limit point when the radius falls below the
    /// threshold, limit circle when it settles above it.
    pub fn probe_limit_type(&self) -> (LimitType, Vec<CutRecord>) {
        let z = C::new(0.0, 2.0);
        let thr = self.cfg.radius_tol;
        let res = self.cut_sequence(z, |c| c.last().and_then(|r| r.radius).is_some_and(|r| r < thr));
        match res {
            Ok((cuts, _, true)) => (LimitType::LimitPoint, cuts),
            Ok((cuts, _, false)) => {
                let radii: Vec<f64> = cuts.iter().filter_map(|c| c.radius).collect();
                let n = radii.len();
                if n >= 4 {
                    let last = radii[n - 1];
                    let prev = radii[n - 4];
                    if last > thr && ((prev - last) / last).abs() < 1e-3 {
                        return (LimitType::LimitCircle, cuts);
                    }
                }
                (LimitType::Undetermined, cuts)
            }
            Err(_) => (LimitType::Undetermined, Vec::new()),
        }
    }

    /// Neumann m-function m(z) of the hat problem on (0, L).
    pub fn m_hat(&self, z: C) -> Result<MSample> {
        if z.im == 0.0 && z.re >= 0.0 {
            return Err(Error::Precondition(format!("z = {z} lies on [0, inf)")));
        }
        if self.is_regular() {
            return self.m_regular(z);
        }
        let tol = self.cfg.m_tol;
        let rtol = self.cfg.radius_tol;
        let need_radius = self.limit == LimitType::LimitPoint && z.im != 0.0;
        let converged = |c: &[CutRecord]| {
            let n = c.len();
            if n < 3 {
                return false;
            }
            let m = c[n - 1].m;
            let ok_m = (m - c[n - 2].m).norm() <= tol * m.norm() && (c[n - 2].m - c[n - 3].m).norm() <= 10.0 * tol * m.norm();
            let ok_r = !need_radius || c[n - 1].radius.is_some_and(|r| r <= rtol * m.norm());
            ok_m && ok_r
        };
        let (cuts, drift, done) = self.cut_sequence(z, converged)?;
        let last = cuts.last().ok_or_else(|| Error::Convergence("no cut point reachable".into()))?;
        if !done {
            let trace: Vec<String> = cuts
                .iter()
                .rev()
                .take(4)
                .map(|c| format!("k={} m={:.10e}{:+.10e}i", c.decade, c.m.re, c.m.im))
                .collect();
            return Err(Error::Convergence(format!(
                "Weyl disk did not contract at z = {z}; last cuts: {}",
                trace.join(", ")
            )));
        }
        Ok(MSample {
            z,
            m: last.m,
            mode: MMode::Truncated,
            truncation: Some(last.distance),
            disk_radius: last.radius,
            wronskian_drift: drift,
            cuts: cuts.len(),
        })
    }

    fn m_regular(&self, z: C) -> Result<MSample> {
        let (s0, st) = self.pair_start(z)?;
        let a = z.norm();
        let pe = self.end_point(a)?;
        let se = self.chart.coord(&pe);
        let rhs = pair_rhs(self.half(), z);
        let (st, _) = integrate(&rhs, s0, se, st, 4, &self.cfg.ode)?;
        let tw = self.prof.w_tail(&pe)?;
        let s1 = st.y[1] - z * st.y[0] * tw;
        let c1 = st.y[3] - z * st.y[2] * tw;
        Ok(MSample {
            z,
            m: s1 / c1,
            mode: MMode::Endpoint,
            truncation: None,
            disk_radius: None,
            wronskian_drift: Self::drift(&st).max(a * tw * self.prof.r_tail(&pe)?),
            cuts: 0,
        })
    }

    /// Solution with data (f, f^[1]) at 0, evaluated at distance t from 0.
    pub fn solve_from_zero(&self, z: C, init: StateVec, t: f64) -> Result<StateVec> {
        if t == 0.0 {
            return Ok(init);
        }
        let len = self.prof.len();
        if !(t > 0.0 && t < len) {
            return Err(Error::Domain { x: t, end: len });
        }
        let p0 = self.start_point(z.norm())?;
        let p0 = if p0.t < t { p0 } else { self.prof.pt(t) };
        let w = self.prof.w_hat_at(&p0)?;
        let r = self.prof.r_hat_at(&p0)?;
        let y0 = [init.value + init.quasi * r, init.quasi - z * init.value * w];
        let rhs = single_rhs(self.half(), z);
        let st = Scaled { y: y0, log_scale: 0.0 };
        let (st, _) = integrate(&rhs, self.chart.coord(&p0), self.chart.coord_of_t(t), st, 2, &self.cfg.ode)?;
        let f = st.log_scale.exp();
        Ok(StateVec { value: st.y[0] * f, quasi: st.y[1] * f })
    }
}

/// Neumann m-function of one side of the problem. On the minus side the
/// problem is reflected to (0, |b-|); the m-function is unchanged by that map.
pub fn m_function(problem: &ProblemSpec, side: Side, z: C, cfg: &WeylConfig) -> Result<MSample> {
    SideSolver::new(problem, side, *cfg)?.m_hat(z)
}

/// Checks Nevanlinna and Stieltjes signs of a sample at z = iy.
pub fn sample_flags(s: &MSample) -> Vec<String> {
    let mut f = Vec::new();
    if s.z.im > 0.0 && !(s.m.im > 0.0) {
        f.push("Im m <= 0 in the upper half-plane".into());
    }
    if s.z.re == 0.0 && !(s.m.re > 0.0) {
        f.push("Re m(iy) <= 0".into());
    }
    if s.z.im == 0.0 && !(s.m.re > 0.0) {
        f.push("m(x) <= 0 on the negative axis".into());
    }
    f
}

impl SideSolver {
    /// Samples m(iy) over a y-grid in parallel.
    pub fn trace(&self, ys: &[f64]) -> Result<MTrace> {
        if ys.iter().any(|&y| !(y > 0.0)) || ys.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Precondition("y-grid must be positive and strictly increasing".into()));
        }
        let rows = ys
            .par_iter()
            .map(|&y| match self.m_hat(C::new(0.0, y)) {
                Ok(s) => MTraceRow { y, flags: sample_flags(&s), sample: Ok(s) },
                Err(e) => MTraceRow { y, flags: vec!["sample failed".into()], sample: Err(e.to_string()) },
            })
            .collect();
        Ok(MTrace { side: self.prof.side, rows })
    }
}

pub fn m_trace(problem: &ProblemSpec, side: Side, ys: &[f64], cfg: &WeylConfig) -> Result<MTrace> {
    SideSolver::new(problem, side, *cfg)?.trace(ys)
}

/// Log-spaced grid with `n` points from a to b inclusive.
pub fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    let (la, lb) = (a.ln(), b.ln());
    (0..n).map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp()).collect()
}

/// Solution of the side equation from data at 0, at signed position x.
pub fn integrate_system(problem: &ProblemSpec, side: Side, z: C, x: f64, init: StateVec, cfg: &WeylConfig) -> Result<StateVec> {
    let solver = SideSolver::new(problem, side, *cfg)?;
    let t = x * side.sign();
    let out = solver.solve_from_zero(z, StateVec { value: init.value, quasi: init.quasi * side.sign() }, t)?;
    Ok(StateVec { value: out.value, quasi: out.quasi * side.sign() })
}

/// (s, c) at signed position x, with s(0)=0, s^[1](0)=1, c(0)=1, c^[1](0)=0.
pub fn fundamental_solutions(problem: &ProblemSpec, side: Side, z: C, x: f64, cfg: &WeylConfig) -> Result<(StateVec, StateVec)> {
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    let s = integrate_system(problem, side, z, x, StateVec { value: zero, quasi: one }, cfg)?;
    let c = integrate_system(problem, side, z, x, StateVec { value: one, quasi: zero }, cfg)?;
    Ok((s, c))
}

/// Atkinson asymptotic i·f(y) in hat form; equals +i f+(y) on the plus side
/// and -i f-(y) = +i|f-(y)| on the minus side.
pub fn atkinson_predict(profile: &SideProfile, y: f64) -> Result<C> {
    Ok(C::new(0.0, profile.small_f_hat(y)?))
}

/// Relative residual |m̂(z) + 1/(z m(z))| / |m̂(z)| for the dual (w and r exchanged) problem.
pub fn duality_check(problem: &ProblemSpec, side: Side, z: C, cfg: &WeylConfig) -> Result<f64> {
    let half = Arc::new(problem.half(side));
    let primal = SideSolver::from_half(half.clone(), *cfg)?;
    if primal.is_regular() {
        return Err(Error::NotApplicable("the endpoint is regular; the dual m-function relation does not hold".into()));
    }
    let dual = SideSolver::from_half(Arc::new(half.dual()), *cfg)?;
    let m = primal.m_hat(z)?.m;
    let md = dual.m_hat(z)?.m;
    Ok((md + 1.0 / (z * m)).norm() / md.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::CoefficientExpr as E;

    fn unit(len: f64) -> ProblemSpec {
        ProblemSpec::new("unit", -len, len, E::constant(1.0), E::constant(1.0), E::constant(1.0), E::constant(1.0)).unwrap()
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
    fn neumann_unit_interval() {
        let m = m_function(&unit(1.0), Side::Plus, C::new(-1.0, 0.0), &WeylConfig::default()).unwrap();
        assert!((m.m.re - 1f64 / 1f64.tanh()).abs() < 1e-8, "{:?}", m);
        assert!(m.m.im.abs() < 1e-15);
    }

    #[test]
    fn half_line_limit_point() {
        let cfg = WeylConfig::default();
        let s = SideSolver::new(&unit(f64::INFINITY), Side::Plus, cfg).unwrap();
        assert_eq!(s.limit, LimitType::LimitPoint);
        for &y in &[0.01, 1.0, 100.0, 1e6] {
            let z = C::new(0.0, y);
            let exact = C::new(0.0, 1.0) / z.sqrt();
            let m = s.m_hat(z).unwrap();
            assert!((m.m - exact).norm() / exact.norm() < 1e-6, "y={y} {:?} {exact}", m.m);
            assert!(m.wronskian_drift < 1e-7, "drift {}", m.wronskian_drift);
        }
        let neg = s.m_hat(C::new(-4.0, 0.0)).unwrap();
        assert!((neg.m.re - 0.5).abs() < 1e-7);
    }

    #[test]
    fn conjugate_symmetry_is_exact() {
        let s = SideSolver::new(&log_weights(0.5, 1.0), Side::Plus, WeylConfig::default()).unwrap();
        let a = s.m_hat(C::new(0.0, 10.0)).unwrap().m;
        let b = s.m_hat(C::new(0.0, -10.0)).unwrap().m;
        assert_eq!(a, b.conj());
    }

    #[test]
    fn singular_log_weight_is_limit_point() {
        let s = SideSolver::new(&log_weights(0.5, 1.0), Side::Plus, WeylConfig::default()).unwrap();
        assert_eq!(s.limit, LimitType::LimitPoint);
        let m = s.m_hat(C::new(0.0, 100.0)).unwrap();
        assert!(m.m.im > 0.0 && m.m.re > 0.0);
    }

    #[test]
    fn fundamental_pair_constant_coefficients() {
        let p = unit(1.0);
        let z = C::new(-1.0, 0.0);
        let (s, c) = fundamental_solutions(&p, Side::Plus, z, 0.7, &WeylConfig::default()).unwrap();
        assert!((c.value.re - 0.7f64.cosh()).abs() < 1e-8);
        assert!((s.value.re - 0.7f64.sinh()).abs() < 1e-8);
        let w = s.value * c.quasi - s.quasi * c.value;
        assert!((w + 1.0).norm() < 1e-8);
        let z = C::new(3.0, 2.0);
        let (s, c) = fundamental_solutions(&p, Side::Minus, z, -0.4, &WeylConfig::default()).unwrap();
        let k = z.sqrt();
        assert!((c.value - (k * 0.4).cos()).norm() < 1e-8);
        assert!((s.value - (-(k * 0.4).sin() / k)).norm() < 1e-8);
    }

    #[test]
    fn dual_relation_half_line() {
        let r = duality_check(&unit(f64::INFINITY), Side::Plus, C::new(0.0, 2.0), &WeylConfig::default()).unwrap();
        assert!(r < 1e-6);
        assert!(matches!(
            duality_check(&unit(1.0), Side::Plus, C::new(0.0, 2.0), &WeylConfig::default()),
            Err(Error::NotApplicable(_))
        ));
    }
}
