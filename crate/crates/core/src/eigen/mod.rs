//! Shooting eigensolver for the coupled operator, a finite-difference oracle
//! and the kernel / Jordan-chain analysis at 0.
//!
//! Each side is shot from its endpoint with Neumann data (u = 1, u^[1] = 0)
//! back to 0. On the plus side the hat problem is solved with z = λ, on the
//! minus side with z = -λ; the signed quasi-derivative on the minus side is
//! minus the hat one. Eigenvalues are the zeros of the matching determinant
//! D(λ) = u+(0) u-^[1](0) - u+^[1](0) u-(0).

pub mod fd;
pub mod kernel;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::Serialize;

pub use fd::{fd_oracle, FdSpectrum};
pub use kernel::{kernel_analysis, JordanReport};

use crate::coeffs::{ProblemSpec, Side};
use crate::error::{Error, Result};
use crate::weyl::ode::{integrate, Chart, OdeConfig, Scaled};
use crate::weyl::{SideSolver, WeylConfig};

#[derive(Debug, Clone, Copy)]
pub struct EigenConfig {
    pub weyl: WeylConfig,
    /// Scan panels per window, uniform in sign(λ)√|λ|.
    pub panels: usize,
    /// Relative width at which bisection stops.
    pub root_tol: f64,
    /// Normalized |D| below which a sign-change-free local minimum is reported.
    pub dip_tol: f64,
    /// Normalized |D| accepted at a polished root.
    pub residual_tol: f64,
    /// Relative distance of the Neumann cap from a singular finite endpoint.
    pub truncation: f64,
    /// Position of the Neumann cap at an infinite endpoint.
    pub far_cut: f64,
    /// Solve only the Neumann problem of one side (Neumann at 0 as well).
    pub decoupled: Option<Side>,
}

impl Default for EigenConfig {
    fn default() -> Self {
        let mut weyl = WeylConfig::default();
        weyl.ode = OdeConfig { rtol: 1e-11, atol: 1e-14, max_steps: 2_000_000 };
        EigenConfig {
            weyl,
            panels: 400,
            root_tol: 1e-13,
            dip_tol: 1e-8,
            residual_tol: 1e-6,
            truncation: 1e-10,
            far_cut: 1e4,
            decoupled: None,
        }
    }
}

/// Value and quasi-derivative at 0 of the Neumann solution shot from one end,
/// in hat form. Solution components carry a common factor e^{log_scale};
/// `krein` is ∫ ŵ u² over the side and carries e^{2 log_scale}.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Shot {
    pub value: f64,
    pub quasi: f64,
    pub log_scale: f64,
    pub krein: f64,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct CharSample {
    pub lambda: f64,
    /// D(λ) up to the positive factor e^{log_scale}.
    pub d: f64,
    pub log_scale: f64,
    /// |D| relative to the size of its two products.
    pub normalized: f64,
    pub plus: Option<Shot>,
    pub minus: Option<Shot>,
}

impl CharSample {
    /// D(λ) itself; may overflow for large |λ|.
    pub fn value(&self) -> f64 {
        self.d * self.log_scale.exp()
    }
}

/// Prepared side solvers, reused across λ.
pub struct Shooter {
    sides: Vec<(Side, SideSolver, bool)>,
    cfg: EigenConfig,
}

impl Shooter {
    pub fn new(problem: &ProblemSpec, cfg: &EigenConfig) -> Result<Self> {
        let wanted: Vec<Side> = match cfg.decoupled {
            Some(s) => vec![s],
            None => Side::BOTH.to_vec(),
        };
        let mut sides = Vec::new();
        for side in wanted {
            let s = SideSolver::new(problem, side, cfg.weyl)?;
            let truncated = !s.is_regular();
            sides.push((side, s, truncated));
        }
        Ok(Shooter { sides, cfg: *cfg })
    }

    /// Sides whose endpoint is replaced by a Neumann cap.
    pub fn truncated(&self) -> Vec<Side> {
        self.sides.iter().filter(|s| s.2).map(|s| s.0).collect()
    }

    fn shoot(&self, solver: &SideSolver, truncated: bool, z: f64) -> Result<Shot> {
        let prof = &solver.prof;
        let chart: Chart = solver.chart;
        let len = prof.len();
        let a = z.abs();
        let (se, y0) = if truncated {
            let s = if len.is_finite() { chart.coord_of_delta(self.cfg.truncation * len) } else { chart.coord_of_t(self.cfg.far_cut) };
            (s, [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)])
        } else {
            // u^[1](t) = z ∫_t^b ŵ u ≈ z·(tail of W) inside the end layer
            let pe = solver.end_point(a)?;
            let tw = prof.w_tail(&pe)?;
            (chart.coord(&pe), [C::new(1.0, 0.0), C::new(z * tw, 0.0), C::new(tw, 0.0)])
        };
        let mut p0 = solver.start_point(a)?;
        let mut s0 = chart.coord(&p0);
        if s0 >= se {
            // both layers cover the side (small |z|): any earlier point will do
            s0 = se - 1.0;
            p0 = chart.at(s0).0;
        }
        let half = solver.half();
        let zc = C::new(z, 0.0);
        // integrating toward smaller s, the accumulator gains ∫ ŵu² through -jw u²
        let rhs = move |s: f64, y: &[C; 3]| {
            let (p, j) = chart.at(s);
            let jw = j * half.w.eval(&p);
            [y[1] * (j * half.r.eval(&p)), -zc * jw * y[0], C::new(-jw * y[0].re * y[0].re, 0.0)]
        };
        let (st, _) = integrate(&rhs, se, s0, Scaled { y: y0, log_scale: 0.0 }, 2, &self.cfg.weyl.ode)?;
        let w0 = prof.w_hat_at(&p0)?;
        let r0 = prof.r_hat_at(&p0)?;
        let (u, q) = (st.y[0].re, st.y[1].re);
        Ok(Shot { value: u - r0 * q, quasi: q + z * w0 * u, log_scale: st.log_scale, krein: st.y[2].re + w0 * u * u })
    }

    pub fn sample(&self, lambda: f64) -> Result<CharSample> {
        let mut plus = None;
        let mut minus = None;
        for (side, solver, tr) in &self.sides {
            let z = lambda * side.sign();
            let shot = self.shoot(solver, *tr, z)?;
            match side {
                Side::Plus => plus = Some(shot),
                Side::Minus => minus = Some(shot),
            }
        }
        let (d, ls, norm) = match (plus, minus) {
            (Some(p), Some(m)) => {
                // signed minus quasi-derivative is -m.quasi
                let a = p.value * -m.quasi;
                let b = p.quasi * m.value;
                let size = a.abs() + b.abs();
                (a - b, p.log_scale + m.log_scale, if size > 0.0 { (a - b).abs() / size } else { 0.0 })
            }
            (Some(s), None) | (None, Some(s)) => {
                let q = s.quasi * if plus.is_some() { 1.0 } else { -1.0 };
                (q, s.log_scale, q.abs() / s.value.hypot(s.quasi))
            }
            (None, None) => unreachable!(),
        };
        Ok(CharSample { lambda, d, log_scale: ls, normalized: norm, plus, minus })
    }
}

/// Matching determinant at a real λ.
pub fn char_function(problem: &ProblemSpec, lambda: f64, cfg: &EigenConfig) -> Result<CharSample> {
    Shooter::new(problem, cfg)?.sample(lambda)
}

#[derive(Debug, Clone, Serialize)]
pub struct Eigenvalue {
    pub lambda: f64,
    /// Normalized matching mismatch at the polished root.
    pub residual: f64,
    /// λ·[f,f]_w / (∫|w| f²) for the glued eigenfunction.
    pub krein: Option<f64>,
    pub multiplicity_note: String,
}

/// |D| dipping toward zero without a sign change (possible even-order root).
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Dip {
    pub lambda: f64,
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRow {
    pub index: usize,
    pub sign: i8,
    pub lambda: f64,
    pub oracle: f64,
    pub rel_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectrumReport {
    pub problem: String,
    pub window: (f64, f64),
    pub decoupled: Option<Side>,
    /// Positive eigenvalues, increasing.
    pub positive: Vec<Eigenvalue>,
    /// Negative eigenvalues ordered by increasing |λ|.
    pub negative: Vec<Eigenvalue>,
    pub zero: Option<Eigenvalue>,
    pub counts: (usize, usize),
    /// Mean spacing of √|λ| in each family (positive, negative).
    pub sqrt_spacing: (Option<f64>, Option<f64>),
    pub dips: Vec<Dip>,
    pub truncated: Vec<Side>,
    pub warnings: Vec<String>,
    pub oracle: Option<Vec<OracleRow>>,
    pub jordan: Option<JordanReport>,
}

fn scan_grid(lo: f64, hi: f64, panels: usize) -> Vec<f64> {
    let sig = |l: f64| l.signum() * l.abs().sqrt();
    let (a, b) = (sig(lo), sig(hi));
    let mut g: Vec<f64> = (0..=panels)
        .map(|i| {
            let s = a + (b - a) * i as f64 / panels as f64;
            s.signum() * s * s
        })
        .collect();
    g[0] = lo;
    g[panels] = hi;
    if lo < 0.0 && hi > 0.0 && !g.contains(&0.0) {
        g.push(0.0);
        g.sort_by(|x, y| x.total_cmp(y));
    }
    g
}

impl Shooter {
    fn bisect(&self, mut a: CharSample, mut b: CharSample) -> Result<CharSample> {
        for _ in 0..200 {
            let width = (b.lambda - a.lambda).abs();
            if width <= self.cfg.root_tol * a.lambda.abs().max(b.lambda.abs()) || width < 1e-300 {
                break;
            }
            let mid = self.sample(0.5 * (a.lambda + b.lambda))?;
            if mid.d == 0.0 {
                return Ok(mid);
            }
            if (mid.d > 0.0) == (a.d > 0.0) {
                a = mid;
            } else {
                b = mid;
            }
        }
        Ok(if a.normalized <= b.normalized { a } else { b })
    }

    /// Golden-section minimum of the normalized |D| on [lo, hi]; returns a
    /// bracketing pair instead when a sign change turns up.
    fn refine_dip(&self, lo: f64, hi: f64) -> Result<std::result::Result<Dip, (CharSample, CharSample)>> {
        let g = 0.5 * (5f64.sqrt() - 1.0);
        let (mut a, mut b) = (lo, hi);
        let mut c = self.sample(b - g * (b - a))?;
        let mut d = self.sample(a + g * (b - a))?;
        let first = self.sample(lo)?;
        for _ in 0..40 {
            for s in [&c, &d] {
                if s.d != 0.0 && first.d != 0.0 && (s.d > 0.0) != (first.d > 0.0) {
                    return Ok(Err((first, *s)));
                }
            }
            if c.normalized < d.normalized {
                b = d.lambda;
                d = c;
                c = self.sample(b - g * (b - a))?;
            } else {
                a = c.lambda;
                c = d;
                d = self.sample(a + g * (b - a))?;
            }
            if (b - a).abs() <= 1e-12 * a.abs().max(b.abs()) {
                break;
            }
        }
        let best = if c.normalized < d.normalized { c } else { d };
        Ok(Ok(Dip { lambda: best.lambda, normalized: best.normalized }))
    }

    fn krein(&self, s: &CharSample) -> Option<f64> {
        // [f,f]_w = ∫ŵ+ u+² - c² ∫ŵ- u-², glued with matching values (or
        // quasi-derivatives when the values vanish); scales cancel in the ratios
        let part = |sh: &Shot, by_value: bool| {
            let n = if by_value { sh.value } else { sh.quasi };
            sh.krein / (n * n)
        };
        let v = match (s.plus, s.minus) {
            (Some(p), Some(m)) => {
                let by_value = p.value.abs() * m.quasi.abs() >= p.quasi.abs() * m.value.abs();
                let (a, b) = (part(&p, by_value), part(&m, by_value));
                s.lambda * (a - b) / (a.abs() + b.abs())
            }
            (Some(p), None) => s.lambda.signum() * p.krein.signum(),
            (None, Some(m)) => -s.lambda.signum() * m.krein.signum(),
            (None, None) => return None,
        };
        v.is_finite().then_some(v)
    }
}

/// Eigenvalues in [lo, hi]: scan, bracket, bisect, verify.
pub fn eigenvalues(problem: &ProblemSpec, window: (f64, f64), cfg: &EigenConfig) -> Result<SpectrumReport> {
    let (lo, hi) = window;
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Invalid(format!("empty window ({lo}, {hi})")));
    }
    let sh = Shooter::new(problem, cfg)?;
    let grid = scan_grid(lo, hi, cfg.panels.max(2));
    let samples: Vec<Result<CharSample>> = grid.par_iter().map(|&l| sh.sample(l)).collect();
    let mut warnings = Vec::new();
    let mut ok: Vec<CharSample> = Vec::new();
    for (l, s) in grid.iter().zip(samples) {
        match s {
            Ok(s) => ok.push(s),
            Err(e) => warnings.push(format!("D({l:.6e}) failed: {e}")),
        }
    }
    let truncated = sh.truncated();
    for s in &truncated {
        warnings.push(format!("{} endpoint is singular; eigenvalues use a Neumann cap (approximation)", s.label()));
    }

    let mut brackets: Vec<(CharSample, CharSample)> = Vec::new();
    let mut exact: Vec<CharSample> = Vec::new();
    let mut dips = Vec::new();
    let n = ok.len();
    for i in 0..n {
        let s = ok[i];
        if s.d == 0.0 {
            let prev = if i > 0 { Some(ok[i - 1].d) } else { None };
            let next = ok.get(i + 1).map(|x| x.d);
            match (prev, next) {
                (Some(p), Some(q)) if p * q < 0.0 => exact.push(s),
                _ if s.lambda == 0.0 => exact.push(s),
                _ => dips.push(Dip { lambda: s.lambda, normalized: 0.0 }),
            }
            continue;
        }
        if i + 1 < n && ok[i + 1].d != 0.0 && (ok[i + 1].d > 0.0) != (s.d > 0.0) {
            brackets.push((s, ok[i + 1]));
        }
        // interior local minimum with a common sign on both neighbours
        if i > 0 && i + 1 < n {
            let (p, q) = (ok[i - 1], ok[i + 1]);
            let same = p.d * s.d > 0.0 && q.d * s.d > 0.0;
            if same && s.normalized < p.normalized && s.normalized < q.normalized && s.normalized < 1e-2 {
                match sh.refine_dip(p.lambda, q.lambda)? {
                    Ok(d) if d.normalized < cfg.dip_tol => dips.push(d),
                    Ok(_) => {}
                    Err((_, mid)) => {
                        // two close roots: p and q share a sign, mid has the other
                        brackets.push((p, mid));
                        brackets.push((mid, q));
                    }
                }
            }
        }
    }
    brackets.retain(|(a, b)| a.d * b.d < 0.0);

    let roots: Vec<Result<CharSample>> = brackets.par_iter().map(|(a, b)| sh.bisect(*a, *b)).collect();
    let mut found: Vec<CharSample> = exact;
    for r in roots {
        match r {
            Ok(s) => found.push(s),
            Err(e) => warnings.push(format!("bisection failed: {e}")),
        }
    }
    found.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));

    let step = |l: f64| {
        let sq = l.abs().sqrt();
        let span = (hi.abs().sqrt() + lo.abs().sqrt()) / cfg.panels as f64;
        (sq, span)
    };
    for w in found.windows(2) {
        let (a, span) = step(w[0].lambda);
        let (b, _) = step(w[1].lambda);
        let gap = if w[0].lambda.signum() == w[1].lambda.signum() { (a - b).abs() } else { a + b };
        if gap < 2.0 * span {
            warnings.push(format!("roots {:.6e} and {:.6e} are closer than two scan steps", w[0].lambda, w[1].lambda));
        }
    }

    let jordan = if cfg.decoupled.is_none() { kernel_analysis(problem).ok() } else { None };
    let mut positive = Vec::new();
    let mut negative = Vec::new();
    let mut zero = None;
    for s in found {
        let note = if s.lambda == 0.0 {
            match &jordan {
                Some(j) if j.kernel_dim == 1 => format!("zero: kernel dimension 1, Jordan chain length {}", j.chain_length),
                _ => "zero".to_string(),
            }
        } else {
            "simple".to_string()
        };
        if s.lambda != 0.0 && s.normalized > cfg.residual_tol {
            warnings.push(format!("residual {:.3e} at λ = {:.10e} exceeds tolerance", s.normalized, s.lambda));
        }
        let e = Eigenvalue { lambda: s.lambda, residual: s.normalized, krein: sh.krein(&s), multiplicity_note: note };
        if s.lambda > 0.0 {
            positive.push(e);
        } else if s.lambda < 0.0 {
            negative.push(e);
        } else {
            zero = Some(e);
        }
    }
    negative.reverse();
    // a double root at 0 shows up as a dip there, not as a sign change
    if zero.is_none() {
        if let Some(j) = jordan.as_ref().filter(|j| j.kernel_dim == 1 && lo <= 0.0 && hi >= 0.0) {
            if let Ok(s) = sh.sample(0.0) {
                if s.normalized <= cfg.dip_tol {
                    dips.retain(|d| d.lambda != 0.0);
                    zero = Some(Eigenvalue {
                        lambda: 0.0,
                        residual: s.normalized,
                        krein: None,
                        multiplicity_note: format!("zero: kernel dimension 1, Jordan chain length {}", j.chain_length),
                    });
                }
            }
        }
    }
    dips.retain(|d| !(d.lambda == 0.0 && zero.is_some()));
    for d in &dips {
        warnings.push(format!("|D| dips to {:.3e} near λ = {:.6e} without a sign change (possible even-order root)", d.normalized, d.lambda));
    }
    let spacing = |v: &[Eigenvalue]| {
        (v.len() >= 2).then(|| (v[v.len() - 1].lambda.abs().sqrt() - v[0].lambda.abs().sqrt()) / (v.len() - 1) as f64)
    };
    Ok(SpectrumReport {
        problem: problem.name.clone(),
        window,
        decoupled: cfg.decoupled,
        counts: (positive.len(), negative.len()),
        sqrt_spacing: (spacing(&positive), spacing(&negative)),
        positive,
        negative,
        zero,
        dips,
        truncated,
        warnings,
        oracle: None,
        jordan,
    })
}

/// Pairs shooting eigenvalues with oracle values by sign and index.
pub fn oracle_table(report: &SpectrumReport, oracle: &FdSpectrum) -> Vec<OracleRow> {
    let mut rows = Vec::new();
    for (sign, ours, theirs) in [(1i8, &report.positive, &oracle.positive), (-1i8, &report.negative, &oracle.negative)] {
        for (k, (e, o)) in ours.iter().zip(theirs.iter()).enumerate() {
            rows.push(OracleRow { index: k + 1, sign, lambda: e.lambda, oracle: *o, rel_diff: (e.lambda - o).abs() / e.lambda.abs() });
        }
    }
    rows
}

#[cfg(test)]
mod tests;
