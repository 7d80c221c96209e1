//! Complex first-order system f' = r f^[1], (f^[1])' = -z w f, integrated in a
//! stretched coordinate s with adaptive Dormand-Prince 5(4) steps.
//!
//! For a finite side (0, L) the chart is x = L/(1 + e^{-s}), so x ~ L e^s near 0
//! and L - x ~ L e^{-s} near L; for L = inf it is x = e^s. Both endpoints sit at
//! s = -inf / +inf and singular coefficients become slowly varying in s.

use num_complex::Complex64 as C;

use crate::coeffs::{HalfProblem, Pt};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct OdeConfig {
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
}

impl Default for OdeConfig {
    fn default() -> Self {
        OdeConfig { rtol: 1e-9, atol: 1e-12, max_steps: 2_000_000 }
    }
}

/// Largest |s| used; keeps x and L - x above ~1e-290.
pub const S_MAX: f64 = 665.0;

#[derive(Debug, Clone, Copy)]
pub struct Chart {
    pub len: f64,
}

impl Chart {
    /// Point and Jacobian dx/ds at chart coordinate s.
    pub fn at(&self, s: f64) -> (Pt, f64) {
        let l = self.len;
        if l.is_infinite() {
            let t = s.exp();
            return (Pt { t, delta: f64::INFINITY, end: l }, t);
        }
        let (t, d) = if s < 0.0 {
            let e = s.exp();
            (l * e / (1.0 + e), l / (1.0 + e))
        } else {
            let e = (-s).exp();
            (l / (1.0 + e), l * e / (1.0 + e))
        };
        (Pt { t, delta: d, end: l }, t * d / l)
    }

    pub fn coord(&self, p: &Pt) -> f64 {
        if self.len.is_infinite() {
            p.t.ln()
        } else {
            p.t.ln() - p.delta.ln()
        }
    }

    pub fn coord_of_t(&self, t: f64) -> f64 {
        self.coord(&Pt::left(t, self.len))
    }

    pub fn coord_of_delta(&self, delta: f64) -> f64 {
        self.coord(&Pt::right(delta, self.len))
    }
}

/// State vector with `LIN` solution components (scaled together) followed by
/// accumulators that scale with the square of the solution scale.
#[derive(Debug, Clone, Copy)]
pub struct Scaled<const N: usize> {
    pub y: [C; N],
    /// natural log of the common factor removed from the solution components
    pub log_scale: f64,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn comb<const N: usize>(y: &[C; N], h: f64, parts: &[(f64, &[C; N])]) -> [C; N] {
    let mut out = *y;
    for (c, k) in parts {
        let f = h * c;
        for i in 0..N {
            out[i] += k[i] * f;
        }
    }
    out
}

/// Integrates `rhs` from s0 to s1 (either direction). `lin` leading components
/// are solution values: they drive the error norm and the rescaling.
pub fn integrate<const N: usize, F>(rhs: &F, s0: f64, s1: f64, state: Scaled<N>, lin: usize, cfg: &OdeConfig) -> Result<(Scaled<N>, usize)>
where
    F: Fn(f64, &[C; N]) -> [C; N],
{
    let mut st = state;
    if s0 == s1 {
        return Ok((st, 0));
    }
    let dir = (s1 - s0).signum();
    let span = (s1 - s0).abs();
    let mut s = s0;
    let mut h = (0.05 * span).min(0.05) * dir;
    let mut k1 = rhs(s, &st.y);
    let mut steps = 0usize;
    let mut prev_err: f64 = 1e-4;
    while (s1 - s) * dir > 0.0 {
        if steps >= cfg.max_steps {
            return Err(Error::Integrator(format!("step limit reached at s = {s:.6}")));
        }
        if (s + h - s1) * dir > 0.0 {
            h = s1 - s;
        }
        let y = &st.y;
        let k2 = rhs(s + h / 5.0, &comb(y, h, &[(A21, &k1)]));
        let k3 = rhs(s + 0.3 * h, &comb(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(s + 0.8 * h, &comb(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(s + 8.0 / 9.0 * h, &comb(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]));
        let k6 = rhs(s + h, &comb(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]));
        let ynew = comb(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = rhs(s + h, &ynew);
        let mut err: f64 = 0.0;
        let scale_ref = (0..lin).map(|i| y[i].norm().max(ynew[i].norm())).fold(0.0, f64::max);
        for i in 0..lin {
            let e = (k1[i] * E1 + k3[i] * E3 + k4[i] * E4 + k5[i] * E5 + k6[i] * E6 + k7[i] * E7) * h;
            // Componentwise relative control, floored by a fraction of the state
            // norm so that a component passing through zero does not stall.
            let sc = cfg.atol + cfg.rtol * y[i].norm().max(ynew[i].norm()).max(1e-3 * scale_ref);
            err = err.max(e.norm() / sc);
        }
        if !err.is_finite() {
            h *= 0.25;
            if h.abs() < 1e-14 * span.max(1.0) {
                return Err(Error::Integrator(format!("non-finite derivative near s = {s:.6}")));
            }
            continue;
        }
        steps += 1;
        if err <= 1.0 {
            s += h;
            st.y = ynew;
            k1 = k7;
            let big = (0..lin).map(|i| st.y[i].norm()).fold(0.0, f64::max);
            if big > 1e100 || (big < 1e-100 && big > 0.0) {
                let inv = 1.0 / big;
                for i in 0..lin {
                    st.y[i] *= inv;
                }
                for i in lin..N {
                    st.y[i] *= inv * inv;
                }
                st.log_scale += big.ln();
                k1 = rhs(s, &st.y);
            }
            // PI step-size control
            let fac = 0.9 * err.max(1e-10).powf(-0.7 / 5.0) * prev_err.powf(0.4 / 5.0);
            h *= fac.clamp(0.2, 5.0);
            prev_err = err.max(1e-4);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
        }
        if h.abs() < 1e-15 * s.abs().max(1.0) {
            return Err(Error::Integrator(format!("step size underflow near s = {s:.6}")));
        }
    }
    Ok((st, steps))
}

/// Right-hand side for a pair of solutions plus the accumulator ∫ w |second|^2.
pub fn pair_rhs(half: &HalfProblem, z: C) -> impl Fn(f64, &[C; 5]) -> [C; 5] + '_ {
    let chart = Chart { len: half.len };
    move |s: f64, y: &[C; 5]| {
        let (p, j) = chart.at(s);
        let jw = j * half.w.eval(&p);
        let jr = j * half.r.eval(&p);
        [
            y[1] * jr,
            -z * jw * y[0],
            y[3] * jr,
            -z * jw * y[2],
            C::new(jw * y[2].norm_sqr(), 0.0),
        ]
    }
}

/// Right-hand side for a single solution.
pub fn single_rhs(half: &HalfProblem, z: C) -> impl Fn(f64, &[C; 2]) -> [C; 2] + '_ {
    let chart = Chart { len: half.len };
    move |s: f64, y: &[C; 2]| {
        let (p, j) = chart.at(s);
        [y[1] * (j * half.r.eval(&p)), -z * (j * half.w.eval(&p)) * y[0]]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{CoefficientExpr as E, Side};

    fn unit(len: f64) -> HalfProblem {
        HalfProblem { side: Side::Plus, len, w: E::constant(1.0), r: E::constant(1.0) }
    }

    #[test]
    fn chart_round_trip() {
        let ch = Chart { len: 1.0 };
        for &s in &[-300.0, -3.0, 0.0, 2.5, 300.0] {
            let (p, _) = ch.at(s);
            assert!((ch.coord(&p) - s).abs() < 1e-9 * s.abs().max(1.0));
        }
        let (p, _) = ch.at(40.0);
        assert!((p.delta - (-40.0f64).exp()).abs() < 1e-30);
    }

    #[test]
    fn cosh_sinh_at_one() {
        let h = unit(1.0);
        let z = C::new(-1.0, 0.0);
        let rhs = single_rhs(&h, z);
        let ch = Chart { len: 1.0 };
        let t0 = 1e-12;
        let s0 = ch.coord_of_t(t0);
        let s1 = ch.coord_of_delta(1e-12);
        // c(t0) = 1, c'(t0) = t0 (first order from 0)
        let init = Scaled { y: [C::new(1.0, 0.0), C::new(t0, 0.0)], log_scale: 0.0 };
        let (out, _) = integrate(&rhs, s0, s1, init, 2, &OdeConfig::default()).unwrap();
        let f = out.y[0] * out.log_scale.exp();
        let g = out.y[1] * out.log_scale.exp();
        assert!((f.re - 1f64.cosh()).abs() < 1e-8, "{f}");
        assert!((g.re - 1f64.sinh()).abs() < 1e-8, "{g}");
        let init = Scaled { y: [C::new(t0, 0.0), C::new(1.0, 0.0)], log_scale: 0.0 };
        let (out, _) = integrate(&rhs, s0, s1, init, 2, &OdeConfig::default()).unwrap();
        assert!((out.y[0].re - 1f64.sinh()).abs() < 1e-8);
        assert!((out.y[1].re - 1f64.cosh()).abs() < 1e-8);
    }

    #[test]
    fn zero_spectral_parameter_keeps_constants() {
        let h = unit(1.0);
        let rhs = single_rhs(&h, C::new(0.0, 0.0));
        let init = Scaled { y: [C::new(1.0, 0.0), C::new(0.0, 0.0)], log_scale: 0.0 };
        let (out, _) = integrate(&rhs, -20.0, 20.0, init, 2, &OdeConfig::default()).unwrap();
        assert_eq!(out.y[0], C::new(1.0, 0.0));
        assert_eq!(out.y[1], C::new(0.0, 0.0));
    }

    #[test]
    fn rescaling_tracks_growth() {
        let h = unit(f64::INFINITY);
        let rhs = single_rhs(&h, C::new(-1e4, 0.0));
        let init = Scaled { y: [C::new(1.0, 0.0), C::new(0.0, 0.0)], log_scale: 0.0 };
        let ch = Chart { len: f64::INFINITY };
        let (out, _) = integrate(&rhs, ch.coord_of_t(1e-9), ch.coord_of_t(5.0), init, 2, &OdeConfig::default()).unwrap();
        // cosh(100 * 5) ~ e^500 / 2
        let ln = out.log_scale + out.y[0].norm().ln();
        assert!((ln - (500.0 - 2f64.ln())).abs() < 1e-6, "{ln}");
    }
}
