//! Built-in example problems and functions with their known verdicts.

use serde::Serialize;

use crate::coeffs::{CoefficientExpr as E, ProblemSpec, Side};
use crate::error::{Error, Result};

pub const CATALOG: &[&str] = &["sgn", "half-line", "beals", "log-reflection", "unit-reflection", "log-weights", "log-weights-half", "sin-pair", "staircase", "neumann-unit"];

/// Optional overrides; unset fields take the entry defaults.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct CatalogParams {
    pub alpha_plus: Option<f64>,
    pub alpha_minus: Option<f64>,
    pub b_plus: Option<f64>,
    pub b_minus: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
}

/// Known answers; None where nothing is claimed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct Expected {
    /// ∞ is not a singular critical point.
    pub infinity: Option<bool>,
    /// 0 is not a singular critical point and ker A = ker A².
    pub zero: Option<bool>,
    /// 0 is a regular critical point.
    pub zero_critical: Option<bool>,
    pub riesz: Option<bool>,
    pub similarity: Option<bool>,
    pub chain_length: Option<u8>,
    /// Spectrum of both decoupled parts is discrete.
    pub discrete: Option<bool>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CatalogEntry {
    pub name: String,
    pub description: String,
    pub problem: Option<ProblemSpec>,
    /// Named functions for the Karamata tests (entries without a problem).
    pub functions: Vec<&'static str>,
    /// Eigenvalues refer to the decoupled Neumann part on this side.
    pub decoupled: Option<Side>,
    pub expected: Expected,
}

fn log_weights_problem(name: &str, ap: f64, am: f64, bp: f64, bm: f64) -> Result<ProblemSpec> {
    ProblemSpec::new(name, bm, bp, E::term(ap, -1.0, -1.0 - ap), E::constant(1.0), E::term(am, -1.0, -1.0 - am), E::constant(1.0))
}

/// r_- = α r_+(-βx), w_- = -α w_+(-βx) on (-b+/β, 0).
fn scaled_reflection(name: &str, w: E, r: E, bp: f64, alpha: f64, beta: f64) -> Result<ProblemSpec> {
    if !(alpha > 0.0 && beta > 0.0) {
        return Err(Error::Invalid("alpha and beta must be positive".into()));
    }
    ProblemSpec::new(name, -bp / beta, bp, w.clone(), r.clone(), E::reflect(alpha, beta, w), E::reflect(alpha, beta, r))
}

fn log_weights_expected(ap: f64, am: f64, bp: f64, bm: f64) -> Expected {
    let inf = ap != am;
    let full_p = bp == 1.0;
    let full_m = bm == -1.0;
    let mut e = Expected { infinity: Some(inf), ..Default::default() };
    if full_p && full_m {
        e.zero = Some(true);
        e.zero_critical = Some(ap > 1.0 && am > 1.0);
        e.similarity = Some(inf);
        e.discrete = Some(ap < 1.0 && am < 1.0);
        if ap < 1.0 && am < 1.0 {
            e.riesz = Some(inf);
        }
    } else if full_p || full_m {
        e.zero = Some(true);
        e.zero_critical = Some(false);
        e.similarity = Some(inf);
    } else {
        // W+(b+) + W-(b-) vanishes iff a+/a- = ln|ln|b-|| / ln|ln b+|
        let ratio = (-(-bm).ln()).ln() / (-bp.ln()).ln();
        let special = (ap / am - ratio).abs() <= 1e-12 * ratio.abs();
        e.zero = Some(!special);
        e.zero_critical = Some(special);
        e.similarity = Some(inf && !special);
        e.riesz = Some(inf);
        e.discrete = Some(true);
        e.chain_length = Some(if special { 2 } else { 1 });
    }
    e
}

pub fn catalog_entry(name: &str, p: &CatalogParams) -> Result<CatalogEntry> {
    let entry = |problem: Option<ProblemSpec>, description: &str, expected: Expected| CatalogEntry {
        name: name.to_string(),
        description: description.to_string(),
        problem,
        functions: Vec::new(),
        decoupled: None,
        expected,
    };
    let e = match name {
        "sgn" => {
            let b = p.b_plus.unwrap_or(1.0);
            let prob = ProblemSpec::new(name, -b, b, E::constant(1.0), E::constant(1.0), E::constant(1.0), E::constant(1.0))?;
            entry(
                Some(prob),
                "w = sgn x, r = 1 on (-b, b)",
                Expected {
                    infinity: Some(true),
                    zero: Some(false),
                    zero_critical: Some(true),
                    riesz: Some(true),
                    similarity: Some(false),
                    chain_length: Some(2),
                    discrete: Some(true),
                },
            )
        }
        "half-line" => {
            let prob = ProblemSpec::new(name, f64::NEG_INFINITY, f64::INFINITY, E::constant(1.0), E::constant(1.0), E::constant(1.0), E::constant(1.0))?;
            entry(Some(prob), "w = sgn x, r = 1 on the real line", Expected { infinity: Some(true), zero: Some(true), ..Default::default() })
        }
        "beals" => {
            let a = p.alpha_plus.unwrap_or(0.5);
            if !(a > -1.0) {
                return Err(Error::Invalid("beals needs alpha-plus > -1".into()));
            }
            let prob = ProblemSpec::new(name, -1.0, 1.0, E::term(1.0, a, 0.0), E::constant(1.0), E::constant(1.0), E::constant(1.0))?;
            let k_zero = 1.0 / (a + 1.0) == 1.0;
            entry(
                Some(prob),
                "w+ = x^a, r = 1; w- = -1 on (-1, 0)",
                Expected {
                    infinity: Some(true),
                    zero: Some(!k_zero),
                    riesz: Some(true),
                    similarity: Some(!k_zero),
                    chain_length: Some(if k_zero { 2 } else { 1 }),
                    discrete: Some(true),
                    ..Default::default()
                },
            )
        }
        "log-reflection" => {
            let (a, b) = (p.alpha.unwrap_or(1.0), p.beta.unwrap_or(2.0));
            let prob = scaled_reflection(name, E::term(1.0, -1.0, -2.0), E::constant(1.0), 1.0, a, b)?;
            entry(
                Some(prob),
                "w+ = 1/(x ln^2 x), r+ = 1 on (0,1), scaled reflection with (alpha, beta)",
                Expected { infinity: Some(a != b), zero: Some(true), similarity: Some(a != b), ..Default::default() },
            )
        }
        "unit-reflection" => {
            let (a, b) = (p.alpha.unwrap_or(1.0), p.beta.unwrap_or(2.0));
            let bp = p.b_plus.unwrap_or(1.0);
            let prob = scaled_reflection(name, E::constant(1.0), E::constant(1.0), bp, a, b)?;
            entry(
                Some(prob),
                "w+ = r+ = 1 on (0, b+), scaled reflection with (alpha, beta)",
                Expected {
                    infinity: Some(true),
                    zero: Some(a != b),
                    similarity: Some(a != b),
                    chain_length: Some(if a != b { 1 } else { 2 }),
                    discrete: Some(true),
                    riesz: Some(true),
                    ..Default::default()
                },
            )
        }
        "log-weights" | "log-weights-half" => {
            let (dp, dm) = if name == "log-weights" { (1.0, -1.0) } else { (0.5, -0.5) };
            let ap = p.alpha_plus.unwrap_or(0.5);
            let am = p.alpha_minus.unwrap_or(1.0);
            let bp = p.b_plus.unwrap_or(dp);
            let bm = p.b_minus.unwrap_or(dm);
            if !(ap > 0.0 && am > 0.0) || !(bp > 0.0 && bp <= 1.0) || !(bm < 0.0 && bm >= -1.0) {
                return Err(Error::Invalid("need alpha± > 0, 0 < b+ <= 1, -1 <= b- < 0".into()));
            }
            entry(
                Some(log_weights_problem(name, ap, am, bp, bm)?),
                "r = 1, w± = a±/(|x| (-ln|x|)^(1+a±)) on (b-, b+)",
                log_weights_expected(ap, am, bp, bm),
            )
        }
        "sin-pair" => CatalogEntry { functions: vec!["loglog_u_plus_sin", "loglog_u_minus_sin"], ..entry(None, "u + sin u and u - sin u in doubly-logarithmic coordinates", Expected::default()) },
        "staircase" => CatalogEntry { functions: vec!["staircase"], ..entry(None, "nondecreasing function neither slowly varying nor positively increasing", Expected::default()) },
        "neumann-unit" => {
            let prob = ProblemSpec::new(name, -1.0, 1.0, E::constant(1.0), E::constant(1.0), E::constant(1.0), E::constant(1.0))?;
            CatalogEntry {
                decoupled: Some(Side::Plus),
                ..entry(Some(prob), "w = r = 1 on (0, 1) with Neumann conditions at both ends", Expected { discrete: Some(true), ..Default::default() })
            }
        }
        _ => return Err(Error::Invalid(format!("unknown catalog entry '{name}' (known: {})", CATALOG.join(", ")))),
    };
    Ok(e)
}
