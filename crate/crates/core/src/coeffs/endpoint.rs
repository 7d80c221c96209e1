//! Integrability and Weyl alternative at the outer endpoint of a side.

use serde::Serialize;

use super::problem::{ProblemSpec, Side};
use crate::weyl::{CutRecord, SideSolver, WeylConfig};

pub use crate::weyl::LimitType;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regularity {
    Regular,
    Singular,
}

#[derive(Debug, Clone, Serialize)]
pub struct EndpointClass {
    pub side: Side,
    pub endpoint: f64,
    pub w_integrable: bool,
    pub r_integrable: bool,
    pub regularity: Regularity,
    pub limit_type: LimitType,
    /// Weyl-disk radius at the last cut of the probe (singular endpoints only).
    pub disk_radius: Option<f64>,
    #[serde(skip)]
    pub probe: Vec<CutRecord>,
}

pub fn classify_endpoint(problem: &ProblemSpec, side: Side, cfg: &WeylConfig) -> EndpointClass {
    let half = problem.half(side);
    let w_integrable = half.w.integrable_at_end(half.len);
    let r_integrable = half.r.integrable_at_end(half.len);
    let mut out = EndpointClass {
        side,
        endpoint: problem.endpoint(side),
        w_integrable,
        r_integrable,
        regularity: Regularity::Regular,
        limit_type: LimitType::LimitCircle,
        disk_radius: None,
        probe: Vec::new(),
    };
    if w_integrable && r_integrable {
        return out;
    }
    out.regularity = Regularity::Singular;
    match SideSolver::new(problem, side, *cfg) {
        Ok(s) => {
            let (lt, cuts) = s.probe_limit_type();
            out.limit_type = lt;
            out.disk_radius = cuts.last().and_then(|c| c.radius);
            out.probe = cuts;
        }
        Err(_) => out.limit_type = LimitType::Undetermined,
    }
    out
}
