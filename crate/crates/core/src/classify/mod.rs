//! Regularity of the critical points 0 and ∞, discreteness, the kernel
//! condition, Riesz-basis and similarity verdicts. Every verdict records the
//! route that produced it.

pub mod bounded;
pub mod infinity;
pub mod similarity;
pub mod zero;

use serde::{Serialize, Serializer};

pub use bounded::boundedness_verdict;
pub use infinity::{d_infinity, d_property_check, karamata_check, q_grid, q_ratio_trace, regularity_at_infinity, wr_inv_handle, DCheck, DRegime, QTrace};
pub use similarity::{compose, similarity_and_riesz, SimilarityReport};
pub use zero::{
    discreteness, kac_krein_identity_check, kernel_condition, regularity_at_zero, DiscretenessForm, DiscretenessReport, KernelCondition,
    MomentIdentity, SideDiscreteness,
};

use crate::karamata::{GridPolicy, Regime, Status, TriVerdict};
use crate::weyl::WeylConfig;

#[derive(Debug, Clone)]
pub struct ClassifyConfig {
    pub weyl: WeylConfig,
    pub grid: GridPolicy,
    /// (y_lo, y_hi, points) of the D-ratio grid at infinity.
    pub d_grid: (f64, f64, usize),
    /// Points of the Q-trace and discreteness grids.
    pub q_depth: usize,
    /// Run the numeric D-ratio even when an analytic route decides.
    pub cross_check: bool,
}

impl Default for ClassifyConfig {
    fn default() -> Self {
        ClassifyConfig { weyl: WeylConfig::default(), grid: GridPolicy::default(), d_grid: (1e2, 1e6, 17), q_depth: 60, cross_check: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CriticalPoint {
    Zero,
    Infinity,
}

/// Integrability case at 0. I–IV are the sufficient cases; A is the
/// both-w-integrable dichotomy decided by the kernel sum.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroCase {
    I,
    Ii,
    Iii,
    Iv,
    A,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteTag {
    PositivelyIncreasing,
    SlowlyVaryingQ,
    OneSidedAsymptotic,
    NumericDProperty,
    Zero(ZeroCase),
    NotCovered,
}

impl RouteTag {
    pub fn label(self) -> &'static str {
        match self {
            RouteTag::PositivelyIncreasing => "positively_increasing",
            RouteTag::SlowlyVaryingQ => "slowly_varying_q",
            RouteTag::OneSidedAsymptotic => "one_sided_asymptotic",
            RouteTag::NumericDProperty => "numeric_d_property",
            RouteTag::Zero(ZeroCase::I) => "zero_case_i",
            RouteTag::Zero(ZeroCase::Ii) => "zero_case_ii",
            RouteTag::Zero(ZeroCase::Iii) => "zero_case_iii",
            RouteTag::Zero(ZeroCase::Iv) => "zero_case_iv",
            RouteTag::Zero(ZeroCase::A) => "zero_case_a",
            RouteTag::NotCovered => "not_covered",
        }
    }
}

impl Serialize for RouteTag {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.label())
    }
}

/// A named Karamata check that fed a route decision.
#[derive(Debug, Clone, Serialize)]
pub struct SideCheck {
    pub test: String,
    pub regime: Option<Regime>,
    pub verdict: TriVerdict,
}

impl SideCheck {
    pub fn new(test: &str, regime: Regime, verdict: TriVerdict) -> Self {
        SideCheck { test: test.into(), regime: Some(regime), verdict }
    }

    pub fn note(test: &str, msg: String) -> Self {
        SideCheck { test: test.into(), regime: None, verdict: TriVerdict::new(Status::Inconclusive, msg) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RegularityVerdict {
    pub point: CriticalPoint,
    pub status: TriVerdict,
    pub route: RouteTag,
    /// ker A = ker A² (zero only).
    pub kernel_equal: Option<bool>,
    pub kernel_sum: Option<f64>,
    /// 1/W+(b+) and -1/W-(b-) when finite (zero only).
    pub a_plus: Option<f64>,
    pub a_minus: Option<f64>,
    /// 0 is a regular critical point (zero only).
    pub critical: Status,
    pub checks: Vec<SideCheck>,
    pub q_trace: Option<QTrace>,
    pub d_check: Option<DCheck>,
    #[serde(skip)]
    pub discreteness: Option<DiscretenessReport>,
}

impl RegularityVerdict {
    pub fn new(point: CriticalPoint) -> Self {
        RegularityVerdict {
            point,
            status: TriVerdict::new(Status::Inconclusive, ""),
            route: RouteTag::NotCovered,
            kernel_equal: None,
            kernel_sum: None,
            a_plus: None,
            a_minus: None,
            critical: Status::Inconclusive,
            checks: Vec::new(),
            q_trace: None,
            d_check: None,
            discreteness: None,
        }
    }
}

#[cfg(test)]
mod tests;
