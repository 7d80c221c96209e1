//! Riesz basis and similarity verdicts composed from the point verdicts.

use serde::Serialize;

use super::zero::{discreteness, kernel_condition, regularity_at_zero, DiscretenessReport, KernelCondition};
use super::{regularity_at_infinity, ClassifyConfig, RegularityVerdict};
use crate::coeffs::ProblemSpec;
use crate::error::{Error, Result};
use crate::karamata::{Status, TriVerdict};

#[derive(Debug, Clone, Serialize)]
pub struct SimilarityReport {
    pub infinity: RegularityVerdict,
    pub zero: RegularityVerdict,
    pub discreteness: DiscretenessReport,
    /// None when w is not integrable on both sides.
    pub kernel: Option<KernelCondition>,
    pub riesz: TriVerdict,
    pub similarity: TriVerdict,
}

/// Riesz basis: regularity of ∞ once both sides have discrete spectrum.
/// Similarity: ∞ regular, 0 not a singular critical point and ker A = ker A².
pub fn similarity_and_riesz(problem: &ProblemSpec, cfg: &ClassifyConfig) -> Result<SimilarityReport> {
    let ((inf, zero), (disc, kernel)) = rayon::join(
        || rayon::join(|| regularity_at_infinity(problem, cfg), || regularity_at_zero(problem, cfg)),
        || rayon::join(|| discreteness(problem, cfg), || kernel_condition(problem, cfg)),
    );
    let (inf, zero, disc) = (inf?, zero?, disc?);
    let kernel = match kernel {
        Ok(k) => Some(k),
        Err(Error::NotApplicable(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(compose(inf, zero, disc, kernel))
}

pub fn compose(inf: RegularityVerdict, zero: RegularityVerdict, disc: DiscretenessReport, kernel: Option<KernelCondition>) -> SimilarityReport {
    let riesz = match disc.status {
        Status::Holds => {
            let mut v = TriVerdict::new(inf.status.status, format!("discrete spectrum; infinity via {}", inf.route.label()));
            v.trend = inf.status.trend;
            v.final_value = inf.status.final_value;
            v
        }
        _ => TriVerdict::new(Status::Inconclusive, "discreteness not established on both sides"),
    };
    let kernel_ok = match zero.kernel_equal {
        Some(b) => Status::from_bool(b),
        None => Status::Inconclusive,
    };
    let status = inf.status.status.and(zero.status.status).and(kernel_ok);
    let similarity = TriVerdict::new(
        status,
        format!("infinity: {} via {}; zero: {} via {}", inf.status.status.label(), inf.route.label(), zero.status.status.label(), zero.route.label()),
    );
    SimilarityReport { infinity: inf, zero, discreteness: disc, kernel, riesz, similarity }
}
