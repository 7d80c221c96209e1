//! The full analysis of one problem as a single serializable document.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::classify::{
    karamata_check, similarity_and_riesz, wr_inv_handle, ClassifyConfig, DiscretenessReport, KernelCondition, RegularityVerdict,
};
use crate::coeffs::{classify_endpoint, EndpointClass, ProblemSpec, Side, SideProfile};
use crate::eigen::{kernel_analysis, JordanReport};
use crate::error::Result;
use crate::karamata::{Regime, TriVerdict};

/// Bumped whenever a field of [`AnalysisReport`] changes.
pub const SCHEMA_VERSION: &str = "1.0.0";

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub side: Side,
    pub endpoint: f64,
    /// Signed W(b) and R(b); None when not integrable.
    pub w_end: Option<f64>,
    pub r_end: Option<f64>,
    /// (x, W(x), R(x)) at a few points of the side.
    pub samples: Vec<(f64, f64, f64)>,
}

#[derive(Debug, Clone, Serialize)]
pub struct KaramataEntry {
    pub side: Side,
    pub function: String,
    pub test: String,
    pub regime: Regime,
    pub verdict: TriVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct KernelSection {
    pub condition: Option<KernelCondition>,
    pub jordan: Option<JordanReport>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub problem: ProblemSpec,
    pub profiles: Vec<ProfileSummary>,
    pub endpoints: Vec<EndpointClass>,
    pub karamata: Vec<KaramataEntry>,
    pub discreteness: Option<DiscretenessReport>,
    pub regularity_zero: Option<RegularityVerdict>,
    pub regularity_infinity: Option<RegularityVerdict>,
    pub kernel: KernelSection,
    pub riesz: Option<TriVerdict>,
    pub similarity: Option<TriVerdict>,
    /// Trace name to file reference; filled in by the writer.
    pub traces: BTreeMap<String, String>,
    /// Numeric failures that left a section empty.
    pub errors: Vec<String>,
}

impl AnalysisReport {
    /// Verdicts that decided nothing.
    pub fn inconclusive(&self) -> Vec<&'static str> {
        use crate::karamata::Status::Inconclusive;
        let mut out = Vec::new();
        let pick = |v: Option<&TriVerdict>| v.map_or(true, |v| v.status == Inconclusive);
        if pick(self.regularity_infinity.as_ref().map(|v| &v.status)) {
            out.push("regularity_infinity");
        }
        if pick(self.regularity_zero.as_ref().map(|v| &v.status)) {
            out.push("regularity_zero");
        }
        if pick(self.riesz.as_ref()) {
            out.push("riesz");
        }
        if pick(self.similarity.as_ref()) {
            out.push("similarity");
        }
        out
    }
}

fn profile_summary(prof: &SideProfile, endpoint: f64) -> ProfileSummary {
    let len = prof.len();
    let top = if len.is_finite() { len } else { 1e3 };
    let s = prof.side.sign();
    let samples = [1e-3, 0.25, 0.5, 0.75, 0.999]
        .iter()
        .map(|f| f * top)
        .filter_map(|t| Some((s * t, prof.w(s * t).ok()?, prof.r(s * t).ok()?)))
        .collect();
    ProfileSummary { side: prof.side, endpoint, w_end: prof.w_end(), r_end: prof.r_end(), samples }
}

fn karamata_entries(prof: &SideProfile, cfg: &ClassifyConfig) -> Vec<KaramataEntry> {
    let h = wr_inv_handle(prof);
    let mut regimes = vec![match prof.side {
        Side::Plus => Regime::ZeroPlus,
        Side::Minus => Regime::ZeroMinus,
    }];
    if prof.r_total.is_none() {
        regimes.push(match prof.side {
            Side::Plus => Regime::PlusInfinity,
            Side::Minus => Regime::MinusInfinity,
        });
    }
    let mut out = Vec::new();
    for regime in regimes {
        for (test, pi) in [("slowly_varying", false), ("positively_increasing", true)] {
            out.push(KaramataEntry {
                side: prof.side,
                function: format!("W{}∘R{}^{{-1}}", sign_char(prof.side), sign_char(prof.side)),
                test: test.into(),
                regime,
                verdict: karamata_check(&h, regime, pi, &cfg.grid),
            });
        }
    }
    out
}

fn sign_char(s: Side) -> char {
    match s {
        Side::Plus => '+',
        Side::Minus => '-',
    }
}

/// Runs every stage; failures of individual stages are recorded in `errors`.
pub fn analyze(problem: &ProblemSpec, cfg: &ClassifyConfig) -> Result<AnalysisReport> {
    let mut errors = Vec::new();
    let mut profiles = Vec::new();
    let mut karamata = Vec::new();
    for side in Side::BOTH {
        let prof = SideProfile::new(problem, side, cfg.weyl.profile)?;
        profiles.push(profile_summary(&prof, problem.endpoint(side)));
        karamata.extend(karamata_entries(&prof, cfg));
    }
    let endpoints: Vec<EndpointClass> = Side::BOTH.iter().map(|&s| classify_endpoint(problem, s, &cfg.weyl)).collect();
    let mut rep = AnalysisReport {
        schema_version: SCHEMA_VERSION.into(),
        problem: problem.clone(),
        profiles,
        endpoints,
        karamata,
        discreteness: None,
        regularity_zero: None,
        regularity_infinity: None,
        kernel: KernelSection { condition: None, jordan: None },
        riesz: None,
        similarity: None,
        traces: BTreeMap::new(),
        errors: Vec::new(),
    };
    match similarity_and_riesz(problem, cfg) {
        Ok(s) => {
            rep.discreteness = Some(s.discreteness);
            rep.regularity_zero = Some(s.zero);
            rep.regularity_infinity = Some(s.infinity);
            rep.kernel.condition = s.kernel;
            rep.riesz = Some(s.riesz);
            rep.similarity = Some(s.similarity);
        }
        Err(e) => errors.push(format!("classification: {e}")),
    }
    match kernel_analysis(problem) {
        Ok(j) => rep.kernel.jordan = Some(j),
        Err(e) => errors.push(format!("kernel analysis: {e}")),
    }
    rep.errors = errors;
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{catalog_entry, CatalogParams};
    use crate::karamata::Status;

    #[test]
    fn sign_weight_report() {
        let p = catalog_entry("sgn", &CatalogParams::default()).unwrap().problem.unwrap();
        let cfg = ClassifyConfig { cross_check: false, ..Default::default() };
        let r = analyze(&p, &cfg).unwrap();
        assert!(r.errors.is_empty(), "{:?}", r.errors);
        assert_eq!(r.similarity.as_ref().unwrap().status, Status::Fails);
        assert_eq!(r.kernel.jordan.as_ref().unwrap().chain_length, 2);
        assert_eq!(r.karamata.len(), 4);
        assert_eq!(r.profiles[1].w_end, Some(-1.0));
    }
}
