//! Report documents written by every command.

use anyhow::{anyhow, Result};
use dfi_core::certify::{json_f64, GapReport, VerificationReport};
use dfi_core::transcription::{
    DiscreteTrajectory, DualBreakdown, DualCertificate, SpecializedDual, SpecializedValue,
};
use serde::{Deserialize, Serialize};

pub const TOOL: &str = "dfi";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub tol: f64,
    pub complementarity: f64,
    pub weak_duality: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    Verified,
    Failed,
    Evaluated,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Specialization {
    pub description: SpecializedDual,
    pub value: SpecializedValue,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportDocument {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub status: Status,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primal_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_f64")]
    pub dual_value: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_f64")]
    pub gap: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trajectory: Option<DiscreteTrajectory>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<DualCertificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verification: Option<VerificationReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_terms: Option<DualBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specialization: Option<Specialization>,
}

mod opt_f64 {
    use super::json_f64;
    use serde::{Deserialize, Deserializer, Serializer};

    #[derive(Deserialize)]
    struct Wrapped(#[serde(with = "json_f64")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(x) => json_f64::serialize(x, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrapped>::deserialize(d)?.map(|w| w.0))
    }
}

impl ReportDocument {
    pub fn new(command: &str, status: Status, tolerances: Tolerances) -> Self {
        ReportDocument {
            tool: TOOL.into(),
            version: VERSION.into(),
            command: command.into(),
            status,
            tolerances,
            primal_value: None,
            dual_value: None,
            gap: None,
            trajectory: None,
            certificate: None,
            verification: None,
            dual_terms: None,
            specialization: None,
        }
    }

    pub fn with_gap(mut self, gap: &GapReport) -> Self {
        self.primal_value = Some(gap.primal);
        self.dual_value = Some(gap.dual);
        self.gap = Some(gap.gap);
        self
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("report document: {e}"))
    }
}
