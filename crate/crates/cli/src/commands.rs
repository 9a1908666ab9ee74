//! Command implementations. Each returns a report together with the process
//! exit code, or a [`CliError`] that knows its own exit code.

use std::fmt;

use anyhow::anyhow;
use dfi_core::certify::{
    check_gap, trajectory_residual, verify, VerifyOptions, COMPLEMENTARITY_TOL, GAP_TOL,
    WEAK_DUALITY_TOL,
};
use dfi_core::demo;
use dfi_core::functions::evaluate;
use dfi_core::lp::LpStatus;
use dfi_core::transcription::{
    dual_breakdown, extract_dual_certificate, solve_primal, specialize_dual, DiscreteTrajectory,
    DualCertificate, DualOptions, PrimalSolution, ProblemSpec,
};
use serde::Deserialize;
use serde_json::Value;

use crate::document::ProblemDocument;
use crate::report::{ReportDocument, Specialization, Status, Tolerances};

pub mod exit {
    pub const OK: u8 = 0;
    pub const FAILURE: u8 = 1;
    pub const INFEASIBLE: u8 = 2;
    pub const UNBOUNDED: u8 = 3;
    pub const PARSE: u8 = 4;
    pub const VERIFICATION: u8 = 5;
}

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub source: anyhow::Error,
}

impl CliError {
    pub fn parse(source: impl Into<anyhow::Error>) -> Self {
        CliError {
            code: exit::PARSE,
            source: source.into(),
        }
    }

    pub fn other(source: impl Into<anyhow::Error>) -> Self {
        CliError {
            code: exit::FAILURE,
            source: source.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#}", self.source)
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub report: ReportDocument,
    pub code: u8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tol: f64,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            tol: dfi_core::certify::INCLUSION_TOL,
        }
    }
}

impl Settings {
    fn tolerances(&self) -> Tolerances {
        Tolerances {
            tol: self.tol,
            complementarity: COMPLEMENTARITY_TOL,
            weak_duality: WEAK_DUALITY_TOL,
            gap: GAP_TOL,
        }
    }

    fn verify_options(&self) -> VerifyOptions {
        VerifyOptions {
            tol: self.tol,
            ..VerifyOptions::default()
        }
    }
}

pub fn parse_problem(text: &str) -> CliResult<ProblemSpec> {
    ProblemDocument::from_json(text)
        .and_then(|doc| doc.to_spec())
        .map_err(CliError::parse)
}

/// Solves the transcription, or reports infeasibility/unboundedness as a
/// finished outcome.
fn solve_or_report(
    spec: &ProblemSpec,
    command: &str,
    settings: &Settings,
) -> CliResult<Result<PrimalSolution, Outcome>> {
    match solve_primal(spec) {
        Ok(p) => Ok(Ok(p)),
        Err(dfi_core::Error::NotOptimal(status)) => {
            let (status, code) = match status {
                LpStatus::Infeasible => (Status::Infeasible, exit::INFEASIBLE),
                _ => (Status::Unbounded, exit::UNBOUNDED),
            };
            Ok(Err(Outcome {
                report: ReportDocument::new(command, status, settings.tolerances()),
                code,
            }))
        }
        Err(e) => Err(CliError::other(e)),
    }
}

pub fn solve(problem: &str, settings: &Settings) -> CliResult<Outcome> {
    let spec = parse_problem(problem)?;
    let primal = match solve_or_report(&spec, "solve", settings)? {
        Ok(p) => p,
        Err(outcome) => return Ok(outcome),
    };
    let cert = extract_dual_certificate(&spec, &primal).map_err(CliError::other)?;
    let mut report = ReportDocument::new("solve", Status::Optimal, settings.tolerances());
    report.primal_value = Some(primal.value);
    report.trajectory = Some(primal.trajectory);
    report.certificate = Some(cert);
    Ok(Outcome {
        report,
        code: exit::OK,
    })
}

pub fn gap(problem: &str, settings: &Settings) -> CliResult<Outcome> {
    let spec = parse_problem(problem)?;
    if let Err(outcome) = solve_or_report(&spec, "gap", settings)? {
        return Ok(outcome);
    }
    let gap = check_gap(&spec).map_err(CliError::other)?;
    let status = if gap.pass {
        Status::Verified
    } else {
        Status::Failed
    };
    Ok(Outcome {
        report: ReportDocument::new("gap", status, settings.tolerances()).with_gap(&gap),
        code: if gap.pass {
            exit::OK
        } else {
            exit::VERIFICATION
        },
    })
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TrajectoryInput {
    x: Vec<Vec<f64>>,
    #[serde(default)]
    v: Option<Vec<Vec<f64>>>,
}

/// Takes the `key` member of a report document, or the whole value when the
/// file holds the bare object.
fn member(text: &str, key: &str, what: &str) -> CliResult<Value> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| CliError::parse(anyhow!("{what}: {e}")))?;
    Ok(match value {
        Value::Object(mut map) if map.contains_key(key) => map.remove(key).expect("checked"),
        other => other,
    })
}

pub fn parse_trajectory(text: &str, spec: &ProblemSpec) -> CliResult<DiscreteTrajectory> {
    let input: TrajectoryInput = serde_json::from_value(member(text, "trajectory", "trajectory")?)
        .map_err(|e| CliError::parse(anyhow!("trajectory: {e}")))?;
    let traj = match input.v {
        Some(v) => DiscreteTrajectory { x: input.x, v },
        None => DiscreteTrajectory::from_states(input.x, spec.order(), spec.step())
            .map_err(|e| CliError::parse(anyhow!("trajectory: {e}")))?,
    };
    traj.check_shape(spec)
        .map_err(|e| CliError::parse(anyhow!("trajectory does not match the problem: {e}")))?;
    Ok(traj)
}

pub fn parse_certificate(text: &str, spec: &ProblemSpec) -> CliResult<DualCertificate> {
    let cert: DualCertificate = serde_json::from_value(member(text, "certificate", "certificate")?)
        .map_err(|e| CliError::parse(anyhow!("certificate: {e}")))?;
    cert.check_shape(spec)
        .map_err(|e| CliError::parse(anyhow!("certificate does not match the problem: {e}")))?;
    Ok(cert)
}

fn verified_report(
    command: &str,
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    settings: &Settings,
) -> CliResult<ReportDocument> {
    let residual = trajectory_residual(spec, traj).map_err(CliError::other)?;
    if residual > settings.tol {
        return Err(CliError {
            code: exit::VERIFICATION,
            source: anyhow!("trajectory is infeasible (residual {residual:.2e})"),
        });
    }
    let verification =
        verify(spec, traj, cert, &settings.verify_options()).map_err(CliError::other)?;
    let breakdown = dual_breakdown(spec, cert, &DualOptions::default()).map_err(CliError::other)?;
    let primal = evaluate(spec.objective(), &traj.endpoints()).map_err(CliError::other)?;
    let dual = breakdown.total.to_f64();
    let status = if verification.pass() {
        Status::Verified
    } else {
        Status::Failed
    };
    let mut report = ReportDocument::new(command, status, settings.tolerances());
    report.primal_value = Some(primal);
    report.dual_value = Some(dual);
    report.gap = Some(primal - dual);
    report.verification = Some(verification);
    report.dual_terms = Some(breakdown);
    Ok(report)
}

fn finish(report: ReportDocument) -> Outcome {
    let code = match report.status {
        Status::Failed => exit::VERIFICATION,
        _ => exit::OK,
    };
    Outcome { report, code }
}

pub fn verify_files(
    problem: &str,
    primal: &str,
    certificate: &str,
    settings: &Settings,
) -> CliResult<Outcome> {
    let spec = parse_problem(problem)?;
    let traj = parse_trajectory(primal, &spec)?;
    let cert = parse_certificate(certificate, &spec)?;
    Ok(finish(verified_report(
        "verify", &spec, &traj, &cert, settings,
    )?))
}

fn specialization(spec: &ProblemSpec, cert: &DualCertificate) -> CliResult<Option<Specialization>> {
    let Ok(description) = specialize_dual(spec) else {
        return Ok(None);
    };
    let value = description
        .evaluate(spec, cert, &DualOptions::default())
        .map_err(CliError::other)?;
    Ok(Some(Specialization { description, value }))
}

/// Evaluates the dual functional at `certificate`, or at the certificate
/// extracted from the solved transcription when none is given.
pub fn dual(problem: &str, certificate: Option<&str>, settings: &Settings) -> CliResult<Outcome> {
    let spec = parse_problem(problem)?;
    let mut report = ReportDocument::new("dual", Status::Evaluated, settings.tolerances());
    let cert = match certificate {
        Some(text) => parse_certificate(text, &spec)?,
        None => {
            let primal = match solve_or_report(&spec, "dual", settings)? {
                Ok(p) => p,
                Err(outcome) => return Ok(outcome),
            };
            report.primal_value = Some(primal.value);
            extract_dual_certificate(&spec, &primal).map_err(CliError::other)?
        }
    };
    let breakdown =
        dual_breakdown(&spec, &cert, &DualOptions::default()).map_err(CliError::other)?;
    let dual = breakdown.total.to_f64();
    report.dual_value = Some(dual);
    report.gap = report.primal_value.map(|p| p - dual);
    report.dual_terms = Some(breakdown);
    report.specialization = specialization(&spec, &cert)?;
    report.certificate = Some(cert);
    Ok(Outcome {
        report,
        code: exit::OK,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemoName {
    Decay,
    Ptl,
    Pfc,
}

impl DemoName {
    pub fn spec(self) -> ProblemSpec {
        match self {
            DemoName::Decay => demo::decay(),
            DemoName::Ptl => demo::ptl(demo::PTL_INTERVALS),
            DemoName::Pfc => demo::pfc(demo::PFC_INTERVALS),
        }
        .expect("built-in instances are valid")
    }
}

/// Solves a built-in instance and runs every check on the result. Returns
/// the instance document alongside the outcome so the caller can write it.
pub fn demo(name: DemoName, settings: &Settings) -> CliResult<(ProblemDocument, Outcome)> {
    let spec = name.spec();
    let doc = ProblemDocument::from_spec(&spec);
    let primal = solve_primal(&spec).map_err(CliError::other)?;
    let cert = extract_dual_certificate(&spec, &primal).map_err(CliError::other)?;
    let mut report = verified_report("demo", &spec, &primal.trajectory, &cert, settings)?;
    let gap_ok = report.gap.is_some_and(|g| g.abs() <= GAP_TOL);
    if !gap_ok {
        report.status = Status::Failed;
    }
    report.specialization = specialization(&spec, &cert)?;
    report.trajectory = Some(primal.trajectory);
    report.certificate = Some(cert);
    Ok((doc, finish(report)))
}
