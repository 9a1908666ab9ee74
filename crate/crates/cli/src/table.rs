//! Plain-text rendering of a report.

use std::fmt::Write;

use crate::report::{ReportDocument, Status};

/// Scientific notation with three significant digits; infinities spelled out.
pub fn sci(v: f64) -> String {
    if v == 0.0 {
        "0.00e0".into()
    } else if v.is_finite() {
        format!("{v:.2e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "+inf".into()
    } else {
        "-inf".into()
    }
}

fn status_word(s: Status) -> &'static str {
    match s {
        Status::Optimal => "optimal",
        Status::Infeasible => "infeasible",
        Status::Unbounded => "unbounded",
        Status::Verified => "verified",
        Status::Failed => "failed",
        Status::Evaluated => "evaluated",
    }
}

pub fn render(report: &ReportDocument) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", report.tool, report.version, report.command);
    let _ = writeln!(out, "status        {}", status_word(report.status));
    for (label, value) in [
        ("primal value", report.primal_value),
        ("dual value", report.dual_value),
    ] {
        if let Some(v) = value {
            let _ = writeln!(out, "{label:<13} {v:.10}");
        }
    }
    if let Some(g) = report.gap {
        let _ = writeln!(out, "gap           {}", sci(g));
    }
    if let Some(spec) = &report.specialization {
        let _ = writeln!(out, "dual problem  {:?}", spec.description.kind);
        for (term, value) in spec.description.terms.iter().zip(&spec.value.terms) {
            let _ = writeln!(
                out,
                "  {:<22} {:>12}  {}",
                term.name,
                sci(value.to_f64()),
                term.formula
            );
        }
        for c in &spec.description.constraints {
            let _ = writeln!(out, "  subject to {c}");
        }
    }
    if let Some(v) = &report.verification {
        let _ = writeln!(
            out,
            "{:<20} {:>10} {:>6} {:>10}  pass",
            "condition", "residual", "node", "tol"
        );
        for e in &v.entries {
            let node = e.node.map_or("-".to_string(), |n| n.to_string());
            let _ = writeln!(
                out,
                "{:<20} {:>10} {:>6} {:>10}  {}",
                e.condition.label(),
                sci(e.residual),
                node,
                sci(e.tol),
                if e.pass { "yes" } else { "no" }
            );
        }
        let _ = writeln!(out, "convention    {}", v.sign_convention);
    }
    out
}
