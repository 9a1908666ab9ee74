//! Node-by-node verification of the sufficient optimality conditions and of
//! the duality relations for a (trajectory, certificate) pair.
//!
//! Every check reports a quantitative residual: memberships are measured by
//! phase-1 LPs (`combination_residual` and friends), so a failure always
//! carries its margin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ext_real::ExtReal;
use crate::functions::{evaluate, subdiff_residual};
use crate::geometry::{dual_cone_residual, tangent_cone};
use crate::linalg::{dot, norm_inf, sub};
use crate::maps::{argmax_residual_with, lam_polyhedral_members, max_principle_gap, SetValuedMap};
use crate::transcription::{
    adjoint_traces, endpoint_derivatives, euler_lagrange_arguments, evaluate_dual_functional,
    extract_dual_certificate, forward_diff, solve_primal, DiscreteTrajectory, DualCertificate,
    ProblemSpec,
};

pub const INCLUSION_TOL: f64 = 1e-7;
pub const COMPLEMENTARITY_TOL: f64 = 1e-8;
pub const WEAK_DUALITY_TOL: f64 = 1e-7;
pub const GAP_TOL: f64 = 1e-6;

pub const SIGN_CONVENTION: &str = "dual cones K* = {w* : <w, w*> >= 0 for all w in K}; \
LAM: (x*, -v*) in cone{(-A_i, E_i) : row i active}, i.e. x* = -Aᵀλ, v* = -Eᵀλ, λ >= 0; \
the inclusion at node i is paired with the adjoint x*_{i+k}";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionId {
    /// Euler–Lagrange inclusion and state-constraint multipliers.
    A,
    /// Argmaximum condition.
    B,
    /// Transversality against `∂f` and `K*_S` at the order-zero endpoints.
    C,
    /// Transversality of the higher adjoint traces.
    D,
    MaxPrinciple,
    Complementarity,
    Nonnegativity,
    PolyhedralAdjoint,
    WeakDuality,
    StrongDuality,
}

impl ConditionId {
    pub fn label(self) -> &'static str {
        match self {
            ConditionId::A => "a",
            ConditionId::B => "b",
            ConditionId::C => "c",
            ConditionId::D => "d",
            ConditionId::MaxPrinciple => "max_principle",
            ConditionId::Complementarity => "complementarity",
            ConditionId::Nonnegativity => "nonnegativity",
            ConditionId::PolyhedralAdjoint => "polyhedral_adjoint",
            ConditionId::WeakDuality => "weak_duality",
            ConditionId::StrongDuality => "strong_duality",
        }
    }
}

/// `f64` that survives JSON: infinities and NaN are written as strings.
pub mod json_f64 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!(
                    "expected a number, got {other:?}"
                ))),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportEntry {
    pub condition: ConditionId,
    #[serde(with = "json_f64")]
    pub residual: f64,
    /// Node (or derivative order for condition `d`) where the residual is attained.
    pub node: Option<usize>,
    pub tol: f64,
    pub pass: bool,
}

impl ReportEntry {
    fn new(condition: ConditionId, worst: (f64, Option<usize>), tol: f64) -> Self {
        let (residual, node) = worst;
        ReportEntry {
            condition,
            residual,
            node,
            tol,
            pass: residual <= tol,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub entries: Vec<ReportEntry>,
    pub sign_convention: String,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn entry(&self, id: ConditionId) -> Option<&ReportEntry> {
        self.entries.iter().find(|e| e.condition == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub tol: f64,
    pub complementarity_tol: f64,
    pub weak_duality_tol: f64,
    pub gap_tol: f64,
    pub execution: Execution,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            tol: INCLUSION_TOL,
            complementarity_tol: COMPLEMENTARITY_TOL,
            weak_duality_tol: WEAK_DUALITY_TOL,
            gap_tol: GAP_TOL,
            execution: Execution::default(),
        }
    }
}

fn worst(values: impl IntoIterator<Item = (f64, usize)>) -> (f64, Option<usize>) {
    values.into_iter().fold((0.0, None), |(best, at), (v, i)| {
        if v > best || (v.is_nan() && !best.is_nan()) {
            (v, Some(i))
        } else {
            (best, at)
        }
    })
}

/// Largest violation of the trajectory's own constraints: derivative
/// consistency, inclusion, endpoint set and state sets.
pub fn trajectory_residual(spec: &ProblemSpec, traj: &DiscreteTrajectory) -> Result<f64> {
    traj.check_shape(spec)?;
    let dx = forward_diff(&traj.x, spec.order(), spec.step())?;
    let mut r: f64 = 0.0;
    for (i, (d, v)) in dx.iter().zip(&traj.v).enumerate() {
        r = r.max(norm_inf(&sub(d, v)) / norm_inf(d).max(1.0));
        r = r.max(spec.dynamics().membership_residual(&traj.x[i], v)?);
    }
    for (l, t) in endpoint_derivatives(&traj.x, spec.order(), spec.step())? {
        let pair: Vec<f64> = l.iter().chain(&t).copied().collect();
        r = r.max(spec.endpoint_set().max_violation(&pair)?.max(0.0));
    }
    for (m, x) in traj.x.iter().enumerate() {
        r = r.max(spec.state_set(m).max_violation(x)?.max(0.0));
    }
    Ok(r)
}

fn require_feasible(spec: &ProblemSpec, traj: &DiscreteTrajectory, tol: f64) -> Result<()> {
    let r = trajectory_residual(spec, traj)?;
    if r > tol {
        return Err(Error::NotMember(format!(
            "trajectory is infeasible (residual {r:.3e})"
        )));
    }
    Ok(())
}

/// Condition (a): `p_i ∈ F*(x*_{i+k}; (x_i, v_i))` on every inclusion node and
/// `v*_m ∈ K*_{X_m}(x_m)` on every node.
pub fn check_euler_lagrange(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    tol: f64,
    exec: Execution,
) -> Result<ReportEntry> {
    require_feasible(spec, traj, tol)?;
    let k = spec.order();
    let p = euler_lagrange_arguments(spec, cert)?;
    let lam = exec.map_range(spec.inclusion_nodes(), |i| -> Result<f64> {
        let y = &cert.x_star[i + k];
        let (x, v) = (&traj.x[i], &traj.v[i]);
        match spec.dynamics() {
            SetValuedMap::LinearControl(f) => {
                let mismatch = norm_inf(&sub(&p[i], &f.a().tr_mul_vec(y)));
                Ok(mismatch.max(max_principle_gap(f, y, x, v, tol)?))
            }
            SetValuedMap::Polyhedral(f) => lam_polyhedral_members(f, y, x, v, tol)?.residual(&p[i]),
        }
    });
    let cone = exec.map_range(spec.nodes(), |m| -> Result<f64> {
        let k_x = tangent_cone(spec.state_set(m), &traj.x[m], tol)?;
        dual_cone_residual(&k_x, &cert.v_star[m])
    });
    let lam = lam.into_iter().collect::<Result<Vec<_>>>()?;
    let cone = cone.into_iter().collect::<Result<Vec<_>>>()?;
    let w = worst(
        lam.into_iter()
            .enumerate()
            .map(|(i, r)| (r, i))
            .chain(cone.into_iter().enumerate().map(|(m, r)| (r, m))),
    );
    Ok(ReportEntry::new(ConditionId::A, w, tol))
}

/// Condition (b): `v_i ∈ F_A(x_i; x*_{i+k})`.
pub fn check_argmax(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    tol: f64,
    exec: Execution,
) -> Result<ReportEntry> {
    require_feasible(spec, traj, tol)?;
    cert.check_shape(spec)?;
    let k = spec.order();
    let gaps = exec.map_range(spec.inclusion_nodes(), |i| {
        argmax_residual_with(
            spec.dynamics(),
            &traj.x[i],
            &traj.v[i],
            &cert.x_star[i + k],
            tol,
        )
    });
    let mut values = Vec::with_capacity(gaps.len());
    for (i, g) in gaps.into_iter().enumerate() {
        match g? {
            ExtReal::Finite(v) => values.push((v, i)),
            other => {
                return Err(Error::InfiniteHamiltonian {
                    node: i,
                    value: other.to_string(),
                })
            }
        }
    }
    Ok(ReportEntry::new(ConditionId::B, worst(values), tol))
}

/// Conditions (c) and (d).
pub fn check_transversality(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    tol: f64,
) -> Result<(ReportEntry, ReportEntry)> {
    traj.check_shape(spec)?;
    let k = spec.order();
    let traces = adjoint_traces(spec, cert)?;
    let pairs = endpoint_derivatives(&traj.x, k, spec.step())?;
    let pair = |order: usize| -> Vec<f64> {
        pairs[order]
            .0
            .iter()
            .chain(&pairs[order].1)
            .copied()
            .collect()
    };

    let g = traces.subgradient(cert);
    let endpoints = traj.endpoints();
    let sub_r = subdiff_residual(spec.objective(), &endpoints, &g)?;
    let k_s = tangent_cone(spec.endpoint_set(), &pair(0), tol)?;
    let mu: Vec<f64> = cert.mu0.iter().chain(&cert.mu_t).copied().collect();
    let cone_r = dual_cone_residual(&k_s, &mu)?;
    let c = ReportEntry::new(ConditionId::C, (sub_r.max(cone_r), Some(0)), tol);

    let mut d_values = Vec::new();
    for j in 0..k - 1 {
        let arg: Vec<f64> = traces.support_argument(j).iter().map(|v| -v).collect();
        let order = k - 1 - j;
        let k_s = tangent_cone(spec.endpoint_set(), &pair(order), tol)?;
        d_values.push((dual_cone_residual(&k_s, &arg)?, order));
    }
    let d = ReportEntry::new(ConditionId::D, worst(d_values), tol);
    Ok((c, d))
}

/// Residual `J*(cert) - f(x_0, x_N)`; passes when at most `1e-7`.
pub fn check_weak_duality(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
) -> Result<ReportEntry> {
    check_weak_duality_with(spec, traj, cert, WEAK_DUALITY_TOL)
}

pub fn check_weak_duality_with(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    tol: f64,
) -> Result<ReportEntry> {
    traj.check_shape(spec)?;
    let primal = evaluate(spec.objective(), &traj.endpoints())?;
    let dual = evaluate_dual_functional(spec, cert)?;
    let residual = dual.try_sub(ExtReal::Finite(primal))?.to_f64();
    Ok(ReportEntry::new(
        ConditionId::WeakDuality,
        (residual, None),
        tol,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub primal: f64,
    #[serde(with = "json_f64")]
    pub dual: f64,
    #[serde(with = "json_f64")]
    pub gap: f64,
    pub pass: bool,
}

/// Solves the transcription, extracts the multipliers and compares the
/// primal optimum with the dual functional at the extracted certificate.
pub fn check_gap(spec: &ProblemSpec) -> Result<GapReport> {
    let primal = solve_primal(spec)?;
    let cert = extract_dual_certificate(spec, &primal)?;
    let dual = evaluate_dual_functional(spec, &cert)?.to_f64();
    let gap = primal.value - dual;
    Ok(GapReport {
        primal: primal.value,
        dual,
        gap,
        pass: gap.abs() <= GAP_TOL,
    })
}

/// `max_{u∈U} <Bu, x*_{i+k}> - <Bu_i, x*_{i+k}>` per node.
pub fn check_max_principle(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    tol: f64,
) -> Result<ReportEntry> {
    let SetValuedMap::LinearControl(f) = spec.dynamics() else {
        return Err(Error::Invalid(
            "maximum principle needs a linear-control map".into(),
        ));
    };
    traj.check_shape(spec)?;
    cert.check_shape(spec)?;
    let k = spec.order();
    let mut values = Vec::with_capacity(spec.inclusion_nodes());
    for i in 0..spec.inclusion_nodes() {
        values.push((
            max_principle_gap(f, &cert.x_star[i + k], &traj.x[i], &traj.v[i], tol)?,
            i,
        ));
    }
    Ok(ReportEntry::new(
        ConditionId::MaxPrinciple,
        worst(values),
        tol,
    ))
}

/// Multiplier conditions for polyhedral maps: `λ_i >= 0`, complementary
/// slackness, and the adjoint relations `x*_{i+k} = -Eᵀλ_i`,
/// `(-1)^k (Δᵏx*)_i/hᵏ - v*_i = -Aᵀλ_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolyhedralReport {
    pub nonnegativity: ReportEntry,
    pub complementarity: ReportEntry,
    pub adjoint: ReportEntry,
}

pub fn check_polyhedral_conditions(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    tol: f64,
    complementarity_tol: f64,
) -> Result<PolyhedralReport> {
    let SetValuedMap::Polyhedral(f) = spec.dynamics() else {
        return Err(Error::Invalid(
            "polyhedral conditions need a polyhedral map".into(),
        ));
    };
    traj.check_shape(spec)?;
    let lambda = cert
        .lambda
        .as_ref()
        .ok_or_else(|| Error::Invalid("certificate has no graph multipliers".into()))?;
    let p = euler_lagrange_arguments(spec, cert)?;
    let k = spec.order();
    let mut neg = Vec::new();
    let mut compl = Vec::new();
    let mut adj = Vec::new();
    for (i, l) in lambda.iter().enumerate() {
        neg.push((l.iter().map(|v| -v).fold(0.0, f64::max), i));
        compl.push((dot(&f.graph_slack(&traj.x[i], &traj.v[i]), l).abs(), i));
        let et = f.e().tr_mul_vec(l);
        let at = f.a().tr_mul_vec(l);
        let r1 = cert.x_star[i + k]
            .iter()
            .zip(&et)
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max);
        let r2 = p[i]
            .iter()
            .zip(&at)
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max);
        adj.push((r1.max(r2), i));
    }
    Ok(PolyhedralReport {
        nonnegativity: ReportEntry::new(ConditionId::Nonnegativity, worst(neg), tol),
        complementarity: ReportEntry::new(
            ConditionId::Complementarity,
            worst(compl),
            complementarity_tol,
        ),
        adjoint: ReportEntry::new(ConditionId::PolyhedralAdjoint, worst(adj), tol),
    })
}

/// Runs every applicable check. The strong-duality entry compares `J*(cert)`
/// with the trajectory's own objective.
pub fn verify(
    spec: &ProblemSpec,
    traj: &DiscreteTrajectory,
    cert: &DualCertificate,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    cert.check_shape(spec)?;
    let mut entries = vec![
        check_euler_lagrange(spec, traj, cert, opts.tol, opts.execution)?,
        check_argmax(spec, traj, cert, opts.tol, opts.execution)?,
    ];
    let (c, d) = check_transversality(spec, traj, cert, opts.tol)?;
    entries.push(c);
    entries.push(d);
    match spec.dynamics() {
        SetValuedMap::LinearControl(_) => {
            entries.push(check_max_principle(spec, traj, cert, opts.tol)?)
        }
        SetValuedMap::Polyhedral(_) if cert.lambda.is_some() => {
            let r =
                check_polyhedral_conditions(spec, traj, cert, opts.tol, opts.complementarity_tol)?;
            entries.extend([r.nonnegativity, r.complementarity, r.adjoint]);
        }
        SetValuedMap::Polyhedral(_) => {}
    }
    let primal = evaluate(spec.objective(), &traj.endpoints())?;
    let dual = evaluate_dual_functional(spec, cert)?;
    let weak = dual.try_sub(ExtReal::Finite(primal))?.to_f64();
    entries.push(ReportEntry::new(
        ConditionId::WeakDuality,
        (weak, None),
        opts.weak_duality_tol,
    ));
    entries.push(ReportEntry::new(
        ConditionId::StrongDuality,
        (weak.abs(), None),
        opts.gap_tol,
    ));
    Ok(VerificationReport {
        entries,
        sign_convention: SIGN_CONVENTION.into(),
    })
}
