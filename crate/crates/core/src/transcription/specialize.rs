//! Closed forms of the dual functional for third-order linear-control and
//! fourth-order polyhedral problems.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::geometry::support;
use crate::linalg::{dot, norm_inf, sub};
use crate::maps::SetValuedMap;

use super::dual::{dual_breakdown, euler_lagrange_arguments, DualOptions};
use super::problem::{DualCertificate, ProblemSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DualKind {
    ThirdOrderLinearControl,
    FourthOrderPolyhedral,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecializedTerm {
    pub name: String,
    pub formula: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecializedDual {
    pub kind: DualKind,
    pub constraints: Vec<String>,
    pub terms: Vec<SpecializedTerm>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecializedValue {
    pub terms: Vec<ExtReal>,
    pub total: ExtReal,
    /// Largest violation of the emitted constraints.
    pub constraint_residual: f64,
}

fn term(name: &str, formula: &str) -> SpecializedTerm {
    SpecializedTerm {
        name: name.into(),
        formula: formula.into(),
    }
}

pub fn specialize_dual(spec: &ProblemSpec) -> Result<SpecializedDual> {
    match (spec.order(), spec.dynamics()) {
        (3, SetValuedMap::LinearControl(_)) => Ok(SpecializedDual {
            kind: DualKind::ThirdOrderLinearControl,
            constraints: vec!["-(Δ³x*)_i/h³ = Aᵀx*_{i+3} + v*_i, i = 0..N-3".into()],
            terms: vec![
                term("conjugate", "-f*(δ*₀² + μ₀, μ_T - δ*_T²)"),
                term("control", "-h Σ_i W_U(Bᵀx*_{i+3})"),
                term("state", "-h Σ_m W_X(-v*_m)"),
                term("endpoint", "-W_S(-μ₀, -μ_T)"),
                term("traces", "-Σ_{j=0,1} W_S((-1)^j δ*₀ʲ, (-1)^{j+1} δ*_Tʲ)"),
            ],
        }),
        (4, SetValuedMap::Polyhedral(_)) => Ok(SpecializedDual {
            kind: DualKind::FourthOrderPolyhedral,
            constraints: vec![
                "x*_{i+4} = -Eᵀλ_i, i = 0..N-4".into(),
                "(Δ⁴x*)_i/h⁴ - v*_i = -Aᵀλ_i, i = 0..N-4".into(),
                "λ_i >= 0".into(),
            ],
            terms: vec![
                term("conjugate", "-f*(-δ*₀³ + μ₀, μ_T + δ*_T³)"),
                term("polyhedral", "-h Σ_i <d, λ_i>"),
                term("state", "-h Σ_m W_X(-v*_m)"),
                term("endpoint", "-W_S(-μ₀, -μ_T)"),
                term("traces", "-Σ_{j=0,1,2} W_S((-1)^j δ*₀ʲ, (-1)^{j+1} δ*_Tʲ)"),
            ],
        }),
        (k, _) => Err(Error::Invalid(format!(
            "no specialized dual for order {k} with this map (needs order 3 linear-control or order 4 polyhedral)"
        ))),
    }
}

impl SpecializedDual {
    pub fn evaluate(
        &self,
        spec: &ProblemSpec,
        cert: &DualCertificate,
        opts: &DualOptions,
    ) -> Result<SpecializedValue> {
        let generic = dual_breakdown(spec, cert, opts)?;
        let p = euler_lagrange_arguments(spec, cert)?;
        let k = spec.order();
        let h = spec.step();
        let (middle, residual) = match (self.kind, spec.dynamics()) {
            (DualKind::ThirdOrderLinearControl, SetValuedMap::LinearControl(f)) => {
                let mut total = 0.0;
                let mut residual: f64 = 0.0;
                for (i, pi) in p.iter().enumerate() {
                    let y = &cert.x_star[i + k];
                    residual = residual.max(norm_inf(&sub(pi, &f.a().tr_mul_vec(y))));
                    total += support(f.u(), &f.b().tr_mul_vec(y))?
                        .finite()
                        .expect("U is bounded and nonempty");
                }
                (ExtReal::Finite(-h * total), residual)
            }
            (DualKind::FourthOrderPolyhedral, SetValuedMap::Polyhedral(f)) => {
                let lambda = cert.lambda.as_ref().ok_or_else(|| {
                    Error::Invalid("polyhedral dual needs graph multipliers".into())
                })?;
                let mut total = 0.0;
                let mut residual: f64 = 0.0;
                for (i, (pi, li)) in p.iter().zip(lambda).enumerate() {
                    let y = &cert.x_star[i + k];
                    let et: Vec<f64> = f.e().tr_mul_vec(li);
                    let at: Vec<f64> = f.a().tr_mul_vec(li);
                    residual = residual
                        .max(
                            y.iter()
                                .zip(&et)
                                .map(|(a, b)| (a + b).abs())
                                .fold(0.0, f64::max),
                        )
                        .max(
                            pi.iter()
                                .zip(&at)
                                .map(|(a, b)| (a + b).abs())
                                .fold(0.0, f64::max),
                        )
                        .max(li.iter().map(|l| -l).fold(0.0, f64::max));
                    total += dot(f.d(), li);
                }
                (ExtReal::Finite(-h * total), residual)
            }
            _ => {
                return Err(Error::Invalid(
                    "specialized dual does not match the problem".into(),
                ))
            }
        };
        let terms = vec![
            generic.conjugate,
            middle,
            generic.state,
            generic.endpoint,
            generic.traces,
        ];
        let total = terms
            .iter()
            .try_fold(ExtReal::ZERO, |acc, t| acc.try_add(*t))?;
        Ok(SpecializedValue {
            terms,
            total,
            constraint_residual: residual,
        })
    }
}
