//! Dual certificates: extraction from LP multipliers, adjoint endpoint traces
//! and the discrete dual functional.
//!
//! Summation by parts on the grid gives, for any states `x` and adjoint `y`,
//!
//! ```text
//! h Σ_{i<N-k+1} [(-1)^k <x_i, (Dy)_i> - <(Dx)_i, y_{i+k}>] + h Σ_{m>N-k} <x_m, v*_m>
//!     = Σ_m <x_m, R_m>
//! ```
//!
//! where `R` vanishes away from the first and last `k` nodes. Rewriting the
//! boundary part in the endpoint differences `δ₀ˡ`, `δ_Tˡ` of `x` yields the
//! adjoint traces that enter the transversality conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::ext_real::ExtReal;
use crate::geometry::{combination_residual, Combination};
use crate::linalg::{concat, norm_inf, solve_dense, Matrix};
use crate::lp::{solve_lp, LinearProgram, LpStatus};
use crate::maps::{m_function_closed_form, SetValuedMap};

use super::diff::{backward_stencil, forward_stencil, DifferenceOperator};
use super::primal::PrimalSolution;
use super::problem::{DualCertificate, ProblemSpec};

/// Feasibility tolerance for the affine constraints hidden in the dual
/// functional (conjugate, support and `M_F` terms), relative to
/// `max(1, ‖target‖∞)`.
pub const DUAL_FEAS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualOptions {
    pub feas_tol: f64,
    pub execution: Execution,
}

impl Default for DualOptions {
    fn default() -> Self {
        DualOptions {
            feas_tol: DUAL_FEAS_TOL,
            execution: Execution::default(),
        }
    }
}

fn sign(k: usize) -> f64 {
    if k.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// First arguments of `M_F` along the grid:
/// `p_i = (-1)^k (Δᵏx*)_i / hᵏ - v*_i` for every inclusion node `i`.
pub fn euler_lagrange_arguments(
    spec: &ProblemSpec,
    cert: &DualCertificate,
) -> Result<Vec<Vec<f64>>> {
    cert.check_shape(spec)?;
    let k = spec.order();
    let d = DifferenceOperator::new(k, spec.nodes(), spec.step())?;
    let dy = d.apply(&cert.x_star);
    Ok(dy
        .into_iter()
        .zip(&cert.v_star)
        .map(|(dyi, nu)| dyi.iter().zip(nu).map(|(a, b)| sign(k) * a - b).collect())
        .collect())
}

/// Node-wise boundary functional `R_m` of the summation-by-parts identity.
pub fn boundary_functional(spec: &ProblemSpec, cert: &DualCertificate) -> Result<Vec<Vec<f64>>> {
    cert.check_shape(spec)?;
    let k = spec.order();
    let h = spec.step();
    let inc = spec.inclusion_nodes();
    let d = DifferenceOperator::new(k, spec.nodes(), h)?;
    let dy = d.apply(&cert.x_star);
    let shifted: Vec<Vec<f64>> = cert.x_star[k..].to_vec();
    let dty = d.apply_transpose(&shifted);
    Ok((0..spec.nodes())
        .map(|m| {
            let mut r: Vec<f64> = dty[m].iter().map(|v| -h * v).collect();
            if m < inc {
                for (o, v) in r.iter_mut().zip(&dy[m]) {
                    *o += h * sign(k) * v;
                }
            } else {
                for (o, v) in r.iter_mut().zip(&cert.v_star[m]) {
                    *o += h * v;
                }
            }
            r
        })
        .collect())
}

/// Adjoint endpoint traces `δ*₀ʲ`, `δ*_Tʲ` for `j = 0..k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjointTraces {
    pub left: Vec<Vec<f64>>,
    pub right: Vec<Vec<f64>>,
}

impl AdjointTraces {
    /// Argument of `∂f` in the transversality condition:
    /// `((-1)^{k-1} δ*₀^{k-1} + μ₀, (-1)^k δ*_T^{k-1} + μ_T)`.
    pub fn subgradient(&self, cert: &DualCertificate) -> Vec<f64> {
        let k = self.left.len();
        let g0: Vec<f64> = self.left[k - 1]
            .iter()
            .zip(&cert.mu0)
            .map(|(d, m)| sign(k - 1) * d + m)
            .collect();
        let gt: Vec<f64> = self.right[k - 1]
            .iter()
            .zip(&cert.mu_t)
            .map(|(d, m)| sign(k) * d + m)
            .collect();
        concat(&g0, &gt)
    }

    /// `((-1)^j δ*₀ʲ, (-1)^{j+1} δ*_Tʲ)`, the argument of `W_S` paired with the
    /// order `k-1-j` endpoint derivatives, for `j = 0..k-1`.
    pub fn support_argument(&self, j: usize) -> Vec<f64> {
        let l: Vec<f64> = self.left[j].iter().map(|v| sign(j) * v).collect();
        let r: Vec<f64> = self.right[j].iter().map(|v| sign(j + 1) * v).collect();
        concat(&l, &r)
    }
}

pub fn adjoint_traces(spec: &ProblemSpec, cert: &DualCertificate) -> Result<AdjointTraces> {
    let r = boundary_functional(spec, cert)?;
    let k = spec.order();
    let n = spec.state_dim();
    let h = spec.step();
    let last = spec.nodes() - 1;
    // (weights)ᵀ c = R on each window; weights[l][s] is the coefficient of the
    // s-th window node in the order-l endpoint difference.
    let window = |stencil: fn(usize) -> Vec<f64>| {
        let mut w = Matrix::zeros(k, k);
        for l in 0..k {
            for (s, c) in stencil(l).into_iter().enumerate() {
                w.row_mut(s)[l] = c / h.powi(l as i32);
            }
        }
        w
    };
    let wl = window(forward_stencil);
    let wr = window(backward_stencil);
    let mut left = vec![vec![0.0; n]; k];
    let mut right = vec![vec![0.0; n]; k];
    for comp in 0..n {
        let rl: Vec<f64> = (0..k).map(|s| r[s][comp]).collect();
        let rr: Vec<f64> = (0..k).map(|s| r[last - s][comp]).collect();
        let cl =
            solve_dense(&wl, &rl).ok_or_else(|| Error::Invalid("singular trace system".into()))?;
        let cr =
            solve_dense(&wr, &rr).ok_or_else(|| Error::Invalid("singular trace system".into()))?;
        for j in 0..k {
            left[j][comp] = sign(j) * cl[k - 1 - j];
            right[j][comp] = sign(j + 1) * cr[k - 1 - j];
        }
    }
    Ok(AdjointTraces { left, right })
}

/// `min <cost, w>` over `w >= 0` (and `Σw = 1` when `convex`) with
/// `Σ w_l g_l = target`, where the equality is relaxed to the smallest
/// achievable sup-norm violation as long as that stays within
/// `tol·max(1, ‖target‖∞)`. `+∞` when no weights come that close.
fn relaxed_min(
    cost: &[f64],
    generators: &[&[f64]],
    target: &[f64],
    convex: bool,
    tol: f64,
) -> Result<ExtReal> {
    let scale = norm_inf(target).max(1.0);
    let owned: Vec<Vec<f64>> = generators.iter().map(|g| g.to_vec()).collect();
    let kind = if convex {
        Combination::Convex
    } else {
        Combination::Conic
    };
    let closest = combination_residual(&owned, target, kind)?;
    if closest > tol * scale {
        return Ok(ExtReal::PosInf);
    }
    if generators.is_empty() {
        return Ok(ExtReal::ZERO);
    }
    let slack = closest * (1.0 + 1e-9) + 1e-14 * scale;
    let p = generators.len();
    let mut lp = LinearProgram::new(cost.to_vec());
    let mut row = vec![0.0; p];
    for (j, t) in target.iter().enumerate() {
        for (l, g) in generators.iter().enumerate() {
            row[l] = g[j];
        }
        lp.add_ub(&row, t + slack)?;
        let neg: Vec<f64> = row.iter().map(|v| -v).collect();
        lp.add_ub(&neg, slack - t)?;
    }
    if convex {
        lp.add_eq(&vec![1.0; p], 1.0)?;
    }
    for l in 0..p {
        lp.set_bound(l, Some(0.0), None);
    }
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => sol.value,
        LpStatus::Infeasible => ExtReal::PosInf,
        LpStatus::Unbounded => ExtReal::NegInf,
    })
}

/// Support function of a nonempty polytope through its dual LP,
/// `W_Q(w) = min {<d, λ> : Aᵀλ = w, λ >= 0}`.
pub(crate) fn relaxed_support(
    q: &crate::geometry::Polytope,
    w: &[f64],
    tol: f64,
) -> Result<ExtReal> {
    let rows: Vec<&[f64]> = q.a().row_iter().collect();
    relaxed_min(q.d(), &rows, w, false, tol)
}

fn relaxed_conjugate(f: &crate::functions::MaxAffine, g: &[f64], tol: f64) -> Result<ExtReal> {
    let cost: Vec<f64> = f.pieces().iter().map(|p| -p.b).collect();
    let grads: Vec<&[f64]> = f.pieces().iter().map(|p| p.a.as_slice()).collect();
    relaxed_min(&cost, &grads, g, true, tol)
}

fn relaxed_m_function(map: &SetValuedMap, p: &[f64], y: &[f64], tol: f64) -> Result<ExtReal> {
    match map {
        SetValuedMap::LinearControl(m) => {
            let scale = norm_inf(p).max(norm_inf(&m.a().tr_mul_vec(y))).max(1.0);
            m_function_closed_form(m, p, y, tol * scale)
        }
        SetValuedMap::Polyhedral(m) => {
            let gens: Vec<Vec<f64>> = (0..m.num_rows())
                .map(|r| {
                    let a: Vec<f64> = m.a().row(r).iter().map(|v| -v).collect();
                    let e: Vec<f64> = m.e().row(r).iter().map(|v| -v).collect();
                    concat(&a, &e)
                })
                .collect();
            let refs: Vec<&[f64]> = gens.iter().map(Vec::as_slice).collect();
            Ok(-relaxed_min(m.d(), &refs, &concat(p, y), false, tol)?)
        }
    }
}

/// The terms of the discrete dual functional. Each is at most finite from
/// above; `-∞` in any term makes the total `-∞`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualBreakdown {
    /// `-f*(g₀, g_T)`
    pub conjugate: ExtReal,
    /// `h Σ_i M_F(p_i, x*_{i+k})`
    pub inclusion: ExtReal,
    /// `-h Σ_m W_{X_m}(-v*_m)`
    pub state: ExtReal,
    /// `-W_S(-μ₀, -μ_T)`
    pub endpoint: ExtReal,
    /// `-Σ_{j<k-1} W_S((-1)^j δ*₀ʲ, (-1)^{j+1} δ*_Tʲ)`
    pub traces: ExtReal,
    pub total: ExtReal,
}

fn sum_terms(terms: impl IntoIterator<Item = ExtReal>) -> Result<ExtReal> {
    terms
        .into_iter()
        .try_fold(ExtReal::ZERO, |acc, t| acc.try_add(t))
}

pub fn evaluate_dual_functional(spec: &ProblemSpec, cert: &DualCertificate) -> Result<ExtReal> {
    Ok(dual_breakdown(spec, cert, &DualOptions::default())?.total)
}

pub fn dual_breakdown(
    spec: &ProblemSpec,
    cert: &DualCertificate,
    opts: &DualOptions,
) -> Result<DualBreakdown> {
    let k = spec.order();
    let h = spec.step();
    let tol = opts.feas_tol;
    let p = euler_lagrange_arguments(spec, cert)?;
    let traces = adjoint_traces(spec, cert)?;

    let g = traces.subgradient(cert);
    let conjugate = -relaxed_conjugate(spec.objective(), &g, tol)?;

    let inclusion_terms = opts.execution.map_range(spec.inclusion_nodes(), |i| {
        relaxed_m_function(spec.dynamics(), &p[i], &cert.x_star[i + k], tol)
    });
    let inclusion = sum_terms(inclusion_terms.into_iter().collect::<Result<Vec<_>>>()?)?.scale(h);

    let state_terms = opts.execution.map_range(spec.nodes(), |m| {
        let neg: Vec<f64> = cert.v_star[m].iter().map(|v| -v).collect();
        relaxed_support(spec.state_set(m), &neg, tol)
    });
    let state = -sum_terms(state_terms.into_iter().collect::<Result<Vec<_>>>()?)?.scale(h);

    let neg_mu: Vec<f64> = cert.mu0.iter().chain(&cert.mu_t).map(|v| -v).collect();
    let endpoint = -relaxed_support(spec.endpoint_set(), &neg_mu, tol)?;

    let trace_terms = (0..k - 1)
        .map(|j| relaxed_support(spec.endpoint_set(), &traces.support_argument(j), tol))
        .collect::<Result<Vec<_>>>()?;
    let traces_term = -sum_terms(trace_terms)?;

    let total = sum_terms([conjugate, inclusion, state, endpoint, traces_term])?;
    Ok(DualBreakdown {
        conjugate,
        inclusion,
        state,
        endpoint,
        traces: traces_term,
        total,
    })
}

/// Maps the multipliers of an optimal transcription onto a certificate.
///
/// The adjoint at nodes `k..=N` is read from the derivative rows, the state
/// multipliers from the `X_m` rows and `(μ₀, μ_T)` from the order-zero
/// endpoint rows. The first `k` adjoint values are then fixed by the
/// Euler–Lagrange relation on the first `k` inclusion nodes.
pub fn extract_dual_certificate(
    spec: &ProblemSpec,
    primal: &PrimalSolution,
) -> Result<DualCertificate> {
    let sol = &primal.lp_solution;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NotOptimal(sol.status));
    }
    let idx = &primal.index;
    let n = spec.state_dim();
    let k = spec.order();
    let h = spec.step();
    let nodes = spec.nodes();

    let mut x_star = vec![vec![0.0; n]; nodes];
    let eta = &sol.y_eq[idx.derivative_rows.clone()];
    for i in 0..spec.inclusion_nodes() {
        x_star[i + k] = eta[i * n..(i + 1) * n].iter().map(|e| e / h).collect();
    }

    let v_star: Vec<Vec<f64>> = (0..nodes)
        .map(|m| {
            let gamma = &sol.y_ub[idx.state_rows[m].clone()];
            spec.state_set(m)
                .a()
                .tr_mul_vec(gamma)
                .iter()
                .map(|v| -v / h)
                .collect()
        })
        .collect();

    let beta = &sol.y_ub[idx.endpoint_rows[0].clone()];
    let sigma = spec.endpoint_set().a().tr_mul_vec(beta);
    let mu0: Vec<f64> = sigma[..n].iter().map(|v| -v).collect();
    let mu_t: Vec<f64> = sigma[n..].iter().map(|v| -v).collect();

    let lambda = match spec.dynamics() {
        SetValuedMap::Polyhedral(p) => {
            let rows = p.num_rows();
            let all = &sol.y_ub[idx.graph_rows.clone()];
            Some(
                (0..spec.inclusion_nodes())
                    .map(|i| {
                        all[i * rows..(i + 1) * rows]
                            .iter()
                            .map(|l| l / h)
                            .collect()
                    })
                    .collect::<Vec<Vec<f64>>>(),
            )
        }
        SetValuedMap::LinearControl(_) => None,
    };

    // (-1)^k (Dy)_m - ν_m = p_m, solved for y_m from m = k-1 down to 0
    let stencil = forward_stencil(k);
    let hk = h.powi(k as i32);
    for m in (0..k).rev() {
        let p_m = match (spec.dynamics(), &lambda) {
            (SetValuedMap::LinearControl(f), _) => f.a().tr_mul_vec(&x_star[m + k]),
            (SetValuedMap::Polyhedral(f), Some(l)) => {
                f.a().tr_mul_vec(&l[m]).iter().map(|v| -v).collect()
            }
            (SetValuedMap::Polyhedral(_), None) => {
                unreachable!("polyhedral maps carry multipliers")
            }
        };
        let ym: Vec<f64> = (0..n)
            .map(|c| {
                let tail: f64 = (1..=k).map(|s| stencil[s] * x_star[m + s][c]).sum();
                hk * (p_m[c] + v_star[m][c]) - sign(k) * tail
            })
            .collect();
        x_star[m] = ym;
    }

    Ok(DualCertificate {
        x_star,
        v_star,
        mu0,
        mu_t,
        lambda,
    })
}
