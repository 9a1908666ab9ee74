//! The primal transcription as one linear program.

use std::ops::Range;

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::functions::evaluate;
use crate::lp::{solve_lp, LinearProgram, LpSolution, LpStatus};
use crate::maps::SetValuedMap;

use super::diff::{backward_stencil, forward_stencil};
use super::problem::{DiscreteTrajectory, ProblemSpec};

/// Where each block of variables and constraints sits in the assembled LP.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimalIndex {
    pub dim: usize,
    pub nodes: usize,
    pub inclusion_nodes: usize,
    pub control_dim: usize,
    pub x_start: usize,
    pub v_start: usize,
    pub u_start: usize,
    pub tau: usize,
    /// Inequality rows `<a0, x_0> + <aT, x_N> - τ <= -b`.
    pub objective_rows: Range<usize>,
    /// Equality rows `v_i - (Δᵏx)_i/hᵏ = 0`, `dim` per node.
    pub derivative_rows: Range<usize>,
    /// Equality rows `v_i - Ax_i - Bu_i = 0` (linear-control only).
    pub control_graph_rows: Range<usize>,
    /// Inequality rows `U_A u_i <= U_d` (linear-control only).
    pub control_set_rows: Range<usize>,
    /// Inequality rows `Ax_i - Ev_i <= d` (polyhedral only).
    pub graph_rows: Range<usize>,
    /// Inequality rows of `S` applied to the order-`j` endpoint pair.
    pub endpoint_rows: Vec<Range<usize>>,
    /// Inequality rows of `X_m`.
    pub state_rows: Vec<Range<usize>>,
}

impl PrimalIndex {
    pub fn x(&self, m: usize) -> Range<usize> {
        let s = self.x_start + m * self.dim;
        s..s + self.dim
    }

    pub fn v(&self, i: usize) -> Range<usize> {
        let s = self.v_start + i * self.dim;
        s..s + self.dim
    }

    pub fn u(&self, i: usize) -> Range<usize> {
        let s = self.u_start + i * self.control_dim;
        s..s + self.control_dim
    }
}

pub fn assemble_primal_lp(spec: &ProblemSpec) -> Result<(LinearProgram, PrimalIndex)> {
    let n = spec.state_dim();
    let k = spec.order();
    let nodes = spec.nodes();
    let inc = spec.inclusion_nodes();
    let h = spec.step();
    let control_dim = match spec.dynamics() {
        SetValuedMap::LinearControl(m) => m.control_dim(),
        SetValuedMap::Polyhedral(_) => 0,
    };
    let x_start = 0;
    let v_start = nodes * n;
    let u_start = v_start + inc * n;
    let tau = u_start + inc * control_dim;
    let num_vars = tau + 1;

    let mut c = vec![0.0; num_vars];
    c[tau] = 1.0;
    let mut lp = LinearProgram::new(c);
    let mut row = vec![0.0; num_vars];
    let clear = |row: &mut Vec<f64>| row.iter_mut().for_each(|v| *v = 0.0);

    let ub0 = lp.b_ub.len();
    for piece in spec.objective().pieces() {
        clear(&mut row);
        row[x_start..x_start + n].copy_from_slice(&piece.a[..n]);
        let last = x_start + (nodes - 1) * n;
        row[last..last + n].copy_from_slice(&piece.a[n..]);
        row[tau] = -1.0;
        lp.add_ub(&row, -piece.b)?;
    }
    let objective_rows = ub0..lp.b_ub.len();

    let stencil: Vec<f64> = forward_stencil(k)
        .into_iter()
        .map(|s| s / h.powi(k as i32))
        .collect();
    let eq0 = lp.b_eq.len();
    for i in 0..inc {
        for comp in 0..n {
            clear(&mut row);
            row[v_start + i * n + comp] = 1.0;
            for (s, w) in stencil.iter().enumerate() {
                row[x_start + (i + s) * n + comp] = -w;
            }
            lp.add_eq(&row, 0.0)?;
        }
    }
    let derivative_rows = eq0..lp.b_eq.len();

    let mut control_graph_rows = lp.b_eq.len()..lp.b_eq.len();
    let mut control_set_rows = lp.b_ub.len()..lp.b_ub.len();
    let mut graph_rows = lp.b_ub.len()..lp.b_ub.len();
    match spec.dynamics() {
        SetValuedMap::LinearControl(m) => {
            let eq0 = lp.b_eq.len();
            for i in 0..inc {
                for comp in 0..n {
                    clear(&mut row);
                    row[v_start + i * n + comp] = 1.0;
                    for (col, a) in m.a().row(comp).iter().enumerate() {
                        row[x_start + i * n + col] = -a;
                    }
                    for (col, b) in m.b().row(comp).iter().enumerate() {
                        row[u_start + i * control_dim + col] = -b;
                    }
                    lp.add_eq(&row, 0.0)?;
                }
            }
            control_graph_rows = eq0..lp.b_eq.len();
            let ub0 = lp.b_ub.len();
            for i in 0..inc {
                for (r, &d) in m.u().a().row_iter().zip(m.u().d()) {
                    clear(&mut row);
                    row[u_start + i * control_dim..u_start + (i + 1) * control_dim]
                        .copy_from_slice(r);
                    lp.add_ub(&row, d)?;
                }
            }
            control_set_rows = ub0..lp.b_ub.len();
        }
        SetValuedMap::Polyhedral(p) => {
            let ub0 = lp.b_ub.len();
            for i in 0..inc {
                for r in 0..p.num_rows() {
                    clear(&mut row);
                    row[x_start + i * n..x_start + (i + 1) * n].copy_from_slice(p.a().row(r));
                    for (col, e) in p.e().row(r).iter().enumerate() {
                        row[v_start + i * n + col] = -e;
                    }
                    lp.add_ub(&row, p.d()[r])?;
                }
            }
            graph_rows = ub0..lp.b_ub.len();
        }
    }

    let s = spec.endpoint_set();
    let mut endpoint_rows = Vec::with_capacity(k);
    for j in 0..k {
        let ub0 = lp.b_ub.len();
        let scale = h.powi(j as i32);
        let fwd = forward_stencil(j);
        let bwd = backward_stencil(j);
        for (r, &d) in s.a().row_iter().zip(s.d()) {
            clear(&mut row);
            for comp in 0..n {
                for (t, w) in fwd.iter().enumerate() {
                    row[x_start + t * n + comp] += r[comp] * w / scale;
                }
                for (t, w) in bwd.iter().enumerate() {
                    row[x_start + (nodes - 1 - t) * n + comp] += r[n + comp] * w / scale;
                }
            }
            lp.add_ub(&row, d)?;
        }
        endpoint_rows.push(ub0..lp.b_ub.len());
    }

    let mut state_rows = Vec::with_capacity(nodes);
    for m in 0..nodes {
        let ub0 = lp.b_ub.len();
        let xs = spec.state_set(m);
        for (r, &d) in xs.a().row_iter().zip(xs.d()) {
            clear(&mut row);
            row[x_start + m * n..x_start + (m + 1) * n].copy_from_slice(r);
            lp.add_ub(&row, d)?;
        }
        state_rows.push(ub0..lp.b_ub.len());
    }

    let index = PrimalIndex {
        dim: n,
        nodes,
        inclusion_nodes: inc,
        control_dim,
        x_start,
        v_start,
        u_start,
        tau,
        objective_rows,
        derivative_rows,
        control_graph_rows,
        control_set_rows,
        graph_rows,
        endpoint_rows,
        state_rows,
    };
    Ok((lp, index))
}

/// Result of solving the transcription.
#[derive(Debug, Clone)]
pub struct PrimalSolution {
    pub trajectory: DiscreteTrajectory,
    /// Recovered controls, linear-control maps only.
    pub controls: Option<Vec<Vec<f64>>>,
    pub value: f64,
    pub lp: LinearProgram,
    pub index: PrimalIndex,
    pub lp_solution: LpSolution,
}

/// Solves the transcription. Infeasible and unbounded programs are reported as
/// [`Error::NotOptimal`] with the status.
pub fn solve_primal(spec: &ProblemSpec) -> Result<PrimalSolution> {
    let (lp, index) = assemble_primal_lp(spec)?;
    let sol = solve_lp(&lp)?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NotOptimal(sol.status));
    }
    let x: Vec<Vec<f64>> = (0..index.nodes)
        .map(|m| sol.z[index.x(m)].to_vec())
        .collect();
    let trajectory = DiscreteTrajectory::from_states(x, spec.order(), spec.step())?;
    let controls = matches!(spec.dynamics(), SetValuedMap::LinearControl(_)).then(|| {
        (0..index.inclusion_nodes)
            .map(|i| sol.z[index.u(i)].to_vec())
            .collect()
    });
    let value = evaluate(spec.objective(), &trajectory.endpoints())?;
    debug_assert!(matches!(sol.value, ExtReal::Finite(_)));
    Ok(PrimalSolution {
        trajectory,
        controls,
        value,
        lp,
        index,
        lp_solution: sol,
    })
}
