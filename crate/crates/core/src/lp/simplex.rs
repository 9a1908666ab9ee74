//! Two-phase dense tableau simplex.
//!
//! Every variable is split into a positive and a negative part; bounds become
//! extra inequality rows. Each row keeps an identity column (its slack or its
//! artificial) so the dual multipliers can be read off the final reduced
//! costs.

use super::{LinearProgram, LpSolution, LpStatus, SimplexOptions};
use crate::error::{Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{dot, norm_inf, LuFactor, Matrix};

const PIVOT_TOL: f64 = 1e-9;
const RATIO_TIE: f64 = 1e-12;
/// Bound relaxation of the first pass of the two-pass ratio test.
const HARRIS_DELTA: f64 = 1e-9;
/// Pivots between rebuilds of the tableau from the original rows.
const REINVERT_EVERY: usize = 64;
/// Smallest pivot, relative to the largest eligible one, that Bland mode accepts.
const BLAND_PIVOT_SHARE: f64 = 1e-3;

#[derive(Clone, Copy, PartialEq)]
enum RowKind {
    Ub,
    Eq,
}

struct Row {
    coef: Vec<f64>,
    rhs: f64,
    kind: RowKind,
    /// Multiplier applied to the original row (scaling times sign flip).
    factor: f64,
}

struct Tableau {
    m: usize,
    width: usize,
    data: Vec<f64>,
    basis: Vec<usize>,
    /// Constraint rows as first assembled, used to rebuild `data`.
    orig: Vec<f64>,
}

impl Tableau {
    fn at(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.width + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.data[r * self.width + self.width - 1]
    }

    /// Row 0 is the objective row; constraint `i` lives in row `i + 1`.
    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.width;
        let p = self.data[row * w + col];
        let (before, rest) = self.data.split_at_mut(row * w);
        let (prow, after) = rest.split_at_mut(w);
        for v in prow.iter_mut() {
            *v /= p;
        }
        prow[col] = 1.0;
        let eliminate = |chunk: &mut [f64]| {
            let f = chunk[col];
            if f != 0.0 {
                for (v, pv) in chunk.iter_mut().zip(prow.iter()) {
                    *v -= f * pv;
                }
                chunk[col] = 0.0;
            }
        };
        before.chunks_mut(w).for_each(eliminate);
        after.chunks_mut(w).for_each(eliminate);
        self.basis[row - 1] = col;
    }

    fn basis_matrix(&self) -> Matrix {
        let (m, w) = (self.m, self.width);
        let mut b = Matrix::zeros(m, m);
        for (k, &col) in self.basis.iter().enumerate() {
            for r in 0..m {
                b[(r, k)] = self.orig[r * w + col];
            }
        }
        b
    }

    /// Recomputes every constraint row as `B⁻¹` times the original rows.
    /// Leaves the tableau untouched when the basis does not factor.
    fn reinvert(&mut self) -> bool {
        let (m, w) = (self.m, self.width);
        let b = self.basis_matrix();
        let Some(lu) = LuFactor::new(&b) else {
            return false;
        };
        let mut column = vec![0.0; m];
        for c in 0..w {
            for r in 0..m {
                column[r] = self.orig[r * w + c];
            }
            let z = if c == w - 1 {
                lu.solve_refined(&b, &column)
            } else {
                lu.solve(&column)
            };
            for (r, v) in z.into_iter().enumerate() {
                self.data[(r + 1) * w + c] = v;
            }
        }
        for (k, &col) in self.basis.iter().enumerate() {
            for r in 0..m {
                self.data[(r + 1) * w + col] = if r == k { 1.0 } else { 0.0 };
            }
        }
        true
    }

    /// Fills row 0 with reduced costs and minus the objective value.
    fn set_objective(&mut self, cost: &dyn Fn(usize) -> f64) {
        let w = self.width;
        for c in 0..w {
            self.data[c] = if c < w - 1 { cost(c) } else { 0.0 };
        }
        for i in 0..self.m {
            let cb = cost(self.basis[i]);
            if cb != 0.0 {
                let (obj, rest) = self.data.split_at_mut(w);
                let row = &rest[i * w..(i + 1) * w];
                for (o, v) in obj.iter_mut().zip(row) {
                    *o -= cb * v;
                }
            }
        }
        for &col in &self.basis {
            self.data[col] = 0.0;
        }
    }

    fn refresh(&mut self, cost: &dyn Fn(usize) -> f64) {
        self.reinvert();
        self.set_objective(cost);
    }
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

fn entering(tab: &Tableau, allowed: usize, opt_tol: f64, bland: bool) -> Option<usize> {
    let mut enter = None;
    let mut best = -opt_tol;
    for j in 0..allowed {
        let d = tab.at(0, j);
        if d < -opt_tol {
            if bland {
                return Some(j);
            }
            if d < best {
                best = d;
                enter = Some(j);
            }
        }
    }
    enter
}

/// Leaving row and its step length. A first pass bounds the step by the
/// smallest ratio with every basic value relaxed by `HARRIS_DELTA`; among the
/// rows under that bound the largest pivot wins, or in Bland mode the
/// smallest basic index among pivots within `BLAND_PIVOT_SHARE` of it.
fn leaving(tab: &Tableau, col: usize, bland: bool) -> Option<(usize, f64)> {
    let candidates: Vec<(usize, f64, f64)> = (1..=tab.m)
        .filter_map(|r| {
            let a = tab.at(r, col);
            (a > PIVOT_TOL).then(|| (r, a, tab.rhs(r).max(0.0)))
        })
        .collect();
    let bound = candidates
        .iter()
        .map(|&(_, a, rhs)| (rhs + HARRIS_DELTA) / a)
        .fold(f64::INFINITY, f64::min);
    if !bound.is_finite() {
        return None;
    }
    let mut eligible = candidates.iter().filter(|&&(_, a, rhs)| rhs / a <= bound);
    let largest = eligible.clone().map(|&(_, a, _)| a).fold(0.0, f64::max);
    let pick = if bland {
        eligible
            .filter(|&&(_, a, _)| a >= BLAND_PIVOT_SHARE * largest)
            .min_by_key(|&&(r, _, _)| tab.basis[r - 1])
    } else {
        eligible.find(|&&(_, a, _)| a == largest)
    };
    pick.map(|&(r, a, rhs)| (r, rhs / a))
}

fn run_phase(
    tab: &mut Tableau,
    allowed: usize,
    opt_tol: f64,
    cost: &dyn Fn(usize) -> f64,
    opts: &SimplexOptions,
    iters: &mut usize,
) -> Result<PhaseEnd> {
    let mut degenerate_run = 0usize;
    let mut bland = false;
    let mut since_refresh = 0usize;
    loop {
        let Some(col) = entering(tab, allowed, opt_tol, bland) else {
            if since_refresh == 0 {
                return Ok(PhaseEnd::Optimal);
            }
            tab.refresh(cost);
            since_refresh = 0;
            continue;
        };
        let Some((row, ratio)) = leaving(tab, col, bland) else {
            if since_refresh == 0 {
                return Ok(PhaseEnd::Unbounded);
            }
            tab.refresh(cost);
            since_refresh = 0;
            continue;
        };

        *iters += 1;
        if *iters > opts.max_iter {
            return Err(Error::IterationLimit(opts.max_iter));
        }
        if ratio <= RATIO_TIE {
            degenerate_run += 1;
            if degenerate_run >= opts.degenerate_switch {
                bland = true;
            }
        } else {
            degenerate_run = 0;
        }
        tab.pivot(row, col);
        since_refresh += 1;
        if since_refresh >= REINVERT_EVERY {
            tab.refresh(cost);
            since_refresh = 0;
        }
    }
}

pub fn solve_lp_with(lp: &LinearProgram, opts: &SimplexOptions) -> Result<LpSolution> {
    lp.validate()?;
    let n = lp.num_vars();
    let n_ub = lp.b_ub.len();
    let n_eq = lp.b_eq.len();

    // Collect rows: original inequalities, bound rows, equalities.
    let mut rows: Vec<Row> = Vec::new();
    let push = |rows: &mut Vec<Row>, coef: Vec<f64>, rhs: f64, kind: RowKind| {
        let scale = norm_inf(&coef);
        let scale = if scale > 0.0 { 1.0 / scale } else { 1.0 };
        let sign = if rhs * scale < 0.0 { -1.0 } else { 1.0 };
        let factor = scale * sign;
        rows.push(Row {
            coef: coef.iter().map(|v| v * factor).collect(),
            rhs: rhs * factor,
            kind,
            factor,
        });
    };
    for (row, &b) in lp.a_ub.row_iter().zip(&lp.b_ub) {
        push(&mut rows, row.to_vec(), b, RowKind::Ub);
    }
    let mut lower_rows = vec![None; n];
    let mut upper_rows = vec![None; n];
    for (j, bound) in lp.bounds.iter().enumerate() {
        if let Some(l) = bound.lower {
            let mut coef = vec![0.0; n];
            coef[j] = -1.0;
            lower_rows[j] = Some(rows.len());
            push(&mut rows, coef, -l, RowKind::Ub);
        }
        if let Some(u) = bound.upper {
            let mut coef = vec![0.0; n];
            coef[j] = 1.0;
            upper_rows[j] = Some(rows.len());
            push(&mut rows, coef, u, RowKind::Ub);
        }
    }
    let eq_start = rows.len();
    for (row, &b) in lp.a_eq.row_iter().zip(&lp.b_eq) {
        push(&mut rows, row.to_vec(), b, RowKind::Eq);
    }

    let m = rows.len();
    let n_ineq = eq_start;
    // Column layout: [z+ z-] (2n), slacks (n_ineq), artificials (as needed), rhs.
    let slack0 = 2 * n;
    let art0 = slack0 + n_ineq;
    let needs_art: Vec<bool> = rows
        .iter()
        .map(|r| r.kind == RowKind::Eq || r.factor < 0.0)
        .collect();
    let n_art = needs_art.iter().filter(|&&a| a).count();
    let width = art0 + n_art + 1;
    let mut tab = Tableau {
        m,
        width,
        data: vec![0.0; (m + 1) * width],
        basis: vec![0; m],
        orig: Vec::new(),
    };
    let mut identity_col = vec![0usize; m];
    let mut next_art = art0;
    for (i, row) in rows.iter().enumerate() {
        let r = i + 1;
        for j in 0..n {
            tab.data[r * width + 2 * j] = row.coef[j];
            tab.data[r * width + 2 * j + 1] = -row.coef[j];
        }
        if row.kind == RowKind::Ub {
            tab.data[r * width + slack0 + i] = if row.factor < 0.0 { -1.0 } else { 1.0 };
        }
        tab.data[r * width + width - 1] = row.rhs;
        if needs_art[i] {
            tab.data[r * width + next_art] = 1.0;
            tab.basis[i] = next_art;
            identity_col[i] = next_art;
            next_art += 1;
        } else {
            tab.basis[i] = slack0 + i;
            identity_col[i] = slack0 + i;
        }
    }

    tab.orig = tab.data[width..].to_vec();
    let mut iters = 0usize;

    // Phase 1: minimize the sum of artificials.
    if n_art > 0 {
        let phase_one = |col: usize| if col >= art0 { 1.0 } else { 0.0 };
        tab.set_objective(&phase_one);
        run_phase(&mut tab, art0, 1e-10, &phase_one, opts, &mut iters)?;
        let infeasibility = -tab.rhs(0);
        if infeasibility > opts.feas_tol * 1e-1 {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
        }
        // Drive zero-level artificials out of the basis where possible.
        for i in 0..m {
            if tab.basis[i] >= art0 {
                let r = i + 1;
                let mut best: Option<(usize, f64)> = None;
                for j in 0..art0 {
                    let a = tab.at(r, j).abs();
                    if a > PIVOT_TOL && best.is_none_or(|(_, b)| a > b) {
                        best = Some((j, a));
                    }
                }
                if let Some((j, _)) = best {
                    tab.pivot(r, j);
                }
            }
        }
    }

    // Phase 2 objective row.
    let cost = |col: usize| -> f64 {
        if col < 2 * n {
            if col.is_multiple_of(2) {
                lp.c[col / 2]
            } else {
                -lp.c[col / 2]
            }
        } else {
            0.0
        }
    };
    tab.refresh(&cost);
    let opt_tol = 1e-10 * norm_inf(&lp.c).max(1.0);
    match run_phase(&mut tab, art0, opt_tol, &cost, opts, &mut iters)? {
        PhaseEnd::Unbounded => return Ok(LpSolution::non_optimal(LpStatus::Unbounded)),
        PhaseEnd::Optimal => {}
    }

    let mut x = vec![0.0; width - 1];
    for i in 0..m {
        x[tab.basis[i]] = tab.rhs(i + 1);
    }
    let z: Vec<f64> = (0..n).map(|j| x[2 * j] - x[2 * j + 1]).collect();

    // Standard-form duals y_r = -d(identity column), mapped back to the
    // original rows through the scaling/sign factor. The tableau values are
    // replaced by a fresh solve against the final basis when it factors.
    let u = basis_duals(&tab, cost)
        .unwrap_or_else(|| (0..m).map(|i| -tab.at(0, identity_col[i])).collect());
    let w: Vec<f64> = (0..m).map(|i| u[i] * rows[i].factor).collect();
    let y_ub: Vec<f64> = (0..n_ub).map(|i| -w[i]).collect();
    let y_eq: Vec<f64> = (0..n_eq).map(|i| w[eq_start + i]).collect();
    let y_lower: Vec<f64> = lower_rows
        .iter()
        .map(|r| r.map_or(0.0, |i| -w[i]))
        .collect();
    let y_upper: Vec<f64> = upper_rows
        .iter()
        .map(|r| r.map_or(0.0, |i| -w[i]))
        .collect();
    let value = ExtReal::Finite(dot(&lp.c, &z));

    Ok(LpSolution {
        status: LpStatus::Optimal,
        z,
        value,
        y_ub,
        y_eq,
        y_lower,
        y_upper,
    })
}

/// Solves `Bᵀ u = c_B` for the final basis `B` with one refinement step.
fn basis_duals(tab: &Tableau, cost: impl Fn(usize) -> f64) -> Option<Vec<f64>> {
    let bt = tab.basis_matrix().transpose();
    let cb: Vec<f64> = tab.basis.iter().map(|&c| cost(c)).collect();
    let u = LuFactor::new(&bt)?.solve_refined(&bt, &cb);
    u.iter().all(|v| v.is_finite()).then_some(u)
}
