//! Dense linear programming with dual multipliers.
//!
//! Problems are stated as
//!
//! ```text
//! minimize  c·z
//! s.t.      A_ub z <= b_ub,   A_eq z = b_eq,   lower <= z <= upper
//! ```
//!
//! Duals follow one fixed convention: `y_ub`, `y_lower`, `y_upper` are
//! nonnegative prices and
//!
//! ```text
//! c + A_ubᵀ y_ub - A_eqᵀ y_eq - y_lower + y_upper = 0
//! dual value = b_eq·y_eq - b_ub·y_ub + lower·y_lower - upper·y_upper
//! ```
//!
//! so the dual value equals `c·z` at an optimum.

mod simplex;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{dot, norm_inf, Matrix};

pub use simplex::solve_lp_with;

pub const DEFAULT_FEAS_TOL: f64 = 1e-8;
pub const DEFAULT_GAP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Bound {
    pub lower: Option<f64>,
    pub upper: Option<f64>,
}

impl Bound {
    pub const FREE: Bound = Bound {
        lower: None,
        upper: None,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub c: Vec<f64>,
    pub a_ub: Matrix,
    pub b_ub: Vec<f64>,
    pub a_eq: Matrix,
    pub b_eq: Vec<f64>,
    pub bounds: Vec<Bound>,
}

impl LinearProgram {
    /// An unconstrained program over `c.len()` free variables.
    pub fn new(c: Vec<f64>) -> Self {
        let n = c.len();
        LinearProgram {
            c,
            a_ub: Matrix::zeros(0, n),
            b_ub: Vec::new(),
            a_eq: Matrix::zeros(0, n),
            b_eq: Vec::new(),
            bounds: vec![Bound::FREE; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn add_ub(&mut self, row: &[f64], b: f64) -> Result<()> {
        self.a_ub.push_row(row)?;
        self.b_ub.push(b);
        Ok(())
    }

    pub fn add_eq(&mut self, row: &[f64], b: f64) -> Result<()> {
        self.a_eq.push_row(row)?;
        self.b_eq.push(b);
        Ok(())
    }

    pub fn set_bound(&mut self, var: usize, lower: Option<f64>, upper: Option<f64>) {
        self.bounds[var] = Bound { lower, upper };
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.c.len();
        check_len("A_ub columns", n, self.a_ub.cols())?;
        check_len("A_eq columns", n, self.a_eq.cols())?;
        check_len("b_ub", self.a_ub.rows(), self.b_ub.len())?;
        check_len("b_eq", self.a_eq.rows(), self.b_eq.len())?;
        check_len("bounds", n, self.bounds.len())?;
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.c) {
            return Err(Error::NonFinite("objective"));
        }
        if !self.a_ub.all_finite() || !finite(&self.b_ub) {
            return Err(Error::NonFinite("inequality rows"));
        }
        if !self.a_eq.all_finite() || !finite(&self.b_eq) {
            return Err(Error::NonFinite("equality rows"));
        }
        for b in &self.bounds {
            if b.lower.is_some_and(|l| !l.is_finite()) || b.upper.is_some_and(|u| !u.is_finite()) {
                return Err(Error::NonFinite("variable bounds"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; empty unless optimal.
    pub z: Vec<f64>,
    /// `+∞` when infeasible, `-∞` when unbounded.
    pub value: ExtReal,
    pub y_ub: Vec<f64>,
    pub y_eq: Vec<f64>,
    pub y_lower: Vec<f64>,
    pub y_upper: Vec<f64>,
}

impl LpSolution {
    pub(crate) fn non_optimal(status: LpStatus) -> Self {
        let value = match status {
            LpStatus::Infeasible => ExtReal::PosInf,
            LpStatus::Unbounded => ExtReal::NegInf,
            LpStatus::Optimal => unreachable!("optimal solutions carry a point"),
        };
        LpSolution {
            status,
            z: Vec::new(),
            value,
            y_ub: Vec::new(),
            y_eq: Vec::new(),
            y_lower: Vec::new(),
            y_upper: Vec::new(),
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }

    pub fn dual_value(&self, lp: &LinearProgram) -> f64 {
        let bound_term: f64 = lp
            .bounds
            .iter()
            .enumerate()
            .map(|(j, b)| {
                b.lower.map_or(0.0, |l| l * self.y_lower[j])
                    - b.upper.map_or(0.0, |u| u * self.y_upper[j])
            })
            .sum();
        dot(&lp.b_eq, &self.y_eq) - dot(&lp.b_ub, &self.y_ub) + bound_term
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SimplexOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Consecutive degenerate pivots tolerated before switching to Bland's rule.
    pub degenerate_switch: usize,
}

impl Default for SimplexOptions {
    fn default() -> Self {
        SimplexOptions {
            feas_tol: DEFAULT_FEAS_TOL,
            gap_tol: DEFAULT_GAP_TOL,
            max_iter: 200_000,
            degenerate_switch: 25,
        }
    }
}

/// Solves `lp` with default tolerances.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpSolution> {
    solve_lp_with(lp, &SimplexOptions::default())
}

/// Largest residual per KKT block. Row residuals are divided by
/// `max(1, ‖a_i‖∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    pub primal_feasibility: f64,
    pub dual_feasibility: f64,
    pub stationarity: f64,
    pub complementarity: f64,
    pub duality_gap: f64,
    pub tol: f64,
    pub pass: bool,
}

impl KktReport {
    pub fn max_residual(&self) -> f64 {
        self.primal_feasibility
            .max(self.dual_feasibility)
            .max(self.stationarity)
            .max(self.complementarity)
            .max(self.duality_gap)
    }
}

pub fn check_kkt(lp: &LinearProgram, sol: &LpSolution, tol: f64) -> Result<KktReport> {
    lp.validate()?;
    if sol.status != LpStatus::Optimal {
        return Err(Error::NotOptimal(sol.status));
    }
    let n = lp.num_vars();
    check_len("solution point", n, sol.z.len())?;
    check_len("inequality duals", lp.b_ub.len(), sol.y_ub.len())?;
    check_len("equality duals", lp.b_eq.len(), sol.y_eq.len())?;
    check_len("lower-bound duals", n, sol.y_lower.len())?;
    check_len("upper-bound duals", n, sol.y_upper.len())?;

    let mut primal: f64 = 0.0;
    let mut dual: f64 = 0.0;
    let mut compl: f64 = 0.0;
    for (i, row) in lp.a_ub.row_iter().enumerate() {
        let norm = norm_inf(row).max(1.0);
        let slack = (dot(row, &sol.z) - lp.b_ub[i]) / norm;
        primal = primal.max(slack);
        dual = dual.max(-sol.y_ub[i]);
        compl = compl.max((sol.y_ub[i] * slack * norm).abs());
    }
    for (i, row) in lp.a_eq.row_iter().enumerate() {
        let norm = norm_inf(row).max(1.0);
        primal = primal.max(((dot(row, &sol.z) - lp.b_eq[i]) / norm).abs());
    }
    for (j, b) in lp.bounds.iter().enumerate() {
        let z = sol.z[j];
        if let Some(l) = b.lower {
            primal = primal.max(l - z);
            compl = compl.max((sol.y_lower[j] * (l - z)).abs());
        }
        if let Some(u) = b.upper {
            primal = primal.max(z - u);
            compl = compl.max((sol.y_upper[j] * (z - u)).abs());
        }
        dual = dual.max(-sol.y_lower[j]).max(-sol.y_upper[j]);
        if b.lower.is_none() {
            dual = dual.max(sol.y_lower[j].abs());
        }
        if b.upper.is_none() {
            dual = dual.max(sol.y_upper[j].abs());
        }
    }

    let mut grad = lp.c.clone();
    for (g, a) in grad.iter_mut().zip(lp.a_ub.tr_mul_vec(&sol.y_ub)) {
        *g += a;
    }
    for (g, a) in grad.iter_mut().zip(lp.a_eq.tr_mul_vec(&sol.y_eq)) {
        *g -= a;
    }
    for j in 0..n {
        grad[j] += sol.y_upper[j] - sol.y_lower[j];
    }
    let stationarity = norm_inf(&grad);
    let primal_value = dot(&lp.c, &sol.z);
    let gap = (primal_value - sol.dual_value(lp)).abs() / primal_value.abs().max(1.0);

    let primal = primal.max(0.0);
    let dual = dual.max(0.0);
    let pass = primal <= tol && dual <= tol && stationarity <= tol && compl <= tol && gap <= tol;
    Ok(KktReport {
        primal_feasibility: primal,
        dual_feasibility: dual,
        stationarity,
        complementarity: compl,
        duality_gap: gap,
        tol,
        pass,
    })
}
