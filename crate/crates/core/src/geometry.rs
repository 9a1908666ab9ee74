//! Polytopes `{x : Ax <= d}`, polyhedral cones `{w : Cw <= 0}`, support
//! functions, tangent cones and dual-cone membership.
//!
//! Dual cones use the convention `K* = {w* : <w, w*> >= 0 for all w in K}`,
//! so for `K = {w : Cw <= 0}` Farkas gives `K* = {-Cᵀλ : λ >= 0}`.

use std::sync::OnceLock;

use crate::error::{check_len, Error, Result};
use crate::ext_real::ExtReal;
use crate::linalg::{dot, Matrix};
use crate::lp::{solve_lp, LinearProgram, LpStatus};

pub const DEFAULT_ACTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Polytope {
    a: Matrix,
    d: Vec<f64>,
    empty: OnceLock<bool>,
}

impl PartialEq for Polytope {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.d == other.d
    }
}

impl Polytope {
    pub fn new(a: Matrix, d: Vec<f64>) -> Result<Self> {
        check_len("polytope offsets", a.rows(), d.len())?;
        if !a.all_finite() || d.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("polytope"));
        }
        Ok(Polytope {
            a,
            d,
            empty: OnceLock::new(),
        })
    }

    pub fn from_rows(dim: usize, rows: &[Vec<f64>], d: Vec<f64>) -> Result<Self> {
        Polytope::new(Matrix::from_rows(dim, rows)?, d)
    }

    /// `R^n`, described by zero rows.
    pub fn whole_space(dim: usize) -> Self {
        Polytope::new(Matrix::zeros(0, dim), Vec::new()).expect("empty description is valid")
    }

    /// The box `lo <= x_i <= hi` in every coordinate.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Self {
        let mut rows = Vec::with_capacity(2 * dim);
        let mut d = Vec::with_capacity(2 * dim);
        for i in 0..dim {
            let mut r = vec![0.0; dim];
            r[i] = 1.0;
            rows.push(r.clone());
            d.push(hi);
            r[i] = -1.0;
            rows.push(r);
            d.push(-lo);
        }
        Polytope::from_rows(dim, &rows, d).expect("box rows are consistent")
    }

    pub fn dim(&self) -> usize {
        self.a.cols()
    }

    pub fn num_rows(&self) -> usize {
        self.a.rows()
    }

    pub fn a(&self) -> &Matrix {
        &self.a
    }

    pub fn d(&self) -> &[f64] {
        &self.d
    }

    pub fn is_empty(&self) -> Result<bool> {
        if let Some(&e) = self.empty.get() {
            return Ok(e);
        }
        let mut lp = LinearProgram::new(vec![0.0; self.dim()]);
        lp.a_ub = self.a.clone();
        lp.b_ub = self.d.clone();
        let e = solve_lp(&lp)?.status == LpStatus::Infeasible;
        Ok(*self.empty.get_or_init(|| e))
    }

    /// `max_i (A_i x - d_i)`, or `-∞` with no rows.
    pub fn max_violation(&self, x: &[f64]) -> Result<f64> {
        check_len("point", self.dim(), x.len())?;
        Ok(self
            .a
            .row_iter()
            .zip(&self.d)
            .map(|(r, d)| dot(r, x) - d)
            .fold(f64::NEG_INFINITY, f64::max))
    }

    pub fn active_set(&self, x: &[f64], active_tol: f64) -> Result<ActiveSet> {
        check_len("point", self.dim(), x.len())?;
        let slack: Vec<f64> = self
            .a
            .row_iter()
            .zip(&self.d)
            .map(|(r, d)| d - dot(r, x))
            .collect();
        let indices = slack
            .iter()
            .enumerate()
            .filter(|(_, s)| s.abs() <= active_tol)
            .map(|(i, _)| i)
            .collect();
        Ok(ActiveSet { indices, slack })
    }

    /// Cartesian product `self × other`.
    pub fn product(&self, other: &Polytope) -> Polytope {
        let (n1, n2) = (self.dim(), other.dim());
        let mut a = Matrix::zeros(self.num_rows() + other.num_rows(), n1 + n2);
        for i in 0..self.num_rows() {
            a.row_mut(i)[..n1].copy_from_slice(self.a.row(i));
        }
        for i in 0..other.num_rows() {
            a.row_mut(self.num_rows() + i)[n1..].copy_from_slice(other.a.row(i));
        }
        let mut d = self.d.clone();
        d.extend_from_slice(&other.d);
        Polytope::new(a, d).expect("product dimensions are consistent")
    }
}

/// Rows of a polytope that are active at a point.
#[derive(Debug, Clone, PartialEq)]
pub struct ActiveSet {
    pub indices: Vec<usize>,
    /// `d_i - A_i x` for every row.
    pub slack: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PolyhedralCone {
    c: Matrix,
}

impl PolyhedralCone {
    pub fn new(c: Matrix) -> Result<Self> {
        if !c.all_finite() {
            return Err(Error::NonFinite("cone"));
        }
        Ok(PolyhedralCone { c })
    }

    pub fn whole_space(dim: usize) -> Self {
        PolyhedralCone {
            c: Matrix::zeros(0, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.c.cols()
    }

    pub fn c(&self) -> &Matrix {
        &self.c
    }

    pub fn contains(&self, w: &[f64], tol: f64) -> Result<bool> {
        check_len("cone point", self.dim(), w.len())?;
        Ok(self.c.row_iter().all(|r| dot(r, w) <= tol))
    }
}

/// `W_Q(x*) = sup {<x, x*> : x in Q}`.
pub fn support(q: &Polytope, x_star: &[f64]) -> Result<ExtReal> {
    Ok(support_with_point(q, x_star)?.0)
}

/// Support value together with one maximizer when it is finite.
pub fn support_with_point(q: &Polytope, x_star: &[f64]) -> Result<(ExtReal, Option<Vec<f64>>)> {
    check_len("support direction", q.dim(), x_star.len())?;
    let mut lp = LinearProgram::new(x_star.iter().map(|v| -v).collect());
    lp.a_ub = q.a.clone();
    lp.b_ub = q.d.clone();
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Infeasible => (ExtReal::NegInf, None),
        LpStatus::Unbounded => (ExtReal::PosInf, None),
        LpStatus::Optimal => (ExtReal::Finite(dot(x_star, &sol.z)), Some(sol.z)),
    })
}

pub fn contains(q: &Polytope, x: &[f64], tol: f64) -> Result<bool> {
    Ok(q.max_violation(x)? <= tol)
}

/// `{x̄ : A_i x̄ <= 0, i active at x̃}`.
pub fn tangent_cone(q: &Polytope, x_tilde: &[f64], active_tol: f64) -> Result<PolyhedralCone> {
    if q.is_empty()? {
        return Err(Error::Invalid("tangent cone of an empty polytope".into()));
    }
    if !contains(q, x_tilde, active_tol)? {
        return Err(Error::NotMember(format!(
            "tangent cone base point violates a row by {:.3e}",
            q.max_violation(x_tilde)?
        )));
    }
    let active = q.active_set(x_tilde, active_tol)?;
    let rows: Vec<Vec<f64>> = active
        .indices
        .iter()
        .map(|&i| q.a.row(i).to_vec())
        .collect();
    PolyhedralCone::new(Matrix::from_rows(q.dim(), &rows)?)
}

/// Distance-like residual of `w* ∈ K*`: `min_{λ>=0} ‖w* + Cᵀλ‖∞`.
pub fn dual_cone_residual(k: &PolyhedralCone, w_star: &[f64]) -> Result<f64> {
    check_len("dual cone point", k.dim(), w_star.len())?;
    let generators: Vec<Vec<f64>> =
        k.c.row_iter()
            .map(|r| r.iter().map(|v| -v).collect())
            .collect();
    combination_residual(&generators, w_star, Combination::Conic)
}

pub fn dual_cone_membership(k: &PolyhedralCone, w_star: &[f64], tol: f64) -> Result<bool> {
    Ok(dual_cone_residual(k, w_star)? <= tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combination {
    /// `λ >= 0`
    Conic,
    /// `λ >= 0, Σλ = 1`
    Convex,
}

/// Phase-1 style residual `min ‖target - Σ λ_g g‖∞` over admissible weights.
/// Returns `+∞` when no weights are admissible (convex combination of an
/// empty family).
pub fn combination_residual(
    generators: &[Vec<f64>],
    target: &[f64],
    kind: Combination,
) -> Result<f64> {
    let dim = target.len();
    for g in generators {
        check_len("generator", dim, g.len())?;
    }
    if generators.is_empty() {
        return Ok(match kind {
            Combination::Conic => crate::linalg::norm_inf(target),
            Combination::Convex => f64::INFINITY,
        });
    }
    if dim == 0 {
        return Ok(0.0);
    }
    let p = generators.len();
    // variables: λ (p), t
    let mut c = vec![0.0; p + 1];
    c[p] = 1.0;
    let mut lp = LinearProgram::new(c);
    for j in 0..dim {
        let mut row = vec![0.0; p + 1];
        for (l, g) in generators.iter().enumerate() {
            row[l] = g[j];
        }
        row[p] = -1.0;
        // target_j - (Gλ)_j <= t  and  (Gλ)_j - target_j <= t
        let neg: Vec<f64> = row.iter().take(p).map(|v| -v).chain([-1.0]).collect();
        lp.add_ub(&neg, -target[j])?;
        lp.add_ub(&row, target[j])?;
    }
    if kind == Combination::Convex {
        let mut row = vec![1.0; p + 1];
        row[p] = 0.0;
        lp.add_eq(&row, 1.0)?;
    }
    for l in 0..p {
        lp.set_bound(l, Some(0.0), None);
    }
    let sol = solve_lp(&lp)?;
    match sol.status {
        LpStatus::Optimal => Ok(sol.z[p].max(0.0)),
        other => Err(Error::NotOptimal(other)),
    }
}
