//! Finite convex piecewise-affine functions `g(x) = max_l (<a_l, x> + b_l)`,
//! their conjugates and subdifferentials.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::ext_real::ExtReal;
use crate::geometry::{combination_residual, Combination};
use crate::linalg::dot;
use crate::lp::{solve_lp, LinearProgram, LpStatus};

/// Activity tolerance on `g(x) - (<a_l, x> + b_l)` for subgradient rows.
pub const SUBDIFF_ACTIVE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AffinePiece {
    pub a: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaxAffine {
    pieces: Vec<AffinePiece>,
    dim: usize,
}

impl MaxAffine {
    pub fn new(pieces: Vec<AffinePiece>) -> Result<Self> {
        let Some(first) = pieces.first() else {
            return Err(Error::Invalid(
                "max-affine function needs at least one piece".into(),
            ));
        };
        let dim = first.a.len();
        for p in &pieces {
            check_len("affine piece", dim, p.a.len())?;
            if !p.b.is_finite() || p.a.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("affine piece"));
            }
        }
        Ok(MaxAffine { pieces, dim })
    }

    pub fn affine(a: Vec<f64>, b: f64) -> Result<Self> {
        MaxAffine::new(vec![AffinePiece { a, b }])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[AffinePiece] {
        &self.pieces
    }

    fn piece_values(&self, x: &[f64]) -> impl Iterator<Item = f64> + '_ {
        let x = x.to_vec();
        self.pieces.iter().map(move |p| dot(&p.a, &x) + p.b)
    }
}

pub fn evaluate(g: &MaxAffine, x: &[f64]) -> Result<f64> {
    check_len("max-affine argument", g.dim, x.len())?;
    Ok(g.piece_values(x).fold(f64::NEG_INFINITY, f64::max))
}

/// `g*(x*) = min {-Σ μ_l b_l : Σ μ_l a_l = x*, μ >= 0, Σ μ_l = 1}`; `+∞`
/// outside the convex hull of the gradients.
pub fn conjugate_eval(g: &MaxAffine, x_star: &[f64]) -> Result<ExtReal> {
    Ok(conjugate_with_weights(g, x_star)?.0)
}

/// Conjugate value and the optimal weights `μ` (a subgradient representation).
pub fn conjugate_with_weights(
    g: &MaxAffine,
    x_star: &[f64],
) -> Result<(ExtReal, Option<Vec<f64>>)> {
    check_len("conjugate argument", g.dim, x_star.len())?;
    let p = g.pieces.len();
    let mut lp = LinearProgram::new(g.pieces.iter().map(|pc| -pc.b).collect());
    for j in 0..g.dim {
        let row: Vec<f64> = g.pieces.iter().map(|pc| pc.a[j]).collect();
        lp.add_eq(&row, x_star[j])?;
    }
    lp.add_eq(&vec![1.0; p], 1.0)?;
    for l in 0..p {
        lp.set_bound(l, Some(0.0), None);
    }
    let sol = solve_lp(&lp)?;
    Ok(match sol.status {
        LpStatus::Optimal => (sol.value, Some(sol.z)),
        LpStatus::Infeasible => (ExtReal::PosInf, None),
        LpStatus::Unbounded => unreachable!("the simplex of weights is bounded"),
    })
}

/// Residual of `y ∈ ∂g(x)`: distance (sup-norm) from `y` to the convex hull
/// of the gradients of the pieces active at `x`.
pub fn subdiff_residual(g: &MaxAffine, x: &[f64], y: &[f64]) -> Result<f64> {
    check_len("subgradient", g.dim, y.len())?;
    let value = evaluate(g, x)?;
    let active: Vec<Vec<f64>> = g
        .pieces
        .iter()
        .zip(g.piece_values(x))
        .filter(|(_, v)| value - v <= SUBDIFF_ACTIVE_TOL)
        .map(|(p, _)| p.a.clone())
        .collect();
    combination_residual(&active, y, Combination::Convex)
}

pub fn subdiff_contains(g: &MaxAffine, x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    Ok(subdiff_residual(g, x, y)? <= tol)
}

/// `g(x) + g*(x*) - <x, x*>`, nonnegative by the Young–Fenchel inequality and
/// zero exactly when `x* ∈ ∂g(x)`.
pub fn young_fenchel_residual(g: &MaxAffine, x: &[f64], x_star: &[f64]) -> Result<ExtReal> {
    let gx = evaluate(g, x)?;
    let conj = conjugate_eval(g, x_star)?;
    conj.try_add(ExtReal::Finite(gx - dot(x, x_star)))
}
