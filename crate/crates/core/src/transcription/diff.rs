//! Forward and backward difference stencils on uniform grids.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Coefficients `(-1)^{j-s} C(j, s)`, `s = 0..=j`, of the forward difference.
pub fn forward_stencil(j: usize) -> Vec<f64> {
    (0..=j)
        .map(|s| {
            if (j - s).is_multiple_of(2) {
                binomial(j, s)
            } else {
                -binomial(j, s)
            }
        })
        .collect()
}

/// Coefficients `(-1)^s C(j, s)` of the backward difference at the last
/// node, applied to `x_N, x_{N-1}, ..., x_{N-j}`.
pub fn backward_stencil(j: usize) -> Vec<f64> {
    (0..=j)
        .map(|s| {
            if s % 2 == 0 {
                binomial(j, s)
            } else {
                -binomial(j, s)
            }
        })
        .collect()
}

/// `(Δʲ·)/hʲ` on a grid of `nodes` points.
#[derive(Debug, Clone, PartialEq)]
pub struct DifferenceOperator {
    order: usize,
    nodes: usize,
    h: f64,
    stencil: Vec<f64>,
}

impl DifferenceOperator {
    pub fn new(order: usize, nodes: usize, h: f64) -> Result<Self> {
        if nodes <= order {
            return Err(Error::Invalid(format!(
                "a difference of order {order} needs more than {order} nodes, got {nodes}"
            )));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Invalid(format!(
                "grid step must be positive, got {h}"
            )));
        }
        let scale = h.powi(order as i32);
        let stencil = forward_stencil(order)
            .into_iter()
            .map(|c| c / scale)
            .collect();
        Ok(DifferenceOperator {
            order,
            nodes,
            h,
            stencil,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Number of output entries, `nodes - order`.
    pub fn len(&self) -> usize {
        self.nodes - self.order
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Scaled stencil; row `i` of the operator is this placed at columns `i..=i+order`.
    pub fn stencil(&self) -> &[f64] {
        &self.stencil
    }

    pub fn matrix(&self) -> Matrix {
        let mut m = Matrix::zeros(self.len(), self.nodes);
        for i in 0..self.len() {
            m.row_mut(i)[i..=i + self.order].copy_from_slice(&self.stencil);
        }
        m
    }

    pub fn apply(&self, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
        assert_eq!(x.len(), self.nodes, "grid length");
        let dim = x.first().map_or(0, Vec::len);
        (0..self.len())
            .map(|i| {
                let mut out = vec![0.0; dim];
                for (s, c) in self.stencil.iter().enumerate() {
                    for (o, v) in out.iter_mut().zip(&x[i + s]) {
                        *o += c * v;
                    }
                }
                out
            })
            .collect()
    }

    /// `Dᵀy` for `y` with `len()` entries, giving `nodes` entries.
    pub fn apply_transpose(&self, y: &[Vec<f64>]) -> Vec<Vec<f64>> {
        assert_eq!(y.len(), self.len(), "difference list length");
        let dim = y.first().map_or(0, Vec::len);
        let mut out = vec![vec![0.0; dim]; self.nodes];
        for (i, yi) in y.iter().enumerate() {
            for (s, c) in self.stencil.iter().enumerate() {
                for (o, v) in out[i + s].iter_mut().zip(yi) {
                    *o += c * v;
                }
            }
        }
        out
    }
}

pub fn forward_diff(x: &[Vec<f64>], j: usize, h: f64) -> Result<Vec<Vec<f64>>> {
    Ok(DifferenceOperator::new(j, x.len(), h)?.apply(x))
}

/// Pairs `(δ₀ʲ, δ_Tʲ)` for `j = 0..k`: the forward difference at the first node
/// and the backward difference at the last node, both scaled by `h^{-j}`.
pub fn endpoint_derivatives(x: &[Vec<f64>], k: usize, h: f64) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    if x.len() < k + 1 {
        return Err(Error::Invalid(format!(
            "endpoint derivatives up to order {} need at least {} nodes, got {}",
            k.saturating_sub(1),
            k + 1,
            x.len()
        )));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::Invalid(format!(
            "grid step must be positive, got {h}"
        )));
    }
    let last = x.len() - 1;
    let dim = x[0].len();
    Ok((0..k)
        .map(|j| {
            let scale = h.powi(j as i32);
            let mut left = vec![0.0; dim];
            for (s, c) in forward_stencil(j).iter().enumerate() {
                for (o, v) in left.iter_mut().zip(&x[s]) {
                    *o += c * v / scale;
                }
            }
            let mut right = vec![0.0; dim];
            for (s, c) in backward_stencil(j).iter().enumerate() {
                for (o, v) in right.iter_mut().zip(&x[last - s]) {
                    *o += c * v / scale;
                }
            }
            (left, right)
        })
        .collect())
}
