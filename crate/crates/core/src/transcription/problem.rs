//! Problem data and the primal/dual objects living on the grid.

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::functions::MaxAffine;
use crate::geometry::Polytope;
use crate::maps::SetValuedMap;

use super::diff::forward_diff;

/// A discretized Mayer problem
/// `min f(x_0, x_N)` s.t. `(Δᵏx)_i/hᵏ ∈ F(x_i)`, endpoint pairs of every order
/// `j < k` in `S`, and `x_m ∈ X_m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemSpec {
    order: usize,
    horizon: f64,
    intervals: usize,
    dynamics: SetValuedMap,
    objective: MaxAffine,
    endpoint_set: Polytope,
    state_sets: Vec<Polytope>,
}

impl ProblemSpec {
    /// `state_sets` holds either one polytope (replicated on every node) or
    /// exactly `intervals + 1`.
    pub fn new(
        order: usize,
        horizon: f64,
        intervals: usize,
        dynamics: SetValuedMap,
        objective: MaxAffine,
        endpoint_set: Polytope,
        mut state_sets: Vec<Polytope>,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::Invalid("derivative order must be at least 1".into()));
        }
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(Error::Invalid(format!(
                "horizon must be positive, got {horizon}"
            )));
        }
        if intervals < 2 * order - 1 {
            return Err(Error::Invalid(format!(
                "order {order} needs at least {} grid intervals, got {intervals}",
                2 * order - 1
            )));
        }
        let n = dynamics.state_dim();
        check_len("objective dimension", 2 * n, objective.dim())?;
        check_len("endpoint set dimension", 2 * n, endpoint_set.dim())?;
        if endpoint_set.is_empty()? {
            return Err(Error::Invalid("endpoint set S is empty".into()));
        }
        if state_sets.len() == 1 {
            state_sets = vec![state_sets.remove(0); intervals + 1];
        }
        check_len("state sets", intervals + 1, state_sets.len())?;
        for (m, x) in state_sets.iter().enumerate() {
            check_len("state set dimension", n, x.dim())?;
            if x.is_empty()? {
                return Err(Error::Invalid(format!("state set at node {m} is empty")));
            }
        }
        Ok(ProblemSpec {
            order,
            horizon,
            intervals,
            dynamics,
            objective,
            endpoint_set,
            state_sets,
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn intervals(&self) -> usize {
        self.intervals
    }

    pub fn nodes(&self) -> usize {
        self.intervals + 1
    }

    /// Number of inclusion nodes `N - k + 1`.
    pub fn inclusion_nodes(&self) -> usize {
        self.intervals + 1 - self.order
    }

    pub fn step(&self) -> f64 {
        self.horizon / self.intervals as f64
    }

    pub fn state_dim(&self) -> usize {
        self.dynamics.state_dim()
    }

    pub fn dynamics(&self) -> &SetValuedMap {
        &self.dynamics
    }

    pub fn objective(&self) -> &MaxAffine {
        &self.objective
    }

    pub fn endpoint_set(&self) -> &Polytope {
        &self.endpoint_set
    }

    pub fn state_set(&self, m: usize) -> &Polytope {
        &self.state_sets[m]
    }

    pub fn state_sets(&self) -> &[Polytope] {
        &self.state_sets
    }

    /// Same problem on a different grid (state sets must be constant).
    pub fn with_intervals(&self, intervals: usize) -> Result<Self> {
        ProblemSpec::new(
            self.order,
            self.horizon,
            intervals,
            self.dynamics.clone(),
            self.objective.clone(),
            self.endpoint_set.clone(),
            vec![self.state_sets[0].clone()],
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteTrajectory {
    pub x: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl DiscreteTrajectory {
    /// Builds `v_i = (Δᵏx)_i / hᵏ` from the states.
    pub fn from_states(x: Vec<Vec<f64>>, order: usize, h: f64) -> Result<Self> {
        let v = forward_diff(&x, order, h)?;
        Ok(DiscreteTrajectory { x, v })
    }

    pub fn check_shape(&self, spec: &ProblemSpec) -> Result<()> {
        check_len("trajectory nodes", spec.nodes(), self.x.len())?;
        check_len(
            "trajectory velocities",
            spec.inclusion_nodes(),
            self.v.len(),
        )?;
        let n = spec.state_dim();
        for x in self.x.iter().chain(&self.v) {
            check_len("trajectory entry", n, x.len())?;
        }
        Ok(())
    }

    pub fn endpoints(&self) -> Vec<f64> {
        let mut e = self.x[0].clone();
        e.extend_from_slice(self.x.last().expect("nonempty grid"));
        e
    }
}

/// Adjoint data: the adjoint arc `x*`, state multipliers `v*`, endpoint
/// multipliers `(μ₀, μ_T)` and, for polyhedral maps, graph multipliers `λ`.
///
/// The adjoint paired with the inclusion at node `i` is `x*_{i+k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DualCertificate {
    pub x_star: Vec<Vec<f64>>,
    pub v_star: Vec<Vec<f64>>,
    pub mu0: Vec<f64>,
    #[serde(rename = "mu_T")]
    pub mu_t: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Vec<f64>>>,
}

impl DualCertificate {
    pub fn zeros(spec: &ProblemSpec) -> Self {
        let n = spec.state_dim();
        let lambda = match spec.dynamics() {
            SetValuedMap::Polyhedral(p) => {
                Some(vec![vec![0.0; p.num_rows()]; spec.inclusion_nodes()])
            }
            SetValuedMap::LinearControl(_) => None,
        };
        DualCertificate {
            x_star: vec![vec![0.0; n]; spec.nodes()],
            v_star: vec![vec![0.0; n]; spec.nodes()],
            mu0: vec![0.0; n],
            mu_t: vec![0.0; n],
            lambda,
        }
    }

    pub fn check_shape(&self, spec: &ProblemSpec) -> Result<()> {
        let n = spec.state_dim();
        check_len("adjoint nodes", spec.nodes(), self.x_star.len())?;
        check_len("state multiplier nodes", spec.nodes(), self.v_star.len())?;
        for v in self.x_star.iter().chain(&self.v_star) {
            check_len("certificate entry", n, v.len())?;
        }
        check_len("mu0", n, self.mu0.len())?;
        check_len("mu_T", n, self.mu_t.len())?;
        if let Some(lambda) = &self.lambda {
            let SetValuedMap::Polyhedral(p) = spec.dynamics() else {
                return Err(Error::Invalid(
                    "graph multipliers given for a linear-control map".into(),
                ));
            };
            check_len("lambda nodes", spec.inclusion_nodes(), lambda.len())?;
            for l in lambda {
                check_len("lambda entry", p.num_rows(), l.len())?;
            }
        }
        Ok(())
    }

    pub fn negated(&self) -> Self {
        let neg = |v: &Vec<Vec<f64>>| v.iter().map(|r| r.iter().map(|x| -x).collect()).collect();
        DualCertificate {
            x_star: neg(&self.x_star),
            v_star: neg(&self.v_star),
            mu0: self.mu0.iter().map(|x| -x).collect(),
            mu_t: self.mu_t.iter().map(|x| -x).collect(),
            lambda: self.lambda.clone(),
        }
    }
}
