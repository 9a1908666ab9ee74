//! JSON problem files.
//!
//! ```json
//! {
//!   "order": 1, "horizon": 1.0, "grid": 10,
//!   "dynamics": {"type": "linear_control", "A": [[-1]], "B": [[0]],
//!                "U": {"A": [[1], [-1]], "d": [1, 1]}},
//!   "objective": {"rows": [{"a0": [0], "aT": [1], "b": 0}]},
//!   "endpoint_set": {"A": [[1, 0], [-1, 0]], "d": [1, -1]},
//!   "state_set": {"A": [], "d": []}
//! }
//! ```

use anyhow::{anyhow, bail, Context, Result};
use dfi_core::functions::{AffinePiece, MaxAffine};
use dfi_core::geometry::Polytope;
use dfi_core::maps::{LinearControlMap, PolyhedralMap, SetValuedMap};
use dfi_core::transcription::ProblemSpec;
use dfi_core::Matrix;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemDocument {
    pub order: usize,
    pub horizon: f64,
    pub grid: usize,
    pub dynamics: DynamicsDocument,
    pub objective: ObjectiveDocument,
    pub endpoint_set: PolytopeDocument,
    /// Omitted means the whole space at every node.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state_set: Option<StateSetDocument>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum DynamicsDocument {
    LinearControl {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "B")]
        b: Vec<Vec<f64>>,
        #[serde(rename = "U")]
        u: PolytopeDocument,
    },
    Polyhedral {
        #[serde(rename = "A")]
        a: Vec<Vec<f64>>,
        #[serde(rename = "E")]
        e: Vec<Vec<f64>>,
        d: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveDocument {
    pub rows: Vec<ObjectiveRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveRow {
    pub a0: Vec<f64>,
    #[serde(rename = "aT")]
    pub a_t: Vec<f64>,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeDocument {
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub d: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSetDocument {
    PerNode(PerNodeDocument),
    Constant(PolytopeDocument),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PerNodeDocument {
    pub per_node: Vec<PolytopeDocument>,
}

fn matrix(field: &str, cols: usize, rows: &[Vec<f64>]) -> Result<Matrix> {
    Matrix::from_rows(cols, rows).map_err(|e| anyhow!("{field}: {e}"))
}

fn columns(field: &str, rows: &[Vec<f64>]) -> Result<usize> {
    rows.first()
        .map(Vec::len)
        .ok_or_else(|| anyhow!("{field}: needs at least one row"))
}

impl PolytopeDocument {
    fn to_polytope(&self, field: &str, dim: usize) -> Result<Polytope> {
        Polytope::new(matrix(&format!("{field}.A"), dim, &self.a)?, self.d.clone())
            .map_err(|e| anyhow!("{field}: {e}"))
    }

    fn from_polytope(q: &Polytope) -> Self {
        PolytopeDocument {
            a: q.a().to_rows(),
            d: q.d().to_vec(),
        }
    }
}

impl ProblemDocument {
    /// Parses a document. Errors name the offending key and its position.
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| anyhow!("problem document: {e}"))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("documents always serialize")
    }

    pub fn to_spec(&self) -> Result<ProblemSpec> {
        let (dynamics, n): (SetValuedMap, usize) = match &self.dynamics {
            DynamicsDocument::LinearControl { a, b, u } => {
                let n = a.len();
                let r = columns("dynamics.B", b)?;
                let map = LinearControlMap::new(
                    matrix("dynamics.A", n, a)?,
                    matrix("dynamics.B", r, b)?,
                    u.to_polytope("dynamics.U", r)?,
                )
                .context("dynamics")?;
                (map.into(), n)
            }
            DynamicsDocument::Polyhedral { a, e, d } => {
                let n = columns("dynamics.A", a)?;
                let map = PolyhedralMap::new(
                    matrix("dynamics.A", n, a)?,
                    matrix("dynamics.E", n, e)?,
                    d.clone(),
                )
                .context("dynamics")?;
                (map.into(), n)
            }
        };
        let pieces = self
            .objective
            .rows
            .iter()
            .enumerate()
            .map(|(i, row)| {
                if row.a0.len() != n || row.a_t.len() != n {
                    bail!("objective.rows[{i}]: a0 and aT need {n} entries");
                }
                let mut a = row.a0.clone();
                a.extend_from_slice(&row.a_t);
                Ok(AffinePiece { a, b: row.b })
            })
            .collect::<Result<Vec<_>>>()?;
        let objective = MaxAffine::new(pieces).context("objective")?;
        let endpoint = self.endpoint_set.to_polytope("endpoint_set", 2 * n)?;
        let states = match &self.state_set {
            None => vec![Polytope::whole_space(n)],
            Some(StateSetDocument::Constant(q)) => vec![q.to_polytope("state_set", n)?],
            Some(StateSetDocument::PerNode(p)) => p
                .per_node
                .iter()
                .enumerate()
                .map(|(m, q)| q.to_polytope(&format!("state_set.per_node[{m}]"), n))
                .collect::<Result<Vec<_>>>()?,
        };
        ProblemSpec::new(
            self.order,
            self.horizon,
            self.grid,
            dynamics,
            objective,
            endpoint,
            states,
        )
        .map_err(|e| anyhow!("problem: {e}"))
    }

    pub fn from_spec(spec: &ProblemSpec) -> Self {
        let n = spec.state_dim();
        let dynamics = match spec.dynamics() {
            SetValuedMap::LinearControl(f) => DynamicsDocument::LinearControl {
                a: f.a().to_rows(),
                b: f.b().to_rows(),
                u: PolytopeDocument::from_polytope(f.u()),
            },
            SetValuedMap::Polyhedral(f) => DynamicsDocument::Polyhedral {
                a: f.a().to_rows(),
                e: f.e().to_rows(),
                d: f.d().to_vec(),
            },
        };
        let rows = spec
            .objective()
            .pieces()
            .iter()
            .map(|p| ObjectiveRow {
                a0: p.a[..n].to_vec(),
                a_t: p.a[n..].to_vec(),
                b: p.b,
            })
            .collect();
        let sets = spec.state_sets();
        let state_set = if sets.iter().all(|q| q == &sets[0]) {
            (sets[0].num_rows() > 0)
                .then(|| StateSetDocument::Constant(PolytopeDocument::from_polytope(&sets[0])))
        } else {
            Some(StateSetDocument::PerNode(PerNodeDocument {
                per_node: sets.iter().map(PolytopeDocument::from_polytope).collect(),
            }))
        };
        ProblemDocument {
            order: spec.order(),
            horizon: spec.horizon(),
            grid: spec.intervals(),
            dynamics,
            objective: ObjectiveDocument { rows },
            endpoint_set: PolytopeDocument::from_polytope(spec.endpoint_set()),
            state_set,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn demo_documents_round_trip_through_the_spec() {
        for spec in [
            dfi_core::demo::decay().unwrap(),
            dfi_core::demo::ptl(8).unwrap(),
            dfi_core::demo::pfc(8).unwrap(),
        ] {
            let doc = ProblemDocument::from_spec(&spec);
            let parsed = ProblemDocument::from_json(&doc.to_json()).unwrap();
            assert_eq!(parsed, doc);
            assert_eq!(parsed.to_spec().unwrap(), spec);
        }
    }

    #[test]
    fn misspelled_key_is_named() {
        let doc = ProblemDocument::from_spec(&dfi_core::demo::decay().unwrap());
        let text = doc.to_json().replace("\"grid\"", "\"gird\"");
        let err = ProblemDocument::from_json(&text).unwrap_err().to_string();
        assert!(err.contains("gird"), "{err}");
    }

    #[test]
    fn wrong_objective_width_is_addressed() {
        let mut doc = ProblemDocument::from_spec(&dfi_core::demo::decay().unwrap());
        doc.objective.rows[0].a_t.push(1.0);
        let err = doc.to_spec().unwrap_err().to_string();
        assert!(err.contains("objective.rows[0]"), "{err}");
    }
}
