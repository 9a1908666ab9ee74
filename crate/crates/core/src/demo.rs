//! Built-in instances with known solutions.

use crate::error::Result;
use crate::functions::MaxAffine;
use crate::geometry::Polytope;
use crate::linalg::Matrix;
use crate::maps::{LinearControlMap, PolyhedralMap};
use crate::transcription::ProblemSpec;

pub const DECAY_INTERVALS: usize = 10;
pub const PTL_INTERVALS: usize = 64;
pub const PFC_INTERVALS: usize = 32;

fn scalar(v: f64) -> Matrix {
    Matrix::from_rows(1, &[vec![v]]).expect("1x1")
}

/// `{(a, b) : a = value}` in `R²`.
fn first_fixed(value: f64) -> Polytope {
    Polytope::from_rows(2, &[vec![1.0, 0.0], vec![-1.0, 0.0]], vec![value, -value])
        .expect("two rows")
}

fn terminal_state() -> MaxAffine {
    MaxAffine::affine(vec![0.0, 1.0], 0.0).expect("one piece")
}

/// `x' = -x`, `x(0) = 1`, minimize `x(T)`, `T = 1`, `N = 10`. The explicit
/// Euler recurrence gives the optimum `0.9¹⁰`.
pub fn decay() -> Result<ProblemSpec> {
    let map = LinearControlMap::new(scalar(-1.0), scalar(0.0), Polytope::cube(1, -1.0, 1.0))?;
    ProblemSpec::new(
        1,
        1.0,
        DECAY_INTERVALS,
        map.into(),
        terminal_state(),
        first_fixed(1.0),
        vec![Polytope::whole_space(1)],
    )
}

/// `x''' ∈ [-1, 1]`, zero initial data, minimize `x(T)`, `T = 1`. The
/// continuous optimum is `-1/6` with the bang-bang control `u ≡ -1`.
pub fn ptl(intervals: usize) -> Result<ProblemSpec> {
    let map = LinearControlMap::new(scalar(0.0), scalar(1.0), Polytope::cube(1, -1.0, 1.0))?;
    ProblemSpec::new(
        3,
        1.0,
        intervals,
        map.into(),
        terminal_state(),
        first_fixed(0.0),
        vec![Polytope::whole_space(1)],
    )
}

/// `x'''' ∈ F(x) = [x - 1, 1]` written as `{v : x - v <= 1, v <= 1}`, zero
/// initial data, `|x| <= 10`, minimize `x(T)`, `T = 1`. The continuous
/// solution is `1 - (cosh t + cos t)/2` with the first row active.
pub fn pfc(intervals: usize) -> Result<ProblemSpec> {
    let a = Matrix::from_rows(1, &[vec![1.0], vec![0.0]])?;
    let e = Matrix::from_rows(1, &[vec![1.0], vec![-1.0]])?;
    let map = PolyhedralMap::new(a, e, vec![1.0, 1.0])?;
    ProblemSpec::new(
        4,
        1.0,
        intervals,
        map.into(),
        terminal_state(),
        first_fixed(0.0),
        vec![Polytope::cube(1, -10.0, 10.0)],
    )
}

/// Discrete optimum of [`ptl`]: `-C(N, 3)/N³` for `T = 1`.
pub fn ptl_discrete_optimum(intervals: usize) -> f64 {
    let n = intervals as f64;
    -(n * (n - 1.0) * (n - 2.0) / 6.0) / n.powi(3)
}

pub fn pfc_continuous_solution(t: f64) -> f64 {
    1.0 - (t.cosh() + t.cos()) / 2.0
}
