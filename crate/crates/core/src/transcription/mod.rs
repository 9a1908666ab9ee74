//! Uniform-grid transcription of the k-th order problem, its LP, and the
//! discrete dual functional.

mod diff;
mod dual;
mod primal;
mod problem;
mod specialize;

pub use diff::{
    backward_stencil, binomial, endpoint_derivatives, forward_diff, forward_stencil,
    DifferenceOperator,
};
pub use dual::{
    adjoint_traces, boundary_functional, dual_breakdown, euler_lagrange_arguments,
    evaluate_dual_functional, extract_dual_certificate, AdjointTraces, DualBreakdown, DualOptions,
    DUAL_FEAS_TOL,
};
pub use primal::{assemble_primal_lp, solve_primal, PrimalIndex, PrimalSolution};
pub use problem::{DiscreteTrajectory, DualCertificate, ProblemSpec};
pub use specialize::{
    specialize_dual, DualKind, SpecializedDual, SpecializedTerm, SpecializedValue,
};
