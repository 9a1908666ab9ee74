#![allow(dead_code)]

use dfi_core::functions::{AffinePiece, MaxAffine};
use dfi_core::geometry::Polytope;
use dfi_core::linalg::{solve_dense, Matrix};
use dfi_core::maps::{LinearControlMap, PolyhedralMap, SetValuedMap};
use dfi_core::transcription::{
    adjoint_traces, endpoint_derivatives, forward_diff, forward_stencil, DiscreteTrajectory,
    DualCertificate, ProblemSpec,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.gen_range(lo..hi)).collect()
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> Matrix {
    let r: Vec<Vec<f64>> = (0..rows).map(|_| uniform(rng, -1.0, 1.0, cols)).collect();
    Matrix::from_rows(cols, &r).unwrap()
}

pub fn random_box(rng: &mut ChaCha8Rng, dim: usize) -> Polytope {
    let mut rows = Vec::new();
    let mut d = Vec::new();
    for i in 0..dim {
        let lo = rng.gen_range(-1.0..0.0);
        let hi = rng.gen_range(0.1..1.0);
        let mut e = vec![0.0; dim];
        e[i] = 1.0;
        rows.push(e.clone());
        d.push(hi);
        e[i] = -1.0;
        rows.push(e);
        d.push(-lo);
    }
    Polytope::from_rows(dim, &rows, d).unwrap()
}

pub fn random_linear_control(rng: &mut ChaCha8Rng, n: usize, r: usize) -> LinearControlMap {
    LinearControlMap::new(
        random_matrix(rng, n, n),
        random_matrix(rng, n, r),
        random_box(rng, r),
    )
    .unwrap()
}

/// Square polyhedral map whose `E` is well conditioned, so `F(x)` is never empty.
pub fn random_square_polyhedral(rng: &mut ChaCha8Rng, n: usize) -> PolyhedralMap {
    let a = random_matrix(rng, n, n);
    let mut e = random_matrix(rng, n, n);
    for i in 0..n {
        e.row_mut(i)[i] += 3.0;
    }
    PolyhedralMap::new(a, e, uniform(rng, 0.1, 1.0, n)).unwrap()
}

fn sample_velocity(rng: &mut ChaCha8Rng, map: &SetValuedMap, x: &[f64]) -> Vec<f64> {
    match map {
        SetValuedMap::LinearControl(f) => {
            let u: Vec<f64> = (0..f.control_dim())
                .map(|j| {
                    let hi = f.u().d()[2 * j];
                    let lo = -f.u().d()[2 * j + 1];
                    rng.gen_range(lo..hi)
                })
                .collect();
            let ax = f.a().mul_vec(x);
            let bu = f.b().mul_vec(&u);
            ax.iter().zip(&bu).map(|(a, b)| a + b).collect()
        }
        SetValuedMap::Polyhedral(f) => {
            // Ev = Ax - d + s with s >= 0
            let ax = f.a().mul_vec(x);
            let rhs: Vec<f64> = (0..f.num_rows())
                .map(|r| ax[r] - f.d()[r] + rng.gen_range(0.0..1.0))
                .collect();
            solve_dense(f.e(), &rhs).unwrap()
        }
    }
}

fn simulate(
    rng: &mut ChaCha8Rng,
    map: &SetValuedMap,
    k: usize,
    intervals: usize,
    h: f64,
) -> Vec<Vec<f64>> {
    let n = map.state_dim();
    let stencil = forward_stencil(k);
    let mut x: Vec<Vec<f64>> = (0..k).map(|_| uniform(rng, -1.0, 1.0, n)).collect();
    for i in 0..=intervals - k {
        let v = sample_velocity(rng, map, &x[i]);
        let next: Vec<f64> = (0..n)
            .map(|c| {
                h.powi(k as i32) * v[c] - (0..k).map(|s| stencil[s] * x[i + s][c]).sum::<f64>()
            })
            .collect();
        x.push(next);
    }
    x
}

pub struct Instance {
    pub spec: ProblemSpec,
    pub trajectories: Vec<DiscreteTrajectory>,
}

/// Bounded random instance (n <= 3, k in {1, 2}, N <= 8) together with a few
/// feasible trajectories. The state and endpoint boxes are sized to contain
/// the sampled trajectories.
pub fn random_instance(rng: &mut ChaCha8Rng, polyhedral: bool) -> Instance {
    let n = rng.gen_range(1..=3);
    let k = rng.gen_range(1..=2);
    let intervals = rng.gen_range((2 * k - 1).max(2)..=8);
    let horizon = rng.gen_range(0.5..2.0);
    let h = horizon / intervals as f64;
    let map: SetValuedMap = if polyhedral {
        random_square_polyhedral(rng, n).into()
    } else {
        let r = rng.gen_range(1..=2);
        random_linear_control(rng, n, r).into()
    };
    let states: Vec<Vec<Vec<f64>>> = (0..3)
        .map(|_| simulate(rng, &map, k, intervals, h))
        .collect();

    let mut x_bound: f64 = 0.0;
    let mut s_bound: f64 = 0.0;
    for x in &states {
        for xm in x {
            x_bound = xm.iter().fold(x_bound, |b, v| b.max(v.abs()));
        }
        for (l, r) in endpoint_derivatives(x, k, h).unwrap() {
            s_bound = l.iter().chain(&r).fold(s_bound, |b, v| b.max(v.abs()));
        }
    }
    let x_set = Polytope::cube(
        n,
        -(x_bound + rng.gen_range(0.0..1.0)),
        x_bound + rng.gen_range(0.0..1.0),
    );
    let s_set = Polytope::cube(
        2 * n,
        -(s_bound + rng.gen_range(0.0..1.0)),
        s_bound + rng.gen_range(0.0..1.0),
    );
    let pieces = (0..rng.gen_range(1..=3))
        .map(|_| AffinePiece {
            a: uniform(rng, -1.0, 1.0, 2 * n),
            b: rng.gen_range(-1.0..1.0),
        })
        .collect();
    let spec = ProblemSpec::new(
        k,
        horizon,
        intervals,
        map,
        MaxAffine::new(pieces).unwrap(),
        s_set,
        vec![x_set],
    )
    .unwrap();
    let trajectories = states
        .into_iter()
        .map(|x| DiscreteTrajectory::from_states(x, k, h).unwrap())
        .collect();
    Instance { spec, trajectories }
}

/// A certificate on which every term of the dual functional is finite: the
/// Euler–Lagrange relation is imposed exactly through the state multipliers
/// and `(μ₀, μ_T)` is chosen so the transversality argument is a convex
/// combination of the gradients of `f`.
pub fn dual_feasible_certificate(rng: &mut ChaCha8Rng, spec: &ProblemSpec) -> DualCertificate {
    let n = spec.state_dim();
    let k = spec.order();
    let h = spec.step();
    let inc = spec.inclusion_nodes();
    let scale = 10f64.powf(rng.gen_range(-2.0..0.5));
    let mut cert = DualCertificate::zeros(spec);
    for m in 0..spec.nodes() {
        cert.x_star[m] = uniform(rng, -scale, scale, n);
        cert.v_star[m] = uniform(rng, -scale, scale, n);
    }
    let sign = if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    match spec.dynamics() {
        SetValuedMap::LinearControl(f) => {
            let dy = forward_diff(&cert.x_star, k, h).unwrap();
            for i in 0..inc {
                let aty = f.a().tr_mul_vec(&cert.x_star[i + k]);
                cert.v_star[i] = (0..n).map(|c| sign * dy[i][c] - aty[c]).collect();
            }
        }
        SetValuedMap::Polyhedral(f) => {
            let lambda: Vec<Vec<f64>> = (0..inc)
                .map(|_| uniform(rng, 0.0, scale, f.num_rows()))
                .collect();
            for (i, l) in lambda.iter().enumerate() {
                cert.x_star[i + k] = f.e().tr_mul_vec(l).iter().map(|v| -v).collect();
            }
            let dy = forward_diff(&cert.x_star, k, h).unwrap();
            for (i, l) in lambda.iter().enumerate() {
                let atl = f.a().tr_mul_vec(l);
                cert.v_star[i] = (0..n).map(|c| sign * dy[i][c] + atl[c]).collect();
            }
            cert.lambda = Some(lambda);
        }
    }
    let traces = adjoint_traces(spec, &cert).unwrap();
    let pieces = spec.objective().pieces();
    let mut w = uniform(rng, 0.0, 1.0, pieces.len());
    let total: f64 = w.iter().sum();
    w.iter_mut().for_each(|v| *v /= total);
    let g: Vec<f64> = (0..2 * n)
        .map(|c| pieces.iter().zip(&w).map(|(p, wl)| wl * p.a[c]).sum())
        .collect();
    let left_sign = if (k - 1).is_multiple_of(2) { 1.0 } else { -1.0 };
    cert.mu0 = (0..n)
        .map(|c| g[c] - left_sign * traces.left[k - 1][c])
        .collect();
    cert.mu_t = (0..n)
        .map(|c| g[n + c] - sign * traces.right[k - 1][c])
        .collect();
    cert
}

/// A polyhedral LAM test case: a graph point, an adjoint velocity for which
/// the point is an argmaximum, and candidate adjoints to classify.
pub struct LamCase {
    pub map: PolyhedralMap,
    pub x_tilde: Vec<f64>,
    pub v_tilde: Vec<f64>,
    pub v_star: Vec<f64>,
    pub candidates: Vec<Vec<f64>>,
}

pub fn random_lam_case(rng: &mut ChaCha8Rng) -> LamCase {
    let n = rng.gen_range(1..=3);
    let m = rng.gen_range(1..=3);
    let a = random_matrix(rng, m, n);
    let e = random_matrix(rng, m, n);
    let x_tilde = uniform(rng, -1.0, 1.0, n);
    let v_tilde = uniform(rng, -1.0, 1.0, n);
    let ax = a.mul_vec(&x_tilde);
    let ev = e.mul_vec(&v_tilde);
    let active: Vec<bool> = (0..m).map(|_| rng.gen_bool(0.6)).collect();
    let d: Vec<f64> = (0..m)
        .map(|r| {
            ax[r] - ev[r]
                + if active[r] {
                    0.0
                } else {
                    rng.gen_range(0.1..1.0)
                }
        })
        .collect();
    let lambda: Vec<f64> = (0..m)
        .map(|r| {
            if active[r] {
                rng.gen_range(0.0..1.0)
            } else {
                0.0
            }
        })
        .collect();
    let v_star: Vec<f64> = e.tr_mul_vec(&lambda).iter().map(|v| -v).collect();
    let member: Vec<f64> = a.tr_mul_vec(&lambda).iter().map(|v| -v).collect();
    let mut candidates = vec![member.clone()];
    for _ in 0..3 {
        let delta = uniform(rng, -1.0, 1.0, n);
        let norm = delta.iter().fold(0.0f64, |b, v| b.max(v.abs())).max(1e-3);
        let size = rng.gen_range(0.05..1.0);
        candidates.push(
            member
                .iter()
                .zip(&delta)
                .map(|(x, dl)| x + size * dl / norm)
                .collect(),
        );
    }
    for _ in 0..3 {
        candidates.push(uniform(rng, -2.0, 2.0, n));
    }
    let map = PolyhedralMap::new(a, e, d).unwrap();
    LamCase {
        map,
        x_tilde,
        v_tilde,
        v_star,
        candidates,
    }
}
